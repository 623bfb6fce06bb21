use std::fs;
use std::path::PathBuf;
use std::process::{Command, Output};

fn treedag(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_treedag")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn corpus_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../core/tests/fixtures/corpus")
}

fn write_tree(dir: &tempfile::TempDir, name: &str, text: &str) -> String {
    let p = dir.path().join(name);
    fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

fn row(out: &str) -> Vec<String> {
    out.lines().nth(1).unwrap().split('\t').map(str::to_string).collect()
}

#[test]
fn stats_on_term_and_xml() {
    let dir = tempfile::tempdir().unwrap();
    let term = write_tree(&dir, "t.term", "f(f(g(a),g(a)),g(a),g(a))");
    let o = treedag(&["stats", &term]);
    assert_eq!(o.status.code(), Some(0));
    let r = row(&stdout(&o));
    assert_eq!(&r[1..10], ["9", "3", "1.5", "3", "6", "6", "9", "5", "6"]);

    let xml = corpus_dir().join("prefixes.xml");
    let r = row(&stdout(&treedag(&["stats", xml.to_str().unwrap()])));
    assert_eq!((r[5].as_str(), r[6].as_str(), r[7].as_str(), r[8].as_str()), ("8", "8", "7", "8"));
}

#[test]
fn compress_roundtrip_every_method() {
    let dir = tempfile::tempdir().unwrap();
    let text = "r(x(a,b,c),y(a,b,c,d),x(a,b,c),z(b,c,d),w)";
    let input = write_tree(&dir, "t.term", text);
    for m in ["dag", "bdag", "rbdag", "hdag", "rhdag", "ds"] {
        let out = dir.path().join(format!("t.{m}"));
        let o = treedag(&["compress", &input, "--method", m, "--out", out.to_str().unwrap()]);
        assert_eq!(o.status.code(), Some(0), "{m}");
        let o = treedag(&["decompress", out.to_str().unwrap()]);
        assert_eq!(stdout(&o).trim(), text, "{m}");
    }
}

#[test]
fn queries_on_trees_and_files() {
    let dir = tempfile::tempdir().unwrap();
    let input = write_tree(&dir, "t.term", "f(f(g(a),g(a)),g(a),g(a))");
    let ask = |kind: &str, rep: &str, file: &str, p: &str, q: &str| {
        let o = treedag(&["query", kind, "--rep", rep, file, p, q]);
        assert_eq!(o.status.code(), Some(0), "{kind} {rep} {p} {q}");
        stdout(&o).trim() == "true"
    };
    for rep in ["dag", "bdag", "hdag", "ds"] {
        assert!(ask("subtree-eq", rep, &input, "3", "9"));
        assert!(!ask("subtree-eq", rep, &input, "2", "3"));
    }
    for rep in ["dag", "bdag", "hdag"] {
        assert!(ask("sibseq-eq", rep, &input, "3", "7"));
        assert!(!ask("sibseq-eq", rep, &input, "3", "5"));
    }
    let hdag = dir.path().join("t.hdag");
    treedag(&["compress", &input, "--method", "hdag", "--out", hdag.to_str().unwrap()]);
    assert!(ask("sibseq-eq", "hdag", hdag.to_str().unwrap(), "5", "9"));

    let o = treedag(&["query", "subtree-eq", "--rep", "dag", &input, "1", "11"]);
    assert_eq!(o.status.code(), Some(2));
    let o = treedag(&["query", "sibseq-eq", "--rep", "ds", &input, "1", "2"]);
    assert_eq!(o.status.code(), Some(1));
    let o = treedag(&["query", "subtree-eq", "--rep", "dag", hdag.to_str().unwrap(), "1", "2"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn census_output() {
    let o = treedag(&["census", "--class", "unranked", "--m", "1", "--n", "2", "--measure", "nodes", "--brute-force"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(
        lines[0],
        "class\tm\tn\tmeasure\taccumulated\tcount\taverage\tfraction\tprediction\tbrute_force"
    );
    assert_eq!(lines[1], "unranked\t1\t2\tnodes\t5\t2\t2.500000000000\t5/2\t-\t5");
    let o = treedag(&["census", "--class", "binary", "--m", "1", "--n", "50", "--measure", "edges", "--predict"]);
    let r = row(&stdout(&o));
    assert!(r[8].parse::<f64>().unwrap() > 0.0);
}

#[test]
fn corpus_report_is_deterministic() {
    let dir = corpus_dir();
    let a = treedag(&["corpus", dir.to_str().unwrap()]);
    let b = treedag(&["corpus", dir.to_str().unwrap()]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let out = stdout(&a);
    assert_eq!(out.lines().filter(|l| !l.starts_with('#')).count(), 5);
    assert!(out.lines().any(|l| l.starts_with("# failed\tbroken.xml")));
    let filtered = stdout(&treedag(&["corpus", dir.to_str().unwrap(), "--min-edges", "10000"]));
    let body: Vec<&str> = filtered.lines().filter(|l| !l.starts_with('#')).collect();
    assert_eq!(body.len(), 2);
    assert!(body[1].starts_with("accumulated\t0\t"));
}

#[test]
fn families_and_bounds() {
    let o = treedag(&["family", "tn", "3"]);
    assert_eq!(stdout(&o).trim(), "f(g(a),g(a),g(a))");
    let o = treedag(&["family", "thm3", "1"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("A2 -> f(A1,a)"));
    assert_eq!(treedag(&["family", "sn", "0"]).status.code(), Some(2));
    let o = treedag(&["verify-bounds", "--trees", "200", "--seed", "7"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).ends_with("violations\t0\n"));
}

#[test]
fn exit_codes() {
    assert_eq!(treedag(&[]).status.code(), Some(1));
    assert_eq!(treedag(&["compress", "x", "--method", "zip"]).status.code(), Some(1));
    assert_eq!(treedag(&["--help"]).status.code(), Some(0));
    assert_eq!(treedag(&["stats", "/nonexistent/file.xml"]).status.code(), Some(2));
    let dir = tempfile::tempdir().unwrap();
    let bad = write_tree(&dir, "bad.xml", "<a><b></a>");
    let o = treedag(&["stats", &bad]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("byte"));
    let dtd = write_tree(&dir, "dtd.xml", "<!DOCTYPE a [<!ENTITY e \"x\">]><a>&e;</a>");
    assert_eq!(treedag(&["stats", &dtd]).status.code(), Some(2));
}
