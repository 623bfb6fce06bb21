//! `treedag`: compress trees into dags, hybrid dags and grammar-compressed
//! dags, answer equality queries, and run the size census.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use num_bigint::BigUint;

use treedag::census::{self, Class, Measure};
use treedag::dag::{self, BinaryDag, Dag};
use treedag::encode::{fcns, fcns_inverse, lcps, lcps_inverse};
use treedag::equality::{SibseqIndex, SubtreeIndex, MINIMALITY_BUDGET};
use treedag::error::Error;
use treedag::hybrid::bounds::check_bounds;
use treedag::hybrid::witness::{witness, Family, Witness};
use treedag::hybrid::{parse_hybrid, write_hybrid, HybridDag, Orientation};
use treedag::ingest::{self, CorpusFilter, REPORT_HEADER};
use treedag::random::{alphabet, random_tree_upto, rng};
use treedag::slt::{build_compressed_dag, parse_compressed_dag, write_compressed_dag, CompressedDag, UNFOLD_BUDGET};
use treedag::tree::{parse_term, UnrankedTree};

#[derive(Parser)]
#[command(name = "treedag", version, about = "Dag-based compression of unranked trees")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Method {
    Dag,
    Bdag,
    Rbdag,
    Hdag,
    Rhdag,
    Ds,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Rep {
    Dag,
    Bdag,
    Hdag,
    Ds,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum QueryKind {
    SubtreeEq,
    SibseqEq,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ClassArg {
    Binary,
    Unranked,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum MeasureArg {
    Nodes,
    Edges,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum FamilyArg {
    Tn,
    Sn,
    #[value(name = "thm3")]
    HdagGap,
}

#[derive(Subcommand)]
enum Command {
    /// Characteristics and compressed sizes of one document (XML or term notation)
    Stats { input: PathBuf },
    /// Statistics report over every .xml file of a directory
    Corpus {
        dir: PathBuf,
        #[arg(long, default_value_t = 0)]
        min_edges: usize,
        #[arg(long, default_value_t = 0)]
        min_depth: usize,
    },
    /// Writes a compressed representation
    Compress {
        input: PathBuf,
        #[arg(long, value_enum)]
        method: Method,
        /// Output file; standard output if absent
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Unfolds a compressed file back into term notation
    Decompress {
        input: PathBuf,
        /// Overrides the method recorded in the file
        #[arg(long, value_enum)]
        method: Option<Method>,
    },
    /// Compares the subtrees or sibling sequences at preorder positions P and Q (1-based)
    Query {
        #[arg(value_enum)]
        kind: QueryKind,
        #[arg(long, value_enum)]
        rep: Rep,
        /// A tree, or a file written by `compress` with a matching method
        input: PathBuf,
        p: BigUint,
        q: BigUint,
    },
    /// Exact accumulated and average dag sizes over all trees of edge size N
    Census {
        #[arg(long, value_enum)]
        class: ClassArg,
        #[arg(long)]
        m: u32,
        #[arg(long)]
        n: usize,
        #[arg(long, value_enum)]
        measure: MeasureArg,
        /// Also enumerate every tree and compare
        #[arg(long)]
        brute_force: bool,
        /// Append the leading asymptotic term
        #[arg(long)]
        predict: bool,
    },
    /// Checks the size bounds on seeded random trees
    VerifyBounds {
        #[arg(long)]
        trees: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 200)]
        max_edges: usize,
        #[arg(long, default_value_t = 4)]
        labels: usize,
    },
    /// Prints a member of a witness family
    Family {
        #[arg(value_enum)]
        family: FamilyArg,
        n: usize,
    },
}

enum Failure {
    Usage(String),
    Input(Error),
    Internal(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Failure {
        match e {
            Error::Invariant(m) => Failure::Internal(m),
            e => Failure::Input(e),
        }
    }
}

type Outcome = Result<String, Failure>;

const HEADER_PREFIX: &str = "# treedag ";

fn method_name(m: Method) -> &'static str {
    match m {
        Method::Dag => "dag",
        Method::Bdag => "bdag",
        Method::Rbdag => "rbdag",
        Method::Hdag => "hdag",
        Method::Rhdag => "rhdag",
        Method::Ds => "ds",
    }
}

fn read_text(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Input(Error::Io(format!("{}: {e}", path.display()))))
}

/// XML if the file looks like markup, term notation otherwise.
fn read_tree(path: &Path) -> Result<UnrankedTree, Failure> {
    let text = read_text(path)?;
    let t = if text.trim_start().starts_with('<') {
        ingest::ingest_xml(text.as_bytes())?
    } else {
        parse_term(&text)?
    };
    Ok(t)
}

fn recorded_method(text: &str) -> Option<Method> {
    let first = text.lines().next()?.strip_prefix(HEADER_PREFIX)?.trim();
    Method::from_str(first, true).ok()
}

fn compress(t: &UnrankedTree, method: Method) -> Result<String, Failure> {
    let forest = std::slice::from_ref(t);
    let body = match method {
        Method::Dag => dag::write_dag(&dag::minimize(t)),
        Method::Bdag => dag::write_binary_dag(&dag::minimize_binary(&fcns(forest))),
        Method::Rbdag => dag::write_binary_dag(&dag::minimize_binary(&lcps(forest))),
        Method::Hdag => write_hybrid(&HybridDag::build(t, Orientation::Fcns)?),
        Method::Rhdag => write_hybrid(&HybridDag::build(t, Orientation::Lcps)?),
        Method::Ds => write_compressed_dag(&build_compressed_dag(t)),
    };
    Ok(format!("{HEADER_PREFIX}{}\n{body}", method_name(method)))
}

fn single_tree(mut forest: Vec<UnrankedTree>) -> Result<UnrankedTree, Failure> {
    if forest.len() != 1 {
        return Err(Failure::Input(Error::MalformedGrammar(format!(
            "binary dag encodes {} trees, expected one",
            forest.len()
        ))));
    }
    Ok(forest.pop().unwrap())
}

fn decompress(text: &str, method: Method) -> Result<UnrankedTree, Failure> {
    Ok(match method {
        Method::Dag => dag::parse_dag(text)?.unfold()?,
        Method::Bdag | Method::Rbdag => {
            let b = dag::parse_binary_dag(text)?;
            let tree = b.eval(b.root())?;
            single_tree(if method == Method::Bdag {
                fcns_inverse(&tree)
            } else {
                lcps_inverse(&tree)
            })?
        }
        Method::Hdag => parse_hybrid(text, Orientation::Fcns)?.unfold()?,
        Method::Rhdag => parse_hybrid(text, Orientation::Lcps)?.unfold()?,
        Method::Ds => parse_compressed_dag(text)?.unfold(UNFOLD_BUDGET)?,
    })
}

enum Loaded {
    Dag(Dag),
    Bdag(BinaryDag),
    Hdag(HybridDag),
    Ds(CompressedDag),
}

fn load(path: &Path, rep: Rep) -> Result<Loaded, Failure> {
    let text = read_text(path)?;
    if let Some(m) = recorded_method(&text) {
        return Ok(match (rep, m) {
            (Rep::Dag, Method::Dag) => Loaded::Dag(dag::parse_dag(&text)?),
            (Rep::Bdag, Method::Bdag) => Loaded::Bdag(dag::parse_binary_dag(&text)?),
            (Rep::Hdag, Method::Hdag) => Loaded::Hdag(parse_hybrid(&text, Orientation::Fcns)?),
            (Rep::Ds, Method::Ds) => Loaded::Ds(parse_compressed_dag(&text)?),
            _ => {
                return Err(Failure::Usage(format!(
                    "file holds a {} representation, not the requested one",
                    method_name(m)
                )))
            }
        });
    }
    let t = read_tree(path)?;
    Ok(match rep {
        Rep::Dag => Loaded::Dag(dag::minimize(&t)),
        Rep::Bdag => Loaded::Bdag(dag::minimize_binary(&fcns(std::slice::from_ref(&t)))),
        Rep::Hdag => Loaded::Hdag(HybridDag::build(&t, Orientation::Fcns)?),
        Rep::Ds => Loaded::Ds(build_compressed_dag(&t)),
    })
}

fn query(kind: QueryKind, rep: Rep, input: &Path, p: &BigUint, q: &BigUint) -> Outcome {
    let loaded = load(input, rep)?;
    let answer = match kind {
        QueryKind::SubtreeEq => {
            let index = match &loaded {
                Loaded::Dag(d) => SubtreeIndex::from_dag(d)?,
                Loaded::Bdag(b) => SubtreeIndex::from_bdag(b)?,
                Loaded::Hdag(h) => SubtreeIndex::from_dag(&h.to_grammar()?.to_dag())?,
                Loaded::Ds(c) => {
                    if !c.is_minimal(MINIMALITY_BUDGET)? {
                        return Err(Failure::Input(Error::NonMinimalCompressedDag));
                    }
                    SubtreeIndex::from_compressed(c)?
                }
            };
            index.subtree_eq_big(p, q)?
        }
        QueryKind::SibseqEq => {
            let index = match &loaded {
                Loaded::Dag(d) => SibseqIndex::from_dag(d)?,
                Loaded::Bdag(b) => SibseqIndex::from_bdag(b)?,
                Loaded::Hdag(h) => SibseqIndex::from_hdag(h)?,
                Loaded::Ds(_) => {
                    return Err(Failure::Usage(
                        "sibseq-eq is available on dag, bdag and hdag representations".into(),
                    ))
                }
            };
            index.sibseq_eq_big(p, q)?
        }
    };
    Ok(format!("{answer}\n"))
}

fn run_census(class: Class, m: u32, n: usize, measure: Measure, brute: bool, predict: bool) -> Outcome {
    if m == 0 {
        return Err(Failure::Usage("--m must be at least 1".into()));
    }
    let r = census::table(class, m, n).result(n, measure);
    let mut header = String::from("class\tm\tn\tmeasure\taccumulated\tcount\taverage\tfraction\tprediction");
    let prediction = if predict {
        format!("{:.12}", census::asymptotic_prediction(class, m, n, measure)?)
    } else {
        "-".to_string()
    };
    let mut line = format!(
        "{class}\t{m}\t{n}\t{measure}\t{}\t{}\t{}\t{}\t{prediction}",
        r.accumulated,
        r.count,
        census::decimal(&r.average, 12),
        r.average
    );
    if brute {
        let b = census::brute_force(class, m, n, measure)?;
        if b != r.accumulated {
            return Err(Failure::Internal(format!(
                "series gives {} but enumeration gives {b}",
                r.accumulated
            )));
        }
        header.push_str("\tbrute_force");
        line.push_str(&format!("\t{b}"));
    }
    Ok(format!("{header}\n{line}\n"))
}

fn verify_bounds(trees: usize, seed: u64, max_edges: usize, labels: usize) -> Outcome {
    if labels == 0 {
        return Err(Failure::Usage("--labels must be at least 1".into()));
    }
    let mut r = rng(seed);
    let alpha = alphabet(labels);
    let mut out = String::new();
    let mut violations = 0;
    for i in 0..trees {
        let t = random_tree_upto(&mut r, max_edges, &alpha);
        let report = check_bounds(&t);
        for v in report.violations() {
            violations += 1;
            out.push_str(&format!("violation\ttree {i}\t{v}\t{t}\n"));
        }
    }
    out.push_str(&format!("trees\t{trees}\nseed\t{seed}\nviolations\t{violations}\n"));
    if violations > 0 {
        return Err(Failure::Internal(out));
    }
    Ok(out)
}

fn family(f: FamilyArg, n: usize) -> Outcome {
    let f = match f {
        FamilyArg::Tn => Family::Tn,
        FamilyArg::Sn => Family::Sn,
        FamilyArg::HdagGap => Family::HdagGap,
    };
    Ok(match witness(f, n)? {
        Witness::Tree(t) => format!("{t}\n"),
        Witness::Dag(d) => dag::write_dag(&d),
    })
}

fn run(cli: Cli) -> Outcome {
    match cli.command {
        Command::Stats { input } => {
            let s = ingest::stats(&read_tree(&input)?);
            let bad = s.violations();
            if !bad.is_empty() {
                return Err(Failure::Internal(bad.join(", ")));
            }
            for n in &s.notices {
                eprintln!("notice: {n}");
            }
            let name = input.file_name().map(|f| f.to_string_lossy().into_owned()).unwrap_or_default();
            Ok(format!(
                "{REPORT_HEADER}\n{name}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\n",
                s.edges,
                s.max_depth,
                ingest::one_decimal(s.avg_children()),
                s.max_children,
                s.dag,
                s.bdag,
                s.rbdag,
                s.hdag,
                s.rhdag,
                s.ds,
                s.slt8
            ))
        }
        Command::Corpus { dir, min_edges, min_depth } => {
            Ok(ingest::run_corpus(&dir, CorpusFilter { min_edges, min_depth })?)
        }
        Command::Compress { input, method, out } => {
            let text = compress(&read_tree(&input)?, method)?;
            match out {
                Some(path) => {
                    fs::write(&path, text).map_err(|e| Failure::Input(Error::Io(format!("{}: {e}", path.display()))))?;
                    Ok(String::new())
                }
                None => Ok(text),
            }
        }
        Command::Decompress { input, method } => {
            let text = read_text(&input)?;
            let Some(method) = method.or_else(|| recorded_method(&text)) else {
                return Err(Failure::Usage("no method recorded in the file; pass --method".into()));
            };
            Ok(format!("{}\n", decompress(&text, method)?))
        }
        Command::Query { kind, rep, input, p, q } => query(kind, rep, &input, &p, &q),
        Command::Census { class, m, n, measure, brute_force, predict } => {
            let class = match class {
                ClassArg::Binary => Class::Binary,
                ClassArg::Unranked => Class::Unranked,
            };
            let measure = match measure {
                MeasureArg::Nodes => Measure::Nodes,
                MeasureArg::Edges => Measure::Edges,
            };
            run_census(class, m, n, measure, brute_force, predict)
        }
        Command::VerifyBounds { trees, seed, max_edges, labels } => verify_bounds(trees, seed, max_edges, labels),
        Command::Family { family: f, n } => family(f, n),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(out) => {
            let mut stdout = std::io::stdout().lock();
            if stdout.write_all(out.as_bytes()).is_err() {
                return ExitCode::from(2);
            }
            ExitCode::SUCCESS
        }
        Err(Failure::Usage(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(1)
        }
        Err(Failure::Input(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
        Err(Failure::Internal(m)) => {
            eprintln!("internal error: {m}");
            ExitCode::from(3)
        }
    }
}
