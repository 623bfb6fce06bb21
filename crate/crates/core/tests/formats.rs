use treedag::dag::{minimize, minimize_binary, parse_binary_dag, parse_dag, write_binary_dag, write_dag};
use treedag::encode::{fcns, lcps};
use treedag::hybrid::{parse_hybrid, write_hybrid, HybridDag, Orientation};
use treedag::random::{alphabet, random_tree, rng};
use treedag::slt::{build_compressed_dag, parse_compressed_dag, parse_slt, to_one_slt, write_compressed_dag, write_slt};
use treedag::tree::parse_term;

#[test]
fn every_format_reads_back() {
    let mut r = rng(41);
    let labels = alphabet(3);
    for n in (1..200).step_by(7) {
        let t = random_tree(&mut r, n, &labels);
        let d = minimize(&t);
        let back = parse_dag(&write_dag(&d)).unwrap();
        assert_eq!(back.edges(), d.edges());
        assert_eq!(back.unfold().unwrap(), t);
        for b in [fcns(std::slice::from_ref(&t)), lcps(std::slice::from_ref(&t))] {
            let b = minimize_binary(&b);
            let back = parse_binary_dag(&write_binary_dag(&b)).unwrap();
            assert_eq!(back.edges(), b.edges());
            assert_eq!(back.eval(back.root()).unwrap(), b.eval(b.root()).unwrap());
        }
        for o in [Orientation::Fcns, Orientation::Lcps] {
            let h = HybridDag::build(&t, o).unwrap();
            let back = parse_hybrid(&write_hybrid(&h), o).unwrap();
            assert_eq!(back.edges(), h.edges());
            assert_eq!(back.unfold().unwrap(), t);
        }
        let c = build_compressed_dag(&t);
        let back = parse_compressed_dag(&write_compressed_dag(&c)).unwrap();
        assert_eq!(back.size(), c.size());
        assert_eq!(back.unfold(1 << 20).unwrap(), t);
        let g = to_one_slt(&c);
        let back = parse_slt(&write_slt(&g)).unwrap();
        assert_eq!(back.size(), g.size());
        assert_eq!(back.unfold_binary(1 << 20).unwrap(), g.unfold_binary(1 << 20).unwrap());
    }
}

#[test]
fn labels_that_look_like_references() {
    let t = parse_term("A1(R2,H3,y1,V1_h,start)").unwrap();
    let d = minimize(&t);
    assert_eq!(parse_dag(&write_dag(&d)).unwrap().unfold().unwrap(), t);
    let c = build_compressed_dag(&t);
    assert_eq!(parse_compressed_dag(&write_compressed_dag(&c)).unwrap().unfold(100).unwrap(), t);
    let h = HybridDag::build(&t, Orientation::Fcns).unwrap();
    assert_eq!(parse_hybrid(&write_hybrid(&h), Orientation::Fcns).unwrap().unfold().unwrap(), t);
}

#[test]
fn malformed_inputs_are_errors() {
    for bad in ["A1 -> f(A2)", "A1 -> f(A1)", "A1 -> ", "-> f(a)", "A1 -> f(a"] {
        assert!(parse_dag(bad).is_err(), "{bad}");
    }
    assert!(parse_compressed_dag("A1 -> f(R1)\nR1 -> R1 a\n").is_err());
    assert!(parse_term("f(a,,b)").is_err());
    assert!(parse_term("").is_err());
}
