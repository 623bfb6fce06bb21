use proptest::prelude::*;

use num_bigint::BigInt;
use num_rational::BigRational;

use treedag::census::TruncatedSeries;
use treedag::dag::{minimize, minimize_binary};
use treedag::encode::{fcns, fcns_inverse, lcps, lcps_inverse};
use treedag::hybrid::bounds::check_bounds;
use treedag::hybrid::{HybridDag, Orientation};
use treedag::ingest::ingest_xml;
use treedag::random::{alphabet, random_forest, random_tree, rng};
use treedag::slstring::{repair, repair_naive, AccessIndex, GSym};
use treedag::slt::{build_compressed_dag, eliminate_helpers, simplify, to_one_slt, UNFOLD_BUDGET};
use treedag::tree::UnrankedTree;

fn tree(seed: u64, n: usize, m: usize) -> UnrankedTree {
    random_tree(&mut rng(seed), n, &alphabet(m))
}

fn to_xml(t: &UnrankedTree, v: u32, out: &mut String) {
    let l = t.label(v).as_str();
    if t.arity(v) == 0 {
        out.push_str(&format!("<{l} k=\"1\"/>"));
        return;
    }
    out.push_str(&format!("<{l}>text"));
    for &c in t.children(v) {
        to_xml(t, c, out);
    }
    out.push_str(&format!("</{l}>"));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn encodings_invert(seed in any::<u64>(), trees in 1usize..4, n in 0usize..60) {
        let f = random_forest(&mut rng(seed), trees, n, &alphabet(3));
        prop_assert_eq!(fcns_inverse(&fcns(&f)), f.clone());
        prop_assert_eq!(lcps_inverse(&lcps(&f)), f);
    }

    #[test]
    fn dags_unfold_to_the_tree(seed in any::<u64>(), n in 0usize..120, m in 1usize..4) {
        let t = tree(seed, n, m);
        let d = minimize(&t);
        prop_assert!(d.is_minimal());
        prop_assert_eq!(d.unfold().unwrap(), t.clone());
        let b = minimize_binary(&fcns(std::slice::from_ref(&t)));
        prop_assert_eq!(fcns_inverse(&b.eval(b.root()).unwrap()), vec![t.clone()]);
        if n > 0 {
            for o in [Orientation::Fcns, Orientation::Lcps] {
                prop_assert_eq!(HybridDag::build(&t, o).unwrap().unfold().unwrap(), t.clone());
            }
        }
    }

    #[test]
    fn size_relations(seed in any::<u64>(), n in 0usize..150, m in 1usize..5) {
        let r = check_bounds(&tree(seed, n, m));
        prop_assert!(r.all_hold(), "{}", r);
    }

    #[test]
    fn compressed_dags_are_minimal(seed in any::<u64>(), n in 0usize..100, m in 1usize..3) {
        let t = tree(seed, n, m);
        let d = build_compressed_dag(&t);
        prop_assert!(d.is_minimal(1 << 20).unwrap());
        prop_assert!(d.size() <= minimize(&t).edges());
        prop_assert_eq!(d.unfold(UNFOLD_BUDGET).unwrap(), t.clone());
        let g = to_one_slt(&d);
        let want = fcns(std::slice::from_ref(&t));
        for s in [simplify(&g), eliminate_helpers(&g)] {
            prop_assert!(s.size() <= g.size());
            prop_assert_eq!(s.unfold_binary(UNFOLD_BUDGET).unwrap(), want.clone());
        }
    }

    #[test]
    fn repair_reproduces_words(words in prop::collection::vec(prop::collection::vec(0u32..3, 0..40), 1..4)) {
        let words: Vec<Vec<GSym>> = words.into_iter().map(|w| w.into_iter().map(GSym::T).collect()).collect();
        let (g, out) = repair(&words);
        let (gn, outn) = repair_naive(&words);
        prop_assert_eq!(g.size() + out.iter().map(Vec::len).sum::<usize>(), gn.size() + outn.iter().map(Vec::len).sum::<usize>());
        for (w, o) in words.iter().zip(&out) {
            let plain: Vec<u32> = w.iter().map(|s| match s { GSym::T(x) => *x, GSym::N(_) => unreachable!() }).collect();
            prop_assert_eq!(&g.expand(o, 1 << 20).unwrap(), &plain);
            let idx = AccessIndex::new(&g, o);
            for (i, &x) in plain.iter().enumerate() {
                prop_assert_eq!(idx.get_u64(i as u64 + 1).unwrap(), x);
            }
            prop_assert!(idx.get_u64(plain.len() as u64 + 1).is_err());
        }
    }

    #[test]
    fn sqrt_squares_back(tail in prop::collection::vec((-20i64..20, 1i64..5), 0..12)) {
        let mut c = vec![BigRational::from_integer(BigInt::from(1))];
        c.extend(tail.iter().map(|&(a, b)| BigRational::new(a.into(), b.into())));
        let order = c.len() + 2;
        let f = TruncatedSeries::new(c, order);
        let y = f.sqrt().unwrap();
        prop_assert_eq!(y.mul(&y), f);
    }

    #[test]
    fn xml_round_trip(seed in any::<u64>(), n in 0usize..80) {
        let t = tree(seed, n, 3);
        let mut xml = String::from("<?xml version=\"1.0\"?>\n");
        to_xml(&t, t.root(), &mut xml);
        prop_assert_eq!(ingest_xml(xml.as_bytes()).unwrap(), t);
    }
}
