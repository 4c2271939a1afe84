use std::collections::{BTreeSet, HashSet};

use nmproof::formula::{parse_formula, Formula, FormulaSeq};
use nmproof::frege::check_frege_dag;
use nmproof::natded::{check_nm, NmBuilder, NmDerivation};
use nmproof::semantics::decide;
use nmproof::tautgen::build_tau;
use nmproof::transforms::*;

fn f(s: &str) -> Formula {
    parse_formula(s).unwrap()
}

fn set(items: &[&str]) -> HashSet<Formula> {
    items.iter().map(|s| f(s)).collect()
}

fn seq(items: &[&str]) -> FormulaSeq {
    FormulaSeq::from_formulas(items.iter().map(|s| f(s)))
}

fn witness(gamma: &[&str], phi: &str) -> NmDerivation {
    let g: Vec<Formula> = gamma.iter().map(|s| f(s)).collect();
    decide(&g, &f(phi)).unwrap().witness().expect("valid").clone()
}

fn accepts(p: &nmproof::frege::FProof, gamma: &HashSet<Formula>) -> bool {
    check_frege_dag(&p.to_dag(), gamma, p.label()).accepted()
}

#[test]
fn chain_is_logarithmic() {
    let phis: Vec<Formula> = (0..65).map(|i| Formula::var(format!("p{i}"))).collect();
    let p = chain_proof(&phis).unwrap();
    assert_eq!(p.label(), &f("p0 -> p64"));
    let hyps: HashSet<Formula> = phis.windows(2).map(|w| Formula::imp(w[0].clone(), w[1].clone())).collect();
    let d = p.to_dag();
    assert!(d.is_tree());
    assert!(check_frege_dag(&d, &hyps, p.label()).accepted());
    assert!(chain_proof(&phis[..1]).is_err());
}

#[test]
fn subset_and_weakening_displays() {
    let g = seq(&["a", "b -> c", "d", "e"]);
    let d = g.restrict(&[1, 3].into());
    let p = subset_proof(&g, &d, &f("x")).unwrap();
    assert_eq!(p.label(), &f("(e -> (b -> c) -> x) -> e -> d -> (b -> c) -> a -> x"));
    assert!(accepts(&p, &HashSet::new()));
    assert!(subset_proof(&d, &g, &f("x")).is_err());

    let theta = seq(&["t"]);
    let delta = seq(&["d1", "d2"]);
    let w = weakening_proofs(&g, &delta, &theta, &f("x"), &f("y"));
    let (x, y) = (f("x"), f("y"));
    let imp = |a: &Formula, b: &Formula| Formula::imp(a.clone(), b.clone());
    let gx = g.fold_imp(&x);
    assert_eq!(w.distribute.label(), &imp(&g.fold_imp(&imp(&x, &y)), &imp(&gx, &g.fold_imp(&y))));
    assert_eq!(w.apply.label(), &g.fold_imp(&imp(&gx, &x)));
    assert_eq!(w.contract.label(), &imp(&g.fold_imp(&gx), &gx));
    let lhs = theta.fold_imp(&g.fold_imp(&delta.fold_imp(&x)));
    let rhs = theta.fold_imp(&delta.fold_imp(&gx));
    assert_eq!(w.exchange.label(), &imp(&lhs, &rhs));
    for p in [&w.distribute, &w.apply, &w.contract, &w.exchange] {
        assert!(accepts(p, &HashSet::new()));
    }
}

#[test]
fn ret_lemmas_check() {
    let g = FormulaSeq::new(
        [(0, "a"), (2, "b"), (3, "c -> a"), (5, "d"), (6, "e"), (9, "g")]
            .iter()
            .map(|(i, s)| (*i, f(s)))
            .collect(),
    )
    .unwrap();
    let phi = f("z");
    let cases: [(&[usize], &[usize], &[usize]); 4] = [
        (&[0, 3], &[5, 6, 9], &[0, 6]),
        (&[], &[0, 2, 3, 5, 6, 9], &[3]),
        (&[2], &[], &[]),
        (&[0, 2, 3], &[5, 6, 9], &[0, 2, 3, 5, 6, 9]),
    ];
    for (a, b, c) in cases {
        let s = |x: &[usize]| x.iter().copied().collect::<BTreeSet<_>>();
        let p = ret_subset_proof(&phi, &g, &s(a), &s(b), &s(c)).unwrap();
        assert!(accepts(&p, &HashSet::new()), "{a:?} {b:?} {c:?}");
    }
    let bad = ret_subset_proof(&phi, &g, &[0].into(), &[2].into(), &[3].into());
    assert!(bad.is_err());
    let t = ret_transfer_proof(&phi, &f("y"), &g);
    assert!(accepts(&t, &HashSet::new()));
}

fn sample_nm() -> Vec<(HashSet<Formula>, NmDerivation)> {
    let mut out = vec![
        (HashSet::new(), witness(&[], "a -> b -> a")),
        (HashSet::new(), witness(&[], "(a -> b -> c) -> (a -> b) -> a -> c")),
        (set(&["p -> q", "q -> r"]), witness(&["p -> q", "q -> r"], "p -> r")),
        (HashSet::new(), witness(&[], "((a -> u) -> (b -> u) -> u) -> (a -> u) -> (b -> u) -> u")),
    ];
    // shared subderivation used twice
    let mut b = NmBuilder::new();
    let x = b.leaf(f("a"));
    let ab = b.leaf(f("a -> a -> b"));
    let e1 = b.elim(x, ab);
    let e2 = b.elim(x, e1);
    let i1 = b.intro(f("a"), e2);
    out.push((set(&["a -> a -> b"]), b.finish(i1)));
    out
}

#[test]
fn nm_to_frege_both_modes() {
    for (g, d) in sample_nm() {
        let phi = d.root_label().clone();
        assert!(check_nm(&d, &g, &phi).accepted());
        for mode in [Mode::Basic, Mode::Ret] {
            let (out, rep) = nm_to_frege(&d, &g, &phi, mode).unwrap();
            assert!(check_frege_dag(&out, &g, &phi).accepted(), "{rep}");
            if d.is_tree() {
                assert!(out.is_tree());
            }
        }
    }
}

#[test]
fn round_trips_and_trees() {
    for (g, d) in sample_nm() {
        let phi = d.root_label().clone();
        let (fd, _) = nm_to_frege(&d, &g, &phi, Mode::Basic).unwrap();
        let (nm, _) = frege_to_nm(&fd, &g, &phi).unwrap();
        assert!(check_nm(&nm, &g, &phi).accepted());
        let (tree, rep) = frege_dag_to_tree(&fd, &g, &phi).unwrap();
        assert!(tree.is_tree(), "{rep}");
        let ((ft, nt), _) = nm_to_tree(&d, &g, &phi).unwrap();
        assert!(ft.is_tree() && nt.is_tree());
        assert!(check_nm(&nt, &g, &phi).accepted());
    }
}

#[test]
fn deduction_moves_assumptions() {
    let g = set(&["p -> q", "q -> r", "p"]);
    let d = witness(&["p -> q", "q -> r", "p"], "r");
    let (fd, _) = nm_to_frege(&d, &g, &f("r"), Mode::Basic).unwrap();
    let gs = seq(&["p", "q -> r"]);
    let (out, _) = deduction(&fd, &gs, &set(&["p -> q"])).unwrap();
    let goal = gs.fold_imp(&f("r"));
    assert_eq!(out.root_label(), &f("(q -> r) -> p -> r"));
    assert!(check_frege_dag(&out, &set(&["p -> q"]), &goal).accepted());
}

#[test]
fn block_table_premises() {
    let edges = vec![vec![], vec![], vec![0, 1], vec![2], vec![0, 3]];
    let t = BlockTable::new(&edges);
    assert_eq!(t.levels.len(), 4);
    assert_eq!(t.levels[1][1].premises, [0, 1].into());
    assert_eq!(t.levels[2][1].premises, [0, 3].into_iter().filter(|&i| i < 4).collect());
    assert!(t.levels[3][0].premises.is_empty());
}

#[test]
#[ignore]
fn tau2_measure() {
    let inst = build_tau(2).unwrap();
    let phi = inst.tau.clone();
    let d = decide(&[], &phi).unwrap().witness().unwrap().clone();
    let g = HashSet::new();
    println!("witness {} nodes", d.len());
    let mut basic = None;
    for mode in [Mode::Basic, Mode::Ret] {
        let t0 = std::time::Instant::now();
        let (out, rep) = nm_to_frege(&d, &g, &phi, mode).unwrap();
        println!("{rep}\n{:?}", t0.elapsed());
        basic.get_or_insert(out);
    }
    let naive = nmproof::frege::nm_to_frege_naive(&d).unwrap().to_dag();
    let _ = basic;
    println!("naive frege lines {} deduped {}", naive.len(), nmproof::frege::dedup(&nmproof::frege::dag_to_seq(&naive)).len());
    let t0 = std::time::Instant::now();
    let (_, rep) = nm_to_tree(&d, &g, &phi).unwrap();
    println!("{rep}\n{:?}", t0.elapsed());
}

#[test]
#[ignore]
fn profile_trees() {
    for (g, d) in sample_nm() {
        let phi = d.root_label().clone();
        let (fd, _) = nm_to_frege(&d, &g, &phi, Mode::Basic).unwrap();
        let t0 = std::time::Instant::now();
        let (_, rep) = frege_dag_to_tree(&fd, &g, &phi).unwrap();
        println!("{rep}\n{:?}", t0.elapsed());
        let t0 = std::time::Instant::now();
        let (_, rep) = nm_to_tree(&d, &g, &phi).unwrap();
        println!("{rep}\n{:?}", t0.elapsed());
    }
}
