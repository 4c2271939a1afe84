//! Frozen expected values for the documented module examples.

mod common;

use std::collections::{BTreeSet, HashSet};

use common::*;
use nmproof::circuits::{check_interpolates, check_separates, to_bounded_fanin};
use nmproof::formula::{ret, Formula, FormulaSeq};
use nmproof::frege::{check_frege_dag, frege_metrics, seq_to_dag, FProof, FregeDag, FregeSeq};
use nmproof::interp::{closure_circuit, extract_disjunct, extract_interpolant, InterpError};
use nmproof::natded::{check_nm, NmBuilder, NmDerivation};
use nmproof::schemas::{get_schema, instantiate_schema};
use nmproof::semantics::{decide, Decision};
use nmproof::tautgen::{build_beta, build_tau, make_shape, specialize_to_cc, validate_tau};
use nmproof::transforms::*;

const TAU_SIZES: [usize; 7] = [145, 289, 903, 1375, 1947, 2619, 3391];

fn set(items: &[&str]) -> HashSet<Formula> {
    items.iter().map(|s| f(s)).collect()
}

fn accepts(p: &FProof, gamma: &HashSet<Formula>) -> bool {
    check_frege_dag(&p.to_dag(), gamma, p.label()).accepted()
}

fn identity_seq() -> FregeSeq {
    FregeSeq::new(
        [
            "(p -> (p -> p) -> p) -> (p -> p -> p) -> p -> p",
            "p -> (p -> p) -> p",
            "(p -> p -> p) -> p -> p",
            "p -> p -> p",
            "p -> p",
        ]
        .iter()
        .map(|s| f(s))
        .collect(),
    )
    .unwrap()
}

fn identity_dag() -> FregeDag {
    seq_to_dag(&identity_seq(), &HashSet::new()).unwrap()
}

fn alpha_alpha() -> NmDerivation {
    let mut b = NmBuilder::new();
    let a = b.leaf(f("a"));
    let r = b.intro(f("a"), a);
    b.finish(r)
}

// ---------------------------------------------------------------------------
// tautgen

#[test]
fn tau_sizes_are_frozen() {
    for (n, want) in (2..=8).zip(TAU_SIZES) {
        assert_eq!(build_tau(n).unwrap().tau.size(), want, "n = {n}");
    }
}

#[test]
fn tau2_is_valid() {
    assert!(validate_tau(2, 1_000_000).unwrap().unwrap().is_valid());
}

#[test]
fn tau2_without_a_beta_triple_is_invalid() {
    let inst = build_tau(2).unwrap();
    let full = build_beta(2, inst.k);
    let (ants, head) = full.uncurry();
    // two guards come first, then the triple blocks; drop the first triple
    assert_eq!(ants.len(), 6);
    let kept: Vec<Formula> = ants.iter().enumerate().filter(|(i, _)| *i != 2).map(|(_, a)| (*a).clone()).collect();
    let beta = kept.iter().rev().fold(head.clone(), |acc, a| imp(a, &acc));
    let mut shape = make_shape(&inst);
    shape.beta = beta;
    let mutant = shape.target();
    assert_ne!(mutant, inst.tau);
    match decide(&[], &mutant).unwrap() {
        Decision::Invalid { model, root } => assert!(!model.forces_at(root, &mutant)),
        Decision::Valid(_) => panic!("mutant decided valid"),
    }
}

#[test]
fn shape_counts() {
    let s = make_shape(&build_tau(2).unwrap());
    assert_eq!((s.p.len(), s.pp.len(), s.q.len(), s.r.len()), (4, 4, 2, 4));
    assert_eq!(make_shape(&build_tau(3).unwrap()).q.len(), 3);
}

#[test]
fn tau2_interpolant_separates_cc2() {
    let inst = build_tau(2).unwrap();
    let d = decide(&[], &inst.tau).unwrap();
    let d = d.witness().unwrap();
    let shape = make_shape(&inst);
    let c = extract_interpolant(d, &shape).unwrap();
    assert!(check_interpolates(&c.circuit, &shape).unwrap().passed());
    let cc = specialize_to_cc(&c.circuit, 2).unwrap();
    assert!(check_separates(&cc, 2).unwrap().passed());
    let all_on = |_: &str| Some(true);
    assert_eq!(c.circuit.eval_with(all_on), Ok(true));
}

#[test]
fn interpolant_rejects_u_in_alpha() {
    let inst = build_tau(2).unwrap();
    let d = decide(&[], &inst.tau).unwrap();
    let mut shape = make_shape(&inst);
    shape.alpha = imp(&shape.alpha, &var("u"));
    assert!(extract_interpolant(d.witness().unwrap(), &shape).is_err());
}

// ---------------------------------------------------------------------------
// interp

/// `⊢ (α₀ → u) → (α₁ → u) → u` from a proof of `α_i`, closing over both
/// antecedent leaves.
fn disjunction_proof(a0: &Formula, a1: &Formula, i: usize, proof_of_ai: NmDerivation) -> NmDerivation {
    let u = var("u");
    let l0 = imp(a0, &u);
    let l1 = imp(a1, &u);
    let mut b = NmBuilder::new();
    let dag = proof_of_ai.dag();
    let mut map = Vec::new();
    for v in 0..dag.len() {
        let ps: Vec<usize> = dag.premises(v).iter().map(|&x| map[x]).collect();
        let id = match ps.as_slice() {
            [] => b.leaf(dag.label(v).clone()),
            [x] => {
                let (ante, _) = dag.label(v).as_imp().unwrap();
                b.intro(ante.clone(), *x)
            }
            [x, y] => {
                if b.label(*y).as_imp().is_some_and(|(a, _)| a == b.label(*x)) {
                    b.elim(*x, *y)
                } else {
                    b.elim(*y, *x)
                }
            }
            _ => unreachable!(),
        };
        map.push(id);
    }
    let top = map[dag.root()];
    let major = b.leaf(if i == 0 { l0.clone() } else { l1.clone() });
    let e = b.elim(top, major);
    let i1 = b.intro(l1, e);
    let i0 = b.intro(l0, i1);
    b.finish(i0)
}

fn pp_proof() -> NmDerivation {
    let mut b = NmBuilder::new();
    let p = b.leaf(f("p"));
    let r = b.intro(f("p"), p);
    b.finish(r)
}

#[test]
fn disjunct_examples() {
    let (pp, q) = (f("p -> p"), f("q"));
    assert_eq!(extract_disjunct(&disjunction_proof(&pp, &q, 0, pp_proof()), "u").unwrap(), 0);
    assert_eq!(extract_disjunct(&disjunction_proof(&q, &pp, 1, pp_proof()), "u").unwrap(), 1);
    let both = disjunction_proof(&pp, &f("r -> r"), 0, pp_proof());
    assert_eq!(extract_disjunct(&both, "u").unwrap(), 0);
    let goal = f("((u -> u) -> u) -> (q -> u) -> u");
    let bad = decide(&[], &goal).unwrap();
    assert!(matches!(extract_disjunct(bad.witness().unwrap(), "u"), Err(InterpError::VariableOccurs(_))));
}

#[test]
fn closure_circuit_off_labels_is_an_input() {
    let fs = vec![f("z"), f("a"), f("a -> a")];
    let c = closure_circuit(&alpha_alpha(), &fs, &f("z")).unwrap();
    assert_eq!(c.circuit.vars().into_iter().collect::<Vec<_>>(), vec!["x0".to_string()]);
    assert_eq!(c.raw_wires, 0);
}

#[test]
fn ten_var_fanin_reduction() {
    let mut r = rng(10);
    use rand::Rng;
    for _ in 0..5 {
        let mut gs: Vec<nmproof::circuits::Gate> = (0..10).map(|i| nmproof::circuits::Gate::Var(format!("v{i}"))).collect();
        for _ in 0..12 {
            let ins: Vec<usize> = (0..r.gen_range(0..6)).map(|_| r.gen_range(0..gs.len())).collect();
            gs.push(if r.gen_bool(0.5) {
                nmproof::circuits::Gate::And(ins)
            } else {
                nmproof::circuits::Gate::Or(ins)
            });
        }
        let root = gs.len() - 1;
        let c = nmproof::circuits::MonotoneCircuit::from_gates(gs, root);
        let b = to_bounded_fanin(&c);
        for mask in 0u32..1024 {
            let look = |v: &str| v[1..].parse::<u32>().ok().map(|i| mask >> i & 1 == 1);
            assert_eq!(c.eval_with(look), b.eval_with(look));
        }
    }
}

// ---------------------------------------------------------------------------
// frege

#[test]
fn schema_missing_binding_errors() {
    let id = get_schema("ID").unwrap();
    assert!(instantiate_schema(id, &nmproof::formula::Substitution::new()).is_err());
    let ok = instantiate_schema(id, &nmproof::formula::Substitution::new().bind("a", f("p -> q"))).unwrap();
    assert!(check_frege_dag(&ok, &HashSet::new(), &f("(p -> q) -> p -> q")).accepted());
}

// ---------------------------------------------------------------------------
// transforms

#[test]
fn frege_to_nm_examples() {
    let pi = identity_dag();
    let (d, rep) = frege_to_nm(&pi, &HashSet::new(), &f("p -> p")).unwrap();
    assert!(check_nm(&d, &HashSet::new(), &f("p -> p")).accepted());
    assert!(rep.verdict.accepted());
    let single = seq_to_dag(&FregeSeq::new(vec![f("p -> q -> p")]).unwrap(), &HashSet::new()).unwrap();
    let (d, _) = frege_to_nm(&single, &HashSet::new(), &f("p -> q -> p")).unwrap();
    assert!(d.is_tree());
    assert!(d.len() <= 3);
}

#[test]
fn nm_to_frege_examples() {
    for mode in [Mode::Basic, Mode::Ret] {
        let (out, _) = nm_to_frege(&alpha_alpha(), &HashSet::new(), &f("a -> a"), mode).unwrap();
        assert!(check_frege_dag(&out, &HashSet::new(), &f("a -> a")).accepted());
        let (d, gamma) = diamond(2, false);
        let g: HashSet<Formula> = gamma.into_iter().collect();
        let (out, _) = nm_to_frege(&d, &g, d.root_label(), mode).unwrap();
        assert!(check_frege_dag(&out, &g, d.root_label()).accepted());
        assert!(!out.is_tree());
    }
}

#[test]
fn chain_examples() {
    let atoms = |n: usize| (0..=n).map(|i| var(&format!("a{i}"))).collect::<Vec<_>>();
    let one = chain_proof(&atoms(1)).unwrap();
    assert_eq!(one.label(), &f("a0 -> a1"));
    assert_eq!(frege_metrics(&one.to_dag()).lines, 1);
    for n in [4, 7] {
        let fs = atoms(n);
        let p = chain_proof(&fs).unwrap();
        let steps: HashSet<Formula> = fs.windows(2).map(|w| imp(&w[0], &w[1])).collect();
        assert!(accepts(&p, &steps));
        assert_eq!(p.label(), &imp(&fs[0], &fs[n]));
        let tree = p.to_tree();
        let uses = (0..tree.len())
            .filter(|&v| tree.dag().premises(v).is_empty() && steps.contains(tree.dag().label(v)))
            .count();
        assert_eq!(uses, n, "each step used once");
    }
}

#[test]
fn subset_examples() {
    let (a, b, c, phi) = (f("a"), f("b"), f("c"), f("z"));
    let g1 = FormulaSeq::from_formulas([a.clone()]);
    let p = subset_proof(&g1, &g1, &phi).unwrap();
    assert_eq!(p.label(), &f("(a -> z) -> a -> z"));
    let g2 = FormulaSeq::from_formulas([a.clone(), b.clone()]);
    let d = g2.restrict(&BTreeSet::from([0]));
    let p = subset_proof(&g2, &d, &phi).unwrap();
    assert_eq!(p.label(), &f("(a -> z) -> b -> a -> z"));
    assert!(accepts(&p, &HashSet::new()));
    let g3 = FormulaSeq::from_formulas([a, b, c]);
    let p = subset_proof(&g3, &FormulaSeq::empty(), &phi).unwrap();
    assert_eq!(p.label(), &f("z -> c -> b -> a -> z"));
    assert!(accepts(&p, &HashSet::new()));
}

#[test]
fn weakening_examples() {
    let (phi, psi) = (f("x"), f("y"));
    let e = FormulaSeq::empty();
    let w = weakening_proofs(&e, &e, &e, &phi, &psi);
    assert_eq!(w.distribute.label(), &f("(x -> y) -> x -> y"));
    let a = FormulaSeq::from_formulas([f("a")]);
    let b = FormulaSeq::from_formulas([f("b")]);
    let w = weakening_proofs(&a, &b, &e, &phi, &psi);
    assert_eq!(w.apply.label(), &f("a -> (a -> x) -> x"));
    assert_eq!(w.exchange.label(), &f("(a -> b -> x) -> b -> a -> x"));
    for p in [&w.distribute, &w.apply, &w.contract, &w.exchange] {
        assert!(accepts(p, &HashSet::new()));
    }
}

#[test]
fn ret_lemma_examples() {
    let phi = f("z");
    let s = |x: &[usize]| x.iter().copied().collect::<BTreeSet<usize>>();
    let one = FormulaSeq::from_formulas([f("a")]);
    let p = ret_subset_proof(&phi, &one, &s(&[0]), &s(&[]), &s(&[0])).unwrap();
    assert!(accepts(&p, &HashSet::new()));
    let four = FormulaSeq::from_formulas(["a", "b", "c", "d"].map(f));
    let p = ret_subset_proof(&phi, &four, &s(&[0, 1]), &s(&[2, 3]), &s(&[1, 2])).unwrap();
    let rt = |x: &[usize]| ret(&phi, &four.restrict(&s(x)));
    assert_eq!(p.label(), &imp(&rt(&[0, 1]), &imp(&rt(&[2, 3]), &rt(&[1, 2]))));
    assert!(accepts(&p, &HashSet::new()));
    let p = ret_subset_proof(&phi, &four, &s(&[0]), &s(&[3]), &s(&[])).unwrap();
    assert_eq!(p.label(), &imp(&rt(&[0]), &imp(&rt(&[3]), &Formula::top())));
    assert!(accepts(&p, &HashSet::new()));

    for (g, psi) in [(&one, f("y")), (&four, f("y")), (&four, phi.clone())] {
        let p = ret_transfer_proof(&phi, &psi, g);
        assert_eq!(p.label(), &imp(&ret(&phi, g), &ret(&psi, g).relativize(&phi)));
        assert!(accepts(&p, &HashSet::new()));
    }
}

#[test]
fn tree_examples() {
    let pi = identity_dag();
    let (t, _) = frege_dag_to_tree(&pi, &HashSet::new(), &f("p -> p")).unwrap();
    assert!(t.is_tree());
    assert!(check_frege_dag(&t, &HashSet::new(), &f("p -> p")).accepted());
    let (t2, _) = frege_dag_to_tree(&t, &HashSet::new(), &f("p -> p")).unwrap();
    assert!(t2.is_tree() && check_frege_dag(&t2, &HashSet::new(), &f("p -> p")).accepted());

    let (chain, g, phi) = mp_chain_dag(16);
    let (t, _) = frege_dag_to_tree(&chain, &g, &phi).unwrap();
    let lt = (chain.len() as f64).log2();
    let h = frege_metrics(&t).height as f64;
    assert!(h <= 17.1 * lt + 17.1, "height {h}");

    let ((ft, nt), _) = nm_to_tree(&alpha_alpha(), &HashSet::new(), &f("a -> a")).unwrap();
    assert!(ft.is_tree() && nt.is_tree());
    assert!(check_frege_dag(&ft, &HashSet::new(), &f("a -> a")).accepted());
    assert!(check_nm(&nt, &HashSet::new(), &f("a -> a")).accepted());
}

#[test]
fn deduction_examples() {
    let single = seq_to_dag(&FregeSeq::new(vec![f("p")]).unwrap(), &set(&["p"])).unwrap();
    let (out, _) = deduction(&single, &FormulaSeq::from_formulas([f("p")]), &HashSet::new()).unwrap();
    assert_eq!(out.root_label(), &f("p -> p"));
    assert!(check_frege_dag(&out, &HashSet::new(), &f("p -> p")).accepted());

    let mp = FregeSeq::new(vec![f("a"), f("a -> b"), f("b")]).unwrap();
    let mp = seq_to_dag(&mp, &set(&["a", "a -> b"])).unwrap();
    let (out, _) = deduction(&mp, &FormulaSeq::from_formulas([f("a")]), &set(&["a -> b"])).unwrap();
    assert!(check_frege_dag(&out, &set(&["a -> b"]), &f("a -> b")).accepted());

    let (out, _) = deduction(&mp, &FormulaSeq::empty(), &set(&["a", "a -> b"])).unwrap();
    assert_eq!(out.to_text(), mp.to_text());
}
