mod common;

use std::collections::{BTreeMap, BTreeSet, HashSet};

use proptest::prelude::*;
use rand::Rng;

use common::*;
use nmproof::circuits::{to_bounded_fanin, Gate, MonotoneCircuit};
use nmproof::formula::{apply_subst, parse_formula, ret, Formula, FormulaSeq, Substitution};
use nmproof::frege::{check_frege_dag, check_frege_seq, dag_to_seq, dedup, is_non_redundant, nm_to_frege_naive, seq_to_dag, FregeSeq};
use nmproof::interp::{closure, closure_circuit, slash, SlashContext};
use nmproof::natded::{assumptions, check_nm, check_threads_naive, NmDerivation};
use nmproof::semantics::{classical_eval, decide, Assignment, Decision, KripkeModel};
use nmproof::transforms::{nm_to_frege, Mode};

const VARS: [&str; 3] = ["p", "q", "r"];

fn formula() -> impl Strategy<Value = Formula> {
    let leaf = prop::sample::select(VARS.to_vec()).prop_map(var);
    leaf.prop_recursive(5, 24, 2, |inner| (inner.clone(), inner).prop_map(|(a, b)| imp(&a, &b)))
}

fn seq() -> impl Strategy<Value = FormulaSeq> {
    prop::collection::btree_map(0usize..40, formula(), 0..8)
        .prop_map(|m| FormulaSeq::new(m.into_iter().collect()).unwrap())
}

fn dag(seed: u64) -> NmDerivation {
    random_nm_dag(&mut rng(seed), 10)
}

/// Random rooted model with up to four worlds and a persistent valuation.
fn model(seed: u64) -> KripkeModel {
    let mut r = rng(seed);
    let k = r.gen_range(1..=4);
    // world 0 lies below everything; other pairs i < j at random
    let mut leq: Vec<Vec<bool>> = (0..k)
        .map(|i| (0..k).map(|j| i == j || i == 0 || (i < j && r.gen_bool(0.4))).collect())
        .collect();
    for m in 0..k {
        for i in 0..k {
            for j in 0..k {
                if leq[i][m] && leq[m][j] {
                    leq[i][j] = true;
                }
            }
        }
    }
    let mut val: Vec<BTreeSet<String>> = (0..k)
        .map(|_| VARS.iter().filter(|_| r.gen_bool(0.4)).map(|v| v.to_string()).collect())
        .collect();
    for i in 0..k {
        for j in 0..k {
            if leq[i][j] {
                let lo = val[i].clone();
                val[j].extend(lo);
            }
        }
    }
    let names: Vec<String> = (0..k).map(|i| format!("w{i}")).collect();
    let order: Vec<(String, String)> = (0..k)
        .flat_map(|i| (0..k).map(move |j| (i, j)))
        .filter(|&(i, j)| i != j && leq[i][j])
        .map(|(i, j)| (names[i].clone(), names[j].clone()))
        .collect();
    let val = names.iter().cloned().zip(val).collect::<BTreeMap<_, _>>();
    KripkeModel::new(names, &order, &val).unwrap()
}

fn assignments(vars: &[String]) -> Vec<Assignment> {
    (0u32..1 << vars.len())
        .map(|m| vars.iter().enumerate().map(|(i, v)| (v.clone(), m >> i & 1 == 1)).collect())
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn render_parse_round_trip(phi in formula()) {
        prop_assert_eq!(parse_formula(&phi.to_string()).unwrap(), phi);
    }

    #[test]
    fn fold_size(g in seq(), psi in formula()) {
        prop_assert_eq!(g.fold_imp(&psi).size(), g.total_size() + psi.size() + g.len());
    }

    #[test]
    fn ret_shift_invariance(k in 1usize..5, picks in prop::collection::btree_map(0usize..16, formula(), 1..6), phi in formula()) {
        let h = 1usize << k;
        let entries: Vec<(usize, Formula)> = picks.into_iter().filter(|(i, _)| *i < h).map(|(i, f)| (h + i, f)).collect();
        prop_assume!(!entries.is_empty());
        let g = FormulaSeq::new(entries).unwrap();
        prop_assert_eq!(ret(&phi, &g), ret(&phi, &g.shift_down(h)));
    }

    #[test]
    fn substitution_is_a_homomorphism(a in formula(), b in formula(), s in formula()) {
        let sigma = Substitution::new().bind("p", s);
        prop_assert_eq!(apply_subst(&sigma, &imp(&a, &b)), imp(&apply_subst(&sigma, &a), &apply_subst(&sigma, &b)));
        prop_assert_eq!(apply_subst(&Substitution::new(), &a), a);
    }

    #[test]
    fn forcing_persists(seed in any::<u64>(), phi in formula()) {
        let m = model(seed);
        let ext = m.extension(&phi);
        for a in 0..m.len() {
            for b in 0..m.len() {
                prop_assert!(!(m.leq(a, b) && ext[a]) || ext[b]);
            }
        }
    }

    #[test]
    fn decide_is_sound(phi in formula(), seeds in prop::collection::vec(any::<u64>(), 8)) {
        match decide(&[], &phi).unwrap() {
            Decision::Valid(d) => {
                prop_assert!(check_nm(&d, &HashSet::new(), &phi).accepted());
                for s in seeds {
                    let m = model(s);
                    prop_assert!((0..m.len()).all(|w| m.forces_at(w, &phi)));
                }
                let vars: Vec<String> = phi.vars().into_iter().collect();
                for a in assignments(&vars) {
                    prop_assert!(classical_eval(&a, &phi).unwrap());
                }
            }
            Decision::Invalid { model, root } => prop_assert!(!model.forces_at(root, &phi)),
        }
    }

    #[test]
    fn check_nm_matches_threads(seed in any::<u64>(), mask in any::<u32>()) {
        let d = dag(seed);
        let leaves: Vec<Formula> = (0..d.len()).filter(|&v| d.dag().premises(v).is_empty()).map(|v| d.dag().label(v).clone()).collect();
        let gamma: HashSet<Formula> = leaves.iter().enumerate().filter(|(i, _)| mask >> (i % 32) & 1 == 1).map(|(_, f)| f.clone()).collect();
        let fast = check_nm(&d, &gamma, d.root_label()).accepted();
        prop_assert_eq!(fast, check_threads_naive(&d, &gamma, d.root_label(), 10_000_000).unwrap());
    }

    #[test]
    fn derivable_at_every_node(seed in any::<u64>()) {
        let d = dag(seed);
        let map = assumptions(&d).unwrap();
        for v in 0..d.len() {
            let a: Vec<Formula> = map.set(v).into_iter().collect();
            prop_assert!(decide(&a, d.dag().label(v)).unwrap().is_valid());
        }
    }

    #[test]
    fn closure_is_monotone(seed in any::<u64>(), m1 in any::<u32>(), m2 in any::<u32>()) {
        let d = dag(seed);
        let labels: Vec<Formula> = {
            let mut seen = HashSet::new();
            d.dag().labels().iter().filter(|f| seen.insert((*f).clone())).cloned().collect()
        };
        let p: HashSet<Formula> = labels.iter().enumerate().filter(|(i, _)| m1 >> (i % 32) & 1 == 1).map(|(_, f)| f.clone()).collect();
        let mut q = p.clone();
        q.extend(labels.iter().enumerate().filter(|(i, _)| m2 >> (i % 32) & 1 == 1).map(|(_, f)| f.clone()));
        let cp = closure(&d, &p).unwrap().final_set();
        let cq = closure(&d, &q).unwrap().final_set();
        prop_assert!(cp.is_subset(&cq));
    }

    #[test]
    fn closure_circuits_are_monotone_and_pruned(seed in any::<u64>(), lo in any::<u32>(), extra in any::<u32>()) {
        let d = dag(seed);
        let fs: Vec<Formula> = {
            let mut seen = HashSet::new();
            d.dag().labels().iter().filter(|f| seen.insert((*f).clone())).cloned().collect()
        };
        let c = closure_circuit(&d, &fs, d.root_label()).unwrap();
        prop_assert!(c.circuit.gate_count() <= c.circuit.size() + 1);
        let hi = lo | extra;
        let at = |m: u32| c.circuit.eval_with(|v| v[1..].parse::<u32>().ok().map(|i| m >> (i % 32) & 1 == 1)).unwrap();
        prop_assert!(!at(lo) || at(hi));
    }

    #[test]
    fn slash_of_folded_implication(seed in any::<u64>(), g in prop::collection::vec(formula(), 0..4), phi in formula()) {
        let mut r = rng(seed);
        let mut pool: Vec<Formula> = g.clone();
        pool.push(phi.clone());
        let p: HashSet<Formula> = pool.into_iter().filter(|_| r.gen_bool(0.6)).collect();
        let ctx = SlashContext::new(p, "r");
        let gs = FormulaSeq::from_formulas(g.iter().cloned());
        let lhs = slash(&ctx, &gs.fold_imp(&phi));
        let rhs = !g.iter().all(|x| ctx.strong(x)) || slash(&ctx, &phi);
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn fanin_reduction_preserves_function(seed in any::<u64>()) {
        let mut r = rng(seed);
        let mut gs: Vec<Gate> = (0..6).map(|i| Gate::Var(format!("v{i}"))).collect();
        for _ in 0..10 {
            let ins: Vec<usize> = (0..r.gen_range(0..6)).map(|_| r.gen_range(0..gs.len())).collect();
            gs.push(if r.gen_bool(0.5) { Gate::And(ins) } else { Gate::Or(ins) });
        }
        let root = gs.len() - 1;
        let c = MonotoneCircuit::from_gates(gs, root);
        let b = to_bounded_fanin(&c);
        prop_assert!(b.max_fanin() <= 2 && b.size() <= 2 * c.size());
        for m in 0u32..64 {
            let look = |v: &str| v[1..].parse::<u32>().ok().map(|i| m >> i & 1 == 1);
            prop_assert_eq!(c.eval_with(look), b.eval_with(look));
            for extra in 0..6 {
                let up = m | 1 << extra;
                let look_up = |v: &str| v[1..].parse::<u32>().ok().map(|i| up >> i & 1 == 1);
                prop_assert!(!c.eval_with(look).unwrap() || c.eval_with(look_up).unwrap());
            }
        }
    }

    #[test]
    fn frege_conversions_and_dedup(phi in formula()) {
        let dec = decide(&[], &phi).unwrap();
        prop_assume!(dec.is_valid());
        let d = dec.witness().unwrap();
        let none = HashSet::new();
        let dag = nm_to_frege_naive(d).unwrap().to_dag();
        prop_assert!(check_frege_dag(&dag, &none, &phi).accepted());
        let seq = dag_to_seq(&dag);
        prop_assert!(check_frege_seq(&seq, &none, &phi).accepted());
        let mut doubled = seq.lines().to_vec();
        doubled.extend(seq.lines().iter().cloned());
        let doubled = FregeSeq::new(doubled).unwrap();
        let dd = dedup(&doubled);
        prop_assert!(is_non_redundant(&dd));
        // the goal may first occur before the last line
        let cut = dd.lines().iter().position(|l| *l == phi).unwrap();
        let dd = FregeSeq::new(dd.lines()[..=cut].to_vec()).unwrap();
        prop_assert!(dd.len() <= seq.len());
        prop_assert!(check_frege_seq(&dd, &none, &phi).accepted());
        let back = seq_to_dag(&dd, &none).unwrap();
        prop_assert!(back.len() <= dd.len());
        prop_assert!(check_frege_dag(&back, &none, &phi).accepted());
    }

    #[test]
    fn simulations_on_random_tautologies(phi in formula()) {
        let dec = decide(&[], &phi).unwrap();
        prop_assume!(dec.is_valid());
        let d = dec.witness().unwrap();
        for mode in [Mode::Basic, Mode::Ret] {
            let (out, rep) = nm_to_frege(d, &HashSet::new(), &phi, mode).unwrap();
            prop_assert!(rep.verdict.accepted());
            prop_assert_eq!(out.root_label(), &phi);
            prop_assert!(check_frege_dag(&out, &HashSet::new(), &phi).accepted());
        }
    }
}
