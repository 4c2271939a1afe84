//! The Clique–Colouring tautologies `τ_n` and the bridge from interpolants
//! over `p_i_j` to circuits over graph edges.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::circuits::{edge_var, cc_k, InterpolationShape, MonotoneCircuit};
use crate::formula::{Formula, FormulaSeq};
use crate::semantics::{DecideError, Decider, Decision};

/// Geometric mean of `size(τ_n) / n^3` over n = 2..8.
pub const TAU_SIZE_CONSTANT: f64 = 10.4628;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TautError {
    #[error("n must be at least 2, got {0}")]
    TooSmall(usize),
    #[error("variable `{0}` is not a p variable for n = {1}")]
    Stray(String, usize),
}

pub fn p_var(i: usize, j: usize) -> String {
    format!("p_{i}_{j}")
}

pub fn pp_var(i: usize, j: usize) -> String {
    format!("pp_{i}_{j}")
}

pub fn q_var(i: usize, l: usize) -> String {
    format!("q_{i}_{l}")
}

pub fn r_var(m: usize, i: usize) -> String {
    format!("r_{m}_{i}")
}

pub const U: &str = "u";
pub const V: &str = "v";
pub const W: &str = "w";

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TautFamilyInstance {
    pub n: usize,
    pub k: usize,
    pub alpha: Formula,
    pub beta: Formula,
    pub tau: Formula,
    /// `(i, j)` pairs in enumeration order; index into `p`/`pp`.
    pub pairs: Vec<(usize, usize)>,
    pub p: Vec<String>,
    pub pp: Vec<String>,
    pub q: Vec<String>,
    pub r: Vec<String>,
}

fn var(s: &str) -> Formula {
    Formula::var(s)
}

fn fold(blocks: Vec<Formula>, head: &Formula) -> Formula {
    FormulaSeq::from_formulas(blocks).fold_imp(head)
}

fn chain(ants: &[Formula], head: &Formula) -> Formula {
    ants.iter()
        .rev()
        .fold(head.clone(), |acc, a| Formula::imp(a.clone(), acc))
}

pub fn build_alpha(n: usize, k: usize) -> Formula {
    let v = var(V);
    let guards = (0..n)
        .map(|i| {
            let ors = (0..k).map(|l| Formula::imp(var(&q_var(i, l)), v.clone())).collect();
            fold(ors, &v)
        })
        .collect();
    let mut triples = Vec::new();
    for i in 0..n {
        for j in 0..n {
            for l in 0..k {
                triples.push(chain(
                    &[var(&q_var(i, l)), var(&q_var(j, l)), var(&p_var(i, j))],
                    &v,
                ));
            }
        }
    }
    fold(guards, &fold(triples, &v))
}

pub fn build_beta(n: usize, k: usize) -> Formula {
    let w = var(W);
    let guards = (0..=k)
        .map(|m| {
            let ors = (0..n).map(|i| Formula::imp(var(&r_var(m, i)), w.clone())).collect();
            fold(ors, &w)
        })
        .collect();
    let mut triples = Vec::new();
    for l in 0..=k {
        for m in l + 1..=k {
            for i in 0..n {
                for j in 0..n {
                    triples.push(chain(
                        &[var(&r_var(l, i)), var(&r_var(m, j)), var(&pp_var(i, j))],
                        &w,
                    ));
                }
            }
        }
    }
    fold(guards, &fold(triples, &w))
}

pub fn build_tau(n: usize) -> Result<TautFamilyInstance, TautError> {
    if n < 2 {
        return Err(TautError::TooSmall(n));
    }
    let k = cc_k(n);
    let alpha = build_alpha(n, k);
    let beta = build_beta(n, k);
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (0..n).map(move |j| (i, j))).collect();
    let p: Vec<String> = pairs.iter().map(|&(i, j)| p_var(i, j)).collect();
    let pp: Vec<String> = pairs.iter().map(|&(i, j)| pp_var(i, j)).collect();
    let q = (0..n).flat_map(|i| (0..k).map(move |l| q_var(i, l))).collect();
    let r = (0..=k).flat_map(|m| (0..n).map(move |i| r_var(m, i))).collect();
    let shape = InterpolationShape {
        n: pairs.len(),
        p: p.clone(),
        pp: pp.clone(),
        q: vec![],
        r: vec![],
        alpha_private: vec![],
        beta_private: vec![],
        u: U.into(),
        alpha: alpha.clone(),
        beta: beta.clone(),
    };
    let tau = shape.target();
    Ok(TautFamilyInstance {
        n,
        k,
        alpha,
        beta,
        tau,
        pairs,
        p,
        pp,
        q,
        r,
    })
}

/// Interpolation shape of `τ_n`; `v` and `w` are kept as side variables of
/// `α` and `β` respectively.
pub fn make_shape(inst: &TautFamilyInstance) -> InterpolationShape {
    InterpolationShape {
        n: inst.p.len(),
        p: inst.p.clone(),
        pp: inst.pp.clone(),
        q: inst.q.clone(),
        r: inst.r.clone(),
        alpha_private: vec![V.into()],
        beta_private: vec![W.into()],
        u: U.into(),
        alpha: inst.alpha.clone(),
        beta: inst.beta.clone(),
    }
}

/// Runs the decision procedure on `τ_n`.
pub fn validate_tau(n: usize, budget: usize) -> Result<Result<Decision, DecideError>, TautError> {
    let inst = build_tau(n)?;
    Ok(Decider::new(budget).decide(&[], &inst.tau))
}

/// Identifies `p_i_j` with `p_j_i` as edge `e_min_max` and sets `p_i_i` to 0.
pub fn specialize_to_cc(c: &MonotoneCircuit, n: usize) -> Result<MonotoneCircuit, TautError> {
    let mut fixed = BTreeMap::new();
    let mut rename = BTreeMap::new();
    for v in c.vars() {
        let (i, j) = parse_p(&v)
            .filter(|&(i, j)| i < n && j < n)
            .ok_or_else(|| TautError::Stray(v.clone(), n))?;
        if i == j {
            fixed.insert(v, false);
        } else {
            rename.insert(v, edge_var(i, j));
        }
    }
    Ok(c.substitute(&fixed, &rename))
}

fn parse_p(v: &str) -> Option<(usize, usize)> {
    let rest = v.strip_prefix("p_")?;
    let (a, b) = rest.split_once('_')?;
    Some((a.parse().ok()?, b.parse().ok()?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::semantics::{classical_eval, Assignment};

    #[test]
    fn n2_shape() {
        let t = build_tau(2).unwrap();
        assert_eq!(t.k, 1);
        let (ants, head) = t.alpha.uncurry();
        assert_eq!(*head, var(V));
        assert_eq!(ants.len(), 6);
        let guard = Formula::imp(Formula::imp(var("q_0_0"), var(V)), var(V));
        assert_eq!(ants.iter().filter(|a| ***a == guard).count(), 1);
        let s = make_shape(&t);
        assert_eq!((s.p.len(), s.pp.len(), s.q.len(), s.r.len()), (4, 4, 2, 4));
        assert_eq!(s.target(), t.tau);
        s.validate().unwrap();
        assert_eq!(make_shape(&build_tau(3).unwrap()).q.len(), 3);
        assert_eq!(build_tau(1), Err(TautError::TooSmall(1)));
    }

    #[test]
    fn specialization() {
        let c = specialize_to_cc(&MonotoneCircuit::variable("p_0_1"), 2).unwrap();
        assert_eq!(c, MonotoneCircuit::variable("e_0_1"));
        let c = specialize_to_cc(&MonotoneCircuit::variable("p_1_0"), 2).unwrap();
        assert_eq!(c, MonotoneCircuit::variable("e_0_1"));
        let c = specialize_to_cc(&MonotoneCircuit::variable("p_0_0"), 2).unwrap();
        assert_eq!(c, MonotoneCircuit::constant(false));
        assert!(specialize_to_cc(&MonotoneCircuit::variable("q_0_0"), 2).is_err());
    }

    #[test]
    fn colouring_and_clique_assignments() {
        // n = 4, k = 2: a path 0-1-2-3 coloured alternately; a triangle 0,1,2.
        let n = 4;
        let t = build_tau(n).unwrap();
        let path = [(0, 1), (1, 2), (2, 3)];
        let mut a = Assignment::new();
        for i in 0..n {
            for j in 0..n {
                let e = path.contains(&(i.min(j), i.max(j)));
                a.insert(p_var(i, j), e);
            }
            for l in 0..t.k {
                a.insert(q_var(i, l), i % 2 == l);
            }
        }
        a.insert(V.into(), false);
        assert!(!classical_eval(&a, &t.alpha).unwrap());

        let tri = [(0, 1), (1, 2), (0, 2)];
        let mut b = Assignment::new();
        for i in 0..n {
            for j in 0..n {
                let e = tri.contains(&(i.min(j), i.max(j)));
                b.insert(pp_var(i, j), !e);
            }
        }
        for m in 0..=t.k {
            for i in 0..n {
                b.insert(r_var(m, i), i == m);
            }
        }
        b.insert(W.into(), false);
        assert!(!classical_eval(&b, &t.beta).unwrap());
    }
}
