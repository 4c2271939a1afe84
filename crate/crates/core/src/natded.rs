//! Dag-like natural deduction for implicational logic: well-formedness,
//! open-assumption sets, the thread-semantics oracle, unravelling, metrics.

use std::collections::{BTreeSet, HashSet};

use thiserror::Error;

use crate::dag::{DagBuilder, Interner, ProofDag, StructureError};
use crate::formula::Formula;

/// A dag-like natural deduction derivation: leaves are assumptions,
/// unary nodes are implication introductions, binary nodes eliminations.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NmDerivation {
    dag: ProofDag,
}

/// Inference role of a node, inferred from its in-degree.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Role {
    Leaf,
    Intro { premise: usize },
    /// `minor` proves `α`, `major` proves `α → β`.
    Elim { minor: usize, major: usize },
}

/// The first node that violates a derivation rule.
#[derive(Clone, Debug, PartialEq, Eq, Error)]
#[error("node `{node}`: {msg}")]
pub struct Violation {
    pub node: String,
    pub msg: String,
}

/// Outcome of checking a derivation against assumptions and a goal.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CheckReport {
    pub violation: Option<Violation>,
}

impl CheckReport {
    pub fn accept() -> CheckReport {
        CheckReport { violation: None }
    }

    pub fn reject(node: impl Into<String>, msg: impl Into<String>) -> CheckReport {
        CheckReport {
            violation: Some(Violation {
                node: node.into(),
                msg: msg.into(),
            }),
        }
    }

    pub fn accepted(&self) -> bool {
        self.violation.is_none()
    }
}

impl std::fmt::Display for CheckReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match &self.violation {
            None => write!(f, "ACCEPT"),
            Some(v) => write!(f, "REJECT {v}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum NatDedError {
    #[error(transparent)]
    Structure(#[from] StructureError),
    #[error(transparent)]
    Malformed(#[from] Violation),
    #[error("budget of {0} exceeded")]
    Budget(usize),
}

impl NmDerivation {
    pub fn from_dag(dag: ProofDag) -> NmDerivation {
        NmDerivation { dag }
    }

    pub fn dag(&self) -> &ProofDag {
        &self.dag
    }

    pub fn into_dag(self) -> ProofDag {
        self.dag
    }

    pub fn len(&self) -> usize {
        self.dag.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dag.is_empty()
    }

    pub fn root_label(&self) -> &Formula {
        self.dag.root_label()
    }

    pub fn is_tree(&self) -> bool {
        self.dag.is_tree()
    }

    /// Rule role of node `v`, checking local well-formedness.
    pub fn role(&self, v: usize) -> Result<Role, Violation> {
        let d = &self.dag;
        let bad = |msg: String| Violation {
            node: d.id(v).to_string(),
            msg,
        };
        match d.premises(v) {
            [] => Ok(Role::Leaf),
            &[u] => {
                let Some((_, cons)) = d.label(v).as_imp() else {
                    return Err(bad("introduction node is not labelled by an implication".into()));
                };
                if d.label(u) != cons {
                    return Err(bad(format!(
                        "introduction premise `{}` is labelled {} but {} is required",
                        d.id(u),
                        d.label(u),
                        cons
                    )));
                }
                Ok(Role::Intro { premise: u })
            }
            &[a, b] => {
                let is_major = |maj: usize, min: usize| {
                    d.label(maj)
                        .as_imp()
                        .is_some_and(|(x, y)| x == d.label(min) && y == d.label(v))
                };
                if is_major(b, a) {
                    Ok(Role::Elim { minor: a, major: b })
                } else if is_major(a, b) {
                    Ok(Role::Elim { minor: b, major: a })
                } else {
                    Err(bad(format!(
                        "premises `{}` and `{}` do not eliminate to {}",
                        d.id(a),
                        d.id(b),
                        d.label(v)
                    )))
                }
            }
            ps => Err(bad(format!("in-degree {} exceeds 2", ps.len()))),
        }
    }

    pub fn roles(&self) -> Result<Vec<Role>, Violation> {
        (0..self.len()).map(|v| self.role(v)).collect()
    }
}

/// Open-assumption sets per node, stored over interned leaf labels.
#[derive(Debug)]
pub struct AssumptionMap {
    atoms: Interner,
    sets: Vec<Vec<usize>>,
}

impl AssumptionMap {
    pub fn interner(&self) -> &Interner {
        &self.atoms
    }

    /// Sorted interned ids of the open assumptions at `v`.
    pub fn ids(&self, v: usize) -> &[usize] {
        &self.sets[v]
    }

    pub fn set(&self, v: usize) -> BTreeSet<Formula> {
        self.sets[v]
            .iter()
            .map(|&i| self.atoms.formula(i).clone())
            .collect()
    }

    pub fn contains(&self, v: usize, f: &Formula) -> bool {
        self.atoms
            .get(f)
            .is_some_and(|i| self.sets[v].binary_search(&i).is_ok())
    }

    pub fn len(&self) -> usize {
        self.sets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sets.is_empty()
    }
}

fn union_sorted(a: &[usize], b: &[usize]) -> Vec<usize> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => {
                out.push(a[i]);
                i += 1;
            }
            std::cmp::Ordering::Greater => {
                out.push(b[j]);
                j += 1;
            }
            std::cmp::Ordering::Equal => {
                out.push(a[i]);
                i += 1;
                j += 1;
            }
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend_from_slice(&b[j..]);
    out
}

/// Computes `A_v` for every node in one topological pass.
pub fn assumptions(d: &NmDerivation) -> Result<AssumptionMap, Violation> {
    let mut atoms = Interner::new();
    let mut sets: Vec<Vec<usize>> = Vec::with_capacity(d.len());
    for v in 0..d.len() {
        let set = match d.role(v)? {
            Role::Leaf => vec![atoms.intern(d.dag.label(v))],
            Role::Intro { premise } => {
                let (ante, _) = d.dag.label(v).as_imp().expect("checked by role");
                match atoms.get(ante) {
                    Some(a) => sets[premise].iter().copied().filter(|&x| x != a).collect(),
                    None => sets[premise].clone(),
                }
            }
            Role::Elim { minor, major } => union_sorted(&sets[minor], &sets[major]),
        };
        sets.push(set);
    }
    Ok(AssumptionMap { atoms, sets })
}

/// Accepts iff `d` is well formed, its root is labelled `phi`, and the root's
/// open assumptions lie in `gamma`.
pub fn check_nm(d: &NmDerivation, gamma: &HashSet<Formula>, phi: &Formula) -> CheckReport {
    let map = match assumptions(d) {
        Ok(m) => m,
        Err(v) => return CheckReport { violation: Some(v) },
    };
    let root = d.dag.root();
    if d.dag.label(root) != phi {
        return CheckReport::reject(
            d.dag.id(root),
            format!("root is labelled {} but the goal is {}", d.dag.label(root), phi),
        );
    }
    if let Some(&open) = map
        .ids(root)
        .iter()
        .find(|&&i| !gamma.contains(map.atoms.formula(i)))
    {
        return CheckReport::reject(
            d.dag.id(root),
            format!(
                "open assumption {} at the root is not among the allowed assumptions",
                map.atoms.formula(open)
            ),
        );
    }
    CheckReport::accept()
}

/// Thread-semantics oracle: walks every maximal thread of the unravelled
/// tree. `budget` bounds the number of threads visited.
pub fn check_threads_naive(
    d: &NmDerivation,
    gamma: &HashSet<Formula>,
    phi: &Formula,
    budget: usize,
) -> Result<bool, NatDedError> {
    let roles = match d.roles() {
        Ok(r) => r,
        Err(_) => return Ok(false),
    };
    if d.root_label() != phi {
        return Ok(false);
    }
    let mut visited = 0usize;
    // (node, antecedents of introductions passed on the way down from the root)
    let mut stack: Vec<(usize, Vec<Formula>)> = vec![(d.dag.root(), Vec::new())];
    while let Some((v, discharging)) = stack.pop() {
        match roles[v] {
            Role::Leaf => {
                visited += 1;
                if visited > budget {
                    return Err(NatDedError::Budget(budget));
                }
                let label = d.dag.label(v);
                if !discharging.contains(label) && !gamma.contains(label) {
                    return Ok(false);
                }
            }
            Role::Intro { premise } => {
                let (ante, _) = d.dag.label(v).as_imp().expect("intro label");
                let mut next = discharging;
                next.push(ante.clone());
                stack.push((premise, next));
            }
            Role::Elim { minor, major } => {
                stack.push((minor, discharging.clone()));
                stack.push((major, discharging));
            }
        }
    }
    Ok(true)
}

/// Unwinds `d` into a tree with the same threads. `budget` bounds the node
/// count of the output.
pub fn unravel(d: &NmDerivation, budget: usize) -> Result<NmDerivation, NatDedError> {
    let dag = d.dag();
    let mut b = DagBuilder::new();
    // post-order over paths from the root
    enum Frame {
        Enter(usize),
        Exit(usize),
    }
    let mut stack = vec![Frame::Enter(dag.root())];
    let mut built: Vec<usize> = Vec::new();
    while let Some(fr) = stack.pop() {
        match fr {
            Frame::Enter(v) => {
                stack.push(Frame::Exit(v));
                for &u in dag.premises(v).iter().rev() {
                    stack.push(Frame::Enter(u));
                }
            }
            Frame::Exit(v) => {
                if b.len() >= budget {
                    return Err(NatDedError::Budget(budget));
                }
                let k = dag.premises(v).len();
                let prem = built.split_off(built.len() - k);
                let id = b.add(dag.label(v).clone(), prem);
                built.push(id);
            }
        }
    }
    let root = built.pop().expect("root built");
    Ok(NmDerivation::from_dag(b.finish(root)))
}

/// Size measures of a derivation.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ProofMetrics {
    pub lines: usize,
    pub size: usize,
    pub height: usize,
    pub formula_size: usize,
    pub inferential_size: usize,
}

impl ProofMetrics {
    pub fn of_dag(d: &ProofDag) -> ProofMetrics {
        ProofMetrics {
            lines: d.len(),
            size: d.size(),
            height: d.height(),
            formula_size: d.formula_size(),
            inferential_size: d.inferential_size(),
        }
    }
}

impl std::fmt::Display for ProofMetrics {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "lines={} size={} height={} formula_size={} inferential_size={}",
            self.lines, self.size, self.height, self.formula_size, self.inferential_size
        )
    }
}

pub fn nm_metrics(d: &NmDerivation) -> ProofMetrics {
    ProofMetrics::of_dag(d.dag())
}

/// Incremental construction of natural deduction derivations.
#[derive(Default, Debug, Clone)]
pub struct NmBuilder {
    inner: DagBuilder,
}

impl NmBuilder {
    pub fn new() -> NmBuilder {
        NmBuilder::default()
    }

    pub fn leaf(&mut self, f: Formula) -> usize {
        self.inner.add(f, vec![])
    }

    /// `→I` discharging `ante` above `premise`.
    pub fn intro(&mut self, ante: Formula, premise: usize) -> usize {
        let label = Formula::imp(ante, self.inner.label(premise).clone());
        self.inner.add(label, vec![premise])
    }

    /// `→E` from `minor: α` and `major: α → β`.
    pub fn elim(&mut self, minor: usize, major: usize) -> usize {
        let (a, b) = self
            .inner
            .label(major)
            .as_imp()
            .expect("major premise must be an implication");
        debug_assert_eq!(a, self.inner.label(minor));
        let b = b.clone();
        self.inner.add(b, vec![minor, major])
    }

    pub fn label(&self, v: usize) -> &Formula {
        self.inner.label(v)
    }

    pub fn len(&self) -> usize {
        self.inner.len()
    }

    pub fn is_empty(&self) -> bool {
        self.inner.is_empty()
    }

    pub fn finish(self, root: usize) -> NmDerivation {
        NmDerivation::from_dag(self.inner.finish(root))
    }
}
