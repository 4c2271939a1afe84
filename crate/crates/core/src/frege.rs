//! The implicational Hilbert system with axioms
//! `A1: a → b → a`, `A2: (a → b → c) → (a → b) → a → c` and modus ponens,
//! in sequence-like and dag-like form.

use std::collections::{HashMap, HashSet};
use std::sync::Arc;

use thiserror::Error;

use crate::dag::{DagBuilder, ProofDag, StructureError};
use crate::formula::{Formula, Substitution};
use crate::natded::{CheckReport, NmDerivation, ProofMetrics, Role};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Axiom {
    A1,
    A2,
}

/// Recognises instances of the two axiom schemes.
pub fn axiom_kind(f: &Formula) -> Option<Axiom> {
    let (x, rest) = f.as_imp()?;
    let (y, z) = rest.as_imp()?;
    if z == x {
        return Some(Axiom::A1);
    }
    // x = a→b→c, y = a→b, z = a→c
    let (a, bc) = x.as_imp()?;
    let (b, c) = bc.as_imp()?;
    let (a2, b2) = y.as_imp()?;
    let (a3, c3) = z.as_imp()?;
    (a == a2 && a == a3 && b == b2 && c == c3).then_some(Axiom::A2)
}

pub fn is_axiom(f: &Formula) -> bool {
    axiom_kind(f).is_some()
}

pub fn a1(a: &Formula, b: &Formula) -> Formula {
    Formula::imp(a.clone(), Formula::imp(b.clone(), a.clone()))
}

pub fn a2(a: &Formula, b: &Formula, c: &Formula) -> Formula {
    let i = |x: &Formula, y: &Formula| Formula::imp(x.clone(), y.clone());
    i(&i(a, &i(b, c)), &i(&i(a, b), &i(a, c)))
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FregeError {
    #[error("empty derivation")]
    Empty,
    #[error(transparent)]
    Structure(#[from] StructureError),
    #[error("derivation rejected: {0}")]
    Rejected(String),
}

/// How a line is justified.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Justification {
    Assumption,
    Axiom(Axiom),
    /// Modus ponens from `minor: α` and `major: α → β`.
    Mp { minor: usize, major: usize },
}

/// A sequence of formulas, each justified by earlier ones.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FregeSeq {
    lines: Vec<Formula>,
}

impl FregeSeq {
    pub fn new(lines: Vec<Formula>) -> Result<FregeSeq, FregeError> {
        if lines.is_empty() {
            return Err(FregeError::Empty);
        }
        Ok(FregeSeq { lines })
    }

    pub fn lines(&self) -> &[Formula] {
        &self.lines
    }

    pub fn len(&self) -> usize {
        self.lines.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lines.is_empty()
    }

    pub fn last(&self) -> &Formula {
        self.lines.last().expect("nonempty")
    }

    pub fn to_text(&self) -> String {
        self.lines.iter().map(|f| format!("{f}\n")).collect()
    }
}

/// Justifies every line; MP picks the pair minimising the later premise,
/// then the major premise.
pub fn justify_seq(
    pi: &FregeSeq,
    gamma: &HashSet<Formula>,
) -> Result<Vec<Justification>, (usize, String)> {
    let mut first: HashMap<&Formula, usize> = HashMap::new();
    // consequent → (line of the implication, antecedent)
    let mut by_cons: HashMap<&Formula, Vec<(usize, &Formula)>> = HashMap::new();
    let mut out = Vec::with_capacity(pi.len());
    for (k, f) in pi.lines.iter().enumerate() {
        let j = if gamma.contains(f) {
            Justification::Assumption
        } else if let Some(ax) = axiom_kind(f) {
            Justification::Axiom(ax)
        } else {
            let best = by_cons.get(f).and_then(|cands| {
                cands
                    .iter()
                    .filter_map(|&(m, a)| first.get(a).map(|&i| (i.max(m), m, i)))
                    .min()
            });
            match best {
                Some((_, major, minor)) => Justification::Mp { minor, major },
                None => {
                    return Err((
                        k,
                        format!("line {k} ({f}) is neither an assumption, an axiom, nor derivable by MP"),
                    ))
                }
            }
        };
        out.push(j);
        if !first.contains_key(f) {
            first.insert(f, k);
            if let Some((a, b)) = f.as_imp() {
                by_cons.entry(b).or_default().push((k, a));
            }
        }
    }
    Ok(out)
}

pub fn check_frege_seq(pi: &FregeSeq, gamma: &HashSet<Formula>, phi: &Formula) -> CheckReport {
    if let Err((k, msg)) = justify_seq(pi, gamma) {
        return CheckReport::reject(format!("line {k}"), msg);
    }
    if pi.last() != phi {
        return CheckReport::reject(
            format!("line {}", pi.len() - 1),
            format!("last line is {} but the goal is {}", pi.last(), phi),
        );
    }
    CheckReport::accept()
}

/// A dag-like derivation: leaves are axioms or assumptions, binary nodes MP.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FregeDag {
    dag: ProofDag,
}

impl FregeDag {
    pub fn from_dag(dag: ProofDag) -> FregeDag {
        FregeDag { dag }
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

    /// `(minor, major)` of an MP node, `None` for leaves.
    pub fn mp_premises(&self, v: usize) -> Result<Option<(usize, usize)>, String> {
        let d = &self.dag;
        match d.premises(v) {
            [] => Ok(None),
            &[a, b] => {
                let is_major = |maj: usize, min: usize| {
                    d.label(maj)
                        .as_imp()
                        .is_some_and(|(x, y)| x == d.label(min) && y == d.label(v))
                };
                if is_major(b, a) {
                    Ok(Some((a, b)))
                } else if is_major(a, b) {
                    Ok(Some((b, a)))
                } else {
                    Err(format!("premises do not yield {} by MP", d.label(v)))
                }
            }
            ps => Err(format!("in-degree {} is neither 0 nor 2", ps.len())),
        }
    }

    pub fn to_text(&self) -> String {
        self.dag.to_text()
    }
}

pub fn check_frege_dag(pi: &FregeDag, gamma: &HashSet<Formula>, phi: &Formula) -> CheckReport {
    let d = &pi.dag;
    for v in 0..d.len() {
        match pi.mp_premises(v) {
            Err(msg) => return CheckReport::reject(d.id(v), msg),
            Ok(None) => {
                let f = d.label(v);
                if !gamma.contains(f) && !is_axiom(f) {
                    return CheckReport::reject(
                        d.id(v),
                        format!("leaf {f} is neither an assumption nor an axiom"),
                    );
                }
            }
            Ok(Some(_)) => {}
        }
    }
    if d.root_label() != phi {
        return CheckReport::reject(
            d.id(d.root()),
            format!("root is labelled {} but the goal is {}", d.root_label(), phi),
        );
    }
    CheckReport::accept()
}

/// Justification dag of a sequence proof, pruned to what the last line uses.
pub fn seq_to_dag(pi: &FregeSeq, gamma: &HashSet<Formula>) -> Result<FregeDag, FregeError> {
    let just = justify_seq(pi, gamma).map_err(|(_, m)| FregeError::Rejected(m))?;
    let premises = just
        .iter()
        .map(|j| match *j {
            Justification::Mp { minor, major } => vec![minor, major],
            _ => vec![],
        })
        .collect();
    let dag = ProofDag::from_topological(pi.lines.clone(), premises, pi.len() - 1);
    Ok(FregeDag { dag })
}

/// Lists the nodes in their stored topological order.
pub fn dag_to_seq(pi: &FregeDag) -> FregeSeq {
    FregeSeq {
        lines: pi.dag.labels().to_vec(),
    }
}

/// Keeps the first occurrence of every formula.
pub fn dedup(pi: &FregeSeq) -> FregeSeq {
    let mut seen = HashSet::new();
    FregeSeq {
        lines: pi.lines.iter().filter(|f| seen.insert(*f)).cloned().collect(),
    }
}

pub fn is_non_redundant(pi: &FregeSeq) -> bool {
    let mut seen = HashSet::new();
    pi.lines.iter().all(|f| seen.insert(f))
}

pub fn frege_metrics(pi: &FregeDag) -> ProofMetrics {
    ProofMetrics::of_dag(&pi.dag)
}

/// Metrics of a sequence proof, using its justification edges for height
/// and inferential size.
pub fn frege_seq_metrics(pi: &FregeSeq, gamma: &HashSet<Formula>) -> Result<ProofMetrics, FregeError> {
    let just = justify_seq(pi, gamma).map_err(|(_, m)| FregeError::Rejected(m))?;
    let mut h = vec![0usize; pi.len()];
    let mut inf = 0;
    for (k, j) in just.iter().enumerate() {
        inf += pi.lines[k].size();
        if let Justification::Mp { minor, major } = *j {
            h[k] = h[minor].max(h[major]) + 1;
            inf += pi.lines[minor].size() + pi.lines[major].size();
        }
    }
    Ok(ProofMetrics {
        lines: pi.len(),
        size: pi.lines.iter().map(Formula::size).sum(),
        height: h.iter().copied().max().unwrap_or(0),
        formula_size: pi.lines.iter().map(Formula::size).max().unwrap_or(0),
        inferential_size: inf,
    })
}

/// Proof term with sharing. `Hole(i)` stands for the `i`-th premise of a
/// schema template.
#[derive(Clone)]
pub struct FProof(Arc<FNode>);

struct FNode {
    label: Formula,
    kind: FKind,
}

pub enum FKind {
    Leaf,
    Hole(usize),
    Mp(FProof, FProof),
}

impl std::fmt::Debug for FProof {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "FProof({})", self.label())
    }
}

impl FProof {
    pub fn leaf(label: Formula) -> FProof {
        FProof(Arc::new(FNode {
            label,
            kind: FKind::Leaf,
        }))
    }

    pub fn hole(i: usize, label: Formula) -> FProof {
        FProof(Arc::new(FNode {
            label,
            kind: FKind::Hole(i),
        }))
    }

    pub fn try_mp(minor: &FProof, major: &FProof) -> Option<FProof> {
        let (a, b) = major.label().as_imp()?;
        (a == minor.label()).then(|| {
            FProof(Arc::new(FNode {
                label: b.clone(),
                kind: FKind::Mp(minor.clone(), major.clone()),
            }))
        })
    }

    /// Modus ponens; panics if the labels do not fit.
    pub fn mp(minor: &FProof, major: &FProof) -> FProof {
        FProof::try_mp(minor, major).unwrap_or_else(|| {
            panic!("MP mismatch: minor {} major {}", minor.label(), major.label())
        })
    }

    pub fn label(&self) -> &Formula {
        &self.0.label
    }

    pub fn kind(&self) -> &FKind {
        &self.0.kind
    }

    fn key(&self) -> *const FNode {
        Arc::as_ptr(&self.0)
    }

    pub fn ptr_eq(&self, other: &FProof) -> bool {
        Arc::ptr_eq(&self.0, &other.0)
    }

    /// Number of lines once every shared subproof is copied.
    pub fn tree_lines(&self) -> u128 {
        fn go(p: &FProof, memo: &mut HashMap<*const FNode, u128>) -> u128 {
            if let Some(&c) = memo.get(&p.key()) {
                return c;
            }
            let c = match p.kind() {
                FKind::Mp(a, b) => 1 + go(a, memo) + go(b, memo),
                _ => 1,
            };
            memo.insert(p.key(), c);
            c
        }
        go(self, &mut HashMap::new())
    }

    /// Distinct nodes (shared subproofs counted once).
    pub fn dag_lines(&self) -> usize {
        let mut seen = HashSet::new();
        let mut stack = vec![self.clone()];
        while let Some(p) = stack.pop() {
            if seen.insert(p.key()) {
                if let FKind::Mp(a, b) = p.kind() {
                    stack.push(a.clone());
                    stack.push(b.clone());
                }
            }
        }
        seen.len()
    }

    /// Labels of all hole nodes, by index.
    pub fn holes(&self) -> Vec<(usize, Formula)> {
        let mut out = Vec::new();
        let mut seen = HashSet::new();
        let mut stack = vec![self.clone()];
        while let Some(p) = stack.pop() {
            if !seen.insert(p.key()) {
                continue;
            }
            match p.kind() {
                FKind::Hole(i) => out.push((*i, p.label().clone())),
                FKind::Mp(a, b) => {
                    stack.push(a.clone());
                    stack.push(b.clone());
                }
                FKind::Leaf => {}
            }
        }
        out.sort();
        out
    }

    /// Dag keeping pointer sharing. Holes become leaves.
    pub fn to_dag(&self) -> FregeDag {
        let mut b = DagBuilder::new();
        let mut memo: HashMap<*const FNode, usize> = HashMap::new();
        enum Frame {
            Enter(FProof),
            Exit(FProof),
        }
        let mut stack = vec![Frame::Enter(self.clone())];
        while let Some(fr) = stack.pop() {
            match fr {
                Frame::Enter(p) => {
                    if memo.contains_key(&p.key()) {
                        continue;
                    }
                    stack.push(Frame::Exit(p.clone()));
                    if let FKind::Mp(a, c) = p.kind() {
                        stack.push(Frame::Enter(c.clone()));
                        stack.push(Frame::Enter(a.clone()));
                    }
                }
                Frame::Exit(p) => {
                    if memo.contains_key(&p.key()) {
                        continue;
                    }
                    let prem = match p.kind() {
                        FKind::Mp(a, c) => vec![memo[&a.key()], memo[&c.key()]],
                        _ => vec![],
                    };
                    let id = b.add(p.label().clone(), prem);
                    memo.insert(p.key(), id);
                }
            }
        }
        let root = memo[&self.key()];
        FregeDag { dag: b.finish(root) }
    }

    /// Tree obtained by copying every shared subproof.
    pub fn to_tree(&self) -> FregeDag {
        let mut b = DagBuilder::new();
        enum Frame<'a> {
            Enter(&'a FProof),
            Exit(&'a FProof),
        }
        let mut stack = vec![Frame::Enter(self)];
        let mut built: Vec<usize> = Vec::new();
        while let Some(fr) = stack.pop() {
            match fr {
                Frame::Enter(p) => {
                    stack.push(Frame::Exit(p));
                    if let FKind::Mp(a, c) = p.kind() {
                        stack.push(Frame::Enter(c));
                        stack.push(Frame::Enter(a));
                    }
                }
                Frame::Exit(p) => {
                    let prem = match p.kind() {
                        FKind::Mp(..) => built.split_off(built.len() - 2),
                        _ => vec![],
                    };
                    built.push(b.add(p.label().clone(), prem));
                }
            }
        }
        let root = built.pop().expect("root");
        FregeDag { dag: b.finish(root) }
    }

    /// Reads a checked dag back; shared nodes stay shared.
    pub fn from_dag(pi: &FregeDag) -> Result<FProof, String> {
        let d = pi.dag();
        let mut nodes: Vec<FProof> = Vec::with_capacity(d.len());
        for v in 0..d.len() {
            let p = match pi.mp_premises(v)? {
                None => FProof::leaf(d.label(v).clone()),
                Some((a, b)) => FProof::mp(&nodes[a], &nodes[b]),
            };
            nodes.push(p);
        }
        Ok(nodes.swap_remove(d.root()))
    }

    /// Applies a substitution to every label; sharing is preserved.
    pub fn substitute(&self, sigma: &Substitution) -> FProof {
        fn go(p: &FProof, s: &Substitution, memo: &mut HashMap<*const FNode, FProof>) -> FProof {
            if let Some(q) = memo.get(&p.key()) {
                return q.clone();
            }
            let label = s.apply(p.label());
            let q = FProof(Arc::new(FNode {
                label,
                kind: match p.kind() {
                    FKind::Leaf => FKind::Leaf,
                    FKind::Hole(i) => FKind::Hole(*i),
                    FKind::Mp(a, b) => FKind::Mp(go(a, s, memo), go(b, s, memo)),
                },
            }));
            memo.insert(p.key(), q.clone());
            q
        }
        go(self, sigma, &mut HashMap::new())
    }

    /// Replaces `Hole(i)` by `fill[i]`; labels must agree.
    pub fn fill(&self, fill: &[FProof]) -> FProof {
        fn go(p: &FProof, fill: &[FProof], memo: &mut HashMap<*const FNode, FProof>) -> FProof {
            if let Some(q) = memo.get(&p.key()) {
                return q.clone();
            }
            let q = match p.kind() {
                FKind::Leaf => p.clone(),
                FKind::Hole(i) => {
                    let f = &fill[*i];
                    assert_eq!(f.label(), p.label(), "premise {i} does not fit");
                    f.clone()
                }
                FKind::Mp(a, b) => {
                    let (a2, b2) = (go(a, fill, memo), go(b, fill, memo));
                    if a2.ptr_eq(a) && b2.ptr_eq(b) {
                        p.clone()
                    } else {
                        FProof::mp(&a2, &b2)
                    }
                }
            };
            memo.insert(p.key(), q.clone());
            q
        }
        go(self, fill, &mut HashMap::new())
    }
}

/// `⊢ a → a` in five lines.
pub fn identity_proof(a: &Formula) -> FProof {
    let aa = Formula::imp(a.clone(), a.clone());
    let s1 = FProof::leaf(a2(a, &aa, a));
    let s2 = FProof::leaf(a1(a, &aa));
    let s3 = FProof::mp(&s2, &s1);
    let s4 = FProof::leaf(a1(a, a));
    FProof::mp(&s4, &s3)
}

/// From a proof of `φ` (possibly using leaves `h`), a proof of `h → φ` in
/// which those leaves are no longer used.
pub fn discharge(h: &Formula, p: &FProof) -> FProof {
    fn uses(p: &FProof, h: &Formula, memo: &mut HashMap<*const FNode, bool>) -> bool {
        if let Some(&u) = memo.get(&p.key()) {
            return u;
        }
        let u = match p.kind() {
            FKind::Leaf | FKind::Hole(_) => p.label() == h,
            FKind::Mp(a, b) => uses(a, h, memo) || uses(b, h, memo),
        };
        memo.insert(p.key(), u);
        u
    }
    fn go(
        p: &FProof,
        h: &Formula,
        used: &mut HashMap<*const FNode, bool>,
        memo: &mut HashMap<*const FNode, FProof>,
    ) -> FProof {
        if let Some(q) = memo.get(&p.key()) {
            return q.clone();
        }
        let q = if p.label() == h {
            identity_proof(h)
        } else if !uses(p, h, used) {
            FProof::mp(p, &FProof::leaf(a1(p.label(), h)))
        } else {
            match p.kind() {
                // η: `b` already proves `h → φ`
                FKind::Mp(a, b) if a.label() == h && !uses(b, h, used) => b.clone(),
                FKind::Mp(a, b) => {
                    let ha = go(a, h, used, memo);
                    let hab = go(b, h, used, memo);
                    let ax = FProof::leaf(a2(h, a.label(), p.label()));
                    FProof::mp(&ha, &FProof::mp(&hab, &ax))
                }
                _ => unreachable!("leaves using h are labelled h"),
            }
        };
        memo.insert(p.key(), q.clone());
        q
    }
    go(p, h, &mut HashMap::new(), &mut HashMap::new())
}

/// Translates a natural deduction derivation line by line: `→E` becomes MP,
/// `→I` a discharge.
pub fn nm_to_frege_naive(d: &NmDerivation) -> Result<FProof, String> {
    let dag = d.dag();
    let roles = d.roles().map_err(|v| v.to_string())?;
    let mut nodes: Vec<FProof> = Vec::with_capacity(d.len());
    for v in 0..d.len() {
        let p = match roles[v] {
            Role::Leaf => FProof::leaf(dag.label(v).clone()),
            Role::Elim { minor, major } => FProof::mp(&nodes[minor], &nodes[major]),
            Role::Intro { premise } => {
                let (ante, _) = dag.label(v).as_imp().expect("intro label");
                discharge(ante, &nodes[premise])
            }
        };
        nodes.push(p);
    }
    Ok(nodes.swap_remove(dag.root()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::parse_formula;
    use crate::semantics::decide;

    fn f(s: &str) -> Formula {
        parse_formula(s).unwrap()
    }

    fn seq(lines: &[&str]) -> FregeSeq {
        FregeSeq::new(lines.iter().map(|s| f(s)).collect()).unwrap()
    }

    fn identity_seq() -> FregeSeq {
        seq(&[
            "(p -> (p -> p) -> p) -> (p -> p -> p) -> p -> p",
            "p -> (p -> p) -> p",
            "(p -> p -> p) -> p -> p",
            "p -> p -> p",
            "p -> p",
        ])
    }

    #[test]
    fn axioms() {
        assert_eq!(axiom_kind(&f("p -> q -> p")), Some(Axiom::A1));
        assert_eq!(
            axiom_kind(&f("(a -> b -> c) -> (a -> b) -> a -> c")),
            Some(Axiom::A2)
        );
        assert_eq!(axiom_kind(&f("p -> q -> q")), None);
        assert_eq!(axiom_kind(&f("p")), None);
    }

    #[test]
    fn sequence_checker() {
        let none = HashSet::new();
        assert!(check_frege_seq(&seq(&["p -> q -> p"]), &none, &f("p -> q -> p")).accepted());
        assert!(check_frege_seq(&identity_seq(), &none, &f("p -> p")).accepted());
        assert!(!check_frege_seq(&seq(&["p"]), &none, &f("p")).accepted());
        assert!(!check_frege_seq(&identity_seq(), &none, &f("q -> q")).accepted());
        assert!(FregeSeq::new(vec![]).is_err());
    }

    #[test]
    fn conversions() {
        let none = HashSet::new();
        let d = seq_to_dag(&identity_seq(), &none).unwrap();
        assert_eq!(d.len(), 5);
        assert!(check_frege_dag(&d, &none, &f("p -> p")).accepted());
        let back = dag_to_seq(&d);
        assert!(back.len() <= 5);
        assert!(check_frege_seq(&back, &none, &f("p -> p")).accepted());
        let single = seq_to_dag(&seq(&["p -> q -> p"]), &none).unwrap();
        assert_eq!(single.len(), 1);
        let mut lines = identity_seq().lines().to_vec();
        lines.insert(0, f("q -> q -> q"));
        let with_unused = FregeSeq::new(lines).unwrap();
        assert!(seq_to_dag(&with_unused, &none).unwrap().len() < with_unused.len());
        assert!(!check_frege_dag(&seq_to_dag(&seq(&["p"]), &[f("p")].into()).unwrap(), &none, &f("p")).accepted());
    }

    #[test]
    fn dedup_keeps_first() {
        let mut lines = identity_seq().lines().to_vec();
        lines.insert(2, f("p -> (p -> p) -> p"));
        let long = FregeSeq::new(lines).unwrap();
        let none = HashSet::new();
        assert!(check_frege_seq(&long, &none, &f("p -> p")).accepted());
        let short = dedup(&long);
        assert_eq!(short, identity_seq());
        assert!(is_non_redundant(&short));
        assert_eq!(dedup(&short), short);
    }

    #[test]
    fn identity_and_discharge() {
        let none = HashSet::new();
        let id = identity_proof(&f("p -> q")).to_tree();
        assert!(check_frege_dag(&id, &none, &f("(p -> q) -> p -> q")).accepted());
        // from a, a -> b: b; discharging a gives a proof of a -> b from {a -> b}
        let p = FProof::mp(&FProof::leaf(f("a")), &FProof::leaf(f("a -> b")));
        let q = discharge(&f("a"), &p);
        let g: HashSet<Formula> = [f("a -> b")].into();
        assert!(check_frege_dag(&q.to_dag(), &g, &f("a -> b")).accepted());
    }

    #[test]
    fn naive_translation() {
        for s in ["p -> q -> p", "(p -> q -> r) -> (p -> q) -> p -> r", "((p -> q) -> p -> q) -> p -> p"] {
            let d = decide(&[], &f(s)).unwrap();
            let nm = d.witness().unwrap();
            let fp = nm_to_frege_naive(nm).unwrap();
            assert!(check_frege_dag(&fp.to_tree(), &HashSet::new(), &f(s)).accepted(), "{s}");
        }
    }

    #[test]
    fn fill_and_substitute() {
        let t = FProof::mp(&FProof::hole(0, f("a")), &FProof::hole(1, f("a -> b")));
        let sigma = Substitution::new().bind("a", f("p -> p")).bind("b", f("q"));
        let inst = t.substitute(&sigma);
        assert_eq!(inst.holes(), vec![(0, f("p -> p")), (1, f("(p -> p) -> q"))]);
        let filled = inst.fill(&[identity_proof(&f("p")), FProof::leaf(f("(p -> p) -> q"))]);
        let g: HashSet<Formula> = [f("(p -> p) -> q")].into();
        assert!(check_frege_dag(&filled.to_tree(), &g, &f("q")).accepted());
    }
}
