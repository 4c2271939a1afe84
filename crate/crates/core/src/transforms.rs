//! Simulations between natural deduction and Frege proofs, in both dag-like
//! and tree-like forms.
//!
//! Builders return [`FProof`] values; a builder that never reuses a subproof
//! object yields a tree, so tree-likeness of inputs carries over.

use std::collections::{BTreeSet, HashMap, HashSet};
use std::fmt;

use thiserror::Error;

use crate::formula::{ret, ret_split, Formula, FormulaSeq, RetSplit};
use crate::frege::{
    a1, axiom_kind, check_frege_dag, dag_to_seq, dedup, discharge, frege_metrics,
    identity_proof, justify_seq, Axiom, FProof, FregeDag, FregeSeq, Justification,
};
use crate::natded::{assumptions, check_nm, nm_metrics, CheckReport, NmBuilder, NmDerivation, ProofMetrics, Role};
use crate::schemas::{ret_key, use_schema, TOP_VAR};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TransformError {
    #[error("input proof rejected: {0}")]
    InvalidInput(String),
    #[error("output proof rejected: {0}")]
    OutputRejected(String),
    #[error("a chain needs at least two formulas")]
    EmptyChain,
    #[error("the smaller sequence is not a subsequence of the larger one")]
    NotSubsequence,
    #[error("index set {0} is not covered by the available indices")]
    BadIndices(String),
}

/// Input and output measurements of one transform run.
#[derive(Clone, Debug)]
pub struct TransformReport {
    pub transform: String,
    pub input: ProofMetrics,
    pub output: ProofMetrics,
    /// Named ratios of an output measure to its asymptotic bound.
    pub fits: Vec<(String, f64)>,
    pub verdict: CheckReport,
    pub notes: Vec<String>,
}

impl fmt::Display for TransformReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "transform {}", self.transform)?;
        writeln!(f, "  input   {}", self.input)?;
        writeln!(f, "  output  {}", self.output)?;
        for (name, v) in &self.fits {
            writeln!(f, "  fit     {name} = {v:.4}")?;
        }
        for n in &self.notes {
            writeln!(f, "  note    {n}")?;
        }
        write!(f, "  verdict {}", self.verdict)
    }
}

fn log2(t: usize) -> f64 {
    (t.max(2) as f64).log2()
}

fn imp(a: &Formula, b: &Formula) -> Formula {
    Formula::imp(a.clone(), b.clone())
}

fn parts(f: &Formula) -> (Formula, Formula) {
    let (a, b) = f.as_imp().expect("implication expected");
    (a.clone(), b.clone())
}

fn top() -> Formula {
    Formula::top()
}

/// `⊢ ⊤`.
pub fn top_proof() -> FProof {
    identity_proof(&Formula::var(TOP_VAR))
}

fn schema(name: &str, binds: &[(&str, &Formula)], premises: &[FProof]) -> FProof {
    use_schema(name, binds, premises)
}

// ---------------------------------------------------------------------------
// Chains, subsets, weakening

fn chain2(p: FProof, q: FProof) -> FProof {
    let (a, b) = parts(p.label());
    let (_, c) = parts(q.label());
    schema("CHAIN", &[("a", &a), ("b", &b), ("c", &c)], &[p, q])
}

/// Combines proofs of `φ_i → φ_{i+1}` into one of `φ_0 → φ_n` along a
/// balanced binary tree.
pub fn chain_steps(steps: Vec<FProof>) -> FProof {
    assert!(!steps.is_empty(), "empty chain");
    let mut cur = steps;
    while cur.len() > 1 {
        let mut next = Vec::with_capacity(cur.len().div_ceil(2));
        let mut it = cur.into_iter();
        while let Some(a) = it.next() {
            match it.next() {
                Some(b) => next.push(chain2(a, b)),
                None => next.push(a),
            }
        }
        cur = next;
    }
    cur.pop().expect("one proof left")
}

/// Tree derivation of `φ_0 → φ_n` from the assumptions `φ_i → φ_{i+1}`.
pub fn chain_proof(phis: &[Formula]) -> Result<FProof, TransformError> {
    if phis.len() < 2 {
        return Err(TransformError::EmptyChain);
    }
    let steps = phis
        .windows(2)
        .map(|w| FProof::leaf(imp(&w[0], &w[1])))
        .collect();
    Ok(chain_steps(steps))
}

/// `(Δ → φ) → (Γ → φ)` for `Δ ⊆ Γ`.
pub fn subset_proof(gamma: &FormulaSeq, delta: &FormulaSeq, phi: &Formula) -> Result<FProof, TransformError> {
    if !delta.is_subseq_of(gamma) {
        return Err(TransformError::NotSubsequence);
    }
    Ok(subset_by_index(gamma, &delta.indices(), phi))
}

fn subset_by_index(gamma: &FormulaSeq, keep: &BTreeSet<usize>, phi: &Formula) -> FProof {
    let (mut d, mut g) = (phi.clone(), phi.clone());
    let mut steps = Vec::with_capacity(gamma.len());
    for (i, a) in gamma.entries() {
        if keep.contains(i) {
            steps.push(schema("SUB_IN", &[("d", &d), ("g", &g), ("a", a)], &[]));
            d = imp(a, &d);
        } else {
            steps.push(schema("SUB_OUT", &[("d", &d), ("g", &g), ("a", a)], &[]));
        }
        g = imp(a, &g);
    }
    let base = identity_proof(phi);
    if steps.is_empty() {
        base
    } else {
        FProof::mp(&base, &chain_steps(steps))
    }
}

/// `(Γ → φ → ψ) → (Γ → φ) → (Γ → ψ)`.
pub fn distribute_proof(gamma: &FormulaSeq, phi: &Formula, psi: &Formula) -> FProof {
    let (mut b, mut c, mut d) = (imp(phi, psi), phi.clone(), psi.clone());
    let mut steps = Vec::with_capacity(gamma.len());
    for (_, a) in gamma.entries() {
        steps.push(schema("W9", &[("a", a), ("b", &b), ("c", &c), ("d", &d)], &[]));
        b = imp(a, &b);
        c = imp(a, &c);
        d = imp(a, &d);
    }
    let base = identity_proof(&imp(phi, psi));
    if steps.is_empty() {
        base
    } else {
        FProof::mp(&base, &chain_steps(steps))
    }
}

/// `Γ → (Γ → φ) → φ`.
pub fn apply_proof(gamma: &FormulaSeq, phi: &Formula) -> FProof {
    let g = gamma.fold_imp(phi);
    let (mut b, mut c) = (phi.clone(), imp(&g, phi));
    let mut steps = Vec::with_capacity(gamma.len());
    for (_, a) in gamma.entries() {
        steps.push(schema("W10", &[("g", &g), ("a", a), ("b", &b), ("c", &c)], &[]));
        b = imp(a, &b);
        c = imp(a, &c);
    }
    let base = identity_proof(&imp(&g, phi));
    let full = if steps.is_empty() {
        base
    } else {
        FProof::mp(&base, &chain_steps(steps))
    };
    FProof::mp(&identity_proof(&g), &full)
}

/// `(Γ → Γ → φ) → (Γ → φ)`.
pub fn contract_proof(gamma: &FormulaSeq, phi: &Formula) -> FProof {
    let g = gamma.fold_imp(phi);
    FProof::mp(&apply_proof(gamma, phi), &distribute_proof(gamma, &g, phi))
}

/// `(Θ → Γ → Δ → φ) → (Θ → Δ → Γ → φ)`.
pub fn exchange_proof(theta: &FormulaSeq, gamma: &FormulaSeq, delta: &FormulaSeq, phi: &Formula) -> FProof {
    let big = FormulaSeq::stack(&[delta, gamma, delta, gamma]);
    let lo = gamma.len();
    let mid = big.restrict_range(lo, lo + delta.len() + gamma.len());
    let widen = subset_by_index(&big, &mid.indices(), phi);
    let lam = FormulaSeq::stack(&[delta, gamma]);
    let core = chain2(widen, contract_proof(&lam, phi));
    if theta.is_empty() {
        return core;
    }
    let (x, y) = parts(core.label());
    let lifted = FProof::mp(&core, &subset_by_index(theta, &BTreeSet::new(), core.label()));
    FProof::mp(&lifted, &distribute_proof(theta, &x, &y))
}

/// The four weakening displays for given sequences.
#[derive(Clone, Debug)]
pub struct WeakeningProofs {
    pub distribute: FProof,
    pub apply: FProof,
    pub contract: FProof,
    pub exchange: FProof,
}

pub fn weakening_proofs(
    gamma: &FormulaSeq,
    delta: &FormulaSeq,
    theta: &FormulaSeq,
    phi: &Formula,
    psi: &Formula,
) -> WeakeningProofs {
    WeakeningProofs {
        distribute: distribute_proof(gamma, phi, psi),
        apply: apply_proof(gamma, phi),
        contract: contract_proof(gamma, phi),
        exchange: exchange_proof(theta, gamma, delta, phi),
    }
}

// ---------------------------------------------------------------------------
// Relativized conjunctions

fn shift_set(s: &BTreeSet<usize>, h: usize) -> BTreeSet<usize> {
    s.iter().map(|i| i - h).collect()
}

fn split_set(s: &BTreeSet<usize>, h: usize) -> (BTreeSet<usize>, BTreeSet<usize>) {
    let lo = s.range(..h).copied().collect();
    let hi = s.range(h..).map(|i| i - h).collect();
    (lo, hi)
}

/// `RET Γ↾I₀ → RET Γ↾I₁ → RET Γ↾I₂` for `I₂ ⊆ I₀ ∪ I₁`.
pub fn ret_subset_proof(
    phi: &Formula,
    gamma: &FormulaSeq,
    i0: &BTreeSet<usize>,
    i1: &BTreeSet<usize>,
    i2: &BTreeSet<usize>,
) -> Result<FProof, TransformError> {
    let avail = gamma.indices();
    for (name, s) in [("I0", i0), ("I1", i1)] {
        if !s.is_subset(&avail) {
            return Err(TransformError::BadIndices(name.into()));
        }
    }
    let union: BTreeSet<usize> = i0.union(i1).copied().collect();
    if !i2.is_subset(&union) {
        return Err(TransformError::BadIndices("I2".into()));
    }
    Ok(ret_subset_rec(phi, &gamma.restrict(&union), [i0, i1, i2]))
}

fn ret_subset_rec(phi: &Formula, g: &FormulaSeq, sets: [&BTreeSet<usize>; 3]) -> FProof {
    if g.len() <= 1 {
        let ne = [!sets[0].is_empty(), !sets[1].is_empty(), !sets[2].is_empty()];
        let name = format!("RET_BASE_{}", ret_key(&ne));
        return match g.entries().first() {
            Some((_, a)) => schema(&name, &[("a", a), ("f", phi)], &[]),
            None => schema(&name, &[("f", phi)], &[]),
        };
    }
    let idx: Vec<usize> = g.entries().iter().map(|(i, _)| *i).collect();
    match ret_split(&idx) {
        RetSplit::Shift(h) => {
            let s = sets.map(|s| shift_set(s, h));
            ret_subset_rec(phi, &g.shift_down(h), [&s[0], &s[1], &s[2]])
        }
        RetSplit::Split(h) => {
            let lo_g = g.restrict_range(0, h);
            let hi_g = g.restrict_range(h, usize::MAX).shift_down(h);
            let halves = sets.map(|s| split_set(s, h));
            let lo = [&halves[0].0, &halves[1].0, &halves[2].0];
            let hi = [&halves[0].1, &halves[1].1, &halves[2].1];
            let p0 = ret_subset_rec(phi, &lo_g, lo);
            let p1 = ret_subset_rec(phi, &hi_g, hi);
            let key = |s: [&BTreeSet<usize>; 3]| ret_key(&s.map(|x| !x.is_empty()));
            let name = format!("RET_SPLIT_{}_{}", key(lo), key(hi));
            let mut ys: Vec<(String, Formula)> = Vec::new();
            for (v, (p, s)) in [(&p0, lo), (&p1, hi)].into_iter().enumerate() {
                let (r0, rest) = parts(p.label());
                let (r1, r2) = parts(&rest);
                for (u, r) in [r0, r1, r2].into_iter().enumerate() {
                    if !s[u].is_empty() {
                        ys.push((format!("y{v}{u}"), parts(&r).0));
                    }
                }
            }
            let mut binds: Vec<(&str, &Formula)> = ys.iter().map(|(n, f)| (n.as_str(), f)).collect();
            binds.push(("f", phi));
            let t = schema(&name, &binds, &[]);
            FProof::mp(&p1, &FProof::mp(&p0, &t))
        }
    }
}

/// `RET_φ Γ → (RET_ψ Γ)^φ`.
pub fn ret_transfer_proof(phi: &Formula, psi: &Formula, gamma: &FormulaSeq) -> FProof {
    match gamma.len() {
        0 => schema("TRANSFER_EMPTY", &[("f", phi)], &[]),
        1 => schema(
            "TRANSFER_ONE",
            &[("a", &gamma.entries()[0].1), ("f", phi), ("g", psi)],
            &[],
        ),
        _ => {
            let idx: Vec<usize> = gamma.entries().iter().map(|(i, _)| *i).collect();
            match ret_split(&idx) {
                RetSplit::Shift(h) => ret_transfer_proof(phi, psi, &gamma.shift_down(h)),
                RetSplit::Split(h) => {
                    let p0 = ret_transfer_proof(phi, psi, &gamma.restrict_range(0, h));
                    let p1 = ret_transfer_proof(phi, psi, &gamma.restrict_range(h, usize::MAX).shift_down(h));
                    let unpack = |p: &FProof| {
                        let (a, rest) = parts(p.label());
                        let b = parts(&parts(&rest).0).0;
                        (a, b)
                    };
                    let (a, b) = unpack(&p0);
                    let (c, d) = unpack(&p1);
                    schema(
                        "TRANSFER_SPLIT",
                        &[("a", &a), ("b", &b), ("c", &c), ("d", &d), ("f", phi), ("g", psi)],
                        &[p0, p1],
                    )
                }
            }
        }
    }
}

// ---------------------------------------------------------------------------
// Natural deduction to Frege

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    Basic,
    Ret,
}

impl std::str::FromStr for Mode {
    type Err = String;
    fn from_str(s: &str) -> Result<Mode, String> {
        match s {
            "basic" => Ok(Mode::Basic),
            "ret" => Ok(Mode::Ret),
            _ => Err(format!("unknown mode `{s}` (expected basic or ret)")),
        }
    }
}

/// Per-node data of the simulation: the enumeration of labels, the open
/// non-assumption labels `A′_v` indexed by that enumeration, and the stage
/// formulas `δ_v`; plus the block tables of the tree-like construction.
#[derive(Clone, Debug)]
pub struct SegmentTable {
    pub labels: Vec<Formula>,
    pub a_prime: Vec<FormulaSeq>,
    pub delta: Vec<Formula>,
    pub blocks: Option<BlockTable>,
}

impl SegmentTable {
    pub fn index_of(&self, f: &Formula) -> Option<usize> {
        self.labels.iter().position(|g| g == f)
    }
}

struct NmSetup {
    roles: Vec<Role>,
    index: HashMap<Formula, usize>,
    table: SegmentTable,
}

fn nm_setup(d: &NmDerivation, gamma: &HashSet<Formula>, mode: Mode) -> Result<NmSetup, TransformError> {
    let report = check_nm(d, gamma, d.root_label());
    if !report.accepted() {
        return Err(TransformError::InvalidInput(report.to_string()));
    }
    let roles = d.roles().map_err(|v| TransformError::InvalidInput(v.to_string()))?;
    let map = assumptions(d).map_err(|v| TransformError::InvalidInput(v.to_string()))?;
    let dag = d.dag();
    let mut index = HashMap::new();
    let mut labels = Vec::new();
    for f in dag.labels() {
        if !index.contains_key(f) {
            index.insert(f.clone(), labels.len());
            labels.push(f.clone());
        }
    }
    let atoms = map.interner();
    let atom_pos: Vec<Option<usize>> = atoms
        .items()
        .iter()
        .map(|f| (!gamma.contains(f)).then(|| index[f]))
        .collect();
    let mut a_prime = Vec::with_capacity(d.len());
    let mut delta = Vec::with_capacity(d.len());
    for v in 0..d.len() {
        let mut entries: Vec<(usize, Formula)> = map
            .ids(v)
            .iter()
            .filter_map(|&a| atom_pos[a].map(|i| (i, labels[i].clone())))
            .collect();
        entries.sort_by_key(|(i, _)| *i);
        let seq = FormulaSeq::new(entries).expect("distinct indices");
        let g = dag.label(v);
        delta.push(match mode {
            Mode::Basic => seq.fold_imp(g),
            Mode::Ret => imp(&ret(g, &seq), g),
        });
        a_prime.push(seq);
    }
    Ok(NmSetup {
        roles,
        index,
        table: SegmentTable {
            labels,
            a_prime,
            delta,
            blocks: None,
        },
    })
}

/// Derivation of `δ_v` from `Γ` and the proofs `prem` of `δ_u` for the
/// premises `u` of `v` (minor before major).
fn basic_node(s: &NmSetup, d: &NmDerivation, gamma: &HashSet<Formula>, v: usize, prem: &[FProof]) -> FProof {
    let t = &s.table;
    let g = d.dag().label(v);
    match s.roles[v] {
        Role::Leaf => {
            if gamma.contains(g) {
                FProof::leaf(g.clone())
            } else {
                identity_proof(g)
            }
        }
        Role::Intro { premise: u } => {
            let (alpha, beta) = parts(g);
            let au = &t.a_prime[u];
            let pos = s.index.get(&alpha).copied().filter(|&i| au.get(i).is_some());
            let step = match pos {
                Some(i) => {
                    let theta = au.restrict_range(i + 1, usize::MAX);
                    let lower = au.restrict_range(0, i);
                    let single = FormulaSeq::new(vec![(i, alpha.clone())]).expect("single");
                    exchange_proof(&theta, &single, &lower, &beta)
                }
                None => {
                    let one = FormulaSeq::from_formulas([alpha.clone()]);
                    let wide = FormulaSeq::stack(&[au, &one]);
                    let keep = (1..=au.len()).collect();
                    subset_by_index(&wide, &keep, &beta)
                }
            };
            FProof::mp(&prem[0], &step)
        }
        Role::Elim { minor, major } => {
            let av = &t.a_prime[v];
            let alpha = d.dag().label(minor).clone();
            let ab = d.dag().label(major).clone();
            let p0 = FProof::mp(&prem[0], &subset_by_index(av, &t.a_prime[minor].indices(), &alpha));
            let p1 = FProof::mp(&prem[1], &subset_by_index(av, &t.a_prime[major].indices(), &ab));
            let w = distribute_proof(av, &alpha, g);
            FProof::mp(&p0, &FProof::mp(&p1, &w))
        }
    }
}

fn ret_node(s: &NmSetup, d: &NmDerivation, gamma: &HashSet<Formula>, v: usize, prem: &[FProof]) -> FProof {
    let t = &s.table;
    let dag = d.dag();
    let g = dag.label(v);
    let av = &t.a_prime[v];
    match s.roles[v] {
        Role::Leaf => {
            if gamma.contains(g) {
                FProof::mp(&FProof::leaf(g.clone()), &FProof::leaf(a1(g, &top())))
            } else {
                schema("LEAF_RET", &[("a", g)], &[])
            }
        }
        Role::Intro { premise: u } => {
            let (alpha, beta) = parts(g);
            let ai = s.index.get(&alpha).copied().unwrap_or(t.labels.len());
            let mut entries = av.entries().to_vec();
            entries.push((ai, alpha.clone()));
            entries.sort_by_key(|(i, _)| *i);
            let amb = FormulaSeq::new(entries).expect("α is not in A′_v");
            let i1: BTreeSet<usize> = [ai].into();
            let sub = ret_subset_rec(&beta, &amb, [&av.indices(), &i1, &t.a_prime[u].indices()]);
            let r = ret(&beta, av);
            let x = ret(&beta, &t.a_prime[u]);
            let mid = schema(
                "IMP_INTRO_RET",
                &[("r", &r), ("a", &alpha), ("b", &beta), ("x", &x)],
                &[sub, prem[0].clone()],
            );
            let tr = ret_transfer_proof(g, &beta, av);
            let big = ret(g, av);
            schema("TRANSFER_USE", &[("y", &r), ("g", g), ("x", &big)], &[mid, tr])
        }
        Role::Elim { minor, major } => {
            let x = ret(g, av);
            let all = av.indices();
            let side = |u: usize, p: &FProof| {
                let au = &t.a_prime[u];
                let a = dag.label(u);
                let sub = ret_subset_rec(g, av, [&BTreeSet::new(), &all, &au.indices()]);
                let sub = FProof::mp(&top_proof(), &sub);
                let yb = ret(g, au);
                let ya = ret(a, au);
                let tr = ret_transfer_proof(g, a, au);
                schema(
                    "ELIM_SIDE",
                    &[("x", &x), ("y", &yb), ("z", &ya), ("a", a), ("b", g)],
                    &[sub, p.clone(), tr],
                )
            };
            let s0 = side(minor, &prem[0]);
            let s1 = side(major, &prem[1]);
            let alpha = dag.label(minor);
            schema("FINAL_E", &[("x", &x), ("a", alpha), ("b", g)], &[s0, s1])
        }
    }
}

fn premises_of(role: Role) -> Vec<usize> {
    match role {
        Role::Leaf => vec![],
        Role::Intro { premise } => vec![premise],
        Role::Elim { minor, major } => vec![minor, major],
    }
}

fn node_proof(mode: Mode, s: &NmSetup, d: &NmDerivation, gamma: &HashSet<Formula>, v: usize, prem: &[FProof]) -> FProof {
    match mode {
        Mode::Basic => basic_node(s, d, gamma, v, prem),
        Mode::Ret => ret_node(s, d, gamma, v, prem),
    }
}

/// The per-node tables used by [`nm_to_frege`].
pub fn segment_table(d: &NmDerivation, gamma: &HashSet<Formula>, mode: Mode) -> Result<SegmentTable, TransformError> {
    Ok(nm_setup(d, gamma, mode)?.table)
}

fn finish_frege(
    name: &str,
    out: FregeDag,
    gamma: &HashSet<Formula>,
    phi: &Formula,
    input: ProofMetrics,
    fits: impl FnOnce(&ProofMetrics) -> Vec<(String, f64)>,
) -> Result<(FregeDag, TransformReport), TransformError> {
    let verdict = check_frege_dag(&out, gamma, phi);
    if !verdict.accepted() {
        return Err(TransformError::OutputRejected(verdict.to_string()));
    }
    let output = frege_metrics(&out);
    let report = TransformReport {
        transform: name.into(),
        input,
        output,
        fits: fits(&output),
        verdict,
        notes: vec![],
    };
    Ok((out, report))
}

/// Frege derivation of the root of `d` from `gamma`, via the stage formulas
/// `A′_v → γ_v` (basic) or `RET_{γ_v} A′_v → γ_v` (ret).
pub fn nm_to_frege(
    d: &NmDerivation,
    gamma: &HashSet<Formula>,
    phi: &Formula,
    mode: Mode,
) -> Result<(FregeDag, TransformReport), TransformError> {
    if d.root_label() != phi {
        return Err(TransformError::InvalidInput(format!("root is {} not {}", d.root_label(), phi)));
    }
    let s = nm_setup(d, gamma, mode)?;
    let mut proofs: Vec<FProof> = Vec::with_capacity(d.len());
    for v in 0..d.len() {
        let prem: Vec<FProof> = premises_of(s.roles[v]).iter().map(|&u| proofs[u].clone()).collect();
        proofs.push(node_proof(mode, &s, d, gamma, v, &prem));
    }
    let root = proofs.swap_remove(d.dag().root());
    let root = match mode {
        Mode::Basic => root,
        Mode::Ret => FProof::mp(&top_proof(), &root),
    };
    let input = nm_metrics(d);
    let (t, s_in, inf) = (input.lines as f64, input.size as f64, input.inferential_size as f64);
    let name = match mode {
        Mode::Basic => "nm_to_frege basic",
        Mode::Ret => "nm_to_frege ret",
    };
    finish_frege(name, root.to_dag(), gamma, phi, input, |o| {
        let mut fits = vec![
            ("lines/t^2".to_string(), o.lines as f64 / (t * t)),
            ("height/h".to_string(), o.height as f64 / (input.height.max(1) as f64)),
        ];
        match mode {
            Mode::Basic => fits.push(("size/(s t^2)".into(), o.size as f64 / (s_in * t * t))),
            Mode::Ret => fits.push(("size/(s~ t log t)".into(), o.size as f64 / (inf * t * log2(input.lines)))),
        }
        fits
    })
}

// ---------------------------------------------------------------------------
// Frege to natural deduction

fn axiom_nm(b: &mut NmBuilder, f: &Formula, kind: Axiom) -> usize {
    match kind {
        Axiom::A1 => {
            let (a, rest) = parts(f);
            let (bb, _) = parts(&rest);
            let leaf = b.leaf(a.clone());
            let inner = b.intro(bb, leaf);
            b.intro(a, inner)
        }
        Axiom::A2 => {
            let (abc, rest) = parts(f);
            let (ab, ac) = parts(&rest);
            let (a, _) = parts(&ac);
            let l1 = b.leaf(abc.clone());
            let l2 = b.leaf(ab.clone());
            let x1 = b.leaf(a.clone());
            let x2 = b.leaf(a.clone());
            let bc = b.elim(x1, l1);
            let bb = b.elim(x2, l2);
            let c = b.elim(bb, bc);
            let i1 = b.intro(a, c);
            let i2 = b.intro(ab, i1);
            b.intro(abc, i2)
        }
    }
}

/// Reads MP nodes as `→E` and expands axiom leaves into closed derivations.
pub fn frege_to_nm(
    pi: &FregeDag,
    gamma: &HashSet<Formula>,
    phi: &Formula,
) -> Result<(NmDerivation, TransformReport), TransformError> {
    let verdict = check_frege_dag(pi, gamma, phi);
    if !verdict.accepted() {
        return Err(TransformError::InvalidInput(verdict.to_string()));
    }
    let dag = pi.dag();
    let mut b = NmBuilder::new();
    let mut node = Vec::with_capacity(pi.len());
    for v in 0..pi.len() {
        let f = dag.label(v);
        let id = match pi.mp_premises(v).map_err(TransformError::InvalidInput)? {
            Some((minor, major)) => b.elim(node[minor], node[major]),
            None if gamma.contains(f) => b.leaf(f.clone()),
            None => axiom_nm(&mut b, f, axiom_kind(f).expect("checked leaf")),
        };
        node.push(id);
    }
    let d = b.finish(node[dag.root()]);
    let verdict = check_nm(&d, gamma, phi);
    if !verdict.accepted() {
        return Err(TransformError::OutputRejected(verdict.to_string()));
    }
    let input = frege_metrics(pi);
    let output = nm_metrics(&d);
    let report = TransformReport {
        transform: "frege_to_nm".into(),
        input,
        output,
        fits: vec![
            ("lines/t".into(), output.lines as f64 / input.lines as f64),
            ("height-h".into(), output.height as f64 - input.height as f64),
        ],
        verdict,
        notes: vec![],
    };
    Ok((d, report))
}

// ---------------------------------------------------------------------------
// Deduction

/// From a derivation of `φ` from `Γ ∪ Δ`, a derivation of `Γ → φ` from `Δ`,
/// line by line.
pub fn deduction(
    pi: &FregeDag,
    g: &FormulaSeq,
    delta: &HashSet<Formula>,
) -> Result<(FregeDag, TransformReport), TransformError> {
    let phi = pi.root_label().clone();
    let mut all = delta.clone();
    all.extend(g.formulas().cloned());
    let verdict = check_frege_dag(pi, &all, &phi);
    if !verdict.accepted() {
        return Err(TransformError::InvalidInput(verdict.to_string()));
    }
    let goal = g.fold_imp(&phi);
    let input = frege_metrics(pi);
    if g.is_empty() {
        return finish_frege("deduction", pi.clone(), delta, &goal, input, |_| vec![]);
    }
    let dag = pi.dag();
    let mut first_index: HashMap<&Formula, usize> = HashMap::new();
    for (i, f) in g.entries() {
        first_index.entry(f).or_insert(*i);
    }
    let mut out: Vec<FProof> = Vec::with_capacity(pi.len());
    for v in 0..pi.len() {
        let f = dag.label(v);
        let p = match pi.mp_premises(v).map_err(TransformError::InvalidInput)? {
            Some((minor, major)) => {
                let (a, b) = parts(dag.label(major));
                let w = distribute_proof(g, &a, &b);
                FProof::mp(&out[minor], &FProof::mp(&out[major], &w))
            }
            None => match first_index.get(f) {
                Some(&i) => {
                    let keep = [i].into();
                    FProof::mp(&identity_proof(f), &subset_by_index(g, &keep, f))
                }
                None => FProof::mp(&FProof::leaf(f.clone()), &subset_by_index(g, &BTreeSet::new(), f)),
            },
        };
        out.push(p);
    }
    let root = out.swap_remove(dag.root());
    let t = input.lines as f64;
    let n = g.len() as f64;
    finish_frege("deduction", root.to_dag(), delta, &goal, input, |o| {
        vec![("lines/(t n)".into(), o.lines as f64 / (t * n.max(1.0)))]
    })
}

// ---------------------------------------------------------------------------
// Tree-like simulations

/// One block `[j, end)` at level `k` with its outside premises `P_j^k`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Block {
    pub j: usize,
    pub end: usize,
    pub premises: BTreeSet<usize>,
}

/// `P_j^k` for every level `k ≤ ⌈log t⌉` and every `j` divisible by `2^k`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BlockTable {
    pub t: usize,
    pub levels: Vec<Vec<Block>>,
}

impl BlockTable {
    pub fn new(edges: &[Vec<usize>]) -> BlockTable {
        let t = edges.len();
        let mut levels = Vec::new();
        let mut k = 0;
        loop {
            let w = 1usize << k;
            let level: Vec<Block> = (0..t)
                .step_by(w)
                .map(|j| {
                    let end = (j + w).min(t);
                    let premises = (j..end)
                        .flat_map(|i| edges[i].iter().copied())
                        .filter(|&i| i < j)
                        .collect();
                    Block { j, end, premises }
                })
                .collect();
            levels.push(level);
            if w >= t {
                break;
            }
            k += 1;
        }
        BlockTable { t, levels }
    }
}

/// Merges block proofs `RET Δ_j^k → RET Γ_j^k` up to `⊤ → RET ⟨L_i⟩_{i<t}`
/// and returns a proof of `L_{t-1}^φ`.
fn block_merge(lines: &FormulaSeq, phi: &Formula, table: &BlockTable, base: Vec<FProof>) -> FProof {
    let t = table.t;
    let mut cur: Vec<FProof> = base;
    let empty = BTreeSet::new();
    for k in 0..table.levels.len() - 1 {
        let w = 1usize << k;
        let level = &table.levels[k];
        let next_level = &table.levels[k + 1];
        let mut next = Vec::with_capacity(next_level.len());
        let mut it = cur.into_iter().zip(level.iter());
        while let Some((p0, b0)) = it.next() {
            if b0.j + w >= t {
                next.push(p0);
                continue;
            }
            let (p1, b1) = it.next().expect("right half present");
            let up = &next_level[b0.j >> (k + 1)];
            let d = &up.premises;
            let g0: BTreeSet<usize> = (b0.j..b0.end).collect();
            let g1: BTreeSet<usize> = (b1.j..b1.end).collect();
            let gg: BTreeSet<usize> = g0.union(&g1).copied().collect();
            let a = ret_subset_rec(phi, &lines.restrict(d), [&empty, d, &b0.premises]);
            let a = chain2(FProof::mp(&top_proof(), &a), p0);
            let dg: BTreeSet<usize> = d.union(&g0).copied().collect();
            let bproof = ret_subset_rec(phi, &lines.restrict(&dg), [d, &g0, &b1.premises]);
            let (x, rest) = parts(bproof.label());
            let (y, z) = parts(&rest);
            let wf = parts(p1.label()).1;
            let bproof = schema("CHAIN2", &[("x", &x), ("y", &y), ("z", &z), ("w", &wf)], &[bproof, p1]);
            let c = ret_subset_rec(phi, &lines.restrict(&gg), [&g0, &g1, &gg]);
            let (ra, rest) = parts(c.label());
            let (rb, rc) = parts(&rest);
            next.push(schema(
                "MERGE3",
                &[("x", &x), ("a", &ra), ("b", &rb), ("c", &rc)],
                &[a, bproof, c],
            ));
        }
        cur = next;
    }
    let whole = cur.pop().expect("single block at the top");
    let all_ret = FProof::mp(&top_proof(), &whole);
    let all: BTreeSet<usize> = (0..t).collect();
    let last: BTreeSet<usize> = [t - 1].into();
    let pick = ret_subset_rec(phi, lines, [&empty, &all, &last]);
    FProof::mp(&all_ret, &FProof::mp(&top_proof(), &pick))
}

/// Tree-like derivation of logarithmic height from any dag-like one.
pub fn frege_dag_to_tree(
    pi: &FregeDag,
    gamma: &HashSet<Formula>,
    phi: &Formula,
) -> Result<(FregeDag, TransformReport), TransformError> {
    let verdict = check_frege_dag(pi, gamma, phi);
    if !verdict.accepted() {
        return Err(TransformError::InvalidInput(verdict.to_string()));
    }
    let mut seq = dedup(&dag_to_seq(pi)).lines().to_vec();
    let pos = seq.iter().position(|f| f == phi).expect("goal occurs");
    seq.truncate(pos + 1);
    let seq = FregeSeq::new(seq).expect("nonempty");
    let just = justify_seq(&seq, gamma).map_err(|(_, m)| TransformError::InvalidInput(m))?;
    let lines = seq.lines();
    let t = lines.len();
    let edges: Vec<Vec<usize>> = just
        .iter()
        .map(|j| match *j {
            Justification::Mp { minor, major } => {
                let mut e = vec![minor, major];
                e.sort();
                e
            }
            _ => vec![],
        })
        .collect();
    let table = BlockTable::new(&edges);
    let base = (0..t)
        .map(|j| {
            let z = &lines[j];
            match just[j] {
                Justification::Mp { minor, major } => {
                    let (a, b) = (&lines[minor], &lines[major]);
                    let inner = if minor < major {
                        schema("MP_CLOSED", &[("a", a), ("b", z)], &[])
                    } else {
                        identity_proof(b)
                    };
                    let (x, y) = if minor < major { (a, b) } else { (b, a) };
                    schema("B_TWO", &[("x", x), ("y", y), ("z", z), ("f", phi)], &[inner])
                }
                _ => schema("B_ZERO", &[("z", z), ("f", phi)], &[FProof::leaf(z.clone())]),
            }
        })
        .collect();
    let seqf = FormulaSeq::from_formulas(lines.iter().cloned());
    let pphi = block_merge(&seqf, phi, &table, base);
    let root = FProof::mp(&pphi, &schema("LEAF_RET", &[("a", phi)], &[]));
    let input = frege_metrics(pi);
    let out = root.to_dag();
    let (tt, s_in) = (t as f64, seq.lines().iter().map(Formula::size).sum::<usize>() as f64);
    let lt = log2(t);
    let phis = phi.size() as f64;
    let (out, mut report) = finish_frege("frege_dag_to_tree", out, gamma, phi, input, |o| {
        vec![
            ("lines/(t log t)".into(), o.lines as f64 / (tt * lt)),
            ("height/log t".into(), o.height as f64 / lt),
            ("size/((s+|phi|t) log^2 t)".into(), o.size as f64 / ((s_in + phis * tt) * lt * lt)),
        ]
    })?;
    report.notes.push(format!("deduplicated lines t = {t}"));
    report.notes.push("final step: phi^phi -> phi by the stored LEAF_RET template".into());
    Ok((out, report))
}

/// Post-order of the nodes reachable from the root (premises first).
fn reachable_order(d: &NmDerivation) -> Vec<usize> {
    let dag = d.dag();
    let mut seen = vec![false; d.len()];
    let mut order = Vec::new();
    let mut stack = vec![(dag.root(), false)];
    while let Some((v, done)) = stack.pop() {
        if done {
            order.push(v);
            continue;
        }
        if seen[v] {
            continue;
        }
        seen[v] = true;
        stack.push((v, true));
        for &u in dag.premises(v).iter().rev() {
            if !seen[u] {
                stack.push((u, false));
            }
        }
    }
    order
}

/// Tree-like Frege and natural deduction derivations of logarithmic height.
pub fn nm_to_tree(
    d: &NmDerivation,
    gamma: &HashSet<Formula>,
    phi: &Formula,
) -> Result<((FregeDag, NmDerivation), TransformReport), TransformError> {
    if d.root_label() != phi {
        return Err(TransformError::InvalidInput(format!("root is {} not {}", d.root_label(), phi)));
    }
    let s = nm_setup(d, gamma, Mode::Ret)?;
    let order = reachable_order(d);
    let t = order.len();
    let mut pos = vec![usize::MAX; d.len()];
    for (i, &v) in order.iter().enumerate() {
        pos[v] = i;
    }
    let deltas: Vec<Formula> = order.iter().map(|&v| s.table.delta[v].clone()).collect();
    let mut edges = Vec::with_capacity(t);
    let mut base = Vec::with_capacity(t);
    for &v in &order {
        let prem_nodes = premises_of(s.roles[v]);
        let mut sorted: Vec<usize> = prem_nodes.iter().map(|&u| pos[u]).collect();
        sorted.sort();
        let holes: Vec<FProof> = prem_nodes
            .iter()
            .map(|&u| {
                let k = sorted.iter().position(|&i| i == pos[u]).expect("premise");
                FProof::hole(k, s.table.delta[u].clone())
            })
            .collect();
        let body = ret_node(&s, d, gamma, v, &holes);
        let z = &s.table.delta[v];
        let p = match sorted.as_slice() {
            [] => schema("B_ZERO", &[("z", z), ("f", phi)], &[body]),
            [u] => {
                let x = &deltas[*u];
                schema("B_ONE", &[("x", x), ("z", z), ("f", phi)], &[discharge(x, &body)])
            }
            [u0, u1] => {
                let (x, y) = (&deltas[*u0], &deltas[*u1]);
                let closed = discharge(x, &discharge(y, &body));
                schema("B_TWO", &[("x", x), ("y", y), ("z", z), ("f", phi)], &[closed])
            }
            _ => unreachable!("at most two premises"),
        };
        edges.push(sorted);
        base.push(p);
    }
    let table = BlockTable::new(&edges);
    let seqf = FormulaSeq::from_formulas(deltas.iter().cloned());
    let last = block_merge(&seqf, phi, &table, base);
    let root = FProof::mp(&last, &schema("FINAL_TOP", &[("a", phi)], &[]));
    let input = nm_metrics(d);
    let (tt, inf) = (t as f64, input.inferential_size as f64);
    let lt = log2(t);
    let (fd, mut report) = finish_frege("nm_to_tree", root.to_dag(), gamma, phi, input, |o| {
        vec![
            ("lines/t^2".into(), o.lines as f64 / (tt * tt)),
            ("height/log t".into(), o.height as f64 / lt),
            ("size/(s~ t log^2 t)".into(), o.size as f64 / (inf * tt * lt * lt)),
        ]
    })?;
    let (nm, nm_report) = frege_to_nm(&fd, gamma, phi)?;
    if !nm.is_tree() || !fd.is_tree() {
        return Err(TransformError::OutputRejected("output is not tree-like".into()));
    }
    report.notes.push(format!("natural deduction leg: {}", nm_report.output));
    Ok(((fd, nm), report))
}
