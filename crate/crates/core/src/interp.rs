//! Π-closure, its monotone circuit, the Kleene-style slash, and extraction of
//! disjuncts and monotone interpolants from natural deduction proofs.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};

use thiserror::Error;

use crate::circuits::{CircuitBuilder, Gate, InterpolationShape, MonotoneCircuit, ShapeError, Signal};
use crate::dag::Interner;
use crate::formula::{Formula, Shape};
use crate::natded::{assumptions, check_nm, NmDerivation, Violation};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum InterpError {
    #[error("malformed derivation: {0}")]
    Malformed(#[from] Violation),
    #[error("target {0} is not in the formula list")]
    NotInList(Formula),
    #[error("formula {0} occurs twice in the formula list")]
    Duplicate(Formula),
    #[error("circuit would need {0} wires, above the limit {1}")]
    TooLarge(usize, usize),
    #[error("root label does not have the expected shape: {0}")]
    ShapeMismatch(String),
    #[error("`{0}` occurs in a disjunct")]
    VariableOccurs(String),
    #[error("invalid shape: {0}")]
    Shape(#[from] ShapeError),
    #[error("proof rejected: {0}")]
    Rejected(String),
    #[error("neither disjunct is in the closure")]
    NeitherDisjunct,
}

/// Horn rules `A_v ⇒ γ_v` of a derivation, deduplicated, with trivial rules
/// (`γ_v ∈ A_v`) dropped.
#[derive(Debug)]
pub struct ClosureRules {
    pub formulas: Interner,
    pub rules: Vec<(usize, Vec<usize>)>,
    /// Number of vertices and total `Σ|A_v|` of the underlying derivation.
    pub lines: usize,
    pub assumption_total: usize,
}

impl ClosureRules {
    pub fn of(d: &NmDerivation) -> Result<ClosureRules, Violation> {
        let map = assumptions(d)?;
        let mut formulas = Interner::new();
        for f in map.interner().items() {
            formulas.intern(f);
        }
        let mut seen = HashSet::new();
        let mut rules = Vec::new();
        let mut assumption_total = 0;
        for v in 0..d.len() {
            let g = formulas.intern(d.dag().label(v));
            let a: Vec<usize> = map
                .ids(v)
                .iter()
                .map(|&i| formulas.intern(map.interner().formula(i)))
                .collect();
            assumption_total += a.len();
            if a.contains(&g) {
                continue;
            }
            let mut key = a.clone();
            key.sort_unstable();
            if seen.insert((g, key.clone())) {
                rules.push((g, key));
            }
        }
        Ok(ClosureRules {
            formulas,
            rules,
            lines: d.len(),
            assumption_total,
        })
    }

    /// Distinct labels of the derivation (including open assumptions).
    pub fn label_count(&self) -> usize {
        self.formulas.len()
    }
}

/// Stages `P_0 ⊆ P_1 ⊆ …`; `added[j]` lists the formulas new at stage `j`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClosureTrace {
    added: Vec<Vec<Formula>>,
}

impl ClosureTrace {
    /// Index of the last stage; every later stage equals it.
    pub fn fixpoint(&self) -> usize {
        self.added.len() - 1
    }

    pub fn added(&self, j: usize) -> &[Formula] {
        self.added.get(j).map_or(&[], |v| v.as_slice())
    }

    pub fn stage(&self, j: usize) -> BTreeSet<Formula> {
        self.added.iter().take(j + 1).flatten().cloned().collect()
    }

    pub fn final_set(&self) -> HashSet<Formula> {
        self.added.iter().flatten().cloned().collect()
    }

    pub fn contains(&self, f: &Formula) -> bool {
        self.added.iter().any(|s| s.contains(f))
    }
}

/// Worklist closure recording the stage at which each formula appears.
pub fn closure(d: &NmDerivation, p: &HashSet<Formula>) -> Result<ClosureTrace, InterpError> {
    let rules = ClosureRules::of(d)?;
    Ok(closure_with(&rules, p))
}

pub fn closure_with(rules: &ClosureRules, p: &HashSet<Formula>) -> ClosureTrace {
    let nf = rules.formulas.len();
    let mut missing: Vec<usize> = rules.rules.iter().map(|(_, a)| a.len()).collect();
    let mut users: Vec<Vec<usize>> = vec![Vec::new(); nf];
    for (r, (_, a)) in rules.rules.iter().enumerate() {
        for &x in a {
            users[x].push(r);
        }
    }
    let mut have = vec![false; nf];
    let mut stage0: Vec<Formula> = p.iter().cloned().collect();
    stage0.sort();
    let mut frontier = Vec::new();
    for f in &stage0 {
        if let Some(i) = rules.formulas.get(f) {
            have[i] = true;
            frontier.push(i);
        }
    }
    // rules with no assumptions fire into stage 1
    let mut ready: Vec<usize> = (0..rules.rules.len()).filter(|&r| missing[r] == 0).collect();
    let mut added = vec![stage0];
    loop {
        for &i in &frontier {
            for &r in &users[i] {
                missing[r] -= 1;
                if missing[r] == 0 {
                    ready.push(r);
                }
            }
        }
        let mut next = Vec::new();
        for r in ready.drain(..) {
            let g = rules.rules[r].0;
            if !have[g] {
                have[g] = true;
                next.push(g);
            }
        }
        if next.is_empty() {
            break;
        }
        let mut fs: Vec<Formula> = next.iter().map(|&i| rules.formulas.formula(i).clone()).collect();
        fs.sort();
        added.push(fs);
        frontier = next;
    }
    ClosureTrace { added }
}

/// Literal iteration: `t` rounds of `P_{i+1} = P_i ∪ {γ_v : A_v ⊆ P_i}`.
pub fn closure_literal(d: &NmDerivation, p: &BTreeSet<Formula>) -> Result<Vec<BTreeSet<Formula>>, InterpError> {
    let map = assumptions(d)?;
    let mut stages = vec![p.clone()];
    for _ in 0..d.len() {
        let cur = stages.last().expect("nonempty");
        let mut next = cur.clone();
        for v in 0..d.len() {
            if map.set(v).iter().all(|f| cur.contains(f)) {
                next.insert(d.dag().label(v).clone());
            }
        }
        stages.push(next);
    }
    Ok(stages)
}

/// Default limit on the size of an unfolded closure circuit.
pub const MAX_RAW_WIRES: usize = 20_000_000;

/// A closure circuit over inputs `x0, x1, …` (one per listed formula).
#[derive(Clone, Debug)]
pub struct ClosureCircuit {
    pub circuit: MonotoneCircuit,
    pub inputs: Vec<(String, Formula)>,
    /// Wires before pruning.
    pub raw_wires: usize,
    pub stages: usize,
}

pub fn input_name(i: usize) -> String {
    format!("x{i}")
}

/// Builds the stage-by-stage circuit deciding `φ ∈ cls(P)` for `P` given by
/// the inputs.
pub fn closure_circuit(d: &NmDerivation, f: &[Formula], phi: &Formula) -> Result<ClosureCircuit, InterpError> {
    let mut index = HashMap::new();
    for (i, g) in f.iter().enumerate() {
        if index.insert(g.clone(), i).is_some() {
            return Err(InterpError::Duplicate(g.clone()));
        }
    }
    let target = *index.get(phi).ok_or_else(|| InterpError::NotInList(phi.clone()))?;
    let inputs: Vec<(String, Formula)> = f.iter().enumerate().map(|(i, g)| (input_name(i), g.clone())).collect();
    let map = assumptions(d)?;
    let labels: HashSet<&Formula> = d.dag().labels().iter().collect();
    if !labels.contains(phi) {
        return Ok(ClosureCircuit {
            circuit: MonotoneCircuit::variable(&input_name(target)),
            inputs,
            raw_wires: 0,
            stages: 0,
        });
    }
    let t = d.len();
    let n = f.len();
    let mut avs: Vec<Vec<usize>> = Vec::with_capacity(t);
    let mut by_gamma: Vec<Vec<usize>> = vec![Vec::new(); n];
    for v in 0..t {
        let a = map
            .set(v)
            .iter()
            .map(|g| index.get(g).copied().ok_or_else(|| InterpError::NotInList(g.clone())))
            .collect::<Result<Vec<_>, _>>()?;
        let g = *index
            .get(d.dag().label(v))
            .ok_or_else(|| InterpError::NotInList(d.dag().label(v).clone()))?;
        by_gamma[g].push(v);
        avs.push(a);
    }
    let sum_a: usize = avs.iter().map(Vec::len).sum();
    let raw = t * (n + t + sum_a);
    if raw > MAX_RAW_WIRES {
        return Err(InterpError::TooLarge(raw, MAX_RAW_WIRES));
    }
    let mut gates: Vec<Gate> = (0..n).map(|i| Gate::Var(input_name(i))).collect();
    let mut y: Vec<usize> = (0..n).collect();
    for _ in 0..t {
        let z: Vec<usize> = avs
            .iter()
            .map(|a| {
                gates.push(Gate::And(a.iter().map(|&i| y[i]).collect()));
                gates.len() - 1
            })
            .collect();
        y = (0..n)
            .map(|i| {
                let mut ins = vec![y[i]];
                ins.extend(by_gamma[i].iter().map(|&v| z[v]));
                gates.push(Gate::Or(ins));
                gates.len() - 1
            })
            .collect();
    }
    let circuit = MonotoneCircuit::from_gates(gates, y[target]);
    debug_assert_eq!(circuit.size(), raw);
    Ok(ClosureCircuit {
        circuit: circuit.pruned(),
        inputs,
        raw_wires: raw,
        stages: t,
    })
}

/// A `P`-slash: `base` gives the value on variables not listed in `overrides`.
#[derive(Clone, Debug)]
pub struct SlashContext {
    pub p: HashSet<Formula>,
    pub default: bool,
    pub overrides: BTreeMap<String, bool>,
}

impl SlashContext {
    /// True on every variable except `u`.
    pub fn new(p: HashSet<Formula>, u: &str) -> SlashContext {
        SlashContext {
            p,
            default: true,
            overrides: [(u.to_string(), false)].into(),
        }
    }

    pub fn base(&self, v: &str) -> bool {
        self.overrides.get(v).copied().unwrap_or(self.default)
    }

    /// `‖φ`
    pub fn strong(&self, phi: &Formula) -> bool {
        self.p.contains(phi) && slash(self, phi)
    }
}

pub fn slash(ctx: &SlashContext, phi: &Formula) -> bool {
    match phi.shape() {
        Shape::Var(v) => ctx.base(v),
        Shape::Imp(a, b) => !ctx.strong(a) || slash(ctx, b),
    }
}

fn split_disjunction(root: &Formula, u: &Formula) -> Option<(Formula, Formula)> {
    let (l0, rest) = root.as_imp()?;
    let (l1, head) = rest.as_imp()?;
    let (a0, u0) = l0.as_imp()?;
    let (a1, u1) = l1.as_imp()?;
    (head == u && u0 == u && u1 == u).then(|| (a0.clone(), a1.clone()))
}

/// For a proof of `(α₀ → u) → (α₁ → u) → u`, the smallest `i` with `α_i` in
/// the closure of `{α₀ → u, α₁ → u}`.
pub fn extract_disjunct(d: &NmDerivation, u: &str) -> Result<usize, InterpError> {
    let uf = Formula::var(u);
    let root = d.root_label().clone();
    let (a0, a1) = split_disjunction(&root, &uf)
        .ok_or_else(|| InterpError::ShapeMismatch(root.to_string()))?;
    if a0.contains_var(u) || a1.contains_var(u) {
        return Err(InterpError::VariableOccurs(u.to_string()));
    }
    let report = check_nm(d, &HashSet::new(), &root);
    if !report.accepted() {
        return Err(InterpError::Rejected(report.to_string()));
    }
    let p: HashSet<Formula> = [Formula::imp(a0.clone(), uf.clone()), Formula::imp(a1.clone(), uf)].into();
    let trace = closure(d, &p)?;
    if trace.contains(&a0) {
        Ok(0)
    } else if trace.contains(&a1) {
        Ok(1)
    } else {
        Err(InterpError::NeitherDisjunct)
    }
}

/// The fixed part `P` of the interpolation closure.
pub fn interpolation_base(shape: &InterpolationShape) -> Vec<Formula> {
    let u = Formula::var(&shape.u);
    let mut out = vec![
        Formula::imp(shape.alpha.clone(), u.clone()),
        Formula::imp(shape.beta.clone(), u.clone()),
    ];
    for (p, pp) in shape.p.iter().zip(&shape.pp) {
        out.push(Formula::imp(
            Formula::imp(Formula::var(p), u.clone()),
            Formula::imp(Formula::imp(Formula::var(pp), u.clone()), u.clone()),
        ));
    }
    out
}

/// Extracted interpolant with its size certificate.
#[derive(Clone, Debug)]
pub struct Interpolant {
    pub circuit: MonotoneCircuit,
    /// Wire count of the unfolded stage-by-stage circuit.
    pub raw_wires: usize,
    pub folded_wires: usize,
    pub lines: usize,
    pub stages: usize,
}

fn check_shape(d: &NmDerivation, shape: &InterpolationShape) -> Result<(), InterpError> {
    shape.validate()?;
    let target = shape.target();
    if d.root_label() != &target {
        return Err(InterpError::ShapeMismatch(format!(
            "root {} differs from the interpolation target",
            d.root_label()
        )));
    }
    let report = check_nm(d, &HashSet::new(), &target);
    if !report.accepted() {
        return Err(InterpError::Rejected(report.to_string()));
    }
    Ok(())
}

/// Monotone circuit over the `p` variables deciding
/// `α ∈ cls(P ∪ {p_i : a(p_i) = 1} ∪ p')`.
pub fn extract_interpolant(d: &NmDerivation, shape: &InterpolationShape) -> Result<Interpolant, InterpError> {
    check_shape(d, shape)?;
    let rules = ClosureRules::of(d)?;
    let mut formulas = Interner::new();
    for f in rules.formulas.items() {
        formulas.intern(f);
    }
    let base = interpolation_base(shape);
    let mut b = CircuitBuilder::new();
    let mut inputs: HashMap<usize, Signal> = HashMap::new();
    for f in &base {
        inputs.insert(formulas.intern(f), Signal::Const(true));
    }
    for pp in &shape.pp {
        inputs.insert(formulas.intern(&Formula::var(pp)), Signal::Const(true));
    }
    for p in &shape.p {
        let i = formulas.intern(&Formula::var(p));
        let s = Signal::Node(b.var(p.clone()));
        inputs.insert(i, s);
    }
    let target = formulas.intern(&shape.alpha);
    let nf = formulas.len();
    let x: Vec<Signal> = (0..nf)
        .map(|i| inputs.get(&i).copied().unwrap_or(Signal::Const(false)))
        .collect();
    let mut by_gamma: Vec<Vec<usize>> = vec![Vec::new(); nf];
    for (r, (g, _)) in rules.rules.iter().enumerate() {
        by_gamma[*g].push(r);
    }
    let t = rules.lines;
    // the closure gains a formula at every non-final stage
    let cap = t.min(rules.label_count() + 1);
    let mut y = x.clone();
    let mut stages = 0;
    while stages < cap {
        let z: Vec<Signal> = rules
            .rules
            .iter()
            .map(|(_, a)| {
                let ins: Vec<Signal> = a.iter().map(|&i| y[i]).collect();
                b.and_signals(ins)
            })
            .collect();
        let next: Vec<Signal> = (0..nf)
            .map(|i| {
                let ins: Vec<Signal> = std::iter::once(x[i])
                    .chain(by_gamma[i].iter().map(|&r| z[r]))
                    .collect();
                b.or_signals(ins)
            })
            .collect();
        stages += 1;
        if next == y {
            break;
        }
        y = next;
    }
    let circuit = b.finish_signal(y[target]);
    let n = nf;
    Ok(Interpolant {
        folded_wires: circuit.size(),
        circuit,
        raw_wires: t * (n + t + rules.assumption_total),
        lines: t,
        stages,
    })
}

/// Checks `α ∈ P_{I,[n]}` or `β ∈ P_{[n],[n]∖I}` for every `I ⊆ [n]`.
pub fn check_split_property(d: &NmDerivation, shape: &InterpolationShape) -> Result<bool, InterpError> {
    check_shape(d, shape)?;
    let rules = ClosureRules::of(d)?;
    let base: HashSet<Formula> = interpolation_base(shape).into_iter().collect();
    let n = shape.p.len();
    for mask in 0u64..(1u64 << n) {
        let pick = |names: &[String], want: bool| -> Vec<Formula> {
            names
                .iter()
                .enumerate()
                .filter(|(i, _)| (mask >> i & 1 == 1) == want)
                .map(|(_, v)| Formula::var(v))
                .collect()
        };
        let mut left = base.clone();
        left.extend(pick(&shape.p, true));
        left.extend(shape.pp.iter().map(Formula::var));
        let mut right = base.clone();
        right.extend(shape.p.iter().map(Formula::var));
        right.extend(pick(&shape.pp, false));
        if !closure_with(&rules, &left).contains(&shape.alpha)
            && !closure_with(&rules, &right).contains(&shape.beta)
        {
            return Ok(false);
        }
    }
    Ok(true)
}
