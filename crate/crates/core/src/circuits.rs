//! Monotone Boolean circuits, the Clique–Colouring pair, and brute-force
//! separation and interpolation checks.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt::Write as _;

use thiserror::Error;

use crate::formula::Formula;
use crate::semantics::{classical_eval, Assignment};

/// A gate; `And([])` is the constant 1 and `Or([])` the constant 0.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Gate {
    Var(String),
    And(Vec<usize>),
    Or(Vec<usize>),
}

impl Gate {
    pub fn inputs(&self) -> &[usize] {
        match self {
            Gate::Var(_) => &[],
            Gate::And(xs) | Gate::Or(xs) => xs,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CircuitError {
    #[error("variable `{0}` is not assigned")]
    Unbound(String),
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    #[error("unknown gate `{0}`")]
    UnknownGate(String),
    #[error("duplicate gate `{0}`")]
    DuplicateGate(String),
    #[error("cycle through gate `{0}`")]
    Cycle(String),
    #[error("missing root declaration")]
    MissingRoot,
    #[error("stray variable `{0}`")]
    StrayVariable(String),
    #[error("{0} variables exceed the brute-force budget of {1} bits")]
    Budget(usize, usize),
    #[error("n = {0} is outside the supported range {1}")]
    BadN(usize, String),
}

/// A monotone circuit stored in topological order (inputs before gates).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MonotoneCircuit {
    gates: Vec<Gate>,
    root: usize,
}

/// Output of a gate under construction, or a folded constant.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Signal {
    Const(bool),
    Node(usize),
}

/// Hash-consing builder; gates are appended in topological order.
#[derive(Default, Debug, Clone)]
pub struct CircuitBuilder {
    gates: Vec<Gate>,
    seen: HashMap<Gate, usize>,
}

impl CircuitBuilder {
    pub fn new() -> CircuitBuilder {
        CircuitBuilder::default()
    }

    pub fn add(&mut self, g: Gate) -> usize {
        if let Some(&i) = self.seen.get(&g) {
            return i;
        }
        let i = self.gates.len();
        self.gates.push(g.clone());
        self.seen.insert(g, i);
        i
    }

    pub fn var(&mut self, name: impl Into<String>) -> usize {
        self.add(Gate::Var(name.into()))
    }

    pub fn and(&mut self, inputs: Vec<usize>) -> usize {
        self.add(Gate::And(inputs))
    }

    pub fn or(&mut self, inputs: Vec<usize>) -> usize {
        self.add(Gate::Or(inputs))
    }

    pub fn constant(&mut self, value: bool) -> usize {
        if value {
            self.and(vec![])
        } else {
            self.or(vec![])
        }
    }

    pub fn len(&self) -> usize {
        self.gates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }

    fn fold(&mut self, is_and: bool, inputs: impl IntoIterator<Item = Signal>) -> Signal {
        let mut ins = Vec::new();
        for s in inputs {
            match s {
                Signal::Const(c) if c == is_and => {}
                Signal::Const(c) => return Signal::Const(c),
                Signal::Node(i) => ins.push(i),
            }
        }
        ins.sort_unstable();
        ins.dedup();
        match ins.len() {
            0 => Signal::Const(is_and),
            1 => Signal::Node(ins[0]),
            _ if is_and => Signal::Node(self.and(ins)),
            _ => Signal::Node(self.or(ins)),
        }
    }

    /// Conjunction with constant folding and sorted, deduplicated inputs.
    pub fn and_signals(&mut self, inputs: impl IntoIterator<Item = Signal>) -> Signal {
        self.fold(true, inputs)
    }

    pub fn or_signals(&mut self, inputs: impl IntoIterator<Item = Signal>) -> Signal {
        self.fold(false, inputs)
    }

    pub fn finish_signal(mut self, s: Signal) -> MonotoneCircuit {
        let root = match s {
            Signal::Node(i) => i,
            Signal::Const(c) => self.constant(c),
        };
        self.finish(root)
    }

    /// Finishes with `root`, dropping gates the root does not depend on.
    pub fn finish(self, root: usize) -> MonotoneCircuit {
        MonotoneCircuit {
            gates: self.gates,
            root,
        }
        .pruned()
    }
}

impl MonotoneCircuit {
    /// Wraps gates already in topological order; nothing is pruned.
    pub fn from_gates(gates: Vec<Gate>, root: usize) -> MonotoneCircuit {
        debug_assert!(gates
            .iter()
            .enumerate()
            .all(|(i, g)| g.inputs().iter().all(|&u| u < i)));
        MonotoneCircuit { gates, root }
    }

    pub fn constant(value: bool) -> MonotoneCircuit {
        let mut b = CircuitBuilder::new();
        let r = b.constant(value);
        b.finish(r)
    }

    pub fn variable(name: &str) -> MonotoneCircuit {
        let mut b = CircuitBuilder::new();
        let r = b.var(name);
        b.finish(r)
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn root(&self) -> usize {
        self.root
    }

    pub fn gate_count(&self) -> usize {
        self.gates.len()
    }

    /// Total number of wires.
    pub fn size(&self) -> usize {
        self.gates.iter().map(|g| g.inputs().len()).sum()
    }

    pub fn max_fanin(&self) -> usize {
        self.gates.iter().map(|g| g.inputs().len()).max().unwrap_or(0)
    }

    pub fn vars(&self) -> BTreeSet<String> {
        self.gates
            .iter()
            .filter_map(|g| match g {
                Gate::Var(v) => Some(v.clone()),
                _ => None,
            })
            .collect()
    }

    /// Keeps only gates reachable backwards from the root, in order.
    pub fn pruned(self) -> MonotoneCircuit {
        let mut live = vec![false; self.gates.len()];
        live[self.root] = true;
        for i in (0..self.gates.len()).rev() {
            if live[i] {
                for &u in self.gates[i].inputs() {
                    live[u] = true;
                }
            }
        }
        let mut map = vec![usize::MAX; self.gates.len()];
        let mut gates = Vec::new();
        for (i, g) in self.gates.into_iter().enumerate() {
            if !live[i] {
                continue;
            }
            map[i] = gates.len();
            gates.push(match g {
                Gate::Var(v) => Gate::Var(v),
                Gate::And(xs) => Gate::And(xs.into_iter().map(|u| map[u]).collect()),
                Gate::Or(xs) => Gate::Or(xs.into_iter().map(|u| map[u]).collect()),
            });
        }
        MonotoneCircuit {
            gates,
            root: map[self.root],
        }
    }

    /// Evaluates with a variable lookup.
    pub fn eval_with(&self, mut val: impl FnMut(&str) -> Option<bool>) -> Result<bool, CircuitError> {
        let mut out = vec![false; self.gates.len()];
        for (i, g) in self.gates.iter().enumerate() {
            out[i] = match g {
                Gate::Var(v) => val(v).ok_or_else(|| CircuitError::Unbound(v.clone()))?,
                Gate::And(xs) => xs.iter().all(|&u| out[u]),
                Gate::Or(xs) => xs.iter().any(|&u| out[u]),
            };
        }
        Ok(out[self.root])
    }

    pub fn eval(&self, a: &Assignment) -> Result<bool, CircuitError> {
        self.eval_with(|v| a.get(v).copied())
    }

    /// Replaces variables: fixed ones by constants, renamed ones by other
    /// variables; then folds constants away.
    pub fn substitute(
        &self,
        fixed: &BTreeMap<String, bool>,
        rename: &BTreeMap<String, String>,
    ) -> MonotoneCircuit {
        let mut b = CircuitBuilder::new();
        let mut node: Vec<Signal> = Vec::with_capacity(self.gates.len());
        for g in &self.gates {
            let s = match g {
                Gate::Var(v) => match fixed.get(v) {
                    Some(&c) => Signal::Const(c),
                    None => Signal::Node(b.var(rename.get(v).cloned().unwrap_or_else(|| v.clone()))),
                },
                Gate::And(xs) => b.and_signals(xs.iter().map(|&u| node[u])),
                Gate::Or(xs) => b.or_signals(xs.iter().map(|&u| node[u])),
            };
            node.push(s);
        }
        b.finish_signal(node[self.root])
    }

    /// Constant folding only.
    pub fn folded(&self) -> MonotoneCircuit {
        self.substitute(&BTreeMap::new(), &BTreeMap::new())
    }

    /// Canonical text: gates `gK = ...` in storage order, then `root gK`.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (i, g) in self.gates.iter().enumerate() {
            let list = |xs: &[usize]| {
                xs.iter().map(|u| format!("g{u}")).collect::<Vec<_>>().join(",")
            };
            let _ = match g {
                Gate::Var(v) => writeln!(out, "g{i} = VAR {v}"),
                Gate::And(xs) => writeln!(out, "g{i} = AND {}", list(xs)).map(|_| ()),
                Gate::Or(xs) => writeln!(out, "g{i} = OR {}", list(xs)).map(|_| ()),
            };
        }
        let _ = writeln!(out, "root g{}", self.root);
        // trailing spaces of empty gate lists are not part of the format
        out.lines().map(|l| l.trim_end().to_string() + "\n").collect()
    }

    pub fn from_text(text: &str) -> Result<MonotoneCircuit, CircuitError> {
        let mut defs: Vec<(String, String, Vec<String>)> = Vec::new();
        let mut root = None;
        for (ln, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let syntax = |msg: &str| CircuitError::Syntax {
                line: ln + 1,
                msg: msg.to_string(),
            };
            if let Some(r) = line.strip_prefix("root ") {
                root = Some(r.trim().to_string());
                continue;
            }
            let (id, rhs) = line.split_once('=').ok_or_else(|| syntax("expected `id = ...`"))?;
            let rhs = rhs.trim();
            let (kind, rest) = match rhs.split_once(char::is_whitespace) {
                Some((k, r)) => (k, r.trim()),
                None => (rhs, ""),
            };
            let args: Vec<String> = if kind == "VAR" {
                if rest.is_empty() || rest.contains(char::is_whitespace) {
                    return Err(syntax("VAR expects one name"));
                }
                vec![rest.to_string()]
            } else {
                rest.split(',')
                    .map(|s| s.trim().to_string())
                    .filter(|s| !s.is_empty())
                    .collect()
            };
            if !matches!(kind, "VAR" | "AND" | "OR") {
                return Err(syntax("gate kind must be VAR, AND or OR"));
            }
            defs.push((id.trim().to_string(), kind.to_string(), args));
        }
        let root = root.ok_or(CircuitError::MissingRoot)?;
        let mut index = HashMap::new();
        for (i, (id, _, _)) in defs.iter().enumerate() {
            if index.insert(id.clone(), i).is_some() {
                return Err(CircuitError::DuplicateGate(id.clone()));
            }
        }
        // depth-first topological placement
        let mut placed: Vec<Option<usize>> = vec![None; defs.len()];
        let mut gates: Vec<Gate> = Vec::new();
        let mut on_stack = vec![false; defs.len()];
        fn place(
            i: usize,
            defs: &[(String, String, Vec<String>)],
            index: &HashMap<String, usize>,
            placed: &mut Vec<Option<usize>>,
            on_stack: &mut Vec<bool>,
            gates: &mut Vec<Gate>,
        ) -> Result<usize, CircuitError> {
            if let Some(p) = placed[i] {
                return Ok(p);
            }
            if on_stack[i] {
                return Err(CircuitError::Cycle(defs[i].0.clone()));
            }
            on_stack[i] = true;
            let (_, kind, args) = &defs[i];
            let g = if kind == "VAR" {
                Gate::Var(args[0].clone())
            } else {
                let mut ins = Vec::new();
                for a in args {
                    let j = *index
                        .get(a)
                        .ok_or_else(|| CircuitError::UnknownGate(a.clone()))?;
                    ins.push(place(j, defs, index, placed, on_stack, gates)?);
                }
                if kind == "AND" {
                    Gate::And(ins)
                } else {
                    Gate::Or(ins)
                }
            };
            on_stack[i] = false;
            gates.push(g);
            placed[i] = Some(gates.len() - 1);
            Ok(gates.len() - 1)
        }
        for i in 0..defs.len() {
            place(i, &defs, &index, &mut placed, &mut on_stack, &mut gates)?;
        }
        let r = *index.get(&root).ok_or(CircuitError::UnknownGate(root))?;
        Ok(MonotoneCircuit {
            gates,
            root: placed[r].expect("placed"),
        })
    }
}

pub fn eval_circuit(c: &MonotoneCircuit, a: &Assignment) -> Result<bool, CircuitError> {
    c.eval(a)
}

/// Splits every gate of fan-in `d > 2` into `d - 1` binary gates.
pub fn to_bounded_fanin(c: &MonotoneCircuit) -> MonotoneCircuit {
    let mut gates: Vec<Gate> = Vec::new();
    let mut map = vec![0usize; c.gates.len()];
    for (i, g) in c.gates.iter().enumerate() {
        let ins: Vec<usize> = g.inputs().iter().map(|&u| map[u]).collect();
        let is_and = matches!(g, Gate::And(_));
        map[i] = match g {
            Gate::Var(v) => {
                gates.push(Gate::Var(v.clone()));
                gates.len() - 1
            }
            _ if ins.len() <= 2 => {
                gates.push(if is_and { Gate::And(ins) } else { Gate::Or(ins) });
                gates.len() - 1
            }
            _ => {
                let mut acc = ins[0];
                for &x in &ins[1..] {
                    let pair = vec![acc, x];
                    gates.push(if is_and { Gate::And(pair) } else { Gate::Or(pair) });
                    acc = gates.len() - 1;
                }
                acc
            }
        };
    }
    MonotoneCircuit {
        gates,
        root: map[c.root],
    }
}

pub fn cc_k(n: usize) -> usize {
    let mut k = 0;
    while (k + 1) * (k + 1) <= n {
        k += 1;
    }
    k
}

/// Canonical name of the edge variable for `{i, j}`.
pub fn edge_var(i: usize, j: usize) -> String {
    let (a, b) = if i < j { (i, j) } else { (j, i) };
    format!("e_{a}_{b}")
}

pub fn edge_vars(n: usize) -> Vec<String> {
    let mut out = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            out.push(edge_var(i, j));
        }
    }
    out
}

pub const DEFAULT_CC_BOUND: usize = 8;

/// The Clique–Colouring pair for a given `n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CliqueColouringPair {
    pub n: usize,
    pub k: usize,
}

impl CliqueColouringPair {
    pub fn new(n: usize) -> Result<CliqueColouringPair, CircuitError> {
        if n < 2 {
            return Err(CircuitError::BadN(n, "n >= 2".into()));
        }
        Ok(CliqueColouringPair { n, k: cc_k(n) })
    }

    pub fn vars(&self) -> Vec<String> {
        edge_vars(self.n)
    }
}

fn adjacency(n: usize, edges: &BTreeSet<(usize, usize)>) -> Vec<Vec<bool>> {
    let mut adj = vec![vec![false; n]; n];
    for &(i, j) in edges {
        if i != j && i < n && j < n {
            adj[i][j] = true;
            adj[j][i] = true;
        }
    }
    adj
}

fn colourable(adj: &[Vec<bool>], k: usize) -> bool {
    fn go(v: usize, adj: &[Vec<bool>], k: usize, col: &mut Vec<usize>) -> bool {
        if v == adj.len() {
            return true;
        }
        // symmetry: vertex v may use at most one colour beyond those seen
        let used = col.iter().copied().max().map_or(0, |m| m + 1);
        for c in 0..k.min(used + 1) {
            if (0..v).all(|u| !(adj[v][u] && col[u] == c)) {
                col.push(c);
                if go(v + 1, adj, k, col) {
                    return true;
                }
                col.pop();
            }
        }
        false
    }
    go(0, adj, k, &mut Vec::new())
}

fn has_clique(adj: &[Vec<bool>], size: usize) -> bool {
    fn go(start: usize, adj: &[Vec<bool>], need: usize, chosen: &mut Vec<usize>) -> bool {
        if chosen.len() == need {
            return true;
        }
        for v in start..adj.len() {
            if chosen.iter().all(|&u| adj[u][v]) {
                chosen.push(v);
                if go(v + 1, adj, need, chosen) {
                    return true;
                }
                chosen.pop();
            }
        }
        false
    }
    go(0, adj, size, &mut Vec::new())
}

/// Side 0: `k`-colourable; side 1: contains a `(k+1)`-clique.
pub fn cc_membership(
    n: usize,
    edges: &BTreeSet<(usize, usize)>,
    side: u8,
) -> Result<bool, CircuitError> {
    cc_membership_bounded(n, edges, side, DEFAULT_CC_BOUND)
}

pub fn cc_membership_bounded(
    n: usize,
    edges: &BTreeSet<(usize, usize)>,
    side: u8,
    bound: usize,
) -> Result<bool, CircuitError> {
    if n < 2 || n > bound {
        return Err(CircuitError::BadN(n, format!("2..={bound}")));
    }
    let adj = adjacency(n, edges);
    let k = cc_k(n);
    Ok(match side {
        0 => colourable(&adj, k),
        _ => has_clique(&adj, k + 1),
    })
}

/// Outcome of an exhaustive check; `failure` holds the first bad input.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CheckOutcome {
    pub checked: u64,
    pub failure: Option<String>,
}

impl CheckOutcome {
    pub fn passed(&self) -> bool {
        self.failure.is_none()
    }
}

pub const DEFAULT_BUDGET_BITS: usize = 24;

/// Exhaustively checks that `c` is 0 on colourable graphs and 1 on graphs
/// with a `(k+1)`-clique.
pub fn check_separates(c: &MonotoneCircuit, n: usize) -> Result<CheckOutcome, CircuitError> {
    let pair = CliqueColouringPair::new(n)?;
    let vars = pair.vars();
    if vars.len() > DEFAULT_BUDGET_BITS {
        return Err(CircuitError::Budget(vars.len(), DEFAULT_BUDGET_BITS));
    }
    if let Some(v) = c.vars().into_iter().find(|v| !vars.contains(v)) {
        return Err(CircuitError::StrayVariable(v));
    }
    let pairs: Vec<(usize, usize)> = (0..n)
        .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
        .collect();
    let mut checked = 0;
    for mask in 0u64..(1u64 << pairs.len()) {
        let edges: BTreeSet<(usize, usize)> = pairs
            .iter()
            .enumerate()
            .filter(|(b, _)| mask >> b & 1 == 1)
            .map(|(_, &e)| e)
            .collect();
        let a: Assignment = pairs
            .iter()
            .enumerate()
            .map(|(b, &(i, j))| (edge_var(i, j), mask >> b & 1 == 1))
            .collect();
        let out = c.eval(&a)?;
        let adj = adjacency(n, &edges);
        checked += 1;
        if colourable(&adj, pair.k) && out {
            return Ok(CheckOutcome {
                checked,
                failure: Some(format!("colourable graph {edges:?} evaluates to 1")),
            });
        }
        if has_clique(&adj, pair.k + 1) && !out {
            return Ok(CheckOutcome {
                checked,
                failure: Some(format!("graph with a clique {edges:?} evaluates to 0")),
            });
        }
    }
    Ok(CheckOutcome { checked, failure: None })
}

/// Variables of an interpolation instance: `alpha` over `p ∪ q`, `beta` over
/// `p' ∪ r`, where `alpha_private`/`beta_private` list side variables kept
/// apart from `q`/`r` (e.g. `v`, `w`).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InterpolationShape {
    pub n: usize,
    pub p: Vec<String>,
    pub pp: Vec<String>,
    pub q: Vec<String>,
    pub r: Vec<String>,
    pub alpha_private: Vec<String>,
    pub beta_private: Vec<String>,
    pub u: String,
    pub alpha: Formula,
    pub beta: Formula,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ShapeError {
    #[error("variable lists overlap on `{0}`")]
    Overlap(String),
    #[error("`{0}` occurs outside its allowed variables")]
    Stray(String),
    #[error("p and p' have different lengths")]
    Length,
    #[error("root label does not match the interpolation target")]
    Mismatch,
}

impl InterpolationShape {
    pub fn validate(&self) -> Result<(), ShapeError> {
        if self.p.len() != self.pp.len() || self.p.len() != self.n {
            return Err(ShapeError::Length);
        }
        let mut seen = BTreeSet::new();
        let all = self
            .p
            .iter()
            .chain(&self.pp)
            .chain(&self.q)
            .chain(&self.r)
            .chain(&self.alpha_private)
            .chain(&self.beta_private)
            .chain(std::iter::once(&self.u));
        for v in all {
            if !seen.insert(v.clone()) {
                return Err(ShapeError::Overlap(v.clone()));
            }
        }
        let a_ok: BTreeSet<&String> = self.p.iter().chain(&self.q).chain(&self.alpha_private).collect();
        if let Some(v) = self.alpha.vars().iter().find(|v| !a_ok.contains(v)) {
            return Err(ShapeError::Stray(v.clone()));
        }
        let b_ok: BTreeSet<&String> = self.pp.iter().chain(&self.r).chain(&self.beta_private).collect();
        if let Some(v) = self.beta.vars().iter().find(|v| !b_ok.contains(v)) {
            return Err(ShapeError::Stray(v.clone()));
        }
        Ok(())
    }

    /// `⟨(p_i → u) → (p'_i → u) → u⟩_i → (α → u) → (β → u) → u`
    pub fn target(&self) -> Formula {
        let u = Formula::var(&self.u);
        let tail = Formula::imp(
            Formula::imp(self.alpha.clone(), u.clone()),
            Formula::imp(Formula::imp(self.beta.clone(), u.clone()), u.clone()),
        );
        let blocks = self.p.iter().zip(&self.pp).map(|(p, pp)| {
            Formula::imp(
                Formula::imp(Formula::var(p), u.clone()),
                Formula::imp(Formula::imp(Formula::var(pp), u.clone()), u.clone()),
            )
        });
        crate::formula::FormulaSeq::from_formulas(blocks).fold_imp(&tail)
    }

    pub fn alpha_side_vars(&self) -> Vec<String> {
        self.q.iter().chain(&self.alpha_private).cloned().collect()
    }

    pub fn beta_side_vars(&self) -> Vec<String> {
        self.r.iter().chain(&self.beta_private).cloned().collect()
    }
}

/// Which half of the interpolation condition failed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InterpolationReport {
    pub alpha_side: CheckOutcome,
    pub beta_side: CheckOutcome,
}

impl InterpolationReport {
    pub fn passed(&self) -> bool {
        self.alpha_side.passed() && self.beta_side.passed()
    }
}

fn assignments(vars: &[String]) -> impl Iterator<Item = Assignment> + '_ {
    (0u64..(1u64 << vars.len())).map(move |mask| {
        vars.iter()
            .enumerate()
            .map(|(b, v)| (v.clone(), mask >> b & 1 == 1))
            .collect()
    })
}

/// Checks that `c` interpolates `¬β(¬p, r) → α(p, q)`: whenever `c` is 1,
/// `α` holds for every choice of its private variables; whenever `c` is 0,
/// `β` with `p'_i := ¬p_i` holds for every choice of its private variables.
pub fn check_interpolates(
    c: &MonotoneCircuit,
    shape: &InterpolationShape,
) -> Result<InterpolationReport, CircuitError> {
    check_interpolates_bounded(c, shape, DEFAULT_BUDGET_BITS)
}

pub fn check_interpolates_bounded(
    c: &MonotoneCircuit,
    shape: &InterpolationShape,
    budget_bits: usize,
) -> Result<InterpolationReport, CircuitError> {
    let a_vars = shape.alpha_side_vars();
    let b_vars = shape.beta_side_vars();
    for side in [&a_vars, &b_vars] {
        let bits = shape.p.len() + side.len();
        if bits > budget_bits {
            return Err(CircuitError::Budget(bits, budget_bits));
        }
    }
    if let Some(v) = c.vars().into_iter().find(|v| !shape.p.contains(v)) {
        return Err(CircuitError::StrayVariable(v));
    }
    let mut alpha_side = CheckOutcome { checked: 0, failure: None };
    let mut beta_side = CheckOutcome { checked: 0, failure: None };
    let unbound = |e: crate::semantics::UnboundVar| CircuitError::Unbound(e.0);
    for pa in assignments(&shape.p) {
        let out = c.eval(&pa)?;
        if out {
            if alpha_side.failure.is_some() {
                continue;
            }
            for qa in assignments(&a_vars) {
                let mut full = pa.clone();
                full.extend(qa);
                alpha_side.checked += 1;
                if !classical_eval(&full, &shape.alpha).map_err(unbound)? {
                    alpha_side.failure = Some(format!("C = 1 but alpha fails at {full:?}"));
                    break;
                }
            }
        } else {
            if beta_side.failure.is_some() {
                continue;
            }
            for ra in assignments(&b_vars) {
                let mut full = ra;
                for (p, pp) in shape.p.iter().zip(&shape.pp) {
                    full.insert(pp.clone(), !pa[p]);
                }
                beta_side.checked += 1;
                if !classical_eval(&full, &shape.beta).map_err(unbound)? {
                    let mut shown = pa.clone();
                    shown.extend(full);
                    beta_side.failure = Some(format!("C = 0 but beta(~p) fails at {shown:?}"));
                    break;
                }
            }
        }
    }
    Ok(InterpolationReport { alpha_side, beta_side })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::parse_formula;

    fn a(pairs: &[(&str, bool)]) -> Assignment {
        pairs.iter().map(|(k, v)| (k.to_string(), *v)).collect()
    }

    #[test]
    fn empty_gates_are_constants() {
        assert!(MonotoneCircuit::constant(true).eval(&a(&[])).unwrap());
        assert!(!MonotoneCircuit::constant(false).eval(&a(&[])).unwrap());
        let c = MonotoneCircuit::variable("p");
        assert!(c.eval(&a(&[("p", true)])).unwrap());
        assert_eq!(c.eval(&a(&[])), Err(CircuitError::Unbound("p".into())));
    }

    #[test]
    fn ternary_and_splits() {
        let mut b = CircuitBuilder::new();
        let xs: Vec<usize> = ["x", "y", "z"].iter().map(|v| b.var(*v)).collect();
        let r = b.and(xs);
        let c = b.finish(r);
        assert_eq!(c.size(), 3);
        let d = to_bounded_fanin(&c);
        assert_eq!(d.size(), 4);
        assert_eq!(d.max_fanin(), 2);
        assert_eq!(to_bounded_fanin(&d).size(), 4);
    }

    #[test]
    fn text_round_trip() {
        let text = "a = VAR p\nb = VAR q\nc = OR a,b\nd = AND\ne = AND c,d\nroot e\n";
        let c = MonotoneCircuit::from_text(text).unwrap();
        let again = MonotoneCircuit::from_text(&c.to_text()).unwrap();
        assert_eq!(c, again);
        assert!(c.eval(&a(&[("p", true), ("q", false)])).unwrap());
        assert!(matches!(
            MonotoneCircuit::from_text("a = AND b\nb = OR a\nroot a"),
            Err(CircuitError::Cycle(_))
        ));
        assert!(matches!(
            MonotoneCircuit::from_text("a = AND b\nroot a"),
            Err(CircuitError::UnknownGate(_))
        ));
    }

    #[test]
    fn substitution_folds_constants() {
        let c = MonotoneCircuit::from_text("a = VAR p\nb = VAR q\nc = AND a,b\nroot c").unwrap();
        let fixed = [("q".to_string(), false)].into();
        let d = c.substitute(&fixed, &BTreeMap::new());
        assert_eq!(d, MonotoneCircuit::constant(false));
        let fixed = [("q".to_string(), true)].into();
        let d = c.substitute(&fixed, &BTreeMap::new());
        assert_eq!(d, MonotoneCircuit::variable("p"));
    }

    #[test]
    fn cc_examples() {
        assert!(cc_membership(2, &BTreeSet::new(), 0).unwrap());
        assert!(cc_membership(2, &[(0, 1)].into(), 1).unwrap());
        let tri: BTreeSet<_> = [(0, 1), (1, 2), (0, 2)].into();
        assert!(!cc_membership(4, &tri, 0).unwrap());
        assert!(cc_membership(4, &tri, 1).unwrap());
        assert!(cc_membership(9, &tri, 0).is_err());
    }

    #[test]
    fn cc_disjoint_small() {
        for n in 2..=4 {
            let pairs: Vec<(usize, usize)> =
                (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
            for mask in 0u32..(1 << pairs.len()) {
                let e: BTreeSet<_> = pairs
                    .iter()
                    .enumerate()
                    .filter(|(b, _)| mask >> b & 1 == 1)
                    .map(|(_, &x)| x)
                    .collect();
                assert!(!(cc_membership(n, &e, 0).unwrap() && cc_membership(n, &e, 1).unwrap()));
            }
        }
    }

    #[test]
    fn separation_examples() {
        assert!(check_separates(&MonotoneCircuit::variable("e_0_1"), 2).unwrap().passed());
        assert!(!check_separates(&MonotoneCircuit::constant(false), 2).unwrap().passed());
        assert!(check_separates(&MonotoneCircuit::variable("x"), 2).is_err());
    }

    fn shape(alpha: &str, beta: &str) -> InterpolationShape {
        InterpolationShape {
            n: 1,
            p: vec!["p".into()],
            pp: vec!["pp".into()],
            q: vec!["q".into()],
            r: vec!["r".into()],
            alpha_private: vec![],
            beta_private: vec![],
            u: "u".into(),
            alpha: parse_formula(alpha).unwrap(),
            beta: parse_formula(beta).unwrap(),
        }
    }

    #[test]
    fn interpolation_examples() {
        // alpha = q -> p, beta = r -> pp: C = p interpolates.
        let s = shape("q -> p", "r -> pp");
        assert!(check_interpolates(&MonotoneCircuit::variable("p"), &s).unwrap().passed());
        // constant 1 fails on the alpha side exactly when alpha is falsifiable
        let rep = check_interpolates(&MonotoneCircuit::constant(true), &s).unwrap();
        assert!(!rep.alpha_side.passed() && rep.beta_side.passed());
        // constant 0 fails on the beta side exactly when beta(~p) is falsifiable
        let rep = check_interpolates(&MonotoneCircuit::constant(false), &shape("q", "r -> r")).unwrap();
        assert!(rep.passed());
        let rep = check_interpolates(&MonotoneCircuit::constant(false), &s).unwrap();
        assert!(!rep.beta_side.passed());
    }

    #[test]
    fn shape_validation() {
        assert!(shape("q -> p", "r -> pp").validate().is_ok());
        assert_eq!(shape("u", "r").validate(), Err(ShapeError::Stray("u".into())));
    }
}
