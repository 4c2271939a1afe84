//! Kripke forcing, classical evaluation, and a terminating decision
//! procedure that returns natural deduction witnesses or countermodels.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};
use std::fmt::Write as _;
use std::rc::Rc;

use thiserror::Error;

use crate::formula::{parse_formula_lenient, Formula, Shape};
use crate::natded::{NmBuilder, NmDerivation};

pub const DEFAULT_BUDGET: usize = 1_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModelError {
    #[error("unknown world `{0}`")]
    UnknownWorld(String),
    #[error("duplicate world `{0}`")]
    DuplicateWorld(String),
    #[error("order is not antisymmetric between `{0}` and `{1}`")]
    NotAntisymmetric(String, String),
    #[error("valuation not persistent: `{var}` holds at `{lo}` but not at `{hi}`")]
    NotPersistent { var: String, lo: String, hi: String },
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
}

/// A finite Kripke model. The order given at construction is closed
/// reflexively and transitively, then checked for antisymmetry.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KripkeModel {
    worlds: Vec<String>,
    /// `above[w]`: all `y` with `w <= y`, sorted.
    above: Vec<Vec<usize>>,
    val: Vec<BTreeSet<String>>,
}

impl KripkeModel {
    pub fn new(
        worlds: Vec<String>,
        order: &[(String, String)],
        valuation: &BTreeMap<String, BTreeSet<String>>,
    ) -> Result<KripkeModel, ModelError> {
        let mut index = HashMap::new();
        for (i, w) in worlds.iter().enumerate() {
            if index.insert(w.as_str(), i).is_some() {
                return Err(ModelError::DuplicateWorld(w.clone()));
            }
        }
        let look = |w: &str| {
            index
                .get(w)
                .copied()
                .ok_or_else(|| ModelError::UnknownWorld(w.to_string()))
        };
        let n = worlds.len();
        let mut leq = vec![vec![false; n]; n];
        for (i, row) in leq.iter_mut().enumerate() {
            row[i] = true;
        }
        for (a, b) in order {
            leq[look(a)?][look(b)?] = true;
        }
        for k in 0..n {
            for i in 0..n {
                if leq[i][k] {
                    for j in 0..n {
                        if leq[k][j] {
                            leq[i][j] = true;
                        }
                    }
                }
            }
        }
        for i in 0..n {
            for j in i + 1..n {
                if leq[i][j] && leq[j][i] {
                    return Err(ModelError::NotAntisymmetric(
                        worlds[i].clone(),
                        worlds[j].clone(),
                    ));
                }
            }
        }
        let mut val = vec![BTreeSet::new(); n];
        for (w, vars) in valuation {
            val[look(w)?] = vars.clone();
        }
        for i in 0..n {
            for j in 0..n {
                if leq[i][j] {
                    if let Some(v) = val[i].difference(&val[j]).next() {
                        return Err(ModelError::NotPersistent {
                            var: v.clone(),
                            lo: worlds[i].clone(),
                            hi: worlds[j].clone(),
                        });
                    }
                }
            }
        }
        let above = leq
            .iter()
            .map(|row| (0..n).filter(|&j| row[j]).collect())
            .collect();
        Ok(KripkeModel { worlds, above, val })
    }

    pub fn worlds(&self) -> &[String] {
        &self.worlds
    }

    pub fn len(&self) -> usize {
        self.worlds.len()
    }

    pub fn is_empty(&self) -> bool {
        self.worlds.is_empty()
    }

    pub fn world_index(&self, w: &str) -> Option<usize> {
        self.worlds.iter().position(|x| x == w)
    }

    pub fn leq(&self, a: usize, b: usize) -> bool {
        self.above[a].binary_search(&b).is_ok()
    }

    pub fn valuation(&self, w: usize) -> &BTreeSet<String> {
        &self.val[w]
    }

    /// Worlds forcing `phi`, as a bit per world.
    pub fn extension(&self, phi: &Formula) -> Vec<bool> {
        let mut memo = HashMap::new();
        self.ext_memo(phi, &mut memo)
    }

    fn ext_memo(&self, phi: &Formula, memo: &mut HashMap<Formula, Vec<bool>>) -> Vec<bool> {
        if let Some(e) = memo.get(phi) {
            return e.clone();
        }
        let out: Vec<bool> = match phi.shape() {
            Shape::Var(p) => self.val.iter().map(|s| s.contains(p)).collect(),
            Shape::Imp(a, b) => {
                let ea = self.ext_memo(a, memo);
                let eb = self.ext_memo(b, memo);
                self.above
                    .iter()
                    .map(|ys| ys.iter().all(|&y| !ea[y] || eb[y]))
                    .collect()
            }
        };
        memo.insert(phi.clone(), out.clone());
        out
    }

    /// Submodel on the listed worlds, in the given order.
    pub fn restrict(&self, keep: &[usize]) -> KripkeModel {
        let pos: HashMap<usize, usize> = keep.iter().enumerate().map(|(i, &w)| (w, i)).collect();
        KripkeModel {
            worlds: keep.iter().map(|&w| self.worlds[w].clone()).collect(),
            above: keep
                .iter()
                .map(|&w| {
                    let mut ys: Vec<usize> =
                        self.above[w].iter().filter_map(|y| pos.get(y).copied()).collect();
                    ys.sort_unstable();
                    ys
                })
                .collect(),
            val: keep.iter().map(|&w| self.val[w].clone()).collect(),
        }
    }

    pub fn renamed(mut self, names: Vec<String>) -> KripkeModel {
        assert_eq!(names.len(), self.worlds.len());
        self.worlds = names;
        self
    }

    pub fn forces_at(&self, w: usize, phi: &Formula) -> bool {
        self.extension(phi)[w]
    }

    /// Canonical text: `world ID : vars` lines, then `ID <= ID` lines for the
    /// covering pairs of the order.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (i, w) in self.worlds.iter().enumerate() {
            let _ = write!(out, "world {w}");
            if !self.val[i].is_empty() {
                out.push_str(" :");
                for v in &self.val[i] {
                    let _ = write!(out, " {v}");
                }
            }
            out.push('\n');
        }
        for (i, ys) in self.above.iter().enumerate() {
            for &j in ys {
                let covered = j != i
                    && !ys
                        .iter()
                        .any(|&k| k != i && k != j && self.leq(k, j));
                if covered {
                    let _ = writeln!(out, "{} <= {}", self.worlds[i], self.worlds[j]);
                }
            }
        }
        out
    }

    pub fn from_text(text: &str) -> Result<KripkeModel, ModelError> {
        let mut worlds = Vec::new();
        let mut order = Vec::new();
        let mut val = BTreeMap::new();
        for (ln, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let syntax = |msg: &str| ModelError::Syntax {
                line: ln + 1,
                msg: msg.to_string(),
            };
            if let Some(rest) = line.strip_prefix("world ") {
                let (name, vars) = match rest.split_once(':') {
                    Some((n, v)) => (n.trim(), v),
                    None => (rest.trim(), ""),
                };
                if name.is_empty() {
                    return Err(syntax("missing world name"));
                }
                worlds.push(name.to_string());
                let set: BTreeSet<String> = vars.split_whitespace().map(str::to_string).collect();
                val.insert(name.to_string(), set);
            } else if let Some((a, b)) = line.split_once("<=") {
                order.push((a.trim().to_string(), b.trim().to_string()));
            } else {
                return Err(syntax("expected `world ...` or `a <= b`"));
            }
        }
        KripkeModel::new(worlds, &order, &val)
    }
}

pub fn forces(m: &KripkeModel, w: &str, phi: &Formula) -> Result<bool, ModelError> {
    let i = m
        .world_index(w)
        .ok_or_else(|| ModelError::UnknownWorld(w.to_string()))?;
    Ok(m.forces_at(i, phi))
}

pub fn holds(m: &KripkeModel, phi: &Formula) -> bool {
    m.extension(phi).into_iter().all(|b| b)
}

/// A classical truth assignment.
pub type Assignment = BTreeMap<String, bool>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("variable `{0}` is not assigned")]
pub struct UnboundVar(pub String);

pub fn classical_eval(a: &Assignment, phi: &Formula) -> Result<bool, UnboundVar> {
    match phi.shape() {
        Shape::Var(p) => a.get(p).copied().ok_or_else(|| UnboundVar(p.to_string())),
        Shape::Imp(x, y) => Ok(!classical_eval(a, x)? || classical_eval(a, y)?),
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DecideError {
    #[error("search budget of {0} states exhausted")]
    Budget(usize),
}

#[derive(Debug, Clone)]
pub enum Decision {
    /// A tree derivation of the goal from the assumptions.
    Valid(NmDerivation),
    /// A model with a world (`root`) forcing all assumptions but not the goal.
    Invalid { model: KripkeModel, root: usize },
}

impl Decision {
    pub fn is_valid(&self) -> bool {
        matches!(self, Decision::Valid(_))
    }

    pub fn witness(&self) -> Option<&NmDerivation> {
        match self {
            Decision::Valid(d) => Some(d),
            Decision::Invalid { .. } => None,
        }
    }
}

type Ctx = Rc<[usize]>;

#[derive(Debug)]
enum Plan {
    Ax,
    ImpR(Rc<Plan>),
    /// `p, p -> b` in context; continue with `b`.
    L0 { atom: usize, imp: usize, sub: Rc<Plan> },
    /// `(c -> d) -> b` in context.
    LImp { imp: usize, left: Rc<Plan>, right: Rc<Plan> },
}

#[derive(Clone, Copy)]
enum Node {
    Var,
    Imp(usize, usize),
}

const SHRINK_STEPS: usize = 200_000;

/// Backward proof search in a contraction-free sequent calculus for the
/// implicational fragment. Memoised across queries.
pub struct Decider {
    budget: usize,
    states: usize,
    ids: HashMap<Formula, usize>,
    formulas: Vec<Formula>,
    nodes: Vec<Node>,
    memo: HashMap<(Ctx, usize), Option<Rc<Plan>>>,
}

impl Default for Decider {
    fn default() -> Self {
        Decider::new(DEFAULT_BUDGET)
    }
}

impl Decider {
    pub fn new(budget: usize) -> Decider {
        Decider {
            budget,
            states: 0,
            ids: HashMap::new(),
            formulas: Vec::new(),
            nodes: Vec::new(),
            memo: HashMap::new(),
        }
    }

    /// Search states explored so far.
    pub fn states(&self) -> usize {
        self.states
    }

    fn intern(&mut self, f: &Formula) -> usize {
        if let Some(&i) = self.ids.get(f) {
            return i;
        }
        let node = match f.shape() {
            Shape::Var(_) => Node::Var,
            Shape::Imp(a, b) => {
                let (a, b) = (a.clone(), b.clone());
                Node::Imp(self.intern(&a), self.intern(&b))
            }
        };
        let i = self.formulas.len();
        self.formulas.push(f.clone());
        self.nodes.push(node);
        self.ids.insert(f.clone(), i);
        i
    }

    fn ctx_of<'a>(&mut self, gamma: impl IntoIterator<Item = &'a Formula>) -> Ctx {
        let mut v: Vec<usize> = gamma.into_iter().map(|f| self.intern(f)).collect();
        v.sort_unstable();
        v.dedup();
        v.into()
    }

    fn with(ctx: &[usize], add: usize, remove: Option<usize>) -> Ctx {
        let mut v: Vec<usize> = ctx.iter().copied().filter(|&x| Some(x) != remove).collect();
        if let Err(pos) = v.binary_search(&add) {
            v.insert(pos, add);
        }
        v.into()
    }

    fn search(&mut self, ctx: Ctx, goal: usize) -> Result<Option<Rc<Plan>>, DecideError> {
        let key = (ctx.clone(), goal);
        if let Some(r) = self.memo.get(&key) {
            return Ok(r.clone());
        }
        self.states += 1;
        if self.states > self.budget {
            return Err(DecideError::Budget(self.budget));
        }
        let res = self.search_fresh(&ctx, goal)?;
        self.memo.insert(key, res.clone());
        Ok(res)
    }

    fn search_fresh(&mut self, ctx: &Ctx, goal: usize) -> Result<Option<Rc<Plan>>, DecideError> {
        if ctx.binary_search(&goal).is_ok() {
            return Ok(Some(Rc::new(Plan::Ax)));
        }
        if let Node::Imp(a, b) = self.nodes[goal] {
            let sub = self.search(Self::with(ctx, a, None), b)?;
            return Ok(sub.map(|s| Rc::new(Plan::ImpR(s))));
        }
        // invertible: p, p -> b  =>  p, b
        for &f in ctx.iter() {
            if let Node::Imp(a, b) = self.nodes[f] {
                if matches!(self.nodes[a], Node::Var) && ctx.binary_search(&a).is_ok() {
                    let sub = self.search(Self::with(ctx, b, Some(f)), goal)?;
                    return Ok(sub.map(|sub| Rc::new(Plan::L0 { atom: a, imp: f, sub })));
                }
            }
        }
        for &f in ctx.iter() {
            let Node::Imp(cd, b) = self.nodes[f] else { continue };
            let Node::Imp(_, d) = self.nodes[cd] else { continue };
            let db = self.intern(&Formula::imp(
                self.formulas[d].clone(),
                self.formulas[b].clone(),
            ));
            let Some(left) = self.search(Self::with(ctx, db, Some(f)), cd)? else {
                continue;
            };
            if let Some(right) = self.search(Self::with(ctx, b, Some(f)), goal)? {
                return Ok(Some(Rc::new(Plan::LImp { imp: f, left, right })));
            }
        }
        Ok(None)
    }

    /// Provability of `phi` from `gamma`, without witnesses.
    pub fn provable(&mut self, gamma: &[Formula], phi: &Formula) -> Result<bool, DecideError> {
        let ctx = self.ctx_of(gamma);
        let g = self.intern(phi);
        Ok(self.search(ctx, g)?.is_some())
    }

    pub fn decide(&mut self, gamma: &[Formula], phi: &Formula) -> Result<Decision, DecideError> {
        if let Some(model) = classical_refutation(gamma, phi) {
            return Ok(Decision::Invalid { model, root: 0 });
        }
        let ctx = self.ctx_of(gamma);
        let g = self.intern(phi);
        match self.search(ctx.clone(), g)? {
            Some(plan) => {
                let mut b = NmBuilder::new();
                let root = self.emit(&mut b, &ctx, g, &plan);
                let raw = b.finish(root);
                // The emitted derivation keeps every cut; a bounded search
                // for a normal one is usually far smaller.
                let small = crate::normal::smallest_within(gamma, phi, raw.len() - 1, SHRINK_STEPS)
                    .filter(|d| d.len() < raw.len());
                Ok(Decision::Valid(small.unwrap_or(raw)))
            }
            None => {
                let (model, root) = self.countermodel(gamma, phi)?;
                Ok(Decision::Invalid { model, root })
            }
        }
    }

    /// Turns a search plan into natural deduction nodes whose open
    /// assumptions lie in `ctx`. Cuts become `→I` followed by `→E`.
    fn emit(&self, b: &mut NmBuilder, ctx: &Ctx, goal: usize, plan: &Plan) -> usize {
        let f = |i: usize| self.formulas[i].clone();
        match plan {
            Plan::Ax => b.leaf(f(goal)),
            Plan::ImpR(sub) => {
                let Node::Imp(a, c) = self.nodes[goal] else { unreachable!() };
                let body = self.emit(b, &Self::with(ctx, a, None), c, sub);
                b.intro(f(a), body)
            }
            Plan::L0 { atom, imp, sub } => {
                let Node::Imp(_, bb) = self.nodes[*imp] else { unreachable!() };
                let body = self.emit(b, &Self::with(ctx, bb, Some(*imp)), goal, sub);
                let lam = b.intro(f(bb), body);
                let p = b.leaf(f(*atom));
                let pb = b.leaf(f(*imp));
                let arg = b.elim(p, pb);
                b.elim(arg, lam)
            }
            Plan::LImp { imp, left, right } => {
                let Node::Imp(cd, bb) = self.nodes[*imp] else { unreachable!() };
                let Node::Imp(c, d) = self.nodes[cd] else { unreachable!() };
                let db = self.ids[&Formula::imp(f(d), f(bb))];
                // d -> b from (c -> d) -> b
                let dl = b.leaf(f(d));
                let kd = b.intro(f(c), dl);
                let x = b.leaf(f(*imp));
                let xb = b.elim(kd, x);
                let db_proof = b.intro(f(d), xb);
                let lbody = self.emit(b, &Self::with(ctx, db, Some(*imp)), cd, left);
                let llam = b.intro(f(db), lbody);
                let cd_proof = b.elim(db_proof, llam);
                let x2 = b.leaf(f(*imp));
                let b_proof = b.elim(cd_proof, x2);
                let rbody = self.emit(b, &Self::with(ctx, bb, Some(*imp)), goal, right);
                let rlam = b.intro(f(bb), rbody);
                b.elim(b_proof, rlam)
            }
        }
    }

    /// Finite countermodel over theories closed relative to the
    /// subformulas of the sequent. World 0 is the root.
    fn countermodel(
        &mut self,
        gamma: &[Formula],
        phi: &Formula,
    ) -> Result<(KripkeModel, usize), DecideError> {
        let mut sub: BTreeSet<Formula> = BTreeSet::new();
        for f in gamma.iter().chain(std::iter::once(phi)) {
            collect_subformulas(f, &mut sub);
        }
        let sub: Vec<Formula> = sub.into_iter().collect();
        let mut worlds: Vec<BTreeSet<Formula>> = Vec::new();
        let mut index: HashMap<BTreeSet<Formula>, usize> = HashMap::new();
        let mut edges: Vec<(usize, usize)> = Vec::new();
        let root = self.close(&sub, gamma.iter().cloned().collect())?;
        index.insert(root.clone(), 0);
        worlds.push(root);
        let mut queue = VecDeque::from([0usize]);
        while let Some(w) = queue.pop_front() {
            for f in &sub {
                let Some((a, _)) = f.as_imp() else { continue };
                if worlds[w].contains(f) || worlds[w].contains(a) {
                    continue;
                }
                let mut base = worlds[w].clone();
                base.insert(a.clone());
                let next = self.close(&sub, base)?;
                let j = match index.get(&next) {
                    Some(&j) => j,
                    None => {
                        let j = worlds.len();
                        index.insert(next.clone(), j);
                        worlds.push(next);
                        queue.push_back(j);
                        j
                    }
                };
                edges.push((w, j));
            }
        }
        let names: Vec<String> = (0..worlds.len()).map(|i| format!("w{i}")).collect();
        let order: Vec<(String, String)> = edges
            .iter()
            .map(|&(a, b)| (names[a].clone(), names[b].clone()))
            .collect();
        let val: BTreeMap<String, BTreeSet<String>> = worlds
            .iter()
            .enumerate()
            .map(|(i, w)| {
                let atoms = w.iter().filter_map(|f| f.as_var().map(str::to_string)).collect();
                (names[i].clone(), atoms)
            })
            .collect();
        let model = KripkeModel::new(names, &order, &val).expect("inclusion order is a partial order");
        Ok((shrink_countermodel(&model, gamma, phi), 0))
    }

    fn close(
        &mut self,
        sub: &[Formula],
        base: BTreeSet<Formula>,
    ) -> Result<BTreeSet<Formula>, DecideError> {
        let gamma: Vec<Formula> = base.iter().cloned().collect();
        let mut out = base;
        for f in sub {
            if !out.contains(f) && self.provable(&gamma, f)? {
                out.insert(f.clone());
            }
        }
        Ok(out)
    }
}

/// Variable count up to which `decide` first looks for a refuting
/// assignment (a one-world countermodel).
const CLASSICAL_VARS: usize = 20;

/// Bitwise evaluation of 64 assignments at once; variable `i < 6` follows a
/// fixed bit pattern, higher variables follow the bits of `block`.
fn eval_block(phi: &Formula, index: &HashMap<String, usize>, block: u64) -> u64 {
    const PATTERNS: [u64; 6] = [
        0xAAAA_AAAA_AAAA_AAAA,
        0xCCCC_CCCC_CCCC_CCCC,
        0xF0F0_F0F0_F0F0_F0F0,
        0xFF00_FF00_FF00_FF00,
        0xFFFF_0000_FFFF_0000,
        0xFFFF_FFFF_0000_0000,
    ];
    match phi.shape() {
        Shape::Var(v) => {
            let i = index[v];
            if i < 6 {
                PATTERNS[i]
            } else if block >> (i - 6) & 1 == 1 {
                u64::MAX
            } else {
                0
            }
        }
        Shape::Imp(a, b) => !eval_block(a, index, block) | eval_block(b, index, block),
    }
}

fn classical_refutation(gamma: &[Formula], phi: &Formula) -> Option<KripkeModel> {
    let mut vars = BTreeSet::new();
    for f in gamma.iter().chain(std::iter::once(phi)) {
        vars.extend(f.vars());
    }
    if vars.len() > CLASSICAL_VARS {
        return None;
    }
    let vars: Vec<String> = vars.into_iter().collect();
    let index: HashMap<String, usize> = vars.iter().enumerate().map(|(i, v)| (v.clone(), i)).collect();
    let live = if vars.len() >= 6 { u64::MAX } else { (1u64 << (1 << vars.len())) - 1 };
    let blocks = 1u64 << vars.len().saturating_sub(6);
    for block in 0..blocks {
        let mut bad = live & !eval_block(phi, &index, block);
        for g in gamma {
            bad &= eval_block(g, &index, block);
        }
        if bad != 0 {
            let bit = bad.trailing_zeros() as u64;
            let truth = (block << 6) | bit;
            let atoms = vars
                .iter()
                .enumerate()
                .filter(|(i, _)| truth >> i & 1 == 1)
                .map(|(_, v)| v.clone())
                .collect();
            let val = BTreeMap::from([("w0".to_string(), atoms)]);
            return Some(KripkeModel::new(vec!["w0".into()], &[], &val).expect("one world"));
        }
    }
    None
}

/// Greedily drops non-root worlds while world 0 still refutes the sequent,
/// then renames worlds `w0, w1, ...`.
fn shrink_countermodel(m: &KripkeModel, gamma: &[Formula], phi: &Formula) -> KripkeModel {
    let refutes = |k: &KripkeModel| gamma.iter().all(|g| k.forces_at(0, g)) && !k.forces_at(0, phi);
    let mut keep: Vec<usize> = (0..m.len()).collect();
    let mut changed = true;
    while changed {
        changed = false;
        let mut i = keep.len();
        while i > 1 {
            i -= 1;
            let mut trial = keep.clone();
            trial.remove(i);
            if refutes(&m.restrict(&trial)) {
                keep = trial;
                changed = true;
            }
        }
    }
    let out = m.restrict(&keep);
    let names: Vec<String> = (0..out.len()).map(|i| format!("w{i}")).collect();
    out.renamed(names)
}

pub fn collect_subformulas(f: &Formula, out: &mut BTreeSet<Formula>) {
    if out.insert(f.clone()) {
        if let Some((a, b)) = f.as_imp() {
            collect_subformulas(a, out);
            collect_subformulas(b, out);
        }
    }
}

/// Decides `gamma ⊢ phi` with the default state budget.
pub fn decide(gamma: &[Formula], phi: &Formula) -> Result<Decision, DecideError> {
    Decider::default().decide(gamma, phi)
}

pub fn decide_with_budget(
    gamma: &[Formula],
    phi: &Formula,
    budget: usize,
) -> Result<Decision, DecideError> {
    Decider::new(budget).decide(gamma, phi)
}

/// Parses one formula per line; `#` starts a comment.
pub fn parse_formula_lines(text: &str) -> Result<Vec<Formula>, crate::formula::ParseError> {
    text.lines()
        .map(|l| l.split('#').next().unwrap_or("").trim())
        .filter(|l| !l.is_empty())
        .map(parse_formula_lenient)
        .collect()
}
