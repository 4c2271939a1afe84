//! Constant-size Frege derivations of fixed schematic rules.
//!
//! A template derives its conclusion from its premises, each premise being
//! used exactly once, so instances can be plugged into tree-like proofs.
//! Templates are generated by proof search plus the line-by-line
//! natural-deduction-to-Frege translation and frozen in `data/schemas.txt`.

use std::collections::{BTreeSet, HashMap};
use std::sync::OnceLock;

use thiserror::Error;

use crate::formula::{parse_formula_lenient, Formula, Substitution};
use crate::frege::{is_axiom, nm_to_frege_naive, FKind, FProof, FregeDag};
use crate::semantics::{DecideError, Decider, Decision};

/// The variable of the fixed tautology `⊤`; never a metavariable.
pub const TOP_VAR: &str = "_t";

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SchemaError {
    #[error("metavariable `{var}` of schema {schema} is unbound")]
    Unbound { schema: String, var: String },
    #[error("schema {schema}: premise {index} is `{found}`, expected `{expected}`")]
    PremiseMismatch {
        schema: String,
        index: usize,
        expected: Formula,
        found: Formula,
    },
    #[error("schema {schema} expects {expected} premises, got {found}")]
    Arity {
        schema: String,
        expected: usize,
        found: usize,
    },
    #[error("unknown schema `{0}`")]
    Unknown(String),
    #[error("schema data line {line}: {msg}")]
    Format { line: usize, msg: String },
    #[error("schema {0} is not valid")]
    Invalid(String),
    #[error("proof search for schema {0} failed: {1}")]
    Search(String, DecideError),
}

#[derive(Clone, Debug)]
pub struct SchemaTemplate {
    pub name: String,
    pub premises: Vec<Formula>,
    pub conclusion: Formula,
    /// Tree proof; premise `i` is the unique leaf `Hole(i)`.
    pub proof: FProof,
}

impl SchemaTemplate {
    pub fn metavars(&self) -> BTreeSet<String> {
        let mut vs = self.conclusion.vars();
        for p in &self.premises {
            vs.extend(p.vars());
        }
        vs.remove(TOP_VAR);
        vs
    }

    pub fn lines(&self) -> usize {
        self.proof.dag_lines()
    }

    fn bound(&self, sigma: &Substitution) -> Result<(), SchemaError> {
        match self.metavars().into_iter().find(|v| sigma.get(v).is_none()) {
            Some(var) => Err(SchemaError::Unbound {
                schema: self.name.clone(),
                var,
            }),
            None => Ok(()),
        }
    }

    /// The instance with premises left open as holes.
    pub fn instantiate(&self, sigma: &Substitution) -> Result<FProof, SchemaError> {
        self.bound(sigma)?;
        Ok(self.proof.substitute(sigma))
    }

    /// The instance with premise `i` replaced by `premises[i]`.
    pub fn apply(&self, sigma: &Substitution, premises: &[FProof]) -> Result<FProof, SchemaError> {
        if premises.len() != self.premises.len() {
            return Err(SchemaError::Arity {
                schema: self.name.clone(),
                expected: self.premises.len(),
                found: premises.len(),
            });
        }
        let inst = self.instantiate(sigma)?;
        for (i, (pat, given)) in self.premises.iter().zip(premises).enumerate() {
            let expected = sigma.apply(pat);
            if &expected != given.label() {
                return Err(SchemaError::PremiseMismatch {
                    schema: self.name.clone(),
                    index: i,
                    expected,
                    found: given.label().clone(),
                });
            }
        }
        Ok(inst.fill(premises))
    }

    /// Binds metavariables by matching the premises and conclusion
    /// against the given formulas, then applies the template.
    pub fn apply_matching(
        &self,
        premises: &[FProof],
        conclusion: &Formula,
    ) -> Result<FProof, SchemaError> {
        let mut sigma = Substitution::new();
        let fixed = |v: &str| v == TOP_VAR;
        let mut ok = sigma.match_into(&self.conclusion, conclusion, &fixed);
        for (pat, p) in self.premises.iter().zip(premises) {
            ok = ok && sigma.match_into(pat, p.label(), &fixed);
        }
        if !ok {
            return Err(SchemaError::PremiseMismatch {
                schema: self.name.clone(),
                index: 0,
                expected: self.conclusion.clone(),
                found: conclusion.clone(),
            });
        }
        self.apply(&sigma, premises)
    }

    fn to_text(&self) -> String {
        let mut out = format!("schema {}\n", self.name);
        for p in &self.premises {
            out.push_str(&format!("premise {p}\n"));
        }
        out.push_str(&format!("conclusion {}\n", self.conclusion));
        let tree = tree_nodes(&self.proof);
        for (i, n) in tree.iter().enumerate() {
            match n {
                TNode::Hole(h) => out.push_str(&format!("{i} hole {h}\n")),
                TNode::Axiom(f) => out.push_str(&format!("{i} axiom {f}\n")),
                TNode::Mp(a, b) => out.push_str(&format!("{i} mp {a} {b}\n")),
            }
        }
        out.push_str("end\n");
        out
    }
}

/// `instantiate_schema`: the tree derivation of `σ(conclusion)` from
/// `σ(premises)`.
pub fn instantiate_schema(t: &SchemaTemplate, sigma: &Substitution) -> Result<FregeDag, SchemaError> {
    Ok(t.instantiate(sigma)?.to_tree())
}

enum TNode {
    Hole(usize),
    Axiom(Formula),
    Mp(usize, usize),
}

/// Post-order listing of the proof as a tree.
fn tree_nodes(p: &FProof) -> Vec<TNode> {
    let mut out = Vec::new();
    fn go(p: &FProof, out: &mut Vec<TNode>) -> usize {
        let n = match p.kind() {
            FKind::Hole(h) => TNode::Hole(*h),
            FKind::Leaf => TNode::Axiom(p.label().clone()),
            FKind::Mp(a, b) => {
                let x = go(a, out);
                let y = go(b, out);
                TNode::Mp(x, y)
            }
        };
        out.push(n);
        out.len() - 1
    }
    go(p, &mut out);
    out
}

/// Every schema in the library: name, premises, conclusion.
pub fn schema_specs() -> Vec<(String, Vec<String>, String)> {
    let top = "(_t -> _t)";
    let mut specs: Vec<(String, Vec<String>, String)> = Vec::new();
    let mut add = |name: &str, prem: &[&str], concl: &str| {
        specs.push((
            name.to_string(),
            prem.iter().map(|s| s.to_string()).collect(),
            concl.to_string(),
        ));
    };
    add("ID", &[], "a -> a");
    add("CHAIN", &["a -> b", "b -> c"], "a -> c");
    add("CHAIN2", &["x -> y -> z", "z -> w"], "x -> y -> w");
    add("MP_CLOSED", &[], "a -> (a -> b) -> b");
    add("SUB_OUT", &[], "(d -> g) -> d -> a -> g");
    add("SUB_IN", &[], "(d -> g) -> (a -> d) -> a -> g");
    add("W9", &[], "(b -> c -> d) -> (a -> b) -> (a -> c) -> a -> d");
    add("W10", &[], "((g -> b) -> c) -> (g -> a -> b) -> a -> c");
    add("LEAF_RET", &[], "((a -> a) -> a) -> a");
    add("IMP_INTRO_RET", &["r -> ((a -> b) -> b) -> x", "x -> b"], "r -> a -> b");
    add("TRANSFER_USE", &["y -> g", "x -> (y -> g) -> g"], "x -> g");
    add("ELIM_SIDE", &["x -> y", "z -> a", "y -> (z -> b) -> b"], "x -> (a -> b) -> b");
    add("FINAL_E", &["x -> (a -> b) -> b", "x -> ((a -> b) -> b) -> b"], "x -> b");
    add("MERGE3", &["x -> a", "x -> a -> b", "a -> b -> c"], "x -> c");
    add("B_ZERO", &["z"], &format!("{top} -> (z -> f) -> f"));
    add("B_ONE", &["x -> z"], "((x -> f) -> f) -> (z -> f) -> f");
    add(
        "B_TWO",
        &["x -> y -> z"],
        "((((x -> f) -> f) -> ((y -> f) -> f) -> f) -> f) -> (z -> f) -> f",
    );
    add("FINAL_TOP", &[], &format!("((({top} -> a) -> a) -> a) -> a"));
    add("TRANSFER_EMPTY", &[], &format!("{top} -> ({top} -> f) -> f"));
    add("TRANSFER_ONE", &[], "((a -> f) -> f) -> (((a -> g) -> g) -> f) -> f");
    add(
        "TRANSFER_SPLIT",
        &["a -> (b -> f) -> f", "c -> (d -> f) -> f"],
        "((a -> c -> f) -> f) -> (((b -> d -> g) -> g) -> f) -> f",
    );
    for bits in 0..8u8 {
        let ne = [bits & 1 != 0, bits & 2 != 0, bits & 4 != 0];
        if ne[2] && !ne[0] && !ne[1] {
            continue;
        }
        let r = |k: usize| if ne[k] { "((a -> f) -> f)".to_string() } else { top.to_string() };
        add(
            &format!("RET_BASE_{}", ret_key(&ne)),
            &[],
            &format!("{} -> {} -> {}", r(0), r(1), r(2)),
        );
    }
    for lo in valid_patterns() {
        for hi in valid_patterns() {
            let part = |v: usize, u: usize, ne: bool| {
                if ne {
                    format!("(y{v}{u} -> f)")
                } else {
                    top.to_string()
                }
            };
            let halves = [lo, hi];
            let side = |v: usize| {
                let h = halves[v];
                format!("({} -> {} -> {})", part(v, 0, h[0]), part(v, 1, h[1]), part(v, 2, h[2]))
            };
            let whole = |u: usize| match (lo[u], hi[u]) {
                (true, true) => format!("(((y0{u} -> f) -> (y1{u} -> f) -> f) -> f)"),
                (true, false) => part(0, u, true),
                (false, true) => part(1, u, true),
                (false, false) => top.to_string(),
            };
            add(
                &format!("RET_SPLIT_{}_{}", ret_key(&lo), ret_key(&hi)),
                &[],
                &format!(
                    "{} -> {} -> {} -> {} -> {}",
                    side(0),
                    side(1),
                    whole(0),
                    whole(1),
                    whole(2)
                ),
            );
        }
    }
    specs
}

/// Nonemptiness patterns `(I₀, I₁, I₂)` with `I₂ ⊆ I₀ ∪ I₁` possible.
fn valid_patterns() -> Vec<[bool; 3]> {
    (0..8u8)
        .map(|b| [b & 1 != 0, b & 2 != 0, b & 4 != 0])
        .filter(|ne| !(ne[2] && !ne[0] && !ne[1]))
        .collect()
}

pub fn ret_key(ne: &[bool; 3]) -> String {
    ne.iter().map(|&b| if b { '1' } else { '0' }).collect()
}

/// Builds one template: search for a natural deduction proof of the closed
/// implication, translate it, and detach the premises as holes.
pub fn generate_template(
    name: &str,
    premises: &[Formula],
    conclusion: &Formula,
) -> Result<SchemaTemplate, SchemaError> {
    let closed = premises
        .iter()
        .rev()
        .fold(conclusion.clone(), |acc, p| Formula::imp(p.clone(), acc));
    let mut decider = Decider::new(5_000_000);
    let d = match decider
        .decide(&[], &closed)
        .map_err(|e| SchemaError::Search(name.into(), e))?
    {
        Decision::Valid(d) => d,
        Decision::Invalid { .. } => return Err(SchemaError::Invalid(name.into())),
    };
    // The decider's witness is valid but far from small; prefer the smallest
    // normal derivation when one is found within the search bound.
    let d = crate::normal::smallest(&[], &closed, 400).unwrap_or(d);
    let mut proof = nm_to_frege_naive(&d).map_err(|_| SchemaError::Invalid(name.into()))?;
    proof = rebuild_tree(&proof);
    for (i, p) in premises.iter().enumerate() {
        proof = FProof::mp(&FProof::hole(i, p.clone()), &proof);
    }
    Ok(SchemaTemplate {
        name: name.into(),
        premises: premises.to_vec(),
        conclusion: conclusion.clone(),
        proof,
    })
}

/// Copies shared subproofs so that every node has one parent.
fn rebuild_tree(p: &FProof) -> FProof {
    match p.kind() {
        FKind::Leaf => FProof::leaf(p.label().clone()),
        FKind::Hole(i) => FProof::hole(*i, p.label().clone()),
        FKind::Mp(a, b) => FProof::mp(&rebuild_tree(a), &rebuild_tree(b)),
    }
}

fn parse_specs() -> Vec<(String, Vec<Formula>, Formula)> {
    let pf = |s: &str| parse_formula_lenient(s).expect("schema formula");
    schema_specs()
        .into_iter()
        .map(|(n, ps, c)| (n, ps.iter().map(|p| pf(p)).collect(), pf(&c)))
        .collect()
}

/// Regenerates the whole library in its data-file format.
pub fn generate_library_text() -> Result<String, SchemaError> {
    let mut out = String::from("# generated schema templates; one proof tree per block\n");
    for (name, prem, concl) in parse_specs() {
        let t = generate_template(&name, &prem, &concl)?;
        out.push_str(&t.to_text());
    }
    Ok(out)
}

/// Parses the data-file format.
pub fn parse_library(text: &str) -> Result<Vec<SchemaTemplate>, SchemaError> {
    let mut out = Vec::new();
    let mut lines = text.lines().enumerate().peekable();
    let err = |line: usize, msg: &str| SchemaError::Format {
        line: line + 1,
        msg: msg.into(),
    };
    let pf = |line: usize, s: &str| parse_formula_lenient(s).map_err(|e| err(line, &e.to_string()));
    while let Some((ln, l)) = lines.next() {
        let l = l.trim();
        if l.is_empty() || l.starts_with('#') {
            continue;
        }
        let name = l
            .strip_prefix("schema ")
            .ok_or_else(|| err(ln, "expected `schema NAME`"))?
            .trim()
            .to_string();
        let mut premises = Vec::new();
        let mut conclusion = None;
        let mut nodes: Vec<FProof> = Vec::new();
        loop {
            let (ln, l) = lines.next().ok_or_else(|| err(ln, "unterminated schema"))?;
            let l = l.trim();
            if l == "end" {
                break;
            }
            if let Some(rest) = l.strip_prefix("premise ") {
                premises.push(pf(ln, rest)?);
                continue;
            }
            if let Some(rest) = l.strip_prefix("conclusion ") {
                conclusion = Some(pf(ln, rest)?);
                continue;
            }
            let mut parts = l.splitn(3, ' ');
            let idx: usize = parts
                .next()
                .and_then(|s| s.parse().ok())
                .ok_or_else(|| err(ln, "bad node index"))?;
            if idx != nodes.len() {
                return Err(err(ln, "node indices must be consecutive"));
            }
            let kind = parts.next().unwrap_or("");
            let rest = parts.next().unwrap_or("").trim();
            let node = match kind {
                "hole" => {
                    let h: usize = rest.parse().map_err(|_| err(ln, "bad hole index"))?;
                    let label = premises.get(h).ok_or_else(|| err(ln, "hole without premise"))?;
                    FProof::hole(h, label.clone())
                }
                "axiom" => {
                    let f = pf(ln, rest)?;
                    if !is_axiom(&f) && f != Formula::top() {
                        return Err(err(ln, "leaf is not an axiom"));
                    }
                    FProof::leaf(f)
                }
                "mp" => {
                    let mut it = rest.split_whitespace().map(|s| s.parse::<usize>());
                    let (a, b) = match (it.next(), it.next()) {
                        (Some(Ok(a)), Some(Ok(b))) if a < idx && b < idx => (a, b),
                        _ => return Err(err(ln, "bad mp premises")),
                    };
                    FProof::try_mp(&nodes[a], &nodes[b]).ok_or_else(|| err(ln, "mp mismatch"))?
                }
                _ => return Err(err(ln, "unknown node kind")),
            };
            nodes.push(node);
        }
        let conclusion = conclusion.ok_or_else(|| err(ln, "missing conclusion"))?;
        let proof = nodes.pop().ok_or_else(|| err(ln, "empty proof"))?;
        if proof.label() != &conclusion {
            return Err(err(ln, "proof does not end in the conclusion"));
        }
        out.push(SchemaTemplate {
            name,
            premises,
            conclusion,
            proof,
        });
    }
    Ok(out)
}

static LIBRARY_TEXT: &str = include_str!("../data/schemas.txt");

fn library() -> &'static HashMap<String, SchemaTemplate> {
    static LIB: OnceLock<HashMap<String, SchemaTemplate>> = OnceLock::new();
    LIB.get_or_init(|| {
        parse_library(LIBRARY_TEXT)
            .expect("frozen schema library parses")
            .into_iter()
            .map(|t| (t.name.clone(), t))
            .collect()
    })
}

pub fn all_schemas() -> Vec<&'static SchemaTemplate> {
    let mut v: Vec<_> = library().values().collect();
    v.sort_by(|a, b| a.name.cmp(&b.name));
    v
}

pub fn get_schema(name: &str) -> Result<&'static SchemaTemplate, SchemaError> {
    library().get(name).ok_or_else(|| SchemaError::Unknown(name.into()))
}

/// Library lookup for names known to exist.
pub(crate) fn schema(name: &str) -> &'static SchemaTemplate {
    get_schema(name).expect("schema present in the frozen library")
}

/// Shorthand: apply a library schema with bindings given as pairs.
pub(crate) fn use_schema(name: &str, binds: &[(&str, &Formula)], premises: &[FProof]) -> FProof {
    let mut sigma = Substitution::new();
    for (v, f) in binds {
        sigma.insert(*v, (*f).clone());
    }
    schema(name)
        .apply(&sigma, premises)
        .unwrap_or_else(|e| panic!("{e}"))
}
