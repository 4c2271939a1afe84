//! Implicational formulas: construction, parsing, printing, substitution,
//! implication folds over indexed sequences, and relativized conjunction.

use std::cmp::Ordering;
use std::collections::hash_map::DefaultHasher;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::Arc;

use thiserror::Error;

/// Name of the reserved variable used to build the closed tautology `⊤`.
pub const TOP_VAR: &str = "_t";

/// An implicational formula. Cheap to clone; subformulas are shared.
///
/// Size and a structural hash are cached at construction, so hashing and
/// size queries are O(1) regardless of formula depth. All size metrics count
/// tree occurrences, never shared nodes.
#[derive(Clone)]
pub struct Formula(Arc<Node>);

enum Node {
    Var(Arc<str>),
    Imp {
        ante: Formula,
        cons: Formula,
        size: usize,
        hash: u64,
    },
}

/// Borrowed view of the top-level constructor.
#[derive(Debug, Clone, Copy)]
pub enum Shape<'a> {
    Var(&'a str),
    Imp(&'a Formula, &'a Formula),
}

fn var_hash(name: &str) -> u64 {
    let mut h = DefaultHasher::new();
    0u8.hash(&mut h);
    name.hash(&mut h);
    h.finish()
}

impl Formula {
    pub fn var(name: impl AsRef<str>) -> Formula {
        Formula(Arc::new(Node::Var(Arc::from(name.as_ref()))))
    }

    pub fn imp(ante: Formula, cons: Formula) -> Formula {
        let size = 1 + ante.size() + cons.size();
        let mut h = DefaultHasher::new();
        1u8.hash(&mut h);
        ante.structural_hash().hash(&mut h);
        cons.structural_hash().hash(&mut h);
        let hash = h.finish();
        Formula(Arc::new(Node::Imp {
            ante,
            cons,
            size,
            hash,
        }))
    }

    /// The fixed closed tautology `_t -> _t`.
    pub fn top() -> Formula {
        let t = Formula::var(TOP_VAR);
        Formula::imp(t.clone(), t)
    }

    pub fn shape(&self) -> Shape<'_> {
        match &*self.0 {
            Node::Var(name) => Shape::Var(name),
            Node::Imp { ante, cons, .. } => Shape::Imp(ante, cons),
        }
    }

    pub fn as_var(&self) -> Option<&str> {
        match &*self.0 {
            Node::Var(name) => Some(name),
            Node::Imp { .. } => None,
        }
    }

    pub fn as_imp(&self) -> Option<(&Formula, &Formula)> {
        match &*self.0 {
            Node::Var(_) => None,
            Node::Imp { ante, cons, .. } => Some((ante, cons)),
        }
    }

    pub fn is_var(&self) -> bool {
        matches!(&*self.0, Node::Var(_))
    }

    /// Number of occurrences of variables and connectives.
    pub fn size(&self) -> usize {
        match &*self.0 {
            Node::Var(_) => 1,
            Node::Imp { size, .. } => *size,
        }
    }

    fn structural_hash(&self) -> u64 {
        match &*self.0 {
            Node::Var(name) => var_hash(name),
            Node::Imp { hash, .. } => *hash,
        }
    }

    pub fn ptr_eq(&self, other: &Formula) -> bool {
        Arc::ptr_eq(&self.0, &other.0)
    }

    /// Variables occurring in the formula.
    pub fn vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_vars(&mut out);
        out
    }

    fn collect_vars(&self, out: &mut BTreeSet<String>) {
        let mut stack = vec![self];
        while let Some(f) = stack.pop() {
            match f.shape() {
                Shape::Var(v) => {
                    if !out.contains(v) {
                        out.insert(v.to_string());
                    }
                }
                Shape::Imp(a, b) => {
                    stack.push(a);
                    stack.push(b);
                }
            }
        }
    }

    pub fn contains_var(&self, name: &str) -> bool {
        let mut stack = vec![self];
        while let Some(f) = stack.pop() {
            match f.shape() {
                Shape::Var(v) => {
                    if v == name {
                        return true;
                    }
                }
                Shape::Imp(a, b) => {
                    stack.push(a);
                    stack.push(b);
                }
            }
        }
        false
    }

    /// Splits `a1 -> a2 -> ... -> an -> head` into `([a1, ..., an], head)`.
    pub fn uncurry(&self) -> (Vec<&Formula>, &Formula) {
        let mut args = Vec::new();
        let mut cur = self;
        while let Some((a, b)) = cur.as_imp() {
            args.push(a);
            cur = b;
        }
        (args, cur)
    }

    /// `(self -> phi) -> phi`
    pub fn relativize(&self, phi: &Formula) -> Formula {
        Formula::imp(Formula::imp(self.clone(), phi.clone()), phi.clone())
    }

    /// Relativized conjunction `(self -> other -> phi) -> phi`.
    pub fn rel_and(&self, other: &Formula, phi: &Formula) -> Formula {
        Formula::imp(
            Formula::imp(self.clone(), Formula::imp(other.clone(), phi.clone())),
            phi.clone(),
        )
    }
}

/// Builds `a1 -> a2 -> ... -> head` from a written-order list of antecedents.
pub fn imps<'a, I>(ants: I, head: Formula) -> Formula
where
    I: IntoIterator<Item = &'a Formula>,
    I::IntoIter: DoubleEndedIterator,
{
    ants.into_iter()
        .rev()
        .fold(head, |acc, a| Formula::imp(a.clone(), acc))
}

impl PartialEq for Formula {
    fn eq(&self, other: &Formula) -> bool {
        if Arc::ptr_eq(&self.0, &other.0) {
            return true;
        }
        match (&*self.0, &*other.0) {
            (Node::Var(a), Node::Var(b)) => a == b,
            (
                Node::Imp {
                    ante: a1,
                    cons: c1,
                    size: s1,
                    hash: h1,
                },
                Node::Imp {
                    ante: a2,
                    cons: c2,
                    size: s2,
                    hash: h2,
                },
            ) => h1 == h2 && s1 == s2 && a1 == a2 && c1 == c2,
            _ => false,
        }
    }
}

impl Eq for Formula {}

impl Hash for Formula {
    fn hash<H: Hasher>(&self, state: &mut H) {
        state.write_u64(self.structural_hash());
    }
}

impl Ord for Formula {
    fn cmp(&self, other: &Formula) -> Ordering {
        if Arc::ptr_eq(&self.0, &other.0) {
            return Ordering::Equal;
        }
        match (self.shape(), other.shape()) {
            (Shape::Var(a), Shape::Var(b)) => a.cmp(b),
            (Shape::Var(_), Shape::Imp(..)) => Ordering::Less,
            (Shape::Imp(..), Shape::Var(_)) => Ordering::Greater,
            (Shape::Imp(a1, c1), Shape::Imp(a2, c2)) => a1.cmp(a2).then_with(|| c1.cmp(c2)),
        }
    }
}

impl PartialOrd for Formula {
    fn partial_cmp(&self, other: &Formula) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        // right spine iteratively; only antecedents recurse
        let mut cur = self;
        loop {
            match cur.shape() {
                Shape::Var(v) => return f.write_str(v),
                Shape::Imp(a, b) => {
                    if a.is_var() {
                        write!(f, "{a} -> ")?;
                    } else {
                        write!(f, "({a}) -> ")?;
                    }
                    cur = b;
                }
            }
        }
    }
}

impl fmt::Debug for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "`{self}`")
    }
}

/// Syntax error with the byte offset where parsing failed.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("syntax error at offset {pos}: {msg}")]
pub struct ParseError {
    pub pos: usize,
    pub msg: String,
}

pub fn is_ident(s: &str) -> bool {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '\'')
}

#[derive(Debug, Clone, PartialEq)]
enum Token {
    Ident(String),
    Arrow,
    LParen,
    RParen,
}

fn tokenize(text: &str) -> Result<Vec<(usize, Token)>, ParseError> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        if c.is_ascii_whitespace() {
            i += 1;
        } else if c == b'(' {
            out.push((i, Token::LParen));
            i += 1;
        } else if c == b')' {
            out.push((i, Token::RParen));
            i += 1;
        } else if c == b'-' {
            if bytes.get(i + 1) == Some(&b'>') {
                out.push((i, Token::Arrow));
                i += 2;
            } else {
                return Err(ParseError {
                    pos: i,
                    msg: "expected `->`".into(),
                });
            }
        } else if c.is_ascii_alphabetic() || c == b'_' {
            let start = i;
            while i < bytes.len()
                && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_' || bytes[i] == b'\'')
            {
                i += 1;
            }
            out.push((start, Token::Ident(text[start..i].to_string())));
        } else {
            let ch = text[i..].chars().next().unwrap_or('?');
            return Err(ParseError {
                pos: i,
                msg: format!("unexpected character {ch:?}"),
            });
        }
    }
    Ok(out)
}

struct Parser {
    tokens: Vec<(usize, Token)>,
    pos: usize,
    end: usize,
    allow_reserved: bool,
}

impl Parser {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos).map(|(_, t)| t)
    }

    fn offset(&self) -> usize {
        self.tokens.get(self.pos).map(|(p, _)| *p).unwrap_or(self.end)
    }

    fn err<T>(&self, msg: &str) -> Result<T, ParseError> {
        Err(ParseError {
            pos: self.offset(),
            msg: msg.to_string(),
        })
    }

    // formula := atom | atom "->" formula
    fn formula(&mut self) -> Result<Formula, ParseError> {
        let mut ants = vec![self.atom()?];
        while self.peek() == Some(&Token::Arrow) {
            self.pos += 1;
            ants.push(self.atom()?);
        }
        let head = ants.pop().expect("at least one atom");
        Ok(ants
            .into_iter()
            .rev()
            .fold(head, |acc, a| Formula::imp(a, acc)))
    }

    fn atom(&mut self) -> Result<Formula, ParseError> {
        match self.peek().cloned() {
            Some(Token::Ident(name)) => {
                if name == TOP_VAR && !self.allow_reserved {
                    return self.err("`_t` is a reserved variable name");
                }
                self.pos += 1;
                Ok(Formula::var(name))
            }
            Some(Token::LParen) => {
                self.pos += 1;
                let f = self.formula()?;
                if self.peek() != Some(&Token::RParen) {
                    return self.err("expected `)`");
                }
                self.pos += 1;
                Ok(f)
            }
            Some(_) => self.err("expected a variable or `(`"),
            None => self.err("unexpected end of input"),
        }
    }
}

fn parse_with(text: &str, allow_reserved: bool) -> Result<Formula, ParseError> {
    let tokens = tokenize(text)?;
    let mut p = Parser {
        tokens,
        pos: 0,
        end: text.len(),
        allow_reserved,
    };
    let f = p.formula()?;
    if p.pos != p.tokens.len() {
        return p.err("trailing input");
    }
    Ok(f)
}

/// Parses user-supplied formula text. The reserved variable `_t` is rejected.
pub fn parse_formula(text: &str) -> Result<Formula, ParseError> {
    parse_with(text, false)
}

/// Parses machine-written formula text (proof files), where `_t` may occur.
pub fn parse_formula_lenient(text: &str) -> Result<Formula, ParseError> {
    parse_with(text, true)
}

impl std::str::FromStr for Formula {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Formula, ParseError> {
        parse_formula_lenient(s)
    }
}

pub fn formula_size(phi: &Formula) -> usize {
    phi.size()
}

/// Errors from building indexed sequences.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SeqError {
    #[error("sequence indices must be strictly increasing (index {0} after {1})")]
    NotIncreasing(usize, usize),
    #[error("index {index} outside the ambient range [0, {bound})")]
    OutOfRange { index: usize, bound: usize },
}

/// A finite sequence of formulas indexed by a finite set of naturals.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Default)]
pub struct FormulaSeq {
    entries: Vec<(usize, Formula)>,
}

impl FormulaSeq {
    pub fn new(entries: Vec<(usize, Formula)>) -> Result<FormulaSeq, SeqError> {
        for w in entries.windows(2) {
            if w[1].0 <= w[0].0 {
                return Err(SeqError::NotIncreasing(w[1].0, w[0].0));
            }
        }
        Ok(FormulaSeq { entries })
    }

    pub fn empty() -> FormulaSeq {
        FormulaSeq::default()
    }

    /// Plain sequence indexed `0..n`.
    pub fn from_formulas<I: IntoIterator<Item = Formula>>(items: I) -> FormulaSeq {
        FormulaSeq {
            entries: items.into_iter().enumerate().collect(),
        }
    }

    pub fn entries(&self) -> &[(usize, Formula)] {
        &self.entries
    }

    pub fn formulas(&self) -> impl DoubleEndedIterator<Item = &Formula> + '_ {
        self.entries.iter().map(|(_, f)| f)
    }

    pub fn indices(&self) -> BTreeSet<usize> {
        self.entries.iter().map(|(i, _)| *i).collect()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn total_size(&self) -> usize {
        self.entries.iter().map(|(_, f)| f.size()).sum()
    }

    pub fn get(&self, index: usize) -> Option<&Formula> {
        self.entries
            .binary_search_by_key(&index, |(i, _)| *i)
            .ok()
            .map(|k| &self.entries[k].1)
    }

    pub fn max_index(&self) -> Option<usize> {
        self.entries.last().map(|(i, _)| *i)
    }

    /// Keeps exactly the entries whose index lies in `keep`.
    pub fn restrict(&self, keep: &BTreeSet<usize>) -> FormulaSeq {
        FormulaSeq {
            entries: self
                .entries
                .iter()
                .filter(|(i, _)| keep.contains(i))
                .cloned()
                .collect(),
        }
    }

    pub fn restrict_range(&self, lo: usize, hi: usize) -> FormulaSeq {
        FormulaSeq {
            entries: self
                .entries
                .iter()
                .filter(|(i, _)| *i >= lo && *i < hi)
                .cloned()
                .collect(),
        }
    }

    /// Same formulas with every index decreased by `by`.
    pub fn shift_down(&self, by: usize) -> FormulaSeq {
        FormulaSeq {
            entries: self
                .entries
                .iter()
                .map(|(i, f)| (i - by, f.clone()))
                .collect(),
        }
    }

    /// `self ⊆ other`: indices contained and formulas identical at each.
    pub fn is_subseq_of(&self, other: &FormulaSeq) -> bool {
        self.entries
            .iter()
            .all(|(i, f)| other.get(*i).is_some_and(|g| g == f))
    }

    pub fn check_bound(&self, bound: usize) -> Result<(), SeqError> {
        match self.max_index() {
            Some(i) if i >= bound => Err(SeqError::OutOfRange { index: i, bound }),
            _ => Ok(()),
        }
    }

    /// Renumbers a written-order stack of sequences so that
    /// `stack([A, B, C]).fold(phi) == A -> B -> C -> phi`.
    pub fn stack(parts: &[&FormulaSeq]) -> FormulaSeq {
        let mut entries = Vec::new();
        for part in parts.iter().rev() {
            for (_, f) in &part.entries {
                entries.push((entries.len(), f.clone()));
            }
        }
        FormulaSeq { entries }
    }

    /// `Γ → ψ`: the entry with the largest index is the outermost antecedent.
    pub fn fold_imp(&self, psi: &Formula) -> Formula {
        self.entries
            .iter()
            .fold(psi.clone(), |acc, (_, f)| Formula::imp(f.clone(), acc))
    }
}

pub fn fold_imp(gamma: &FormulaSeq, psi: &Formula) -> Formula {
    gamma.fold_imp(psi)
}

/// A substitution fixing every variable outside its bindings.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Substitution {
    bindings: BTreeMap<String, Formula>,
}

impl Substitution {
    pub fn new() -> Substitution {
        Substitution::default()
    }

    pub fn bind(mut self, var: impl Into<String>, value: Formula) -> Substitution {
        self.bindings.insert(var.into(), value);
        self
    }

    pub fn insert(&mut self, var: impl Into<String>, value: Formula) -> Option<Formula> {
        self.bindings.insert(var.into(), value)
    }

    pub fn get(&self, var: &str) -> Option<&Formula> {
        self.bindings.get(var)
    }

    pub fn bindings(&self) -> &BTreeMap<String, Formula> {
        &self.bindings
    }

    pub fn apply(&self, phi: &Formula) -> Formula {
        if self.bindings.is_empty() {
            return phi.clone();
        }
        let mut memo = std::collections::HashMap::new();
        self.apply_memo(phi, &mut memo)
    }

    fn apply_memo(
        &self,
        phi: &Formula,
        memo: &mut std::collections::HashMap<Formula, Formula>,
    ) -> Formula {
        match phi.shape() {
            Shape::Var(v) => self.bindings.get(v).cloned().unwrap_or_else(|| phi.clone()),
            Shape::Imp(a, b) => {
                if let Some(done) = memo.get(phi) {
                    return done.clone();
                }
                let out = Formula::imp(self.apply_memo(a, memo), self.apply_memo(b, memo));
                memo.insert(phi.clone(), out.clone());
                out
            }
        }
    }

    /// Extends `self` so that `self(pattern) == target`, if possible.
    /// Variables of `pattern` listed in `fixed` must match themselves.
    pub fn match_into(
        &mut self,
        pattern: &Formula,
        target: &Formula,
        fixed: &dyn Fn(&str) -> bool,
    ) -> bool {
        match pattern.shape() {
            Shape::Var(v) if fixed(v) => pattern == target,
            Shape::Var(v) => match self.bindings.get(v) {
                Some(bound) => bound == target,
                None => {
                    self.bindings.insert(v.to_string(), target.clone());
                    true
                }
            },
            Shape::Imp(pa, pb) => match target.as_imp() {
                Some((ta, tb)) => {
                    self.match_into(pa, ta, fixed) && self.match_into(pb, tb, fixed)
                }
                None => false,
            },
        }
    }
}

pub fn apply_subst(sigma: &Substitution, phi: &Formula) -> Formula {
    sigma.apply(phi)
}

/// Relativized conjunction of an indexed sequence, arranged as a balanced
/// tree over power-of-two index splits. `m` is the ambient index bound.
pub fn ret_build(phi: &Formula, gamma: &FormulaSeq, m: usize) -> Result<Formula, SeqError> {
    gamma.check_bound(m.max(1))?;
    Ok(ret(phi, gamma))
}

/// The index split used by the relativized conjunction for an index set
/// with at least two elements.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RetSplit {
    /// All indices lie in `[2^k, 2^{k+1})`; shift them down by `2^k`.
    Shift(usize),
    /// Indices on both sides of `2^k`.
    Split(usize),
}

/// Classifies a (sorted, nonempty-with-two-or-more) index list.
pub fn ret_split(indices: &[usize]) -> RetSplit {
    let max = *indices.last().expect("nonempty");
    let min = indices[0];
    let half = 1usize << (usize::BITS - 1 - max.leading_zeros());
    if min >= half {
        RetSplit::Shift(half)
    } else {
        RetSplit::Split(half)
    }
}

/// Unchecked relativized conjunction (no ambient bound).
pub fn ret(phi: &Formula, gamma: &FormulaSeq) -> Formula {
    match gamma.len() {
        0 => Formula::top(),
        1 => gamma.entries[0].1.relativize(phi),
        _ => {
            let idx: Vec<usize> = gamma.entries.iter().map(|(i, _)| *i).collect();
            match ret_split(&idx) {
                RetSplit::Shift(h) => ret(phi, &gamma.shift_down(h)),
                RetSplit::Split(h) => {
                    let lo = gamma.restrict_range(0, h);
                    let hi = gamma.restrict_range(h, usize::MAX).shift_down(h);
                    ret(phi, &lo).rel_and(&ret(phi, &hi), phi)
                }
            }
        }
    }
}

/// Number of leaves and inner nodes of the relativized-conjunction tree.
pub fn ret_tree_shape(gamma: &FormulaSeq) -> (usize, usize) {
    match gamma.len() {
        0 => (0, 0),
        1 => (1, 0),
        _ => {
            let idx: Vec<usize> = gamma.entries.iter().map(|(i, _)| *i).collect();
            match ret_split(&idx) {
                RetSplit::Shift(h) => ret_tree_shape(&gamma.shift_down(h)),
                RetSplit::Split(h) => {
                    let (l0, i0) = ret_tree_shape(&gamma.restrict_range(0, h));
                    let (l1, i1) = ret_tree_shape(&gamma.restrict_range(h, usize::MAX).shift_down(h));
                    (l0 + l1, i0 + i1 + 1)
                }
            }
        }
    }
}
