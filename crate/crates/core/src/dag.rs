//! Labelled proof dags shared by natural deduction and dag-like Frege
//! derivations, with the node/edge text format.

use std::collections::HashMap;
use std::fmt::Write as _;

use thiserror::Error;

use crate::formula::{parse_formula_lenient, Formula, ParseError};

/// Structural defects of a proof dag.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StructureError {
    #[error("duplicate node id `{0}`")]
    DuplicateNode(String),
    #[error("edge {0} -> {1} references an unknown node")]
    DanglingEdge(String, String),
    #[error("duplicate edge {0} -> {1}")]
    DuplicateEdge(String, String),
    #[error("root `{0}` is not a node")]
    UnknownRoot(String),
    #[error("root `{0}` has outgoing edges")]
    RootHasSuccessor(String),
    #[error("nodes without successors other than the root: {0:?}")]
    ExtraSinks(Vec<String>),
    #[error("cycle through node `{0}`")]
    Cycle(String),
    #[error("empty derivation")]
    Empty,
}

/// A labelled dag with a unique sink (the root). Nodes are stored in a
/// topological order: every premise precedes its conclusion.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProofDag {
    ids: Vec<String>,
    labels: Vec<Formula>,
    premises: Vec<Vec<usize>>,
    root: usize,
}

impl ProofDag {
    /// Validates raw parts; the topological order is recomputed, not trusted.
    pub fn new(
        nodes: Vec<(String, Formula)>,
        edges: Vec<(String, String)>,
        root: &str,
    ) -> Result<ProofDag, StructureError> {
        if nodes.is_empty() {
            return Err(StructureError::Empty);
        }
        let mut index = HashMap::new();
        for (i, (id, _)) in nodes.iter().enumerate() {
            if index.insert(id.clone(), i).is_some() {
                return Err(StructureError::DuplicateNode(id.clone()));
            }
        }
        let n = nodes.len();
        let mut prem: Vec<Vec<usize>> = vec![Vec::new(); n];
        let mut outdeg = vec![0usize; n];
        for (a, b) in &edges {
            let (Some(&ia), Some(&ib)) = (index.get(a), index.get(b)) else {
                return Err(StructureError::DanglingEdge(a.clone(), b.clone()));
            };
            if prem[ib].contains(&ia) {
                return Err(StructureError::DuplicateEdge(a.clone(), b.clone()));
            }
            prem[ib].push(ia);
            outdeg[ia] += 1;
        }
        let Some(&r) = index.get(root) else {
            return Err(StructureError::UnknownRoot(root.to_string()));
        };
        if outdeg[r] != 0 {
            return Err(StructureError::RootHasSuccessor(root.to_string()));
        }
        let sinks: Vec<String> = (0..n)
            .filter(|&i| i != r && outdeg[i] == 0)
            .map(|i| nodes[i].0.clone())
            .collect();
        if !sinks.is_empty() {
            return Err(StructureError::ExtraSinks(sinks));
        }
        // Kahn's algorithm, smallest original position first for stability
        let mut indeg: Vec<usize> = prem.iter().map(|p| p.len()).collect();
        let mut succ: Vec<Vec<usize>> = vec![Vec::new(); n];
        for (v, ps) in prem.iter().enumerate() {
            for &u in ps {
                succ[u].push(v);
            }
        }
        let mut ready: std::collections::BTreeSet<usize> =
            (0..n).filter(|&i| indeg[i] == 0).collect();
        let mut order = Vec::with_capacity(n);
        while let Some(&i) = ready.iter().next() {
            ready.remove(&i);
            order.push(i);
            for &s in &succ[i] {
                indeg[s] -= 1;
                if indeg[s] == 0 {
                    ready.insert(s);
                }
            }
        }
        if order.len() != n {
            let stuck = (0..n).find(|&i| indeg[i] > 0).expect("cycle");
            return Err(StructureError::Cycle(nodes[stuck].0.clone()));
        }
        let mut pos = vec![0usize; n];
        for (k, &i) in order.iter().enumerate() {
            pos[i] = k;
        }
        let mut ids = Vec::with_capacity(n);
        let mut labels = Vec::with_capacity(n);
        let mut premises = Vec::with_capacity(n);
        for &i in &order {
            ids.push(nodes[i].0.clone());
            labels.push(nodes[i].1.clone());
            premises.push(prem[i].iter().map(|&u| pos[u]).collect());
        }
        Ok(ProofDag {
            ids,
            labels,
            premises,
            root: pos[r],
        })
    }

    /// Builds from nodes already in topological order with index premises.
    /// Nodes unreachable from the root are dropped.
    pub fn from_topological(
        labels: Vec<Formula>,
        premises: Vec<Vec<usize>>,
        root: usize,
    ) -> ProofDag {
        assert_eq!(labels.len(), premises.len());
        let n = labels.len();
        let mut live = vec![false; n];
        live[root] = true;
        for v in (0..=root).rev() {
            if live[v] {
                for &u in &premises[v] {
                    assert!(u < v, "premise after conclusion");
                    live[u] = true;
                }
            }
        }
        let mut remap = vec![usize::MAX; n];
        let mut new_labels = Vec::new();
        let mut new_prem = Vec::new();
        for v in 0..=root {
            if live[v] {
                remap[v] = new_labels.len();
                new_labels.push(labels[v].clone());
                new_prem.push(premises[v].iter().map(|&u| remap[u]).collect());
            }
        }
        let root = remap[root];
        let ids = (0..new_labels.len()).map(|i| format!("n{i}")).collect();
        ProofDag {
            ids,
            labels: new_labels,
            premises: new_prem,
            root,
        }
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn root(&self) -> usize {
        self.root
    }

    pub fn root_label(&self) -> &Formula {
        &self.labels[self.root]
    }

    pub fn id(&self, v: usize) -> &str {
        &self.ids[v]
    }

    pub fn ids(&self) -> &[String] {
        &self.ids
    }

    pub fn label(&self, v: usize) -> &Formula {
        &self.labels[v]
    }

    pub fn labels(&self) -> &[Formula] {
        &self.labels
    }

    pub fn premises(&self, v: usize) -> &[usize] {
        &self.premises[v]
    }

    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.premises
            .iter()
            .enumerate()
            .flat_map(|(v, ps)| ps.iter().map(move |&u| (u, v)))
    }

    pub fn out_degrees(&self) -> Vec<usize> {
        let mut out = vec![0; self.len()];
        for (u, _) in self.edges() {
            out[u] += 1;
        }
        out
    }

    pub fn is_tree(&self) -> bool {
        self.out_degrees().iter().all(|&d| d <= 1)
    }

    /// Longest leaf-to-root path, counted in edges.
    pub fn height(&self) -> usize {
        let mut h = vec![0usize; self.len()];
        for v in 0..self.len() {
            h[v] = self.premises[v].iter().map(|&u| h[u] + 1).max().unwrap_or(0);
        }
        h[self.root]
    }

    pub fn size(&self) -> usize {
        self.labels.iter().map(Formula::size).sum()
    }

    pub fn formula_size(&self) -> usize {
        self.labels.iter().map(Formula::size).max().unwrap_or(0)
    }

    pub fn inferential_size(&self) -> usize {
        (0..self.len())
            .map(|v| {
                self.labels[v].size()
                    + self.premises[v]
                        .iter()
                        .map(|&u| self.labels[u].size())
                        .sum::<usize>()
            })
            .sum()
    }

    pub fn with_ids(mut self, ids: Vec<String>) -> ProofDag {
        assert_eq!(ids.len(), self.len());
        self.ids = ids;
        self
    }

    /// Canonical text: nodes sorted by id, then edges, then the root.
    pub fn to_text(&self) -> String {
        let mut order: Vec<usize> = (0..self.len()).collect();
        order.sort_by(|&a, &b| natural_cmp(&self.ids[a], &self.ids[b]));
        let mut out = String::new();
        for &v in &order {
            let _ = writeln!(out, "{} | {}", self.ids[v], self.labels[v]);
        }
        let mut edges: Vec<(usize, usize)> = self.edges().collect();
        edges.sort_by(|a, b| {
            natural_cmp(&self.ids[a.1], &self.ids[b.1])
                .then_with(|| natural_cmp(&self.ids[a.0], &self.ids[b.0]))
        });
        for (u, v) in edges {
            let _ = writeln!(out, "{} -> {}", self.ids[u], self.ids[v]);
        }
        let _ = writeln!(out, "root {}", self.ids[self.root]);
        out
    }
}

/// Orders ids by splitting into digit and non-digit runs (`n2 < n10`).
pub fn natural_cmp(a: &str, b: &str) -> std::cmp::Ordering {
    fn chunks(s: &str) -> Vec<(bool, &str)> {
        let mut out = Vec::new();
        let bytes = s.as_bytes();
        let mut i = 0;
        while i < bytes.len() {
            let digit = bytes[i].is_ascii_digit();
            let start = i;
            while i < bytes.len() && bytes[i].is_ascii_digit() == digit {
                i += 1;
            }
            out.push((digit, &s[start..i]));
        }
        out
    }
    let (ca, cb) = (chunks(a), chunks(b));
    for (x, y) in ca.iter().zip(cb.iter()) {
        let ord = match (x, y) {
            ((true, p), (true, q)) => {
                let p = p.trim_start_matches('0');
                let q = q.trim_start_matches('0');
                p.len().cmp(&q.len()).then_with(|| p.cmp(q))
            }
            ((_, p), (_, q)) => p.cmp(q),
        };
        if ord != std::cmp::Ordering::Equal {
            return ord;
        }
    }
    ca.len().cmp(&cb.len()).then_with(|| a.cmp(b))
}

/// Errors while reading the node/edge text format.
#[derive(Debug, Error)]
pub enum DagFormatError {
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    #[error("line {line}: {source}")]
    Formula { line: usize, source: ParseError },
    #[error("missing `root` declaration")]
    MissingRoot,
    #[error(transparent)]
    Structure(#[from] StructureError),
}

/// Parses `id | formula`, `premise -> conclusion` and `root id` records.
/// Blank lines and `#` comments are ignored.
pub fn parse_dag_text(text: &str) -> Result<ProofDag, DagFormatError> {
    let mut nodes = Vec::new();
    let mut edges = Vec::new();
    let mut root: Option<String> = None;
    for (k, raw) in text.lines().enumerate() {
        let line_no = k + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        if let Some((id, formula)) = line.split_once('|') {
            let id = id.trim();
            if id.is_empty() || id.contains(char::is_whitespace) {
                return Err(DagFormatError::Syntax {
                    line: line_no,
                    msg: format!("bad node id `{id}`"),
                });
            }
            let f = parse_formula_lenient(formula.trim()).map_err(|source| {
                DagFormatError::Formula {
                    line: line_no,
                    source,
                }
            })?;
            nodes.push((id.to_string(), f));
        } else if let Some(rest) = line.strip_prefix("root ") {
            if root.is_some() {
                return Err(DagFormatError::Syntax {
                    line: line_no,
                    msg: "duplicate root declaration".into(),
                });
            }
            root = Some(rest.trim().to_string());
        } else if let Some((a, b)) = line.split_once("->") {
            let (a, b) = (a.trim(), b.trim());
            if a.is_empty() || b.is_empty() || b.contains("->") {
                return Err(DagFormatError::Syntax {
                    line: line_no,
                    msg: "bad edge record".into(),
                });
            }
            edges.push((a.to_string(), b.to_string()));
        } else {
            return Err(DagFormatError::Syntax {
                line: line_no,
                msg: format!("unrecognized record `{line}`"),
            });
        }
    }
    let root = root.ok_or(DagFormatError::MissingRoot)?;
    Ok(ProofDag::new(nodes, edges, &root)?)
}

/// Interns formulas to dense ids, in first-seen order.
#[derive(Default, Debug)]
pub struct Interner {
    ids: HashMap<Formula, usize>,
    items: Vec<Formula>,
}

impl Interner {
    pub fn new() -> Interner {
        Interner::default()
    }

    pub fn intern(&mut self, f: &Formula) -> usize {
        if let Some(&i) = self.ids.get(f) {
            return i;
        }
        let i = self.items.len();
        self.ids.insert(f.clone(), i);
        self.items.push(f.clone());
        i
    }

    pub fn get(&self, f: &Formula) -> Option<usize> {
        self.ids.get(f).copied()
    }

    pub fn formula(&self, i: usize) -> &Formula {
        &self.items[i]
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn items(&self) -> &[Formula] {
        &self.items
    }
}

/// Incremental construction of a dag in topological order.
#[derive(Default, Debug, Clone)]
pub struct DagBuilder {
    labels: Vec<Formula>,
    premises: Vec<Vec<usize>>,
}

impl DagBuilder {
    pub fn new() -> DagBuilder {
        DagBuilder::default()
    }

    pub fn add(&mut self, label: Formula, premises: Vec<usize>) -> usize {
        debug_assert!(premises.iter().all(|&u| u < self.labels.len()));
        self.labels.push(label);
        self.premises.push(premises);
        self.labels.len() - 1
    }

    pub fn label(&self, v: usize) -> &Formula {
        &self.labels[v]
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn finish(self, root: usize) -> ProofDag {
        ProofDag::from_topological(self.labels, self.premises, root)
    }
}
