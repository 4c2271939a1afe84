#![allow(dead_code)]

use std::collections::HashSet;
use std::fs;
use std::path::PathBuf;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use nmproof::dag::parse_dag_text;
use nmproof::formula::{parse_formula, Formula};
use nmproof::frege::{seq_to_dag, FregeDag, FregeSeq};
use nmproof::natded::{NmBuilder, NmDerivation};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn f(s: &str) -> Formula {
    parse_formula(s).unwrap()
}

pub fn var(s: &str) -> Formula {
    Formula::var(s)
}

pub fn imp(a: &Formula, b: &Formula) -> Formula {
    Formula::imp(a.clone(), b.clone())
}

/// Uniform-ish random formula with exactly `size` symbols (`size` odd).
pub fn formula_of_size(r: &mut impl Rng, vars: &[&str], size: usize) -> Formula {
    if size <= 1 {
        return var(vars[r.gen_range(0..vars.len())]);
    }
    let left = 2 * r.gen_range(0..(size - 1) / 2) + 1;
    let right = size - 1 - left;
    imp(&formula_of_size(r, vars, left), &formula_of_size(r, vars, right))
}

pub fn random_formula(r: &mut impl Rng, vars: &[&str], max_size: usize) -> Formula {
    let size = 2 * r.gen_range(0..=(max_size - 1) / 2) + 1;
    formula_of_size(r, vars, size)
}

/// A random well-formed natural deduction dag with at most `max_nodes`
/// nodes, with sharing and discharges; not necessarily closed.
pub fn random_nm_dag(r: &mut impl Rng, max_nodes: usize) -> NmDerivation {
    let vars = ["p", "q", "r"];
    let pool = |r: &mut ChaCha8Rng| random_formula(r, &vars, 3);
    let mut inner = ChaCha8Rng::seed_from_u64(r.gen());
    let mut b = NmBuilder::new();
    let mut leaves: Vec<Formula> = Vec::new();
    let first = pool(&mut inner);
    leaves.push(first.clone());
    b.leaf(first);
    while b.len() < max_nodes {
        let room = max_nodes - b.len();
        let n = b.len();
        match inner.gen_range(0..10) {
            0..=2 => {
                let x = if !leaves.is_empty() && inner.gen_bool(0.5) {
                    leaves[inner.gen_range(0..leaves.len())].clone()
                } else {
                    pool(&mut inner)
                };
                leaves.push(x.clone());
                b.leaf(x);
            }
            3..=5 => {
                let u = inner.gen_range(0..n);
                let a = if inner.gen_bool(0.7) {
                    leaves[inner.gen_range(0..leaves.len())].clone()
                } else {
                    pool(&mut inner)
                };
                b.intro(a, u);
            }
            _ => {
                let x = inner.gen_range(0..n);
                let alpha = b.label(x).clone();
                let majors: Vec<usize> = (0..n)
                    .filter(|&w| b.label(w).as_imp().is_some_and(|(a, _)| a == &alpha))
                    .collect();
                if !majors.is_empty() && inner.gen_bool(0.7) {
                    let w = majors[inner.gen_range(0..majors.len())];
                    b.elim(x, w);
                } else if room >= 2 {
                    let beta = pool(&mut inner);
                    let maj = imp(&alpha, &beta);
                    leaves.push(maj.clone());
                    let w = b.leaf(maj);
                    b.elim(x, w);
                } else {
                    break;
                }
            }
        }
    }
    let root = b.len() - 1;
    b.finish(root)
}

/// `p0, p0 → p1, p1, …, p_n` with `n` modus ponens steps.
pub fn mp_chain(n: usize) -> (FregeSeq, Vec<Formula>, Formula) {
    let p = |i: usize| var(&format!("p{i}"));
    let mut lines = vec![p(0)];
    let mut gamma = vec![p(0)];
    for i in 0..n {
        let step = imp(&p(i), &p(i + 1));
        gamma.push(step.clone());
        lines.push(step);
        lines.push(p(i + 1));
    }
    (FregeSeq::new(lines).unwrap(), gamma, p(n))
}

pub fn mp_chain_dag(n: usize) -> (FregeDag, HashSet<Formula>, Formula) {
    let (seq, gamma, phi) = mp_chain(n);
    let g: HashSet<Formula> = gamma.into_iter().collect();
    (seq_to_dag(&seq, &g).unwrap(), g, phi)
}

/// The same chain as a natural deduction dag of eliminations.
pub fn mp_chain_nm(n: usize) -> (NmDerivation, Vec<Formula>) {
    let p = |i: usize| var(&format!("p{i}"));
    let mut b = NmBuilder::new();
    let mut cur = b.leaf(p(0));
    let mut gamma = vec![p(0)];
    for i in 0..n {
        let step = imp(&p(i), &p(i + 1));
        gamma.push(step.clone());
        let m = b.leaf(step);
        cur = b.elim(cur, m);
    }
    (b.finish(cur), gamma)
}

/// Stacked diamonds: node `x_{i+1}` uses `x_i` twice, via the assumption
/// `p_i → p_i → p_{i+1}`. With `close`, the shared leaf `p0` is discharged.
pub fn diamond(depth: usize, close: bool) -> (NmDerivation, Vec<Formula>) {
    let p = |i: usize| var(&format!("p{i}"));
    let mut b = NmBuilder::new();
    let mut cur = b.leaf(p(0));
    let mut gamma = if close { vec![] } else { vec![p(0)] };
    for i in 0..depth {
        let twice = imp(&p(i), &imp(&p(i), &p(i + 1)));
        gamma.push(twice.clone());
        let m = b.leaf(twice);
        let half = b.elim(cur, m);
        cur = b.elim(cur, half);
    }
    if close {
        cur = b.intro(p(0), cur);
    }
    (b.finish(cur), gamma)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Kind {
    Nm,
    Frege,
}

/// One frozen proof: the file carries `# assume` lines before the dag.
pub struct Entry {
    pub name: String,
    pub kind: Kind,
    pub gamma: Vec<Formula>,
    pub text: String,
}

impl Entry {
    pub fn gamma_set(&self) -> HashSet<Formula> {
        self.gamma.iter().cloned().collect()
    }

    pub fn nm(&self) -> NmDerivation {
        NmDerivation::from_dag(parse_dag_text(&self.text).unwrap())
    }

    pub fn frege(&self) -> FregeDag {
        FregeDag::from_dag(parse_dag_text(&self.text).unwrap())
    }
}

pub fn corpus_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/corpus")
}

pub fn render_entry(gamma: &[Formula], body: &str) -> String {
    let mut s = String::new();
    for g in gamma {
        s.push_str(&format!("# assume {g}\n"));
    }
    s.push_str(body);
    s
}

pub fn load_corpus() -> Vec<Entry> {
    let mut paths: Vec<PathBuf> = fs::read_dir(corpus_dir())
        .expect("corpus directory")
        .map(|e| e.unwrap().path())
        .collect();
    paths.sort();
    paths
        .into_iter()
        .filter_map(|p| {
            let kind = match p.extension()?.to_str()? {
                "nm" => Kind::Nm,
                "frege" => Kind::Frege,
                _ => return None,
            };
            let text = fs::read_to_string(&p).unwrap();
            let gamma = text
                .lines()
                .filter_map(|l| l.strip_prefix("# assume "))
                .map(f)
                .collect();
            Some(Entry {
                name: p.file_stem()?.to_string_lossy().into_owned(),
                kind,
                gamma,
                text,
            })
        })
        .collect()
}
