//! Smallest β-normal, η-long natural deduction derivations by bounded
//! search (terms are counted in derivation nodes).

use std::collections::{BTreeSet, HashMap};
use std::rc::Rc;

use crate::formula::Formula;
use crate::natded::{NmBuilder, NmDerivation};

enum Term {
    Lam(Formula, Rc<Term>),
    App(Formula, Vec<Rc<Term>>),
}

fn size(t: &Term) -> usize {
    match t {
        Term::Lam(_, b) => 1 + size(b),
        Term::App(_, args) => 1 + args.iter().map(|a| 1 + size(a)).sum::<usize>(),
    }
}

type Ctx = Rc<BTreeSet<Formula>>;

#[derive(Default)]
struct Entry {
    best: Option<(usize, Rc<Term>)>,
    none_upto: usize,
}

struct Search {
    memo: HashMap<(Ctx, Formula), Entry>,
    steps: usize,
    limit: usize,
}

const STEP_LIMIT: usize = 2_000_000;

impl Search {
    fn solve(&mut self, ctx: &Ctx, goal: &Formula, bound: usize) -> Option<(usize, Rc<Term>)> {
        self.steps += 1;
        if bound == 0 || self.steps > self.limit {
            return None;
        }
        let key = (ctx.clone(), goal.clone());
        if let Some(e) = self.memo.get(&key) {
            if let Some((s, t)) = &e.best {
                return (*s <= bound).then(|| (*s, t.clone()));
            }
            if e.none_upto >= bound {
                return None;
            }
        }
        let found = self.expand(ctx, goal, bound);
        let e = self.memo.entry(key).or_default();
        match &found {
            Some(f) => e.best = Some(f.clone()),
            None => e.none_upto = e.none_upto.max(bound),
        }
        found
    }

    fn expand(&mut self, ctx: &Ctx, goal: &Formula, bound: usize) -> Option<(usize, Rc<Term>)> {
        if let Some((a, b)) = goal.as_imp() {
            let inner: Ctx = if ctx.contains(a) {
                ctx.clone()
            } else {
                let mut c = (**ctx).clone();
                c.insert(a.clone());
                Rc::new(c)
            };
            let (s, t) = self.solve(&inner, b, bound - 1)?;
            return Some((s + 1, Rc::new(Term::Lam(a.clone(), t))));
        }
        let mut best: Option<(usize, Rc<Term>)> = None;
        for h in ctx.iter() {
            let (args, head) = h.uncurry();
            if head != goal {
                continue;
            }
            let k = args.len();
            let limit = best.as_ref().map_or(bound, |(s, _)| s - 1);
            if 1 + 2 * k > limit {
                continue;
            }
            let mut total = 1 + k;
            let mut terms = Vec::with_capacity(k);
            for (i, a) in args.iter().enumerate() {
                let room = limit - total - (k - 1 - i);
                match self.solve(ctx, a, room) {
                    Some((s, t)) => {
                        total += s;
                        terms.push(t);
                    }
                    None => break,
                }
            }
            if terms.len() == k && total <= limit {
                best = Some((total, Rc::new(Term::App(h.clone(), terms))));
            }
        }
        best
    }
}

fn build(t: &Term, b: &mut NmBuilder) -> usize {
    match t {
        Term::Lam(a, body) => {
            let v = build(body, b);
            b.intro(a.clone(), v)
        }
        Term::App(h, args) => {
            let mut cur = b.leaf(h.clone());
            for a in args {
                let x = build(a, b);
                cur = b.elim(x, cur);
            }
            cur
        }
    }
}

/// A small derivation of `goal` from `gamma` with at most `max` nodes, or
/// `None` when the search gives up.
pub(crate) fn smallest(gamma: &[Formula], goal: &Formula, max: usize) -> Option<NmDerivation> {
    smallest_within(gamma, goal, max, STEP_LIMIT)
}

pub(crate) fn smallest_within(gamma: &[Formula], goal: &Formula, max: usize, step_limit: usize) -> Option<NmDerivation> {
    let mut s = Search {
        memo: HashMap::new(),
        steps: 0,
        limit: step_limit,
    };
    let ctx: Ctx = Rc::new(gamma.iter().cloned().collect());
    let mut bound = 8;
    loop {
        if let Some((n, t)) = s.solve(&ctx, goal, bound) {
            debug_assert_eq!(n, size(&t));
            let mut b = NmBuilder::new();
            let root = build(&t, &mut b);
            return Some(b.finish(root));
        }
        if bound >= max || s.steps > s.limit {
            return None;
        }
        bound = (bound * 2).min(max);
    }
}
