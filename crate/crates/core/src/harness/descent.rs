use std::cmp::Ordering;
use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::str::FromStr;

use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use super::enumerate::{enumerate_fragment, GeneratorConfig};
use crate::order::compare_normal;
use crate::term::{normalize, Collapse, StageRecord, SystemFlavor, Term};
use crate::wf::{is_regular, validate};

/// Stop exploring after this many distinct terms in exhaustive mode.
pub const EXHAUSTIVE_NODE_LIMIT: usize = 200_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Strategy {
    /// Always step to the largest smaller neighbour.
    Greedy,
    Random(u64),
    /// Longest path through the whole move graph below the seed.
    Exhaustive,
}

impl FromStr for Strategy {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "greedy" => Ok(Strategy::Greedy),
            "random" => Ok(Strategy::Random(0)),
            "exhaustive" => Ok(Strategy::Exhaustive),
            _ => match s.strip_prefix("random:") {
                Some(n) => n
                    .parse()
                    .map(Strategy::Random)
                    .map_err(|_| format!("bad random seed `{n}`")),
                None => Err(format!(
                    "unknown strategy `{s}` (expected greedy, random[:SEED] or exhaustive)"
                )),
            },
        }
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Strategy::Greedy => f.write_str("greedy"),
            Strategy::Random(s) => write!(f, "random:{s}"),
            Strategy::Exhaustive => f.write_str("exhaustive"),
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DescentError {
    #[error("seed is not well formed: {0}")]
    IllFormed(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DescentResult {
    /// Strictly descending, starting at the normalized seed.
    pub sequence: Vec<Term>,
    /// Distinct terms whose moves were computed.
    pub explored: usize,
    /// Every branch was followed to a term without moves.
    pub complete: bool,
    /// Terms reached that admit no further move.
    pub leaves: BTreeSet<Term>,
}

/// Looks for a long strictly descending sequence below `seed`, using the
/// size-3 fragment as the pool of replacement components.
pub fn search_descending(
    seed: &Term,
    flavor: SystemFlavor,
    step_budget: usize,
    strategy: Strategy,
) -> Result<DescentResult, DescentError> {
    let pool = enumerate_fragment(flavor, 3, &GeneratorConfig::standard());
    search_descending_with(seed, flavor, step_budget, strategy, &pool)
}

pub fn search_descending_with(
    seed: &Term,
    flavor: SystemFlavor,
    step_budget: usize,
    strategy: Strategy,
    pool: &[Term],
) -> Result<DescentResult, DescentError> {
    if let Some(v) = validate(seed, flavor).first() {
        return Err(DescentError::IllFormed(v.to_string()));
    }
    let start = normalize(seed);
    let mut pool: Vec<Term> = pool.iter().map(normalize).collect();
    pool.sort_by(compare_normal);
    pool.dedup();
    let search = Search { flavor, pool };
    Ok(match strategy {
        Strategy::Greedy => search.walk(start, step_budget, |ms, _| ms.last().cloned()),
        Strategy::Random(seed) => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            search.walk(start, step_budget, move |ms, _| {
                ms.get(rng.random_range(0..ms.len())).cloned()
            })
        }
        Strategy::Exhaustive => search.exhaustive(start, step_budget),
    })
}

struct Search {
    flavor: SystemFlavor,
    /// Sorted ascending by the ordinal order.
    pool: Vec<Term>,
}

/// Moves of a term sorted ascending, so the largest comes last.
type Moves = Vec<Term>;

impl Search {
    fn walk(
        &self,
        start: Term,
        budget: usize,
        mut choose: impl FnMut(&Moves, &Term) -> Option<Term>,
    ) -> DescentResult {
        let mut sequence = vec![start];
        let mut leaves = BTreeSet::new();
        let mut complete = false;
        while sequence.len() < budget.max(1) {
            let cur = sequence.last().unwrap();
            let ms = self.moves(cur);
            match choose(&ms, cur) {
                Some(next) => sequence.push(next),
                None => {
                    leaves.insert(cur.clone());
                    complete = true;
                    break;
                }
            }
        }
        DescentResult {
            explored: sequence.len(),
            sequence,
            complete,
            leaves,
        }
    }

    fn exhaustive(&self, start: Term, budget: usize) -> DescentResult {
        // longest path length from each term, and the successor on it
        let mut memo: HashMap<Term, (usize, Option<Term>)> = HashMap::new();
        let mut leaves = BTreeSet::new();
        let mut complete = true;
        self.longest(&start, &mut memo, &mut leaves, &mut complete);
        let mut sequence = vec![start];
        while sequence.len() < budget.max(1) {
            match memo
                .get(sequence.last().unwrap())
                .and_then(|(_, n)| n.clone())
            {
                Some(n) => sequence.push(n),
                None => break,
            }
        }
        DescentResult {
            sequence,
            explored: memo.len(),
            complete,
            leaves,
        }
    }

    fn longest(
        &self,
        t: &Term,
        memo: &mut HashMap<Term, (usize, Option<Term>)>,
        leaves: &mut BTreeSet<Term>,
        complete: &mut bool,
    ) -> usize {
        if let Some((len, _)) = memo.get(t) {
            return *len;
        }
        if memo.len() >= EXHAUSTIVE_NODE_LIMIT {
            *complete = false;
            return 1;
        }
        let ms = self.moves(t);
        if ms.is_empty() {
            leaves.insert(t.clone());
        }
        let mut best = (1, None);
        for m in ms {
            let len = 1 + self.longest(&m, memo, leaves, complete);
            if len > best.0 {
                best = (len, Some(m));
            }
        }
        let len = best.0;
        memo.insert(t.clone(), best);
        len
    }

    /// Normalized, well-formed terms strictly below `t` reachable by one
    /// structural move.
    fn moves(&self, t: &Term) -> Moves {
        let mut raw = Vec::new();
        self.raw_moves(t, &mut raw);
        let set: BTreeSet<Term> = raw
            .iter()
            .map(normalize)
            .filter(|m| compare_normal(m, t) == Ordering::Less)
            .filter(|m| validate(m, self.flavor).is_empty())
            .collect();
        let mut out: Vec<Term> = set.into_iter().collect();
        out.sort_by(compare_normal);
        out
    }

    fn raw_moves(&self, t: &Term, out: &mut Vec<Term>) {
        out.extend(t.children().into_iter().cloned());
        match t {
            Term::Zero | Term::Pi => {}
            Term::Sum(xs) => {
                for i in 0..xs.len() {
                    let mut rest = xs.to_vec();
                    rest.remove(i);
                    out.push(Term::sum(rest));
                    for m in self.moves(&xs[i]) {
                        let mut v = xs.to_vec();
                        v[i] = m;
                        out.push(Term::sum(v));
                    }
                }
            }
            Term::Phi(a, b) => {
                for m in self.moves(a) {
                    out.push(Term::phi(m, (**b).clone()));
                }
                for m in self.moves(b) {
                    out.push(Term::phi((**a).clone(), m));
                }
            }
            Term::Adm(u) => {
                for m in self.moves(u).into_iter().filter(is_regular) {
                    out.push(Term::adm(m));
                }
            }
            Term::Collapse(c) => {
                let parts: Vec<&Term> = c.components().collect();
                for (k, part) in parts.iter().enumerate() {
                    let smaller_pool = self
                        .pool
                        .iter()
                        .take_while(|p| compare_normal(p, part) == Ordering::Less)
                        .cloned();
                    for r in smaller_pool.chain(self.moves(part)) {
                        out.push(replace_component(c, k, r));
                    }
                }
            }
        }
    }
}

fn replace_component(c: &Collapse, k: usize, r: Term) -> Term {
    let mut parts: Vec<Term> = c.components().cloned().collect();
    parts[k] = r;
    let mut it = parts.into_iter();
    let arg = it.next().unwrap();
    let stage = match &c.stage {
        StageRecord::Empty => StageRecord::Empty,
        StageRecord::Q(_) => StageRecord::Q(it.next().unwrap()),
        StageRecord::Four { .. } => StageRecord::Four {
            st4: it.next().unwrap(),
            rg4: it.next().unwrap(),
            st3: it.next().unwrap(),
            rg3: it.next().unwrap(),
        },
    };
    Term::collapse(c.base.clone(), arg, stage)
}
