use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::time::Instant;

use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::report::{CheckReport, LawViolation};
use crate::order::{compare, compare_normal, compare_terms};
use crate::term::{kset_of, kset_of_components, normalize, parse, render, SystemFlavor, Term};
use crate::wf::is_regular;

/// How transitivity triples are chosen once the budget is below `n^3`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TripleSampling {
    /// Evenly spaced indices into the lexicographic triple space.
    #[default]
    Stride,
    Random(u64),
}

pub type Comparator<'a> = &'a (dyn Fn(&Term, &Term) -> Ordering + Sync);

fn encode(o: Ordering) -> i8 {
    o as i8
}

fn decode(v: i8) -> Ordering {
    v.cmp(&0)
}

/// Totality, irreflexivity, antisymmetry on every pair and transitivity on
/// up to `triple_budget` triples, using the built-in comparison.
pub fn check_order_laws(
    fragment: &[Term],
    flavor: SystemFlavor,
    triple_budget: u64,
) -> CheckReport {
    check_order_laws_by(
        fragment,
        flavor,
        triple_budget,
        TripleSampling::Stride,
        &compare_normal,
    )
}

pub fn check_order_laws_by(
    fragment: &[Term],
    flavor: SystemFlavor,
    triple_budget: u64,
    sampling: TripleSampling,
    cmp: Comparator<'_>,
) -> CheckReport {
    let start = Instant::now();
    let n = fragment.len();
    let mut report = CheckReport::new(flavor, n, format!("order laws, {sampling:?}"));

    let matrix: Vec<i8> = (0..n)
        .into_par_iter()
        .flat_map_iter(|i| {
            let x = &fragment[i];
            fragment.iter().map(move |y| encode(cmp(x, y)))
        })
        .collect();
    let at = |i: usize, j: usize| decode(matrix[i * n + j]);
    report.pairs = (n * n) as u64;

    let mut clean = true;
    for i in 0..n {
        if at(i, i) != Ordering::Equal {
            clean = false;
            report.record(LawViolation::new(
                "irreflexivity",
                vec![fragment[i].clone()],
            ));
        }
        for j in i + 1..n {
            let (a, b) = (at(i, j), at(j, i));
            if a == Ordering::Equal || b == Ordering::Equal {
                clean = false;
                report.record(LawViolation::new(
                    "distinct-terms-equal",
                    vec![fragment[i].clone(), fragment[j].clone()],
                ));
            } else if a != b.reverse() {
                clean = false;
                report.record(LawViolation::new(
                    "antisymmetry",
                    vec![fragment[i].clone(), fragment[j].clone()],
                ));
            }
        }
    }

    // A complete asymmetric relation is transitive iff every element has a
    // different number of elements below it.
    if clean && n > 0 {
        let mut seen = vec![false; n];
        let mut ranked = true;
        for i in 0..n {
            let below = (0..n).filter(|&j| at(j, i) == Ordering::Less).count();
            if seen[below] {
                ranked = false;
                break;
            }
            seen[below] = true;
        }
        if !ranked {
            let w = find_cycle(n, &at).map(|(a, b, c)| {
                vec![
                    fragment[a].clone(),
                    fragment[b].clone(),
                    fragment[c].clone(),
                ]
            });
            report.record(LawViolation::new("transitivity", w.unwrap_or_default()));
        }
    }

    let total = (n as u128).pow(3);
    let count = total.min(triple_budget as u128) as u64;
    let pick = |k: u64, rng: Option<&mut ChaCha8Rng>| -> (usize, usize, usize) {
        match rng {
            Some(r) => (
                r.random_range(0..n),
                r.random_range(0..n),
                r.random_range(0..n),
            ),
            None => {
                let idx = if total <= triple_budget as u128 {
                    k as u128
                } else {
                    k as u128 * total / count as u128
                } as usize;
                (idx / (n * n), (idx / n) % n, idx % n)
            }
        }
    };
    let bad: Vec<(usize, usize, usize)> = match sampling {
        TripleSampling::Stride => (0..count)
            .into_par_iter()
            .map(|k| pick(k, None))
            .filter(|&(i, j, l)| broken_triple(&at, i, j, l))
            .collect(),
        TripleSampling::Random(seed) => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            (0..count)
                .map(|k| pick(k, Some(&mut rng)))
                .filter(|&(i, j, l)| broken_triple(&at, i, j, l))
                .collect()
        }
    };
    report.triples = count;
    for (i, j, l) in bad {
        report.record(LawViolation::new(
            "transitivity",
            vec![
                fragment[i].clone(),
                fragment[j].clone(),
                fragment[l].clone(),
            ],
        ));
    }
    report.elapsed_ms = start.elapsed().as_millis();
    report
}

fn broken_triple(at: &impl Fn(usize, usize) -> Ordering, i: usize, j: usize, l: usize) -> bool {
    let (a, b, c) = (at(i, j), at(j, l), at(i, l));
    (a == Ordering::Less && b == Ordering::Less && c != Ordering::Less)
        || (a == Ordering::Greater && b == Ordering::Greater && c != Ordering::Greater)
}

fn find_cycle(n: usize, at: &impl Fn(usize, usize) -> Ordering) -> Option<(usize, usize, usize)> {
    for a in 0..n {
        for b in 0..n {
            if at(a, b) != Ordering::Less {
                continue;
            }
            for c in 0..n {
                if at(b, c) == Ordering::Less && at(c, a) == Ordering::Less {
                    return Some((a, b, c));
                }
            }
        }
    }
    None
}

/// The four collapse constraints:
///
/// 1. a collapse lies below its base;
/// 2. the K-set of its argument and annotations lies below it;
/// 3. every member of `K_s a` is at most `a`;
/// 4. `a < s` and `K_s a` below a `s`-collapse `c` imply `a < c`.
pub fn check_axioms(fragment: &[Term], flavor: SystemFlavor) -> CheckReport {
    let start = Instant::now();
    let mut report = CheckReport::new(flavor, fragment.len(), "collapse constraints");
    let lt = |x: &Term, y: &Term| compare_normal(x, y) == Ordering::Less;
    let collapses: Vec<&Term> = fragment
        .iter()
        .filter(|t| t.as_collapse().is_some())
        .collect();

    for &c in &collapses {
        let col = c.as_collapse().unwrap();
        if !lt(c, &col.base) {
            report.record(LawViolation::new("collapse-below-base", vec![c.clone()]));
        }
        let ks = kset_of_components(&col.base, col.components());
        if let Some(m) = ks.iter().find(|m| !lt(m, c)) {
            report.record(LawViolation::new(
                "kset-below-collapse",
                vec![c.clone(), m.clone()],
            ));
        }
        report.pairs += 2;
    }

    let regulars: Vec<&Term> = fragment.iter().filter(|t| is_regular(t)).collect();
    let k_bounded: Vec<(u64, Vec<LawViolation>)> = regulars
        .par_iter()
        .map(|&sigma| {
            let mut bad = Vec::new();
            for alpha in fragment {
                if let Some(m) = kset_of(sigma, alpha).iter().find(|m| lt(alpha, m)) {
                    bad.push(LawViolation::new(
                        "kset-bounded-by-argument",
                        vec![sigma.clone(), alpha.clone(), m.clone()],
                    ));
                }
            }
            (fragment.len() as u64, bad)
        })
        .collect();
    for (pairs, bad) in k_bounded {
        report.pairs += pairs;
        bad.into_iter().for_each(|v| report.record(v));
    }

    let mut by_base: BTreeMap<&Term, Vec<&Term>> = BTreeMap::new();
    for &c in &collapses {
        by_base
            .entry(&c.as_collapse().unwrap().base)
            .or_default()
            .push(c);
    }
    let bases: Vec<(&Term, Vec<&Term>)> = by_base.into_iter().collect();
    let below: Vec<(u64, Vec<LawViolation>)> = bases
        .par_iter()
        .map(|(sigma, cs)| {
            let mut bad = Vec::new();
            let mut pairs = 0;
            for alpha in fragment.iter().filter(|a| lt(a, sigma)) {
                let ks = kset_of(sigma, alpha);
                for &c in cs {
                    pairs += 1;
                    if ks.iter().all(|m| lt(m, c)) && !lt(alpha, c) {
                        bad.push(LawViolation::new(
                            "small-kset-below-collapse",
                            vec![alpha.clone(), c.clone()],
                        ));
                    }
                }
            }
            (pairs, bad)
        })
        .collect();
    for (pairs, bad) in below {
        report.pairs += pairs;
        bad.into_iter().for_each(|v| report.record(v));
    }
    report.elapsed_ms = start.elapsed().as_millis();
    report
}

/// Parse/render round trip, normalization idempotence, and comparison
/// invariance under a non-normal rewriting of every term.
pub fn check_normalization(fragment: &[Term], flavor: SystemFlavor) -> CheckReport {
    let start = Instant::now();
    let mut report = CheckReport::new(flavor, fragment.len(), "round trip and normalization");
    let padded: Vec<Term> = fragment.iter().map(denormalize).collect();
    for (t, p) in fragment.iter().zip(&padded) {
        match parse(&render(t), flavor) {
            Ok(back) if back == *t => {}
            _ => report.record(LawViolation::new("parse-render-roundtrip", vec![t.clone()])),
        }
        let nf = normalize(t);
        if normalize(&nf) != nf {
            report.record(LawViolation::new("normalize-idempotent", vec![t.clone()]));
        }
        if normalize(p) != nf {
            report.record(LawViolation::new("padded-normal-form", vec![p.clone()]));
        }
    }
    let bad: Vec<LawViolation> = (0..fragment.len())
        .into_par_iter()
        .flat_map_iter(|i| {
            let (fragment, padded) = (&fragment, &padded);
            (0..fragment.len()).filter_map(move |j| {
                let raw = compare_terms(&padded[i], &padded[j]);
                (raw != compare_normal(&fragment[i], &fragment[j])).then(|| {
                    LawViolation::new(
                        "compare-normalization-invariant",
                        vec![padded[i].clone(), padded[j].clone()],
                    )
                })
            })
        })
        .collect();
    report.pairs = (fragment.len() * fragment.len()) as u64;
    bad.into_iter().for_each(|v| report.record(v));
    report.elapsed_ms = start.elapsed().as_millis();
    report
}

/// A non-normal term with the same normal form: `phi(0,t)` for strongly
/// critical `t`, `0 + t` otherwise.
pub fn denormalize(t: &Term) -> Term {
    if t.is_strongly_critical() {
        Term::phi(Term::Zero, t.clone())
    } else {
        Term::sum(vec![Term::Zero, t.clone()])
    }
}

/// Agreement of the public comparison with [`crate::order::same_base_less`]
/// on every pair of collapses sharing a base.
pub fn check_same_base(fragment: &[Term], flavor: SystemFlavor) -> CheckReport {
    let start = Instant::now();
    let mut report = CheckReport::new(flavor, fragment.len(), "same-base rule");
    let mut by_base: BTreeMap<&Term, Vec<&Term>> = BTreeMap::new();
    for c in fragment.iter().filter(|t| t.as_collapse().is_some()) {
        by_base
            .entry(&c.as_collapse().unwrap().base)
            .or_default()
            .push(c);
    }
    for cs in by_base.values() {
        for &a in cs {
            for &b in cs {
                report.pairs += 1;
                let rule = crate::order::same_base_less(a, b, flavor);
                let full = compare(a, b, flavor).map(|o| o == Ordering::Less);
                if rule != full {
                    report.record(LawViolation::new(
                        "same-base-agreement",
                        vec![a.clone(), b.clone()],
                    ));
                }
            }
        }
    }
    report.elapsed_ms = start.elapsed().as_millis();
    report
}
