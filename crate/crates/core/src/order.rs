//! A total, decidable ordering on ordinal diagrams.
//!
//! The procedure works on normal forms and recurses on strictly smaller pairs
//! of terms:
//!
//! * zero is least; sums compare lexicographically by their descending
//!   summands;
//! * `phi` terms follow the Veblen rule, and a `phi` term lies below a
//!   strongly critical `s` iff both of its arguments do;
//! * `pi < adm(pi)`, `adm(u)` vs `adm(v)` by `u` vs `v`, and `adm(u)` sits
//!   just above `u`;
//! * a collapse `d_s a` lies below its base, and a term `x < s` lies below
//!   `d_s a` exactly when every member of `K_s x` does;
//! * collapses on a common base compare by
//!   `d_s b < d_s c  <=>  (b < c and K_s b < d_s c) or d_s b <= K_s c`,
//!   with annotations joining the argument lexicographically.

use std::cmp::Ordering;

use thiserror::Error;

use crate::term::{
    chain_contains, kset_of, kset_of_components, normalize, render, Collapse, KSet, SystemFlavor,
    Term,
};
use crate::wf::{validate, StageRecord, ViolationKind};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OrderError {
    #[error("`{term}` is not a well-formed {flavor} term: {detail}")]
    IllFormed {
        term: String,
        flavor: SystemFlavor,
        detail: String,
    },
    #[error("collapses on different bases: `{0}` and `{1}`")]
    BasesDiffer(String, String),
    #[error("expected a collapse, found `{0}`")]
    NotCollapse(String),
}

fn check_well_formed(t: &Term, flavor: SystemFlavor) -> Result<(), OrderError> {
    let structural = validate(t, flavor).into_iter().find(|v| {
        matches!(
            v.kind,
            ViolationKind::BadArity | ViolationKind::BadBase | ViolationKind::BadAdm
        )
    });
    match structural {
        Some(v) => Err(OrderError::IllFormed {
            term: render(t),
            flavor,
            detail: v.to_string(),
        }),
        None => Ok(()),
    }
}

/// Compares two terms of `flavor`. Both are normalized first.
pub fn compare(x: &Term, y: &Term, flavor: SystemFlavor) -> Result<Ordering, OrderError> {
    check_well_formed(x, flavor)?;
    check_well_formed(y, flavor)?;
    Ok(compare_terms(x, y))
}

/// Normalizes both sides and compares, without well-formedness checks.
pub fn compare_terms(x: &Term, y: &Term) -> Ordering {
    cmp_nf(&normalize(x), &normalize(y))
}

/// Compares two terms already in normal form.
///
/// This is the hot path used by the verification harness; feeding it terms
/// that are not normal gives an unspecified (but terminating) answer.
pub fn compare_normal(x: &Term, y: &Term) -> Ordering {
    cmp_nf(x, y)
}

/// `true` iff every member of `ks` lies strictly below `bound`.
pub fn kset_less(ks: &KSet, bound: &Term, _flavor: SystemFlavor) -> bool {
    let bound = normalize(bound);
    ks.iter()
        .all(|m| cmp_nf(&normalize(m), &bound) == Ordering::Less)
}

/// The same-base rule on its own, for two collapses on structurally equal
/// bases.
pub fn same_base_less(c1: &Term, c2: &Term, flavor: SystemFlavor) -> Result<bool, OrderError> {
    check_well_formed(c1, flavor)?;
    check_well_formed(c2, flavor)?;
    let (n1, n2) = (normalize(c1), normalize(c2));
    let (a, b) = match (n1.as_collapse(), n2.as_collapse()) {
        (Some(a), Some(b)) => (a, b),
        (None, _) => return Err(OrderError::NotCollapse(render(c1))),
        (_, None) => return Err(OrderError::NotCollapse(render(c2))),
    };
    if a.base != b.base {
        return Err(OrderError::BasesDiffer(render(c1), render(c2)));
    }
    if n1 == n2 {
        return Ok(false);
    }
    Ok(same_base_lt(a, &n1, b, &n2))
}

fn all_below(ks: &KSet, bound: &Term) -> bool {
    ks.iter().all(|m| cmp_nf(m, bound) == Ordering::Less)
}

pub(crate) fn cmp_nf(x: &Term, y: &Term) -> Ordering {
    if x == y {
        return Ordering::Equal;
    }
    match (x, y) {
        (Term::Zero, _) => Ordering::Less,
        (_, Term::Zero) => Ordering::Greater,
        (Term::Sum(_), _) | (_, Term::Sum(_)) => lex(x.summands(), y.summands()),
        _ => cmp_principal(x, y),
    }
}

fn lex(xs: &[Term], ys: &[Term]) -> Ordering {
    for (a, b) in xs.iter().zip(ys) {
        match cmp_nf(a, b) {
            Ordering::Equal => continue,
            o => return o,
        }
    }
    xs.len().cmp(&ys.len())
}

fn cmp_principal(x: &Term, y: &Term) -> Ordering {
    match (x, y) {
        (Term::Phi(a1, b1), Term::Phi(a2, b2)) => match cmp_nf(a1, a2) {
            Ordering::Less => cmp_nf(b1, y),
            Ordering::Equal => cmp_nf(b1, b2),
            Ordering::Greater => cmp_nf(x, b2),
        },
        (Term::Phi(a, b), s) => phi_vs_critical(a, b, s),
        (s, Term::Phi(a, b)) => phi_vs_critical(a, b, s).reverse(),
        _ => cmp_critical(x, y),
    }
}

fn phi_vs_critical(a: &Term, b: &Term, s: &Term) -> Ordering {
    if cmp_nf(a, s) == Ordering::Less && cmp_nf(b, s) == Ordering::Less {
        Ordering::Less
    } else {
        Ordering::Greater
    }
}

fn cmp_critical(x: &Term, y: &Term) -> Ordering {
    match (x, y) {
        (Term::Pi, Term::Pi) => Ordering::Equal,
        (Term::Adm(u), Term::Adm(v)) => cmp_nf(u, v),
        (Term::Pi, Term::Adm(u)) => match cmp_nf(&Term::Pi, u) {
            Ordering::Greater => Ordering::Greater,
            _ => Ordering::Less,
        },
        (Term::Adm(_), Term::Pi) => cmp_critical(y, x).reverse(),
        (Term::Collapse(c), _) => cmp_collapse(c, x, y),
        (_, Term::Collapse(c)) => cmp_collapse(c, y, x).reverse(),
        _ => unreachable!("not strongly critical: {x:?} vs {y:?}"),
    }
}

/// Orders the collapse `ct` (with body `c`) against a distinct strongly
/// critical `x`.
fn cmp_collapse(c: &Collapse, ct: &Term, x: &Term) -> Ordering {
    let sigma = &c.base;
    if let Term::Collapse(d) = x {
        if d.base == *sigma {
            return if same_base_lt(c, ct, d, x) {
                Ordering::Less
            } else {
                Ordering::Greater
            };
        }
        if chain_contains(&d.base, sigma) {
            return below_collapse_of_chain(ct, d, x);
        }
        if chain_contains(sigma, &d.base) {
            return below_collapse_of_chain(x, c, ct).reverse();
        }
    }
    match cmp_nf(x, sigma) {
        Ordering::Less => {
            if all_below(&kset_of(sigma, x), ct) {
                Ordering::Greater
            } else {
                Ordering::Less
            }
        }
        _ => Ordering::Less,
    }
}

/// `y` is a collapse `d_tau ...` whose base chain passes through the base of
/// the collapse `t`, so `y < tau` and the comparison goes through `tau`.
fn below_collapse_of_chain(t: &Term, d: &Collapse, y: &Term) -> Ordering {
    let tau = &d.base;
    match cmp_nf(t, tau) {
        Ordering::Less => {
            if all_below(&kset_of(tau, t), y) {
                Ordering::Less
            } else {
                Ordering::Greater
            }
        }
        _ => Ordering::Greater,
    }
}

/// Argument first, then the stage annotations: `(arg, q)` for P3 and
/// `(arg, st4, st3, rg4, rg3)` for P4.
fn ordering_key(c: &Collapse) -> Vec<&Term> {
    match &c.stage {
        StageRecord::Empty => vec![&c.arg],
        StageRecord::Q(q) => vec![&c.arg, q],
        StageRecord::Four { st4, rg4, st3, rg3 } => vec![&c.arg, st4, st3, rg4, rg3],
    }
}

fn key_cmp(a: &Collapse, b: &Collapse) -> Ordering {
    let (ka, kb) = (ordering_key(a), ordering_key(b));
    for (x, y) in ka.iter().zip(&kb) {
        match cmp_nf(x, y) {
            Ordering::Equal => continue,
            o => return o,
        }
    }
    ka.len().cmp(&kb.len())
}

fn same_base_lt(a: &Collapse, at: &Term, b: &Collapse, bt: &Term) -> bool {
    let sigma = &a.base;
    if key_cmp(a, b) == Ordering::Less && all_below(&kset_of_components(sigma, a.components()), bt)
    {
        return true;
    }
    kset_of_components(sigma, b.components())
        .iter()
        .any(|m| cmp_nf(at, m) != Ordering::Greater)
}
