//! The ordinal-diagram term algebra.
//!
//! Terms are immutable and share structure through `Arc`, so cloning is cheap
//! and a term may be handed to any number of worker threads.

mod kset;
mod syntax;

use std::cmp::Ordering;
use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use thiserror::Error;

use crate::order::cmp_nf;
pub use crate::wf::StageRecord;

pub use kset::{kset, KSet};
pub(crate) use kset::{kset_of, kset_of_components};
pub use syntax::{parse, render, ParseError};

/// Which notation system is in force: which collapse arity, which provisos.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SystemFlavor {
    /// Plain collapsing `d(base;arg)`, no stage annotations.
    M,
    /// Collapses carry a q-part: `d(base;arg;q)`.
    P3,
    /// Collapses carry `st4, rg4, st3, rg3`.
    P4,
}

impl SystemFlavor {
    /// Number of comma/semicolon separated fields inside `d(...)`.
    pub fn collapse_fields(self) -> usize {
        match self {
            SystemFlavor::M => 2,
            SystemFlavor::P3 => 3,
            SystemFlavor::P4 => 6,
        }
    }

    pub fn all() -> [SystemFlavor; 3] {
        [SystemFlavor::M, SystemFlavor::P3, SystemFlavor::P4]
    }
}

impl fmt::Display for SystemFlavor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SystemFlavor::M => "m",
            SystemFlavor::P3 => "p3",
            SystemFlavor::P4 => "p4",
        })
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("unknown system flavor `{0}` (expected m, p3 or p4)")]
pub struct UnknownFlavor(pub String);

impl FromStr for SystemFlavor {
    type Err = UnknownFlavor;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "m" => Ok(SystemFlavor::M),
            "p3" => Ok(SystemFlavor::P3),
            "p4" => Ok(SystemFlavor::P4),
            _ => Err(UnknownFlavor(s.to_string())),
        }
    }
}

/// An ordinal diagram.
///
/// The derived `Ord` is structural and only used for deterministic
/// containers; the ordinal ordering lives in [`crate::order`].
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Term {
    Zero,
    Pi,
    /// Non-empty sequence of summands, left to right.
    Sum(Arc<[Term]>),
    /// Binary Veblen function.
    Phi(Arc<Term>, Arc<Term>),
    /// Next admissible above the inner term.
    Adm(Arc<Term>),
    Collapse(Arc<Collapse>),
}

/// `d_base arg` together with its stage annotations.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Collapse {
    pub base: Term,
    pub arg: Term,
    pub stage: StageRecord,
}

impl Collapse {
    /// Argument followed by the annotation terms, i.e. everything but the base.
    pub fn components(&self) -> impl Iterator<Item = &Term> {
        std::iter::once(&self.arg).chain(self.stage.terms())
    }

    /// Base, argument, then annotations: the child order used by subterm paths.
    pub fn children(&self) -> impl Iterator<Item = &Term> {
        std::iter::once(&self.base).chain(self.components())
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TermError {
    #[error("expected a collapse, found `{0}`")]
    NotCollapse(String),
    #[error("expected a regular term (pi, adm or a collapse), found `{0}`")]
    NotRegular(String),
}

impl Term {
    /// The numeral 1, written `phi(0,0)`.
    pub fn one() -> Term {
        Term::phi(Term::Zero, Term::Zero)
    }

    pub fn phi(a: Term, b: Term) -> Term {
        Term::Phi(Arc::new(a), Arc::new(b))
    }

    pub fn adm(inner: Term) -> Term {
        Term::Adm(Arc::new(inner))
    }

    pub fn sum(summands: Vec<Term>) -> Term {
        Term::Sum(summands.into())
    }

    pub fn collapse(base: Term, arg: Term, stage: StageRecord) -> Term {
        Term::Collapse(Arc::new(Collapse { base, arg, stage }))
    }

    /// Flavor-M collapse with no annotations.
    pub fn d(base: Term, arg: Term) -> Term {
        Term::collapse(base, arg, StageRecord::Empty)
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, Term::Zero)
    }

    pub fn as_collapse(&self) -> Option<&Collapse> {
        match self {
            Term::Collapse(c) => Some(c),
            _ => None,
        }
    }

    /// Pi, next-admissible marks and collapses: closed under `+` and `phi`.
    pub fn is_strongly_critical(&self) -> bool {
        matches!(self, Term::Pi | Term::Adm(_) | Term::Collapse(_))
    }

    pub fn is_additive_principal(&self) -> bool {
        matches!(self, Term::Phi(..)) || self.is_strongly_critical()
    }

    /// Immediate subterms in path order.
    pub fn children(&self) -> Vec<&Term> {
        match self {
            Term::Zero | Term::Pi => Vec::new(),
            Term::Sum(xs) => xs.iter().collect(),
            Term::Phi(a, b) => vec![a, b],
            Term::Adm(u) => vec![u],
            Term::Collapse(c) => c.children().collect(),
        }
    }

    /// Summands of a sum, or the term itself as a one-element sequence.
    pub fn summands(&self) -> &[Term] {
        match self {
            Term::Sum(xs) => xs,
            Term::Zero => &[],
            other => std::slice::from_ref(other),
        }
    }

    /// Subterm at `path` (child indices from the root).
    pub fn at_path(&self, path: &[usize]) -> Option<&Term> {
        let mut cur = self;
        for &i in path {
            cur = cur.children().get(i).copied()?;
        }
        Some(cur)
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&render(self))
    }
}

impl fmt::Debug for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "`{}`", render(self))
    }
}

/// Canonical form: flattened sums with absorbed summands removed, zero
/// summands dropped, and Veblen fixed points collapsed.
pub fn normalize(t: &Term) -> Term {
    match t {
        Term::Zero | Term::Pi => t.clone(),
        Term::Adm(u) => Term::adm(normalize(u)),
        Term::Collapse(c) => Term::collapse(
            normalize(&c.base),
            normalize(&c.arg),
            c.stage.map(normalize),
        ),
        Term::Phi(a, b) => normalize_phi(normalize(a), normalize(b)),
        Term::Sum(xs) => {
            let mut flat = Vec::with_capacity(xs.len());
            for x in xs.iter() {
                match normalize(x) {
                    Term::Zero => {}
                    Term::Sum(inner) => flat.extend(inner.iter().cloned()),
                    y => flat.push(y),
                }
            }
            absorb(flat)
        }
    }
}

fn normalize_phi(a: Term, b: Term) -> Term {
    match &b {
        Term::Phi(c, _) if cmp_nf(&a, c) == Ordering::Less => return b,
        _ if b.is_strongly_critical() && cmp_nf(&a, &b) == Ordering::Less => return b,
        Term::Zero if a.is_strongly_critical() => return a,
        _ => {}
    }
    Term::phi(a, b)
}

/// `x + y = y` whenever `x < y` and `y` is additively principal. Input
/// summands are normal and non-zero.
fn absorb(flat: Vec<Term>) -> Term {
    let mut out: Vec<Term> = Vec::with_capacity(flat.len());
    for x in flat {
        while out
            .last()
            .is_some_and(|last| cmp_nf(last, &x) == Ordering::Less)
        {
            out.pop();
        }
        out.push(x);
    }
    match out.len() {
        0 => Term::Zero,
        1 => out.pop().unwrap(),
        _ => Term::sum(out),
    }
}

/// True when `t` is already in canonical form.
pub fn is_normal(t: &Term) -> bool {
    normalize(t) == *t
}

/// Every subterm occurrence of `t`, including `t` itself.
pub fn subterms(t: &Term) -> BTreeSet<Term> {
    let mut out = BTreeSet::new();
    let mut stack = vec![t];
    while let Some(s) = stack.pop() {
        if out.insert(s.clone()) {
            stack.extend(s.children());
        }
    }
    out
}

/// Number of constructor nodes.
pub fn size(t: &Term) -> usize {
    1 + t.children().into_iter().map(size).sum::<usize>()
}

/// `[base(c), base(base(c)), ...]` down to the first non-collapse.
pub fn base_chain(c: &Term) -> Result<Vec<Term>, TermError> {
    let col = c
        .as_collapse()
        .ok_or_else(|| TermError::NotCollapse(render(c)))?;
    let mut out = vec![col.base.clone()];
    let mut cur = &col.base;
    while let Term::Collapse(inner) = cur {
        out.push(inner.base.clone());
        cur = &inner.base;
    }
    Ok(out)
}

/// Whether `target` occurs in the chain `t, base(t), base(base(t)), ...`.
pub(crate) fn chain_contains(t: &Term, target: &Term) -> bool {
    let mut cur = t;
    loop {
        if cur == target {
            return true;
        }
        match cur {
            Term::Collapse(c) => cur = &c.base,
            _ => return false,
        }
    }
}
