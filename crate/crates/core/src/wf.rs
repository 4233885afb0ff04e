//! Well-formedness: regular terms, stage and range accessors, chains, and the
//! stage provisos that make collapsing successions finite.

use std::cmp::Ordering;
use std::fmt;

use thiserror::Error;

use crate::order::compare_terms;
use crate::term::{base_chain, chain_contains, render, subterms, Collapse, SystemFlavor, Term};

/// Annotations carried by a collapse; the variant is fixed by the flavor.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum StageRecord {
    Empty,
    /// The q-part.
    Q(Term),
    Four {
        st4: Term,
        rg4: Term,
        st3: Term,
        rg3: Term,
    },
}

impl StageRecord {
    /// Annotation terms in textual order.
    pub fn terms(&self) -> impl Iterator<Item = &Term> {
        let slots: [Option<&Term>; 4] = match self {
            StageRecord::Empty => [None, None, None, None],
            StageRecord::Q(q) => [Some(q), None, None, None],
            StageRecord::Four { st4, rg4, st3, rg3 } => {
                [Some(st4), Some(rg4), Some(st3), Some(rg3)]
            }
        };
        slots.into_iter().flatten()
    }

    pub fn map(&self, mut f: impl FnMut(&Term) -> Term) -> StageRecord {
        match self {
            StageRecord::Empty => StageRecord::Empty,
            StageRecord::Q(q) => StageRecord::Q(f(q)),
            StageRecord::Four { st4, rg4, st3, rg3 } => StageRecord::Four {
                st4: f(st4),
                rg4: f(rg4),
                st3: f(st3),
                rg3: f(rg3),
            },
        }
    }

    pub fn try_map<E>(
        &self,
        mut f: impl FnMut(&Term) -> Result<Term, E>,
    ) -> Result<StageRecord, E> {
        Ok(match self {
            StageRecord::Empty => StageRecord::Empty,
            StageRecord::Q(q) => StageRecord::Q(f(q)?),
            StageRecord::Four { st4, rg4, st3, rg3 } => StageRecord::Four {
                st4: f(st4)?,
                rg4: f(rg4)?,
                st3: f(st3)?,
                rg3: f(rg3)?,
            },
        })
    }

    pub fn flavor(&self) -> SystemFlavor {
        match self {
            StageRecord::Empty => SystemFlavor::M,
            StageRecord::Q(_) => SystemFlavor::P3,
            StageRecord::Four { .. } => SystemFlavor::P4,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Level {
    Three,
    Four,
}

impl fmt::Display for Level {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Level::Three => "3",
            Level::Four => "4",
        })
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum WfError {
    #[error("expected a collapse, found `{0}`")]
    NotCollapse(String),
    #[error("flavor {flavor} carries no level-{level} annotation")]
    LevelAbsent { level: Level, flavor: SystemFlavor },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ViolationKind {
    Proviso1,
    Proviso2,
    Proviso3,
    BadBase,
    BadArity,
    BadAdm,
}

impl fmt::Display for ViolationKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

/// One failed condition at a subterm.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub kind: ViolationKind,
    /// Child indices from the root, see [`Term::at_path`].
    pub location: Vec<usize>,
    pub detail: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} at {}: {}",
            self.kind,
            format_path(&self.location),
            self.detail
        )
    }
}

pub fn format_path(path: &[usize]) -> String {
    if path.is_empty() {
        "root".to_string()
    } else {
        path.iter()
            .map(|i| i.to_string())
            .collect::<Vec<_>>()
            .join(".")
    }
}

/// Switches for the readings that are not pinned down.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct WfConfig {
    /// Reject q-parts below pi.
    pub require_q_at_least_pi: bool,
    /// Search the st3 witness only among base-chain elements instead
    /// of all collapse subterms of the base and annotations.
    pub strict_kappa: bool,
}

/// Pi, next-admissible marks and collapses.
pub fn is_regular(t: &Term) -> bool {
    matches!(t, Term::Pi | Term::Adm(_) | Term::Collapse(_))
}

fn collapse_of(c: &Term) -> Result<&Collapse, WfError> {
    c.as_collapse()
        .ok_or_else(|| WfError::NotCollapse(render(c)))
}

/// The stage annotation of the given level (the q-part for P3 at level 3).
pub fn stage(c: &Term, level: Level) -> Result<&Term, WfError> {
    let col = collapse_of(c)?;
    match (&col.stage, level) {
        (StageRecord::Q(q), Level::Three) => Ok(q),
        (StageRecord::Four { st3, .. }, Level::Three) => Ok(st3),
        (StageRecord::Four { st4, .. }, Level::Four) => Ok(st4),
        (s, level) => Err(WfError::LevelAbsent {
            level,
            flavor: s.flavor(),
        }),
    }
}

pub fn range_of(c: &Term, level: Level) -> Result<&Term, WfError> {
    let col = collapse_of(c)?;
    match (&col.stage, level) {
        (StageRecord::Four { rg3, .. }, Level::Three) => Ok(rg3),
        (StageRecord::Four { rg4, .. }, Level::Four) => Ok(rg4),
        (s, level) => Err(WfError::LevelAbsent {
            level,
            flavor: s.flavor(),
        }),
    }
}

/// `c` followed by its base chain.
pub fn chain_of(c: &Term) -> Result<Vec<Term>, WfError> {
    let rest = base_chain(c).map_err(|_| WfError::NotCollapse(render(c)))?;
    let mut out = Vec::with_capacity(rest.len() + 1);
    out.push(c.clone());
    out.extend(rest);
    Ok(out)
}

pub fn validate(t: &Term, flavor: SystemFlavor) -> Vec<Violation> {
    validate_with(t, flavor, &WfConfig::default())
}

/// All violations in `t`, outermost first. Empty means well-formed.
pub fn validate_with(t: &Term, flavor: SystemFlavor, cfg: &WfConfig) -> Vec<Violation> {
    let mut out = Vec::new();
    let mut path = Vec::new();
    walk(t, flavor, cfg, &mut path, &mut out);
    out
}

fn walk(
    t: &Term,
    flavor: SystemFlavor,
    cfg: &WfConfig,
    path: &mut Vec<usize>,
    out: &mut Vec<Violation>,
) {
    out.extend(
        validate_node(t, flavor, cfg)
            .into_iter()
            .map(|(kind, detail)| Violation {
                kind,
                location: path.clone(),
                detail,
            }),
    );
    for (i, child) in t.children().into_iter().enumerate() {
        path.push(i);
        walk(child, flavor, cfg, path, out);
        path.pop();
    }
}

/// Conditions on the outermost node only; the subterms are assumed checked.
pub fn validate_head(t: &Term, flavor: SystemFlavor, cfg: &WfConfig) -> Vec<Violation> {
    validate_node(t, flavor, cfg)
        .into_iter()
        .map(|(kind, detail)| Violation {
            kind,
            location: Vec::new(),
            detail,
        })
        .collect()
}

fn validate_node(t: &Term, flavor: SystemFlavor, cfg: &WfConfig) -> Vec<(ViolationKind, String)> {
    let mut out = Vec::new();
    match t {
        Term::Adm(u) if !is_regular(u) => {
            out.push((
                ViolationKind::BadAdm,
                format!("adm applied to `{}`", render(u)),
            ));
        }
        Term::Collapse(c) => check_collapse(c, flavor, cfg, &mut out),
        _ => {}
    }
    out
}

fn lt(x: &Term, y: &Term) -> bool {
    compare_terms(x, y) == Ordering::Less
}

fn check_collapse(
    c: &Collapse,
    flavor: SystemFlavor,
    cfg: &WfConfig,
    out: &mut Vec<(ViolationKind, String)>,
) {
    if c.stage.flavor() != flavor {
        out.push((
            ViolationKind::BadArity,
            format!(
                "collapse carries {} annotation(s), flavor {flavor} expects {}",
                c.stage.terms().count(),
                flavor.collapse_fields() - 2
            ),
        ));
        return;
    }
    if !is_regular(&c.base) {
        out.push((
            ViolationKind::BadBase,
            format!("base `{}` is not regular", render(&c.base)),
        ));
        return;
    }
    match &c.stage {
        StageRecord::Empty => {}
        StageRecord::Q(q) => {
            if cfg.require_q_at_least_pi && lt(q, &Term::Pi) {
                out.push((
                    ViolationKind::Proviso1,
                    format!("q-part `{}` is below pi", render(q)),
                ));
            }
            if let Term::Collapse(b) = &c.base {
                if let StageRecord::Q(qb) = &b.stage {
                    if !lt(q, qb) {
                        out.push((
                            ViolationKind::Proviso1,
                            format!(
                                "stage `{}` is not below the base stage `{}`",
                                render(q),
                                render(qb)
                            ),
                        ));
                    }
                }
            }
        }
        StageRecord::Four { st4, rg4, st3, rg3 } => {
            for (name, rg) in [("rg4", rg4), ("rg3", rg3)] {
                if !chain_contains(&c.base, rg) {
                    out.push((
                        ViolationKind::BadBase,
                        format!("{name} `{}` is not on the base chain", render(rg)),
                    ));
                }
            }
            if let Term::Collapse(b) = &c.base {
                if let StageRecord::Four { st4: st4b, .. } = &b.stage {
                    if !lt(st4, st4b) {
                        out.push((
                            ViolationKind::Proviso2,
                            format!(
                                "st4 `{}` is not below the base st4 `{}`",
                                render(st4),
                                render(st4b)
                            ),
                        ));
                    }
                }
            }
            if let Some(kappa) = st3_witness(c, rg3, cfg) {
                let st3k = match &kappa.as_collapse().unwrap().stage {
                    StageRecord::Four { st3, .. } => st3,
                    _ => unreachable!(),
                };
                if !lt(st3, st3k) {
                    out.push((
                        ViolationKind::Proviso3,
                        format!(
                            "st3 `{}` is not below st3 `{}` of `{}`",
                            render(st3),
                            render(st3k),
                            render(&kappa)
                        ),
                    ));
                }
            }
        }
    }
}

/// The largest collapse `kappa >= base` sharing `rg3`, drawn from the base
/// and the annotations.
fn st3_witness(c: &Collapse, rg3: &Term, cfg: &WfConfig) -> Option<Term> {
    let pool: Vec<Term> = if cfg.strict_kappa {
        let mut chain = Vec::new();
        let mut cur = &c.base;
        while let Term::Collapse(inner) = cur {
            chain.push(cur.clone());
            cur = &inner.base;
        }
        chain
    } else {
        let mut all = subterms(&c.base);
        for a in c.stage.terms() {
            all.extend(subterms(a));
        }
        all.into_iter().collect()
    };
    pool.into_iter()
        .filter(|k| match k.as_collapse().map(|kc| &kc.stage) {
            Some(StageRecord::Four { rg3: r, .. }) => r == rg3,
            _ => false,
        })
        .filter(|k| compare_terms(k, &c.base) != Ordering::Less)
        .max_by(compare_terms)
}
