//! The substitution `pi := s` for a collapse `s = d(pi; ...)`, mapping the
//! region between pi and its next admissible onto the region above `s`.

use std::cmp::Ordering;
use std::collections::BTreeSet;
use std::time::Instant;

use thiserror::Error;

use crate::harness::{CheckReport, LawViolation};
use crate::order::{compare_normal, compare_terms};
use crate::term::{kset_of, normalize, render, SystemFlavor, Term};
use crate::wf::validate;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SubstError {
    #[error("substitution source must be pi, found `{0}`")]
    SourceNotPi(String),
    #[error("substitution target must be a collapse, found `{0}`")]
    TargetNotCollapse(String),
    #[error("substitution target `{0}` is not based on pi")]
    TargetBase(String),
    #[error("term is not well formed: {0}")]
    IllFormed(String),
    #[error("`{0}` is outside the domain: a pi-collapse in it is not below the target")]
    OutsideDomain(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Substitution {
    pub source: Term,
    pub target: Term,
    pub flavor: SystemFlavor,
}

pub fn make_subst(
    source: &Term,
    target: &Term,
    flavor: SystemFlavor,
) -> Result<Substitution, SubstError> {
    let source = normalize(source);
    if source != Term::Pi {
        return Err(SubstError::SourceNotPi(render(&source)));
    }
    let target = normalize(target);
    let c = target
        .as_collapse()
        .ok_or_else(|| SubstError::TargetNotCollapse(render(&target)))?;
    if c.base != Term::Pi {
        return Err(SubstError::TargetBase(render(&target)));
    }
    if let Some(v) = validate(&target, flavor).first() {
        return Err(SubstError::IllFormed(v.to_string()));
    }
    Ok(Substitution {
        source,
        target,
        flavor,
    })
}

impl Substitution {
    /// Every pi-collapse of `xi` lies below the target.
    pub fn in_domain(&self, xi: &Term) -> bool {
        kset_of(&Term::Pi, &normalize(xi))
            .iter()
            .all(|m| compare_normal(m, &self.target) == Ordering::Less)
    }

    /// Maps `xi`, leaving anything below pi untouched. The input is mapped as
    /// written and the result is not normalized.
    pub fn apply(&self, xi: &Term) -> Result<Term, SubstError> {
        if let Some(v) = validate(xi, self.flavor).first() {
            return Err(SubstError::IllFormed(v.to_string()));
        }
        if !self.in_domain(xi) {
            return Err(SubstError::OutsideDomain(render(xi)));
        }
        self.map(xi)
    }

    fn map(&self, t: &Term) -> Result<Term, SubstError> {
        if compare_terms(t, &Term::Pi) == Ordering::Less {
            return Ok(t.clone());
        }
        Ok(match t {
            Term::Zero => Term::Zero,
            Term::Pi => self.target.clone(),
            Term::Adm(u) => Term::adm(self.map(u)?),
            Term::Sum(xs) => Term::sum(xs.iter().map(|x| self.map(x)).collect::<Result<_, _>>()?),
            Term::Phi(a, b) => Term::phi(self.map(a)?, self.map(b)?),
            Term::Collapse(c) => {
                // a pi-collapse is below pi and was returned above
                if c.base == Term::Pi {
                    return Err(SubstError::OutsideDomain(render(t)));
                }
                Term::collapse(
                    self.map(&c.base)?,
                    self.map(&c.arg)?,
                    c.stage.try_map(|x| self.map(x))?,
                )
            }
        })
    }

    /// Checks over `fragment`:
    ///
    /// * order preservation in both directions on every pair;
    /// * identity below pi;
    /// * images of terms below `adm(pi)` stay below `adm(target)`;
    /// * commutation with `+` and `phi`;
    /// * the image of `K_adm(pi)` is `K_adm(target)` of the image;
    /// * below pi and below the target coincide on the domain.
    pub fn verify_embedding(&self, fragment: &[Term]) -> Result<CheckReport, SubstError> {
        let start = Instant::now();
        let terms: Vec<Term> = fragment.iter().map(normalize).collect();
        let mut images = Vec::with_capacity(terms.len());
        for t in &terms {
            images.push(normalize(&self.apply(t)?));
        }
        let mut report = CheckReport::new(
            self.flavor,
            terms.len(),
            format!("substitution pi := {}", render(&self.target)),
        );
        let adm_pi = Term::adm(Term::Pi);
        let adm_target = Term::adm(self.target.clone());
        let lt = |x: &Term, y: &Term| compare_normal(x, y) == Ordering::Less;

        for (i, (x, fx)) in terms.iter().zip(&images).enumerate() {
            for (y, fy) in terms.iter().zip(&images).skip(i) {
                report.pairs += 1;
                if compare_normal(x, y) != compare_normal(fx, fy) {
                    report.record(LawViolation::new(
                        "order-preserved",
                        vec![x.clone(), y.clone()],
                    ));
                }
            }
            let below_pi = lt(x, &Term::Pi);
            if below_pi && fx != x {
                report.record(LawViolation::new(
                    "identity-below-pi",
                    vec![x.clone(), fx.clone()],
                ));
            }
            if below_pi != lt(x, &self.target) {
                report.record(LawViolation::new(
                    "below-pi-iff-below-target",
                    vec![x.clone(), self.target.clone()],
                ));
            }
            if lt(x, &adm_pi) && !lt(fx, &adm_target) {
                report.record(LawViolation::new(
                    "range-below-next-admissible",
                    vec![x.clone(), fx.clone()],
                ));
            }
            if let Some(rebuilt) = self.rebuild_from_parts(x)? {
                if normalize(&rebuilt) != *fx {
                    report.record(LawViolation::new(
                        "commutes-with-sum-and-phi",
                        vec![x.clone(), fx.clone(), rebuilt],
                    ));
                }
            }
            let mapped: BTreeSet<Term> = kset_of(&adm_pi, x)
                .iter()
                .map(|m| self.map(m).map(|t| normalize(&t)))
                .collect::<Result<_, _>>()?;
            let direct = kset_of(&adm_target, fx).into_set();
            if mapped != direct {
                report.record(LawViolation::new(
                    "kset-of-image",
                    vec![x.clone(), fx.clone()],
                ));
            }
        }
        report.elapsed_ms = start.elapsed().as_millis();
        Ok(report)
    }

    /// `F(a) + F(b) + ...` or `phi(F(a), F(b))` for a sum or `phi` term.
    fn rebuild_from_parts(&self, x: &Term) -> Result<Option<Term>, SubstError> {
        Ok(match x {
            Term::Sum(xs) => Some(Term::sum(
                xs.iter().map(|p| self.map(p)).collect::<Result<_, _>>()?,
            )),
            Term::Phi(a, b) => Some(Term::phi(self.map(a)?, self.map(b)?)),
            _ => None,
        })
    }
}
