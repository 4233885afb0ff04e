use std::cmp::Ordering;
use std::collections::BTreeSet;

use super::{chain_contains, render, Term, TermError};
use crate::order::cmp_nf;
use crate::wf::is_regular;

/// The last collapses of a regular term occurring in another term.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct KSet {
    members: BTreeSet<Term>,
}

impl KSet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn iter(&self) -> impl Iterator<Item = &Term> {
        self.members.iter()
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, t: &Term) -> bool {
        self.members.contains(t)
    }

    pub fn into_set(self) -> BTreeSet<Term> {
        self.members
    }
}

impl FromIterator<Term> for KSet {
    fn from_iter<I: IntoIterator<Item = Term>>(iter: I) -> Self {
        KSet {
            members: iter.into_iter().collect(),
        }
    }
}

impl<'a> IntoIterator for &'a KSet {
    type Item = &'a Term;
    type IntoIter = std::collections::btree_set::Iter<'a, Term>;

    fn into_iter(self) -> Self::IntoIter {
        self.members.iter()
    }
}

/// `K_sigma alpha`: the collapses in `alpha` whose base chain passes through
/// `sigma`, taken outermost-first.
///
/// A collapse that does not qualify is searched through its base, argument
/// and annotations, unless its base already lies below `sigma`. Such a
/// collapse sits below its base, so only the base is searched; the argument
/// may mention larger `sigma`-collapses that do not bound it. Terms are taken
/// as normal forms.
pub fn kset(sigma: &Term, alpha: &Term) -> Result<KSet, TermError> {
    if !is_regular(sigma) {
        return Err(TermError::NotRegular(render(sigma)));
    }
    Ok(kset_of(sigma, alpha))
}

pub(crate) fn kset_of(sigma: &Term, alpha: &Term) -> KSet {
    let mut out = KSet::new();
    collect(sigma, alpha, &mut out.members);
    out
}

/// Union of `K_sigma` over several terms.
pub(crate) fn kset_of_components<'a>(
    sigma: &Term,
    parts: impl IntoIterator<Item = &'a Term>,
) -> KSet {
    let mut out = KSet::new();
    for p in parts {
        collect(sigma, p, &mut out.members);
    }
    out
}

fn collect(sigma: &Term, t: &Term, out: &mut BTreeSet<Term>) {
    match t {
        Term::Zero | Term::Pi => {}
        Term::Adm(u) => collect(sigma, u, out),
        Term::Sum(xs) => xs.iter().for_each(|x| collect(sigma, x, out)),
        Term::Phi(a, b) => {
            collect(sigma, a, out);
            collect(sigma, b, out);
        }
        Term::Collapse(c) => {
            if chain_contains(&c.base, sigma) {
                out.insert(t.clone());
            } else if cmp_nf(&c.base, sigma) == Ordering::Less {
                collect(sigma, &c.base, out);
            } else {
                c.children().for_each(|x| collect(sigma, x, out));
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::term::{parse, SystemFlavor};

    fn p(s: &str) -> Term {
        parse(s, SystemFlavor::M).unwrap()
    }

    fn ks(sigma: &str, alpha: &str) -> Vec<String> {
        kset(&p(sigma), &p(alpha))
            .unwrap()
            .iter()
            .map(render)
            .collect()
    }

    #[test]
    fn empty_without_collapses() {
        assert!(ks("pi", "0").is_empty());
        assert!(ks("pi", "phi(pi,pi) + pi").is_empty());
    }

    #[test]
    fn finds_last_collapse_of_pi() {
        assert_eq!(ks("pi", "d(pi;0) + phi(0,0)"), vec!["d(pi;0)"]);
        // outermost only: the inner d(pi;0) sits inside a qualifying collapse
        assert_eq!(ks("pi", "d(d(pi;0);d(pi;0))"), vec!["d(d(pi;0);d(pi;0))"]);
    }

    #[test]
    fn a_collapse_is_not_its_own_last_collapse() {
        assert!(ks("d(pi;0)", "d(pi;0)").is_empty());
        assert_eq!(ks("d(pi;0)", "d(d(pi;0);pi)"), vec!["d(d(pi;0);pi)"]);
    }

    #[test]
    fn recurses_into_non_qualifying_collapses() {
        assert_eq!(ks("d(pi;0)", "d(pi;d(d(pi;0);0))"), vec!["d(d(pi;0);0)"]);
        assert_eq!(ks("pi", "adm(d(pi;0))"), vec!["d(pi;0)"]);
    }

    #[test]
    fn collapses_on_smaller_bases_search_only_the_base() {
        // everything under pi lies below every adm(pi)-collapse
        assert!(ks("adm(pi)", "d(pi;d(adm(pi);0))").is_empty());
        assert_eq!(ks("adm(pi)", "pi + d(adm(pi);0)"), vec!["d(adm(pi);0)"]);
        assert!(ks("d(pi;pi)", "d(d(pi;0);d(d(pi;pi);0))").is_empty());
        assert_eq!(ks("pi", "d(adm(d(pi;0));d(pi;pi))"), vec!["d(pi;0)"]);
    }

    #[test]
    fn rejects_non_regular_sigma() {
        assert!(matches!(
            kset(&Term::one(), &Term::Zero),
            Err(TermError::NotRegular(_))
        ));
    }
}
