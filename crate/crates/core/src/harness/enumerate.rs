use std::cmp::Ordering;
use std::fmt;

use crate::order::compare_normal;
use crate::term::{is_normal, StageRecord, SystemFlavor, Term};
use crate::wf::{is_regular, validate_head, WfConfig};

/// Which constructors a fragment may use.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GeneratorConfig {
    pub zero: bool,
    pub pi: bool,
    pub plus: bool,
    pub phi: bool,
    pub collapse: bool,
    pub adm: bool,
    pub wf: WfConfig,
}

impl GeneratorConfig {
    /// `{0, pi, +, phi, d}`.
    pub fn standard() -> Self {
        GeneratorConfig {
            zero: true,
            pi: true,
            plus: true,
            phi: true,
            collapse: true,
            adm: false,
            wf: WfConfig::default(),
        }
    }

    /// The standard pool plus next-admissible marks.
    pub fn with_adm() -> Self {
        GeneratorConfig {
            adm: true,
            ..Self::standard()
        }
    }

    pub fn only(zero: bool, pi: bool, plus: bool, phi: bool, collapse: bool, adm: bool) -> Self {
        GeneratorConfig {
            zero,
            pi,
            plus,
            phi,
            collapse,
            adm,
            wf: WfConfig::default(),
        }
    }
}

impl Default for GeneratorConfig {
    fn default() -> Self {
        Self::standard()
    }
}

impl fmt::Display for GeneratorConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names = [
            (self.zero, "0"),
            (self.pi, "pi"),
            (self.plus, "+"),
            (self.phi, "phi"),
            (self.collapse, "d"),
            (self.adm, "adm"),
        ];
        let on: Vec<&str> = names.iter().filter(|(b, _)| *b).map(|(_, n)| *n).collect();
        write!(f, "{{{}}}", on.join(","))
    }
}

/// All normalized, well-formed terms of size at most `max_size`, ordered by
/// size and then by a fixed construction order.
pub fn enumerate_fragment(
    flavor: SystemFlavor,
    max_size: usize,
    cfg: &GeneratorConfig,
) -> Vec<Term> {
    fragment_by_size(flavor, max_size, cfg)
        .into_iter()
        .flatten()
        .collect()
}

/// Same as [`enumerate_fragment`], bucketed by exact size (index 0 is empty).
pub fn fragment_by_size(
    flavor: SystemFlavor,
    max_size: usize,
    cfg: &GeneratorConfig,
) -> Vec<Vec<Term>> {
    let mut by: Vec<Vec<Term>> = vec![Vec::new(); max_size + 1];
    for s in 1..=max_size {
        let mut level = Vec::new();
        if s == 1 {
            if cfg.zero {
                level.push(Term::Zero);
            }
            if cfg.pi {
                level.push(Term::Pi);
            }
        }
        if cfg.phi && s >= 3 {
            for sa in 1..s - 1 {
                for a in &by[sa] {
                    for b in &by[s - 1 - sa] {
                        let t = Term::phi(a.clone(), b.clone());
                        if is_normal(&t) {
                            level.push(t);
                        }
                    }
                }
            }
        }
        if cfg.adm && s >= 2 {
            for u in by[s - 1].iter().filter(|u| is_regular(u)) {
                level.push(Term::adm(u.clone()));
            }
        }
        if cfg.collapse {
            push_collapses(&by, s, flavor, &cfg.wf, &mut level);
        }
        if cfg.plus && s >= 3 {
            let mut prefix = Vec::new();
            push_sums(&by, s - 1, &mut prefix, &mut level);
        }
        by[s] = level;
    }
    by
}

fn push_collapses(
    by: &[Vec<Term>],
    s: usize,
    flavor: SystemFlavor,
    wf: &WfConfig,
    out: &mut Vec<Term>,
) {
    let fields = flavor.collapse_fields();
    if s < fields + 1 {
        return;
    }
    let mut sizes = vec![0; fields];
    for_each_composition(s - 1, &mut sizes, 0, &mut |sizes| {
        let mut parts: Vec<&Term> = Vec::with_capacity(fields);
        product(by, sizes, &mut parts, &mut |parts| {
            if !is_regular(parts[0]) {
                return;
            }
            let stage = match flavor {
                SystemFlavor::M => StageRecord::Empty,
                SystemFlavor::P3 => StageRecord::Q(parts[2].clone()),
                SystemFlavor::P4 => StageRecord::Four {
                    st4: parts[2].clone(),
                    rg4: parts[3].clone(),
                    st3: parts[4].clone(),
                    rg3: parts[5].clone(),
                },
            };
            let t = Term::collapse(parts[0].clone(), parts[1].clone(), stage);
            if validate_head(&t, flavor, wf).is_empty() {
                out.push(t);
            }
        });
    });
}

/// Every split of `total` into `sizes.len()` positive parts.
fn for_each_composition(
    total: usize,
    sizes: &mut Vec<usize>,
    i: usize,
    f: &mut dyn FnMut(&[usize]),
) {
    let n = sizes.len();
    if i == n - 1 {
        if total >= 1 {
            sizes[i] = total;
            f(sizes);
        }
        return;
    }
    let remaining_slots = n - i - 1;
    for k in 1..=total.saturating_sub(remaining_slots) {
        sizes[i] = k;
        for_each_composition(total - k, sizes, i + 1, f);
    }
}

fn product<'a>(
    by: &'a [Vec<Term>],
    sizes: &[usize],
    parts: &mut Vec<&'a Term>,
    f: &mut dyn FnMut(&[&'a Term]),
) {
    let i = parts.len();
    if i == sizes.len() {
        f(parts);
        return;
    }
    for t in &by[sizes[i]] {
        parts.push(t);
        product(by, sizes, parts, f);
        parts.pop();
    }
}

/// Sums of at least two weakly descending principal summands whose sizes add
/// up to `budget`.
fn push_sums(by: &[Vec<Term>], budget: usize, prefix: &mut Vec<Term>, out: &mut Vec<Term>) {
    if budget == 0 {
        if prefix.len() >= 2 {
            out.push(Term::sum(prefix.clone()));
        }
        return;
    }
    for k in 1..=budget {
        for x in &by[k] {
            if matches!(x, Term::Zero | Term::Sum(_)) {
                continue;
            }
            if prefix
                .last()
                .is_some_and(|prev| compare_normal(prev, x) == Ordering::Less)
            {
                continue;
            }
            prefix.push(x.clone());
            push_sums(by, budget - k, prefix, out);
            prefix.pop();
        }
    }
}
