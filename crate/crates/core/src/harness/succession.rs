use std::fmt;

use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::term::{render, StageRecord, SystemFlavor, Term};
use crate::wf::{chain_of, validate_head, WfConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HaltReason {
    NoLegalExtension,
    Budget,
}

impl fmt::Display for HaltReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            HaltReason::NoLegalExtension => "no legal extension",
            HaltReason::Budget => "budget",
        })
    }
}

/// Finite pools the next collapse draws its argument and stages from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SuccessionPolicy {
    pub arg_pool: Vec<Term>,
    /// q-parts for P3, `st4`/`st3` for P4; unused for M.
    pub stage_pool: Vec<Term>,
    pub wf: WfConfig,
}

impl SuccessionPolicy {
    pub fn new(arg_pool: Vec<Term>, stage_pool: Vec<Term>) -> Self {
        SuccessionPolicy {
            arg_pool,
            stage_pool,
            wf: WfConfig::default(),
        }
    }

    /// Arguments `{0, 1}` and stages `{0, 1, omega, pi}`.
    pub fn small() -> Self {
        let one = Term::one();
        SuccessionPolicy::new(
            vec![Term::Zero, one.clone()],
            vec![
                Term::Zero,
                one.clone(),
                Term::phi(Term::Zero, one),
                Term::Pi,
            ],
        )
    }
}

/// `pi = s0, s1, s2, ...` with each `s(n+1)` a collapse on base `s(n)`.
/// The first entry of `steps` is `s1`.
#[derive(Clone, PartialEq, Eq)]
pub struct SuccessionTrace {
    pub flavor: SystemFlavor,
    pub steps: Vec<Term>,
    pub reason: HaltReason,
}

impl SuccessionTrace {
    /// True when the succession stopped on its own.
    pub fn halted(&self) -> bool {
        self.reason == HaltReason::NoLegalExtension
    }

    /// Rechecks base chaining and the head conditions of every step.
    pub fn verify(&self, wf: &WfConfig) -> Result<(), String> {
        let mut prev = Term::Pi;
        for (i, s) in self.steps.iter().enumerate() {
            let c = s
                .as_collapse()
                .ok_or_else(|| format!("step {} is not a collapse", i + 1))?;
            if c.base != prev {
                return Err(format!("step {} is not based on step {i}", i + 1));
            }
            if let Some(v) = validate_head(s, self.flavor, wf).first() {
                return Err(format!("step {}: {v}", i + 1));
            }
            prev = s.clone();
        }
        Ok(())
    }
}

impl fmt::Debug for SuccessionTrace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SuccessionTrace")
            .field("flavor", &self.flavor)
            .field("depth", &self.steps.len())
            .field("reason", &self.reason)
            .field("first", &self.steps.first().map(render))
            .finish()
    }
}

impl Drop for SuccessionTrace {
    // Each step owns the previous one through its base; dropping newest first
    // keeps the drop glue from recursing through the whole chain.
    fn drop(&mut self) {
        while let Some(t) = self.steps.pop() {
            drop(t);
        }
    }
}

fn candidates(prev: &Term, flavor: SystemFlavor, policy: &SuccessionPolicy) -> Vec<Term> {
    let mut out = Vec::new();
    let stages: Vec<StageRecord> = match flavor {
        SystemFlavor::M => vec![StageRecord::Empty],
        SystemFlavor::P3 => policy
            .stage_pool
            .iter()
            .cloned()
            .map(StageRecord::Q)
            .collect(),
        SystemFlavor::P4 => {
            let mut ranges = vec![prev.clone()];
            if let Ok(chain) = chain_of(prev) {
                ranges.push(chain.last().unwrap().clone());
            }
            let mut v = Vec::new();
            for st4 in &policy.stage_pool {
                for st3 in &policy.stage_pool {
                    for rg4 in &ranges {
                        for rg3 in &ranges {
                            v.push(StageRecord::Four {
                                st4: st4.clone(),
                                rg4: rg4.clone(),
                                st3: st3.clone(),
                                rg3: rg3.clone(),
                            });
                        }
                    }
                }
            }
            v
        }
    };
    for arg in &policy.arg_pool {
        for st in &stages {
            let t = Term::collapse(prev.clone(), arg.clone(), st.clone());
            if validate_head(&t, flavor, &policy.wf).is_empty() {
                out.push(t);
            }
        }
    }
    out
}

/// Grows a collapsing succession from `pi`, picking uniformly among the legal
/// extensions at each step.
pub fn run_succession(
    flavor: SystemFlavor,
    policy: &SuccessionPolicy,
    step_budget: usize,
    seed: u64,
) -> SuccessionTrace {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut trace = SuccessionTrace {
        flavor,
        steps: Vec::new(),
        reason: HaltReason::Budget,
    };
    let mut prev = Term::Pi;
    while trace.steps.len() < step_budget {
        let mut next = candidates(&prev, flavor, policy);
        if next.is_empty() {
            trace.reason = HaltReason::NoLegalExtension;
            return trace;
        }
        let pick = next.swap_remove(rng.random_range(0..next.len()));
        trace.steps.push(pick.clone());
        prev = pick;
    }
    trace
}
