//! Acceptance gate. Runs every criterion, prints one line per criterion and
//! exits non-zero if any of them fails.
//!
//! Where a criterion has a derived expected value, it is recomputed here by
//! a separate oracle built only on the public API: brute-force K-sets over
//! subterm occurrences, the same-base biconditional evaluated directly,
//! pairwise loops instead of the harness matrix, and so on.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use od_core::harness::{
    check_axioms, check_order_laws, check_order_laws_by, check_same_base, enumerate_fragment,
    run_succession, CheckReport, GeneratorConfig, HaltReason, SuccessionPolicy, TripleSampling,
};
use od_core::order::{compare, compare_normal, same_base_less};
use od_core::subst::make_subst;
use od_core::term::{kset, normalize, parse, render, StageRecord, SystemFlavor, Term};
use od_core::wf::validate;
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

const TRIPLES: u64 = 1_000_000;

type Criterion = (&'static str, fn() -> Outcome);

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(failures: &[String], detail: String) -> Outcome {
    if failures.is_empty() {
        Outcome { pass: true, detail }
    } else {
        let shown: Vec<&String> = failures.iter().take(5).collect();
        Outcome {
            pass: false,
            detail: format!("{detail}; {} failure(s), first: {shown:?}", failures.len()),
        }
    }
}

/// The two fragments most criteria quantify over.
fn fragments() -> Vec<(SystemFlavor, usize, Vec<Term>)> {
    let cfg = GeneratorConfig::standard();
    vec![
        (
            SystemFlavor::M,
            6,
            enumerate_fragment(SystemFlavor::M, 6, &cfg),
        ),
        (
            SystemFlavor::P3,
            7,
            enumerate_fragment(SystemFlavor::P3, 7, &cfg),
        ),
    ]
}

fn cmp(x: &Term, y: &Term, f: SystemFlavor) -> Ordering {
    compare(x, y, f).expect("fragment terms are well formed")
}

fn lt(x: &Term, y: &Term, f: SystemFlavor) -> bool {
    cmp(x, y, f) == Ordering::Less
}

fn report_failures(r: &CheckReport) -> Vec<String> {
    r.violations
        .iter()
        .map(|v| {
            let w: Vec<String> = v.witnesses.iter().map(render).collect();
            format!("{} {w:?}", v.law)
        })
        .collect()
}

// ---------------------------------------------------------------------------
// oracles

/// Every collapse occurrence whose base chain, walked one base at a time,
/// reaches `sigma`, and that is not nested inside another such occurrence.
fn brute_kset(sigma: &Term, alpha: &Term) -> BTreeSet<Term> {
    fn reaches(c: &Term, sigma: &Term) -> bool {
        let mut b = match c {
            Term::Collapse(col) => col.base.clone(),
            _ => return false,
        };
        loop {
            if b == *sigma {
                return true;
            }
            b = match &b {
                Term::Collapse(col) => col.base.clone(),
                _ => return false,
            };
        }
    }
    // (occurrence, has a qualifying proper ancestor)
    let mut occurrences: Vec<(Term, bool)> = Vec::new();
    let mut stack = vec![(alpha.clone(), false)];
    while let Some((t, covered)) = stack.pop() {
        let here = reaches(&t, sigma);
        occurrences.push((t.clone(), covered));
        let children: Vec<Term> = match &t {
            Term::Zero | Term::Pi => vec![],
            Term::Sum(xs) => xs.to_vec(),
            Term::Phi(a, b) => vec![(**a).clone(), (**b).clone()],
            Term::Adm(u) => vec![(**u).clone()],
            Term::Collapse(c) => {
                let mut v = vec![c.base.clone(), c.arg.clone()];
                v.extend(c.stage.terms().cloned());
                v
            }
        };
        for ch in children {
            stack.push((ch, covered || here));
        }
    }
    occurrences
        .into_iter()
        .filter(|(t, covered)| !covered && reaches(t, sigma))
        .map(|(t, _)| t)
        .collect()
}

/// Argument then annotations, compared left to right.
fn lex_key(t: &Term) -> Vec<Term> {
    let c = t.as_collapse().unwrap();
    let mut key = vec![c.arg.clone()];
    match &c.stage {
        StageRecord::Empty => {}
        StageRecord::Q(q) => key.push(q.clone()),
        StageRecord::Four { st4, rg4, st3, rg3 } => {
            key.extend([st4.clone(), st3.clone(), rg4.clone(), rg3.clone()])
        }
    }
    key
}

/// `d b < d c  iff  (b < c and K b < d c) or d b <= some member of K c`,
/// with `b`, `c` standing for the argument and annotation tuples.
fn same_base_oracle(x: &Term, y: &Term, f: SystemFlavor) -> bool {
    let sigma = &x.as_collapse().unwrap().base;
    let (kx, ky) = (lex_key(x), lex_key(y));
    let key_less = kx
        .iter()
        .zip(&ky)
        .map(|(a, b)| cmp(a, b, f))
        .find(|o| *o != Ordering::Equal)
        == Some(Ordering::Less);
    let k_of = |key: &[Term]| -> BTreeSet<Term> {
        key.iter()
            .flat_map(|part| brute_kset(sigma, part))
            .collect()
    };
    let first = key_less && k_of(&kx).iter().all(|m| lt(m, y, f));
    let second = k_of(&ky).iter().any(|m| cmp(x, m, f) != Ordering::Greater);
    first || second
}

// ---------------------------------------------------------------------------
// criteria

fn order_lawfulness() -> Outcome {
    let start = Instant::now();
    let mut failures = Vec::new();
    let mut notes = Vec::new();
    for (flavor, size, frag) in fragments() {
        let stride = check_order_laws(&frag, flavor, TRIPLES);
        failures.extend(report_failures(&stride));
        let random = check_order_laws_by(
            &frag,
            flavor,
            TRIPLES,
            TripleSampling::Random(0x5eed),
            &compare_normal,
        );
        failures.extend(report_failures(&random));

        // pairwise table through the public, normalizing comparison
        let n = frag.len();
        let table: Vec<Vec<Ordering>> = frag
            .par_iter()
            .map(|x| frag.iter().map(|y| cmp(x, y, flavor)).collect())
            .collect();
        for i in 0..n {
            for j in 0..n {
                let o = table[i][j];
                if (i == j) != (o == Ordering::Equal) {
                    failures.push(format!("equality {} {}", frag[i], frag[j]));
                }
                if table[j][i] != o.reverse() {
                    failures.push(format!("antisymmetry {} {}", frag[i], frag[j]));
                }
            }
        }
        let total = (n as u64).pow(3);
        let sampled = total.min(TRIPLES);
        let broken: Vec<String> = (0..sampled)
            .into_par_iter()
            .filter_map(|k| {
                let idx = if total <= TRIPLES {
                    k
                } else {
                    (k as u128 * total as u128 / TRIPLES as u128) as u64
                } as usize;
                let (i, j, l) = (idx / (n * n), (idx / n) % n, idx % n);
                let chain = table[i][j] == Ordering::Less && table[j][l] == Ordering::Less;
                (chain && table[i][l] != Ordering::Less)
                    .then(|| format!("transitivity {} {} {}", frag[i], frag[j], frag[l]))
            })
            .collect();
        failures.extend(broken);
        notes.push(format!(
            "{flavor}<={size}: {n} terms, {} pairs, {} stride + {} random triples",
            n * n,
            stride.triples,
            random.triples
        ));
    }
    let elapsed = start.elapsed();
    if elapsed > Duration::from_secs(300) {
        failures.push(format!("wall time {elapsed:?} over 5 minutes"));
    }
    outcome(&failures, notes.join("; "))
}

fn axiom_conformance() -> Outcome {
    let mut failures = Vec::new();
    let mut tuples = 0u64;
    for (flavor, _, frag) in fragments() {
        let r = check_axioms(&frag, flavor);
        failures.extend(report_failures(&r));
        tuples += r.pairs;

        let collapses: Vec<&Term> = frag.iter().filter(|t| t.as_collapse().is_some()).collect();
        for &c in &collapses {
            let col = c.as_collapse().unwrap();
            if !lt(c, &col.base, flavor) {
                failures.push(format!("below base: {c}"));
            }
            let parts: BTreeSet<Term> = std::iter::once(&col.arg)
                .chain(col.stage.terms())
                .flat_map(|p| brute_kset(&col.base, p))
                .collect();
            if parts.iter().any(|m| !lt(m, c, flavor)) {
                failures.push(format!("K below collapse: {c}"));
            }
        }
        for sigma in frag.iter().filter(|t| t.is_strongly_critical()) {
            for alpha in &frag {
                if brute_kset(sigma, alpha)
                    .iter()
                    .any(|m| lt(alpha, m, flavor))
                {
                    failures.push(format!("K bounded by argument: {sigma} {alpha}"));
                }
            }
        }
        for alpha in &frag {
            for &c in &collapses {
                let sigma = &c.as_collapse().unwrap().base;
                if lt(alpha, sigma, flavor)
                    && brute_kset(sigma, alpha).iter().all(|m| lt(m, c, flavor))
                    && !lt(alpha, c, flavor)
                {
                    failures.push(format!("small K but not below: {alpha} {c}"));
                }
            }
        }
    }
    outcome(
        &failures,
        format!("{tuples} tuples via harness, rechecked directly"),
    )
}

fn same_base_equivalence() -> Outcome {
    let mut failures = Vec::new();
    let mut pairs = 0u64;
    for (flavor, _, frag) in fragments() {
        let mut by_base: BTreeMap<Term, Vec<&Term>> = BTreeMap::new();
        for c in frag.iter().filter(|t| t.as_collapse().is_some()) {
            by_base
                .entry(c.as_collapse().unwrap().base.clone())
                .or_default()
                .push(c);
        }
        for cs in by_base.values() {
            for &x in cs {
                for &y in cs {
                    if x == y {
                        continue;
                    }
                    pairs += 1;
                    let oracle = same_base_oracle(x, y, flavor);
                    if oracle != lt(x, y, flavor) {
                        failures.push(format!("compare vs oracle: {x} {y}"));
                    }
                    if same_base_less(x, y, flavor) != Ok(oracle) {
                        failures.push(format!("same_base_less vs oracle: {x} {y}"));
                    }
                }
            }
        }
        failures.extend(report_failures(&check_same_base(&frag, flavor)));
    }
    outcome(&failures, format!("{pairs} same-base pairs"))
}

fn kset_equivalence() -> Outcome {
    let mut failures = Vec::new();
    let mut pairs = 0u64;
    let mut nonempty = 0u64;
    for (_, _, frag) in fragments() {
        for sigma in frag.iter().filter(|t| t.is_strongly_critical()) {
            for alpha in &frag {
                pairs += 1;
                let fast = kset(sigma, alpha).expect("regular sigma").into_set();
                let slow = brute_kset(sigma, alpha);
                if !slow.is_empty() {
                    nonempty += 1;
                }
                if fast != slow {
                    failures.push(format!("K({sigma}, {alpha}): {fast:?} vs {slow:?}"));
                }
            }
        }
        // a non-regular sigma is rejected
        if kset(&Term::one(), &frag[0]).is_ok() {
            failures.push("non-regular sigma accepted".into());
        }
    }
    outcome(
        &failures,
        format!("{pairs} (sigma, alpha) pairs, {nonempty} non-empty"),
    )
}

fn substitution_embedding() -> Outcome {
    let mut failures = Vec::new();
    let mut notes = Vec::new();
    let runs = [
        (
            SystemFlavor::M,
            vec!["d(pi;0)", "d(pi;pi)", "d(pi;d(pi;0))", "d(pi;adm(pi))"],
        ),
        (
            SystemFlavor::P3,
            vec!["d(pi;0;0)", "d(pi;pi;0)", "d(pi;0;pi)"],
        ),
    ];
    for (flavor, targets) in runs {
        let frag = enumerate_fragment(flavor, 6, &GeneratorConfig::with_adm());
        for target_text in targets {
            let target = parse(target_text, flavor).unwrap();
            let s = make_subst(&Term::Pi, &target, flavor).unwrap();
            let dom: Vec<Term> = frag.iter().filter(|x| s.in_domain(x)).cloned().collect();
            let report = s.verify_embedding(&dom).unwrap();
            failures.extend(report_failures(&report));

            let image: Vec<Term> = dom
                .iter()
                .map(|x| normalize(&s.apply(x).unwrap()))
                .collect();
            let adm_pi = Term::adm(Term::Pi);
            let adm_target = Term::adm(target.clone());
            for (i, x) in dom.iter().enumerate() {
                let fx = &image[i];
                for (j, y) in dom.iter().enumerate() {
                    if cmp(x, y, flavor) != cmp(fx, &image[j], flavor) {
                        failures.push(format!("order not preserved {target_text}: {x} {y}"));
                    }
                }
                if lt(x, &Term::Pi, flavor) && fx != x {
                    failures.push(format!("moved below pi {target_text}: {x}"));
                }
                if lt(x, &adm_pi, flavor) && !lt(fx, &adm_target, flavor) {
                    failures.push(format!(
                        "image not below next admissible {target_text}: {x}"
                    ));
                }
                let parts: Option<Term> = match x {
                    Term::Sum(xs) => {
                        Some(Term::sum(xs.iter().map(|p| s.apply(p).unwrap()).collect()))
                    }
                    Term::Phi(a, b) => Some(Term::phi(s.apply(a).unwrap(), s.apply(b).unwrap())),
                    _ => None,
                };
                if let Some(p) = parts {
                    if normalize(&p) != *fx {
                        failures.push(format!("does not commute {target_text}: {x}"));
                    }
                }
                let mapped: BTreeSet<Term> = kset(&adm_pi, x)
                    .unwrap()
                    .iter()
                    .map(|m| normalize(&s.apply(m).unwrap()))
                    .collect();
                if mapped != kset(&adm_target, fx).unwrap().into_set() {
                    failures.push(format!("kset not mapped {target_text}: {x}"));
                }
            }
            notes.push(format!(
                "{flavor} {target_text}: {}/{}",
                dom.len(),
                frag.len()
            ));
        }
    }
    outcome(
        &failures,
        format!("in-domain terms of size <= 6: {}", notes.join(", ")),
    )
}

fn succession_finiteness() -> Outcome {
    const RUNS: u64 = 10_000;
    const BUDGET: usize = 10_000;
    let pool = enumerate_fragment(SystemFlavor::P3, 5, &GeneratorConfig::with_adm());
    let results: Vec<Result<usize, String>> = (0..RUNS)
        .into_par_iter()
        .map(|seed| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut draw = |k: usize| -> Vec<Term> {
                (0..k)
                    .map(|_| pool[rng.random_range(0..pool.len())].clone())
                    .collect()
            };
            let args = draw(1 + (seed % 4) as usize);
            let stages = draw(1 + (seed % 8) as usize);
            let policy = SuccessionPolicy::new(args, stages.clone());
            let trace = run_succession(SystemFlavor::P3, &policy, BUDGET, seed);
            trace.verify(&policy.wf)?;
            if trace.reason != HaltReason::NoLegalExtension {
                return Err(format!("seed {seed}: stopped by {}", trace.reason));
            }
            // stages strictly descend, so the depth is bounded by the number
            // of distinct stages in the pool
            let distinct: BTreeSet<&Term> = stages.iter().collect();
            if trace.steps.len() > distinct.len() {
                return Err(format!(
                    "seed {seed}: depth {} too large",
                    trace.steps.len()
                ));
            }
            for s in &trace.steps {
                if !validate(s, SystemFlavor::P3).is_empty() {
                    return Err(format!("seed {seed}: invalid step {s}"));
                }
            }
            Ok(trace.steps.len())
        })
        .collect();
    let mut failures: Vec<String> = results.iter().filter_map(|r| r.clone().err()).collect();
    let deepest = results
        .iter()
        .filter_map(|r| r.as_ref().ok())
        .max()
        .copied()
        .unwrap_or(0);

    let control = run_succession(SystemFlavor::M, &SuccessionPolicy::small(), BUDGET, 1);
    if control.reason != HaltReason::Budget || control.steps.len() != BUDGET {
        failures.push(format!(
            "M control stopped by {} at {}",
            control.reason,
            control.steps.len()
        ));
    }
    if let Err(e) = control.verify(&Default::default()) {
        failures.push(format!("M control trace: {e}"));
    }
    outcome(
        &failures,
        format!(
            "{RUNS} P3 runs halted with no legal extension (deepest {deepest}); M control hit budget {BUDGET}"
        ),
    )
}

fn roundtrip_and_normalization() -> Outcome {
    let mut failures = Vec::new();
    let mut pairs = 0u64;
    let mut sets = fragments();
    for (flavor, size) in [(SystemFlavor::M, 6), (SystemFlavor::P3, 7)] {
        sets.push((
            flavor,
            size,
            enumerate_fragment(flavor, size, &GeneratorConfig::with_adm()),
        ));
    }
    for (flavor, _, frag) in sets {
        // trailing zero summand: never normal, same value
        let padded: Vec<Term> = frag
            .iter()
            .map(|t| Term::sum(vec![t.clone(), Term::Zero]))
            .collect();
        for (t, p) in frag.iter().zip(&padded) {
            if parse(&render(t), flavor).as_ref() != Ok(t) {
                failures.push(format!("round trip {t}"));
            }
            let n = normalize(t);
            if normalize(&n) != n || n != *t {
                failures.push(format!("normal form {t}"));
            }
            if normalize(p) != *t {
                failures.push(format!("padded {t}"));
            }
        }
        let bad: Vec<String> = (0..frag.len())
            .into_par_iter()
            .flat_map_iter(|i| {
                let (frag, padded) = (&frag, &padded);
                (0..frag.len())
                    .filter(move |&j| {
                        cmp(&padded[i], &padded[j], flavor) != compare_normal(&frag[i], &frag[j])
                    })
                    .map(move |j| format!("invariance {} {}", frag[i], frag[j]))
            })
            .collect();
        failures.extend(bad);
        pairs += (frag.len() * frag.len()) as u64;
    }
    outcome(&failures, format!("{pairs} pairs over four fragments"))
}

fn cli_contract() -> Outcome {
    let bin = env!("CARGO_BIN_EXE_od");
    let run = |args: &[&str]| {
        let out = Command::new(bin).args(args).output().expect("run od");
        (
            out.status.code().unwrap_or(-1),
            String::from_utf8_lossy(&out.stdout).into_owned(),
        )
    };
    let summary = |line: &str| {
        let fields: Vec<&str> = line.split(' ').collect();
        fields.len() == 4
            && ["verdict=", "pairs=", "violations=", "elapsed_ms="]
                .iter()
                .zip(&fields)
                .all(|(k, f)| f.strip_prefix(k).is_some_and(|v| !v.is_empty()))
            && matches!(fields[0], "verdict=pass" | "verdict=fail")
            && fields[1..].iter().all(|f| {
                f.split('=')
                    .nth(1)
                    .unwrap()
                    .bytes()
                    .all(|b| b.is_ascii_digit())
            })
    };
    let mut failures = Vec::new();
    let mut expect = |name: &str, got: (i32, String), code: i32, check: &dyn Fn(&str) -> bool| {
        if got.0 != code || !check(&got.1) {
            failures.push(format!("{name}: exit {} output {:?}", got.0, got.1));
        }
    };
    expect(
        "cmp",
        run(&["cmp", "--system", "m", "d(pi;0)", "pi"]),
        0,
        &|o| o == "<\n",
    );
    expect("nf", run(&["nf", "0 + phi(0,0)"]), 0, &|o| {
        o == "phi(0,0)\n"
    });
    expect("parse error", run(&["nf", "phi(0,"]), 2, &|o| o.is_empty());
    expect("arity error", run(&["nf", "d(pi;0)"]), 2, &|o| o.is_empty());
    expect("unknown subcommand", run(&["frobnicate"]), 2, &|o| {
        o.is_empty()
    });
    expect("bad flavor", run(&["--system", "p5", "nf", "0"]), 2, &|o| {
        o.is_empty()
    });
    expect(
        "domain error",
        run(&["--system", "m", "subst", "--target", "d(pi;0)", "d(pi;pi)"]),
        2,
        &|o| o.is_empty(),
    );
    expect(
        "passing check",
        run(&[
            "check",
            "--system",
            "p3",
            "--max-size",
            "6",
            "--output",
            "structured",
        ]),
        0,
        &|o| o.lines().count() == 1 && summary(o.trim_end()) && o.starts_with("verdict=pass "),
    );
    expect(
        "failing check",
        run(&[
            "check",
            "--system",
            "m",
            "--max-size",
            "4",
            "--output",
            "structured",
            "--invert-first-pair",
        ]),
        1,
        &|o| {
            let mut lines = o.lines();
            lines
                .next()
                .is_some_and(|l| summary(l) && l.starts_with("verdict=fail "))
                && lines.all(|l| l.starts_with("violation law="))
        },
    );
    outcome(&failures, "9 invocations".into())
}

fn main() -> ExitCode {
    let criteria: [Criterion; 8] = [
        ("order-lawfulness", order_lawfulness),
        ("collapse-constraints", axiom_conformance),
        ("same-base-oracle", same_base_equivalence),
        ("kset-oracle", kset_equivalence),
        ("substitution-embedding", substitution_embedding),
        ("succession-finiteness", succession_finiteness),
        ("roundtrip-normalization", roundtrip_and_normalization),
        ("cli-contract", cli_contract),
    ];
    let mut all = true;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let o = run();
        all &= o.pass;
        println!(
            "criterion {} {name}: {} ({}; {:.1?})",
            i + 1,
            if o.pass { "PASS" } else { "FAIL" },
            o.detail,
            start.elapsed()
        );
    }
    if all {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
