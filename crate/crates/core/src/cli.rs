//! The `od` command line.
//!
//! Exit status: 0 on success or a passing check, 1 when a check finds
//! violations, 2 on usage, parse or domain errors.

use std::cmp::Ordering;
use std::fmt::Write as _;
use std::io::{self, Write};

use clap::{Parser, Subcommand, ValueEnum};

use crate::harness::{
    check_axioms, check_normalization, check_order_laws, check_order_laws_by, check_same_base,
    enumerate_fragment, run_succession, search_descending, CheckReport, GeneratorConfig, Strategy,
    SuccessionPolicy, TripleSampling,
};
use crate::order::{compare, compare_normal};
use crate::subst::make_subst;
use crate::term::{kset, normalize, parse, render, SystemFlavor, Term};
use crate::wf::validate;

pub const EXIT_OK: i32 = 0;
pub const EXIT_VIOLATIONS: i32 = 1;
pub const EXIT_ERROR: i32 = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum)]
pub enum OutputMode {
    #[default]
    Text,
    Structured,
}

#[derive(Debug, Parser)]
#[command(
    name = "od",
    version,
    about = "Ordinal diagrams: compare, normalize, verify"
)]
pub struct Cli {
    /// Notation system: m, p3 or p4.
    #[arg(long, global = true, default_value = "p3")]
    pub system: SystemFlavor,
    #[arg(long, global = true, value_enum, default_value_t = OutputMode::Text)]
    pub output: OutputMode,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Print `<`, `=` or `>`.
    Cmp { left: String, right: String },
    /// Print the normal form.
    Nf { term: String },
    /// Print the K-set of a term with respect to a regular term.
    Kset { sigma: String, term: String },
    /// Apply the substitution `pi := TARGET`.
    Subst {
        #[arg(long)]
        target: String,
        xi: String,
    },
    /// Verify order laws and collapse constraints on a fragment.
    Check {
        #[arg(long)]
        max_size: usize,
        /// Transitivity triples to sample.
        #[arg(long, default_value_t = 1_000_000)]
        triples: u64,
        /// Include next-admissible marks in the fragment.
        #[arg(long)]
        adm: bool,
        /// Flip the comparison of the first two fragment terms, to exercise
        /// the failure path.
        #[arg(long, hide = true)]
        invert_first_pair: bool,
    },
    /// Search for a long descending sequence below a term.
    Chains {
        #[arg(long)]
        seed: String,
        #[arg(long)]
        budget: usize,
        /// greedy, random[:SEED] or exhaustive.
        #[arg(long, default_value = "greedy")]
        strategy: Strategy,
    },
    /// Run one collapsing succession from pi.
    Succ {
        #[arg(long)]
        budget: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// List a fragment, one term per line.
    Enum {
        #[arg(long)]
        max_size: usize,
        #[arg(long)]
        adm: bool,
    },
}

struct Failure(String);

impl<E: std::fmt::Display> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure(e.to_string())
    }
}

fn read_term(text: &str, flavor: SystemFlavor) -> Result<Term, Failure> {
    let t = parse(text, flavor).map_err(|e| Failure(format!("cannot parse `{text}`: {e}")))?;
    if let Some(v) = validate(&t, flavor).first() {
        return Err(Failure(format!("`{text}` is not well formed: {v}")));
    }
    Ok(t)
}

/// Runs a parsed command, writing results to `out` and errors to `err`.
/// Returns the exit status.
pub fn execute(cli: &Cli, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    match run(cli) {
        Ok((text, code)) => {
            let _ = out.write_all(text.as_bytes());
            code
        }
        Err(Failure(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            EXIT_ERROR
        }
    }
}

/// Parses `args` (including the program name) and executes. Usage errors
/// print clap's message and return 2; `--help` and `--version` return 0.
pub fn main_with_args<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    match Cli::try_parse_from(args) {
        Ok(cli) => execute(&cli, out, err),
        Err(e) => {
            let code = e.exit_code();
            let rendered = e.render().to_string();
            let sink: &mut dyn Write = if e.use_stderr() { err } else { out };
            let _ = sink.write_all(rendered.as_bytes());
            code
        }
    }
}

pub fn main_from_env() -> i32 {
    let stdout = io::stdout();
    let stderr = io::stderr();
    main_with_args(std::env::args_os(), &mut stdout.lock(), &mut stderr.lock())
}

fn run(cli: &Cli) -> Result<(String, i32), Failure> {
    let flavor = cli.system;
    let structured = cli.output == OutputMode::Structured;
    let mut s = String::new();
    match &cli.command {
        Command::Cmp { left, right } => {
            let (x, y) = (read_term(left, flavor)?, read_term(right, flavor)?);
            let sym = match compare(&x, &y, flavor)? {
                Ordering::Less => "<",
                Ordering::Equal => "=",
                Ordering::Greater => ">",
            };
            writeln!(s, "{sym}")?;
        }
        Command::Nf { term } => {
            writeln!(s, "{}", render(&normalize(&read_term(term, flavor)?)))?;
        }
        Command::Kset { sigma, term } => {
            let sigma = normalize(&read_term(sigma, flavor)?);
            let ks = kset(&sigma, &normalize(&read_term(term, flavor)?))?;
            if structured {
                writeln!(s, "size={}", ks.len())?;
                for m in &ks {
                    writeln!(s, "member={}", render(m))?;
                }
            } else {
                let members: Vec<String> = ks.iter().map(render).collect();
                writeln!(s, "{{{}}}", members.join(", "))?;
            }
        }
        Command::Subst { target, xi } => {
            let sub = make_subst(&Term::Pi, &read_term(target, flavor)?, flavor)?;
            let image = sub.apply(&read_term(xi, flavor)?)?;
            writeln!(s, "{}", render(&normalize(&image)))?;
        }
        Command::Check {
            max_size,
            triples,
            adm,
            invert_first_pair,
        } => {
            if *max_size == 0 {
                return Err(Failure("--max-size must be at least 1".into()));
            }
            let cfg = if *adm {
                GeneratorConfig::with_adm()
            } else {
                GeneratorConfig::standard()
            };
            let fragment = enumerate_fragment(flavor, *max_size, &cfg);
            let head = CheckReport::new(
                flavor,
                fragment.len(),
                format!("pool={cfg} max_size={max_size} triples={triples}"),
            );
            let laws = if *invert_first_pair && fragment.len() >= 2 {
                let (a, b) = (fragment[0].clone(), fragment[1].clone());
                let faulty = move |x: &Term, y: &Term| {
                    let o = compare_normal(x, y);
                    if (*x == a && *y == b) || (*x == b && *y == a) {
                        o.reverse()
                    } else {
                        o
                    }
                };
                check_order_laws_by(&fragment, flavor, *triples, TripleSampling::Stride, &faulty)
            } else {
                check_order_laws(&fragment, flavor, *triples)
            };
            let report = head
                .merge(laws)
                .merge(check_axioms(&fragment, flavor))
                .merge(check_same_base(&fragment, flavor))
                .merge(check_normalization(&fragment, flavor));
            s.push_str(&format_report(&report, cli.output));
            let code = if report.passed() {
                EXIT_OK
            } else {
                EXIT_VIOLATIONS
            };
            return Ok((s, code));
        }
        Command::Chains {
            seed,
            budget,
            strategy,
        } => {
            let r = search_descending(&read_term(seed, flavor)?, flavor, *budget, *strategy)?;
            if structured {
                writeln!(
                    s,
                    "length={} complete={} explored={}",
                    r.sequence.len(),
                    r.complete,
                    r.explored
                )?;
                for t in &r.sequence {
                    writeln!(s, "step={}", render(t))?;
                }
            } else {
                for (i, t) in r.sequence.iter().enumerate() {
                    writeln!(s, "{i:>4}  {}", render(t))?;
                }
                writeln!(
                    s,
                    "length {}, {} terms explored, {}",
                    r.sequence.len(),
                    r.explored,
                    if r.complete { "complete" } else { "cut off" }
                )?;
            }
        }
        Command::Succ { budget, seed } => {
            if *budget == 0 {
                return Err(Failure("--budget must be at least 1".into()));
            }
            let policy = SuccessionPolicy::small();
            let trace = run_succession(flavor, &policy, *budget, *seed);
            let verified = trace.verify(&policy.wf);
            if structured {
                writeln!(s, "halt={} depth={}", trace.reason, trace.steps.len())?;
            } else {
                writeln!(s, "{} steps, stopped: {}", trace.steps.len(), trace.reason)?;
                for (i, t) in trace.steps.iter().take(SHOWN_STEPS).enumerate() {
                    writeln!(s, "{:>4}  {}", i + 1, render(t))?;
                }
                if trace.steps.len() > SHOWN_STEPS {
                    writeln!(s, "   ...")?;
                }
            }
            if let Err(e) = verified {
                writeln!(s, "trace check failed: {e}")?;
                return Ok((s, EXIT_VIOLATIONS));
            }
        }
        Command::Enum { max_size, adm } => {
            let cfg = if *adm {
                GeneratorConfig::with_adm()
            } else {
                GeneratorConfig::standard()
            };
            let fragment = enumerate_fragment(flavor, *max_size, &cfg);
            if structured {
                writeln!(s, "count={}", fragment.len())?;
            }
            for t in &fragment {
                writeln!(s, "{}", render(t))?;
            }
        }
    }
    Ok((s, EXIT_OK))
}

/// Deep successions render quadratically; only the first steps are shown.
const SHOWN_STEPS: usize = 8;

/// Renders a report. Structured mode starts with the summary line and adds
/// one `violation` line per recorded violation.
pub fn format_report(r: &CheckReport, mode: OutputMode) -> String {
    let mut s = String::new();
    match mode {
        OutputMode::Structured => {
            s.push_str(&r.summary_line());
            s.push('\n');
            for v in &r.violations {
                s.push_str("violation law=");
                s.push_str(&v.law);
                for w in &v.witnesses {
                    s.push_str(&format!(" witness=\"{}\"", render(w)));
                }
                s.push('\n');
            }
        }
        OutputMode::Text => {
            let _ = writeln!(s, "report");
            let _ = writeln!(s, "  verdict: {}", r.verdict());
            let _ = writeln!(s, "  flavor: {}", r.flavor);
            let _ = writeln!(s, "  fragment_size: {}", r.fragment_size);
            let _ = writeln!(s, "  config: {}", r.config);
            let _ = writeln!(s, "  pairs: {}", r.pairs);
            let _ = writeln!(s, "  triples: {}", r.triples);
            let _ = writeln!(s, "  violations: {}", r.violation_count);
            let _ = writeln!(s, "  elapsed_ms: {}", r.elapsed_ms);
            for v in &r.violations {
                let _ = writeln!(s, "  violation");
                let _ = writeln!(s, "    law: {}", v.law);
                for w in &v.witnesses {
                    let _ = writeln!(s, "    witness: {}", render(w));
                }
            }
        }
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::LawViolation;

    fn run_args(args: &[&str]) -> (i32, String, String) {
        let (mut out, mut err) = (Vec::new(), Vec::new());
        let code = main_with_args(
            std::iter::once("od").chain(args.iter().copied()),
            &mut out,
            &mut err,
        );
        (
            code,
            String::from_utf8(out).unwrap(),
            String::from_utf8(err).unwrap(),
        )
    }

    #[test]
    fn cmp_and_nf() {
        assert_eq!(
            run_args(&["cmp", "--system", "m", "d(pi;0)", "pi"]),
            (0, "<\n".into(), String::new())
        );
        assert_eq!(run_args(&["nf", "0 + phi(0,0)"]).1, "phi(0,0)\n");
    }

    #[test]
    fn errors_exit_two() {
        assert_eq!(run_args(&["nf", "phi(0"]).0, 2);
        assert_eq!(run_args(&["frobnicate"]).0, 2);
        assert_eq!(run_args(&["kset", "phi(0,0)", "pi"]).0, 2);
        assert_eq!(
            run_args(&["--system", "m", "subst", "--target", "d(pi;0)", "d(pi;pi)"]).0,
            2
        );
    }

    #[test]
    fn report_formats() {
        let mut r = CheckReport::new(SystemFlavor::M, 0, "empty");
        assert_eq!(
            format_report(&r, OutputMode::Structured),
            "verdict=pass pairs=0 violations=0 elapsed_ms=0\n"
        );
        r.record(LawViolation::new(
            "antisymmetry",
            vec![Term::Pi, Term::Zero],
        ));
        let s = format_report(&r, OutputMode::Structured);
        assert_eq!(
            s,
            "verdict=fail pairs=0 violations=1 elapsed_ms=0\nviolation law=antisymmetry witness=\"pi\" witness=\"0\"\n"
        );
        let t = format_report(&r, OutputMode::Text);
        assert!(t.contains("    law: antisymmetry\n    witness: pi\n"));
    }
}
