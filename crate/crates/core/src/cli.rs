//! Command-line front end. [`run`] does all the work and returns what the
//! `fairdiv` binary should print and exit with, so it can be tested in
//! process.
//!
//! Exit codes: 0 success, 1 usage, parse or validation error, 2 capability
//! error (non-rank valuations, brute-force caps), 3 verification mismatch or
//! internal invariant failure.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use crate::algorithms::{solve, Fairness, SolveReport};
use crate::error::{Error, Result};
use crate::fairness::{
    certify_no_mms_allocation, is_ef1, is_envy_free, is_mms, is_pmms, Alpha, FairnessVerdict,
    Witness,
};
use crate::generate::{generate, Family, GeneratorConfig};
use crate::instance::Instance;
use crate::io::{
    canonical, check_all_axioms, instance_to_string, parse_allocation, parse_instance,
};
use crate::oracles::{exhaustive_max_welfare, exhaustive_mms, BruteCaps};
use crate::shares::{brute_shares_for_instance, mms_brute, mms_fast, shares_for_instance};
use crate::subset::Subset;

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_CAPABILITY: i32 = 2;
pub const EXIT_MISMATCH: i32 = 3;

#[derive(Parser, Debug)]
#[command(
    name = "fairdiv",
    version,
    about = "Welfare-maximizing MMS and PMMS allocations under matroid rank valuations"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run the MMS or PMMS algorithm on an instance.
    Solve {
        #[arg(long, value_enum)]
        fairness: FairnessArg,
        #[command(flatten)]
        input: InputArgs,
        /// Re-check the result with the brute-force oracles.
        #[arg(long)]
        verify: bool,
        #[arg(long)]
        json: bool,
    },
    /// Print every agent's maximin share for K parts of all goods.
    Shares {
        #[arg(long)]
        k: usize,
        #[command(flatten)]
        input: InputArgs,
        #[arg(long)]
        json: bool,
    },
    /// Check a fairness property of an allocation.
    Check {
        #[arg(long, value_enum)]
        property: PropertyArg,
        /// Approximation factor P/Q for mms and pmms.
        #[arg(long, default_value = "1/1", value_parser = parse_alpha)]
        alpha: Alpha,
        #[command(flatten)]
        input: InputArgs,
        #[arg(long)]
        allocation: PathBuf,
        #[arg(long)]
        json: bool,
    },
    /// Decide by enumeration whether an MMS allocation exists.
    CertifyNoMms {
        #[command(flatten)]
        input: InputArgs,
        #[arg(long)]
        json: bool,
    },
    /// Print a seeded random instance.
    Gen {
        #[arg(long, value_parser = parse_family)]
        family: Family,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        m: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        blocks: Option<usize>,
        #[arg(long)]
        density: Option<u32>,
        #[arg(long)]
        slots: Option<usize>,
        #[arg(long)]
        dimension: Option<usize>,
    },
    /// Parse an instance and check the matroid axioms of every rank valuation.
    Validate {
        #[arg(long)]
        input: PathBuf,
    },
}

#[derive(Args, Debug)]
struct InputArgs {
    /// Instance file.
    #[arg(long)]
    input: PathBuf,
    /// Check the axioms of explicitly listed matroids while parsing.
    #[arg(long)]
    validate: bool,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum FairnessArg {
    Mms,
    Pmms,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum PropertyArg {
    Ef,
    Ef1,
    Mms,
    Pmms,
}

fn parse_alpha(s: &str) -> std::result::Result<Alpha, String> {
    let (p, q) = s.split_once('/').unwrap_or((s, "1"));
    let p: u64 = p
        .trim()
        .parse()
        .map_err(|_| format!("bad numerator in {s:?}"))?;
    let q: u64 = q
        .trim()
        .parse()
        .map_err(|_| format!("bad denominator in {s:?}"))?;
    if q == 0 || p == 0 || p > q {
        return Err(format!("alpha {s:?} must lie in (0, 1]"));
    }
    Ok(Alpha::new(p, q))
}

fn parse_family(s: &str) -> std::result::Result<Family, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

/// What the binary prints and returns.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

impl Outcome {
    fn ok(stdout: String) -> Self {
        Self {
            code: EXIT_OK,
            stdout,
            stderr: String::new(),
        }
    }

    fn error(e: &Error) -> Self {
        let code = match e {
            Error::Capability { .. } => EXIT_CAPABILITY,
            Error::Invariant(_) => EXIT_MISMATCH,
            _ => EXIT_USAGE,
        };
        Self {
            code,
            stdout: String::new(),
            stderr: format!("error: {e}\n"),
        }
    }
}

/// Runs one command. `args` includes the program name.
pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                Outcome {
                    code: EXIT_USAGE,
                    stdout: String::new(),
                    stderr: text,
                }
            } else {
                Outcome::ok(text)
            };
        }
    };
    if let Err(e) = BruteCaps::from_env() {
        return Outcome::error(&e);
    }
    match dispatch(cli.command) {
        Ok(outcome) => outcome,
        Err(e) => Outcome::error(&e),
    }
}

fn dispatch(command: Command) -> Result<Outcome> {
    match command {
        Command::Solve {
            fairness,
            input,
            verify,
            json,
        } => cmd_solve(fairness, &input, verify, json),
        Command::Shares { k, input, json } => cmd_shares(k, &input, json),
        Command::Check {
            property,
            alpha,
            input,
            allocation,
            json,
        } => cmd_check(property, alpha, &input, &allocation, json),
        Command::CertifyNoMms { input, json } => cmd_certify(&input, json),
        Command::Gen {
            family,
            n,
            m,
            seed,
            blocks,
            density,
            slots,
            dimension,
        } => {
            let config = GeneratorConfig {
                seed,
                family,
                n,
                m,
                blocks,
                density_percent: density,
                slots,
                dimension,
            };
            Ok(Outcome::ok(instance_to_string(&generate(&config)?)))
        }
        Command::Validate { input } => cmd_validate(&input),
    }
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path)
        .map_err(|e| Error::Argument(format!("cannot read {}: {e}", path.display())))
}

fn load(input: &InputArgs) -> Result<Instance> {
    parse_instance(&read(&input.input)?, input.validate)
}

fn json_out(value: &impl Serialize) -> String {
    canonical(&serde_json::to_value(value).expect("plain data"))
}

#[derive(Clone, Serialize)]
struct Verification {
    optimal_welfare: u64,
    /// Brute-force shares the result was compared against, one per check.
    checks: usize,
    passed: bool,
    failures: Vec<String>,
}

#[derive(Serialize)]
struct SolveOutput<'a> {
    #[serde(flatten)]
    report: &'a SolveReport,
    queries: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    verification: Option<Verification>,
}

fn cmd_solve(
    fairness: FairnessArg,
    input: &InputArgs,
    verify: bool,
    json: bool,
) -> Result<Outcome> {
    let inst = load(input)?;
    let fairness = match fairness {
        FairnessArg::Mms => Fairness::Mms,
        FairnessArg::Pmms => Fairness::Pmms,
    };
    inst.reset_queries();
    let report = solve(&inst, fairness)?;
    let queries = inst.query_count();
    let verification = verify.then(|| verify_report(&inst, &report)).transpose()?;

    let stdout = if json {
        json_out(&SolveOutput {
            report: &report,
            queries,
            verification: verification.clone(),
        })
    } else {
        let mut out = String::new();
        let fairness_name = match fairness {
            Fairness::Mms => "mms",
            Fairness::Pmms => "pmms",
        };
        writeln!(out, "fairness: {fairness_name}").unwrap();
        for (i, bundle) in report.allocation.bundles().iter().enumerate() {
            writeln!(out, "agent {i}: bundle {bundle} value {}", report.values[i]).unwrap();
        }
        writeln!(out, "unassigned: {}", report.unassigned).unwrap();
        writeln!(out, "shares:").unwrap();
        for e in report.shares.entries() {
            writeln!(out, "  mu_{}({}, {}) = {}", e.agent, e.k, e.goods, e.value).unwrap();
        }
        writeln!(out, "welfare: {}", report.welfare).unwrap();
        writeln!(
            out,
            "iterations: {} (bound {})",
            report.iterations, report.iteration_bound
        )
        .unwrap();
        writeln!(out, "value queries: {queries}").unwrap();
        if let Some(v) = &verification {
            writeln!(
                out,
                "verification: {} (optimal welfare {}, {} share checks)",
                if v.passed { "passed" } else { "FAILED" },
                v.optimal_welfare,
                v.checks
            )
            .unwrap();
        }
        out
    };
    match verification {
        Some(v) if !v.passed => Ok(Outcome {
            code: EXIT_MISMATCH,
            stdout,
            stderr: v
                .failures
                .iter()
                .map(|f| format!("verification failed: {f}\n"))
                .collect(),
        }),
        _ => Ok(Outcome::ok(stdout)),
    }
}

/// Brute-force welfare optimum and shares for the solver's output.
fn verify_report(inst: &Instance, report: &SolveReport) -> Result<Verification> {
    let n = inst.agent_count();
    let everything = Subset::full(inst.goods());
    let (optimal_welfare, _) = exhaustive_max_welfare(&inst.views(), &everything)?;
    let mut failures = Vec::new();
    if report.welfare != optimal_welfare {
        failures.push(format!(
            "welfare {} differs from the optimum {optimal_welfare}",
            report.welfare
        ));
    }
    let alloc = &report.allocation;
    let mut checks = 0;
    for i in 0..n {
        let v = inst.agent(i);
        let own = v.value(alloc.bundle(i));
        let targets: Vec<(usize, Subset)> = match report.fairness {
            Fairness::Mms => vec![(n, everything.clone())],
            Fairness::Pmms => (0..n)
                .filter(|&j| j != i)
                .map(|j| (2, alloc.bundle(i).union(alloc.bundle(j))))
                .collect(),
        };
        for (k, goods) in targets {
            let (share, _) = exhaustive_mms(v, k, &goods)?;
            checks += 1;
            if own < share {
                failures.push(format!(
                    "agent {i} has value {own} below mu({k}, {goods}) = {share}"
                ));
            }
        }
    }
    Ok(Verification {
        optimal_welfare,
        checks,
        passed: failures.is_empty(),
        failures,
    })
}

#[derive(Serialize)]
struct ShareLine {
    agent: usize,
    share: u64,
    fast: Option<u64>,
    brute: Option<u64>,
    witness: Vec<Subset>,
}

fn cmd_shares(k: usize, input: &InputArgs, json: bool) -> Result<Outcome> {
    let inst = load(input)?;
    let everything = Subset::full(inst.goods());
    let mut lines = Vec::new();
    for (agent, v) in inst.agents().iter().enumerate() {
        let fast = if v.is_rank() {
            Some(mms_fast(v, k, &everything)?)
        } else {
            None
        };
        let brute = match mms_brute(v, k, &everything) {
            Ok(r) => Some(r),
            Err(Error::Capability { .. }) if fast.is_some() => None,
            Err(e) => return Err(e),
        };
        let (share, witness) = fast
            .clone()
            .or_else(|| brute.clone())
            .expect("one of the two ran");
        lines.push(ShareLine {
            agent,
            share,
            fast: fast.map(|f| f.0),
            brute: brute.map(|b| b.0),
            witness,
        });
    }
    let mismatches: Vec<String> = lines
        .iter()
        .filter_map(|l| match (l.fast, l.brute) {
            (Some(f), Some(b)) if f != b => {
                Some(format!("agent {}: fast {f} but brute {b}\n", l.agent))
            }
            _ => None,
        })
        .collect();
    let stdout = if json {
        json_out(&json!({ "k": k, "goods": everything, "shares": lines }))
    } else {
        let mut out = format!("k: {k}\n");
        for l in &lines {
            let show = |x: Option<u64>| x.map_or("skipped".to_string(), |x| x.to_string());
            writeln!(
                out,
                "agent {}: mu = {} (fast {}, brute {}) witness {}",
                l.agent,
                l.share,
                show(l.fast),
                show(l.brute),
                parts(&l.witness)
            )
            .unwrap();
        }
        out
    };
    Ok(if mismatches.is_empty() {
        Outcome::ok(stdout)
    } else {
        Outcome {
            code: EXIT_MISMATCH,
            stdout,
            stderr: mismatches.concat(),
        }
    })
}

fn parts(sets: &[Subset]) -> String {
    let inner: Vec<String> = sets.iter().map(Subset::to_string).collect();
    format!("[{}]", inner.join(", "))
}

fn describe(witness: &Witness) -> String {
    match witness {
        Witness::Envy {
            agent,
            other,
            own_value,
            other_value,
        } => format!("agent {agent} values own bundle at {own_value} and agent {other}'s at {other_value}"),
        Witness::Ef1 {
            agent,
            other,
            own_value,
            best_removal,
        } => format!(
            "agent {agent} values own bundle at {own_value}; agent {other}'s bundle is still worth {best_removal} after removing any one good"
        ),
        Witness::Share {
            agent,
            other,
            own_value,
            k,
            goods,
            share,
            alpha,
        } => {
            let against = other.map_or(String::new(), |j| format!(" against agent {j}"));
            format!(
                "agent {agent}{against} has value {own_value} < {}/{} of mu({k}, {goods}) = {share}",
                alpha.numer(),
                alpha.denom()
            )
        }
        Witness::Allocation { allocation } => {
            let bundles: Vec<String> = allocation
                .bundles()
                .iter()
                .enumerate()
                .map(|(i, b)| format!("agent {i}: {b}"))
                .collect();
            format!("allocation meeting every share: {}", bundles.join("; "))
        }
    }
}

fn verdict_text(verdict: &FairnessVerdict) -> String {
    let mut out = format!(
        "{}: {}\n",
        verdict.property.name(),
        if verdict.holds { "holds" } else { "fails" }
    );
    if let Some(w) = &verdict.witness {
        writeln!(out, "witness: {}", describe(w)).unwrap();
    }
    out
}

fn cmd_check(
    property: PropertyArg,
    alpha: Alpha,
    input: &InputArgs,
    allocation: &Path,
    json: bool,
) -> Result<Outcome> {
    let inst = load(input)?;
    let alloc = parse_allocation(&read(allocation)?, inst.goods())?;
    let verdict = match property {
        PropertyArg::Ef => is_envy_free(&inst, &alloc)?,
        PropertyArg::Ef1 => is_ef1(&inst, &alloc)?,
        PropertyArg::Mms => {
            let n = inst.agent_count();
            let everything = Subset::full(inst.goods());
            let shares = if inst.all_rank() {
                shares_for_instance(&inst, n, &everything)?
            } else {
                brute_shares_for_instance(&inst, n, &everything)?
            };
            is_mms(&inst, &alloc, alpha, &shares)?
        }
        PropertyArg::Pmms => is_pmms(&inst, &alloc, alpha)?,
    };
    Ok(Outcome::ok(if json {
        json_out(&verdict)
    } else {
        verdict_text(&verdict)
    }))
}

fn cmd_certify(input: &InputArgs, json: bool) -> Result<Outcome> {
    let inst = load(input)?;
    let n = inst.agent_count();
    let everything = Subset::full(inst.goods());
    let shares = brute_shares_for_instance(&inst, n, &everything)?;
    let verdict = certify_no_mms_allocation(&inst)?;
    let stdout = if json {
        json_out(&json!({ "shares": shares, "verdict": verdict }))
    } else {
        let mut out = String::new();
        for e in shares.entries() {
            writeln!(out, "mu_{}({}, {}) = {}", e.agent, e.k, e.goods, e.value).unwrap();
        }
        let total = (n as u64).pow(inst.goods() as u32);
        if verdict.holds {
            writeln!(
                out,
                "no MMS allocation exists (all {total} complete allocations checked)"
            )
            .unwrap();
        } else {
            writeln!(out, "an MMS allocation exists").unwrap();
        }
        if let Some(w) = &verdict.witness {
            writeln!(out, "witness: {}", describe(w)).unwrap();
        }
        out
    };
    Ok(Outcome::ok(stdout))
}

fn cmd_validate(path: &Path) -> Result<Outcome> {
    let inst = parse_instance(&read(path)?, true)?;
    let checked = check_all_axioms(&inst)?;
    let classes: Vec<&str> = inst.agents().iter().map(|v| v.class_name()).collect();
    let mut out = format!(
        "valid: {} agents, {} goods ({})\n",
        inst.agent_count(),
        inst.goods(),
        classes.join(", ")
    );
    out.push_str(if checked {
        "matroid axioms: verified\n"
    } else {
        "matroid axioms: explicit families only (too many goods for a full check)\n"
    });
    Ok(Outcome::ok(out))
}
