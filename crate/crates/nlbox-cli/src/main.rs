//! Command-line front end: one binary, one subcommand per operation.
//!
//! Exit codes are the harness contract: 0 for success / PASS, 1 for a
//! verification FAIL, 2 for usage errors (including bad argument
//! combinations and out-of-range requests). All numeric output carries
//! both the exact serialization and a float rendering.

use std::process::ExitCode;

use anyhow::{anyhow, Context};
use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use nlbox_core::correlators::{line_correlator_closed, loop_correlator_closed, PRINTED_LOOP_12};
use nlbox_core::dist::{ExactDistribution, Topology};
use num_traits::Zero;
use nlbox_core::optimize::{certificate_search, hexagon_max_e2, HEXAGON_VARS};
use nlbox_core::sampler::{estimate_correlators, sample_with_limit, RNG_ALGORITHM};
use nlbox_core::scalar::LpScalar;
use nlbox_core::verify::full_suite;
use nlbox_core::{CorrelatorTable, QuadExt, Rational, DEFAULT_ENUM_LIMIT};

/// Environment variable overriding the dense enumeration limit.
const ENUM_LIMIT_ENV: &str = "NLBOX_ENUM_LIMIT";

#[derive(Parser)]
#[command(
    name = "nlbox",
    version,
    about = "Exact toolkit for the unique binary network non-local box"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum TopologyArg {
    Line,
    Loop,
}

impl TopologyArg {
    fn topology(self, n: usize) -> Topology {
        match self {
            TopologyArg::Line => Topology::Line(n),
            TopologyArg::Loop => Topology::Loop(n),
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Print the exact line and loop correlators up to a given size
    Correlators {
        #[arg(long)]
        n: usize,
        #[arg(long, conflicts_with = "csv")]
        json: bool,
        #[arg(long)]
        csv: bool,
    },
    /// Print the exact joint output distribution of one network
    Dist {
        #[arg(long, value_enum)]
        topology: TopologyArg,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        json: bool,
        #[arg(long)]
        enum_limit: Option<usize>,
    },
    /// Run every verification sweep for sizes 1..=n-max; exits 1 on any
    /// violation
    Verify {
        #[arg(long, value_enum)]
        topology: TopologyArg,
        #[arg(long)]
        n_max: usize,
        /// Worker threads for the outcome sweeps (default sequential)
        #[arg(long, default_value_t = 1)]
        workers: usize,
        #[arg(long)]
        enum_limit: Option<usize>,
        /// Shift the three-box correlator by this exact amount (for
        /// demonstrating violation detection), e.g. "1/10"
        #[arg(long)]
        perturb_e3: Option<String>,
        #[arg(long)]
        json: bool,
    },
    /// Verify the seven-box certificate and report the implied three-box
    /// bound
    Lemma1 {
        #[arg(long)]
        json: bool,
    },
    /// Bracket the maximal two-box correlator by exact LP bisection
    Bound {
        #[arg(long)]
        tol: f64,
        #[arg(long)]
        json: bool,
    },
    /// Search for a positivity certificate by linear programming over
    /// Q[sqrt(2)]
    SearchCertificate {
        /// Offer only the 24 published product columns
        #[arg(long)]
        restrict_paper_support: bool,
        #[arg(long)]
        json: bool,
    },
    /// Draw seeded samples and estimate the correlators empirically
    Sample {
        #[arg(long, value_enum)]
        topology: TopologyArg,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        count: usize,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        json: bool,
        #[arg(long)]
        enum_limit: Option<usize>,
    },
}

fn resolve_enum_limit(flag: Option<usize>) -> anyhow::Result<usize> {
    if let Some(limit) = flag {
        return Ok(limit);
    }
    match std::env::var(ENUM_LIMIT_ENV) {
        Ok(text) => text
            .parse()
            .with_context(|| format!("bad {ENUM_LIMIT_ENV} value {text:?}")),
        Err(_) => Ok(DEFAULT_ENUM_LIMIT),
    }
}

fn quad_json(x: &QuadExt) -> anyhow::Result<serde_json::Value> {
    Ok(json!({
        "exact": serde_json::to_value(x)?,
        "text": x.to_string(),
        "float": x.to_f64().ok(),
    }))
}

fn rational_f64(r: &Rational) -> f64 {
    <f64 as LpScalar>::from_rational(r)
}

fn cmd_correlators(n: usize, as_json: bool, as_csv: bool) -> anyhow::Result<i32> {
    if n < 1 {
        return Err(anyhow!("--n must be at least 1"));
    }
    let table = CorrelatorTable::standard(n);
    let mut notes = Vec::new();
    if n >= 12 {
        notes.push(format!(
            "the published table prints the twelfth loop correlator as {PRINTED_LOOP_12} \
             (~ -43.68), which lies outside [-1, 1]; the recursion gives {} (~ {:.4})",
            table.loop_corr(12),
            table.loop_corr(12).to_f64()?
        ));
    }
    if as_json {
        let mut line = Vec::new();
        let mut loops = Vec::new();
        for k in 1..=n {
            let mut entry = quad_json(table.line(k))?;
            entry["n"] = json!(k);
            entry["closed_form"] = json!(line_correlator_closed(k));
            line.push(entry);
            let mut entry = quad_json(table.loop_corr(k))?;
            entry["n"] = json!(k);
            entry["closed_form"] = if k >= 2 { json!(loop_correlator_closed(k)) } else { json!(null) };
            loops.push(entry);
        }
        let doc = json!({"n_max": n, "line": line, "loop": loops, "notes": notes});
        println!("{}", serde_json::to_string_pretty(&doc)?);
    } else if as_csv {
        println!("kind,n,exact,float");
        for k in 1..=n {
            println!("line,{k},{},{:.12}", table.line(k), table.line(k).to_f64()?);
        }
        for k in 1..=n {
            println!("loop,{k},{},{:.12}", table.loop_corr(k), table.loop_corr(k).to_f64()?);
        }
    } else {
        println!("{:>3}  {:>20} {:>12}  {:>20} {:>12}", "n", "E_n", "float", "E_n^o", "float");
        for k in 1..=n {
            println!(
                "{:>3}  {:>20} {:>12.9}  {:>20} {:>12.9}",
                k,
                table.line(k).to_string(),
                table.line(k).to_f64()?,
                table.loop_corr(k).to_string(),
                table.loop_corr(k).to_f64()?,
            );
        }
        for note in &notes {
            println!("note: {note}");
        }
    }
    Ok(0)
}

fn cmd_dist(
    topology: TopologyArg,
    n: usize,
    as_json: bool,
    enum_limit: Option<usize>,
) -> anyhow::Result<i32> {
    let limit = resolve_enum_limit(enum_limit)?;
    let table = CorrelatorTable::standard(n.max(1));
    let dist = ExactDistribution::build_with_limit(topology.topology(n), &table, limit)?;
    if as_json {
        let mut entries = Vec::with_capacity(dist.len());
        for (outcome, q) in dist.iter() {
            let mut entry = json!({"outcome": outcome.to_string(), "p": dist.p_float(outcome.mask())?});
            entry["q"] = quad_json(q)?;
            entries.push(entry);
        }
        let doc = json!({
            "topology": topology.topology(n).label(),
            "n": n,
            "entries": entries,
        });
        println!("{}", serde_json::to_string_pretty(&doc)?);
    } else {
        println!("{} with {} boxes: q(x) = 2^{} p(x)", topology.topology(n).label(), n, n);
        println!("{:<18} {:>24} {:>14}", "outcome", "q exact", "p");
        for (outcome, q) in dist.iter() {
            println!(
                "{:<18} {:>24} {:>14.10}",
                outcome.to_string(),
                q.to_string(),
                dist.p_float(outcome.mask())?
            );
        }
    }
    Ok(0)
}

fn perturbed_table(n_max: usize, delta_text: &str) -> anyhow::Result<CorrelatorTable> {
    let delta: QuadExt = delta_text
        .parse()
        .with_context(|| format!("bad --perturb-e3 value {delta_text:?}"))?;
    if n_max < 3 {
        return Err(anyhow!("--perturb-e3 needs tables reaching the three-box correlator"));
    }
    let base = CorrelatorTable::standard(n_max);
    let line = (1..=n_max)
        .map(|k| if k == 3 { base.line(3) + &delta } else { base.line(k).clone() })
        .collect();
    let loops = (1..=n_max).map(|k| base.loop_corr(k).clone()).collect();
    Ok(CorrelatorTable::from_parts(line, loops))
}

fn cmd_verify(
    topology: TopologyArg,
    n_max: usize,
    workers: usize,
    enum_limit: Option<usize>,
    perturb_e3: Option<String>,
    as_json: bool,
) -> anyhow::Result<i32> {
    if n_max < 1 {
        return Err(anyhow!("--n-max must be at least 1"));
    }
    let limit = resolve_enum_limit(enum_limit)?;
    // boundary-probability checks read two entries past the largest size
    let table = match &perturb_e3 {
        Some(delta) => perturbed_table(n_max + 2, delta)?,
        None => CorrelatorTable::standard(n_max + 2),
    };
    let mut all_passed = true;
    let mut checks_json = Vec::new();
    for n in 1..=n_max {
        let report = full_suite(topology.topology(n), &table, workers, limit)?;
        for check in &report.checks {
            let status = match (check.informational, check.passed) {
                (false, true) => "PASS",
                (false, false) => "FAIL",
                (true, true) => "INFO",
                (true, false) => "INFO(differs)",
            };
            if !check.informational && !check.passed {
                all_passed = false;
            }
            if as_json {
                checks_json.push(json!({
                    "n": n,
                    "topology": check.topology.label(),
                    "name": check.name,
                    "passed": check.passed,
                    "informational": check.informational,
                    "detail": check.detail,
                }));
            } else {
                println!("{status:<14} {:<10} {:<38} {}", check.topology.to_string(), check.name, check.detail);
            }
        }
    }
    if as_json {
        let doc = json!({
            "topology": topology.topology(n_max).label(),
            "n_max": n_max,
            "passed": all_passed,
            "checks": checks_json,
        });
        println!("{}", serde_json::to_string_pretty(&doc)?);
    } else {
        println!("{}", if all_passed { "ALL CHECKS PASSED" } else { "VIOLATIONS FOUND" });
    }
    Ok(if all_passed { 0 } else { 1 })
}

fn cmd_lemma1(as_json: bool) -> anyhow::Result<i32> {
    let cert = nlbox_core::certificate::Certificate::paper();
    let report = nlbox_core::certificate::certificate_verify(&cert)?;
    let conclusion = nlbox_core::certificate::lemma1_conclusion();
    let ok = report.is_valid()
        && conclusion.bound_is_square
        && conclusion.at_tight_point.is_zero()
        && conclusion.zero_excluded;
    if as_json {
        let terms: Vec<serde_json::Value> = (0..cert.c.len())
            .map(|i| {
                json!({
                    "index": i + 1,
                    "u": cert.u[i],
                    "v": cert.v[i],
                    "c": cert.c[i].to_string(),
                    "value": report.terms[i].to_string(),
                })
            })
            .collect();
        let doc = json!({
            "terms": terms,
            "weighted_sum": report.weighted_sum.to_string(),
            "residual": report.residual.to_string(),
            "high_arity_monomials": report.high_arity.len(),
            "bound": conclusion.bound.to_string(),
            "bound_is_square_of_3_minus_2_sqrt2": conclusion.bound_is_square,
            "tight_at_3_minus_2_sqrt2": conclusion.at_tight_point.is_zero(),
            "e3_zero_excluded": conclusion.zero_excluded,
            "passed": ok,
        });
        println!("{}", serde_json::to_string_pretty(&doc)?);
    } else {
        for i in 0..cert.c.len() {
            println!(
                "term {:>2}: c = {:<40} P_{} * Q_{} = {}",
                i + 1,
                cert.c[i].to_string(),
                cert.u[i],
                cert.v[i],
                report.terms[i]
            );
        }
        println!("weighted sum: {}", report.weighted_sum);
        println!("residual:     {}", report.residual);
        println!(
            "higher correlators (E4..E7) surviving: {}",
            if report.high_arity.is_empty() { "none".to_string() } else { format!("{}", report.high_arity.len()) }
        );
        println!(
            "conclusion:   E3^2 >= {} = (3-2*sqrt2)^2; tight at E3 = 3-2*sqrt2; E3 = 0 excluded",
            conclusion.bound
        );
        println!("{}", if ok { "PASS" } else { "FAIL" });
    }
    Ok(if ok { 0 } else { 1 })
}

fn cmd_bound(tol: f64, as_json: bool) -> anyhow::Result<i32> {
    if !(tol > 0.0) {
        return Err(anyhow!("--tol must be positive"));
    }
    let tol_rational = Rational::from_float(tol).ok_or_else(|| anyhow!("bad tolerance"))?;
    let bracket = hexagon_max_e2(&tol_rational)?;
    let width = &bracket.hi - &bracket.lo;
    if as_json {
        let witness: Vec<serde_json::Value> = HEXAGON_VARS
            .iter()
            .zip(&bracket.witness.correlators)
            .map(|(name, v)| json!({"name": name, "exact": v.to_string(), "float": rational_f64(v)}))
            .collect();
        let doc = json!({
            "lo": {"exact": bracket.lo.to_string(), "float": rational_f64(&bracket.lo)},
            "hi": {"exact": bracket.hi.to_string(), "float": rational_f64(&bracket.hi)},
            "width": rational_f64(&width),
            "iterations": bracket.iterations,
            "witness_e2": bracket.witness.e2.to_string(),
            "witness": witness,
            "witness_verified": bracket.witness_verified,
        });
        println!("{}", serde_json::to_string_pretty(&doc)?);
    } else {
        println!(
            "bracket: [{}, {}] = [{:.9}, {:.9}], width {:.3e}, {} bisection steps",
            bracket.lo,
            bracket.hi,
            rational_f64(&bracket.lo),
            rational_f64(&bracket.hi),
            rational_f64(&width),
            bracket.iterations
        );
        println!("reference: sqrt2 - 1 = {:.9}", std::f64::consts::SQRT_2 - 1.0);
        println!("witness at lo (e2 = {:.9}):", rational_f64(&bracket.witness.e2));
        for (name, v) in HEXAGON_VARS.iter().zip(&bracket.witness.correlators) {
            println!("  {name:<4} = {:<24} ~ {:.9}", v.to_string(), rational_f64(v));
        }
        println!(
            "witness loop-6 distribution exactly non-negative: {}",
            bracket.witness_verified
        );
    }
    Ok(if bracket.witness_verified { 0 } else { 1 })
}

fn cmd_search_certificate(restrict: bool, as_json: bool) -> anyhow::Result<i32> {
    let search = certificate_search(restrict)?;
    if as_json {
        let terms: Vec<serde_json::Value> = (0..search.certificate.c.len())
            .map(|i| {
                json!({
                    "u": search.certificate.u[i],
                    "v": search.certificate.v[i],
                    "c": search.certificate.c[i].to_string(),
                })
            })
            .collect();
        let doc = json!({
            "restricted_to_paper_support": restrict,
            "columns_offered": search.pairs.len(),
            "terms": terms,
            "residual": search.report.residual.to_string(),
            "exact_verified": search.exact_verified,
            "matches_paper": search.matches_paper,
        });
        println!("{}", serde_json::to_string_pretty(&doc)?);
    } else {
        println!(
            "{} product columns offered, {} carry weight",
            search.pairs.len(),
            search.certificate.c.len()
        );
        for i in 0..search.certificate.c.len() {
            println!(
                "  P_{} * Q_{}: c = {}",
                search.certificate.u[i],
                search.certificate.v[i],
                search.certificate.c[i]
            );
        }
        println!("residual: {}", search.report.residual);
        println!("exact verification: {}", if search.exact_verified { "PASS" } else { "FAIL" });
        if let Some(matches) = search.matches_paper {
            println!(
                "weights match the published certificate entry for entry: {}",
                matches
            );
        }
    }
    Ok(if search.exact_verified { 0 } else { 1 })
}

fn cmd_sample(
    topology: TopologyArg,
    n: usize,
    count: usize,
    seed: u64,
    as_json: bool,
    enum_limit: Option<usize>,
) -> anyhow::Result<i32> {
    let limit = resolve_enum_limit(enum_limit)?;
    let table = CorrelatorTable::standard(n.max(1));
    let run = sample_with_limit(topology.topology(n), &table, count, seed, limit)?;
    if count == 0 {
        if as_json {
            println!(
                "{}",
                serde_json::to_string_pretty(&json!({
                    "topology": topology.topology(n).label(),
                    "n": n, "count": 0, "seed": seed, "rng": RNG_ALGORITHM,
                    "windows": [], "forbidden_count": 0,
                }))?
            );
        } else {
            println!("empty run (count = 0)");
        }
        return Ok(0);
    }
    let estimates = estimate_correlators(&run, &table)?;
    if as_json {
        let mut windows: Vec<serde_json::Value> = estimates
            .windows
            .iter()
            .map(|w| {
                json!({
                    "len": w.len, "kind": "line",
                    "estimate": w.estimate, "std_error": w.std_error, "exact": w.exact,
                })
            })
            .collect();
        if let Some(full) = &estimates.full_loop {
            windows.push(json!({
                "len": full.len, "kind": "full-loop",
                "estimate": full.estimate, "std_error": full.std_error, "exact": full.exact,
            }));
        }
        let doc = json!({
            "topology": topology.topology(n).label(),
            "n": n,
            "count": count,
            "seed": seed,
            "rng": RNG_ALGORITHM,
            "windows": windows,
            "forbidden_count": estimates.forbidden_count,
        });
        println!("{}", serde_json::to_string_pretty(&doc)?);
    } else {
        println!(
            "{} with {n} boxes, {count} samples, seed {seed}, rng {RNG_ALGORITHM}",
            topology.topology(n).label()
        );
        println!("{:>10} {:>12} {:>10} {:>12} {:>10}", "window", "estimate", "se", "exact", "|diff|");
        for w in &estimates.windows {
            println!(
                "{:>10} {:>12.6} {:>10.6} {:>12.6} {:>10.6}",
                w.len,
                w.estimate,
                w.std_error,
                w.exact,
                (w.estimate - w.exact).abs()
            );
        }
        if let Some(full) = &estimates.full_loop {
            println!(
                "{:>10} {:>12.6} {:>10.6} {:>12.6} {:>10.6}",
                format!("cycle-{}", full.len),
                full.estimate,
                full.std_error,
                full.exact,
                (full.estimate - full.exact).abs()
            );
        }
        println!("outcomes containing the forbidden +-+ pattern: {}", estimates.forbidden_count);
    }
    Ok(0)
}

fn dispatch(cli: Cli) -> anyhow::Result<i32> {
    match cli.command {
        Command::Correlators { n, json, csv } => cmd_correlators(n, json, csv),
        Command::Dist { topology, n, json, enum_limit } => cmd_dist(topology, n, json, enum_limit),
        Command::Verify { topology, n_max, workers, enum_limit, perturb_e3, json } => {
            cmd_verify(topology, n_max, workers, enum_limit, perturb_e3, json)
        }
        Command::Lemma1 { json } => cmd_lemma1(json),
        Command::Bound { tol, json } => cmd_bound(tol, json),
        Command::SearchCertificate { restrict_paper_support, json } => {
            cmd_search_certificate(restrict_paper_support, json)
        }
        Command::Sample { topology, n, count, seed, json, enum_limit } => {
            cmd_sample(topology, n, count, seed, json, enum_limit)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(2)
        }
    }
}
