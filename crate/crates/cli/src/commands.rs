//! Subcommand implementations. Each returns the JSON document it prints
//! and a flag telling whether its checks passed.

use std::path::{Path, PathBuf};

use cchaos::cgauss::{read_samples_csv, write_samples_csv, GaussianSpec};
use cchaos::fourth_moment::{exact_report, mc_moments, proof_chain, ExactMoments};
use cchaos::identities::{run_identity_suite, SuiteSizes};
use cchaos::par::Execution;
use cchaos::stein::SteinSolverConfig;
use cchaos::transport::{estimate_dw, w1_exact, w1_sinkhorn, TransportProblem, DEFAULT_CAP};
use cchaos::C64;
use serde::Serialize;
use serde_json::{json, Value};

use crate::checks::stein_battery;
use crate::config::{parse_sigma, read_json, to_cmatrix, ExperimentConfig, SigmaDoc, VectorDoc};
use crate::error::{CliError, CliResult};
use crate::experiment::{run_experiment, vector_sampler, SCHEMA_VERSION, TOOL, VERSION};

/// A finished subcommand: the document to emit and whether it passed.
#[derive(Clone, Debug, PartialEq)]
pub struct Outcome {
    pub name: &'static str,
    pub document: Value,
    pub passed: bool,
    pub summary: String,
}

fn envelope<T: Serialize>(command: &str, seed: Option<u64>, body: T) -> Value {
    let mut v = json!({
        "schema_version": SCHEMA_VERSION,
        "tool": TOOL,
        "version": VERSION,
        "command": command,
    });
    if let Some(s) = seed {
        v["seed"] = json!(s);
    }
    v["result"] = serde_json::to_value(body).expect("results serialize");
    v
}

fn read_vector(path: &Path) -> CliResult<cchaos::ou::ChaoticVector> {
    read_json::<VectorDoc>(path)?.build()
}

fn read_sigma(path: &Path) -> CliResult<cchaos::fourth_moment::RationalMatrix> {
    parse_sigma(&read_json::<SigmaDoc>(path)?)
}

fn read_samples(path: &Path) -> CliResult<Vec<Vec<C64>>> {
    let file = std::fs::File::open(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    read_samples_csv(file).map_err(|e| CliError::Validation(format!("{}: {e}", path.display())))
}

pub struct RunOutcome {
    pub outcome: Outcome,
    pub files: (PathBuf, PathBuf),
}

pub fn run(config: &Path, seed: Option<u64>, out: Option<&Path>, exec: Execution) -> CliResult<RunOutcome> {
    let mut cfg = ExperimentConfig::from_path(config)?;
    if let Some(s) = seed {
        cfg.seed = s;
    }
    let dir = out.map(Path::to_path_buf).or_else(|| cfg.output_dir.as_ref().map(PathBuf::from)).unwrap_or_else(|| PathBuf::from("."));
    let report = run_experiment(&cfg, exec)?;
    let files = report.write(&dir)?;
    let failures: Vec<String> = report.failures().iter().map(|c| format!("n={} {}: {}", c.n_label, c.name, c.detail)).collect();
    let summary = format!(
        "{} points, {} invariant checks, {} failed; wrote {} and {}",
        report.points.len(),
        report.invariants.len(),
        failures.len(),
        files.0.display(),
        files.1.display()
    );
    let outcome = Outcome {
        name: "run",
        passed: report.passed,
        document: serde_json::to_value(&report).expect("reports serialize"),
        summary: if failures.is_empty() { summary } else { format!("{summary}\n{}", failures.join("\n")) },
    };
    Ok(RunOutcome { outcome, files })
}

pub fn moments(poly: &Path, mc: Option<usize>, seed: u64, exec: Execution) -> CliResult<Outcome> {
    let f = read_vector(poly)?;
    let (route, summary, seed) = match mc {
        Some(count) => (
            "monte_carlo",
            serde_json::to_value(mc_moments(&f, count, seed, exec)?)?,
            Some(seed),
        ),
        None => ("exact", serde_json::to_value(ExactMoments::of(&f)?.summary())?, None),
    };
    Ok(Outcome {
        name: "moments",
        document: envelope("moments", seed, json!({ "route": route, "moments": summary })),
        passed: true,
        summary: format!("{route} moments of a {}-component vector over {} variables", f.d(), f.n()),
    })
}

pub fn bound(poly: &Path, sigma: &Path, mc: Option<usize>, seed: u64, exec: Execution) -> CliResult<Outcome> {
    let f = read_vector(poly)?;
    let sigma = read_sigma(sigma)?;
    let report = exact_report(&f, &sigma, 0)?;
    let chain = proof_chain(&f, &sigma)?;
    let mc_report = match mc {
        Some(count) => Some(mc_moments(&f, count, seed, exec)?.thm4_bound(&to_cmatrix(&sigma), 0)?),
        None => None,
    };
    let summary = format!(
        "psi = ({}, {}, {}), moment bound {}, gamma bound {}",
        report.psi1,
        report.psi2,
        report.psi3,
        report.thm4_bound,
        report.thm1_bound.unwrap_or(f64::NAN)
    );
    Ok(Outcome {
        name: "bound",
        document: envelope(
            "bound",
            mc.map(|_| seed),
            json!({ "exact": report, "proof_chain_holds": chain.holds(), "monte_carlo": mc_report }),
        ),
        passed: chain.holds(),
        summary,
    })
}

pub struct WassersteinArgs<'a> {
    pub a: &'a Path,
    pub b: Option<&'a Path>,
    pub sigma: Option<&'a Path>,
    pub repeats: usize,
    pub eps: f64,
    pub seed: u64,
}

pub fn wasserstein(args: &WassersteinArgs, exec: Execution) -> CliResult<Outcome> {
    let xs = read_samples(args.a)?;
    match (args.b, args.sigma) {
        (Some(b), None) => {
            let problem = TransportProblem::new(xs, read_samples(b)?)?;
            let result = if problem.len() <= DEFAULT_CAP { w1_exact(&problem)? } else { w1_sinkhorn(&problem, args.eps, 10_000)? };
            Ok(Outcome {
                name: "wasserstein",
                summary: format!("W1 = {} over {} points", result.value, problem.len()),
                document: envelope("wasserstein", None, &result),
                passed: true,
            })
        }
        (None, Some(sigma)) => {
            let spec = GaussianSpec::centered(to_cmatrix(&read_sigma(sigma)?))?;
            let n = xs.len();
            if xs.first().map_or(0, Vec::len) != spec.d {
                return Err(CliError::Validation("sample dimension does not match the covariance".into()));
            }
            let est = estimate_dw(|_, _| xs.clone(), &spec, n, args.repeats, args.seed, exec)?;
            Ok(Outcome {
                name: "wasserstein",
                summary: format!("W1 = {} +- {} over {} repeats of {} points", est.mean, est.std_error, args.repeats, n),
                document: envelope("wasserstein", Some(args.seed), &est),
                passed: true,
            })
        }
        _ => Err(CliError::Usage("give exactly one of --b and --sigma".into())),
    }
}

pub fn stein_check(samples: usize, seed: u64, exec: Execution) -> CliResult<Outcome> {
    let cfg = SteinSolverConfig { mc_samples: samples, seed, exec, ..Default::default() };
    let battery = stein_battery(&cfg)?;
    let failed = battery.potentials.iter().filter(|p| !p.passed).count() + battery.hessian.iter().filter(|h| !h.passed).count();
    Ok(Outcome {
        name: "stein-check",
        summary: format!(
            "{} potential checks, {} Hessian checks, {failed} failed",
            battery.potentials.len(),
            battery.hessian.len()
        ),
        passed: battery.passed(),
        document: envelope("stein-check", Some(seed), &battery),
    })
}

pub fn verify(seed: u64, exec: Execution) -> CliResult<Outcome> {
    let report = run_identity_suite(seed, &SuiteSizes::default(), exec);
    let lines: Vec<String> = report
        .suites
        .iter()
        .map(|s| format!("{:<26} {:>6} passed {:>4} failed", s.name, s.passed, s.failed))
        .collect();
    Ok(Outcome {
        name: "verify",
        summary: lines.join("\n"),
        passed: report.all_passed(),
        document: envelope("verify", Some(seed), &report),
    })
}

/// CSV samples of `CN(0, Sigma)` or of a chaotic vector.
pub fn sample(sigma: Option<&Path>, poly: Option<&Path>, count: usize, seed: u64) -> CliResult<String> {
    if count == 0 {
        return Err(CliError::Validation("count must be positive".into()));
    }
    let rows = match (sigma, poly) {
        (Some(s), None) => GaussianSpec::centered(to_cmatrix(&read_sigma(s)?))?.sample(count, seed),
        (None, Some(p)) => vector_sampler(&read_vector(p)?)(count, seed),
        _ => return Err(CliError::Usage("give exactly one of --sigma and --poly".into())),
    };
    let mut buf = Vec::new();
    write_samples_csv(&mut buf, &rows)?;
    Ok(String::from_utf8(buf).expect("CSV is UTF-8"))
}
