//! Subcommand implementations. Each returns a JSON report and a pass/fail verdict; input
//! problems surface as [`CommandError`] so the binary can map them to exit code 2.

use hyp2_core::hahn_banach::{audit_extension, corollary_functional, full_extend, DomainOrder, ExtendConfig, ExtensionProblem};
use hyp2_core::two_functional::{is_bounded_check, norm_bruteforce, norm_bruteforce_unit, norm_spectral};
use hyp2_core::two_norm::axiom_check;
use hyp2_core::{DVector, Error as CoreError, Hyperbolic};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::acceptance;
use crate::formats::{ExtendReport, FormatError, FunctionalJson, Instance, PairFile, TraceJson};

pub const AXIOM_TOL: f64 = 1e-9;
pub const AXIOM_SAMPLES: usize = 1_000;
pub const NORM_EXCESS_TOL: f64 = 1e-9;
pub const NORM_BELOW_REL: f64 = 0.02;
pub const NORM_BUDGET: usize = 100_000;
pub const BOUND_SAMPLES: usize = 1_000;
pub const EXTEND_NORM_TOL: f64 = 1e-5;
pub const RESTRICTION_TOL: f64 = 1e-10;
pub const AUDIT_SAMPLES: usize = 1_000;
pub const COROLLARY_NORM_TOL: f64 = 1e-9;
pub const COROLLARY_VALUE_TOL: f64 = 1e-10;

#[derive(Debug, thiserror::Error)]
pub enum CommandError {
    #[error(transparent)]
    Format(#[from] FormatError),
    #[error("invalid input: {0}")]
    Input(CoreError),
    #[error("check failed: {0}")]
    Engine(CoreError),
}

impl CommandError {
    /// Exit code: 2 for unusable input, 1 for a computation that failed its own checks.
    pub fn exit_code(&self) -> i32 {
        match self {
            CommandError::Engine(_) => 1,
            _ => 2,
        }
    }
}

/// Overrides shared by the commands. `None` keeps each command's default.
#[derive(Clone, Copy, Debug, Default)]
pub struct Options {
    /// Replaces the command's headline tolerance.
    pub tol: Option<f64>,
    pub samples: Option<usize>,
    pub seed: Option<u64>,
    pub swap_domain: bool,
}

pub struct Report {
    pub json: Value,
    pub passed: bool,
}

fn rng_for(inst_seed: u64, opts: &Options) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(opts.seed.unwrap_or(inst_seed))
}

pub fn check_axioms(inst: &Instance, opts: &Options) -> Result<Report, CommandError> {
    let tol = opts.tol.unwrap_or(AXIOM_TOL);
    let samples = opts.samples.unwrap_or(AXIOM_SAMPLES);
    let mut rng = rng_for(inst.seed, opts);
    let norm = &inst.norm;
    let report = axiom_check(&|x: &DVector, y: &DVector| norm.eval(x, y).expect("same length"), inst.n, samples, &mut rng)
        .map_err(CommandError::Input)?;
    let mut out = serde_json::Map::new();
    for (axiom, worst) in report.entries() {
        out.insert(axiom.into(), json!(worst));
    }
    let passed = report.passes(tol);
    out.insert("samples".into(), json!(samples));
    out.insert("tol".into(), json!(tol));
    out.insert("passed".into(), json!(passed));
    Ok(Report { json: Value::Object(out), passed })
}

pub fn norm(inst: &Instance, opts: &Options) -> Result<Report, CommandError> {
    let tol = opts.tol.unwrap_or(NORM_EXCESS_TOL);
    let budget = opts.samples.unwrap_or(NORM_BUDGET);
    let mut rng = rng_for(inst.seed, opts);
    let f = &inst.f;
    let spectral = norm_spectral(f, &inst.norm).map_err(CommandError::Input)?;
    let brute = norm_bruteforce(f, &inst.norm, budget, &mut rng).map_err(CommandError::Input)?;
    let unit = norm_bruteforce_unit(f, &inst.norm, budget, &mut rng).map_err(CommandError::Input)?;
    let gap = |est: Hyperbolic| {
        Hyperbolic::new(
            rel_below(spectral.value.p, est.p),
            rel_below(spectral.value.q, est.q),
        )
    };
    let excess = |est: Hyperbolic| (est - spectral.value).p.max((est - spectral.value).q);
    let witnesses_ok = spectral.verify(f, &inst.norm, tol).map_err(CommandError::Input)?
        && brute.verify(f, &inst.norm, tol).map_err(CommandError::Input)?;
    let bounded = is_bounded_check(f, &inst.norm, spectral.value, BOUND_SAMPLES, &mut rng).map_err(CommandError::Input)?;
    let (brute_gap, unit_gap) = (gap(brute.value), gap(unit.value));
    let passed = excess(brute.value) <= tol
        && excess(unit.value) <= tol
        && brute_gap.max_abs() <= NORM_BELOW_REL
        && unit_gap.max_abs() <= NORM_BELOW_REL
        && witnesses_ok
        && bounded.holds;
    Ok(Report {
        json: json!({
            "spectral": spectral,
            "bruteforce": brute,
            "unit_sphere": unit,
            "gap": {"bruteforce": brute_gap, "unit_sphere": unit_gap},
            "excess_over_spectral": {"bruteforce": excess(brute.value), "unit_sphere": excess(unit.value)},
            "witnesses_verified": witnesses_ok,
            "bounded_by_spectral": {"holds": bounded.holds, "worst_excess": bounded.worst_excess},
            "budget": budget,
            "tol": tol,
            "passed": passed,
        }),
        passed,
    })
}

/// `(spectral - estimate) / spectral`, or the absolute difference for a zero spectral norm.
fn rel_below(spectral: f64, estimate: f64) -> f64 {
    if spectral > 0.0 {
        (spectral - estimate) / spectral
    } else {
        estimate.abs()
    }
}

pub fn extend(inst: &Instance, opts: &Options) -> Result<Report, CommandError> {
    let tol = opts.tol.unwrap_or(EXTEND_NORM_TOL);
    let samples = opts.samples.unwrap_or(AUDIT_SAMPLES);
    let mut rng = rng_for(inst.seed, opts);
    let order = if opts.swap_domain { DomainOrder::SpanFirst } else { DomainOrder::SubmoduleFirst };
    let problem = ExtensionProblem::new(inst.m.clone(), inst.z.clone(), inst.f.clone(), inst.norm.clone())
        .map_err(CommandError::Input)?
        .with_order(order);
    let cfg = ExtendConfig::default();
    let trace = full_extend(&problem, &cfg).map_err(|e| match e {
        CoreError::OptimizationFailure { .. } | CoreError::Unbounded { .. } => CommandError::Engine(e),
        other => CommandError::Input(other),
    })?;
    let checks = audit_extension(&problem, &trace, samples, cfg.bracket_tol, &mut rng).map_err(CommandError::Input)?;
    let passed = checks.passes(RESTRICTION_TOL, tol);
    let report = ExtendReport { trace: TraceJson::from_trace(&trace), checks, passed };
    Ok(Report { json: serde_json::to_value(report).expect("serializable"), passed })
}

pub fn corollary(pair: &PairFile, opts: &Options) -> Result<Report, CommandError> {
    let tol = opts.tol.unwrap_or(COROLLARY_NORM_TOL);
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed.unwrap_or(0));
    let norm = hyp2_core::D2Norm::gram_det();
    let res = corollary_functional(&pair.x0, &pair.y0, &norm, &ExtendConfig::default(), &mut rng).map_err(|e| match e {
        CoreError::OptimizationFailure { .. } => CommandError::Engine(e),
        other => CommandError::Input(other),
    })?;
    let c = &res.checks;
    let norm_err = (c.norm_big_f - Hyperbolic::ONE).max_abs().max((res.trace.norm_lift - Hyperbolic::ONE).max_abs());
    let patterns_ok = c.zero_patterns.iter().all(|(_, e)| *e <= COROLLARY_VALUE_TOL);
    let passed = norm_err <= tol && c.attainment_error <= COROLLARY_VALUE_TOL && patterns_ok;
    let f_at = res.trace.extension.eval(&pair.x0, Hyperbolic::ONE).map_err(CommandError::Input)?;
    Ok(Report {
        json: json!({
            "f0": FunctionalJson::from_functional(&res.f0),
            "f": FunctionalJson::from_functional(&res.trace.extension.lift),
            "checks": {
                "norm_x0_y0": c.norm_x0_y0,
                "f_x0_y0": f_at,
                "norm_f0": c.norm_f,
                "norm_f": c.norm_big_f,
                "norm_f_spectral": res.trace.norm_lift,
                "norm_minus_one": norm_err,
                "attainment_error": c.attainment_error,
                "zero_patterns": c.zero_patterns.iter().map(|(k, v)| (k.clone(), json!(v))).collect::<serde_json::Map<_, _>>(),
            },
            "tol": tol,
            "passed": passed,
        }),
        passed,
    })
}

pub fn selftest(opts: &Options) -> Report {
    let results = acceptance::run_all(opts.seed.unwrap_or(0));
    let passed = results.iter().all(|r| r.passed);
    Report { json: json!({"criteria": results, "passed": passed}), passed }
}
