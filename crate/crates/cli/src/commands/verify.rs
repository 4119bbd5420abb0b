//! Verification suites. Each check records its measured value next to the
//! tolerance it must stay below.

use complex_oscillator::eigenstates::{
    build_basis, gram_matrix, identity_deviation, oscillator_state, SpatialGrid, DEFAULT_STEP,
};
use complex_oscillator::potential::PotentialParams;
use complex_oscillator::states::{continuity_residuals, evolve, synthesize, CoefficientVector};
use complex_oscillator::wigner::{fock_superposition, wigner_by_closed_form, wigner_by_quadrature, PhaseSpaceGrid};
use complex_oscillator::Complex64;
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::json;
use std::f64::consts::FRAC_1_PI;
use std::sync::Arc;

use crate::config::{self, Options, ParamRecord, Suite};
use crate::error::{Failure, Outcome, VERIFICATION};
use crate::output::write_json;

pub const DEFAULT_SEED: u64 = 20_140_402;
const RANDOM_VECTORS: usize = 20;
const TERMS: usize = 5;
const MAX_OFFSET: usize = 3;
const CURRENT_FLOOR: f64 = 1e-9;

#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub suite: Suite,
    pub name: String,
    pub value: f64,
    pub tolerance: f64,
    pub passed: bool,
}

#[derive(Default)]
struct Checks(Vec<Check>);

impl Checks {
    /// Passes when `value < tolerance`; NaN fails.
    fn below(&mut self, suite: Suite, name: impl Into<String>, value: f64, tolerance: f64) {
        self.0.push(Check {
            suite,
            name: name.into(),
            value,
            tolerance,
            passed: value < tolerance,
        });
    }
}

fn gram(opts: &Options, record: &ParamRecord, checks: &mut Checks) -> Outcome<()> {
    let top = opts.n_max.unwrap_or(12);
    let grid = Arc::new(config::spatial_grid(opts, top)?);
    let basis = build_basis(&record.params, top, &grid)?;
    let dev = identity_deviation(&gram_matrix(&basis));
    checks.below(Suite::Gram, format!("max |G - I|, N = {top}"), dev, 1e-6);
    Ok(())
}

fn binorm(opts: &Options, record: &ParamRecord, checks: &mut Checks) -> Outcome<()> {
    let coeffs = config::single_state(opts)?.coefficients()?;
    let grid = Arc::new(config::spatial_grid(opts, coeffs.highest_level())?);
    let basis = build_basis(&record.params, coeffs.highest_level(), &grid)?;
    for t in config::times(opts) {
        let evolved = evolve(&coeffs, t);
        let coefficient = (evolved.bi_norm() - 1.0).norm();
        checks.below(Suite::Binorm, format!("coefficient bi-norm, t = {t}"), coefficient, 1e-12);
        let (phi, dual) = synthesize(&evolved, &basis)?;
        let quadrature = (dual.inner(&phi)? - 1.0).norm();
        checks.below(Suite::Binorm, format!("quadrature bi-norm, t = {t}"), quadrature, 1e-6);
    }
    Ok(())
}

fn continuity(opts: &Options, record: &ParamRecord, checks: &mut Checks) -> Outcome<()> {
    let coeffs = config::single_state(opts)?.coefficients()?;
    let grid = Arc::new(config::spatial_grid(opts, coeffs.highest_level())?);
    let basis = build_basis(&record.params, coeffs.highest_level(), &grid)?;
    let dt = config::time_step(opts)?;
    for t in config::times(opts) {
        let res = continuity_residuals(&coeffs, &basis, t, dt)?;
        residual_check(
            checks,
            format!("bi-orthogonal continuity, t = {t}"),
            res.max_biorthogonal(),
            res.max_current_b_divergence(),
        );
        residual_check(
            checks,
            format!("conventional continuity, t = {t}"),
            res.max_conventional(),
            res.max_current_divergence(),
        );
    }
    Ok(())
}

/// Relative to the current divergence, or absolute when that divergence is
/// itself at roundoff level (real packets at `t = 0` carry no bi-current).
fn residual_check(checks: &mut Checks, name: String, residual: f64, divergence: f64) {
    if divergence > CURRENT_FLOOR {
        checks.below(Suite::Continuity, format!("{name}, max|R| / max|dJ/dx|"), residual / divergence, 1e-2);
    } else {
        checks.below(Suite::Continuity, format!("{name}, max|R| (current vanishes)"), residual, 1e-6);
    }
}

/// Seeded normalized `TERMS`-term vectors with offsets up to `MAX_OFFSET`.
pub fn random_vectors(seed: u64) -> Vec<CoefficientVector> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..RANDOM_VECTORS)
        .map(|_| {
            let r = rng.random_range(0..=MAX_OFFSET);
            let raw: Vec<Complex64> = (0..TERMS)
                .map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
                .collect();
            let norm = raw.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
            CoefficientVector::new(r, raw.into_iter().map(|c| c / norm).collect())
        })
        .collect()
}

fn wigner(opts: &Options, checks: &mut Checks) -> Outcome<()> {
    let step = opts.grid_step.unwrap_or(DEFAULT_STEP);
    let top = MAX_OFFSET + TERMS - 1;
    let spatial = Arc::new(config::spatial_grid(opts, top)?);
    let grid = PhaseSpaceGrid::aligned(step, 5.0, 5.0, 101, 101)?;
    let centre = (grid.x_count / 2, grid.p_count / 2);

    for (level, expected) in [(0, FRAC_1_PI), (1, -FRAC_1_PI)] {
        let coeffs = CoefficientVector::eigenstate(level);
        let field = fock_superposition(&coeffs, &spatial)?;
        let q = wigner_by_quadrature(&field, &grid)?.value(centre.0, centre.1);
        let c = wigner_by_closed_form(&coeffs, &grid).value(centre.0, centre.1);
        checks.below(Suite::Wigner, format!("quadrature W(0,0) of Fock state {level}"), (q - expected).abs(), 1e-6);
        checks.below(Suite::Wigner, format!("closed-form W(0,0) of Fock state {level}"), (c - expected).abs(), 1e-6);
    }

    let seed = opts.seed.unwrap_or(DEFAULT_SEED);
    for (k, coeffs) in random_vectors(seed).iter().enumerate() {
        let field = fock_superposition(coeffs, &spatial)?;
        let q = wigner_by_quadrature(&field, &grid)?;
        let c = wigner_by_closed_form(coeffs, &grid);
        checks.below(
            Suite::Wigner,
            format!("dual-path max |W_q - W_c|, vector {k} (r = {})", coeffs.offset()),
            q.max_difference(&c)?,
            1e-6,
        );
    }
    Ok(())
}

fn limit(opts: &Options, checks: &mut Checks) -> Outcome<()> {
    let osc = PotentialParams::oscillator_limit();
    let top = 11;
    let grid = Arc::new(config::spatial_grid(opts, top)?);
    let basis = build_basis(&osc, top, &grid)?;
    for n in 0..=10 {
        let phi = oscillator_state(n + 1, &grid)?;
        let overlap = phi.biproduct(&basis.states()[n + 1])?.norm();
        checks.below(Suite::Limit, format!("| |<phi_{0}, psi_{0}>| - 1 |", n + 1), (overlap - 1.0).abs(), 1e-8);
    }
    let worst = potential_deviation(&osc, &grid);
    checks.below(Suite::Limit, "max |V - (x^2 - 2)|", worst, 1e-12);
    Ok(())
}

fn potential_deviation(params: &PotentialParams, grid: &SpatialGrid) -> f64 {
    grid.nodes()
        .iter()
        .map(|&x| (params.potential_value(x) - Complex64::new(x * x - 2.0, 0.0)).norm())
        .fold(0.0, f64::max)
}

#[derive(Debug, Clone, Serialize)]
pub struct VerifyReport {
    pub command: &'static str,
    pub params: ParamRecord,
    pub grid: serde_json::Value,
    pub spec: serde_json::Value,
    pub checks: Vec<Check>,
    pub passed: bool,
}

impl VerifyReport {
    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed)
    }
}

/// Runs the selected suites without printing anything.
pub fn evaluate(opts: &Options) -> Outcome<VerifyReport> {
    let record = config::potential_params(opts)?;
    let mut suites = opts
        .suites
        .clone()
        .map(|s| s.0)
        .unwrap_or_else(|| Suite::ALL.to_vec());
    suites.sort();
    suites.dedup();

    let mut checks = Checks::default();
    for suite in &suites {
        match suite {
            Suite::Gram => gram(opts, &record, &mut checks)?,
            Suite::Binorm => binorm(opts, &record, &mut checks)?,
            Suite::Continuity => continuity(opts, &record, &mut checks)?,
            Suite::Wigner => wigner(opts, &mut checks)?,
            Suite::Limit => limit(opts, &mut checks)?,
        }
    }
    let passed = checks.0.iter().all(|c| c.passed);
    Ok(VerifyReport {
        command: "verify",
        params: record,
        grid: json!({ "extent": opts.grid_extent, "step": opts.grid_step.unwrap_or(DEFAULT_STEP) }),
        spec: json!({ "suites": suites }),
        checks: checks.0,
        passed,
    })
}

pub fn run(opts: &Options) -> Outcome<()> {
    let report = evaluate(opts)?;
    println!("{}", serde_json::to_string_pretty(&report)?);
    if let Some(dir) = &opts.out {
        std::fs::create_dir_all(dir)?;
        write_json(&dir.join("verify.json"), &report)?;
    }
    let names: Vec<String> = report
        .failures()
        .map(|c| format!("{} ({:.3e} >= {:.1e})", c.name, c.value, c.tolerance))
        .collect();
    if names.is_empty() {
        return Ok(());
    }
    Err(Failure::new(
        VERIFICATION,
        format!("{} check(s) failed: {}", names.len(), names.join("; ")),
    ))
}
