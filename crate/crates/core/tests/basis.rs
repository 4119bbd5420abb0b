mod common;

use complex_oscillator::eigenstates::*;
use complex_oscillator::potential::PotentialParams;
use complex_oscillator::specfun::erf;
use complex_oscillator::Complex64;
use std::f64::consts::PI;
use std::sync::Arc;

fn default_grid(level: usize) -> Arc<SpatialGrid> {
    Arc::new(SpatialGrid::default_for_level(level))
}

/// Reference shape rescaled so that the family is exactly solvable at `lambda`.
fn scaled_reference(lambda: f64) -> PotentialParams {
    let k = lambda / (3f64.sqrt() / 2.0);
    PotentialParams::new(k * PI / 4.0, k * PI.sqrt() / 2.0, k, lambda).unwrap()
}

#[test]
fn gram_identity_for_consistent_families() {
    let grid = default_grid(12);
    for lambda in [0.5, 1.0, 2.0] {
        let params = scaled_reference(lambda);
        assert!(params.ermakov_defect().abs() < 1e-12);
        let basis = build_basis(&params, 12, &grid).unwrap();
        let dev = identity_deviation(&gram_matrix(&basis));
        assert!(dev < 1e-6, "lambda = {lambda}: {dev}");
    }
    let basis = build_basis(&common::reference_consistent(), 12, &grid).unwrap();
    let gram = gram_matrix(&basis);
    assert!(identity_deviation(&gram) < 1e-6);
    assert!(gram[0][2].norm() < 1e-6);
}

#[test]
fn inconsistent_lambda_breaks_biorthonormality() {
    let grid = default_grid(12);
    for lambda in [0.5, 1.0, 2.0] {
        let basis = build_basis(&common::reference(lambda), 12, &grid).unwrap();
        assert!(identity_deviation(&gram_matrix(&basis)) > 1e-2);
        assert!(basis.bi_norm_residual() > 1e-2);
    }
}

#[test]
fn excited_bi_norms() {
    let grid = default_grid(13);
    let params = common::reference_consistent();
    for n in 0..=12 {
        let psi = excited_state(&params, n, &grid).unwrap();
        let bi = psi.biproduct(&psi).unwrap();
        assert!((bi - 1.0).norm() < 1e-7, "n = {n}: {bi}");
    }
}

#[test]
fn ground_state_bi_norm_for_any_lambda() {
    let grid = default_grid(0);
    for lambda in [0.5, 1.0, 3f64.sqrt() / 2.0] {
        let psi0 = ground_state(&common::reference(lambda), &grid).unwrap();
        assert!((psi0.biproduct(&psi0).unwrap() - 1.0).norm() < 1e-8);
    }
}

#[test]
fn kappa_from_endpoint_identity() {
    // ∫ α⁻² e^{2iλF} dx = [e^{2iλF}] / (2iλ): the left side by quadrature, the
    // right side from F(±∞) = (√π/2) ∫_0^{±1} ds / g(s), here in closed form via
    // arctan, since dF = α⁻² dx = e^{−x²}/g(erf x) dx.
    let params = common::reference(1.0);
    let grid = default_grid(0);
    let (a, b, c) = (params.a, params.b, params.c);
    let root = (4.0 * a * c - b * b).sqrt();
    let big_f = |x: f64| PI.sqrt() / root * (((2.0 * a * erf(x) + b) / root).atan() - (b / root).atan());

    let samples: Vec<Complex64> = grid
        .nodes()
        .iter()
        .map(|&x| Complex64::from_polar(params.inverse_alpha_squared(x), 2.0 * params.lambda * big_f(x)))
        .collect();
    let lhs = grid.rule().integrate(&samples).unwrap();
    let two_i_lambda = Complex64::new(0.0, 2.0 * params.lambda);
    let rhs = (Complex64::from_polar(1.0, 2.0 * params.lambda * big_f(f64::INFINITY))
        - Complex64::from_polar(1.0, 2.0 * params.lambda * big_f(f64::NEG_INFINITY)))
        / two_i_lambda;
    assert!((lhs - rhs).norm() < 1e-10, "{lhs} vs {rhs}");

    let basis = build_basis(&params, 0, &grid).unwrap();
    let kappa = rhs.inv().sqrt();
    assert!((basis.kappa0() - kappa).norm() < 1e-8);
    assert!(basis.kappa0().arg() > -PI / 2.0 && basis.kappa0().arg() <= PI / 2.0);
}

#[test]
fn ground_state_phase_closed_form() {
    // With consistent λ, λF(x) = arctan((2a erf x + b)/√D) − arctan(b/√D).
    let params = common::reference_consistent();
    let grid = default_grid(0);
    let psi0 = ground_state(&params, &grid).unwrap();
    let root = (4.0 * params.a * params.c - params.b * params.b).sqrt();
    let kappa = psi0.amplitudes()[grid.center()] / params.inverse_alpha(0.0);
    for (i, v) in psi0.amplitudes().iter().enumerate().step_by(37) {
        let x = grid.node(i);
        let phase = ((2.0 * params.a * erf(x) + params.b) / root).atan() - (params.b / root).atan();
        let expected = kappa * Complex64::from_polar(params.inverse_alpha(x), phase);
        assert!((v - expected).norm() < 1e-8, "x = {x}: {}", (v - expected).norm());
    }
}

#[test]
fn oscillator_limit_recovery() {
    let grid = default_grid(11);
    let osc = PotentialParams::oscillator_limit();
    let basis = build_basis(&osc, 11, &grid).unwrap();
    for n in 0..=10 {
        let phi = oscillator_state(n + 1, &grid).unwrap();
        let overlap = phi.biproduct(&basis.states()[n + 1]).unwrap();
        assert!((overlap.norm() - 1.0).abs() < 1e-8, "n = {n}");
    }
    for x in grid.nodes() {
        assert_eq!(osc.potential_value(x), Complex64::new(x * x - 2.0, 0.0));
    }
}

#[test]
fn grid_refinement_stability() {
    let params = common::reference_consistent();
    let coarse = Arc::new(SpatialGrid::new(16.0, 0.01).unwrap());
    let fine = Arc::new(SpatialGrid::new(16.0, 0.005).unwrap());
    let g1 = gram_matrix(&build_basis(&params, 12, &coarse).unwrap());
    let g2 = gram_matrix(&build_basis(&params, 12, &fine).unwrap());
    let worst = g1
        .iter()
        .flatten()
        .zip(g2.iter().flatten())
        .map(|(a, b)| (a - b).norm())
        .fold(0.0, f64::max);
    assert!(worst < 1e-8, "{worst}");
}

#[test]
fn coarse_grid_degrades_gram() {
    let params = common::reference_consistent();
    let coarse = Arc::new(SpatialGrid::new(SpatialGrid::default_for_level(12).extent(), 0.2).unwrap());
    let basis = build_basis(&params, 12, &coarse).unwrap();
    assert!(identity_deviation(&gram_matrix(&basis)) > 1e-6);
}

#[test]
fn construction_is_deterministic() {
    let params = common::reference_consistent();
    let grid = default_grid(20);
    let a = build_basis(&params, 20, &grid).unwrap();
    let b = build_basis(&params, 20, &grid).unwrap();
    for (x, y) in a.states().iter().zip(b.states()) {
        assert_eq!(x.amplitudes(), y.amplitudes());
    }
}
