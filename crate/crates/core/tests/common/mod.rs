#![allow(dead_code)]

use complex_oscillator::potential::PotentialParams;
use std::f64::consts::PI;

/// a = π/4, b = √π/2, c = 1.
pub fn reference(lambda: f64) -> PotentialParams {
    PotentialParams::new(PI / 4.0, PI.sqrt() / 2.0, 1.0, lambda).unwrap()
}

pub fn reference_consistent() -> PotentialParams {
    PotentialParams::with_consistent_lambda(PI / 4.0, PI.sqrt() / 2.0, 1.0).unwrap()
}

/// Gauss–Hermite nodes and weights for ∫ e^{−x²} f(x) dx, by Newton iteration
/// on the orthonormal Hermite recurrence (Numerical Recipes `gauher`).
pub fn gauss_hermite(n: usize) -> Vec<(f64, f64)> {
    let pim4 = PI.powf(-0.25);
    let mut out = vec![(0.0, 0.0); n];
    let m = (n + 1) / 2;
    let mut z = 0.0f64;
    for i in 0..m {
        z = match i {
            0 => (2.0 * n as f64 + 1.0).sqrt() - 1.85575 * (2.0 * n as f64 + 1.0).powf(-1.0 / 6.0),
            1 => z - 1.14 * (n as f64).powf(0.426) / z,
            2 => 1.86 * z - 0.86 * out[0].0,
            3 => 1.91 * z - 0.91 * out[1].0,
            _ => 2.0 * z - out[i - 2].0,
        };
        let mut pp = 0.0;
        for _ in 0..100 {
            let mut p1 = pim4;
            let mut p2 = 0.0;
            for j in 0..n {
                let p3 = p2;
                p2 = p1;
                let jf = j as f64;
                p1 = z * (2.0 / (jf + 1.0)).sqrt() * p2 - (jf / (jf + 1.0)).sqrt() * p3;
            }
            pp = (2.0 * n as f64).sqrt() * p2;
            let z1 = z;
            z = z1 - p1 / pp;
            if (z - z1).abs() <= 1e-15 {
                break;
            }
        }
        let w = 2.0 / (pp * pp);
        out[i] = (z, w);
        out[n - 1 - i] = (-z, w);
    }
    out
}

/// φₙ(x) straight from the definition with log-space factorials and the
/// explicit Hermite sum Hₙ(x) = n! Σ (−1)ᵐ (2x)^{n−2m} / (m!(n−2m)!).
pub fn phi_direct(n: usize, x: f64) -> f64 {
    phi_direct_with_bound(n, x).0
}

/// [`phi_direct`] together with a bound on its own rounding error, which the
/// alternating sum amplifies by `Σ|terms| / |Σ terms|`.
pub fn phi_direct_with_bound(n: usize, x: f64) -> (f64, f64) {
    let ln_fact = |k: usize| (1..=k).map(|j| (j as f64).ln()).sum::<f64>();
    let mut h = 0.0;
    let mut magnitude = 0.0;
    for m in 0..=n / 2 {
        let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
        let power = (n - 2 * m) as i32;
        let ln_coeff = ln_fact(n) - ln_fact(m) - ln_fact(n - 2 * m);
        let term = ln_coeff.exp() * (2.0 * x).powi(power);
        h += sign * term;
        magnitude += term.abs();
    }
    let ln_norm = 0.5 * (n as f64 * 2f64.ln() + ln_fact(n) + 0.5 * PI.ln());
    let scale = (-0.5 * x * x - ln_norm).exp();
    (h * scale, 256.0 * f64::EPSILON * magnitude * scale)
}
