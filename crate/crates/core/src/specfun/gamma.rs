use num_complex::Complex64;

use crate::{Error, Result};

/// Stirling-series coefficients B₂ₖ / (2k(2k−1)).
const STIRLING: [f64; 8] = [
    1.0 / 12.0,
    -1.0 / 360.0,
    1.0 / 1260.0,
    -1.0 / 1680.0,
    1.0 / 1188.0,
    -691.0 / 360_360.0,
    1.0 / 156.0,
    -3617.0 / 122_400.0,
];

/// `n!` is exact in f64 up to here.
const EXACT_FACTORIAL_MAX: u64 = 20;

/// Natural log of the gamma function for `x > 0`.
///
/// Small integers are taken from the exact factorial; everything else is
/// shifted above 15 with the recurrence and finished with Stirling's series.
pub fn log_gamma(x: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::Argument(format!(
            "log_gamma needs a finite positive argument, got {x}"
        )));
    }
    if x.fract() == 0.0 && x <= (EXACT_FACTORIAL_MAX + 1) as f64 {
        return Ok(exact_factorial(x as u64 - 1).ln());
    }
    let mut y = x;
    let mut product = 1.0;
    while y < 15.0 {
        product *= y;
        y += 1.0;
    }
    Ok(stirling(y) - product.ln())
}

fn stirling(y: f64) -> f64 {
    let inv = 1.0 / y;
    let inv2 = inv * inv;
    let mut series = 0.0;
    let mut power = inv;
    for c in STIRLING {
        series += c * power;
        power *= inv2;
    }
    (y - 0.5) * y.ln() - y + 0.5 * (2.0 * std::f64::consts::PI).ln() + series
}

fn exact_factorial(n: u64) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

/// `ln n!`
pub fn ln_factorial(n: u64) -> f64 {
    if n <= EXACT_FACTORIAL_MAX {
        exact_factorial(n).ln()
    } else {
        // n + 1 > 21 is always a valid argument.
        log_gamma(n as f64 + 1.0).expect("positive argument")
    }
}

/// Binomial probability `C(n,k) pᵏ (1−p)ⁿ⁻ᵏ`, evaluated in log space.
pub fn binomial_pmf(n: u64, k: u64, p: f64) -> Result<f64> {
    if k > n {
        return Err(Error::Argument(format!("binomial_pmf: k = {k} > n = {n}")));
    }
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::Argument(format!(
            "binomial_pmf: p = {p} outside [0, 1]"
        )));
    }
    if p == 0.0 {
        return Ok(if k == 0 { 1.0 } else { 0.0 });
    }
    if p == 1.0 {
        return Ok(if k == n { 1.0 } else { 0.0 });
    }
    let ln_choose = ln_factorial(n) - ln_factorial(k) - ln_factorial(n - k);
    let ln_pmf = ln_choose + k as f64 * p.ln() + (n - k) as f64 * (-p).ln_1p();
    Ok(ln_pmf.exp().min(1.0))
}

/// Coherent-state amplitude `e^{−|z|²/2} zᵏ / √(k!)`.
pub fn poisson_amplitude(k: usize, z: Complex64) -> Complex64 {
    let modulus = z.norm();
    if modulus == 0.0 {
        return if k == 0 {
            Complex64::new(1.0, 0.0)
        } else {
            Complex64::new(0.0, 0.0)
        };
    }
    let kf = k as f64;
    let ln_mag = -0.5 * modulus * modulus + kf * modulus.ln() - 0.5 * ln_factorial(k as u64);
    Complex64::from_polar(ln_mag.exp(), kf * z.arg())
}
