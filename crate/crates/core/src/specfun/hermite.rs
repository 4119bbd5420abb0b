use std::f64::consts::PI;

/// Values above this are rescaled during the recurrence.
const RESCALE_THRESHOLD: f64 = 1e150;

/// Oscillator eigenfunctions `φ₀(x) … φ_{n_max}(x)` with
/// `φₙ = e^{−x²/2} Hₙ(x) / √(2ⁿ n! √π)` (physicists' Hermite polynomials).
pub fn normalized_hermite_sequence(n_max: usize, x: f64) -> Vec<f64> {
    let mut out = vec![0.0; n_max + 1];
    normalized_hermite_into(x, &mut out);
    out
}

/// Fills `out[k] = φ_k(x)` for `k < out.len()`.
///
/// Runs the normalized three-term recurrence on `φ_k e^{x²/2}` and keeps a
/// separate log scale, so the Gaussian factor is applied once per entry and
/// nothing overflows or underflows prematurely for large `|x|`.
pub fn normalized_hermite_into(x: f64, out: &mut [f64]) {
    if out.is_empty() {
        return;
    }
    let mut log_scale = -0.5 * x * x;
    let mut prev = 0.0;
    let mut cur = PI.powf(-0.25);
    out[0] = scaled(cur, log_scale);
    for k in 0..out.len() - 1 {
        let kf = k as f64;
        let next = (2.0 / (kf + 1.0)).sqrt() * x * cur - (kf / (kf + 1.0)).sqrt() * prev;
        prev = cur;
        cur = next;
        if cur.abs() > RESCALE_THRESHOLD {
            cur /= RESCALE_THRESHOLD;
            prev /= RESCALE_THRESHOLD;
            log_scale += RESCALE_THRESHOLD.ln();
        }
        out[k + 1] = scaled(cur, log_scale);
    }
}

fn scaled(value: f64, log_scale: f64) -> f64 {
    if value == 0.0 {
        0.0
    } else {
        (value.abs().ln() + log_scale).exp().copysign(value)
    }
}
