use num_complex::Complex64;
use serde::Serialize;

use crate::{Error, Result};

/// Composite Simpson rule on `[−extent, extent]` with an odd node count.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QuadratureRule {
    nodes: Vec<f64>,
    weights: Vec<f64>,
    extent: f64,
}

/// Builds the composite Simpson rule with `node_count` equally spaced nodes.
pub fn build_rule(extent: f64, node_count: usize) -> Result<QuadratureRule> {
    if !(extent > 0.0) || !extent.is_finite() {
        return Err(Error::Argument(format!(
            "quadrature extent must be positive, got {extent}"
        )));
    }
    if node_count < 9 || node_count % 2 == 0 {
        return Err(Error::Argument(format!(
            "Simpson rule needs an odd node count >= 9, got {node_count}"
        )));
    }
    let half = (node_count - 1) / 2;
    let step = extent / half as f64;
    let nodes = (0..node_count)
        .map(|i| (i as f64 - half as f64) * step)
        .collect();
    let weights = (0..node_count)
        .map(|i| {
            let w = if i == 0 || i == node_count - 1 {
                1.0
            } else if i % 2 == 1 {
                4.0
            } else {
                2.0
            };
            w * step / 3.0
        })
        .collect();
    Ok(QuadratureRule {
        nodes,
        weights,
        extent,
    })
}

impl QuadratureRule {
    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn extent(&self) -> f64 {
        self.extent
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn integrate(&self, samples: &[Complex64]) -> Result<Complex64> {
        self.check_len(samples.len())?;
        Ok(self
            .weights
            .iter()
            .zip(samples)
            .fold(Complex64::new(0.0, 0.0), |acc, (w, s)| acc + s * w))
    }

    pub fn integrate_real(&self, samples: &[f64]) -> Result<f64> {
        self.check_len(samples.len())?;
        Ok(self.weights.iter().zip(samples).map(|(w, s)| w * s).sum())
    }

    /// Integrates a function sampled at the rule's own nodes.
    pub fn integrate_fn(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, w)| w * f(x))
            .sum()
    }

    fn check_len(&self, found: usize) -> Result<()> {
        if found != self.nodes.len() {
            return Err(Error::LengthMismatch {
                expected: self.nodes.len(),
                found,
            });
        }
        Ok(())
    }
}

/// Running integral `F(xᵢ) = ∫_{x_origin}^{xᵢ} f` of uniformly sampled data.
///
/// Each cell uses the cubic through its four nearest samples
/// (`h/24 · (−f₋₁ + 13f₀ + 13f₁ − f₂)`, one-sided at the ends), so the
/// result is exact for cubics and fourth-order in general.
pub fn cumulative_integral(samples: &[f64], step: f64, origin: usize) -> Result<Vec<f64>> {
    let n = samples.len();
    if n < 4 {
        return Err(Error::Argument(format!(
            "cumulative_integral needs at least 4 samples, got {n}"
        )));
    }
    if origin >= n {
        return Err(Error::Argument(format!(
            "origin index {origin} outside {n} samples"
        )));
    }
    if !(step > 0.0) {
        return Err(Error::Argument(format!("step must be positive, got {step}")));
    }
    let f = samples;
    let cell = |i: usize| -> f64 {
        let s = if i == 0 {
            9.0 * f[0] + 19.0 * f[1] - 5.0 * f[2] + f[3]
        } else if i == n - 2 {
            f[n - 4] - 5.0 * f[n - 3] + 19.0 * f[n - 2] + 9.0 * f[n - 1]
        } else {
            -f[i - 1] + 13.0 * f[i] + 13.0 * f[i + 1] - f[i + 2]
        };
        s * step / 24.0
    };
    let mut out = vec![0.0; n];
    for i in origin..n - 1 {
        out[i + 1] = out[i] + cell(i);
    }
    for i in (0..origin).rev() {
        out[i] = out[i + 1] - cell(i);
    }
    Ok(out)
}
