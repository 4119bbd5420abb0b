//! The complex potential family and its auxiliary function
//! `α(x) = e^{x²/2} √(a erf²x + b erf x + c)`.
//!
//! `α` itself overflows past `|x| ≈ 37`, so evaluations that feed the
//! eigenstates go through `α⁻¹` and `α⁻²`, which only underflow.

use num_complex::Complex64;
use serde::Serialize;
use std::f64::consts::{FRAC_2_SQRT_PI, PI};

use crate::specfun::erf;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PotentialParams {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub lambda: f64,
}

impl PotentialParams {
    /// Validated constructor.
    pub fn new(a: f64, b: f64, c: f64, lambda: f64) -> Result<Self> {
        Self { a, b, c, lambda }.validate()
    }

    /// `a = b = λ = 0, c = 1`: the potential reduces to `x² − 2`.
    pub fn oscillator_limit() -> Self {
        Self {
            a: 0.0,
            b: 0.0,
            c: 1.0,
            lambda: 0.0,
        }
    }

    /// Parameters with `λ = √((4ac − b²)/π)`, the only magnitude of `λ` for
    /// which the closed-form states are eigenfunctions of `V`.
    pub fn with_consistent_lambda(a: f64, b: f64, c: f64) -> Result<Self> {
        let probe = Self {
            a,
            b,
            c,
            lambda: 0.0,
        }
        .validate()?;
        let lambda = probe.consistent_lambda().ok_or_else(|| {
            Error::ParameterDomain(format!(
                "4ac - b^2 = {} < 0: no real lambda makes this family exactly solvable",
                4.0 * a * c - b * b
            ))
        })?;
        Ok(Self { lambda, ..probe })
    }

    /// Checks the positivity of `g(s) = a s² + b s + c` on `s ∈ [−1, 1]`.
    pub fn validate(self) -> Result<Self> {
        let Self { a, b, c, lambda } = self;
        if ![a, b, c, lambda].iter().all(|v| v.is_finite()) {
            return Err(Error::ParameterDomain(
                "parameters must be finite".to_string(),
            ));
        }
        if a < 0.0 {
            return Err(Error::ParameterDomain(format!("a >= 0 violated (a = {a})")));
        }
        if b < 0.0 {
            return Err(Error::ParameterDomain(format!("b >= 0 violated (b = {b})")));
        }
        if a > 0.0 {
            let bound = b * b / (4.0 * a);
            if c <= bound {
                return Err(Error::ParameterDomain(format!(
                    "c > b^2/(4a) violated (c = {c}, b^2/(4a) = {bound})"
                )));
            }
        } else if b > 0.0 {
            if c <= b {
                return Err(Error::ParameterDomain(format!(
                    "c > b violated for a = 0 (c = {c}, b = {b})"
                )));
            }
        } else if c <= 0.0 {
            return Err(Error::ParameterDomain(format!(
                "c > 0 violated for a = b = 0 (c = {c})"
            )));
        }
        Ok(self)
    }

    /// `√((4ac − b²)/π)` when real.
    pub fn consistent_lambda(&self) -> Option<f64> {
        let disc = 4.0 * self.a * self.c - self.b * self.b;
        (disc >= 0.0).then(|| (disc / PI).sqrt())
    }

    /// `πλ² − (4ac − b²)`. Zero exactly when `α` solves the Ermakov equation
    /// `α'' = (x² + 1)α + λ²/α³`; otherwise the closed-form states are not
    /// eigenfunctions and the basis is not bi-orthonormal.
    pub fn ermakov_defect(&self) -> f64 {
        PI * self.lambda * self.lambda - (4.0 * self.a * self.c - self.b * self.b)
    }

    pub fn is_oscillator_limit(&self) -> bool {
        self.a == 0.0 && self.b == 0.0 && self.lambda == 0.0
    }

    fn g_parts(&self, x: f64) -> (f64, f64, f64) {
        let e = erf(x);
        let gauss = FRAC_2_SQRT_PI * (-x * x).exp();
        let g = (self.a * e + self.b) * e + self.c;
        let g1 = (2.0 * self.a * e + self.b) * gauss;
        let g2 = 2.0 * self.a * gauss * gauss - 2.0 * x * g1;
        (g, g1, g2)
    }

    pub fn alpha(&self, x: f64) -> f64 {
        let (g, _, _) = self.g_parts(x);
        (0.5 * x * x).exp() * g.sqrt()
    }

    /// `1/α(x)`.
    pub fn inverse_alpha(&self, x: f64) -> f64 {
        let (g, _, _) = self.g_parts(x);
        (-0.5 * x * x).exp() / g.sqrt()
    }

    /// `1/α²(x)`.
    pub fn inverse_alpha_squared(&self, x: f64) -> f64 {
        let (g, _, _) = self.g_parts(x);
        (-x * x).exp() / g
    }

    /// `α'/α = x + g'/(2g)` with `g' = (2a erf x + b) · 2/√π · e^{−x²}`.
    pub fn alpha_log_derivative(&self, x: f64) -> f64 {
        let (g, g1, _) = self.g_parts(x);
        x + g1 / (2.0 * g)
    }

    /// `(α'/α)' = 1 + g''/(2g) − g'²/(2g²)`.
    pub fn alpha_log_derivative_prime(&self, x: f64) -> f64 {
        let (g, g1, g2) = self.g_parts(x);
        1.0 + g2 / (2.0 * g) - g1 * g1 / (2.0 * g * g)
    }

    /// The quantity differentiated in `V`: `(b + 2a erf x − i√π λ) / (√π α²)`.
    pub fn bracket(&self, x: f64) -> Complex64 {
        let (g, _, _) = self.g_parts(x);
        let u = Complex64::new(self.b + 2.0 * self.a * erf(x), -PI.sqrt() * self.lambda) / PI.sqrt();
        u * ((-x * x).exp() / g)
    }

    /// `V_λ(x) = x² − 2 − 2 d/dx bracket(x)`, derivative in closed form.
    pub fn potential_value(&self, x: f64) -> Complex64 {
        let (g, g1, _) = self.g_parts(x);
        let gauss = (-x * x).exp();
        let u = Complex64::new(self.b + 2.0 * self.a * erf(x), -PI.sqrt() * self.lambda) / PI.sqrt();
        let du = 4.0 * self.a * gauss / PI;
        // d/dx [u e^{−x²}/g] = u' e^{−x²}/g − u e^{−x²} (2x g + g')/g²
        let d_bracket = (du * gauss / g) - u * (gauss * (2.0 * x * g + g1) / (g * g));
        Complex64::new(x * x - 2.0, 0.0) - 2.0 * d_bracket
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fig1(lambda: f64) -> PotentialParams {
        PotentialParams::new(PI / 4.0, PI.sqrt() / 2.0, 1.0, lambda).unwrap()
    }

    #[test]
    fn validation_examples() {
        assert!(PotentialParams::new(PI / 4.0, PI.sqrt() / 2.0, 1.0, 1.0).is_ok());
        assert!(PotentialParams::new(0.0, 0.0, 1.0, 0.0).is_ok());
        let err = PotentialParams::new(1.0, 2.0, 1.0, 0.0).unwrap_err();
        match err {
            Error::ParameterDomain(msg) => assert!(msg.contains("c > b^2/(4a)"), "{msg}"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn validation_degenerate_branches() {
        assert!(PotentialParams::new(0.0, 0.5, 0.6, 0.0).is_ok());
        assert!(PotentialParams::new(0.0, 0.5, 0.5, 0.0).is_err());
        assert!(PotentialParams::new(0.0, 0.0, 0.0, 0.0).is_err());
        assert!(PotentialParams::new(-1.0, 0.0, 1.0, 0.0).is_err());
        assert!(PotentialParams::new(1.0, -0.1, 1.0, 0.0).is_err());
        assert!(PotentialParams::new(1.0, 0.0, f64::NAN, 0.0).is_err());
    }

    #[test]
    fn consistent_lambda_for_reference_family() {
        let p = PotentialParams::with_consistent_lambda(PI / 4.0, PI.sqrt() / 2.0, 1.0).unwrap();
        assert!((p.lambda - 3f64.sqrt() / 2.0).abs() < 1e-15);
        assert!(p.ermakov_defect().abs() < 1e-14);
        assert!(fig1(1.0).ermakov_defect() > 0.1);
        assert!(PotentialParams::with_consistent_lambda(0.0, 0.5, 1.0).is_err());
    }

    #[test]
    fn alpha_examples() {
        assert_eq!(PotentialParams::oscillator_limit().alpha(0.0), 1.0);
        let c4 = PotentialParams::new(0.0, 0.0, 4.0, 0.0).unwrap();
        assert_eq!(c4.alpha(0.0), 2.0);
        assert_eq!(fig1(1.0).alpha(0.0), 1.0);
    }

    #[test]
    fn alpha_log_derivative_matches_finite_difference() {
        let p = fig1(1.0);
        let x = 0.7;
        let h = 1e-5;
        let fd = (p.alpha(x + h).ln() - p.alpha(x - h).ln()) / (2.0 * h);
        assert!((p.alpha_log_derivative(x) - fd).abs() < 1e-6);
        let osc = PotentialParams::oscillator_limit();
        for &x in &[-3.0, -0.2, 0.0, 1.5] {
            assert_eq!(osc.alpha_log_derivative(x), x);
        }
    }

    #[test]
    fn log_derivative_prime_matches_finite_difference() {
        let p = fig1(1.0);
        for &x in &[-1.3, 0.0, 0.4, 2.2] {
            let h = 1e-5;
            let fd = (p.alpha_log_derivative(x + h) - p.alpha_log_derivative(x - h)) / (2.0 * h);
            assert!((p.alpha_log_derivative_prime(x) - fd).abs() < 1e-7, "x = {x}");
        }
    }

    #[test]
    fn log_derivative_tail_decays() {
        let p = fig1(1.0);
        for &x in &[5.0, 6.0, -5.5] {
            let excess: f64 = p.alpha_log_derivative(x) - x;
            assert!(excess.abs() <= (-x * x).exp() * 2.0);
        }
    }

    #[test]
    fn oscillator_limit_potential() {
        let osc = PotentialParams::oscillator_limit();
        for i in -100..=100 {
            let x = i as f64 * 0.13;
            assert_eq!(osc.potential_value(x), Complex64::new(x * x - 2.0, 0.0));
        }
    }

    #[test]
    fn real_when_lambda_vanishes() {
        let p = fig1(0.0);
        for i in -50..=50 {
            assert_eq!(p.potential_value(i as f64 * 0.2).im, 0.0);
        }
    }

    #[test]
    fn closed_form_matches_finite_difference_at_origin() {
        let p = fig1(1.0);
        let h = 1e-5;
        let fd = (p.bracket(h) - p.bracket(-h)) / (2.0 * h);
        let expected = Complex64::new(-2.0, 0.0) - 2.0 * fd;
        assert!((p.potential_value(0.0) - expected).norm() < 1e-6);
        assert!(p.potential_value(0.0).im.abs() > 0.1);
    }

    #[test]
    fn far_field_overflow_free() {
        let p = fig1(1.0);
        assert_eq!(p.inverse_alpha(40.0), 0.0);
        assert!(p.potential_value(40.0).re.is_finite());
    }
}
