//! Superpositions of adjacent eigenstates, their spectral time evolution,
//! and the bi-orthogonal and conventional densities and currents.
//!
//! A packet is `φ = Σₖ cₖ ψ_{k+r}` with dual `φ̄ = Σₖ c̄ₖ ψ̄_{k+r}`. Time
//! evolution multiplies `cₖ` (and `c̄ₖ`) by `e^{−2ikt}`; the common phase
//! `e^{−i(2r−1)t}` is dropped.

use num_complex::Complex64;
use serde::Serialize;
use std::sync::Arc;

use crate::eigenstates::{BasisSet, SpatialGrid, WaveField};
use crate::specfun::{binomial_pmf, ln_factorial, poisson_amplitude};
use crate::{Error, Result};

/// Poisson vectors are cut where the remaining probability mass drops below this.
pub const POISSON_TAIL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoefficientVector {
    offset: usize,
    coefficients: Vec<Complex64>,
    dual_coefficients: Vec<Complex64>,
}

impl CoefficientVector {
    /// Duals default to the coefficients themselves.
    pub fn new(offset: usize, coefficients: Vec<Complex64>) -> Self {
        Self {
            offset,
            dual_coefficients: coefficients.clone(),
            coefficients,
        }
    }

    pub fn with_duals(
        offset: usize,
        coefficients: Vec<Complex64>,
        dual_coefficients: Vec<Complex64>,
    ) -> Result<Self> {
        if coefficients.len() != dual_coefficients.len() {
            return Err(Error::LengthMismatch {
                expected: coefficients.len(),
                found: dual_coefficients.len(),
            });
        }
        Ok(Self {
            offset,
            coefficients,
            dual_coefficients,
        })
    }

    /// A single eigenstate `ψ_level`.
    pub fn eigenstate(level: usize) -> Self {
        Self::new(level, vec![Complex64::new(1.0, 0.0)])
    }

    pub fn offset(&self) -> usize {
        self.offset
    }

    pub fn coefficients(&self) -> &[Complex64] {
        &self.coefficients
    }

    pub fn dual_coefficients(&self) -> &[Complex64] {
        &self.dual_coefficients
    }

    pub fn len(&self) -> usize {
        self.coefficients.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coefficients.is_empty()
    }

    /// Highest eigen-index touched, `r + n`.
    pub fn highest_level(&self) -> usize {
        self.offset + self.coefficients.len().saturating_sub(1)
    }

    /// `Σ c̄ₖ* cₖ`.
    pub fn bi_norm(&self) -> Complex64 {
        self.dual_coefficients
            .iter()
            .zip(&self.coefficients)
            .fold(Complex64::new(0.0, 0.0), |acc, (d, c)| acc + d.conj() * c)
    }

    /// `|cₖ|²` for each term.
    pub fn weights(&self) -> Vec<f64> {
        self.coefficients.iter().map(|c| c.norm_sqr()).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BinomialSpec {
    pub n: usize,
    pub p: f64,
    pub r: usize,
}

impl BinomialSpec {
    pub fn new(n: usize, p: f64, r: usize) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::ParameterDomain(format!(
                "success probability p = {p} outside [0, 1]"
            )));
        }
        Ok(Self { n, p, r })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PoissonSpec {
    pub z: Complex64,
    pub r: usize,
    pub truncation: usize,
}

impl PoissonSpec {
    /// Truncation chosen by [`poisson_truncation`].
    pub fn new(z: Complex64, r: usize) -> Result<Self> {
        if !z.is_finite() {
            return Err(Error::ParameterDomain(format!("z = {z} is not finite")));
        }
        Ok(Self {
            z,
            r,
            truncation: poisson_truncation(z.norm_sqr()),
        })
    }
}

/// Smallest `K` with `Σ_{k>K} e^{−μ} μᵏ/k! < 1e−12`.
pub fn poisson_truncation(mean: f64) -> usize {
    if mean == 0.0 {
        return 0;
    }
    let z = Complex64::new(mean.sqrt(), 0.0);
    let mut cumulative = 0.0;
    let mut k = 0;
    loop {
        cumulative += poisson_amplitude(k, z).norm_sqr();
        // Past the mode the remaining mass is bounded by the next term times a
        // geometric factor; the cumulative sum is accurate to ~1e-16.
        if 1.0 - cumulative < POISSON_TAIL && k as f64 > mean {
            return k;
        }
        k += 1;
    }
}

/// `cₖ = √pmf(n, k, p)`, real and nonnegative.
pub fn binomial_coefficients(spec: &BinomialSpec) -> CoefficientVector {
    let coefficients = (0..=spec.n)
        .map(|k| {
            let w = binomial_pmf(spec.n as u64, k as u64, spec.p).expect("validated spec");
            Complex64::new(w.sqrt(), 0.0)
        })
        .collect();
    CoefficientVector::new(spec.r, coefficients)
}

/// `cₖ = e^{−|z|²/2} zᵏ/√k!` for `k ≤ K`, rescaled so the truncated bi-norm is 1.
pub fn poisson_coefficients(spec: &PoissonSpec) -> CoefficientVector {
    let raw: Vec<Complex64> = (0..=spec.truncation)
        .map(|k| poisson_amplitude(k, spec.z))
        .collect();
    let mass: f64 = raw.iter().map(|c| c.norm_sqr()).sum();
    let scale = 1.0 / mass.sqrt();
    CoefficientVector::new(spec.r, raw.into_iter().map(|c| c * scale).collect())
}

/// `Σ c̄ₖ* cₖ E_{k+r}` with `E_m = 2m − 1`.
pub fn energy_expectation(coeffs: &CoefficientVector) -> f64 {
    coeffs
        .dual_coefficients
        .iter()
        .zip(&coeffs.coefficients)
        .enumerate()
        .map(|(k, (d, c))| (d.conj() * c).re * (2.0 * (k + coeffs.offset) as f64 - 1.0))
        .sum()
}

/// `2np − 1`: the binomial energy with the packet starting at `ψ₀`.
pub fn binomial_energy_r0_formula(spec: &BinomialSpec) -> f64 {
    2.0 * spec.n as f64 * spec.p - 1.0
}

/// `cₖ(t) = cₖ e^{−2ikt}`, duals alike.
pub fn evolve(coeffs: &CoefficientVector, t: f64) -> CoefficientVector {
    let phase = |k: usize| Complex64::from_polar(1.0, -2.0 * k as f64 * t);
    let rotate = |v: &[Complex64]| -> Vec<Complex64> {
        v.iter().enumerate().map(|(k, c)| c * phase(k)).collect()
    };
    CoefficientVector {
        offset: coeffs.offset,
        coefficients: rotate(&coeffs.coefficients),
        dual_coefficients: rotate(&coeffs.dual_coefficients),
    }
}

fn check_fits(coeffs: &CoefficientVector, basis: &BasisSet) -> Result<()> {
    let required = coeffs.offset + coeffs.len();
    if required > basis.size() {
        return Err(Error::BasisSize {
            required,
            available: basis.size(),
        });
    }
    Ok(())
}

fn combine<'a>(
    grid: &SpatialGrid,
    weights: &[Complex64],
    fields: impl Iterator<Item = &'a WaveField>,
    conjugate_fields: bool,
) -> Vec<Complex64> {
    let mut out = vec![Complex64::new(0.0, 0.0); grid.len()];
    for (w, field) in weights.iter().zip(fields) {
        for (o, v) in out.iter_mut().zip(field.amplitudes()) {
            let v = if conjugate_fields { v.conj() } else { *v };
            *o += w * v;
        }
    }
    out
}

/// `(φ, φ̄)` sampled on the basis grid.
pub fn synthesize(coeffs: &CoefficientVector, basis: &BasisSet) -> Result<(WaveField, WaveField)> {
    check_fits(coeffs, basis)?;
    let grid = basis.grid();
    let r = coeffs.offset;
    let phi = combine(grid, &coeffs.coefficients, basis.states()[r..].iter(), false);
    let dual = combine(grid, &coeffs.dual_coefficients, basis.duals()[r..].iter(), false);
    Ok((
        WaveField::new(Arc::clone(grid), phi)?,
        WaveField::new(Arc::clone(grid), dual)?,
    ))
}

/// `cₖ = ∫ ψ̄ₖ* φ dx` for every basis state (offset 0, duals equal).
pub fn fourier_analyze(field: &WaveField, basis: &BasisSet) -> Result<CoefficientVector> {
    let coefficients = basis
        .duals()
        .iter()
        .map(|d| d.inner(field))
        .collect::<Result<Vec<_>>>()?;
    Ok(CoefficientVector::new(0, coefficients))
}

/// Densities and currents of a packet at one instant.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityCurrentFrame {
    pub time: f64,
    /// `ρ_B = φ̄* φ`
    pub rho_b: Vec<Complex64>,
    /// `J_B = i(φ ∂ₓφ̄* − φ̄* ∂ₓφ)`
    pub current_b: Vec<Complex64>,
    /// `ρ = |φ|²`
    pub rho: Vec<f64>,
    /// `J = i(φ ∂ₓφ* − φ* ∂ₓφ)`
    pub current: Vec<f64>,
    grid: Arc<SpatialGrid>,
}

impl DensityCurrentFrame {
    pub fn grid(&self) -> &Arc<SpatialGrid> {
        &self.grid
    }

    /// `∫ ρ_B dx`, the quadrature bi-norm.
    pub fn integral_rho_b(&self) -> Complex64 {
        self.grid
            .rule()
            .integrate(&self.rho_b)
            .expect("frame length matches its grid")
    }

    pub fn integral_rho(&self) -> f64 {
        self.grid
            .rule()
            .integrate_real(&self.rho)
            .expect("frame length matches its grid")
    }
}

/// Evolves to `t` and evaluates `ρ, J, ρ_B, J_B` with analytic derivatives.
pub fn density_current_frame(
    coeffs: &CoefficientVector,
    basis: &BasisSet,
    t: f64,
) -> Result<DensityCurrentFrame> {
    check_fits(coeffs, basis)?;
    let evolved = evolve(coeffs, t);
    let grid = basis.grid();
    let r = evolved.offset;
    let c = &evolved.coefficients;
    let d = &evolved.dual_coefficients;

    let phi = combine(grid, c, basis.states()[r..].iter(), false);
    let dphi = combine(grid, c, basis.derivatives()[r..].iter(), false);
    let dual = combine(grid, d, basis.duals()[r..].iter(), false);
    // ψ̄ = ψ*, so ∂ₓψ̄ = (∂ₓψ)*.
    let ddual = combine(grid, d, basis.derivatives()[r..].iter(), true);

    let i_unit = Complex64::new(0.0, 1.0);
    let n = grid.len();
    let mut rho_b = Vec::with_capacity(n);
    let mut current_b = Vec::with_capacity(n);
    let mut rho = Vec::with_capacity(n);
    let mut current = Vec::with_capacity(n);
    for j in 0..n {
        let dual_conj = dual[j].conj();
        rho_b.push(dual_conj * phi[j]);
        current_b.push(i_unit * (phi[j] * ddual[j].conj() - dual_conj * dphi[j]));
        rho.push(phi[j].norm_sqr());
        current.push(2.0 * (phi[j].conj() * dphi[j]).im);
    }
    Ok(DensityCurrentFrame {
        time: t,
        rho_b,
        current_b,
        rho,
        current,
        grid: Arc::clone(grid),
    })
}

/// Pointwise residuals of both continuity laws.
#[derive(Debug, Clone, PartialEq)]
pub struct ContinuityResiduals {
    /// `∂ₓJ_B + ∂ₜρ_B`
    pub biorthogonal: Vec<Complex64>,
    /// `∂ₓJ + ∂ₜρ − 2 Im(V) ρ`
    pub conventional: Vec<f64>,
    pub current_b_divergence: Vec<Complex64>,
    pub current_divergence: Vec<f64>,
    /// `2 Im(V) ρ`
    pub source: Vec<f64>,
}

impl ContinuityResiduals {
    /// `max|R_B| / max|∂ₓJ_B|`
    pub fn relative_biorthogonal(&self) -> f64 {
        max_abs(self.biorthogonal.iter().map(|v| v.norm()))
            / max_abs(self.current_b_divergence.iter().map(|v| v.norm()))
    }

    /// `max|R| / max|∂ₓJ|`
    pub fn relative_conventional(&self) -> f64 {
        max_abs(self.conventional.iter().map(|v| v.abs()))
            / max_abs(self.current_divergence.iter().map(|v| v.abs()))
    }

    pub fn max_current_b_divergence(&self) -> f64 {
        max_abs(self.current_b_divergence.iter().map(|v| v.norm()))
    }

    pub fn max_current_divergence(&self) -> f64 {
        max_abs(self.current_divergence.iter().map(|v| v.abs()))
    }

    pub fn max_biorthogonal(&self) -> f64 {
        max_abs(self.biorthogonal.iter().map(|v| v.norm()))
    }

    pub fn max_conventional(&self) -> f64 {
        max_abs(self.conventional.iter().map(|v| v.abs()))
    }
}

fn max_abs(values: impl Iterator<Item = f64>) -> f64 {
    values.fold(0.0, f64::max)
}

/// Fourth-order central difference, lower order near the ends.
fn spatial_derivative<T>(values: &[T], h: f64) -> Vec<T>
where
    T: Copy
        + std::ops::Add<Output = T>
        + std::ops::Sub<Output = T>
        + std::ops::Mul<f64, Output = T>,
{
    let n = values.len();
    let f = values;
    (0..n)
        .map(|i| {
            if i == 0 {
                (f[1] * 4.0 - f[0] * 3.0 - f[2]) * (0.5 / h)
            } else if i == n - 1 {
                (f[n - 1] * 3.0 - f[n - 2] * 4.0 + f[n - 3]) * (0.5 / h)
            } else if i == 1 || i == n - 2 {
                (f[i + 1] - f[i - 1]) * (0.5 / h)
            } else {
                ((f[i + 1] - f[i - 1]) * 8.0 - (f[i + 2] - f[i - 2])) * (1.0 / (12.0 * h))
            }
        })
        .collect()
}

/// Residuals at `t`, with `∂ₜ` by central differences over `±dt`.
pub fn continuity_residuals(
    coeffs: &CoefficientVector,
    basis: &BasisSet,
    t: f64,
    dt: f64,
) -> Result<ContinuityResiduals> {
    if !(dt > 0.0) {
        return Err(Error::Argument(format!("dt must be positive, got {dt}")));
    }
    let now = density_current_frame(coeffs, basis, t)?;
    let later = density_current_frame(coeffs, basis, t + dt)?;
    let earlier = density_current_frame(coeffs, basis, t - dt)?;
    let h = basis.grid().step();

    let div_b = spatial_derivative(&now.current_b, h);
    let div = spatial_derivative(&now.current, h);
    let inv = 0.5 / dt;
    let params = basis.params();

    let mut biorthogonal = Vec::with_capacity(div.len());
    let mut conventional = Vec::with_capacity(div.len());
    let mut source = Vec::with_capacity(div.len());
    for i in 0..div.len() {
        let drho_b = (later.rho_b[i] - earlier.rho_b[i]) * inv;
        let drho = (later.rho[i] - earlier.rho[i]) * inv;
        let s = 2.0 * params.potential_value(basis.grid().node(i)).im * now.rho[i];
        biorthogonal.push(div_b[i] + drho_b);
        conventional.push(div[i] + drho - s);
        source.push(s);
    }
    Ok(ContinuityResiduals {
        biorthogonal,
        conventional,
        current_b_divergence: div_b,
        current_divergence: div,
        source,
    })
}

/// `|⟨PACS_r(z)|φ_P⟩|²` in the oscillator Fock basis, where
/// `PACS_r(z) ∝ (a†)ʳ|z⟩` has amplitudes `∝ zᵏ √((k+r)!) / k!` on `|k+r⟩`.
pub fn photon_added_fidelity(spec: &PoissonSpec) -> f64 {
    let poisson = poisson_coefficients(spec);
    let r = spec.r as u64;
    let modulus = spec.z.norm();
    // The PACS tail is heavier than the Poisson one; extend it generously.
    let extent = spec.truncation + 10 * spec.r + 40;
    let pacs: Vec<Complex64> = (0..=extent as u64)
        .map(|k| {
            if modulus == 0.0 {
                return Complex64::new(if k == 0 { 1.0 } else { 0.0 }, 0.0);
            }
            let ln_mag = k as f64 * modulus.ln() + 0.5 * ln_factorial(k + r) - ln_factorial(k);
            Complex64::from_polar(ln_mag.exp(), k as f64 * spec.z.arg())
        })
        .collect();
    let norm: f64 = pacs.iter().map(|c| c.norm_sqr()).sum();
    let overlap = pacs
        .iter()
        .zip(poisson.coefficients())
        .fold(Complex64::new(0.0, 0.0), |acc, (d, c)| acc + d.conj() * c);
    overlap.norm_sqr() / norm
}
