//! Closed-form bi-orthogonal eigenbasis on a uniform grid.
//!
//! `ψ₀ = κ₀ α⁻¹ exp(iλ∫₀ˣ α⁻²)` and
//! `ψₙ₊₁ = [2(n+1)]^{−1/2} (d/dx − α'/α + iλα⁻²) φₙ`, with duals
//! `ψ̄ₙ = ψₙ*` and energies `Eₙ = 2n − 1`. Spatial derivatives of every
//! state are produced alongside the values from the Hermite ladder
//! identities, never by differencing.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;
use std::sync::Arc;

use crate::potential::PotentialParams;
use crate::specfun::{build_rule, cumulative_integral, normalized_hermite_into, QuadratureRule};
use crate::{Error, Result};

/// Highest eigen-index a basis may carry.
pub const MAX_BASIS_INDEX: usize = 60;

/// Default node spacing.
pub const DEFAULT_STEP: f64 = 0.01;

/// Uniform grid `xᵢ = (i − m)·h`, symmetric about 0 with `2m + 1` nodes.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpatialGrid {
    step: f64,
    half_count: usize,
    #[serde(skip)]
    rule: QuadratureRule,
}

impl SpatialGrid {
    /// The half-width is rounded up to a whole number of steps.
    pub fn new(extent: f64, step: f64) -> Result<Self> {
        if !(step > 0.0) || !step.is_finite() || !(extent > 0.0) || !extent.is_finite() {
            return Err(Error::Argument(format!(
                "grid needs positive extent and step, got extent = {extent}, step = {step}"
            )));
        }
        let half_count = ((extent / step) * (1.0 - 1e-12)).ceil().max(4.0) as usize;
        let rule = build_rule(half_count as f64 * step, 2 * half_count + 1)?;
        Ok(Self {
            step,
            half_count,
            rule,
        })
    }

    /// Default extent `√(2E) + 8` clamped to `[10, 40]`, `E = 2m + 1`, step 0.01.
    pub fn default_for_level(highest_level: usize) -> Self {
        Self::new(default_extent(highest_level), DEFAULT_STEP).expect("valid default grid")
    }

    pub fn extent(&self) -> f64 {
        self.half_count as f64 * self.step
    }

    pub fn step(&self) -> f64 {
        self.step
    }

    pub fn len(&self) -> usize {
        2 * self.half_count + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Index of `x = 0`.
    pub fn center(&self) -> usize {
        self.half_count
    }

    pub fn node(&self, i: usize) -> f64 {
        (i as f64 - self.half_count as f64) * self.step
    }

    pub fn nodes(&self) -> Vec<f64> {
        (0..self.len()).map(|i| self.node(i)).collect()
    }

    pub fn rule(&self) -> &QuadratureRule {
        &self.rule
    }

    /// Fails when oscillator level `level` has its turning point beyond 0.8·L.
    pub fn check_level(&self, level: usize) -> Result<()> {
        let turning_point = (2.0 * level as f64 + 1.0).sqrt();
        if turning_point > 0.8 * self.extent() {
            return Err(Error::Resolution {
                level,
                turning_point,
                extent: self.extent(),
            });
        }
        Ok(())
    }
}

pub fn default_extent(highest_level: usize) -> f64 {
    let energy = 2.0 * highest_level as f64 + 1.0;
    ((2.0 * energy).sqrt() + 8.0).clamp(10.0, 40.0)
}

/// Complex amplitudes sampled on a [`SpatialGrid`].
#[derive(Debug, Clone, PartialEq)]
pub struct WaveField {
    grid: Arc<SpatialGrid>,
    amplitudes: Vec<Complex64>,
}

impl WaveField {
    pub fn new(grid: Arc<SpatialGrid>, amplitudes: Vec<Complex64>) -> Result<Self> {
        if amplitudes.len() != grid.len() {
            return Err(Error::LengthMismatch {
                expected: grid.len(),
                found: amplitudes.len(),
            });
        }
        if let Some(i) = amplitudes.iter().position(|v| !v.is_finite()) {
            return Err(Error::Consistency(format!(
                "non-finite amplitude at node {i} (x = {})",
                grid.node(i)
            )));
        }
        Ok(Self { grid, amplitudes })
    }

    pub fn zeros(grid: Arc<SpatialGrid>) -> Self {
        let amplitudes = vec![Complex64::new(0.0, 0.0); grid.len()];
        Self { grid, amplitudes }
    }

    pub fn from_real(grid: Arc<SpatialGrid>, values: &[f64]) -> Result<Self> {
        Self::new(grid, values.iter().map(|&v| Complex64::new(v, 0.0)).collect())
    }

    pub fn grid(&self) -> &Arc<SpatialGrid> {
        &self.grid
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn into_amplitudes(self) -> Vec<Complex64> {
        self.amplitudes
    }

    pub fn conj(&self) -> Self {
        Self {
            grid: Arc::clone(&self.grid),
            amplitudes: self.amplitudes.iter().map(|v| v.conj()).collect(),
        }
    }

    /// `∫ f dx`.
    pub fn integral(&self) -> Complex64 {
        self.grid
            .rule()
            .integrate(&self.amplitudes)
            .expect("field length matches its grid")
    }

    /// The bi-product `∫ f g dx` (no conjugation).
    pub fn biproduct(&self, other: &WaveField) -> Result<Complex64> {
        self.check_same_grid(other)?;
        Ok(weighted_sum(self.grid.rule(), |i| {
            self.amplitudes[i] * other.amplitudes[i]
        }))
    }

    /// `∫ f* g dx`.
    pub fn inner(&self, other: &WaveField) -> Result<Complex64> {
        self.check_same_grid(other)?;
        Ok(weighted_sum(self.grid.rule(), |i| {
            self.amplitudes[i].conj() * other.amplitudes[i]
        }))
    }

    /// `∫ |f|² dx`.
    pub fn norm_sqr(&self) -> f64 {
        let rule = self.grid.rule();
        rule.weights()
            .iter()
            .zip(&self.amplitudes)
            .map(|(w, v)| w * v.norm_sqr())
            .sum()
    }

    fn check_same_grid(&self, other: &WaveField) -> Result<()> {
        if Arc::ptr_eq(&self.grid, &other.grid) || self.grid == other.grid {
            Ok(())
        } else {
            Err(Error::Argument(
                "fields live on different grids".to_string(),
            ))
        }
    }
}

fn weighted_sum(rule: &QuadratureRule, f: impl Fn(usize) -> Complex64) -> Complex64 {
    rule.weights()
        .iter()
        .enumerate()
        .fold(Complex64::new(0.0, 0.0), |acc, (i, w)| acc + f(i) * w)
}

/// `φ_k(xᵢ)` for `k ≤ max_level`, stored level-major.
struct HermiteTable {
    levels: Vec<Vec<f64>>,
}

impl HermiteTable {
    fn new(grid: &SpatialGrid, max_level: usize) -> Self {
        let mut levels = vec![vec![0.0; grid.len()]; max_level + 1];
        let mut buf = vec![0.0; max_level + 1];
        for i in 0..grid.len() {
            normalized_hermite_into(grid.node(i), &mut buf);
            for (k, v) in buf.iter().enumerate() {
                levels[k][i] = *v;
            }
        }
        Self { levels }
    }

    fn level(&self, k: usize) -> &[f64] {
        &self.levels[k]
    }
}

/// Pointwise pieces of `β = α'/α − iλα⁻²` shared by all states.
struct Auxiliary {
    inverse_alpha: Vec<f64>,
    inverse_alpha_sq: Vec<f64>,
    beta: Vec<Complex64>,
    beta_prime: Vec<Complex64>,
}

impl Auxiliary {
    fn new(params: &PotentialParams, grid: &SpatialGrid) -> Self {
        let n = grid.len();
        let mut aux = Self {
            inverse_alpha: Vec::with_capacity(n),
            inverse_alpha_sq: Vec::with_capacity(n),
            beta: Vec::with_capacity(n),
            beta_prime: Vec::with_capacity(n),
        };
        for i in 0..n {
            let x = grid.node(i);
            let ia2 = params.inverse_alpha_squared(x);
            let ld = params.alpha_log_derivative(x);
            let ldp = params.alpha_log_derivative_prime(x);
            aux.inverse_alpha.push(params.inverse_alpha(x));
            aux.inverse_alpha_sq.push(ia2);
            aux.beta.push(Complex64::new(ld, -params.lambda * ia2));
            aux.beta_prime
                .push(Complex64::new(ldp, 2.0 * params.lambda * ia2 * ld));
        }
        aux
    }
}

/// Values and first derivatives of one state.
struct Sampled {
    value: Vec<Complex64>,
    derivative: Vec<Complex64>,
}

fn sample_ground(
    params: &PotentialParams,
    grid: &SpatialGrid,
    aux: &Auxiliary,
) -> Result<(Sampled, Complex64)> {
    let phase = cumulative_integral(&aux.inverse_alpha_sq, grid.step(), grid.center())?;
    let raw: Vec<Complex64> = aux
        .inverse_alpha
        .iter()
        .zip(&phase)
        .map(|(&ia, &f)| Complex64::from_polar(ia, params.lambda * f))
        .collect();
    let squares: Vec<Complex64> = raw.iter().map(|v| v * v).collect();
    let bi_norm = grid.rule().integrate(&squares)?;
    if bi_norm.norm() < 1e-12 {
        return Err(Error::DegenerateNormalization(format!(
            "ground-state bi-norm integral is {bi_norm}"
        )));
    }
    let kappa = bi_norm.inv().sqrt();
    let value: Vec<Complex64> = raw.iter().map(|v| v * kappa).collect();
    let derivative = value
        .iter()
        .zip(&aux.beta)
        .map(|(v, b)| -b * v)
        .collect();
    Ok((Sampled { value, derivative }, kappa))
}

fn sample_excited(n: usize, grid: &SpatialGrid, aux: &Auxiliary, table: &HermiteTable) -> Sampled {
    let nf = n as f64;
    let norm = 1.0 / (2.0 * (nf + 1.0)).sqrt();
    let phi = table.level(n);
    let up = table.level(n + 1);
    let down = (n > 0).then(|| table.level(n - 1));
    let mut value = Vec::with_capacity(grid.len());
    let mut derivative = Vec::with_capacity(grid.len());
    for i in 0..grid.len() {
        let x = grid.node(i);
        let below = down.map_or(0.0, |d| d[i]);
        let dphi = (nf.sqrt() * below - (nf + 1.0).sqrt() * up[i]) / std::f64::consts::SQRT_2;
        let ddphi = (x * x - (2.0 * nf + 1.0)) * phi[i];
        let beta = aux.beta[i];
        value.push((dphi - beta * phi[i]) * norm);
        derivative.push((ddphi - aux.beta_prime[i] * phi[i] - beta * dphi) * norm);
    }
    Sampled { value, derivative }
}

/// Oscillator eigenfunction `φₙ` on the grid.
pub fn oscillator_state(n: usize, grid: &Arc<SpatialGrid>) -> Result<WaveField> {
    grid.check_level(n)?;
    let mut buf = vec![0.0; n + 1];
    let values = (0..grid.len())
        .map(|i| {
            normalized_hermite_into(grid.node(i), &mut buf);
            Complex64::new(buf[n], 0.0)
        })
        .collect();
    WaveField::new(Arc::clone(grid), values)
}

/// `ψ₀`, bi-normalized with `κ₀ = (∫ α⁻² e^{2iλF})^{−1/2}` (principal root).
pub fn ground_state(params: &PotentialParams, grid: &Arc<SpatialGrid>) -> Result<WaveField> {
    let params = params.validate()?;
    let aux = Auxiliary::new(&params, grid);
    let (sampled, _) = sample_ground(&params, grid, &aux)?;
    WaveField::new(Arc::clone(grid), sampled.value)
}

/// `ψₙ₊₁` built from `φₙ`.
pub fn excited_state(params: &PotentialParams, n: usize, grid: &Arc<SpatialGrid>) -> Result<WaveField> {
    let params = params.validate()?;
    grid.check_level(n + 1)?;
    let aux = Auxiliary::new(&params, grid);
    let table = HermiteTable::new(grid, n + 1);
    WaveField::new(Arc::clone(grid), sample_excited(n, grid, &aux, &table).value)
}

/// `ψ₀ … ψ_N` with their duals, derivatives and energies.
#[derive(Debug, Clone)]
pub struct BasisSet {
    params: PotentialParams,
    grid: Arc<SpatialGrid>,
    states: Vec<WaveField>,
    duals: Vec<WaveField>,
    derivatives: Vec<WaveField>,
    energies: Vec<f64>,
    kappa0: Complex64,
}

/// Builds `ψ₀ … ψ_{highest}` on `grid`.
pub fn build_basis(params: &PotentialParams, highest: usize, grid: &Arc<SpatialGrid>) -> Result<BasisSet> {
    let params = params.validate()?;
    if highest > MAX_BASIS_INDEX {
        return Err(Error::BasisSize {
            required: highest + 1,
            available: MAX_BASIS_INDEX + 1,
        });
    }
    grid.check_level(highest)?;
    let aux = Auxiliary::new(&params, grid);
    let table = HermiteTable::new(grid, highest.max(1));
    let (ground, kappa0) = sample_ground(&params, grid, &aux)?;
    let excited: Vec<Sampled> = (0..highest)
        .into_par_iter()
        .map(|n| sample_excited(n, grid, &aux, &table))
        .collect();

    let mut states = Vec::with_capacity(highest + 1);
    let mut derivatives = Vec::with_capacity(highest + 1);
    for s in std::iter::once(ground).chain(excited) {
        states.push(WaveField::new(Arc::clone(grid), s.value)?);
        derivatives.push(WaveField::new(Arc::clone(grid), s.derivative)?);
    }
    let duals = states.iter().map(WaveField::conj).collect();
    let energies = (0..=highest).map(|n| 2.0 * n as f64 - 1.0).collect();
    Ok(BasisSet {
        params,
        grid: Arc::clone(grid),
        states,
        duals,
        derivatives,
        energies,
        kappa0,
    })
}

impl BasisSet {
    pub fn params(&self) -> &PotentialParams {
        &self.params
    }

    pub fn grid(&self) -> &Arc<SpatialGrid> {
        &self.grid
    }

    /// Number of states, `N + 1`.
    pub fn size(&self) -> usize {
        self.states.len()
    }

    pub fn states(&self) -> &[WaveField] {
        &self.states
    }

    pub fn duals(&self) -> &[WaveField] {
        &self.duals
    }

    /// `dψₙ/dx`.
    pub fn derivatives(&self) -> &[WaveField] {
        &self.derivatives
    }

    pub fn energies(&self) -> &[f64] {
        &self.energies
    }

    pub fn kappa0(&self) -> Complex64 {
        self.kappa0
    }

    /// `maxₙ |∫ψₙ² dx − 1|`; reported, never corrected.
    pub fn bi_norm_residual(&self) -> f64 {
        self.states
            .iter()
            .map(|s| (s.biproduct(s).expect("shared grid") - 1.0).norm())
            .fold(0.0, f64::max)
    }
}

/// `G[m][n] = ∫ ψₘ ψₙ dx`.
pub fn gram_matrix(basis: &BasisSet) -> Vec<Vec<Complex64>> {
    let states = basis.states();
    (0..states.len())
        .into_par_iter()
        .map(|m| {
            states
                .iter()
                .map(|s| states[m].biproduct(s).expect("shared grid"))
                .collect()
        })
        .collect()
}

/// `D[n][m] = ∫ ψ̄ₙ* ψₘ dx`, the same pairing written through the duals.
pub fn dual_gram_matrix(basis: &BasisSet) -> Vec<Vec<Complex64>> {
    let (duals, states) = (basis.duals(), basis.states());
    (0..duals.len())
        .into_par_iter()
        .map(|n| {
            states
                .iter()
                .map(|s| duals[n].inner(s).expect("shared grid"))
                .collect()
        })
        .collect()
}

/// `max |G − I|` over all entries.
pub fn identity_deviation(matrix: &[Vec<Complex64>]) -> f64 {
    matrix
        .iter()
        .enumerate()
        .flat_map(|(m, row)| {
            row.iter()
                .enumerate()
                .map(move |(n, v)| (v - if m == n { 1.0 } else { 0.0 }).norm())
        })
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn grid(level: usize) -> Arc<SpatialGrid> {
        Arc::new(SpatialGrid::default_for_level(level))
    }

    #[test]
    fn grid_shape() {
        let g = SpatialGrid::new(10.0, 0.01).unwrap();
        assert_eq!(g.len(), 2001);
        assert_eq!(g.node(g.center()), 0.0);
        assert_eq!(g.node(0), -g.node(g.len() - 1));
        assert!((g.extent() - 10.0).abs() < 1e-12);
        let rounded = SpatialGrid::new(10.003, 0.01).unwrap();
        assert!((rounded.extent() - 10.01).abs() < 1e-12);
    }

    #[test]
    fn default_extent_clamps() {
        assert_eq!(default_extent(0), 10.0);
        assert!((default_extent(12) - (50f64.sqrt() + 8.0)).abs() < 1e-12);
        assert_eq!(default_extent(1000), 40.0);
    }

    #[test]
    fn resolution_error_fires() {
        let g = Arc::new(SpatialGrid::new(5.0, 0.01).unwrap());
        assert!(matches!(oscillator_state(30, &g), Err(Error::Resolution { .. })));
        assert!(oscillator_state(3, &g).is_ok());
    }

    #[test]
    fn oscillator_ground_is_gaussian() {
        let g = grid(0);
        let phi0 = oscillator_state(0, &g).unwrap();
        for (i, v) in phi0.amplitudes().iter().enumerate() {
            let x = g.node(i);
            assert!((v.re - PI.powf(-0.25) * (-0.5 * x * x).exp()).abs() < 1e-15);
        }
        let phi1 = oscillator_state(1, &g).unwrap();
        assert!(phi0.biproduct(&phi1).unwrap().norm() < 1e-10);
    }

    #[test]
    fn oscillator_norms() {
        let g = grid(60);
        for n in [0, 7, 30, 60] {
            let phi = oscillator_state(n, &g).unwrap();
            assert!((phi.norm_sqr() - 1.0).abs() < 1e-8, "n = {n}");
        }
    }

    #[test]
    fn ground_state_oscillator_limit() {
        let g = grid(0);
        let psi0 = ground_state(&PotentialParams::oscillator_limit(), &g).unwrap();
        let phi0 = oscillator_state(0, &g).unwrap();
        for (a, b) in psi0.amplitudes().iter().zip(phi0.amplitudes()) {
            assert!((a - b).norm() < 1e-12);
        }
    }

    #[test]
    fn excited_states_oscillator_limit() {
        let g = grid(12);
        let osc = PotentialParams::oscillator_limit();
        for n in 0..10 {
            let psi = excited_state(&osc, n, &g).unwrap();
            let phi = oscillator_state(n + 1, &g).unwrap();
            for (a, b) in psi.amplitudes().iter().zip(phi.amplitudes()) {
                assert!((a + b).norm() < 1e-10, "n = {n}");
            }
        }
    }

    #[test]
    fn real_states_without_lambda() {
        let g = grid(6);
        let p = PotentialParams::new(PI / 4.0, PI.sqrt() / 2.0, 1.0, 0.0).unwrap();
        let psi = excited_state(&p, 4, &g).unwrap();
        assert!(psi.amplitudes().iter().all(|v| v.im == 0.0));
    }

    #[test]
    fn derivatives_match_finite_differences() {
        let g = grid(8);
        let p = PotentialParams::with_consistent_lambda(PI / 4.0, PI.sqrt() / 2.0, 1.0).unwrap();
        let basis = build_basis(&p, 8, &g).unwrap();
        let h = g.step();
        for (state, deriv) in basis.states().iter().zip(basis.derivatives()) {
            let v = state.amplitudes();
            let d = deriv.amplitudes();
            let worst = (2..v.len() - 2)
                .map(|i| {
                    let fd = (-v[i + 2] + 8.0 * v[i + 1] - 8.0 * v[i - 1] + v[i - 2]) / (12.0 * h);
                    (fd - d[i]).norm()
                })
                .fold(0.0, f64::max);
            assert!(worst < 1e-6, "worst = {worst}");
        }
    }

    #[test]
    fn basis_energies() {
        let g = grid(3);
        let b = build_basis(&PotentialParams::oscillator_limit(), 3, &g).unwrap();
        assert_eq!(b.energies(), &[-1.0, 1.0, 3.0, 5.0]);
        let b0 = build_basis(&PotentialParams::oscillator_limit(), 0, &g).unwrap();
        assert_eq!(b0.size(), 1);
        assert_eq!(b0.energies(), &[-1.0]);
    }

    #[test]
    fn basis_ceiling() {
        let g = grid(61);
        assert!(matches!(
            build_basis(&PotentialParams::oscillator_limit(), 61, &g),
            Err(Error::BasisSize { .. })
        ));
    }

    #[test]
    fn oscillator_gram_is_identity() {
        let g = grid(5);
        let b = build_basis(&PotentialParams::oscillator_limit(), 5, &g).unwrap();
        assert!(identity_deviation(&gram_matrix(&b)) < 1e-10);
    }

    #[test]
    fn dual_pairing_matches_gram() {
        let g = grid(6);
        let p = PotentialParams::with_consistent_lambda(PI / 4.0, PI.sqrt() / 2.0, 1.0).unwrap();
        let b = build_basis(&p, 6, &g).unwrap();
        let gram = gram_matrix(&b);
        let dual = dual_gram_matrix(&b);
        for (r1, r2) in gram.iter().zip(&dual) {
            for (a, c) in r1.iter().zip(r2) {
                assert!((a - c).norm() < 1e-14);
            }
        }
    }

    #[test]
    fn duals_are_conjugates() {
        let g = grid(2);
        let p = PotentialParams::with_consistent_lambda(PI / 4.0, PI.sqrt() / 2.0, 1.0).unwrap();
        let b = build_basis(&p, 2, &g).unwrap();
        for (s, d) in b.states().iter().zip(b.duals()) {
            for (a, c) in s.amplitudes().iter().zip(d.amplitudes()) {
                assert_eq!(a.conj(), *c);
            }
        }
    }
}
