//! Wigner maps `W(x,p) = (1/π) ∫ φ*(x+y) φ(x−y) e^{2ipy} dy` of
//! oscillator-limit states, computed two independent ways.
//!
//! The quadrature path works on any normalized [`WaveField`]; its x nodes
//! must sit on the field's grid so that `x ± y` never needs interpolation.
//! The closed-form path expands `Σ cₖ φ_{k+r}` over Fock-state cross
//! Wigner functions (associated Laguerre polynomials).

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;
use std::f64::consts::{FRAC_1_PI, SQRT_2};
use std::sync::Arc;

use crate::eigenstates::{SpatialGrid, WaveField};
use crate::specfun::{ln_factorial, normalized_hermite_into};
use crate::states::CoefficientVector;
use crate::{Error, Result};

const MIN_COUNT: usize = 32;
const DEFAULT_COUNT: usize = 201;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PhaseSpaceGrid {
    pub x_extent: f64,
    pub p_extent: f64,
    pub x_count: usize,
    pub p_count: usize,
}

impl PhaseSpaceGrid {
    pub fn new(x_extent: f64, p_extent: f64, x_count: usize, p_count: usize) -> Result<Self> {
        if !(x_extent > 0.0) || !(p_extent > 0.0) || !x_extent.is_finite() || !p_extent.is_finite() {
            return Err(Error::Argument(format!(
                "phase-space extents must be positive, got {x_extent}, {p_extent}"
            )));
        }
        if x_count < MIN_COUNT || p_count < MIN_COUNT {
            return Err(Error::Argument(format!(
                "phase-space counts must be >= {MIN_COUNT}, got {x_count} x {p_count}"
            )));
        }
        Ok(Self {
            x_extent,
            p_extent,
            x_count,
            p_count,
        })
    }

    /// Like [`new`](Self::new), with `x_extent` grown so the x spacing is a
    /// whole number of `spatial_step`s. `x_count` must be odd.
    pub fn aligned(
        spatial_step: f64,
        x_extent: f64,
        p_extent: f64,
        x_count: usize,
        p_count: usize,
    ) -> Result<Self> {
        if x_count % 2 == 0 {
            return Err(Error::Argument(format!(
                "aligned grids need an odd x count, got {x_count}"
            )));
        }
        let half = ((x_count.max(3) - 1) / 2) as f64;
        let spacing = ((x_extent / half) / spatial_step * (1.0 - 1e-12)).ceil().max(1.0) * spatial_step;
        Self::new(spacing * half, p_extent, x_count, p_count)
    }

    /// Window `√(2E) + 3` in both directions, 201 × 201 nodes.
    pub fn default_for_energy(max_energy: f64, spatial_step: f64) -> Result<Self> {
        let extent = (2.0 * max_energy.max(0.0)).sqrt() + 3.0;
        Self::aligned(spatial_step, extent, extent, DEFAULT_COUNT, DEFAULT_COUNT)
    }

    pub fn x_step(&self) -> f64 {
        2.0 * self.x_extent / (self.x_count - 1) as f64
    }

    pub fn p_step(&self) -> f64 {
        2.0 * self.p_extent / (self.p_count - 1) as f64
    }

    pub fn x(&self, i: usize) -> f64 {
        -self.x_extent + i as f64 * self.x_step()
    }

    pub fn p(&self, j: usize) -> f64 {
        -self.p_extent + j as f64 * self.p_step()
    }

    pub fn x_nodes(&self) -> Vec<f64> {
        (0..self.x_count).map(|i| self.x(i)).collect()
    }

    pub fn p_nodes(&self) -> Vec<f64> {
        (0..self.p_count).map(|j| self.p(j)).collect()
    }
}

/// `W(xᵢ, pⱼ)` stored row-major in x.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WignerField {
    pub grid: PhaseSpaceGrid,
    pub values: Vec<f64>,
    pub description: String,
}

impl WignerField {
    pub fn value(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.grid.p_count + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.values[i * self.grid.p_count..(i + 1) * self.grid.p_count]
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// `max |self − other|` over a shared grid.
    pub fn max_difference(&self, other: &WignerField) -> Result<f64> {
        if self.grid != other.grid {
            return Err(Error::Argument("Wigner fields on different grids".into()));
        }
        Ok(self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max))
    }
}

/// `Σ cₖ φ_{k+r}` on `grid`: the packet in the oscillator limit `ψₖ → φₖ`.
pub fn fock_superposition(coeffs: &CoefficientVector, grid: &Arc<SpatialGrid>) -> Result<WaveField> {
    let top = coeffs.highest_level();
    grid.check_level(top)?;
    let r = coeffs.offset();
    let mut buf = vec![0.0; top + 1];
    let amplitudes = (0..grid.len())
        .map(|i| {
            normalized_hermite_into(grid.node(i), &mut buf);
            coeffs
                .coefficients()
                .iter()
                .enumerate()
                .fold(Complex64::new(0.0, 0.0), |acc, (k, c)| acc + c * buf[k + r])
        })
        .collect();
    WaveField::new(Arc::clone(grid), amplitudes)
}

/// Quadrature over `y` with the composite Simpson rule on the field's own grid.
pub fn wigner_by_quadrature(field: &WaveField, grid: &PhaseSpaceGrid) -> Result<WignerField> {
    let norm = field.norm_sqr();
    if (norm - 1.0).abs() > 1e-6 {
        return Err(Error::Normalization(norm));
    }
    let spatial = field.grid();
    let h = spatial.step();
    let half = spatial.center();
    let phi = field.amplitudes();

    let mut shifts = Vec::with_capacity(grid.x_count);
    for i in 0..grid.x_count {
        let x = grid.x(i);
        let s = (x / h).round();
        if (s * h - x).abs() > 1e-9 * h.max(x.abs()) || s.abs() as usize >= half {
            return Err(Error::Argument(format!(
                "phase-space node x = {x} is not an interior node of the spatial grid (step {h})"
            )));
        }
        shifts.push(s as i64);
    }

    // e^{2ipⱼ yₘ} for yₘ = m h, m ≥ 0.
    let phases: Vec<Vec<Complex64>> = (0..grid.p_count)
        .map(|j| {
            let p = grid.p(j);
            (0..=half)
                .map(|m| Complex64::from_polar(1.0, 2.0 * p * m as f64 * h))
                .collect()
        })
        .collect();

    let rows: Vec<Result<Vec<f64>>> = shifts
        .par_iter()
        .map(|&s| {
            let centre = half as i64 + s;
            let span = (half as i64 - s.abs()) as usize;
            // f(y) = φ*(x+y) φ(x−y) with Simpson weights, m = −span ..= span.
            let terms: Vec<Complex64> = (0..=2 * span)
                .map(|idx| {
                    let m = idx as i64 - span as i64;
                    let w = if idx == 0 || idx == 2 * span {
                        1.0
                    } else if idx % 2 == 1 {
                        4.0
                    } else {
                        2.0
                    };
                    let plus = phi[(centre + m) as usize];
                    let minus = phi[(centre - m) as usize];
                    plus.conj() * minus * (w * h / 3.0)
                })
                .collect();
            let mut row = Vec::with_capacity(grid.p_count);
            for table in &phases {
                let mut acc = Complex64::new(0.0, 0.0);
                for (idx, term) in terms.iter().enumerate() {
                    let m = idx as i64 - span as i64;
                    let e = table[m.unsigned_abs() as usize];
                    acc += term * if m < 0 { e.conj() } else { e };
                }
                let value = acc * FRAC_1_PI;
                if value.im.abs() > 1e-8 {
                    return Err(Error::Consistency(format!(
                        "Wigner integrand left an imaginary residue of {}",
                        value.im
                    )));
                }
                row.push(value.re);
            }
            Ok(row)
        })
        .collect();

    let mut values = Vec::with_capacity(grid.x_count * grid.p_count);
    for row in rows {
        values.extend(row?);
    }
    Ok(WignerField {
        grid: *grid,
        values,
        description: "quadrature".to_string(),
    })
}

/// `W = Σ_{m,n} cₘ* cₙ W_{mn}` with, for `m ≥ n`,
/// `W_{mn} = ((−1)ⁿ/π) √(n!/m!) (√2 (x+ip))^{m−n} e^{−(x²+p²)} L_n^{(m−n)}(2(x²+p²))`
/// and `W_{nm} = W_{mn}*`.
pub fn wigner_by_closed_form(coeffs: &CoefficientVector, grid: &PhaseSpaceGrid) -> WignerField {
    let r = coeffs.offset();
    let top = coeffs.highest_level();
    let c = coeffs.coefficients();
    let ln_fact: Vec<f64> = (0..=top as u64).map(ln_factorial).collect();

    let point = |x: f64, p: f64| -> f64 {
        let rho2 = x * x + p * p;
        let t = 2.0 * rho2;
        let ln_radius = (SQRT_2 * rho2.sqrt()).ln();
        let theta = p.atan2(x);
        let mut total = 0.0;
        for diff in 0..=(top - r) {
            let rotation = Complex64::from_polar(1.0, theta * diff as f64);
            // Laguerre L_j^{(diff)}(t), j = 0, 1, ...
            let mut l_prev = 0.0;
            let mut l_cur = 1.0;
            for n in 0..=(top - diff) {
                if n > 0 {
                    let j = (n - 1) as f64;
                    let k = diff as f64;
                    let next = ((2.0 * j + 1.0 + k - t) * l_cur - (j + k) * l_prev) / (j + 1.0);
                    l_prev = l_cur;
                    l_cur = next;
                }
                if n < r {
                    continue;
                }
                let m = n + diff;
                let magnitude = if diff == 0 {
                    (-rho2).exp()
                } else if rho2 == 0.0 {
                    0.0
                } else {
                    (-rho2 + diff as f64 * ln_radius + 0.5 * (ln_fact[n] - ln_fact[m])).exp()
                };
                let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
                let w_mn = rotation * (sign * magnitude * l_cur * FRAC_1_PI);
                let weight = c[m - r].conj() * c[n - r];
                total += if diff == 0 {
                    (weight * w_mn).re
                } else {
                    2.0 * (weight * w_mn).re
                };
            }
        }
        total
    };

    let values: Vec<f64> = (0..grid.x_count)
        .into_par_iter()
        .flat_map_iter(|i| {
            let x = grid.x(i);
            (0..grid.p_count).map(move |j| point(x, grid.p(j)))
        })
        .collect();
    WignerField {
        grid: *grid,
        values,
        description: "closed form".to_string(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ClassicalityReport {
    pub min_value: f64,
    pub min_location: (f64, f64),
    /// `Σ max(0, −W) ΔxΔp`
    pub negative_volume: f64,
}

pub fn classicality_report(w: &WignerField) -> ClassicalityReport {
    let mut min_value = f64::INFINITY;
    let mut min_location = (0.0, 0.0);
    let mut negative = 0.0;
    for i in 0..w.grid.x_count {
        for j in 0..w.grid.p_count {
            let v = w.value(i, j);
            if v < min_value {
                min_value = v;
                min_location = (w.grid.x(i), w.grid.p(j));
            }
            negative += (-v).max(0.0);
        }
    }
    ClassicalityReport {
        min_value,
        min_location,
        negative_volume: negative * w.grid.x_step() * w.grid.p_step(),
    }
}

/// `(∫W dp over x nodes, ∫W dx over p nodes)` by the trapezoid rule.
pub fn marginals(w: &WignerField) -> (Vec<f64>, Vec<f64>) {
    let g = &w.grid;
    let trapezoid = |values: &mut dyn Iterator<Item = f64>, count: usize, step: f64| -> f64 {
        values
            .enumerate()
            .map(|(k, v)| if k == 0 || k == count - 1 { 0.5 * v } else { v })
            .sum::<f64>()
            * step
    };
    let position = (0..g.x_count)
        .map(|i| trapezoid(&mut w.row(i).iter().copied(), g.p_count, g.p_step()))
        .collect();
    let momentum = (0..g.p_count)
        .map(|j| trapezoid(&mut (0..g.x_count).map(|i| w.value(i, j)), g.x_count, g.x_step()))
        .collect();
    (position, momentum)
}

/// Mean and variance of a sampled marginal, trapezoid-weighted.
pub fn marginal_moments(nodes: &[f64], density: &[f64]) -> (f64, f64) {
    let n = nodes.len();
    let weight = |k: usize| if k == 0 || k == n - 1 { 0.5 } else { 1.0 };
    let mass: f64 = (0..n).map(|k| weight(k) * density[k]).sum();
    let mean: f64 = (0..n).map(|k| weight(k) * density[k] * nodes[k]).sum::<f64>() / mass;
    let var: f64 = (0..n)
        .map(|k| weight(k) * density[k] * (nodes[k] - mean).powi(2))
        .sum::<f64>()
        / mass;
    (mean, var)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eigenstates::oscillator_state;
    use std::f64::consts::PI;

    fn small_grid(step: f64) -> PhaseSpaceGrid {
        PhaseSpaceGrid::aligned(step, 4.0, 4.0, 41, 41).unwrap()
    }

    #[test]
    fn aligned_grid_spacing_is_whole_steps() {
        let g = PhaseSpaceGrid::aligned(0.01, 6.33, 5.0, 201, 201).unwrap();
        let ratio = g.x_step() / 0.01;
        assert!((ratio - ratio.round()).abs() < 1e-9);
        assert!(g.x_extent >= 6.33);
        assert!(PhaseSpaceGrid::new(1.0, 1.0, 31, 40).is_err());
        assert!(PhaseSpaceGrid::aligned(0.01, 1.0, 1.0, 40, 40).is_err());
    }

    #[test]
    fn vacuum_closed_form() {
        let g = small_grid(0.01);
        let w = wigner_by_closed_form(&CoefficientVector::eigenstate(0), &g);
        for i in 0..g.x_count {
            for j in 0..g.p_count {
                let (x, p) = (g.x(i), g.p(j));
                assert!((w.value(i, j) - (-(x * x + p * p)).exp() / PI).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn rejects_unnormalized_and_misaligned() {
        let spatial = Arc::new(SpatialGrid::default_for_level(0));
        let phi = oscillator_state(0, &spatial).unwrap();
        let doubled = WaveField::new(
            Arc::clone(&spatial),
            phi.amplitudes().iter().map(|v| v * 2.0).collect(),
        )
        .unwrap();
        assert!(matches!(
            wigner_by_quadrature(&doubled, &small_grid(0.01)),
            Err(Error::Normalization(_))
        ));
        let off = PhaseSpaceGrid::new(4.003, 4.0, 41, 41).unwrap();
        assert!(matches!(
            wigner_by_quadrature(&phi, &off),
            Err(Error::Argument(_))
        ));
    }

    #[test]
    fn origin_values_of_low_levels() {
        let spatial = Arc::new(SpatialGrid::default_for_level(1));
        let g = small_grid(spatial.step());
        let centre = (g.x_count / 2, g.p_count / 2);
        for (n, expected) in [(0, FRAC_1_PI), (1, -FRAC_1_PI)] {
            let phi = oscillator_state(n, &spatial).unwrap();
            let quad = wigner_by_quadrature(&phi, &g).unwrap();
            let closed = wigner_by_closed_form(&CoefficientVector::eigenstate(n), &g);
            assert!((quad.value(centre.0, centre.1) - expected).abs() < 1e-6);
            assert!((closed.value(centre.0, centre.1) - expected).abs() < 1e-12);
        }
    }

    #[test]
    fn diagonal_terms_are_a_mixture() {
        let g = small_grid(0.01);
        let coeffs = CoefficientVector::new(
            1,
            vec![Complex64::new(0.6, 0.0), Complex64::new(0.0, 0.8)],
        );
        let diag: Vec<WignerField> = [1usize, 2]
            .iter()
            .map(|&l| wigner_by_closed_form(&CoefficientVector::eigenstate(l), &g))
            .collect();
        let zeroed = CoefficientVector::new(1, vec![Complex64::new(0.6, 0.0), Complex64::new(0.0, 0.0)]);
        let part = wigner_by_closed_form(&zeroed, &g);
        for k in 0..part.values.len() {
            assert!((part.values[k] - 0.36 * diag[0].values[k]).abs() < 1e-15);
        }
        let full = wigner_by_closed_form(&coeffs, &g);
        let cell = g.x_step() * g.p_step();
        let mut cross_total = 0.0;
        let mut cross_max: f64 = 0.0;
        for k in 0..full.values.len() {
            let cross = full.values[k] - (0.36 * diag[0].values[k] + 0.64 * diag[1].values[k]);
            cross_total += cross * cell;
            cross_max = cross_max.max(cross.abs());
        }
        // Interference terms carry no probability mass but are not zero.
        assert!(cross_total.abs() < 1e-8);
        assert!(cross_max > 1e-3);
    }

    #[test]
    fn classicality_of_vacuum_and_first_level() {
        let g = small_grid(0.01);
        let w0 = wigner_by_closed_form(&CoefficientVector::eigenstate(0), &g);
        let r0 = classicality_report(&w0);
        assert!(r0.min_value >= -1e-6);
        assert!(r0.negative_volume < 1e-12);
        let w1 = wigner_by_closed_form(&CoefficientVector::eigenstate(1), &g);
        let r1 = classicality_report(&w1);
        assert!((r1.min_value + FRAC_1_PI).abs() < 1e-12);
        assert_eq!(r1.min_location, (0.0, 0.0));
        assert!(r1.negative_volume > 0.0);
    }

    #[test]
    fn vacuum_marginal() {
        let g = PhaseSpaceGrid::aligned(0.01, 6.0, 6.0, 121, 121).unwrap();
        let w = wigner_by_closed_form(&CoefficientVector::eigenstate(0), &g);
        let (pos, mom) = marginals(&w);
        for (i, v) in pos.iter().enumerate() {
            let x = g.x(i);
            assert!((v - (-x * x).exp() / PI.sqrt()).abs() < 1e-4);
        }
        let mass: f64 = pos.iter().sum::<f64>() * g.x_step();
        assert!((mass - 1.0).abs() < 1e-3);
        let (mean, var) = marginal_moments(&g.p_nodes(), &mom);
        assert!(mean.abs() < 1e-12);
        assert!((var - 0.5).abs() < 1e-6);
    }
}
