use complex_oscillator::states::{energy_expectation, photon_added_fidelity, CoefficientVector, PoissonSpec};
use complex_oscillator::wigner::{
    classicality_report, fock_superposition, marginal_moments, marginals, wigner_by_closed_form,
    wigner_by_quadrature, PhaseSpaceGrid, WignerField,
};
use complex_oscillator::eigenstates::{SpatialGrid, WaveField};
use serde_json::{json, Value};
use std::sync::Arc;

use crate::config::{self, Method, Options, StateSpec};
use crate::error::Outcome;
use crate::output::{Artifacts, Table};

/// Phase-space window for a packet reaching `highest_level`, aligned to the
/// spatial grid.
pub fn phase_grid(opts: &Options, spatial: &SpatialGrid, highest_level: usize) -> Outcome<PhaseSpaceGrid> {
    let default = PhaseSpaceGrid::default_for_energy(2.0 * highest_level as f64 + 1.0, spatial.step())?;
    Ok(PhaseSpaceGrid::aligned(
        spatial.step(),
        opts.wigner_x_extent.unwrap_or(default.x_extent),
        opts.wigner_p_extent.unwrap_or(default.p_extent),
        opts.wigner_x_count.unwrap_or(default.x_count),
        opts.wigner_p_count.unwrap_or(default.p_count),
    )?)
}

/// `max |∫W dp − |φ|²|` over the x nodes of `w`.
pub fn position_marginal_deviation(w: &WignerField, field: &WaveField) -> f64 {
    let (position, _) = marginals(w);
    let spatial = field.grid();
    position
        .iter()
        .enumerate()
        .filter_map(|(i, m)| {
            let k = spatial.center() as i64 + (w.grid.x(i) / spatial.step()).round() as i64;
            let v = field.amplitudes().get(usize::try_from(k).ok()?)?;
            Some((m - v.norm_sqr()).abs())
        })
        .fold(0.0, f64::max)
}

/// `∫∫ W dx dp` through the momentum marginal.
pub fn total_mass(w: &WignerField) -> f64 {
    let (_, momentum) = marginals(w);
    let n = momentum.len();
    momentum
        .iter()
        .enumerate()
        .map(|(j, v)| if j == 0 || j == n - 1 { 0.5 * v } else { *v })
        .sum::<f64>()
        * w.grid.p_step()
}

fn cell_report(
    opts: &Options,
    spec: &StateSpec,
    coeffs: &CoefficientVector,
    artifacts: &mut Artifacts,
    index: usize,
) -> Outcome<Value> {
    let top = coeffs.highest_level();
    let spatial = Arc::new(config::spatial_grid(opts, top)?);
    let grid = phase_grid(opts, &spatial, top)?;
    let field = fock_superposition(coeffs, &spatial)?;
    let method = opts.method.unwrap_or(Method::ClosedForm);
    let w = match method {
        Method::ClosedForm => wigner_by_closed_form(coeffs, &grid),
        Method::Quadrature => wigner_by_quadrature(&field, &grid)?,
    };

    let mut x = Vec::with_capacity(w.values.len());
    let mut p = Vec::with_capacity(w.values.len());
    for i in 0..grid.x_count {
        for j in 0..grid.p_count {
            x.push(grid.x(i));
            p.push(grid.p(j));
        }
    }
    let file = artifacts.table(
        &format!("wigner_{index:02}"),
        &Table::new(vec!["x", "p", "w"], vec![x, p, w.values.clone()]),
    )?;

    let (position, momentum) = marginals(&w);
    let (x_mean, x_var) = marginal_moments(&grid.x_nodes(), &position);
    let (p_mean, p_var) = marginal_moments(&grid.p_nodes(), &momentum);
    let fidelity = match *spec {
        StateSpec::Poisson { z, r, .. } => Value::from(photon_added_fidelity(&PoissonSpec::new(z, r)?)),
        _ => Value::Null,
    };
    Ok(json!({
        "label": spec.label(),
        "packet": spec,
        "file": file,
        "method": method,
        "grid": grid,
        "energy": energy_expectation(coeffs),
        "classicality": classicality_report(&w),
        "max_abs_w": w.max_abs(),
        "marginals": {
            "x_mean": x_mean, "x_variance": x_var,
            "p_mean": p_mean, "p_variance": p_var,
            "total_mass": total_mass(&w),
            "position_deviation": position_marginal_deviation(&w, &field),
        },
        "photon_added_fidelity": fidelity,
    }))
}

pub fn run(opts: &Options) -> Outcome<()> {
    let record = config::oscillator_params(opts)?;
    let cells = config::state_cells(opts)?;
    let coeffs = cells
        .iter()
        .map(StateSpec::coefficients)
        .collect::<Outcome<Vec<_>>>()?;
    for c in &coeffs {
        let top = c.highest_level();
        config::spatial_grid(opts, top)?.check_level(top)?;
    }

    let mut artifacts = Artifacts::create(&config::out_dir(opts), config::format(opts))?;
    let mut reports = Vec::with_capacity(cells.len());
    for (k, (spec, c)) in cells.iter().zip(&coeffs).enumerate() {
        reports.push(cell_report(opts, spec, c, &mut artifacts, k)?);
    }
    let metadata = json!({
        "command": "wigner",
        "params": record,
        "grid": config::spatial_grid(opts, coeffs.iter().map(CoefficientVector::highest_level).max().unwrap_or(0))?,
        "spec": { "cells": cells },
        "derived": {
            "energy": coeffs.iter().map(energy_expectation).collect::<Vec<_>>(),
            "binorm": coeffs.iter().map(CoefficientVector::bi_norm).collect::<Vec<_>>(),
            "residuals": null,
            "cells": reports,
        },
    });
    artifacts.finish("wigner", &metadata)?;
    Ok(())
}
