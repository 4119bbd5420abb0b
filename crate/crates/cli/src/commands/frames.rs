use complex_oscillator::eigenstates::build_basis;
use complex_oscillator::states::{
    binomial_energy_r0_formula, continuity_residuals, density_current_frame, energy_expectation,
    evolve, synthesize, BinomialSpec,
};
use rayon::prelude::*;
use serde_json::{json, Value};
use std::sync::Arc;

use crate::config::{self, Options, StateSpec};
use crate::error::Outcome;
use crate::output::{Artifacts, Table};

pub fn run(opts: &Options) -> Outcome<()> {
    let record = config::potential_params(opts)?;
    let spec = config::single_state(opts)?;
    let coeffs = spec.coefficients()?;
    let times = config::times(opts);
    let dt = config::time_step(opts)?;
    let grid = Arc::new(config::spatial_grid(opts, coeffs.highest_level())?);
    let basis = build_basis(&record.params, coeffs.highest_level(), &grid)?;

    let residual = basis.bi_norm_residual();
    if residual > 1e-6 {
        eprintln!(
            "warning: basis bi-norm residual {residual:.3e} exceeds 1e-6 \
             (Ermakov defect pi*lambda^2 - (4ac - b^2) = {:.3e})",
            record.ermakov_defect
        );
    }

    let computed: Vec<_> = times
        .par_iter()
        .map(|&t| -> Outcome<_> {
            let frame = density_current_frame(&coeffs, &basis, t)?;
            let res = continuity_residuals(&coeffs, &basis, t, dt)?;
            let (phi, dual) = synthesize(&evolve(&coeffs, t), &basis)?;
            Ok((frame, res, dual.inner(&phi)?))
        })
        .collect();

    let mut artifacts = Artifacts::create(&config::out_dir(opts), config::format(opts))?;
    let mut frames = Vec::with_capacity(times.len());
    let mut residuals = Vec::with_capacity(times.len());
    for (k, item) in computed.into_iter().enumerate() {
        let (frame, res, quad_binorm) = item?;
        let table = Table::new(
            vec!["x", "re_rho_b", "im_rho_b", "re_j_b", "im_j_b", "rho", "j"],
            vec![
                grid.nodes(),
                frame.rho_b.iter().map(|v| v.re).collect(),
                frame.rho_b.iter().map(|v| v.im).collect(),
                frame.current_b.iter().map(|v| v.re).collect(),
                frame.current_b.iter().map(|v| v.im).collect(),
                frame.rho.clone(),
                frame.current.clone(),
            ],
        );
        let file = artifacts.table(&format!("frame_{k:03}"), &table)?;
        let integral = frame.integral_rho_b();
        frames.push(json!({
            "time": frame.time,
            "file": file,
            "binorm_quadrature": quad_binorm,
            "integral_rho_b": integral,
            "integral_im_rho_b": integral.im,
            "integral_rho": frame.integral_rho(),
        }));
        residuals.push(json!({
            "time": frame.time,
            "max_biorthogonal": res.max_biorthogonal(),
            "relative_biorthogonal": res.relative_biorthogonal(),
            "max_conventional": res.max_conventional(),
            "relative_conventional": res.relative_conventional(),
        }));
    }

    let r0_formula = match spec {
        StateSpec::Binomial { n, p, r } => {
            Value::from(binomial_energy_r0_formula(&BinomialSpec::new(n, p, r)?))
        }
        _ => Value::Null,
    };
    let metadata = json!({
        "command": "frames",
        "params": record,
        "grid": *grid,
        "spec": { "packet": spec, "terms": coeffs.len(), "times": times, "dt": dt },
        "derived": {
            "energy": energy_expectation(&coeffs),
            "energy_r0_formula": r0_formula,
            "binorm": coeffs.bi_norm(),
            "residuals": residuals,
            "basis_bi_norm_residual": residual,
            "frames": frames,
        },
    });
    artifacts.finish("frames", &metadata)?;
    Ok(())
}
