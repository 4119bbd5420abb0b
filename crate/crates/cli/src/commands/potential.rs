use serde_json::json;

use crate::config::{self, Options};
use crate::error::Outcome;
use crate::output::{Artifacts, Table};

pub fn run(opts: &Options) -> Outcome<()> {
    let record = config::potential_params(opts)?;
    let grid = config::spatial_grid(opts, 0)?;
    let params = record.params;

    let x = grid.nodes();
    let values: Vec<_> = x.iter().map(|&x| params.potential_value(x)).collect();
    let table = Table::new(
        vec!["x", "re_v", "im_v"],
        vec![
            x.clone(),
            values.iter().map(|v| v.re).collect(),
            values.iter().map(|v| v.im).collect(),
        ],
    );

    let mut artifacts = Artifacts::create(&config::out_dir(opts), config::format(opts))?;
    let file = artifacts.table("potential", &table)?;
    let max_im = values.iter().fold(0.0f64, |m, v| m.max(v.im.abs()));
    let metadata = json!({
        "command": "potential",
        "params": record,
        "grid": grid,
        "spec": null,
        "derived": { "max_abs_im_v": max_im },
        "files": [file],
    });
    artifacts.finish("potential", &metadata)?;
    Ok(())
}
