use std::path::PathBuf;

use advrobust_core::bounds::volume_match_coefficient;

use super::{fmt, prepare_out};
use crate::cli::VolumeArgs;
use crate::dataset::write_table;
use crate::error::{CliError, Result};

pub const HEADER: [&str; 3] = ["d", "c", "asymptote"];

/// `√(2/(eπ))`, the large-d limit of the coefficient.
pub fn asymptote() -> f64 {
    (2.0 / (std::f64::consts::E * std::f64::consts::PI)).sqrt()
}

pub fn volume(args: &VolumeArgs) -> Result<Vec<PathBuf>> {
    if args.dims.is_empty() {
        return Err(CliError::Usage("at least one dimension is required".into()));
    }
    let rows = args
        .dims
        .iter()
        .map(|&d| {
            let c = volume_match_coefficient(d).map_err(|e| CliError::Usage(e.to_string()))?;
            Ok(vec![d.to_string(), fmt(c), fmt(asymptote())])
        })
        .collect::<Result<Vec<_>>>()?;
    let out = &args.common.out;
    prepare_out(out)?;
    let path = out.join("volume.csv");
    write_table(&path, &HEADER, &rows)?;
    Ok(vec![path])
}
