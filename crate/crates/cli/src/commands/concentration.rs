use std::path::PathBuf;

use advrobust_core::bounds::{cap_bounds_tight, spherical_cap_bounds};
use advrobust_core::numerics::{sample_sphere, RandomStream};

use super::{fmt, prepare_out};
use crate::cli::ConcentrationArgs;
use crate::dataset::write_table;
use crate::error::{CliError, Result};
use crate::parallel::Workers;

pub const HEADER: [&str; 12] = [
    "d",
    "tau",
    "samples",
    "p_hat",
    "std_err",
    "basic_lower",
    "basic_upper",
    "sharp_applies",
    "sharp_lower",
    "sharp_upper",
    "within_basic",
    "within_sharp",
];

/// `p ≥ lower` and `p ≤ upper` up to three binomial standard errors, taken
/// at the bound being tested.
fn within(p: f64, lower: f64, upper: f64, n: usize) -> bool {
    let se = |b: f64| {
        let b = b.clamp(0.0, 1.0);
        (b * (1.0 - b) / n as f64).sqrt()
    };
    p + 3.0 * se(lower) >= lower && p - 3.0 * se(upper) <= upper
}

pub fn concentration(args: &ConcentrationArgs, workers: &Workers) -> Result<Vec<PathBuf>> {
    if args.dims.is_empty() || args.taus.is_empty() {
        return Err(CliError::Usage(
            "need at least one dimension and one cap height".into(),
        ));
    }
    if args.samples == 0 {
        return Err(CliError::Usage("--samples must be positive".into()));
    }
    let cells: Vec<(usize, f64)> = args
        .dims
        .iter()
        .flat_map(|&d| args.taus.iter().map(move |&t| (d, t)))
        .collect();
    for &(d, t) in &cells {
        spherical_cap_bounds(t, d).map_err(|e| CliError::Usage(e.to_string()))?;
    }
    let master = RandomStream::new(args.common.seed);
    let n = args.samples;
    let rows = workers.map(cells.len(), |i| {
        let (d, tau) = cells[i];
        let mut rng = master.child(i as u64);
        let mut hits = 0usize;
        for _ in 0..n {
            if sample_sphere(d, 1.0, &mut rng)?[0] >= tau {
                hits += 1;
            }
        }
        let p = hits as f64 / n as f64;
        let l5 = spherical_cap_bounds(tau, d)?;
        let t4 = cap_bounds_tight(tau, d)?;
        let applies = tau >= (2.0 / d as f64).sqrt();
        Ok(vec![
            d.to_string(),
            fmt(tau),
            n.to_string(),
            fmt(p),
            fmt((p * (1.0 - p) / n as f64).sqrt()),
            fmt(l5.lower),
            fmt(l5.upper),
            applies.to_string(),
            fmt(t4.lower),
            fmt(t4.upper),
            within(p, l5.lower, l5.upper, n).to_string(),
            (!applies || within(p, t4.lower, t4.upper, n)).to_string(),
        ])
    })?;
    let out = &args.common.out;
    prepare_out(out)?;
    let path = out.join("concentration.csv");
    write_table(&path, &HEADER, &rows)?;
    Ok(vec![path])
}
