//! Parallel per-point evaluation. Point `i` always draws from
//! `master.child(i)`, so results do not depend on the worker count.

use advrobust_core::classifiers::Classifier;
use advrobust_core::data::LabeledDataset;
use advrobust_core::numerics::RandomStream;
use advrobust_core::robustness::{
    unif_point, AdvEvaluator, AdvMethod, AttackConfig, NoiseConfig, RobustnessReport,
};
use rayon::prelude::*;

use crate::error::{CliError, Result};

pub struct Workers {
    pool: rayon::ThreadPool,
}

impl Workers {
    /// `threads == 0` uses every available core.
    pub fn new(threads: usize) -> Result<Self> {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .map_err(|e| CliError::Usage(format!("thread pool: {e}")))?;
        Ok(Workers { pool })
    }

    /// `f(0..n)` in parallel, results in index order. On failure the error
    /// of the lowest failing index is returned.
    pub fn map<T, F>(&self, n: usize, f: F) -> Result<Vec<T>>
    where
        T: Send,
        F: Fn(usize) -> advrobust_core::Result<T> + Sync,
    {
        let results: Vec<advrobust_core::Result<T>> = self
            .pool
            .install(|| (0..n).into_par_iter().map(&f).collect());
        results
            .into_iter()
            .map(|r| r.map_err(CliError::from))
            .collect()
    }
}

pub fn rho_adv(
    workers: &Workers,
    c: &Classifier,
    ds: &LabeledDataset,
    method: AdvMethod,
    cfg: &AttackConfig,
    master: &RandomStream,
) -> Result<RobustnessReport> {
    if c.dim() != ds.dim() {
        return Err(CliError::Data(format!(
            "classifier expects {} features, data has {}",
            c.dim(),
            ds.dim()
        )));
    }
    let eval = AdvEvaluator::new(c, method, cfg)?;
    let points = workers.map(ds.len(), |i| eval.point(i, ds.point(i), master))?;
    Ok(RobustnessReport::from_points(points)?)
}

pub fn rho_unif(
    workers: &Workers,
    c: &Classifier,
    ds: &LabeledDataset,
    cfg: &NoiseConfig,
    master: &RandomStream,
) -> Result<RobustnessReport> {
    if c.dim() != ds.dim() {
        return Err(CliError::Data(format!(
            "classifier expects {} features, data has {}",
            c.dim(),
            ds.dim()
        )));
    }
    cfg.validate()?;
    let points = workers.map(ds.len(), |i| {
        unif_point(c, i, ds.point(i), ds.radius(), cfg, master)
    })?;
    Ok(RobustnessReport::from_points(points)?)
}
