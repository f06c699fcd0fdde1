use std::path::PathBuf;

use advrobust_core::bounds::{eq13_K, theorem1_bound, theorem2_constants, theorem3_bound};
use advrobust_core::classifiers::{f_lin_reference, f_quad_reference, Classifier};
use advrobust_core::data::{
    compute_means, compute_moments, gen_running_example, RunningExampleConfig,
};
use advrobust_core::numerics::RandomStream;
use advrobust_core::robustness::{AdvMethod, AttackConfig};
use serde::Serialize;

use super::{fmt, noise_config, prepare_out};
use crate::cli::RunningExampleArgs;
use crate::dataset::write_table;
use crate::error::{CliError, Result};
use crate::parallel::{self, Workers};
use crate::report::{write_json, BoundSummary, RobustnessSummary};

pub const CURVE_HEADER: [&str; 6] = [
    "d",
    "rho_adv",
    "rho_unif_hat",
    "t2_lower",
    "t2_upper",
    "t1_bound",
];

#[derive(Serialize)]
struct Row {
    d: usize,
    a: f64,
    points: usize,
    rho_adv: f64,
    rho_unif: RobustnessSummary,
    c1: f64,
    c2_tilde: f64,
    c2: f64,
    t2_lower: f64,
    t2_upper: f64,
    theorem1: BoundSummary,
}

#[derive(Serialize)]
struct QuadraticRow {
    d: usize,
    a: f64,
    rho_adv: RobustnessSummary,
    risk: f64,
    theorem3: BoundSummary,
}

#[derive(Serialize)]
struct Report {
    command: &'static str,
    seed: u64,
    epsilon: f64,
    samples_j: usize,
    rows: Vec<Row>,
    quadratic: Option<QuadraticRow>,
}

pub fn running_example(args: &RunningExampleArgs, workers: &Workers) -> Result<Vec<PathBuf>> {
    if args.dims.is_empty() {
        return Err(CliError::Usage("at least one dimension is required".into()));
    }
    let noise = noise_config(&args.noise)?;
    for &d in &args.dims {
        RunningExampleConfig::new(d, args.a.unwrap_or(0.0))
            .map_err(|e| CliError::Usage(e.to_string()))?;
    }
    let master = RandomStream::new(args.common.seed);
    let attack = AttackConfig::default();

    let mut rows = Vec::new();
    let mut quadratic = None;
    for &d in &args.dims {
        let cfg = match args.a {
            Some(a) => RunningExampleConfig::new(d, a)?,
            None => RunningExampleConfig::with_default_bias(d)?,
        };
        let ds = gen_running_example(&cfg)?;
        let stream = master.child(d as u64);
        let f = Classifier::from(f_lin_reference(d)?);
        let adv = parallel::rho_adv(workers, &f, &ds, AdvMethod::Exact, &attack, &stream)?;
        let unif = parallel::rho_unif(workers, &f, &ds, &noise, &stream)?;
        let t2 =
            theorem2_constants(noise.epsilon, d).map_err(|e| CliError::Usage(e.to_string()))?;
        let (t2_lower, t2_upper) = t2.bracket(d, adv.rho);
        let t1 = theorem1_bound(&compute_means(&ds)?, ds.radius(), f.risk(&ds)?, false)?;
        rows.push(Row {
            d,
            a: cfg.a,
            points: ds.len(),
            rho_adv: adv.rho,
            rho_unif: RobustnessSummary::from(&unif),
            c1: t2.c1,
            c2_tilde: t2.c2_tilde,
            c2: t2.c2,
            t2_lower,
            t2_upper,
            theorem1: BoundSummary::from(&t1),
        });

        if d == 4 {
            let q = f_quad_reference();
            let k = eq13_K(&q)?;
            let fq = Classifier::from(q);
            let adv_q = parallel::rho_adv(workers, &fq, &ds, AdvMethod::Exact, &attack, &stream)?;
            let risk = fq.risk(&ds)?;
            let t3 = theorem3_bound(&compute_moments(&ds)?, k, ds.radius(), risk)?;
            quadratic = Some(QuadraticRow {
                d,
                a: cfg.a,
                rho_adv: RobustnessSummary::from(&adv_q),
                risk,
                theorem3: BoundSummary::from(&t3),
            });
        }
    }

    let out = &args.common.out;
    prepare_out(out)?;
    let table: Vec<Vec<String>> = rows
        .iter()
        .map(|r| {
            vec![
                r.d.to_string(),
                fmt(r.rho_adv),
                fmt(r.rho_unif.rho),
                fmt(r.t2_lower),
                fmt(r.t2_upper),
                fmt(r.theorem1.value),
            ]
        })
        .collect();
    let curve = out.join("curve.csv");
    write_table(&curve, &CURVE_HEADER, &table)?;
    let report = out.join("report.json");
    write_json(
        &report,
        &Report {
            command: "running-example",
            seed: args.common.seed,
            epsilon: noise.epsilon,
            samples_j: noise.samples,
            rows,
            quadratic,
        },
    )?;
    Ok(vec![curve, report])
}
