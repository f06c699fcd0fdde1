use std::path::{Path, PathBuf};
use std::str::FromStr;

use advrobust_core::bounds::{
    eq13_K, lemma1_bound, tau_gamma_linear, tau_gamma_quadratic, theorem1_bound, theorem3_bound,
    BoundReport,
};
use advrobust_core::classifiers::{
    cross_validate_lambda, f_lin_reference, f_quad_reference, train_kernel_svm, train_linear_svm,
    Classifier, KernelSpec, SvmConfig, DEFAULT_LAMBDA_GRID,
};
use advrobust_core::data::{compute_moments, kappa, normalize_unit, ClassMoments, LabeledDataset};
use advrobust_core::numerics::{nuclear_norm, RandomStream};
use advrobust_core::robustness::{AdvMethod, AttackConfig};
use serde::Serialize;

use super::{fmt, noise_config, prepare_out};
use crate::cli::{AdvMethodArg, AnalyzeArgs};
use crate::dataset::{load_csv, write_table, CsvOptions};
use crate::error::{CliError, Result};
use crate::parallel::{self, Workers};
use crate::report::{write_json, BoundSummary, RobustnessSummary};

/// Parsed `--model` value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ModelSpec {
    /// `(1/√d) 1ᵀx − 1`
    Linear,
    /// The 2×2 image quadratic form (d = 4 only).
    QuadraticRef,
    LinearSvm,
    PolySvm(u32),
    RbfSvm(f64),
}

impl FromStr for ModelSpec {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || CliError::Usage(format!("unknown model {s:?}"));
        Ok(match s.split_once(':') {
            None => match s {
                "linear" => ModelSpec::Linear,
                "quadratic-ref" => ModelSpec::QuadraticRef,
                "linear-svm" => ModelSpec::LinearSvm,
                _ => return Err(bad()),
            },
            Some(("poly-svm", q)) => ModelSpec::PolySvm(q.parse().map_err(|_| bad())?),
            Some(("rbf-svm", s2)) => ModelSpec::RbfSvm(s2.parse().map_err(|_| bad())?),
            Some(_) => return Err(bad()),
        })
    }
}

impl ModelSpec {
    fn kernel(self) -> Result<Option<KernelSpec>> {
        let k = match self {
            ModelSpec::PolySvm(q) => KernelSpec::polynomial(q),
            ModelSpec::RbfSvm(s2) => KernelSpec::rbf(s2),
            _ => return Ok(None),
        };
        k.map(Some).map_err(|e| CliError::Usage(e.to_string()))
    }
}

#[derive(Serialize)]
struct DatasetInfo {
    rows: usize,
    dim: usize,
    radius: f64,
    positives: usize,
    negatives: usize,
}

impl From<&LabeledDataset> for DatasetInfo {
    fn from(ds: &LabeledDataset) -> Self {
        let (positives, negatives) = ds.class_counts();
        DatasetInfo {
            rows: ds.len(),
            dim: ds.dim(),
            radius: ds.radius(),
            positives,
            negatives,
        }
    }
}

#[derive(Serialize)]
struct CvRow {
    lambda: f64,
    error: f64,
}

#[derive(Serialize)]
struct ModelInfo {
    spec: String,
    kind: &'static str,
    lambda: Option<f64>,
    epochs: Option<usize>,
    cross_validation: Vec<CvRow>,
}

#[derive(Serialize)]
struct Distinguishability {
    /// `‖E₁x − E₋₁x‖₂`
    mean_difference: f64,
    /// `‖p₁E₁x − p₋₁E₋₁x‖₂`
    weighted_mean_difference: f64,
    /// `2√(K‖p₁C₁ − p₋₁C₋₁‖_*)` with `K = 1`
    quadratic: f64,
}

#[derive(Serialize)]
struct Report {
    command: &'static str,
    seed: u64,
    epsilon: f64,
    samples_j: usize,
    normalized: bool,
    train: DatasetInfo,
    test: Option<DatasetInfo>,
    evaluated_on: &'static str,
    model: ModelInfo,
    train_error: f64,
    test_error: Option<f64>,
    rho_adv: RobustnessSummary,
    rho_unif: RobustnessSummary,
    kappa: f64,
    distinguishability: Distinguishability,
    bounds: Vec<BoundSummary>,
}

fn load(path: &Path, args: &AnalyzeArgs) -> Result<LabeledDataset> {
    let opts = CsvOptions {
        label_col: args.label_col,
        pos_label: args.pos_label.clone(),
        neg_label: args.neg_label.clone(),
        ..CsvOptions::default()
    };
    let ds = load_csv(path, &opts)?;
    if args.normalize {
        normalize_unit(&ds).map_err(|e| CliError::from(e).context(&path.display().to_string()))
    } else {
        Ok(ds)
    }
}

fn train(
    args: &AnalyzeArgs,
    spec: ModelSpec,
    ds: &LabeledDataset,
    rng: &RandomStream,
) -> Result<(Classifier, ModelInfo)> {
    let mut info = ModelInfo {
        spec: args.model.clone().unwrap_or_default(),
        kind: "",
        lambda: None,
        epochs: None,
        cross_validation: Vec::new(),
    };
    let classifier = match spec {
        ModelSpec::Linear => Classifier::from(f_lin_reference(ds.dim())?),
        ModelSpec::QuadraticRef => {
            if ds.dim() != 4 {
                return Err(CliError::Data(format!(
                    "quadratic-ref needs 4 features, data has {}",
                    ds.dim()
                )));
            }
            Classifier::from(f_quad_reference())
        }
        ModelSpec::LinearSvm | ModelSpec::PolySvm(_) | ModelSpec::RbfSvm(_) => {
            let kernel = spec.kernel()?;
            let fit = |ds: &LabeledDataset, lambda: f64, rng: &mut RandomStream| {
                let cfg = SvmConfig {
                    lambda,
                    epochs: args.epochs,
                };
                match kernel {
                    None => train_linear_svm(ds, &cfg, rng).map(Classifier::from),
                    Some(k) => train_kernel_svm(ds, k, &cfg, rng).map(Classifier::from),
                }
            };
            let lambda = match args.lambda {
                Some(l) => l,
                None => {
                    let (pos, neg) = ds.class_counts();
                    let folds = args.folds.min(pos).min(neg);
                    if folds < 2 {
                        return Err(CliError::Data(
                            "too few points per class for cross-validation; pass --lambda".into(),
                        ));
                    }
                    let cv = cross_validate_lambda(
                        ds,
                        &DEFAULT_LAMBDA_GRID,
                        folds,
                        &mut rng.child(1),
                        fit,
                    )?;
                    info.cross_validation = cv
                        .errors
                        .iter()
                        .map(|&(lambda, error)| CvRow { lambda, error })
                        .collect();
                    cv.best_lambda
                }
            };
            info.lambda = Some(lambda);
            info.epochs = Some(args.epochs);
            fit(ds, lambda, &mut rng.child(0)).map_err(|e| CliError::from(e).context("training"))?
        }
    };
    info.kind = classifier.kind();
    Ok((classifier, info))
}

/// Bounds that apply to the classifier family, evaluated on `ds`.
fn bounds(c: &Classifier, ds: &LabeledDataset, moments: &ClassMoments) -> Result<Vec<BoundReport>> {
    let risk = c.risk(ds)?;
    let mut means = [0.0f64; 2];
    let mut counts = [0usize; 2];
    for (x, y) in ds.iter() {
        let k = usize::from(y == -1);
        means[k] += c.value(x)?;
        counts[k] += 1;
    }
    let mean_f = |k: usize| {
        if counts[k] == 0 {
            0.0
        } else {
            means[k] / counts[k] as f64
        }
    };
    let (p1, p_m1) = (moments.p1(), moments.p_m1());
    let sup = c.sup_norm_on_ball(ds.radius())?;
    let mut out = Vec::new();
    match c {
        Classifier::Linear(l) => {
            out.push(lemma1_bound(
                tau_gamma_linear(l),
                p1,
                p_m1,
                mean_f(0),
                mean_f(1),
                sup.value,
                risk,
            )?);
            out.push(theorem1_bound(&moments.means, ds.radius(), risk, false)?);
            if p1 == p_m1 && l.intercept() == 0.0 {
                out.push(theorem1_bound(&moments.means, ds.radius(), risk, true)?);
            }
        }
        Classifier::Quadratic(q) => {
            let tg = tau_gamma_quadratic(q)?;
            out.push(lemma1_bound(
                tg,
                p1,
                p_m1,
                mean_f(0),
                mean_f(1),
                sup.value,
                risk,
            )?);
            out.push(theorem3_bound(moments, eq13_K(q)?, ds.radius(), risk)?);
        }
        Classifier::Kernel(_) => {}
    }
    Ok(out)
}

pub fn analyze(args: &AnalyzeArgs, workers: &Workers) -> Result<Vec<PathBuf>> {
    let noise = noise_config(&args.noise)?;
    let spec = args.model.as_deref().map(ModelSpec::from_str).transpose()?;
    if let Some(l) = args.lambda {
        if !(l > 0.0 && l.is_finite()) {
            return Err(CliError::Usage("--lambda must be positive".into()));
        }
    }
    if args.epochs == 0 {
        return Err(CliError::Usage("--epochs must be at least 1".into()));
    }
    let train_ds = load(&args.csv, args)?;
    let test_ds = args.test_csv.as_ref().map(|p| load(p, args)).transpose()?;
    if let Some(t) = &test_ds {
        if t.dim() != train_ds.dim() {
            return Err(CliError::Data(format!(
                "test data has {} features, training data {}",
                t.dim(),
                train_ds.dim()
            )));
        }
    }
    let master = RandomStream::new(args.common.seed);

    let (classifier, info) = match (&args.model_file, spec) {
        (Some(path), _) => {
            let c = crate::model::load(path)?;
            let info = ModelInfo {
                spec: format!(
                    "file:{}",
                    path.file_name()
                        .map(|n| n.to_string_lossy())
                        .unwrap_or_default()
                ),
                kind: c.kind(),
                lambda: None,
                epochs: None,
                cross_validation: Vec::new(),
            };
            (c, info)
        }
        (None, Some(spec)) => train(args, spec, &train_ds, &master.child(0))?,
        (None, None) => {
            return Err(CliError::Usage(
                "either --model or --model-file is required".into(),
            ))
        }
    };
    if classifier.dim() != train_ds.dim() {
        return Err(CliError::Data(format!(
            "classifier expects {} features, data has {}",
            classifier.dim(),
            train_ds.dim()
        )));
    }

    let train_error = classifier.risk(&train_ds)?;
    let test_error = test_ds.as_ref().map(|t| classifier.risk(t)).transpose()?;
    let (eval_ds, evaluated_on) = match &test_ds {
        Some(t) => (t, "test"),
        None => (&train_ds, "train"),
    };

    let method = match (args.adv_method, &classifier) {
        (AdvMethodArg::Exact, _) => AdvMethod::Exact,
        (AdvMethodArg::Empirical, _) | (AdvMethodArg::Auto, Classifier::Kernel(_)) => {
            AdvMethod::Empirical
        }
        (AdvMethodArg::Auto, _) => AdvMethod::Exact,
    };
    let attack = AttackConfig::default();
    let adv = parallel::rho_adv(
        workers,
        &classifier,
        eval_ds,
        method,
        &attack,
        &master.child(2),
    )?;
    let unif = parallel::rho_unif(workers, &classifier, eval_ds, &noise, &master.child(3))?;

    let moments = compute_moments(eval_ds)?;
    let distinguishability = Distinguishability {
        mean_difference: moments.means.mean_difference_norm(),
        weighted_mean_difference: moments.means.weighted_mean_difference_norm(),
        quadratic: 2.0 * nuclear_norm(&moments.weighted_second_moment_difference())?.sqrt(),
    };
    let bound_list = bounds(&classifier, eval_ds, &moments)?;

    let out = &args.common.out;
    prepare_out(out)?;
    let model_path = out.join("model.txt");
    crate::model::save(&model_path, &classifier)?;
    let per_point = out.join("per_point.csv");
    let rows: Vec<Vec<String>> = (0..eval_ds.len())
        .map(|i| {
            vec![
                i.to_string(),
                eval_ds.label(i).to_string(),
                fmt(classifier.value(eval_ds.point(i)).unwrap_or(f64::NAN)),
                fmt(adv.per_point[i].delta),
                fmt(unif.per_point[i].delta),
            ]
        })
        .collect();
    write_table(
        &per_point,
        &["index", "label", "value", "delta_adv", "delta_unif"],
        &rows,
    )?;

    let report_path = out.join("report.json");
    write_json(
        &report_path,
        &Report {
            command: "analyze",
            seed: args.common.seed,
            epsilon: noise.epsilon,
            samples_j: noise.samples,
            normalized: args.normalize,
            train: DatasetInfo::from(&train_ds),
            test: test_ds.as_ref().map(DatasetInfo::from),
            evaluated_on,
            model: info,
            train_error,
            test_error,
            rho_adv: RobustnessSummary::from(&adv),
            rho_unif: RobustnessSummary::from(&unif),
            kappa: kappa(eval_ds)?,
            distinguishability,
            bounds: bound_list.iter().map(BoundSummary::from).collect(),
        },
    )?;
    Ok(vec![report_path, per_point, model_path])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn model_specs_parse() {
        assert_eq!("linear".parse::<ModelSpec>().unwrap(), ModelSpec::Linear);
        assert_eq!(
            "poly-svm:2".parse::<ModelSpec>().unwrap(),
            ModelSpec::PolySvm(2)
        );
        assert_eq!(
            "rbf-svm:0.5".parse::<ModelSpec>().unwrap(),
            ModelSpec::RbfSvm(0.5)
        );
        for bad in ["", "svm", "poly-svm:x", "poly-svm", "rbf:1"] {
            assert_eq!(
                bad.parse::<ModelSpec>().unwrap_err().exit_code(),
                2,
                "{bad}"
            );
        }
    }
}
