//! Minimal adversarial perturbations and robustness to random noise.
//!
//! Every per-point routine takes its own [`RandomStream`]; dataset-level
//! estimates hand point `i` the stream `master.child(i)`, so a parallel
//! driver that evaluates [`AdvEvaluator::point`] or [`unif_point`] in any
//! order reproduces [`rho_adv`] and [`rho_unif`] exactly.

mod attack;
mod exact;
mod noise;

use alloc::vec::Vec;

pub use attack::{delta_adv_empirical, geometric_grid, AttackConfig, StepRule};
pub use exact::{
    delta_adv_linear_exact, delta_adv_quadratic_exact, QuadraticSolution, QuadraticSolver,
    SecularFunction,
};
pub use noise::{delta_unif_empirical, BracketStatus, NoiseConfig, NoiseEstimate, DEFAULT_ETA_LO};

use crate::classifiers::Classifier;
use crate::data::LabeledDataset;
use crate::numerics::{add_scaled, norm2, RandomStream};
use crate::{Error, Result};

/// A perturbation `r` and its norm `Δ = ‖r‖₂`.
#[derive(Debug, Clone, PartialEq)]
pub struct Perturbation {
    pub delta: f64,
    pub r: Vec<f64>,
    /// Set when a quadratic point had no component on the opposite
    /// eigenspace and the minimizer was found on the pole.
    pub hard_case: bool,
}

/// Lengthens `r` by a few ulps until `f(x)·f(x+r) ≤ 0` holds as evaluated.
pub(crate) fn ensure_flip<F: Fn(&[f64]) -> f64>(
    f: F,
    x: &[f64],
    f0: f64,
    mut r: Vec<f64>,
) -> Result<Vec<f64>> {
    let mut grow = f64::EPSILON;
    for _ in 0..60 {
        if f0 * f(&add_scaled(x, 1.0, &r)) <= 0.0 {
            return Ok(r);
        }
        r.iter_mut().for_each(|v| *v *= 1.0 + grow);
        grow *= 2.0;
    }
    Err(Error::NotConverged(
        "label flip of the computed perturbation",
    ))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AdvMethod {
    /// Closed form (linear) or secular equation (quadratic).
    Exact,
    /// Penalized subgradient attack.
    Empirical,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MethodTag {
    Exact,
    Empirical,
    Noise,
}

impl MethodTag {
    pub fn as_str(self) -> &'static str {
        match self {
            MethodTag::Exact => "exact",
            MethodTag::Empirical => "empirical",
            MethodTag::Noise => "noise",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PointFlag {
    None,
    HardCase,
    BelowBracket,
    AtUpperEnd,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PointRobustness {
    pub delta: f64,
    /// Adversarial perturbation; absent for noise estimates.
    pub perturbation: Option<Vec<f64>>,
    pub method: MethodTag,
    pub flag: PointFlag,
    /// `‖x‖₂`, kept for the normalized aggregate.
    pub point_norm: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RobustnessReport {
    pub per_point: Vec<PointRobustness>,
    /// Mean of `Δᵢ`.
    pub rho: f64,
    /// Mean of `Δᵢ / ‖xᵢ‖₂`; `None` if some point is the origin.
    pub rho_normalized: Option<f64>,
}

impl RobustnessReport {
    pub fn from_points(per_point: Vec<PointRobustness>) -> Result<Self> {
        if per_point.is_empty() {
            return Err(Error::invalid("report needs at least one point"));
        }
        let n = per_point.len() as f64;
        let rho = per_point.iter().map(|p| p.delta).sum::<f64>() / n;
        let rho_normalized = if per_point.iter().all(|p| p.point_norm > 0.0) {
            Some(
                per_point
                    .iter()
                    .map(|p| p.delta / p.point_norm)
                    .sum::<f64>()
                    / n,
            )
        } else {
            None
        };
        Ok(RobustnessReport {
            per_point,
            rho,
            rho_normalized,
        })
    }
}

enum Prepared<'a> {
    Linear(&'a crate::classifiers::LinearClassifier),
    Quadratic(QuadraticSolver<'a>),
    Empirical(&'a AttackConfig),
}

/// Per-point adversarial evaluation with any shared precomputation (the
/// spectrum of a quadratic classifier) done once.
pub struct AdvEvaluator<'a> {
    classifier: &'a Classifier,
    prepared: Prepared<'a>,
}

impl<'a> AdvEvaluator<'a> {
    pub fn new(c: &'a Classifier, method: AdvMethod, cfg: &'a AttackConfig) -> Result<Self> {
        let prepared =
            match (method, c) {
                (AdvMethod::Exact, Classifier::Linear(l)) => Prepared::Linear(l),
                (AdvMethod::Exact, Classifier::Quadratic(q)) => {
                    Prepared::Quadratic(QuadraticSolver::new(q)?)
                }
                (AdvMethod::Exact, Classifier::Kernel(_)) => return Err(Error::UnsupportedMethod(
                    "exact minimal perturbations exist only for linear and quadratic classifiers"
                        .into(),
                )),
                (AdvMethod::Empirical, _) => {
                    cfg.validate()?;
                    Prepared::Empirical(cfg)
                }
            };
        Ok(AdvEvaluator {
            classifier: c,
            prepared,
        })
    }

    /// Point `index` of a dataset whose master stream is `master`.
    pub fn point(&self, index: usize, x: &[f64], master: &RandomStream) -> Result<PointRobustness> {
        let (p, method) = match &self.prepared {
            Prepared::Linear(l) => (delta_adv_linear_exact(l, x)?, MethodTag::Exact),
            Prepared::Quadratic(s) => (s.solve(x)?.perturbation, MethodTag::Exact),
            Prepared::Empirical(cfg) => {
                let mut rng = master.child(index as u64);
                match delta_adv_empirical(self.classifier, x, cfg, &mut rng) {
                    Ok(p) => (p, MethodTag::Empirical),
                    Err(Error::NoFlipFound) => return Err(Error::AttackFailed { index }),
                    Err(e) => return Err(e),
                }
            }
        };
        Ok(PointRobustness {
            delta: p.delta,
            flag: if p.hard_case {
                PointFlag::HardCase
            } else {
                PointFlag::None
            },
            perturbation: Some(p.r),
            method,
            point_norm: norm2(x),
        })
    }
}

/// Noise robustness of point `index`, with the bracket scaled by `radius`.
pub fn unif_point(
    c: &Classifier,
    index: usize,
    x: &[f64],
    radius: f64,
    cfg: &NoiseConfig,
    master: &RandomStream,
) -> Result<PointRobustness> {
    let mut rng = master.child(index as u64);
    let est = noise::delta_unif_with_radius(c, x, cfg, radius, &mut rng)?;
    Ok(PointRobustness {
        delta: est.eta,
        perturbation: None,
        method: MethodTag::Noise,
        flag: match est.status {
            BracketStatus::Interior => PointFlag::None,
            BracketStatus::BelowBracket => PointFlag::BelowBracket,
            BracketStatus::AtUpperEnd => PointFlag::AtUpperEnd,
        },
        point_norm: norm2(x),
    })
}

/// Empirical mean of `Δ_adv` over the dataset.
pub fn rho_adv(
    c: &Classifier,
    ds: &LabeledDataset,
    method: AdvMethod,
    cfg: &AttackConfig,
    rng: &RandomStream,
) -> Result<RobustnessReport> {
    Error::check_dim(c.dim(), ds.dim())?;
    let eval = AdvEvaluator::new(c, method, cfg)?;
    let per_point = ds
        .points()
        .iter()
        .enumerate()
        .map(|(i, x)| eval.point(i, x, rng))
        .collect::<Result<Vec<_>>>()?;
    RobustnessReport::from_points(per_point)
}

/// Empirical mean of `Δ_unif,ε` over the dataset.
pub fn rho_unif(
    c: &Classifier,
    ds: &LabeledDataset,
    cfg: &NoiseConfig,
    rng: &RandomStream,
) -> Result<RobustnessReport> {
    Error::check_dim(c.dim(), ds.dim())?;
    cfg.validate()?;
    let per_point = ds
        .points()
        .iter()
        .enumerate()
        .map(|(i, x)| unif_point(c, i, x, ds.radius(), cfg, rng))
        .collect::<Result<Vec<_>>>()?;
    RobustnessReport::from_points(per_point)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classifiers::{
        f_lin_reference, f_quad_reference, KernelClassifier, KernelSpec, LinearClassifier,
    };
    use crate::data::{gen_running_example, RunningExampleConfig};
    use alloc::vec;

    fn running(d: usize) -> LabeledDataset {
        gen_running_example(&RunningExampleConfig::with_default_bias(d).unwrap()).unwrap()
    }

    #[test]
    fn exact_rho_lin_is_sqrt_d_a() {
        for d in [4, 25, 100] {
            let ds = running(d);
            let c = Classifier::from(f_lin_reference(d).unwrap());
            let rep = rho_adv(
                &c,
                &ds,
                AdvMethod::Exact,
                &AttackConfig::default(),
                &RandomStream::new(0),
            )
            .unwrap();
            assert!((rep.rho - 0.1).abs() < 1e-12, "d={d} rho={}", rep.rho);
        }
    }

    #[test]
    fn exact_rho_quad_is_independent_of_a() {
        for a in [0.0, 0.01, 0.1] {
            let ds = gen_running_example(&RunningExampleConfig::new(4, a).unwrap()).unwrap();
            let c = Classifier::from(f_quad_reference());
            let rep = rho_adv(
                &c,
                &ds,
                AdvMethod::Exact,
                &AttackConfig::default(),
                &RandomStream::new(0),
            )
            .unwrap();
            assert!((rep.rho - core::f64::consts::FRAC_1_SQRT_2).abs() < 1e-9);
        }
    }

    #[test]
    fn exact_on_kernel_is_unsupported() {
        let k = KernelClassifier::new(
            2,
            vec![vec![1.0, 0.0]],
            vec![1.0],
            0.0,
            KernelSpec::polynomial(2).unwrap(),
        )
        .unwrap();
        let c = Classifier::from(k);
        let ds = LabeledDataset::new(vec![vec![1.0, 1.0], vec![-1.0, 0.5]], vec![1, -1]).unwrap();
        let err = rho_adv(
            &c,
            &ds,
            AdvMethod::Exact,
            &AttackConfig::default(),
            &RandomStream::new(0),
        );
        assert!(matches!(err, Err(Error::UnsupportedMethod(_))));
    }

    #[test]
    fn rho_is_mean_of_points() {
        let ds = running(25);
        let c = Classifier::from(f_lin_reference(25).unwrap());
        let rep = rho_unif(&c, &ds, &NoiseConfig::default(), &RandomStream::new(3)).unwrap();
        let mean = rep.per_point.iter().map(|p| p.delta).sum::<f64>() / rep.per_point.len() as f64;
        assert!((rep.rho - mean).abs() <= 1e-12 * mean);
        assert!(rep.per_point.iter().all(|p| p.method == MethodTag::Noise));
    }

    #[test]
    fn empirical_attack_close_to_exact_linear() {
        let mut rng = RandomStream::new(11);
        for _ in 0..50 {
            let w = rng.normal_vec(6);
            let c = LinearClassifier::new(w, rng.next_normal()).unwrap();
            let x = rng.normal_vec(6);
            let exact = delta_adv_linear_exact(&c, &x).unwrap().delta;
            let cl = Classifier::from(c);
            let emp = delta_adv_empirical(&cl, &x, &AttackConfig::default(), &mut rng).unwrap();
            assert!(emp.delta >= exact - 1e-9);
            assert!(
                emp.delta <= exact * 1.02 + 1e-12,
                "{} vs {}",
                emp.delta,
                exact
            );
            assert!(cl.value(&x).unwrap() * cl.value(&add_scaled(&x, 1.0, &emp.r)).unwrap() <= 0.0);
        }
    }

    #[test]
    fn empirical_attack_on_f_quad() {
        let ds = running(4);
        let c = Classifier::from(f_quad_reference());
        let rep = rho_adv(
            &c,
            &ds,
            AdvMethod::Empirical,
            &AttackConfig::default(),
            &RandomStream::new(5),
        )
        .unwrap();
        for p in &rep.per_point {
            assert!(
                (p.delta / core::f64::consts::FRAC_1_SQRT_2 - 1.0).abs() < 0.05,
                "{}",
                p.delta
            );
        }
    }

    #[test]
    fn boundary_points_have_zero_distance() {
        let c = Classifier::from(LinearClassifier::new(vec![1.0, 0.0], 0.0).unwrap());
        let x = [0.0, 3.0];
        let mut rng = RandomStream::new(1);
        assert_eq!(
            delta_adv_empirical(&c, &x, &AttackConfig::default(), &mut rng)
                .unwrap()
                .delta,
            0.0
        );
        assert_eq!(
            delta_unif_empirical(&c, &x, &NoiseConfig::default(), &mut rng)
                .unwrap()
                .eta,
            0.0
        );
    }

    #[test]
    fn noise_radius_dominates_exact_distance() {
        let mut rng = RandomStream::new(8);
        for eps in [0.0, 0.01, 0.1] {
            let cfg = NoiseConfig {
                epsilon: eps,
                samples: 200,
                ..NoiseConfig::default()
            };
            for _ in 0..20 {
                let c = LinearClassifier::new(rng.normal_vec(5), rng.next_normal()).unwrap();
                let x = rng.normal_vec(5);
                let exact = delta_adv_linear_exact(&c, &x).unwrap().delta;
                let est = delta_unif_empirical(&Classifier::from(c), &x, &cfg, &mut rng).unwrap();
                assert!(est.eta >= exact, "{} < {}", est.eta, exact);
            }
        }
    }

    #[test]
    fn noise_flags_bracket_ends() {
        let c = Classifier::from(LinearClassifier::new(vec![1.0], -1.0).unwrap());
        let mut rng = RandomStream::new(2);
        let tight = NoiseConfig {
            eta_bracket: Some((2.0, 3.0)),
            ..NoiseConfig::default()
        };
        let est = delta_unif_empirical(&c, &[0.0], &tight, &mut rng).unwrap();
        assert_eq!(est.status, BracketStatus::BelowBracket);
        let far = NoiseConfig {
            eta_bracket: Some((0.1, 0.5)),
            ..NoiseConfig::default()
        };
        let est = delta_unif_empirical(&c, &[0.0], &far, &mut rng).unwrap();
        assert_eq!((est.eta, est.status), (0.5, BracketStatus::AtUpperEnd));
    }

    #[test]
    fn reports_are_reproducible() {
        let ds = running(9);
        let c = Classifier::from(f_lin_reference(9).unwrap());
        let a = rho_adv(
            &c,
            &ds,
            AdvMethod::Empirical,
            &AttackConfig::default(),
            &RandomStream::new(4),
        )
        .unwrap();
        let b = rho_adv(
            &c,
            &ds,
            AdvMethod::Empirical,
            &AttackConfig::default(),
            &RandomStream::new(4),
        )
        .unwrap();
        assert_eq!(a, b);
        let cfg = AttackConfig::default();
        let eval = AdvEvaluator::new(&c, AdvMethod::Empirical, &cfg).unwrap();
        let master = RandomStream::new(4);
        let reversed: Vec<_> = (0..ds.len())
            .rev()
            .map(|i| eval.point(i, ds.point(i), &master).unwrap())
            .collect();
        for (i, p) in reversed.iter().rev().enumerate() {
            assert_eq!(p, &a.per_point[i]);
        }
    }

    #[test]
    fn invalid_configs_are_rejected() {
        let bad = AttackConfig {
            c_grid: vec![1.0, 1.0],
            ..AttackConfig::default()
        };
        assert!(bad.validate().is_err());
        let bad = AttackConfig {
            inner_steps: 0,
            ..AttackConfig::default()
        };
        assert!(bad.validate().is_err());
        let bad = NoiseConfig {
            samples: 0,
            ..NoiseConfig::default()
        };
        assert!(bad.validate().is_err());
        let bad = NoiseConfig {
            eta_bracket: Some((1.0, 0.5)),
            ..NoiseConfig::default()
        };
        assert!(bad.validate().is_err());
    }
}
