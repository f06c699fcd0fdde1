//! Stochastic subgradient (Pegasos-style) SVM training.
//!
//! Step size `1/(λt)` on the L2-regularized hinge loss. The linear trainer
//! appends a constant feature 1 so the intercept is learned (and
//! regularized) like any other weight. The kernel trainer keeps the
//! primal expansion `f = (1/(λT)) Σ αⱼ yⱼ K(xⱼ, ·)` with integer counts αⱼ.

use alloc::vec;
use alloc::vec::Vec;

use super::{sign, Classifier, KernelClassifier, KernelSpec, LinearClassifier};
use crate::data::LabeledDataset;
use crate::numerics::{dot, RandomStream};
use crate::{Error, Result};

/// Regularization grid `10⁻⁴ … 10¹` used by cross-validation.
pub const DEFAULT_LAMBDA_GRID: [f64; 6] = [1e-4, 1e-3, 1e-2, 1e-1, 1.0, 10.0];

const GRAM_CACHE_LIMIT: usize = 3000;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SvmConfig {
    pub lambda: f64,
    pub epochs: usize,
}

impl Default for SvmConfig {
    fn default() -> Self {
        SvmConfig {
            lambda: 1e-3,
            epochs: 50,
        }
    }
}

impl SvmConfig {
    fn validate(&self) -> Result<()> {
        if !(self.lambda > 0.0) || !self.lambda.is_finite() {
            return Err(Error::invalid("regularization λ must be positive"));
        }
        if self.epochs == 0 {
            return Err(Error::invalid("epochs must be at least 1"));
        }
        Ok(())
    }
}

/// `λ/2 (‖w‖² + b²) + mean hinge`, the objective minimized by
/// [`train_linear_svm`].
pub fn hinge_objective_linear(
    c: &LinearClassifier,
    ds: &LabeledDataset,
    lambda: f64,
) -> Result<f64> {
    Error::check_dim(c.dim(), ds.dim())?;
    let reg = 0.5 * lambda * (dot(c.weights(), c.weights()) + c.intercept() * c.intercept());
    let loss = ds
        .iter()
        .map(|(x, y)| (1.0 - y as f64 * c.eval(x)).max(0.0))
        .sum::<f64>()
        / ds.len() as f64;
    Ok(reg + loss)
}

pub fn train_linear_svm(
    ds: &LabeledDataset,
    cfg: &SvmConfig,
    rng: &mut RandomStream,
) -> Result<LinearClassifier> {
    cfg.validate()?;
    ds.require_both_classes()?;
    let n = ds.len();
    let d = ds.dim();
    let lambda = cfg.lambda;
    let radius = 1.0 / libm::sqrt(lambda);
    // Augmented weights [w, b]; represented as scale * v to keep shrink O(1).
    let mut v = vec![0.0; d + 1];
    let mut scale = 1.0;
    let mut sq_norm = 0.0;

    let total = cfg.epochs * n;
    for t in 1..=total {
        let i = rng.below(n);
        let x = ds.point(i);
        let y = ds.label(i) as f64;
        let eta = 1.0 / (lambda * t as f64);
        let margin = y * scale * (dot(&v[..d], x) + v[d]);

        let shrink = 1.0 - eta * lambda;
        if shrink <= 0.0 {
            v.iter_mut().for_each(|e| *e = 0.0);
            scale = 1.0;
            sq_norm = 0.0;
        } else {
            scale *= shrink;
            sq_norm *= shrink * shrink;
        }
        if margin < 1.0 {
            let step = eta * y / scale;
            // ‖scale·(v + step·x̃)‖² expanded to keep sq_norm current.
            let vx = dot(&v[..d], x) + v[d];
            let xx = dot(x, x) + 1.0;
            v[..d].iter_mut().zip(x).for_each(|(e, xi)| *e += step * xi);
            v[d] += step;
            sq_norm += scale * scale * (2.0 * step * vx + step * step * xx);
        }
        if sq_norm > radius * radius {
            scale *= radius / libm::sqrt(sq_norm);
            sq_norm = radius * radius;
        }
        if scale < 1e-100 {
            v.iter_mut().for_each(|e| *e *= scale);
            scale = 1.0;
        }
    }
    let w: Vec<f64> = v[..d].iter().map(|e| e * scale).collect();
    let b = v[d] * scale;
    LinearClassifier::new(w, b)
        .map_err(|_| Error::NotConverged("linear SVM training (zero weights)"))
}

pub fn train_kernel_svm(
    ds: &LabeledDataset,
    kernel: KernelSpec,
    cfg: &SvmConfig,
    rng: &mut RandomStream,
) -> Result<KernelClassifier> {
    kernel.validate()?;
    cfg.validate()?;
    ds.require_both_classes()?;
    let n = ds.len();
    let gram: Option<Vec<f64>> = (n <= GRAM_CACHE_LIMIT).then(|| {
        let mut g = vec![0.0; n * n];
        for i in 0..n {
            for j in i..n {
                let k = kernel.eval(ds.point(i), ds.point(j));
                g[i * n + j] = k;
                g[j * n + i] = k;
            }
        }
        g
    });

    let mut counts = vec![0u64; n];
    // scores[k] = Σⱼ αⱼ yⱼ K(xⱼ, x_k)
    let mut scores = vec![0.0; n];
    let total = cfg.epochs * n;
    for t in 1..=total {
        let i = rng.below(n);
        let y = ds.label(i) as f64;
        if y * scores[i] / (cfg.lambda * t as f64) < 1.0 {
            counts[i] += 1;
            for (k, s) in scores.iter_mut().enumerate() {
                let kik = match &gram {
                    Some(g) => g[i * n + k],
                    None => kernel.eval(ds.point(i), ds.point(k)),
                };
                *s += y * kik;
            }
        }
    }

    let norm = 1.0 / (cfg.lambda * total as f64);
    let mut support = Vec::new();
    let mut coefficients = Vec::new();
    for (i, &c) in counts.iter().enumerate() {
        if c > 0 {
            support.push(ds.point(i).to_vec());
            coefficients.push(c as f64 * ds.label(i) as f64 * norm);
        }
    }
    KernelClassifier::new(ds.dim(), support, coefficients, 0.0, kernel)
}

/// Outcome of [`cross_validate_lambda`].
#[derive(Debug, Clone, PartialEq)]
pub struct CrossValidation {
    pub best_lambda: f64,
    /// `(λ, mean held-out error)` for every grid value.
    pub errors: Vec<(f64, f64)>,
}

/// Stratified k-fold selection of λ. Ties go to the larger λ.
pub fn cross_validate_lambda<F>(
    ds: &LabeledDataset,
    grid: &[f64],
    folds: usize,
    rng: &mut RandomStream,
    mut train: F,
) -> Result<CrossValidation>
where
    F: FnMut(&LabeledDataset, f64, &mut RandomStream) -> Result<Classifier>,
{
    if grid.is_empty() || folds < 2 {
        return Err(Error::invalid(
            "cross-validation needs a non-empty grid and at least 2 folds",
        ));
    }
    ds.require_both_classes()?;
    let (pos, neg) = ds.class_counts();
    if pos.min(neg) < folds {
        return Err(Error::invalid(
            "each class needs at least as many points as folds",
        ));
    }

    let mut assignment = vec![0usize; ds.len()];
    for class in [1i8, -1] {
        let mut idx: Vec<usize> = (0..ds.len()).filter(|&i| ds.label(i) == class).collect();
        for k in (1..idx.len()).rev() {
            let j = rng.below(k + 1);
            idx.swap(k, j);
        }
        for (pos, &i) in idx.iter().enumerate() {
            assignment[i] = pos % folds;
        }
    }

    let mut errors = Vec::with_capacity(grid.len());
    for &lambda in grid {
        let mut wrong = 0usize;
        for fold in 0..folds {
            let train_idx: Vec<usize> = (0..ds.len()).filter(|&i| assignment[i] != fold).collect();
            let test_idx: Vec<usize> = (0..ds.len()).filter(|&i| assignment[i] == fold).collect();
            let train_set = ds.subset(&train_idx)?;
            let model = train(&train_set, lambda, rng)?;
            wrong += test_idx
                .iter()
                .filter(|&&i| sign(model.eval(ds.point(i))) != ds.label(i))
                .count();
        }
        errors.push((lambda, wrong as f64 / ds.len() as f64));
    }
    let best_lambda = errors
        .iter()
        .fold(None::<(f64, f64)>, |best, &(l, e)| match best {
            Some((_, be)) if be < e => best,
            _ => Some((l, e)),
        })
        .map(|(l, _)| l)
        .expect("grid is non-empty");
    Ok(CrossValidation {
        best_lambda,
        errors,
    })
}
