//! Classifier families, reference classifiers and empirical risk.
//!
//! Every classifier predicts `sign(f(x))` with the convention `sign(0) = +1`.

mod train;

pub use train::{
    cross_validate_lambda, hinge_objective_linear, train_kernel_svm, train_linear_svm,
    CrossValidation, SvmConfig, DEFAULT_LAMBDA_GRID,
};

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::data::LabeledDataset;
use crate::numerics::{dist2, dot, eig_sym, norm2, SpectralDecomposition, SymMatrix};
use crate::{Error, Result};

/// `f(x) = wᵀx + b`
#[derive(Debug, Clone, PartialEq)]
pub struct LinearClassifier {
    w: Vec<f64>,
    b: f64,
}

impl LinearClassifier {
    pub fn new(w: Vec<f64>, b: f64) -> Result<Self> {
        if w.is_empty() || w.iter().chain([&b]).any(|v| !v.is_finite()) {
            return Err(Error::invalid(
                "linear classifier needs finite, non-empty weights",
            ));
        }
        if norm2(&w) == 0.0 {
            return Err(Error::invalid("linear classifier weight vector is zero"));
        }
        Ok(LinearClassifier { w, b })
    }

    pub fn weights(&self) -> &[f64] {
        &self.w
    }

    pub fn intercept(&self) -> f64 {
        self.b
    }

    pub fn dim(&self) -> usize {
        self.w.len()
    }

    pub fn weight_norm(&self) -> f64 {
        norm2(&self.w)
    }

    /// Whether `|b| ≤ M‖w‖₂`; otherwise the classifier is constant on the
    /// ball of radius `M`.
    pub fn intercept_within_radius(&self, radius: f64) -> bool {
        self.b.abs() <= radius * self.weight_norm()
    }

    pub(crate) fn eval(&self, x: &[f64]) -> f64 {
        dot(&self.w, x) + self.b
    }
}

/// `f(x) = xᵀAx` for a symmetric `A`; no linear or constant term.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadraticClassifier {
    a: SymMatrix,
}

impl QuadraticClassifier {
    pub fn new(a: SymMatrix) -> Result<Self> {
        if !a.is_finite() {
            return Err(Error::invalid(
                "quadratic classifier matrix has non-finite entries",
            ));
        }
        Ok(QuadraticClassifier { a })
    }

    pub fn matrix(&self) -> &SymMatrix {
        &self.a
    }

    pub fn dim(&self) -> usize {
        self.a.dim()
    }

    pub fn spectrum(&self) -> Result<SpectralDecomposition> {
        eig_sym(&self.a)
    }

    /// Spectrum, rejecting classifiers that assign one label everywhere
    /// (`λ_min ≥ 0` or `λ_max ≤ 0`).
    pub fn nontrivial_spectrum(&self) -> Result<SpectralDecomposition> {
        let spec = self.spectrum()?;
        let (lo, hi) = (spec.min_eigenvalue(), spec.max_eigenvalue());
        if !(lo < 0.0 && hi > 0.0) {
            return Err(Error::TrivialClassifier(format!(
                "need λ_min < 0 < λ_max, got λ_min = {lo}, λ_max = {hi}"
            )));
        }
        Ok(spec)
    }

    pub(crate) fn eval(&self, x: &[f64]) -> f64 {
        self.a.quadratic_form(x)
    }
}

/// Kernel of a [`KernelClassifier`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum KernelSpec {
    /// `(sᵀx + 1)^q`
    Polynomial { degree: u32 },
    /// `exp(−‖s − x‖² / (2σ²))`, parameterized by `σ²`.
    Rbf { sigma2: f64 },
}

impl KernelSpec {
    pub fn polynomial(degree: u32) -> Result<Self> {
        if degree == 0 {
            return Err(Error::invalid(
                "polynomial kernel degree must be at least 1",
            ));
        }
        Ok(KernelSpec::Polynomial { degree })
    }

    pub fn rbf(sigma2: f64) -> Result<Self> {
        if !(sigma2 > 0.0) || !sigma2.is_finite() {
            return Err(Error::invalid("rbf width σ² must be positive"));
        }
        Ok(KernelSpec::Rbf { sigma2 })
    }

    fn validate(&self) -> Result<()> {
        match *self {
            KernelSpec::Polynomial { degree } => Self::polynomial(degree).map(|_| ()),
            KernelSpec::Rbf { sigma2 } => Self::rbf(sigma2).map(|_| ()),
        }
    }

    pub fn eval(&self, s: &[f64], x: &[f64]) -> f64 {
        match *self {
            KernelSpec::Polynomial { degree } => libm::pow(dot(s, x) + 1.0, degree as f64),
            KernelSpec::Rbf { sigma2 } => {
                let d = dist2(s, x);
                libm::exp(-d * d / (2.0 * sigma2))
            }
        }
    }

    /// Adds `coef · ∇ₓK(s, x)` to `out`.
    fn add_gradient(&self, s: &[f64], x: &[f64], coef: f64, out: &mut [f64]) {
        match *self {
            KernelSpec::Polynomial { degree } => {
                let base = dot(s, x) + 1.0;
                let g = coef * degree as f64 * libm::pow(base, degree as f64 - 1.0);
                out.iter_mut().zip(s).for_each(|(o, si)| *o += g * si);
            }
            KernelSpec::Rbf { sigma2 } => {
                let d = dist2(s, x);
                let k = libm::exp(-d * d / (2.0 * sigma2));
                let g = coef * k / sigma2;
                out.iter_mut()
                    .zip(s.iter().zip(x))
                    .for_each(|(o, (si, xi))| *o += g * (si - xi));
            }
        }
    }
}

/// `f(x) = Σᵢ αᵢ K(sᵢ, x) + b`
#[derive(Debug, Clone, PartialEq)]
pub struct KernelClassifier {
    support: Vec<Vec<f64>>,
    coefficients: Vec<f64>,
    intercept: f64,
    kernel: KernelSpec,
    dim: usize,
}

impl KernelClassifier {
    pub fn new(
        dim: usize,
        support: Vec<Vec<f64>>,
        coefficients: Vec<f64>,
        intercept: f64,
        kernel: KernelSpec,
    ) -> Result<Self> {
        kernel.validate()?;
        if dim == 0 {
            return Err(Error::invalid(
                "kernel classifier dimension must be positive",
            ));
        }
        Error::check_dim(support.len(), coefficients.len())?;
        for s in &support {
            Error::check_dim(dim, s.len())?;
        }
        if coefficients
            .iter()
            .chain(support.iter().flatten())
            .chain([&intercept])
            .any(|v| !v.is_finite())
        {
            return Err(Error::invalid(
                "kernel classifier has non-finite parameters",
            ));
        }
        Ok(KernelClassifier {
            support,
            coefficients,
            intercept,
            kernel,
            dim,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn support_points(&self) -> &[Vec<f64>] {
        &self.support
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.coefficients
    }

    pub fn intercept(&self) -> f64 {
        self.intercept
    }

    pub fn kernel(&self) -> KernelSpec {
        self.kernel
    }

    pub(crate) fn eval(&self, x: &[f64]) -> f64 {
        self.support
            .iter()
            .zip(&self.coefficients)
            .map(|(s, a)| a * self.kernel.eval(s, x))
            .sum::<f64>()
            + self.intercept
    }

    fn gradient(&self, x: &[f64]) -> Vec<f64> {
        let mut g = vec![0.0; self.dim];
        for (s, a) in self.support.iter().zip(&self.coefficients) {
            self.kernel.add_gradient(s, x, *a, &mut g);
        }
        g
    }
}

/// Any supported binary classifier.
#[derive(Debug, Clone, PartialEq)]
pub enum Classifier {
    Linear(LinearClassifier),
    Quadratic(QuadraticClassifier),
    Kernel(KernelClassifier),
}

impl From<LinearClassifier> for Classifier {
    fn from(c: LinearClassifier) -> Self {
        Classifier::Linear(c)
    }
}

impl From<QuadraticClassifier> for Classifier {
    fn from(c: QuadraticClassifier) -> Self {
        Classifier::Quadratic(c)
    }
}

impl From<KernelClassifier> for Classifier {
    fn from(c: KernelClassifier) -> Self {
        Classifier::Kernel(c)
    }
}

/// `+1` when `v ≥ 0`, `-1` otherwise.
#[inline]
pub fn sign(v: f64) -> i8 {
    if v >= 0.0 {
        1
    } else {
        -1
    }
}

impl Classifier {
    pub fn dim(&self) -> usize {
        match self {
            Classifier::Linear(c) => c.dim(),
            Classifier::Quadratic(c) => c.dim(),
            Classifier::Kernel(c) => c.dim(),
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Classifier::Linear(_) => "linear",
            Classifier::Quadratic(_) => "quadratic",
            Classifier::Kernel(_) => "kernel",
        }
    }

    /// `f(x)` without the dimension check.
    #[inline]
    pub(crate) fn eval(&self, x: &[f64]) -> f64 {
        match self {
            Classifier::Linear(c) => c.eval(x),
            Classifier::Quadratic(c) => c.eval(x),
            Classifier::Kernel(c) => c.eval(x),
        }
    }

    /// Gradient without the dimension check.
    pub(crate) fn grad(&self, x: &[f64]) -> Vec<f64> {
        match self {
            Classifier::Linear(c) => c.w.clone(),
            Classifier::Quadratic(c) => c.a.mul_vec(x).into_iter().map(|v| 2.0 * v).collect(),
            Classifier::Kernel(c) => c.gradient(x),
        }
    }

    pub fn value(&self, x: &[f64]) -> Result<f64> {
        Error::check_dim(self.dim(), x.len())?;
        Ok(self.eval(x))
    }

    /// Gradient of `f` at `x` (all supported families are smooth).
    pub fn subgradient(&self, x: &[f64]) -> Result<Vec<f64>> {
        Error::check_dim(self.dim(), x.len())?;
        Ok(self.grad(x))
    }

    pub fn predict(&self, x: &[f64]) -> Result<i8> {
        self.value(x).map(sign)
    }

    /// Fraction of points whose predicted label differs from the true one.
    pub fn risk(&self, ds: &LabeledDataset) -> Result<f64> {
        Error::check_dim(self.dim(), ds.dim())?;
        let wrong = ds.iter().filter(|(x, y)| sign(self.eval(x)) != *y).count();
        Ok(wrong as f64 / ds.len() as f64)
    }

    /// `sup |f|` over the ball `‖x‖₂ ≤ M`. Exact for linear and quadratic
    /// classifiers; for kernel expansions an upper estimate, signalled by
    /// `exact == false`.
    pub fn sup_norm_on_ball(&self, radius: f64) -> Result<SupNorm> {
        if !(radius >= 0.0) {
            return Err(Error::invalid("ball radius must be non-negative"));
        }
        Ok(match self {
            Classifier::Linear(c) => SupNorm {
                value: radius * c.weight_norm() + c.b.abs(),
                exact: true,
            },
            Classifier::Quadratic(c) => {
                let spec = c.spectrum()?;
                let top = spec.min_eigenvalue().abs().max(spec.max_eigenvalue().abs());
                SupNorm {
                    value: top * radius * radius,
                    exact: true,
                }
            }
            Classifier::Kernel(c) => {
                let per_kernel = |s: &[f64]| match c.kernel {
                    KernelSpec::Polynomial { degree } => {
                        libm::pow(norm2(s) * radius + 1.0, degree as f64)
                    }
                    KernelSpec::Rbf { .. } => 1.0,
                };
                let value = c
                    .support
                    .iter()
                    .zip(&c.coefficients)
                    .map(|(s, a)| a.abs() * per_kernel(s))
                    .sum::<f64>()
                    + c.intercept.abs();
                SupNorm {
                    value,
                    exact: false,
                }
            }
        })
    }
}

/// Result of [`Classifier::sup_norm_on_ball`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SupNorm {
    pub value: f64,
    pub exact: bool,
}

/// `f_lin(x) = (1/√d) 1ᵀx − 1`
pub fn f_lin_reference(d: usize) -> Result<LinearClassifier> {
    if d == 0 {
        return Err(Error::invalid("dimension must be positive"));
    }
    LinearClassifier::new(vec![1.0 / libm::sqrt(d as f64); d], -1.0)
}

/// `f_quad(x) = x₁x₂ + x₃x₄ − x₁x₃ − x₂x₄` on 2×2 images.
pub fn f_quad_reference() -> QuadraticClassifier {
    let a = SymMatrix::from_rows(&[
        vec![0.0, 0.5, -0.5, 0.0],
        vec![0.5, 0.0, 0.0, -0.5],
        vec![-0.5, 0.0, 0.0, 0.5],
        vec![0.0, -0.5, 0.5, 0.0],
    ])
    .expect("4x4 literal");
    QuadraticClassifier { a }
}
