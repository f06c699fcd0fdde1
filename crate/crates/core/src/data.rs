//! Labeled datasets, the line-image running example, class moments and κ.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::numerics::{dist2, norm2, SymMatrix};
use crate::{Error, Result};

/// Points in `R^d` with labels in `{-1, +1}` and a support radius `M`.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledDataset {
    points: Vec<Vec<f64>>,
    labels: Vec<i8>,
    dim: usize,
    radius: f64,
}

impl LabeledDataset {
    /// Validates dimensions and labels; `M` is set to the largest point norm.
    pub fn new(points: Vec<Vec<f64>>, labels: Vec<i8>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::invalid("dataset is empty"));
        }
        Error::check_dim(points.len(), labels.len())?;
        let dim = points[0].len();
        if dim == 0 {
            return Err(Error::invalid("points must have at least one coordinate"));
        }
        for p in &points {
            Error::check_dim(dim, p.len())?;
            if p.iter().any(|v| !v.is_finite()) {
                return Err(Error::invalid("point has non-finite coordinates"));
            }
        }
        if let Some(bad) = labels.iter().find(|&&y| y != 1 && y != -1) {
            return Err(Error::invalid(format!("label {bad} is not -1 or +1")));
        }
        let radius = points.iter().map(|p| norm2(p)).fold(0.0, f64::max);
        Ok(LabeledDataset {
            points,
            labels,
            dim,
            radius,
        })
    }

    /// Raises the support radius `M`; it can never go below the largest
    /// point norm.
    pub fn with_radius(mut self, radius: f64) -> Result<Self> {
        if !(radius >= self.radius) || !radius.is_finite() {
            return Err(Error::invalid(format!(
                "support radius {radius} is below the largest point norm {}",
                self.radius
            )));
        }
        self.radius = radius;
        Ok(self)
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Support radius `M`.
    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn points(&self) -> &[Vec<f64>] {
        &self.points
    }

    pub fn labels(&self) -> &[i8] {
        &self.labels
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.points[i]
    }

    pub fn label(&self, i: usize) -> i8 {
        self.labels[i]
    }

    pub fn iter(&self) -> impl Iterator<Item = (&[f64], i8)> {
        self.points
            .iter()
            .map(Vec::as_slice)
            .zip(self.labels.iter().copied())
    }

    pub fn class_counts(&self) -> (usize, usize) {
        let pos = self.labels.iter().filter(|&&y| y == 1).count();
        (pos, self.labels.len() - pos)
    }

    pub fn has_both_classes(&self) -> bool {
        let (pos, neg) = self.class_counts();
        pos > 0 && neg > 0
    }

    pub(crate) fn require_both_classes(&self) -> Result<()> {
        if self.has_both_classes() {
            Ok(())
        } else {
            Err(Error::SingleClass)
        }
    }

    /// Subset by indices, keeping the current support radius.
    pub fn subset(&self, indices: &[usize]) -> Result<Self> {
        let points = indices.iter().map(|&i| self.points[i].clone()).collect();
        let labels = indices.iter().map(|&i| self.labels[i]).collect();
        let sub = LabeledDataset::new(points, labels)?;
        sub.with_radius(self.radius)
    }

    /// Copy with labels `+1` and `-1` exchanged.
    pub fn flipped_labels(&self) -> Self {
        LabeledDataset {
            labels: self.labels.iter().map(|y| -y).collect(),
            ..self.clone()
        }
    }
}

/// Parameters of the vertical/horizontal line images.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RunningExampleConfig {
    /// Number of pixels; must be a perfect square.
    pub d: usize,
    /// Bias added to class +1 and subtracted from class -1.
    pub a: f64,
}

impl RunningExampleConfig {
    pub fn new(d: usize, a: f64) -> Result<Self> {
        let cfg = RunningExampleConfig { d, a };
        cfg.side()?;
        if !(a >= 0.0) || !a.is_finite() {
            return Err(Error::invalid("bias a must be finite and non-negative"));
        }
        Ok(cfg)
    }

    /// The customary bias `a = 0.1/√d`.
    pub fn with_default_bias(d: usize) -> Result<Self> {
        Self::new(d, 0.1 / libm::sqrt(d as f64))
    }

    /// Image side `√d`.
    pub fn side(&self) -> Result<usize> {
        let s = libm::round(libm::sqrt(self.d as f64)) as usize;
        if self.d == 0 || s * s != self.d {
            return Err(Error::invalid(format!(
                "d = {} is not a positive perfect square",
                self.d
            )));
        }
        Ok(s)
    }
}

/// Generates the `2√d` line images.
///
/// Class +1: one image per column, line pixels `1+a`, background `a`.
/// Class -1: one image per row, line pixels `1−a`, background `−a`.
/// Images are vectorized column-major, so at `d = 4` the first class +1
/// point is `[1+a, 1+a, a, a]`. Class +1 points come first.
pub fn gen_running_example(cfg: &RunningExampleConfig) -> Result<LabeledDataset> {
    let cfg = RunningExampleConfig::new(cfg.d, cfg.a)?;
    let side = cfg.side()?;
    let idx = |row: usize, col: usize| col * side + row;
    let mut points = Vec::with_capacity(2 * side);
    let mut labels = Vec::with_capacity(2 * side);
    for col in 0..side {
        let mut img = vec![cfg.a; cfg.d];
        for row in 0..side {
            img[idx(row, col)] = 1.0 + cfg.a;
        }
        points.push(img);
        labels.push(1);
    }
    for row in 0..side {
        let mut img = vec![-cfg.a; cfg.d];
        for col in 0..side {
            img[idx(row, col)] = 1.0 - cfg.a;
        }
        points.push(img);
        labels.push(-1);
    }
    LabeledDataset::new(points, labels)
}

/// Empirical class priors and means.
#[derive(Debug, Clone, PartialEq)]
pub struct ClassMeans {
    pub p1: f64,
    pub p_m1: f64,
    pub mean1: Vec<f64>,
    pub mean_m1: Vec<f64>,
}

impl ClassMeans {
    /// `‖E₁x − E₋₁x‖₂`
    pub fn mean_difference_norm(&self) -> f64 {
        dist2(&self.mean1, &self.mean_m1)
    }

    /// `‖p₁E₁x − p₋₁E₋₁x‖₂`, the distinguishability of linear classifiers.
    pub fn weighted_mean_difference_norm(&self) -> f64 {
        libm::sqrt(
            self.mean1
                .iter()
                .zip(&self.mean_m1)
                .map(|(a, b)| {
                    let v = self.p1 * a - self.p_m1 * b;
                    v * v
                })
                .sum(),
        )
    }
}

/// Priors, means and second-moment matrices `C±1 = E±1(x xᵀ)` per class.
#[derive(Debug, Clone, PartialEq)]
pub struct ClassMoments {
    pub means: ClassMeans,
    pub c1: SymMatrix,
    pub c_m1: SymMatrix,
}

impl ClassMoments {
    pub fn p1(&self) -> f64 {
        self.means.p1
    }

    pub fn p_m1(&self) -> f64 {
        self.means.p_m1
    }

    /// `p₁C₁ − p₋₁C₋₁`
    pub fn weighted_second_moment_difference(&self) -> SymMatrix {
        self.c1
            .linear_combination(self.means.p1, &self.c_m1, -self.means.p_m1)
            .expect("moment matrices share a dimension")
    }

    /// `C₁ − C₋₁`
    pub fn second_moment_difference(&self) -> SymMatrix {
        self.c1
            .linear_combination(1.0, &self.c_m1, -1.0)
            .expect("moment matrices share a dimension")
    }
}

/// Priors and class means only; cheap for large `d`.
pub fn compute_means(ds: &LabeledDataset) -> Result<ClassMeans> {
    ds.require_both_classes()?;
    let (n1, n_m1) = ds.class_counts();
    let mut mean1 = vec![0.0; ds.dim()];
    let mut mean_m1 = vec![0.0; ds.dim()];
    for (x, y) in ds.iter() {
        let (acc, n) = if y == 1 {
            (&mut mean1, n1)
        } else {
            (&mut mean_m1, n_m1)
        };
        acc.iter_mut().zip(x).for_each(|(m, v)| *m += v / n as f64);
    }
    let total = ds.len() as f64;
    Ok(ClassMeans {
        p1: n1 as f64 / total,
        p_m1: n_m1 as f64 / total,
        mean1,
        mean_m1,
    })
}

/// Empirical priors, means and second moments.
pub fn compute_moments(ds: &LabeledDataset) -> Result<ClassMoments> {
    let means = compute_means(ds)?;
    let (n1, n_m1) = ds.class_counts();
    let mut c1 = SymMatrix::zeros(ds.dim());
    let mut c_m1 = SymMatrix::zeros(ds.dim());
    for (x, y) in ds.iter() {
        if y == 1 {
            c1.add_outer(x, 1.0 / n1 as f64);
        } else {
            c_m1.add_outer(x, 1.0 / n_m1 as f64);
        }
    }
    Ok(ClassMoments { means, c1, c_m1 })
}

/// Mean distance from each point to its nearest point of the other class.
pub fn kappa(ds: &LabeledDataset) -> Result<f64> {
    ds.require_both_classes()?;
    let total: f64 = ds
        .iter()
        .map(|(x, y)| {
            ds.iter()
                .filter(|(_, yj)| *yj != y)
                .map(|(xj, _)| dist2(x, xj))
                .fold(f64::INFINITY, f64::min)
        })
        .sum();
    Ok(total / ds.len() as f64)
}

/// Rescales every point to unit Euclidean norm; `M` becomes 1.
pub fn normalize_unit(ds: &LabeledDataset) -> Result<LabeledDataset> {
    let mut points = Vec::with_capacity(ds.len());
    for (i, x) in ds.points().iter().enumerate() {
        let n = norm2(x);
        if n == 0.0 {
            return Err(Error::invalid(format!("point {i} has zero norm")));
        }
        points.push(x.iter().map(|v| v / n).collect());
    }
    let out = LabeledDataset::new(points, ds.labels().to_vec())?;
    let radius = out.radius.max(1.0);
    out.with_radius(radius)
}
