//! Deterministic low-level numerical kernels.

mod matrix;
mod random;
mod roots;

pub use matrix::{eig_sym, nuclear_norm, SpectralDecomposition, SymMatrix};
pub use random::{sample_sphere, RandomStream};
pub use roots::{solve_scalar_root, solve_scalar_root_with_derivative, DEFAULT_ROOT_TOL};

use alloc::vec::Vec;

#[inline]
pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Euclidean norm.
#[inline]
pub fn norm2(a: &[f64]) -> f64 {
    libm::sqrt(dot(a, a))
}

/// Euclidean distance between two points.
pub fn dist2(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    libm::sqrt(a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum())
}

/// `x + t * r`
pub fn add_scaled(x: &[f64], t: f64, r: &[f64]) -> Vec<f64> {
    x.iter().zip(r).map(|(a, b)| a + t * b).collect()
}

pub fn scale(x: &[f64], t: f64) -> Vec<f64> {
    x.iter().map(|a| a * t).collect()
}
