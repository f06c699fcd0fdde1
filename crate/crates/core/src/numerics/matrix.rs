use alloc::vec;
use alloc::vec::Vec;

use crate::{Error, Result};

/// Dense symmetric matrix stored row-major.
///
/// Construction symmetrizes the input as `(X + Xᵀ)/2`, so
/// `get(i, j) == get(j, i)` holds bit-for-bit.
#[derive(Debug, Clone, PartialEq)]
pub struct SymMatrix {
    dim: usize,
    entries: Vec<f64>,
}

impl SymMatrix {
    /// Builds from `dim * dim` row-major entries, symmetrizing them.
    pub fn from_row_major(dim: usize, entries: Vec<f64>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::invalid("matrix dimension must be positive"));
        }
        if entries.len() != dim * dim {
            return Err(Error::DimensionMismatch {
                expected: dim * dim,
                found: entries.len(),
            });
        }
        let mut m = SymMatrix { dim, entries };
        m.symmetrize();
        Ok(m)
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let dim = rows.len();
        let mut entries = Vec::with_capacity(dim * dim);
        for row in rows {
            Error::check_dim(dim, row.len())?;
            entries.extend_from_slice(row);
        }
        Self::from_row_major(dim, entries)
    }

    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> f64) -> Result<Self> {
        let mut entries = Vec::with_capacity(dim * dim);
        for i in 0..dim {
            for j in 0..dim {
                entries.push(f(i, j));
            }
        }
        Self::from_row_major(dim, entries)
    }

    pub fn zeros(dim: usize) -> Self {
        SymMatrix {
            dim,
            entries: vec![0.0; dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        Self::diagonal(&vec![1.0; dim])
    }

    pub fn diagonal(diag: &[f64]) -> Self {
        let dim = diag.len();
        let mut m = Self::zeros(dim);
        for (i, d) in diag.iter().enumerate() {
            m.entries[i * dim + i] = *d;
        }
        m
    }

    fn symmetrize(&mut self) {
        let n = self.dim;
        for i in 0..n {
            for j in (i + 1)..n {
                let v = 0.5 * (self.entries[i * n + j] + self.entries[j * n + i]);
                self.entries[i * n + j] = v;
                self.entries[j * n + i] = v;
            }
        }
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[i * self.dim + j]
    }

    /// Row-major entries.
    pub fn as_slice(&self) -> &[f64] {
        &self.entries
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.entries[i * self.dim..(i + 1) * self.dim]
    }

    pub fn is_finite(&self) -> bool {
        self.entries.iter().all(|v| v.is_finite())
    }

    pub fn trace(&self) -> f64 {
        (0..self.dim).map(|i| self.get(i, i)).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        libm::sqrt(self.entries.iter().map(|v| v * v).sum())
    }

    /// `A x`
    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        (0..self.dim).map(|i| super::dot(self.row(i), x)).collect()
    }

    /// `xᵀ A x`
    pub fn quadratic_form(&self, x: &[f64]) -> f64 {
        (0..self.dim)
            .map(|i| x[i] * super::dot(self.row(i), x))
            .sum()
    }

    /// `xᵀ A y`
    pub fn bilinear_form(&self, x: &[f64], y: &[f64]) -> f64 {
        (0..self.dim)
            .map(|i| x[i] * super::dot(self.row(i), y))
            .sum()
    }

    /// `s·self + t·other`
    pub fn linear_combination(&self, s: f64, other: &SymMatrix, t: f64) -> Result<SymMatrix> {
        Error::check_dim(self.dim, other.dim)?;
        Ok(SymMatrix {
            dim: self.dim,
            entries: self
                .entries
                .iter()
                .zip(&other.entries)
                .map(|(a, b)| s * a + t * b)
                .collect(),
        })
    }

    pub fn scaled(&self, s: f64) -> SymMatrix {
        SymMatrix {
            dim: self.dim,
            entries: self.entries.iter().map(|a| s * a).collect(),
        }
    }

    /// Adds `w · x xᵀ` in place.
    pub(crate) fn add_outer(&mut self, x: &[f64], w: f64) {
        let n = self.dim;
        for i in 0..n {
            let wi = w * x[i];
            let row = &mut self.entries[i * n..(i + 1) * n];
            for (r, xj) in row.iter_mut().zip(x) {
                *r += wi * xj;
            }
        }
    }
}

/// Eigenvalues in ascending order with orthonormal eigenvectors stored as
/// the columns of a row-major `dim × dim` matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralDecomposition {
    pub eigenvalues: Vec<f64>,
    eigenvectors: Vec<f64>,
    dim: usize,
}

impl SpectralDecomposition {
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Entry `(row, col)` of Q; column `col` is the eigenvector of
    /// `eigenvalues[col]`.
    #[inline]
    pub fn q(&self, row: usize, col: usize) -> f64 {
        self.eigenvectors[row * self.dim + col]
    }

    pub fn eigenvector(&self, col: usize) -> Vec<f64> {
        (0..self.dim).map(|r| self.q(r, col)).collect()
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues[0]
    }

    pub fn max_eigenvalue(&self) -> f64 {
        self.eigenvalues[self.dim - 1]
    }

    /// `Qᵀ x`: coordinates of `x` in the eigenbasis.
    pub fn to_eigenbasis(&self, x: &[f64]) -> Vec<f64> {
        let n = self.dim;
        let mut z = vec![0.0; n];
        for (r, xr) in x.iter().enumerate() {
            let row = &self.eigenvectors[r * n..(r + 1) * n];
            for (zc, q) in z.iter_mut().zip(row) {
                *zc += q * xr;
            }
        }
        z
    }

    /// `Q z`: back from eigenbasis coordinates.
    pub fn from_eigenbasis(&self, z: &[f64]) -> Vec<f64> {
        let n = self.dim;
        (0..n)
            .map(|r| super::dot(&self.eigenvectors[r * n..(r + 1) * n], z))
            .collect()
    }

    /// `Q Λ Qᵀ`
    pub fn reconstruct(&self) -> SymMatrix {
        let n = self.dim;
        let mut out = SymMatrix::zeros(n);
        for (k, lambda) in self.eigenvalues.iter().enumerate() {
            out.add_outer(&self.eigenvector(k), *lambda);
        }
        out.symmetrize();
        out
    }

    /// `‖QᵀQ − I‖_F`
    pub fn orthogonality_error(&self) -> f64 {
        let n = self.dim;
        let mut acc = 0.0;
        for a in 0..n {
            for b in 0..n {
                let g: f64 = (0..n).map(|r| self.q(r, a) * self.q(r, b)).sum();
                let e = g - if a == b { 1.0 } else { 0.0 };
                acc += e * e;
            }
        }
        libm::sqrt(acc)
    }
}

const JACOBI_REL_TOL: f64 = 1e-12;
const JACOBI_MAX_SWEEPS: usize = 100;

/// Symmetric eigendecomposition by cyclic Jacobi rotations.
///
/// Sweeps stop once the off-diagonal Frobenius norm drops below
/// `1e-12·‖A‖_F`.
pub fn eig_sym(a: &SymMatrix) -> Result<SpectralDecomposition> {
    if !a.is_finite() {
        return Err(Error::invalid("matrix has non-finite entries"));
    }
    let n = a.dim;
    let mut m = a.entries.clone();
    let mut v = vec![0.0; n * n];
    for i in 0..n {
        v[i * n + i] = 1.0;
    }

    let threshold = JACOBI_REL_TOL * a.frobenius_norm();
    let off_norm = |m: &[f64]| -> f64 {
        let mut s = 0.0;
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    s += m[i * n + j] * m[i * n + j];
                }
            }
        }
        libm::sqrt(s)
    };

    let mut converged = false;
    for _ in 0..JACOBI_MAX_SWEEPS {
        if off_norm(&m) <= threshold {
            converged = true;
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = m[p * n + q];
                if apq == 0.0 {
                    continue;
                }
                let app = m[p * n + p];
                let aqq = m[q * n + q];
                let theta = (aqq - app) / (2.0 * apq);
                let t = if theta.abs() > 1e150 {
                    0.5 / theta
                } else {
                    let t = 1.0 / (theta.abs() + libm::sqrt(theta * theta + 1.0));
                    if theta < 0.0 {
                        -t
                    } else {
                        t
                    }
                };
                let c = 1.0 / libm::sqrt(t * t + 1.0);
                let s = t * c;

                for k in 0..n {
                    let akp = m[k * n + p];
                    let akq = m[k * n + q];
                    m[k * n + p] = c * akp - s * akq;
                    m[k * n + q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = m[p * n + k];
                    let aqk = m[q * n + k];
                    m[p * n + k] = c * apk - s * aqk;
                    m[q * n + k] = s * apk + c * aqk;
                }
                m[p * n + q] = 0.0;
                m[q * n + p] = 0.0;
                for k in 0..n {
                    let vkp = v[k * n + p];
                    let vkq = v[k * n + q];
                    v[k * n + p] = c * vkp - s * vkq;
                    v[k * n + q] = s * vkp + c * vkq;
                }
            }
        }
    }
    if !converged && off_norm(&m) > threshold {
        return Err(Error::NotConverged("Jacobi eigensolver"));
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| m[i * n + i].total_cmp(&m[j * n + j]));
    let eigenvalues = order.iter().map(|&i| m[i * n + i]).collect();
    let mut eigenvectors = vec![0.0; n * n];
    for (new_col, &old_col) in order.iter().enumerate() {
        for r in 0..n {
            eigenvectors[r * n + new_col] = v[r * n + old_col];
        }
    }
    Ok(SpectralDecomposition {
        eigenvalues,
        eigenvectors,
        dim: n,
    })
}

/// Sum of singular values; for a symmetric matrix, `Σ |λᵢ|`.
pub fn nuclear_norm(a: &SymMatrix) -> Result<f64> {
    Ok(eig_sym(a)?.eigenvalues.iter().map(|l| l.abs()).sum())
}
