//! Closed-form minimal perturbations for linear and quadratic classifiers.

use alloc::vec;
use alloc::vec::Vec;

use super::{ensure_flip, Perturbation};
use crate::classifiers::{LinearClassifier, QuadraticClassifier};
use crate::numerics::{norm2, solve_scalar_root, SpectralDecomposition};
use crate::{Error, Result};

/// `Δ = |wᵀx + b| / ‖w‖₂`, reached by `r = −f(x) w / ‖w‖₂²`.
pub fn delta_adv_linear_exact(c: &LinearClassifier, x: &[f64]) -> Result<Perturbation> {
    Error::check_dim(c.dim(), x.len())?;
    let f0 = c.eval(x);
    let w = c.weights();
    let wn = c.weight_norm();
    if f0 == 0.0 {
        return Ok(Perturbation::zero(x.len()));
    }
    let t = -f0 / (wn * wn);
    let r: Vec<f64> = w.iter().map(|wi| t * wi).collect();
    let r = ensure_flip(|p| c.eval(p), x, f0, r)?;
    Ok(Perturbation {
        delta: norm2(&r),
        r,
        hard_case: false,
    })
}

/// Minimal-norm perturbation onto the quadric `(x+r)ᵀA(x+r) = 0`, with the
/// spectrum of `A` computed once and reused across points.
///
/// In the eigenbasis, with `z = Qᵀx`, the stationary points are
/// `y(μ) = (I + μΛ)⁻¹ z` and the multiplier solves the secular equation
/// `Σᵢ λᵢ zᵢ² / (1 + μλᵢ)² = 0`. For `f(x) > 0` the root lies in
/// `(0, 1/|λ_min|)` (and symmetrically for `f(x) < 0`), where `I + μΛ ⪰ 0`,
/// which makes the stationary point the global minimizer.
///
/// The equation is solved in `s = 1 − μ|λ_opp|`, the distance to the pole
/// (λ_opp being the extreme eigenvalue of sign opposite to `f(x)`), so the
/// blow-up factor on the opposite eigenspace is exactly `s` and stays
/// accurate when the root is close to the pole.
#[derive(Debug, Clone)]
pub struct QuadraticSolver<'a> {
    classifier: &'a QuadraticClassifier,
    spectrum: SpectralDecomposition,
}

/// Eigenvalues within this relative distance of the extreme one are
/// treated as the same eigenspace.
const EIGENSPACE_TOL: f64 = 1e-12;
const CONSTRAINT_TOL: f64 = 1e-8;

/// Secular function of one point, parameterized by the Lagrange multiplier.
#[derive(Debug, Clone)]
pub struct SecularFunction {
    eigenvalues: Vec<f64>,
    z: Vec<f64>,
    sgn: f64,
    nu: f64,
    kappa: Vec<f64>,
    opposite: Vec<bool>,
}

impl SecularFunction {
    fn factor(&self, i: usize, s: f64) -> f64 {
        if self.opposite[i] {
            s
        } else {
            1.0 - (1.0 - s) * self.kappa[i]
        }
    }

    /// `g` as a function of the pole distance `s ∈ [0, 1]`.
    fn value_at_pole_distance(&self, s: f64) -> f64 {
        (0..self.z.len())
            .filter(|&i| self.z[i] != 0.0)
            .map(|i| {
                let f = self.factor(i, s);
                self.eigenvalues[i] * self.z[i] * self.z[i] / (f * f)
            })
            .sum()
    }

    /// `g(μ) = Σᵢ λᵢ zᵢ² / (1 + μλᵢ)²`
    pub fn value(&self, mu: f64) -> f64 {
        self.eigenvalues
            .iter()
            .zip(&self.z)
            .map(|(l, z)| {
                let f = 1.0 + mu * l;
                l * z * z / (f * f)
            })
            .sum()
    }

    /// Open multiplier interval `(0, 1/|λ_opp|)`, or its mirror image when
    /// `f(x) < 0`, that contains the root.
    pub fn multiplier_bracket(&self) -> (f64, f64) {
        let pole = self.sgn / self.nu;
        if pole > 0.0 {
            (0.0, pole)
        } else {
            (pole, 0.0)
        }
    }

    fn multiplier(&self, s: f64) -> f64 {
        self.sgn * (1.0 - s) / self.nu
    }
}

/// Output of [`QuadraticSolver::solve`].
#[derive(Debug, Clone, PartialEq)]
pub struct QuadraticSolution {
    pub perturbation: Perturbation,
    /// Lagrange multiplier μ of the minimizer (0 for boundary points).
    pub multiplier: f64,
}

impl<'a> QuadraticSolver<'a> {
    pub fn new(classifier: &'a QuadraticClassifier) -> Result<Self> {
        let spectrum = classifier.nontrivial_spectrum()?;
        Ok(QuadraticSolver {
            classifier,
            spectrum,
        })
    }

    pub fn spectrum(&self) -> &SpectralDecomposition {
        &self.spectrum
    }

    /// Secular function at `x`; `None` when `x` is on the decision boundary.
    pub fn secular(&self, x: &[f64]) -> Result<Option<SecularFunction>> {
        Error::check_dim(self.classifier.dim(), x.len())?;
        let f0 = self.classifier.eval(x);
        if f0 == 0.0 {
            return Ok(None);
        }
        let eigenvalues = self.spectrum.eigenvalues.clone();
        let sgn = if f0 > 0.0 { 1.0 } else { -1.0 };
        let nu = if f0 > 0.0 {
            -self.spectrum.min_eigenvalue()
        } else {
            self.spectrum.max_eigenvalue()
        };
        let kappa: Vec<f64> = eigenvalues.iter().map(|l| -sgn * l / nu).collect();
        let opposite = kappa.iter().map(|k| *k >= 1.0 - EIGENSPACE_TOL).collect();
        Ok(Some(SecularFunction {
            z: self.spectrum.to_eigenbasis(x),
            eigenvalues,
            sgn,
            nu,
            kappa,
            opposite,
        }))
    }

    pub fn solve(&self, x: &[f64]) -> Result<QuadraticSolution> {
        let Some(g) = self.secular(x)? else {
            return Ok(QuadraticSolution {
                perturbation: Perturbation::zero(x.len()),
                multiplier: 0.0,
            });
        };
        let f0 = self.classifier.eval(x);
        let n = x.len();
        let z_opp_zero = (0..n).all(|i| !g.opposite[i] || g.z[i] == 0.0);
        let g_rest_at_pole = g.value_at_pole_distance(0.0);

        let (y, s, hard_case) = if z_opp_zero && g.sgn * g_rest_at_pole > 0.0 {
            // Hard case: the stationary curve never reaches the quadric; the
            // minimizer sits on the pole and moves along the opposite
            // eigenspace by exactly what the constraint requires.
            let mut y: Vec<f64> = (0..n)
                .map(|i| {
                    if g.opposite[i] {
                        0.0
                    } else {
                        g.z[i] / g.factor(i, 0.0)
                    }
                })
                .collect();
            let j = g
                .opposite
                .iter()
                .position(|&o| o)
                .expect("opposite eigenspace is non-empty");
            y[j] = libm::sqrt(g.sgn * g_rest_at_pole / g.nu);
            (y, 0.0, true)
        } else {
            let s = if z_opp_zero {
                // g is finite at the pole and already changed sign there.
                let scale = f0.abs();
                solve_scalar_root(|s| g.value_at_pole_distance(s) / scale, 0.0, 1.0, 1e-15)?
            } else {
                self.root_near_pole(&g, f0)?
            };
            let y = (0..n).map(|i| g.z[i] / g.factor(i, s)).collect();
            (y, s, false)
        };

        let r_eig: Vec<f64> = y.iter().zip(&g.z).map(|(yi, zi)| yi - zi).collect();
        let r = self.spectrum.from_eigenbasis(&r_eig);

        let top = g.eigenvalues[0].abs().max(g.eigenvalues[n - 1].abs());
        let reach = norm2(x) + norm2(&r);
        let residual = self
            .classifier
            .eval(&crate::numerics::add_scaled(x, 1.0, &r));
        if residual.abs() > CONSTRAINT_TOL * (top * reach * reach).max(f64::MIN_POSITIVE) {
            return Err(Error::NotConverged("quadratic minimal perturbation"));
        }

        let r = ensure_flip(|p| self.classifier.eval(p), x, f0, r)?;
        Ok(QuadraticSolution {
            perturbation: Perturbation {
                delta: norm2(&r),
                r,
                hard_case,
            },
            multiplier: g.multiplier(s),
        })
    }

    /// Root in `s ∈ (0, 1)` when `z` has mass on the opposite eigenspace,
    /// found in `u = ln s` so that tiny `s` keeps full relative precision.
    fn root_near_pole(&self, g: &SecularFunction, f0: f64) -> Result<f64> {
        let scale = f0.abs();
        let mut hi = 1.0f64;
        let mut lo = 0.5f64;
        loop {
            if g.sgn * g.value_at_pole_distance(lo) <= 0.0 {
                break;
            }
            hi = lo;
            lo *= 0.5;
            if lo == 0.0 {
                return Err(Error::NotConverged("secular bracket search"));
            }
        }
        let u = solve_scalar_root(
            |u| g.value_at_pole_distance(libm::exp(u)) / scale,
            libm::log(lo),
            libm::log(hi),
            1e-15,
        )?;
        Ok(libm::exp(u))
    }
}

/// Convenience wrapper computing the spectrum for a single point.
pub fn delta_adv_quadratic_exact(c: &QuadraticClassifier, x: &[f64]) -> Result<QuadraticSolution> {
    QuadraticSolver::new(c)?.solve(x)
}

impl Perturbation {
    pub(crate) fn zero(dim: usize) -> Self {
        Perturbation {
            delta: 0.0,
            r: vec![0.0; dim],
            hard_case: false,
        }
    }
}
