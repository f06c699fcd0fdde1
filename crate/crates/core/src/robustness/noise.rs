//! Monte-Carlo robustness to random noise drawn uniformly on a sphere.
//!
//! `J` unit directions are drawn once per point and reused for every radius,
//! so the flip count is a monotone function of `η` whenever each ray crosses
//! the boundary at most once (always true for linear classifiers).

use alloc::vec::Vec;

use crate::classifiers::Classifier;
use crate::numerics::{add_scaled, dot, norm2, sample_sphere, RandomStream};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct NoiseConfig {
    /// Tolerated flip probability, in `[0, 1]`.
    pub epsilon: f64,
    /// Number of sphere samples `J`.
    pub samples: usize,
    /// Search interval for `η`. `None` means `(1e-6, 4M)` with `M` the data
    /// radius (or `‖x‖₂` when no dataset is involved).
    pub eta_bracket: Option<(f64, f64)>,
    pub bisection_iters: usize,
    /// Stop once `hi/lo − 1` falls below this.
    pub bisection_tol: f64,
}

impl Default for NoiseConfig {
    fn default() -> Self {
        NoiseConfig {
            epsilon: 0.01,
            samples: 500,
            eta_bracket: None,
            bisection_iters: 30,
            bisection_tol: 1e-12,
        }
    }
}

pub const DEFAULT_ETA_LO: f64 = 1e-6;

impl NoiseConfig {
    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.epsilon) {
            return Err(Error::invalid("epsilon must lie in [0, 1]"));
        }
        if self.samples == 0 {
            return Err(Error::invalid("at least one noise sample is required"));
        }
        if let Some((lo, hi)) = self.eta_bracket {
            if !(lo > 0.0 && lo < hi && hi.is_finite()) {
                return Err(Error::invalid("eta bracket must satisfy 0 < lo < hi"));
            }
        }
        if !(self.bisection_tol >= 0.0) {
            return Err(Error::invalid("bisection tolerance must be non-negative"));
        }
        Ok(())
    }

    /// Bracket in effect for data of radius `radius`.
    pub fn bracket(&self, radius: f64) -> (f64, f64) {
        self.eta_bracket
            .unwrap_or((DEFAULT_ETA_LO, (4.0 * radius).max(2.0 * DEFAULT_ETA_LO)))
    }
}

/// Where the estimate landed relative to the search interval.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BracketStatus {
    Interior,
    /// Too many flips already at the lower end; `η = lo` is returned.
    BelowBracket,
    /// Still within tolerance at the upper end; `η = hi` is returned.
    AtUpperEnd,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseEstimate {
    pub eta: f64,
    pub status: BracketStatus,
}

/// `f(x + η u)` for fixed `x` and direction `u`, as a function of `η`.
enum RayProfile {
    /// `f0 + η·slope`
    Linear {
        slope: f64,
    },
    /// `f0 + η·lin + η²·quad`
    Quadratic {
        lin: f64,
        quad: f64,
    },
    Direct {
        u: Vec<f64>,
    },
}

struct Rays<'a> {
    classifier: &'a Classifier,
    x: &'a [f64],
    f0: f64,
    profiles: Vec<RayProfile>,
}

impl Rays<'_> {
    fn flips(&self, eta: f64) -> usize {
        self.profiles
            .iter()
            .filter(|p| {
                let v = match p {
                    RayProfile::Linear { slope } => self.f0 + eta * slope,
                    RayProfile::Quadratic { lin, quad } => self.f0 + eta * (lin + eta * quad),
                    RayProfile::Direct { u } => self.classifier.eval(&add_scaled(self.x, eta, u)),
                };
                self.f0 * v <= 0.0
            })
            .count()
    }
}

/// Largest `η` in the bracket for which at most a fraction `ε` of the `J`
/// sampled directions flip the label at distance `η`.
pub fn delta_unif_empirical(
    c: &Classifier,
    x: &[f64],
    cfg: &NoiseConfig,
    rng: &mut RandomStream,
) -> Result<NoiseEstimate> {
    delta_unif_with_radius(c, x, cfg, norm2(x), rng)
}

pub(crate) fn delta_unif_with_radius(
    c: &Classifier,
    x: &[f64],
    cfg: &NoiseConfig,
    radius: f64,
    rng: &mut RandomStream,
) -> Result<NoiseEstimate> {
    cfg.validate()?;
    Error::check_dim(c.dim(), x.len())?;
    let f0 = c.eval(x);
    if f0 == 0.0 {
        return Ok(NoiseEstimate {
            eta: 0.0,
            status: BracketStatus::Interior,
        });
    }
    let (mut lo, mut hi) = cfg.bracket(radius);

    let mut profiles = Vec::with_capacity(cfg.samples);
    for _ in 0..cfg.samples {
        let u = sample_sphere(x.len(), 1.0, rng)?;
        profiles.push(match c {
            Classifier::Linear(l) => RayProfile::Linear {
                slope: dot(l.weights(), &u),
            },
            Classifier::Quadratic(q) => {
                let au = q.matrix().mul_vec(&u);
                RayProfile::Quadratic {
                    lin: 2.0 * dot(x, &au),
                    quad: dot(&u, &au),
                }
            }
            Classifier::Kernel(_) => RayProfile::Direct { u },
        });
    }
    let rays = Rays {
        classifier: c,
        x,
        f0,
        profiles,
    };
    let accepted = |eta: f64| rays.flips(eta) as f64 / cfg.samples as f64 <= cfg.epsilon;

    if !accepted(lo) {
        return Ok(NoiseEstimate {
            eta: lo,
            status: BracketStatus::BelowBracket,
        });
    }
    if accepted(hi) {
        return Ok(NoiseEstimate {
            eta: hi,
            status: BracketStatus::AtUpperEnd,
        });
    }
    // Geometric bisection: the resolution is relative, whatever the scale.
    for _ in 0..cfg.bisection_iters {
        if hi / lo - 1.0 <= cfg.bisection_tol {
            break;
        }
        let mid = libm::sqrt(lo * hi);
        if accepted(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(NoiseEstimate {
        eta: lo,
        status: BracketStatus::Interior,
    })
}
