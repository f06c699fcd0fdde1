//! Penalized subgradient attack.
//!
//! For a penalty weight `c`, minimizes `c‖r‖₂ + max(0, sign(f(x))·f(x+r))`
//! by subgradient descent from a small random start, and line-searches for
//! the largest `c` whose minimizer still flips the label. The returned
//! perturbation always flips the label, so its norm is an upper estimate of
//! the minimal one.

use alloc::vec::Vec;

use super::{ensure_flip, Perturbation};
use crate::classifiers::Classifier;
use crate::numerics::{add_scaled, norm2, sample_sphere, RandomStream};
use crate::{Error, Result};

/// Subgradient step schedule.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum StepRule {
    /// Step length `α/√t` along the normalized subgradient, with
    /// `α = scale · max(‖x‖₂, |f(x)|/‖∇f(x)‖₂)` (or `scale` if both vanish).
    InverseSqrt { scale: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct AttackConfig {
    /// Penalty weights, strictly increasing and positive.
    pub c_grid: Vec<f64>,
    pub inner_steps: usize,
    pub step_rule: StepRule,
    /// Extra bisection levels on `c` between the last success and the first
    /// failure.
    pub refine_levels: usize,
    /// Radius of the random starting point, as a fraction of `α`.
    pub init_radius: f64,
    /// Relative precision of the final search along the ray `t·r`.
    pub tolerance: f64,
}

impl Default for AttackConfig {
    fn default() -> Self {
        AttackConfig {
            c_grid: geometric_grid(1e-3, 1e3, 20),
            inner_steps: 1000,
            step_rule: StepRule::InverseSqrt { scale: 0.1 },
            refine_levels: 5,
            init_radius: 0.1,
            tolerance: 1e-12,
        }
    }
}

/// `n` geometrically spaced values from `lo` to `hi` inclusive.
pub fn geometric_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return alloc::vec![lo];
    }
    let ratio = libm::log(hi / lo) / (n - 1) as f64;
    (0..n).map(|k| lo * libm::exp(ratio * k as f64)).collect()
}

impl AttackConfig {
    pub fn validate(&self) -> Result<()> {
        if self.c_grid.is_empty()
            || self.c_grid.iter().any(|c| !(*c > 0.0) || !c.is_finite())
            || self.c_grid.windows(2).any(|w| w[0] >= w[1])
        {
            return Err(Error::invalid(
                "c_grid must be strictly increasing and positive",
            ));
        }
        if self.inner_steps == 0 {
            return Err(Error::invalid("inner_steps must be at least 1"));
        }
        let StepRule::InverseSqrt { scale } = self.step_rule;
        if !(scale > 0.0) {
            return Err(Error::invalid("step scale must be positive"));
        }
        if !(self.init_radius >= 0.0) || !(self.tolerance > 0.0) {
            return Err(Error::invalid("init_radius must be >= 0 and tolerance > 0"));
        }
        Ok(())
    }
}

struct Attack<'a> {
    classifier: &'a Classifier,
    x: &'a [f64],
    sgn: f64,
    alpha: f64,
    cfg: &'a AttackConfig,
    start: Vec<f64>,
}

impl Attack<'_> {
    fn flipped(&self, r: &[f64]) -> bool {
        self.sgn * self.classifier.eval(&add_scaled(self.x, 1.0, r)) <= 0.0
    }

    /// Shortest flipping prefix `t·r`, `t ∈ (0, 1]`, assuming `r` flips.
    fn shorten(&self, r: &[f64]) -> Vec<f64> {
        let (mut lo, mut hi) = (0.0f64, 1.0f64);
        while hi - lo > self.cfg.tolerance * hi {
            let mid = 0.5 * (lo + hi);
            if self.flipped(&r.iter().map(|v| v * mid).collect::<Vec<_>>()) {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        r.iter().map(|v| v * hi).collect()
    }

    /// Inner subgradient descent for penalty `c`. Returns whether the tail
    /// of the trajectory (the last quarter, where it hovers around the
    /// minimizer) flips the label, and the shortest flipping iterate seen.
    fn run(&self, c: f64) -> (bool, Option<Vec<f64>>) {
        let d = self.x.len();
        let steps = self.cfg.inner_steps;
        let tail_start = steps - steps / 4;
        let mut r = self.start.clone();
        let mut best: Option<(f64, Vec<f64>)> = None;
        let mut tail_flip = false;
        for t in 1..=steps + 1 {
            let xr = add_scaled(self.x, 1.0, &r);
            let v = self.sgn * self.classifier.eval(&xr);
            if v <= 0.0 {
                tail_flip |= t > tail_start;
                let cand = self.shorten(&r);
                let n = norm2(&cand);
                if best.as_ref().is_none_or(|(bn, _)| n < *bn) {
                    best = Some((n, cand));
                }
            }
            if t > steps {
                break;
            }
            let rn = norm2(&r);
            let mut g = if rn > 0.0 {
                r.iter().map(|ri| c * ri / rn).collect()
            } else {
                alloc::vec![0.0; d]
            };
            if v > 0.0 {
                let grad = self.classifier.grad(&xr);
                g.iter_mut()
                    .zip(&grad)
                    .for_each(|(gi, di)| *gi += self.sgn * di);
            }
            let gn = norm2(&g);
            if !(gn > 0.0) || !gn.is_finite() {
                break;
            }
            let step = self.alpha / libm::sqrt(t as f64) / gn;
            r.iter_mut().zip(&g).for_each(|(ri, gi)| *ri -= step * gi);
        }
        (tail_flip, best.map(|(_, r)| r))
    }
}

/// Empirical minimal perturbation of `x` for any classifier.
///
/// Points on the decision boundary return `Δ̂ = 0`. When no penalty weight
/// yields a flip the result is [`Error::NoFlipFound`].
pub fn delta_adv_empirical(
    c: &Classifier,
    x: &[f64],
    cfg: &AttackConfig,
    rng: &mut RandomStream,
) -> Result<Perturbation> {
    cfg.validate()?;
    Error::check_dim(c.dim(), x.len())?;
    let f0 = c.eval(x);
    if f0 == 0.0 {
        return Ok(Perturbation::zero(x.len()));
    }
    let StepRule::InverseSqrt { scale } = cfg.step_rule;
    let grad_norm = norm2(&c.grad(x));
    let first_order = if grad_norm > 0.0 {
        f0.abs() / grad_norm
    } else {
        0.0
    };
    let reach = norm2(x).max(first_order);
    let alpha = if reach > 0.0 && reach.is_finite() {
        scale * reach
    } else {
        scale
    };
    let start = if cfg.init_radius > 0.0 {
        sample_sphere(x.len(), cfg.init_radius * alpha, rng)?
    } else {
        alloc::vec![0.0; x.len()]
    };
    let attack = Attack {
        classifier: c,
        x,
        sgn: if f0 > 0.0 { 1.0 } else { -1.0 },
        alpha,
        cfg,
        start,
    };

    let mut best: Option<Vec<f64>> = None;
    let mut keep = |cand: Vec<f64>| {
        if best.as_ref().is_none_or(|b| norm2(&cand) < norm2(b)) {
            best = Some(cand);
        }
    };

    // Largest c first; stop at the first success. Flips seen along the way
    // are kept as candidates even when the run as a whole does not count.
    let mut success_c = None;
    let mut failure_c = None;
    for &cw in cfg.c_grid.iter().rev() {
        let (ok, cand) = attack.run(cw);
        if let Some(r) = cand {
            keep(r);
        }
        if ok {
            success_c = Some(cw);
            break;
        }
        failure_c = Some(cw);
    }
    if let (Some(mut lo), Some(mut hi)) = (success_c, failure_c) {
        for _ in 0..cfg.refine_levels {
            let mid = libm::sqrt(lo * hi);
            let (ok, cand) = attack.run(mid);
            if let Some(r) = cand {
                keep(r);
            }
            if ok {
                lo = mid;
            } else {
                hi = mid;
            }
        }
    }

    let r = best.ok_or(Error::NoFlipFound)?;
    let r = ensure_flip(|p| c.eval(p), x, f0, r)?;
    Ok(Perturbation {
        delta: norm2(&r),
        r,
        hard_case: false,
    })
}
