//! Upper bounds on adversarial robustness and the constants relating it to
//! robustness under random noise.
//!
//! Bounds fed with dataset moments are empirical plug-ins: every expectation
//! is replaced by the sample mean over the given dataset.

use crate::classifiers::{LinearClassifier, QuadraticClassifier};
use crate::data::{ClassMeans, ClassMoments};
use crate::numerics::nuclear_norm;
use crate::{Error, Result};

/// `ρ_adv(f) ≤ 4^{1−γ} τ (…)^γ` holds for classifiers satisfying
/// `Δ_adv(x) ≤ τ |f(x)|^γ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AssumptionAParams {
    pub tau: f64,
    pub gamma: f64,
}

impl AssumptionAParams {
    pub fn new(tau: f64, gamma: f64) -> Result<Self> {
        if !(tau > 0.0 && tau.is_finite()) {
            return Err(Error::invalid("tau must be positive"));
        }
        if !(gamma > 0.0 && gamma <= 1.0) {
            return Err(Error::invalid("gamma must lie in (0, 1]"));
        }
        Ok(AssumptionAParams { tau, gamma })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundKind {
    /// General bound from assumption (A).
    General,
    /// Linear, arbitrary priors and intercept.
    Linear,
    /// Linear, balanced classes and zero intercept.
    LinearBalanced,
    Quadratic,
}

impl BoundKind {
    pub fn as_str(self) -> &'static str {
        match self {
            BoundKind::General => "general",
            BoundKind::Linear => "linear",
            BoundKind::LinearBalanced => "linear-balanced",
            BoundKind::Quadratic => "quadratic",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundReport {
    pub kind: BoundKind,
    /// Bound on `ρ_adv`; `0` when vacuous.
    pub value: f64,
    /// The data-dependent distinguishability term.
    pub distinguishability: f64,
    pub risk: f64,
    pub p1: f64,
    pub p_m1: f64,
    pub radius: Option<f64>,
    pub k: Option<f64>,
    /// The bracketed argument was negative, so the bound says nothing.
    pub vacuous: bool,
}

fn check_risk(risk: f64) -> Result<()> {
    if (0.0..=1.0).contains(&risk) {
        Ok(())
    } else {
        Err(Error::invalid("risk must lie in [0, 1]"))
    }
}

fn check_priors(p1: f64, p_m1: f64) -> Result<()> {
    if p1 >= 0.0 && p_m1 >= 0.0 && (p1 + p_m1 - 1.0).abs() <= 1e-9 {
        Ok(())
    } else {
        Err(Error::invalid(
            "class priors must be non-negative and sum to 1",
        ))
    }
}

/// `(τ, γ) = (1/‖w‖₂, 1)`
pub fn tau_gamma_linear(c: &LinearClassifier) -> AssumptionAParams {
    AssumptionAParams {
        tau: 1.0 / c.weight_norm(),
        gamma: 1.0,
    }
}

/// `(τ, γ) = (max(|λ_min|^{−1/2}, |λ_max|^{−1/2}), 1/2)`; errors unless `A`
/// has eigenvalues of both signs.
pub fn tau_gamma_quadratic(c: &QuadraticClassifier) -> Result<AssumptionAParams> {
    let s = c.nontrivial_spectrum()?;
    let tau = (1.0 / libm::sqrt(-s.min_eigenvalue())).max(1.0 / libm::sqrt(s.max_eigenvalue()));
    Ok(AssumptionAParams { tau, gamma: 0.5 })
}

/// `4^{1−γ} τ (p₁E₁f − p₋₁E₋₁f + 2‖f‖_∞R)^γ`
pub fn lemma1_bound(
    p: AssumptionAParams,
    p1: f64,
    p_m1: f64,
    mean_f_1: f64,
    mean_f_m1: f64,
    f_inf: f64,
    risk: f64,
) -> Result<BoundReport> {
    AssumptionAParams::new(p.tau, p.gamma)?;
    check_priors(p1, p_m1)?;
    check_risk(risk)?;
    if !(f_inf >= 0.0) {
        return Err(Error::invalid("sup norm must be non-negative"));
    }
    let distinguishability = p1 * mean_f_1 - p_m1 * mean_f_m1;
    let arg = distinguishability + 2.0 * f_inf * risk;
    let vacuous = !(arg >= 0.0);
    let value = if vacuous {
        0.0
    } else {
        libm::pow(4.0, 1.0 - p.gamma) * p.tau * libm::pow(arg, p.gamma)
    };
    Ok(BoundReport {
        kind: BoundKind::General,
        value,
        distinguishability,
        risk,
        p1,
        p_m1,
        radius: None,
        k: None,
        vacuous,
    })
}

/// Linear-classifier bound. With `balanced_zero_intercept` set (caller
/// asserts `p₁ = p₋₁` and `b = 0`) it is `½‖E₁x − E₋₁x‖₂ + 2MR`, otherwise
/// `‖p₁E₁x − p₋₁E₋₁x‖₂ + M(|p₁ − p₋₁| + 4R)`.
pub fn theorem1_bound(
    m: &ClassMeans,
    radius: f64,
    risk: f64,
    balanced_zero_intercept: bool,
) -> Result<BoundReport> {
    check_risk(risk)?;
    if !(radius >= 0.0) {
        return Err(Error::invalid("radius must be non-negative"));
    }
    let (p1, p_m1) = (m.p1, m.p_m1);
    let (kind, distinguishability, value) = if balanced_zero_intercept {
        let dist = 0.5 * m.mean_difference_norm();
        (BoundKind::LinearBalanced, dist, dist + 2.0 * radius * risk)
    } else {
        let dist = m.weighted_mean_difference_norm();
        (
            BoundKind::Linear,
            dist,
            dist + radius * ((p1 - p_m1).abs() + 4.0 * risk),
        )
    };
    Ok(BoundReport {
        kind,
        value,
        distinguishability,
        risk,
        p1,
        p_m1,
        radius: Some(radius),
        k: None,
        vacuous: false,
    })
}

/// Quadratic-classifier bound `2√(K‖p₁C₁ − p₋₁C₋₁‖_* + 2M²KR)`.
pub fn theorem3_bound(m: &ClassMoments, k: f64, radius: f64, risk: f64) -> Result<BoundReport> {
    check_risk(risk)?;
    if !(k >= 1.0 && k.is_finite()) {
        return Err(Error::invalid("K must be at least 1"));
    }
    if !(radius >= 0.0) {
        return Err(Error::invalid("radius must be non-negative"));
    }
    let distinguishability = nuclear_norm(&m.weighted_second_moment_difference())?;
    let value = 2.0 * libm::sqrt(k * distinguishability + 2.0 * radius * radius * k * risk);
    Ok(BoundReport {
        kind: BoundKind::Quadratic,
        value,
        distinguishability,
        risk,
        p1: m.p1(),
        p_m1: m.p_m1(),
        radius: Some(radius),
        k: Some(k),
        vacuous: false,
    })
}

/// Smallest admissible `K`: `max(|λ_min/λ_max|, |λ_max/λ_min|)`.
#[allow(non_snake_case)]
pub fn eq13_K(c: &QuadraticClassifier) -> Result<f64> {
    let s = c.nontrivial_spectrum()?;
    let (lo, hi) = (s.min_eigenvalue(), s.max_eigenvalue());
    Ok((lo / hi).abs().max((hi / lo).abs()))
}

/// Constants bracketing `ρ_unif,ε / ρ_adv` for linear classifiers.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Theorem2Constants {
    /// `(2 ln(2/ε))^{−1/2}`
    pub c1: f64,
    /// `(1 − (12ε)^{1/d})^{−1/2}`
    pub c2_tilde: f64,
    /// `(1 − 12ε)^{−1/2}`
    pub c2: f64,
    /// `ε = 0`, where the constants are limits and the sandwich collapses.
    pub degenerate: bool,
}

impl Theorem2Constants {
    /// `(max(C₁√d, 1)·ρ_adv, C̃₂·ρ_adv)`
    pub fn bracket(&self, d: usize, rho_adv: f64) -> (f64, f64) {
        let lower = (self.c1 * libm::sqrt(d as f64)).max(1.0);
        (lower * rho_adv, self.c2_tilde * rho_adv)
    }
}

pub fn theorem2_constants(epsilon: f64, d: usize) -> Result<Theorem2Constants> {
    if !(0.0..1.0 / 12.0).contains(&epsilon) {
        return Err(Error::invalid("epsilon must lie in [0, 1/12)"));
    }
    if d == 0 {
        return Err(Error::invalid("dimension must be positive"));
    }
    if epsilon == 0.0 {
        return Ok(Theorem2Constants {
            c1: 0.0,
            c2_tilde: 1.0,
            c2: 1.0,
            degenerate: true,
        });
    }
    Ok(Theorem2Constants {
        c1: 1.0 / libm::sqrt(2.0 * libm::log(2.0 / epsilon)),
        // 1 − e^{ln(12ε)/d}, accurate for large d
        c2_tilde: 1.0 / libm::sqrt(-libm::expm1(libm::log(12.0 * epsilon) / d as f64)),
        c2: 1.0 / libm::sqrt(1.0 - 12.0 * epsilon),
        degenerate: false,
    })
}

/// Bounds on the normalized measure of a spherical cap.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CapBounds {
    pub lower: f64,
    pub upper: f64,
}

fn check_cap(tau: f64, d: usize) -> Result<()> {
    if !(0.0..1.0).contains(&tau) {
        return Err(Error::invalid("cap height must lie in [0, 1)"));
    }
    if d == 0 {
        return Err(Error::invalid("dimension must be positive"));
    }
    Ok(())
}

/// `(1/12)(1 − τ²)^d ≤ P(wᵀu ≥ τ) ≤ 2 exp(−τ²d/2)` for `u` uniform on the
/// sphere of `ℝ^d`.
pub fn spherical_cap_bounds(tau: f64, d: usize) -> Result<CapBounds> {
    check_cap(tau, d)?;
    let n = d as f64;
    Ok(CapBounds {
        lower: libm::pow(1.0 - tau * tau, n) / 12.0,
        upper: 2.0 * libm::exp(-tau * tau * n / 2.0),
    })
}

/// Sharper cap bounds `(1/(6τ√d))(1 − τ²)^{(d−1)/2}` and
/// `(1/(2τ√d))(1 − τ²)^{(d−1)/2}` valid for `τ ≥ √(2/d)`; below that
/// threshold the trivial pair `(1/12, 1/2)` is returned.
pub fn cap_bounds_tight(tau: f64, d: usize) -> Result<CapBounds> {
    check_cap(tau, d)?;
    let n = d as f64;
    if tau < libm::sqrt(2.0 / n) {
        return Ok(CapBounds {
            lower: 1.0 / 12.0,
            upper: 0.5,
        });
    }
    let body = libm::pow(1.0 - tau * tau, (n - 1.0) / 2.0) / (tau * libm::sqrt(n));
    Ok(CapBounds {
        lower: body / 6.0,
        upper: body / 2.0,
    })
}

/// `c(d)` such that the `ℓ∞` ball of radius `η` and the `ℓ₂` ball of radius
/// `c(d)√d·η` in `ℝ^d` have equal volume.
pub fn volume_match_coefficient(d: usize) -> Result<f64> {
    if d == 0 {
        return Err(Error::invalid("dimension must be positive"));
    }
    if d == 1 {
        return Ok(1.0);
    }
    let n = d as f64;
    let log_c = core::f64::consts::LN_2 - 0.5 * libm::log(core::f64::consts::PI)
        + libm::lgamma(n / 2.0 + 1.0) / n
        - 0.5 * libm::log(n);
    Ok(libm::exp(log_c))
}

/// `Σ zᵢ^γ ≤ n^{1−γ} (Σ zᵢ)^γ`, with a relative slack of `1e-12`.
pub fn lemma3_check(values: &[f64], gamma: f64) -> Result<bool> {
    if !(gamma > 0.0 && gamma <= 1.0) {
        return Err(Error::invalid("gamma must lie in (0, 1]"));
    }
    if values.iter().any(|v| !(*v >= 0.0) || !v.is_finite()) {
        return Err(Error::invalid("values must be finite and non-negative"));
    }
    let lhs: f64 = values.iter().map(|v| libm::pow(*v, gamma)).sum();
    let n = values.len() as f64;
    let rhs = libm::pow(n, 1.0 - gamma) * libm::pow(values.iter().sum::<f64>(), gamma);
    Ok(lhs <= rhs * (1.0 + 1e-12))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classifiers::{f_lin_reference, f_quad_reference};
    use crate::data::{compute_means, compute_moments, gen_running_example, RunningExampleConfig};
    use crate::numerics::SymMatrix;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * b.abs().max(1.0)
    }

    #[test]
    fn tau_gamma_values() {
        let p = tau_gamma_linear(&f_lin_reference(9).unwrap());
        assert!(close(p.tau, 1.0, 1e-15) && p.gamma == 1.0);
        let c = LinearClassifier::new(std::vec![2.0, 0.0], 0.0).unwrap();
        assert!(close(tau_gamma_linear(&c).tau, 0.5, 1e-15));
        let q = tau_gamma_quadratic(&f_quad_reference()).unwrap();
        assert!(close(q.tau, 1.0, 1e-12) && q.gamma == 0.5);
        let q = QuadraticClassifier::new(SymMatrix::diagonal(&[4.0, -1.0])).unwrap();
        assert!(close(tau_gamma_quadratic(&q).unwrap().tau, 1.0, 1e-12));
        let psd = QuadraticClassifier::new(SymMatrix::diagonal(&[1.0, 2.0])).unwrap();
        assert!(tau_gamma_quadratic(&psd).is_err());
    }

    #[test]
    fn general_bound_direct_evaluation() {
        let p = AssumptionAParams::new(1.0, 1.0).unwrap();
        let r = lemma1_bound(p, 0.5, 0.5, 1.0, -1.0, 3.0, 0.0).unwrap();
        assert!(close(r.value, 1.0, 1e-15));
        let p = AssumptionAParams::new(1.0, 0.5).unwrap();
        let r = lemma1_bound(p, 0.5, 0.5, 1.0, -1.0, 3.0, 0.0).unwrap();
        assert!(close(r.value, 2.0, 1e-15));
        let r = lemma1_bound(p, 0.5, 0.5, -1.0, 1.0, 0.1, 0.0).unwrap();
        assert!(r.vacuous && r.value == 0.0);
    }

    #[test]
    fn linear_bound_is_tight_on_running_example() {
        for d in [4usize, 25, 100] {
            let a = 0.1 / (d as f64).sqrt();
            let ds = gen_running_example(&RunningExampleConfig::new(d, a).unwrap()).unwrap();
            let m = compute_means(&ds).unwrap();
            let r = theorem1_bound(&m, ds.radius(), 0.0, true).unwrap();
            assert!(close(r.value, 0.1, 1e-12), "{}", r.value);
            let general = theorem1_bound(&m, ds.radius(), 0.0, false).unwrap();
            assert!(close(general.value, 0.1, 1e-12));
        }
    }

    #[test]
    fn quadratic_bound_on_running_example() {
        let ds = gen_running_example(&RunningExampleConfig::new(4, 0.1).unwrap()).unwrap();
        let m = compute_moments(&ds).unwrap();
        let r = theorem3_bound(&m, 1.0, ds.radius(), 0.0).unwrap();
        assert!(close(r.value, 2.0 * 1.4f64.sqrt(), 1e-12), "{}", r.value);
        assert!(r.value >= core::f64::consts::FRAC_1_SQRT_2);
        assert!(theorem3_bound(&m, 0.5, ds.radius(), 0.0).is_err());
    }

    #[test]
    fn k_ratio() {
        assert!(close(eq13_K(&f_quad_reference()).unwrap(), 1.0, 1e-12));
        let q = QuadraticClassifier::new(SymMatrix::diagonal(&[2.0, -1.0])).unwrap();
        assert!(close(eq13_K(&q).unwrap(), 2.0, 1e-12));
        let psd = QuadraticClassifier::new(SymMatrix::diagonal(&[0.0, 2.0])).unwrap();
        assert!(eq13_K(&psd).is_err());
    }

    #[test]
    fn noise_constants_regression_values() {
        let c = theorem2_constants(0.01, 2500).unwrap();
        assert!(close(c.c1, 1.0 / (2.0 * 200f64.ln()).sqrt(), 1e-12));
        assert!(close(c.c2, 1.0 / 0.88f64.sqrt(), 1e-12));
        assert!(close(
            c.c2_tilde,
            1.0 / (1.0 - 0.12f64.powf(1.0 / 2500.0)).sqrt(),
            1e-9
        ));
        let z = theorem2_constants(0.0, 10).unwrap();
        assert!(z.degenerate && z.c1 == 0.0 && z.c2 == 1.0 && z.c2_tilde == 1.0);
        assert!(theorem2_constants(1.0 / 12.0, 3).is_err());
        assert!(theorem2_constants(-0.1, 3).is_err());
    }

    #[test]
    fn c2_tilde_below_c2_sqrt_d() {
        for eps in [0.001, 0.01, 0.05] {
            for d in 1..=10_000usize {
                let c = theorem2_constants(eps, d).unwrap();
                assert!(
                    c.c2_tilde <= c.c2 * (d as f64).sqrt() * (1.0 + 1e-12),
                    "eps={eps} d={d}"
                );
            }
        }
    }

    #[test]
    fn cap_bounds_at_hemisphere() {
        let b = spherical_cap_bounds(0.0, 7).unwrap();
        assert!(b.lower == 1.0 / 12.0 && b.upper == 2.0);
        assert!(spherical_cap_bounds(1.0, 3).is_err());
        for d in [2usize, 10, 100] {
            for tau in [0.1, 0.5, 0.9] {
                let b = spherical_cap_bounds(tau, d).unwrap();
                assert!(b.lower <= b.upper);
                let t = cap_bounds_tight(tau, d).unwrap();
                assert!(t.lower <= t.upper);
            }
        }
    }

    #[test]
    fn volume_coefficient_values() {
        assert_eq!(volume_match_coefficient(1).unwrap(), 1.0);
        assert!(close(
            volume_match_coefficient(2).unwrap(),
            (2.0 / core::f64::consts::PI).sqrt(),
            1e-13
        ));
        // d = 3: 8 = (4π/3) c³ 3^{3/2}
        let c3 = (6.0 / (core::f64::consts::PI * 27f64.sqrt())).powf(1.0 / 3.0);
        assert!(close(volume_match_coefficient(3).unwrap(), c3, 1e-13));
        let limit = (2.0 / (core::f64::consts::E * core::f64::consts::PI)).sqrt();
        assert!((volume_match_coefficient(1_000_000).unwrap() - limit).abs() < 1e-3);
    }

    #[test]
    fn power_sum_inequality_cases() {
        assert!(lemma3_check(&[1.0; 4], 0.5).unwrap());
        assert!(lemma3_check(&[0.3, 2.0, 0.0], 1.0).unwrap());
        assert!(lemma3_check(&[1.0], 0.0).is_err());
    }
}
