use advrobust_core::bounds::{cap_bounds_tight, lemma3_check, spherical_cap_bounds};
use advrobust_core::classifiers::{Classifier, LinearClassifier, QuadraticClassifier};
use advrobust_core::numerics::{
    add_scaled, eig_sym, norm2, nuclear_norm, sample_sphere, RandomStream, SymMatrix,
};
use advrobust_core::robustness::{
    delta_adv_empirical, delta_adv_linear_exact, delta_adv_quadratic_exact, AttackConfig,
};
use proptest::prelude::*;

fn sym_matrix(max_dim: usize) -> impl Strategy<Value = SymMatrix> {
    (1..=max_dim).prop_flat_map(|d| {
        prop::collection::vec(-5.0f64..5.0, d * d)
            .prop_map(move |e| SymMatrix::from_row_major(d, e).unwrap())
    })
}

fn vector(d: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-3.0f64..3.0, d)
}

/// Indefinite matrix with both eigenvalue signs bounded away from zero.
fn indefinite(d: usize, seed: u64) -> QuadraticClassifier {
    let mut rng = RandomStream::new(seed);
    loop {
        let a = SymMatrix::from_fn(d, |_, _| rng.next_normal()).unwrap();
        let s = eig_sym(&a).unwrap();
        if s.min_eigenvalue() < -0.05 && s.max_eigenvalue() > 0.05 {
            return QuadraticClassifier::new(a).unwrap();
        }
    }
}

/// Smallest `t > 0` with `f(x + t u) = 0` for `f(x) = xᵀAx`, if any.
fn first_crossing(a: &SymMatrix, x: &[f64], u: &[f64]) -> Option<f64> {
    let au = a.mul_vec(u);
    let qa: f64 = u.iter().zip(&au).map(|(p, q)| p * q).sum();
    let qb: f64 = 2.0 * x.iter().zip(&au).map(|(p, q)| p * q).sum::<f64>();
    let qc = a.quadratic_form(x);
    let mut best: Option<f64> = None;
    let mut consider = |t: f64| {
        if t > 0.0 && best.is_none_or(|b| t < b) {
            best = Some(t);
        }
    };
    if qa.abs() < 1e-14 {
        if qb != 0.0 {
            consider(-qc / qb);
        }
    } else {
        let disc = qb * qb - 4.0 * qa * qc;
        if disc >= 0.0 {
            let sq = disc.sqrt();
            consider((-qb - sq) / (2.0 * qa));
            consider((-qb + sq) / (2.0 * qa));
        }
    }
    best
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn eigenvalues_sum_to_trace(a in sym_matrix(8)) {
        let s = eig_sym(&a).unwrap();
        let sum: f64 = s.eigenvalues.iter().sum();
        prop_assert!((sum - a.trace()).abs() <= 1e-10 * (1.0 + a.frobenius_norm()));
        prop_assert!(s.orthogonality_error() < 1e-12);
    }

    #[test]
    fn nuclear_norm_dominates_trace(a in sym_matrix(8)) {
        let n = nuclear_norm(&a).unwrap();
        prop_assert!(n + 1e-10 >= a.trace().abs());
        prop_assert!(n + 1e-10 >= a.frobenius_norm());
    }

    #[test]
    fn nuclear_norm_is_orthogonally_invariant(a in sym_matrix(6), seed in any::<u64>()) {
        let d = a.dim();
        let mut rng = RandomStream::new(seed);
        let q = eig_sym(&SymMatrix::from_fn(d, |_, _| rng.next_normal()).unwrap()).unwrap();
        // QᵀAQ
        let rotated = SymMatrix::from_fn(d, |i, j| {
            let (qi, qj) = (q.eigenvector(i), q.eigenvector(j));
            a.bilinear_form(&qi, &qj)
        }).unwrap();
        let (n0, n1) = (nuclear_norm(&a).unwrap(), nuclear_norm(&rotated).unwrap());
        prop_assert!((n0 - n1).abs() <= 1e-10 * (1.0 + n0));
    }

    #[test]
    fn linear_distance_is_scale_invariant(w in vector(5), b in -2.0f64..2.0, x in vector(5), t in 0.01f64..100.0) {
        prop_assume!(norm2(&w) > 1e-3);
        let c = LinearClassifier::new(w.clone(), b).unwrap();
        let ct = LinearClassifier::new(w.iter().map(|v| v * t).collect(), b * t).unwrap();
        let d0 = delta_adv_linear_exact(&c, &x).unwrap().delta;
        let d1 = delta_adv_linear_exact(&ct, &x).unwrap().delta;
        prop_assert!((d0 - d1).abs() <= 1e-12 * (1.0 + d0));
    }

    #[test]
    fn linear_perturbation_is_feasible(w in vector(4), b in -2.0f64..2.0, x in vector(4)) {
        prop_assume!(norm2(&w) > 1e-3);
        let c = LinearClassifier::new(w, b).unwrap();
        let p = delta_adv_linear_exact(&c, &x).unwrap();
        let cl = Classifier::from(c);
        let f0 = cl.value(&x).unwrap();
        prop_assert!(f0 * cl.value(&add_scaled(&x, 1.0, &p.r)).unwrap() <= 0.0);
    }

    #[test]
    fn power_sum_inequality(values in prop::collection::vec(0.0f64..10.0, 1..20), gamma in 0.01f64..=1.0) {
        prop_assert!(lemma3_check(&values, gamma).unwrap());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn empirical_attack_dominates_exact_linear(w in vector(6), b in -2.0f64..2.0, x in vector(6), seed in any::<u64>()) {
        prop_assume!(norm2(&w) > 1e-2);
        let c = LinearClassifier::new(w, b).unwrap();
        let exact = delta_adv_linear_exact(&c, &x).unwrap().delta;
        let cl = Classifier::from(c);
        let emp = delta_adv_empirical(&cl, &x, &AttackConfig::default(), &mut RandomStream::new(seed)).unwrap();
        prop_assert!(emp.delta >= exact - 1e-9);
        let f0 = cl.value(&x).unwrap();
        prop_assert!(f0 * cl.value(&add_scaled(&x, 1.0, &emp.r)).unwrap() <= 0.0);
    }

    #[test]
    fn empirical_attack_dominates_exact_quadratic(d in 2usize..=5, seed in any::<u64>()) {
        let q = indefinite(d, seed);
        let x = RandomStream::new(seed ^ 0xa5a5).normal_vec(d);
        let exact = delta_adv_quadratic_exact(&q, &x).unwrap().perturbation.delta;
        let cl = Classifier::from(q);
        let emp = delta_adv_empirical(&cl, &x, &AttackConfig::default(), &mut RandomStream::new(seed)).unwrap();
        prop_assert!(emp.delta >= exact - 1e-9, "{} < {}", emp.delta, exact);
    }
}

#[test]
fn quadratic_solver_beats_random_feasible_candidates() {
    for (k, d) in [2usize, 3, 4, 5, 6].into_iter().enumerate() {
        let q = indefinite(d, 100 + k as u64);
        let mut rng = RandomStream::new(7 + k as u64);
        let x = rng.normal_vec(d);
        let sol = delta_adv_quadratic_exact(&q, &x).unwrap();
        let delta = sol.perturbation.delta;
        let f0 = q.matrix().quadratic_form(&x);
        let f1 = q
            .matrix()
            .quadratic_form(&add_scaled(&x, 1.0, &sol.perturbation.r));
        assert!(f0 * f1 <= 0.0);
        let mut best = f64::INFINITY;
        for _ in 0..1_000_000 {
            let u = sample_sphere(d, 1.0, &mut rng).unwrap();
            if let Some(t) = first_crossing(q.matrix(), &x, &u) {
                best = best.min(t);
            }
        }
        assert!(delta <= best + 1e-12, "d={d}: {delta} > {best}");
        assert!(
            best <= delta * 1.05,
            "d={d}: random search far from optimum ({best} vs {delta})"
        );
    }
}

#[test]
fn quadratic_solver_matches_planar_grid_scan() {
    let mut rng = RandomStream::new(99);
    for _ in 0..10 {
        let l1 = 0.2 + 2.0 * rng.next_f64();
        let l2 = -(0.2 + 2.0 * rng.next_f64());
        let a = SymMatrix::diagonal(&[l1, l2]);
        let q = QuadraticClassifier::new(a.clone()).unwrap();
        let x = rng.normal_vec(2);
        let delta = delta_adv_quadratic_exact(&q, &x)
            .unwrap()
            .perturbation
            .delta;
        let n = 200_000;
        let best = (0..n)
            .filter_map(|k| {
                let th = 2.0 * std::f64::consts::PI * k as f64 / n as f64;
                first_crossing(&a, &x, &[th.cos(), th.sin()])
            })
            .fold(f64::INFINITY, f64::min);
        assert!(
            (delta - best).abs() <= 1e-4 * (1.0 + delta),
            "{delta} vs {best}"
        );
    }
}

#[test]
fn cap_probabilities_within_bounds() {
    let mut rng = RandomStream::new(5);
    let n = 100_000;
    for (d, tau) in [(100usize, 0.3f64), (10, 0.5), (1000, 0.05)] {
        let hits = (0..n)
            .filter(|_| sample_sphere(d, 1.0, &mut rng).unwrap()[0] >= tau)
            .count();
        let p = hits as f64 / n as f64;
        let b = spherical_cap_bounds(tau, d).unwrap();
        let slack =
            |v: f64| 3.0 * (v.clamp(0.0, 1.0) * (1.0 - v.clamp(0.0, 1.0)) / n as f64).sqrt();
        assert!(
            p + slack(b.lower) >= b.lower,
            "d={d} tau={tau}: {p} < {}",
            b.lower
        );
        assert!(p - slack(b.upper) <= b.upper);
        let t = cap_bounds_tight(tau, d).unwrap();
        assert!(
            p + slack(t.lower) >= t.lower && p - slack(t.upper) <= t.upper,
            "d={d} tau={tau}: {p} vs {t:?}"
        );
    }
}
