use approx::assert_relative_eq;
use hypconst::constants::{
    curtain_model_params, delta_from_delta_prime, delta_prime, eval_f, kappa_n, kappa_table, kappa_terms, sci3,
    solve_kappa, theorem_b_bounds, KappaMethod, QuasiParams, DEFAULT_TOLERANCE,
};
use hypconst::ConstantsError;
use proptest::prelude::*;

fn f_ref(q1: f64, q2: f64, d: f64, x: f64) -> f64 {
    let c = q1.powi(3);
    d * (8.0 * x * c + 7.0 * c * q2 + 2.0 * d * q1).log2() + 0.5 * (q1 + q2) * d + d
}

/// Newton iteration on `x − f(x)` from far to the right; `f` is concave, so
/// the iterates decrease monotonically to the larger crossing.
fn kappa_ref(q1: f64, q2: f64, d: f64) -> f64 {
    let c = q1.powi(3);
    let mut x = 1e3 * (d + q1 + q2 + 1.0).powi(2);
    for _ in 0..200 {
        let g = x - f_ref(q1, q2, d, x);
        let dg = 1.0 - d * 8.0 * c / ((8.0 * x * c + 7.0 * c * q2 + 2.0 * d * q1) * std::f64::consts::LN_2);
        let next = x - g / dg;
        if (next - x).abs() <= 1e-13 * x {
            return next;
        }
        x = next;
    }
    x
}

fn kappa_n_ref(q: f64, d: f64, n: u32) -> f64 {
    let l = (n as f64 + 8.0).log2();
    let k = l + 9.0 + (1.0 + (l + 9.0).log2()).ceil();
    k * q * d.powf(1.0 + 1.0 / l)
}

fn params() -> impl Strategy<Value = QuasiParams> {
    (1.0f64..5.0, 0.0f64..20.0, 0.1f64..200.0).prop_map(|(q1, q2, d)| QuasiParams::new(q1, q2, d).unwrap())
}

#[test]
fn f_examples() {
    let p = QuasiParams::new(1.0, 0.0, 1.0).unwrap();
    assert_eq!(eval_f(&p, 0.0).unwrap(), 2.5);
    assert_relative_eq!(eval_f(&p, 1.0).unwrap(), f_ref(1.0, 0.0, 1.0, 1.0), max_relative = 1e-15);
    assert!(matches!(eval_f(&p, -1.0), Err(ConstantsError::Domain(_))));
    let c = curtain_model_params(1.0).unwrap();
    assert_relative_eq!(eval_f(&c, 0.0).unwrap(), 125.0 * 299f64.log2() + 625.0, max_relative = 1e-14);
}

#[test]
fn kappa_matches_newton_oracle() {
    for &(q1, q2, d) in &[(1.0, 0.0, 1.0), (1.0, 7.0, 125.0), (2.0, 3.0, 10.0), (1.0, 1.0, 2.0), (3.0, 0.5, 0.7)] {
        let p = QuasiParams::new(q1, q2, d).unwrap();
        let cert = solve_kappa(&p, DEFAULT_TOLERANCE).unwrap();
        assert_eq!(cert.method, KappaMethod::FixedPoint);
        assert_relative_eq!(cert.kappa, kappa_ref(q1, q2, d), max_relative = 1e-8);
        assert!(cert.verify(&p));
    }
    let base = solve_kappa(&QuasiParams::new(1.0, 0.0, 1.0).unwrap(), DEFAULT_TOLERANCE).unwrap();
    assert_eq!(sci3(base.kappa), "7.44e0");
}

#[test]
fn kappa_n_matches_formula() {
    assert_eq!(kappa_terms(8).k, 18.0);
    assert_eq!(kappa_terms(8).eps, 0.25);
    for n in [1, 2, 8, 24, 100, 2000, 10_000] {
        let p = QuasiParams::rough(7.0, 125.0).unwrap();
        assert_relative_eq!(kappa_n(&p, n).unwrap().kappa, kappa_n_ref(7.0, 125.0, n), max_relative = 1e-13);
    }
    let bad = QuasiParams::new(1.0, 0.5, 0.5).unwrap();
    assert!(matches!(kappa_n(&bad, 8), Err(ConstantsError::KappaHypothesis { .. })));
}

#[test]
fn kappa_table_rows() {
    let rows = kappa_table(1.0, 1.0, 3).unwrap();
    assert_eq!(rows.len(), 3);
    for r in &rows {
        assert!((17.0..=18.0).contains(&r.kappa), "{}", r.kappa);
    }
    let rows = kappa_table(7.0, 125.0, 2000).unwrap();
    let last = rows.last().unwrap();
    assert_eq!(last.argmin, 2000);
    assert_relative_eq!(rows[7].kappa, 18.0 * 7.0 * 125f64.powf(1.25), max_relative = 1e-13);
    // beyond n = 2000 the sequence keeps falling for a while, then turns
    let wide = kappa_table(7.0, 125.0, 4000).unwrap();
    let turn = wide.last().unwrap().argmin;
    assert!(turn > 2000 && turn < 4000, "{turn}");
}

#[test]
fn closed_form_route() {
    let b = theorem_b_bounds(7.0, 125.0).unwrap();
    let dp = 72.0 * 7.0 * 125f64.powf(1.25) + 250.0 + 21.0;
    assert_relative_eq!(b.delta_prime, dp, max_relative = 1e-14);
    assert_relative_eq!(b.delta.unwrap(), 56.0 * dp + 42.0, max_relative = 1e-14);
    assert!(theorem_b_bounds(0.5, 125.0).is_err());
}

#[test]
fn delta_prime_general_and_rough_forms_agree() {
    let p = QuasiParams::rough(3.0, 11.0).unwrap();
    assert_relative_eq!(delta_prime(&p, 100.0).unwrap(), 400.0 + 22.0 + 9.0, max_relative = 1e-14);
    let g = QuasiParams::new(2.0, 3.0, 5.0).unwrap();
    let want = 2.0 * (2.0 * (2.0 * 10.0 + 5.0 + 3.0) + 3.0 + 10.0) + 5.0;
    assert_relative_eq!(delta_prime(&g, 10.0).unwrap(), want, max_relative = 1e-14);
    assert_eq!(delta_from_delta_prime(7.0, 1.0), 98.0);
}

#[test]
fn rejects_invalid_params() {
    assert!(QuasiParams::new(0.5, 1.0, 1.0).is_err());
    assert!(QuasiParams::new(1.0, -1.0, 1.0).is_err());
    assert!(QuasiParams::new(1.0, 1.0, 0.0).is_err());
    assert!(QuasiParams::new(1.0, f64::NAN, 1.0).is_err());
    assert!(curtain_model_params(0.0).is_err());
}

proptest! {
    #[test]
    fn f_is_strictly_increasing(p in params(), x in 0.0f64..1e6, dx in 1e-3f64..1e5) {
        prop_assert!(eval_f(&p, x).unwrap() < eval_f(&p, x + dx).unwrap());
    }

    #[test]
    fn f_is_concave(p in params(), x in 0.0f64..1e6, y in 0.0f64..1e6) {
        let mid = eval_f(&p, 0.5 * (x + y)).unwrap();
        let chord = 0.5 * (eval_f(&p, x).unwrap() + eval_f(&p, y).unwrap());
        prop_assert!(mid >= chord - 1e-9 * chord.abs().max(1.0));
    }

    #[test]
    fn kappa_certificate_holds(p in params()) {
        let cert = solve_kappa(&p, DEFAULT_TOLERANCE).unwrap();
        prop_assert!(cert.verify(&p));
        let k = cert.kappa;
        prop_assert!(eval_f(&p, k).unwrap() <= k * (1.0 + 1e-12));
        for t in [1.0, 10.0, 100.0] {
            prop_assert!(eval_f(&p, k + t).unwrap() < k + t);
        }
        let z = cert.strict_member(&p, DEFAULT_TOLERANCE);
        prop_assert!(z.is_finite());
    }

    #[test]
    fn kappa_n_lies_beyond_the_crossing(q in 1.0f64..10.0, d in 1.0f64..300.0, n in 1u32..5000) {
        let p = QuasiParams::rough(q, d).unwrap();
        let kn = kappa_n(&p, n).unwrap().kappa;
        prop_assert!(eval_f(&p, kn).unwrap() <= kn);
        let k = solve_kappa(&p, DEFAULT_TOLERANCE).unwrap().kappa;
        prop_assert!(kn >= k * (1.0 - 1e-9));
    }

    #[test]
    fn kappa_is_monotone_in_d(q in 1.0f64..5.0, d in 1.0f64..100.0, extra in 0.1f64..50.0) {
        let a = solve_kappa(&QuasiParams::rough(q, d).unwrap(), DEFAULT_TOLERANCE).unwrap().kappa;
        let b = solve_kappa(&QuasiParams::rough(q, d + extra).unwrap(), DEFAULT_TOLERANCE).unwrap().kappa;
        prop_assert!(b >= a * (1.0 - 1e-9));
    }
}
