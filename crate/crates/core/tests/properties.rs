//! Property tests for the invariants of the series, Bessel, recurrence, spectral and
//! moment layers.

use std::f64::consts::PI;

use num_complex::Complex64;
use proptest::prelude::*;

use qlommel::bessel::{j, j_scaled, J, J_scaled, BesselParams};
use qlommel::lommel::{h_eval, h_explicit, lambda_P};
use qlommel::lommel::V_poly;
use qlommel::moments::{
    c_moments, d_moments, gram_P, gronwall_constant, hankel_minors, lacunary_check, L_apply, L_residue,
};
use qlommel::poly::LaurentCoeffs;
use qlommel::qseries::{basic_phi, qpoch, qpoch_real};
use qlommel::spectral::{aberth_roots, hessenberg, hessenberg_eigenvalues, multiset_distance, zeros_J, zeros_j};
use qlommel::verify::{check_identity, IdentityId, IdentityParams, ALGEBRAIC_TOL};
use qlommel::QContext;

fn ctx(q: f64) -> QContext {
    QContext::new(q).unwrap()
}

fn c(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

/// `|a - b|` against the largest of the given magnitudes (at least 1).
fn rel(a: f64, b: f64, scale: &[f64]) -> f64 {
    let s = scale.iter().fold(1f64.max(a.abs()).max(b.abs()), |m, v| m.max(v.abs()));
    (a - b).abs() / s
}

fn annulus(lo: f64, hi: f64) -> impl Strategy<Value = Complex64> {
    (lo..hi, 0.0..2.0 * PI).prop_map(|(r, t)| Complex64::from_polar(r, t))
}

fn identity(q: f64, id: IdentityId, params: IdentityParams) -> f64 {
    check_identity(&ctx(q), id, &params).unwrap().residual
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn qpoch_splits(re in -2.0..2.0f64, im in -2.0..2.0f64, m in 0usize..=20, n in 0usize..=20, q in 0.2..0.8f64) {
        let a = Complex64::new(re, im);
        prop_assume!(a.norm() <= 2.0);
        let k = ctx(q);
        let whole = qpoch(&k, a, m + n);
        let split = qpoch(&k, a, m) * qpoch(&k, a * q.powi(m as i32), n);
        prop_assert!((whole - split).norm() <= 1e-13 * whole.norm().max(1e-300) + 1e-300);
    }

    #[test]
    fn q_binomial_instance(x in -0.9..0.9f64, l in 0usize..=10, q in 0.2..0.8f64) {
        let k = ctx(q);
        let sum = basic_phi(&k, &[c(q.powi(l as i32 + 1))], &[], c(x * x)).unwrap().re;
        let closed = 1.0 / qpoch_real(&k, x * x, l + 1);
        prop_assert!((sum - closed).abs() <= 1e-12 * closed);
    }

    #[test]
    fn terminating_series_stop_early(n in 0usize..15, b in -0.9..0.9f64, z in -3.0..3.0f64, q in 0.2..0.8f64) {
        let k = ctx(q);
        let num = [c(q.powi(-(n as i32))), c(0.3)];
        let den = [c(b)];
        let full = basic_phi(&k, &num, &den, c(z)).unwrap();
        let short = basic_phi(&k.with_max_terms(n + 1).unwrap(), &num, &den, c(z)).unwrap();
        prop_assert_eq!(full, short);
    }

    #[test]
    fn contiguous_relations_in_big_j(x in 0.2..2.0f64, nu in 0.3..3.0f64, q in 0.3..0.7f64) {
        let k = ctx(q);
        let f = |mu: f64, y: f64| J(&BesselParams::new(mu, k), y).unwrap();
        // even-n relation
        let a = (1.0 - q.powf(nu)) / x * f(nu, x);
        let b = f(nu - 1.0, x);
        let r = q.powf((nu + 1.0) / 2.0) * f(nu + 1.0, x * q.sqrt());
        prop_assert!(rel(a - b, r, &[a, b]) < 1e-12);
        // odd-n relation
        let b = q.powf((nu - 1.0) / 2.0) * f(nu - 1.0, x / q.sqrt());
        let r = f(nu + 1.0, x);
        prop_assert!(rel(a - b, r, &[a, b]) < 1e-12);
    }

    #[test]
    fn shift_relations_in_j(x in 0.2..3.0f64, nu in 0.3..3.0f64, q in 0.3..0.7f64) {
        let k = ctx(q);
        let f = |mu: f64, y: f64| j(&BesselParams::new(mu, k), y).unwrap();
        let sq = q.sqrt();
        let a = f(nu, x);
        let b = f(nu + 1.0, x) / x;
        let r = -q.powf(1.0 + nu / 2.0) * x * x * f(nu, x * sq);
        prop_assert!(rel(a - b, r, &[a, b]) < 1e-12);
        let a = f(nu + 1.0, x);
        let b = q.powf(-nu / 2.0) * x * f(nu, x * sq);
        let r = -q.powf((1.0 - nu) / 2.0) * x * x * f(nu + 1.0, x * sq);
        prop_assert!(rel(a - b, r, &[a, b]) < 1e-12);
    }

    #[test]
    fn heine_contiguous(seed in 0u64..10_000, zr in 0.1..4.0f64, zt in 0.0..2.0 * PI, q in 0.2..0.8f64) {
        // c is drawn from the seed, z from the strategy
        let params = IdentityParams { seed, ..IdentityParams::new(1.0) }.at(Complex64::from_polar(zr, zt));
        prop_assert!(identity(q, IdentityId::Heine, params) < ALGEBRAIC_TOL);
    }

    #[test]
    fn bessel_index_recurrences(x in 1.05..3.0f64, nu in 0.2..2.5f64, q in 0.3..0.7f64) {
        let k = ctx(q);
        let y = 1.0 / x;
        for m in 0..=10 {
            let mu = nu + m as f64;
            let a = 1.0 / x + x * (1.0 - q.powf(mu));
            let f = |s: f64| J(&BesselParams::new(mu + s, k), y).unwrap();
            let (lo, mid, hi) = (f(-1.0), f(0.0), f(1.0));
            prop_assert!(rel(hi, a * mid - lo, &[a * mid, lo]) < 1e-11);
            let g = |s: f64| j(&BesselParams::new(mu + s, k), x).unwrap();
            let (lo, mid, hi) = (g(-1.0), g(0.0), g(1.0));
            prop_assert!(rel(hi, a * mid - lo, &[a * mid, lo]) < 1e-11);
        }
    }

    #[test]
    fn h_recurrence_on_annulus(x in annulus(0.5, 2.0), nu in 0.2..3.0f64, q in 0.2..0.8f64) {
        let k = ctx(q);
        for m in 0..30i64 {
            let a = 1.0 / x + x * (1.0 - q.powf(nu + m as f64));
            let prev = h_eval(&k, nu, m - 1, x).unwrap();
            let cur = h_eval(&k, nu, m, x).unwrap();
            let next = h_eval(&k, nu, m + 1, x).unwrap();
            let scale = (a * cur).norm().max(prev.norm()).max(1.0);
            prop_assert!((next - a * cur + prev).norm() / scale < 1e-12);
        }
        for m in 0..=12usize {
            let rec = h_eval(&k, nu, m as i64, x).unwrap();
            let exp = h_explicit(&k, nu, m, x).unwrap();
            prop_assert!((rec - exp).norm() <= 1e-10 * rec.norm().max(1.0));
        }
    }

    #[test]
    fn connection_formulas(x in 1.05..3.0f64, nu in 0.2..2.5f64, q in 0.3..0.7f64) {
        let p = IdentityParams::new(nu).with_degree(15).at(c(x));
        prop_assert!(identity(q, IdentityId::ConnJ, p) < 1e-10);
        let p = IdentityParams::new(nu).with_degree(12).at(c(1.0 / x));
        prop_assert!(identity(q, IdentityId::ConnP, p) < 1e-10);
        prop_assert!(identity(q, IdentityId::ConnPP, p) < 1e-10);
    }

    #[test]
    fn hurwitz_limits(t in 0.0..2.0 * PI, nu in 0.2..2.5f64) {
        let out = check_identity(&ctx(0.5), IdentityId::HurwitzOut, &IdentityParams::new(nu).at(Complex64::from_polar(2.0, t))).unwrap();
        prop_assert!(out.passed && out.ladder[2].index == 40, "{:?}", out);
        let inn = check_identity(&ctx(0.5), IdentityId::HurwitzIn, &IdentityParams::new(nu).at(Complex64::from_polar(0.5, t))).unwrap();
        prop_assert!(inn.passed, "{:?}", inn);
        for id in [IdentityId::LimP, IdentityId::LimP1] {
            let r = check_identity(&ctx(0.5), id, &IdentityParams::new(nu).at(Complex64::from_polar(0.8, t))).unwrap();
            prop_assert!(r.passed, "{:?}", r);
        }
    }

    #[test]
    fn perturbation_bounds(nu in 0.2..3.0f64, q in 0.2..0.8f64) {
        let p = IdentityParams::new(nu);
        prop_assert_eq!(identity(q, IdentityId::BoundCircle, p), 0.0);
        prop_assert_eq!(identity(q, IdentityId::BoundMin, p.with_degree(10)), 0.0);
    }

    #[test]
    fn green_forward(x in annulus(0.5, 2.0), nu in 0.2..3.0f64, q in 0.2..0.8f64) {
        prop_assert!(identity(q, IdentityId::GreenFwd, IdentityParams::new(nu).at(x)) < 1e-11);
    }

    #[test]
    fn summation_formula(x in annulus(0.1, 1.5), q in 0.2..0.8f64) {
        prop_assert!(identity(q, IdentityId::Sum3phi2, IdentityParams::new(1.0).at(x)) < 1e-11);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn spectrum_equals_roots(n in 1usize..=20, nu in prop::sample::select(vec![0.5, 1.0, 2.5]), q in prop::sample::select(vec![0.3, 0.6])) {
        let k = ctx(q);
        let eig = hessenberg_eigenvalues(&hessenberg(&k, nu, n).unwrap()).unwrap();
        let roots = aberth_roots(&V_poly(&k, nu, n).poly, None).unwrap();
        prop_assert!(multiset_distance(&eig, &roots) < 1e-8);
    }

    #[test]
    fn residue_path_on_monomials(e in -16i64..=16, s in prop::sample::select(vec![0.8, 1.0, 1.25]), nu in prop::sample::select(vec![0.5, 1.5, 3.0])) {
        let k = ctx(0.5);
        let p = LaurentCoeffs::monomial(e, 1.0);
        let want = L_apply(&k, nu, &p).unwrap();
        let got = L_residue(&k, nu, &p, s, 64).unwrap().residue_value.unwrap();
        prop_assert!((got - want).abs() <= 1e-8 * want.abs().max(1.0), "{} vs {}", got, want);
    }
}

#[test]
fn zeros_are_simple_and_signs_alternate() {
    for &(q, nu) in &[(0.3, 1.0), (0.5, 1.5), (0.7, 2.5)] {
        let k = ctx(q);
        let zs = zeros_J(&k, nu - 1.0, 15).unwrap();
        let lo = BesselParams::new(nu - 1.0, k);
        let hi = BesselParams::new(nu, k);
        for z in &zs.zeros {
            let d = J_scaled(&lo, z).unwrap();
            assert!((d.derivative * z.x).abs() > 1e-8, "J' too small at {}", z.x);
            let v = J_scaled(&hi, z).unwrap();
            assert!(v.mantissa * d.derivative < 0.0, "same signs at {}", z.x);
        }
        let zs = zeros_j(&k, nu - 1.0, 15).unwrap();
        let lo = BesselParams::new(nu - 1.0, k);
        for z in &zs.zeros {
            let d = j_scaled(&lo, z).unwrap();
            assert!((d.derivative * z.x).abs() > 1e-8);
            let v = j_scaled(&hi, z).unwrap();
            assert!(v.mantissa * d.derivative < 0.0, "same signs at {}", z.x);
        }
    }
}

#[test]
fn companion_zeros_accumulate_at_infinity() {
    let t = zeros_j(&ctx(0.5), 0.0, 10).unwrap();
    let x = t.values();
    assert!(x.windows(2).all(|w| w[1] > w[0]));
    assert!(x[9] > 10.0 * x[0]);
}

#[test]
fn lacunary_gronwall_and_positivity() {
    for &(q, nu) in &[(0.3, 0.5), (0.5, 1.5), (0.7, 2.5)] {
        let k = ctx(q);
        assert!(lacunary_check(&k, nu, 8).unwrap() < 1e-9);
        let a = gronwall_constant(&k, nu);
        let cm = c_moments(&k, nu, 0, 12).unwrap();
        for (i, v) in cm.values.iter().enumerate() {
            assert!(v.abs() <= a * (i as f64 * a).exp());
        }
        for m in hankel_minors(&cm.values, 5).unwrap() {
            assert!(m > 0.0);
        }
        for m in hankel_minors(&d_moments(&k, nu, 0, 12).values, 5).unwrap() {
            assert!(m > 0.0);
        }
    }
}

#[test]
fn gram_diagonal_follows_recurrence_coefficients() {
    for &nu in &[0.5, 2.0] {
        let g = gram_P(&ctx(0.5), nu, 8, 60).unwrap();
        for n in 1..=8 {
            let ratio = g.matrix[n][n] / g.matrix[n - 1][n - 1];
            assert!((ratio - lambda_P(0.5, nu, n)).abs() < 1e-7 * ratio, "ν = {nu}, n = {n}");
        }
    }
}
