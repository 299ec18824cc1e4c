//! Recurrence-defined families: the Laurent q-Lommel polynomials `h_{m,ν}`, the
//! polynomials `V_{m,ν}`, the positive-moment family `p_n`, the negative-moment family
//! `P_n` with its even/odd splits, Al-Salam–Chihara, continuous q-Hermite, Chebyshev `U`,
//! the minimal solutions `h^±`, and the closed forms for `ν = 1/2`.
//!
//! Forward recurrences are the evaluation path. The explicit sums (`h_explicit`,
//! `split_explicit`, `u_explicit`, ...) are independent forms kept for cross-checks.
#![allow(non_snake_case)]

use std::ops::{Add, Div, Mul, Sub};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::bessel::{j_reg, BesselParams, J_reg};
use crate::error::{Error, Result};
use crate::poly::{LaurentCoeffs, Poly};
use crate::qseries::{basic_phi, qpoch_inf, qpoch_inf_real, qpoch_real, qpowi, QContext};

/// Field operations needed by the recurrences; implemented for `f64` and `Complex64`.
pub trait Scalar:
    Copy + From<f64> + Add<Output = Self> + Sub<Output = Self> + Mul<Output = Self> + Div<Output = Self>
{
}

impl<T> Scalar for T where
    T: Copy + From<f64> + Add<Output = T> + Sub<Output = T> + Mul<Output = T> + Div<Output = T>
{
}

fn c(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

/// Runs `v_{k+1} = a_k v_k - b_k v_{k-1}` from `v_{-1} = 0`, `v_0 = 1`; returns `v_0..=v_n`.
fn three_term<T: Scalar>(n: usize, coeff: impl Fn(usize) -> (T, T)) -> Vec<T> {
    let mut out = Vec::with_capacity(n + 1);
    let mut prev = T::from(0.0);
    let mut cur = T::from(1.0);
    out.push(cur);
    for k in 0..n {
        let (a, b) = coeff(k);
        let next = a * cur - b * prev;
        prev = cur;
        cur = next;
        out.push(cur);
    }
    out
}

/// Same recurrence over polynomials, with `a_k = α_k + β_k x`.
fn three_term_poly(n: usize, coeff: impl Fn(usize) -> (f64, f64, f64)) -> Vec<Poly> {
    let mut out = Vec::with_capacity(n + 1);
    let mut prev = Poly::zero();
    let mut cur = Poly::one();
    out.push(cur.clone());
    for k in 0..n {
        let (alpha, beta, b) = coeff(k);
        let next = &(&cur.scale(alpha) + &cur.shift(1).scale(beta)) - &prev.scale(b);
        prev = cur;
        cur = next;
        out.push(cur.clone());
    }
    out
}

fn one_minus_qpow(ctx: &QContext, e: f64) -> f64 {
    1.0 - ctx.q.powf(e)
}

// ---------------------------------------------------------------------------
// Laurent q-Lommel polynomials

/// `h_{0..=m,ν}(x)` by forward recurrence.
pub fn h_table<T: Scalar>(ctx: &QContext, nu: f64, m: usize, x: T) -> Vec<T> {
    let inv = T::from(1.0) / x;
    three_term(m, |k| (inv + x * T::from(one_minus_qpow(ctx, nu + k as f64)), T::from(1.0)))
}

/// `h_{m,ν}(x;q)` for `m ≥ -1`.
pub fn h_eval(ctx: &QContext, nu: f64, m: i64, x: Complex64) -> Result<Complex64> {
    if x.norm() == 0.0 {
        return Err(Error::Domain("h_{m,ν} has a pole at x = 0".into()));
    }
    if m < -1 {
        return Err(Error::Domain(format!("index m = {m} < -1")));
    }
    if m == -1 {
        return Ok(c(0.0));
    }
    Ok(*h_table(ctx, nu, m as usize, x).last().unwrap())
}

/// `V_{m,ν}` together with a flag raised when `(q^ν;q)_m = 0`, i.e. some `1 - q^{ν+i}`
/// with `i < m` vanishes and the degree drops.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VPoly {
    pub poly: Poly,
    pub degenerate: bool,
}

/// `(q^ν;q)_m == 0`, which happens exactly when `ν ∈ {0, -1, ..., 1-m}`.
pub fn is_degenerate(nu: f64, m: usize) -> bool {
    (0..m).any(|i| nu + i as f64 == 0.0)
}

/// `V_{0..=m,ν}` from `V_{k+1} = (1 + x(1 - q^{ν+k})) V_k - x V_{k-1}`.
pub fn V_polys(ctx: &QContext, nu: f64, m: usize) -> Vec<Poly> {
    let mut out = Vec::with_capacity(m + 1);
    let mut prev = Poly::zero();
    let mut cur = Poly::one();
    out.push(cur.clone());
    for k in 0..m {
        let a = one_minus_qpow(ctx, nu + k as f64);
        let next = &(&cur + &cur.shift(1).scale(a)) - &prev.shift(1);
        prev = cur;
        cur = next;
        out.push(cur.clone());
    }
    out
}

pub fn V_poly(ctx: &QContext, nu: f64, m: usize) -> VPoly {
    let mut poly = V_polys(ctx, nu, m).pop().unwrap();
    let degenerate = is_degenerate(nu, m);
    if degenerate {
        while poly.coeffs.len() > 1 && poly.leading() == 0.0 {
            poly.coeffs.pop();
        }
    }
    VPoly { poly, degenerate }
}

/// Coefficients of `h_{m,ν}`: the coefficient of `x^{2j-m}` is the `j`-th coefficient of `V_{m,ν}`.
pub fn h_coeffs(ctx: &QContext, nu: f64, m: usize) -> LaurentCoeffs {
    let v = V_polys(ctx, nu, m).pop().unwrap();
    let mut coeffs = vec![0.0; 2 * m + 1];
    for (j, &a) in v.coeffs.iter().enumerate() {
        coeffs[2 * j] = a;
    }
    LaurentCoeffs::new(-(m as i64), coeffs)
}

/// `h_{m,ν}` from the explicit double sum `Σ_n x^{m-2n} ₂φ₁(q^{n-m}, q^{n+1}; q; q, q^{ν+m-n})`.
pub fn h_explicit(ctx: &QContext, nu: f64, m: usize, x: Complex64) -> Result<Complex64> {
    let q = ctx.q;
    let mut sum = c(0.0);
    for n in 0..=m {
        let phi = basic_phi(
            ctx,
            &[c(qpowi(q, n as i64 - m as i64)), c(qpowi(q, n as i64 + 1))],
            &[c(q)],
            c(q.powf(nu + (m - n) as f64)),
        )?;
        sum += x.powi(m as i32 - 2 * n as i32) * phi;
    }
    Ok(sum)
}

// ---------------------------------------------------------------------------
// Positive-moment family p_n

/// `λ_n` of the positive-moment recurrence: `λ_{2k} = q^k`, `λ_{2k+1} = q^{ν+3k+1}`.
pub fn lambda_p(q: f64, nu: f64, n: usize) -> f64 {
    let k = (n / 2) as f64;
    if n % 2 == 0 {
        q.powf(k)
    } else {
        q.powf(nu + 3.0 * k + 1.0)
    }
}

/// Closed form `q^{(ν+n)(⌊(n+1)/2⌋-⌊n/2⌋)+⌊n/2⌋}` of [`lambda_p`].
pub fn lambda_p_closed(q: f64, nu: f64, n: usize) -> f64 {
    let e = (nu + n as f64) * ((n + 1) / 2 - n / 2) as f64 + (n / 2) as f64;
    q.powf(e)
}

/// `p_{0..=n}(x)` from `p_{k+1} = x(1-q^{ν+k}) p_k - λ_k p_{k-1}`.
pub fn p_table<T: Scalar>(ctx: &QContext, nu: f64, n: usize, x: T) -> Vec<T> {
    three_term(n, |k| {
        (
            x * T::from(one_minus_qpow(ctx, nu + k as f64)),
            T::from(lambda_p(ctx.q, nu, k)),
        )
    })
}

/// Associated `p^{(1)}_{0..=n}(x)`: `p^{(1)}_k = x(1-q^{ν+k}) p^{(1)}_{k-1} - λ_k p^{(1)}_{k-2}`.
pub fn p1_table<T: Scalar>(ctx: &QContext, nu: f64, n: usize, x: T) -> Vec<T> {
    three_term(n, |k| {
        (
            x * T::from(one_minus_qpow(ctx, nu + k as f64 + 1.0)),
            T::from(lambda_p(ctx.q, nu, k + 1)),
        )
    })
}

fn pick<T: Scalar>(n: i64, table: impl FnOnce(usize) -> Vec<T>) -> T {
    if n < 0 {
        T::from(0.0)
    } else {
        table(n as usize)[n as usize]
    }
}

/// `p_n(x)` for `n ≥ -1`.
pub fn p_eval(ctx: &QContext, nu: f64, n: i64, x: f64) -> f64 {
    pick(n, |m| p_table(ctx, nu, m, x))
}

/// `p^{(1)}_n(x)` for `n ≥ -1`.
pub fn p1_eval(ctx: &QContext, nu: f64, n: i64, x: f64) -> f64 {
    pick(n, |m| p1_table(ctx, nu, m, x))
}

/// Coefficient form of `p_0..=p_n`.
pub fn p_polys(ctx: &QContext, nu: f64, n: usize) -> Vec<Poly> {
    three_term_poly(n, |k| (0.0, one_minus_qpow(ctx, nu + k as f64), lambda_p(ctx.q, nu, k)))
}

// ---------------------------------------------------------------------------
// Negative-moment family P_n

/// `λ_n` of the negative-moment recurrence: `λ_{2k} = q^k`, `λ_{2k+1} = q^{k+ν}`.
pub fn lambda_P(q: f64, nu: f64, n: usize) -> f64 {
    let k = (n / 2) as f64;
    if n % 2 == 0 {
        q.powf(k)
    } else {
        q.powf(k + nu)
    }
}

/// Monic `P_{0..=n}(x)`: `P_{k+1} = x P_k - λ_k P_{k-1}`.
pub fn P_table<T: Scalar>(ctx: &QContext, nu: f64, n: usize, x: T) -> Vec<T> {
    three_term(n, |k| (x, T::from(lambda_P(ctx.q, nu, k))))
}

/// Associated `P^{(1)}_{0..=n}(x)` with `γ_k = λ_{k+1}`.
pub fn P1_table<T: Scalar>(ctx: &QContext, nu: f64, n: usize, x: T) -> Vec<T> {
    three_term(n, |k| (x, T::from(lambda_P(ctx.q, nu, k + 1))))
}

pub fn P_eval(ctx: &QContext, nu: f64, n: i64, x: f64) -> f64 {
    pick(n, |m| P_table(ctx, nu, m, x))
}

pub fn P1_eval(ctx: &QContext, nu: f64, n: i64, x: f64) -> f64 {
    pick(n, |m| P1_table(ctx, nu, m, x))
}

pub fn P_polys(ctx: &QContext, nu: f64, n: usize) -> Vec<Poly> {
    three_term_poly(n, |k| (0.0, 1.0, lambda_P(ctx.q, nu, k)))
}

pub fn P1_polys(ctx: &QContext, nu: f64, n: usize) -> Vec<Poly> {
    three_term_poly(n, |k| (0.0, 1.0, lambda_P(ctx.q, nu, k + 1)))
}

/// Splits an even/odd family `F_{2n}(x) = E_n(x²)`, `F_{2n+1}(x) = x O_n(x²)`.
///
/// Applied to `P_n` this gives `(R_n, S_n)`; applied to `P^{(1)}_n` it gives `(T_n, U_n)`.
pub fn split_even_odd(family: &[Poly]) -> (Vec<Poly>, Vec<Poly>) {
    let mut even = Vec::new();
    let mut odd = Vec::new();
    for (n, p) in family.iter().enumerate() {
        let start = n % 2;
        let coeffs: Vec<f64> = p.coeffs.iter().skip(start).step_by(2).copied().collect();
        if n % 2 == 0 {
            even.push(Poly::new(coeffs));
        } else {
            odd.push(Poly::new(coeffs));
        }
    }
    (even, odd)
}

/// The four split families of the negative-moment polynomials.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Split {
    R,
    S,
    T,
    U,
}

/// Recurrence coefficients `(a_n, b_n)` in `Y_{n+1} = (x - a_n) Y_n - b_n Y_{n-1}` for a split
/// family, written in closed form.
pub fn split_coefficients(q: f64, nu: f64, which: Split, n: usize) -> (f64, f64) {
    let qn = qpowi(q, n as i64);
    let qnu = q.powf(nu);
    let k = n as f64;
    match which {
        Split::R => {
            let a = if n == 0 { qnu } else { (1.0 + qnu) * qn };
            (a, q.powf(2.0 * k - 1.0 + nu))
        }
        Split::S => ((q + qnu) * qn, q.powf(2.0 * k + nu)),
        Split::T => {
            let a = if n == 0 { q } else { (q + qnu) * qn };
            (a, q.powf(2.0 * k + nu))
        }
        Split::U => ((1.0 + qnu) * qn * q, q.powf(2.0 * k + nu + 1.0)),
    }
}

/// Split family `0..=n` generated from [`split_coefficients`].
pub fn split_polys(ctx: &QContext, nu: f64, which: Split, n: usize) -> Vec<Poly> {
    three_term_poly(n, |k| {
        let (a, b) = split_coefficients(ctx.q, nu, which, k);
        (-a, 1.0, b)
    })
}

// ---------------------------------------------------------------------------
// Al-Salam–Chihara and related

/// `P_k(x;q;a,b,c)` from `P_{n+1} = (x - a q^n) P_n - (c - b q^{n-1})(1 - q^n) P_{n-1}`.
pub fn al_salam_chihara(ctx: &QContext, k: usize, a: f64, b: f64, cc: f64, x: f64) -> f64 {
    let q = ctx.q;
    *three_term(k, |n| {
        let qn = qpowi(q, n as i64);
        (x - a * qn, (cc - b * qn / q) * (1.0 - qn))
    })
    .last()
    .unwrap()
}

/// Monic `u_n(x;a,b;q)`: `u_{n+1} = (x - a q^n) u_n - b² q^{2n-2} u_{n-1}`.
pub fn u_eval(ctx: &QContext, n: i64, a: f64, b: f64, x: f64) -> f64 {
    let q = ctx.q;
    pick(n, |m| {
        three_term(m, |k| {
            (x - a * qpowi(q, k as i64), b * b * qpowi(q, 2 * k as i64 - 2))
        })
    })
}

/// `Σ_{k=0}^n x^{n-k} q^{k(k-1)/2}/(q;q)_k · P_k(y; q; α(n-k), β(n-k), γ)`.
fn asc_sum(
    ctx: &QContext,
    n: usize,
    x: f64,
    y: f64,
    alpha: impl Fn(i64) -> f64,
    beta: impl Fn(i64) -> f64,
    gamma: f64,
) -> f64 {
    let q = ctx.q;
    (0..=n)
        .map(|k| {
            let j = (n - k) as i64;
            x.powi(j as i32) * q.powf((k * k.saturating_sub(1)) as f64 / 2.0) / qpoch_real(ctx, q, k)
                * al_salam_chihara(ctx, k, alpha(j), beta(j), gamma, y)
        })
        .sum()
}

/// `u_n(x;a,b;q)` through its Al-Salam–Chihara expansion.
pub fn u_explicit(ctx: &QContext, n: usize, a: f64, b: f64, x: f64) -> f64 {
    let q = ctx.q;
    let b2 = b * b;
    asc_sum(
        ctx,
        n,
        x,
        -a,
        |j| -a * qpowi(q, j + 1),
        |j| b2 * qpowi(q, 2 * j + 1),
        b2 / q,
    )
}

/// Explicit Al-Salam–Chihara sums for `R_n`, `S_n`, `T_n`, `U_n`.
pub fn split_explicit(ctx: &QContext, nu: f64, which: Split, n: usize, x: f64) -> f64 {
    let q = ctx.q;
    let qnu = q.powf(nu);
    let qp = |e: f64| q.powf(e);
    match which {
        Split::S => asc_sum(
            ctx,
            n,
            x,
            -(q + qnu),
            |j| -(1.0 + qp(nu - 1.0)) * qpowi(q, j + 2),
            |j| qp(2.0 * j as f64 + nu + 3.0),
            qp(nu + 1.0),
        ),
        Split::R => asc_sum(
            ctx,
            n,
            x,
            -(q + qnu),
            |j| -(1.0 + qnu) * qpowi(q, j + 1),
            |j| qp(2.0 * j as f64 + nu + 2.0),
            qp(nu + 1.0),
        ),
        Split::U => asc_sum(
            ctx,
            n,
            x,
            -q * (1.0 + qnu),
            |j| -(1.0 + qnu) * qpowi(q, j + 2),
            |j| qp(2.0 * j as f64 + nu + 4.0),
            qp(nu + 2.0),
        ),
        Split::T => asc_sum(
            ctx,
            n,
            x,
            -q * (1.0 + qnu),
            |j| -(q + qnu) * qpowi(q, j + 1),
            |j| qp(2.0 * j as f64 + nu + 3.0),
            qp(nu + 2.0),
        ),
    }
}

/// Split families as `u_n` plus a co-recursive correction.
pub fn split_via_u(ctx: &QContext, nu: f64, which: Split, n: usize, x: f64) -> f64 {
    let q = ctx.q;
    let qnu = q.powf(nu);
    let n = n as i64;
    match which {
        Split::S => u_eval(ctx, n, q + qnu, q.powf((nu + 2.0) / 2.0), x),
        Split::U => u_eval(ctx, n, q * (1.0 + qnu), q.powf((nu + 3.0) / 2.0), x),
        Split::R => {
            let (a, b) = (1.0 + qnu, q.powf((nu + 1.0) / 2.0));
            u_eval(ctx, n, a, b, x) + qpowi(q, n - 1) * u_eval(ctx, n - 1, a, b, x / q)
        }
        Split::T => {
            let (a, b) = (q + qnu, q.powf((nu + 2.0) / 2.0));
            u_eval(ctx, n, a, b, x) + q.powf(nu + n as f64 - 1.0) * u_eval(ctx, n - 1, a, b, x / q)
        }
    }
}

/// Continuous q-Hermite `H_n(x|q)`: `H_{n+1} = 2x H_n - (1 - q^n) H_{n-1}`.
pub fn q_hermite(ctx: &QContext, n: usize, x: f64) -> f64 {
    let q = ctx.q;
    *three_term(n, |k| (2.0 * x, 1.0 - qpowi(q, k as i64))).last().unwrap()
}

/// Chebyshev `U_n(t)` of the second kind, `n ≥ -1`.
pub fn chebyshev_U<T: Scalar>(n: i64, t: T) -> T {
    pick(n, |m| three_term(m, |_| (T::from(2.0) * t, T::from(1.0))))
}

/// `U_n((x + 1/x)/2)` in closed form `(x^{n+1} - x^{-n-1})/(x - x^{-1})`, with the
/// limit `(±1)^n (n+1)` at `x = ±1`.
pub fn chebyshev_U_joukowski(n: i64, x: Complex64) -> Complex64 {
    if n < 0 {
        return c(0.0);
    }
    let d = x - 1.0 / x;
    if d.norm() < 1e-8 {
        let sign = if x.re < 0.0 && n % 2 == 1 { -1.0 } else { 1.0 };
        return c(sign * (n + 1) as f64);
    }
    (x.powi(n as i32 + 1) - x.powi(-(n as i32) - 1)) / d
}

// ---------------------------------------------------------------------------
// Minimal solutions

/// Which of the two minimal solutions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Side {
    /// Recessive outside the unit circle; `x^n h^+_n → 1`.
    Plus,
    /// Recessive inside the unit circle; `x^{-n} h^-_n → 1`.
    Minus,
}

/// `h^±_{n,ν}(x)`, branch-free:
/// `h^+_n = (q;q)_∞ x^{-n} J_reg,ν+n(1/x)/(q x^{-2};q)_∞` and
/// `h^-_n = x^n j_reg,ν+n(x)/(q x²;q)_∞`.
pub fn h_minimal(ctx: &QContext, nu: f64, side: Side, n: i64, x: Complex64) -> Result<Complex64> {
    if n < -1 {
        return Err(Error::Domain(format!("index n = {n} < -1")));
    }
    let q = ctx.q;
    let p = BesselParams::new(nu + n as f64, *ctx);
    let r2 = x.norm_sqr();
    match side {
        Side::Plus => {
            if !(r2 > q) {
                return Err(Error::Domain(format!(
                    "h^+ needs |x| > q^(1/2), got |x| = {}",
                    r2.sqrt()
                )));
            }
            let inv = 1.0 / x;
            let den = qpoch_inf(ctx, q * inv * inv);
            Ok(qpoch_inf_real(ctx, q) * x.powi(-(n as i32)) * J_reg(&p, inv)? / den)
        }
        Side::Minus => {
            if !(r2 * q < 1.0) {
                return Err(Error::Domain(format!(
                    "h^- needs |x| < q^(-1/2), got |x| = {}",
                    r2.sqrt()
                )));
            }
            let den = qpoch_inf(ctx, q * x * x);
            Ok(x.powi(n as i32) * j_reg(&p, x)? / den)
        }
    }
}

/// Tail of `x Σ_{k>n} q^{ν+k} h^±_k U_{k-n-1}((x+1/x)/2)`, stopped once the
/// dominating bound `q^{ν+k}(k-n)·B_k` from the backward Gronwall estimate drops below
/// `series_tol` relative to the running sum.
pub fn green_tail(ctx: &QContext, nu: f64, side: Side, n: i64, x: Complex64) -> Result<Complex64> {
    let q = ctx.q;
    let t = (x + 1.0 / x) * 0.5;
    let r = x.norm();
    let mut sum = c(0.0);
    for k in (n + 1)..(n + 1 + ctx.max_terms as i64) {
        let h = h_minimal(ctx, nu, side, k, x)?;
        let term = q.powf(nu + k as f64) * h * chebyshev_U(k - n - 1, t);
        sum += term;
        // |x^{∓n} ... | scale of the term relative to x^{∓n}
        let scale = match side {
            Side::Plus => r.powi(-(n as i32)),
            Side::Minus => r.powi(n as i32),
        };
        let bound = q.powf(nu + k as f64) * (k - n) as f64 * minimal_bounds(q, nu, k).1 * scale;
        if bound < ctx.series_tol * (sum.norm() + scale) {
            return Ok(x * sum);
        }
    }
    Err(Error::Convergence("minimal-solution tail did not settle".into()))
}

// ---------------------------------------------------------------------------
// The case ν = 1/2 (base p = q^{1/2})

/// `P_n(x)` at `ν = 1/2` from `Σ_k (-1)^k x^{n-2k} p^{k²} (p;p)_{n-k}/((p;p)_k (p;p)_{n-2k})`.
pub fn P_half_closed(ctx: &QContext, n: usize, x: f64) -> f64 {
    let p = ctx.q.sqrt();
    let pc = QContext { q: p, ..*ctx };
    (0..=n / 2)
        .map(|k| {
            let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
            sign * x.powi((n - 2 * k) as i32) * p.powi((k * k) as i32) * qpoch_real(&pc, p, n - k)
                / (qpoch_real(&pc, p, k) * qpoch_real(&pc, p, n - 2 * k))
        })
        .sum()
}

/// `F(x) = Σ_k (-1)^k x^{2k} p^{k²}/(p;p)_k`, `p = q^{1/2}`.
pub fn F_limit(ctx: &QContext, x: f64) -> f64 {
    F_limit_complex(ctx, c(x)).re
}

pub fn F_limit_complex(ctx: &QContext, x: Complex64) -> Complex64 {
    let p = ctx.q.sqrt();
    let x2 = x * x;
    let mut term = c(1.0);
    let mut sum = term;
    for k in 1..=ctx.max_terms {
        let kf = k as f64;
        term = -term * x2 * p.powf(2.0 * kf - 1.0) / (1.0 - p.powf(kf));
        sum += term;
        if term.norm() < ctx.series_tol * sum.norm() && p.powf(2.0 * kf) * x2.norm() < 0.5 {
            break;
        }
    }
    sum
}

/// Generating function `G(z,x) = Σ_k (-1)^k z^{2k} p^{k²}/(zx;p)_{k+1}` of the `ν = 1/2` family.
pub fn G_half(ctx: &QContext, z: f64, x: f64) -> f64 {
    let p = ctx.q.sqrt();
    let mut sum = 0.0;
    let mut den = 1.0 - z * x;
    for k in 0..=ctx.max_terms {
        if k > 0 {
            den *= 1.0 - z * x * p.powi(k as i32);
        }
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        let term = sign * z.powi(2 * k as i32) * p.powi((k * k) as i32) / den;
        sum += term;
        if term.abs() < ctx.series_tol * sum.abs().max(1e-300) {
            break;
        }
    }
    sum
}

// ---------------------------------------------------------------------------
// Perturbation bounds

/// Upper bounds for `h_{n,ν}`: on the unit circle `(|h_n|, |sin θ h_n|)`, and
/// off the circle for `|x^{±n} h_n|`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CircleBounds {
    pub modulus: f64,
    pub sine_weighted: f64,
}

pub fn circle_bounds(q: f64, nu: f64, n: usize) -> CircleBounds {
    let a = q.powf(nu) / (1.0 - q).powi(2);
    CircleBounds {
        modulus: (n as f64 + 1.0) * a.exp(),
        sine_weighted: 1.0 + a * a.exp(),
    }
}

/// Bound on `|x^n h_n|` for `|x| < 1`, or on `|x^{-n} h_n|` for `|x| > 1`.
pub fn off_circle_bound(q: f64, nu: f64, x: Complex64) -> f64 {
    let x2 = if x.norm() < 1.0 { x * x } else { 1.0 / (x * x) };
    let d = 2.0 / (1.0 - x2).norm();
    d * (d * q.powf(nu) / (1.0 - q)).exp()
}

/// The two bounds on `|x^{±n} h^±_n|`: the first needs `|1 - x^{∓2}|` (pass `x`), the
/// second holds uniformly on the closed region.
pub fn minimal_bounds(q: f64, nu: f64, n: i64) -> (f64, f64) {
    let t = q.powf(nu + n as f64 + 1.0);
    (t / (1.0 - q), (n as f64 * t / (1.0 - q) + t / (1.0 - q).powi(2)).exp())
}

/// First bound of the minimal-solution estimates, evaluated at `x`.
pub fn minimal_bound_near(q: f64, nu: f64, side: Side, n: i64, x: Complex64) -> f64 {
    let x2 = match side {
        Side::Plus => 1.0 / (x * x),
        Side::Minus => x * x,
    };
    let (t, _) = minimal_bounds(q, nu, n);
    (2.0 / (1.0 - x2).norm() * t).exp()
}
