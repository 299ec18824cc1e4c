//! q-shifted factorials and the basic hypergeometric series `ᵣφₛ`.
//!
//! - [`qpoch`] / [`qpoch_inf`]: finite and infinite products `(a;q)_k`
//! - [`basic_phi`]: the series `ᵣφₛ(a; b; q, z)` with the `((-1)^k q^{k(k-1)/2})^{1+s-r}` factor
//! - [`product_phi11`]: `(w;q)_∞ ₁φ₁(0; w; q, z)` with the factor of `(w;q)_∞` closest to
//!   zero split off, so the value stays finite on and next to the lattice `w = q^{-n}`
//!
//! The last one is the workhorse behind both q-Bessel functions: the transformation
//! `(x;q)_∞ ₁φ₁(0;x;q,y) = (y;q)_∞ ₁φ₁(0;y;q,x)` lets every evaluation use a form whose
//! series converges fast even for huge arguments.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Hard cap on the number of factors of an infinite product.
const MAX_PRODUCT_FACTORS: usize = 100_000;

/// Global parameters shared by every series and recurrence evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QContext {
    pub q: f64,
    /// Relative truncation threshold for series and infinite products.
    pub series_tol: f64,
    pub max_terms: usize,
    /// Refinement tolerance for real zeros.
    pub zero_tol: f64,
}

impl QContext {
    /// Context with the default tolerances (`1e-15`, 500 terms, `1e-12`).
    pub fn new(q: f64) -> Result<Self> {
        QContext {
            q,
            series_tol: 1e-15,
            max_terms: 500,
            zero_tol: 1e-12,
        }
        .validated()
    }

    pub fn validated(self) -> Result<Self> {
        if !(self.q > 0.0 && self.q < 1.0) {
            return Err(Error::Config(format!("q must lie in (0,1), got {}", self.q)));
        }
        if !(self.series_tol > 0.0) || !(self.zero_tol > 0.0) {
            return Err(Error::Config("tolerances must be positive".into()));
        }
        if self.max_terms == 0 {
            return Err(Error::Config("max_terms must be at least 1".into()));
        }
        Ok(self)
    }

    pub fn with_max_terms(self, max_terms: usize) -> Result<Self> {
        QContext { max_terms, ..self }.validated()
    }

    pub fn with_series_tol(self, series_tol: f64) -> Result<Self> {
        QContext { series_tol, ..self }.validated()
    }

    pub fn with_zero_tol(self, zero_tol: f64) -> Result<Self> {
        QContext { zero_tol, ..self }.validated()
    }

    /// `q^e` for real `e`.
    #[inline]
    pub fn pow(&self, e: f64) -> f64 {
        self.q.powf(e)
    }

    /// `q^n` for integer `n`.
    #[inline]
    pub fn powi(&self, n: i64) -> f64 {
        qpowi(self.q, n)
    }
}

#[inline]
pub(crate) fn qpowi(q: f64, n: i64) -> f64 {
    if n.unsigned_abs() <= i32::MAX as u64 {
        q.powi(n as i32)
    } else {
        q.powf(n as f64)
    }
}

/// `(a;q)_k = ∏_{i<k} (1 - a q^i)`.
pub fn qpoch(ctx: &QContext, a: Complex64, k: usize) -> Complex64 {
    let mut prod = Complex64::new(1.0, 0.0);
    let mut aq = a;
    for _ in 0..k {
        prod *= 1.0 - aq;
        aq *= ctx.q;
    }
    prod
}

/// `(a;q)_∞`, truncated once `|a q^i| < series_tol` (at least 5 factors).
pub fn qpoch_inf(ctx: &QContext, a: Complex64) -> Complex64 {
    let mut prod = Complex64::new(1.0, 0.0);
    let mut aq = a;
    for i in 0..MAX_PRODUCT_FACTORS {
        if i >= 5 && aq.norm() < ctx.series_tol {
            break;
        }
        prod *= 1.0 - aq;
        aq *= ctx.q;
    }
    prod
}

/// Real version of [`qpoch`].
pub fn qpoch_real(ctx: &QContext, a: f64, k: usize) -> f64 {
    let mut prod = 1.0;
    let mut aq = a;
    for _ in 0..k {
        prod *= 1.0 - aq;
        aq *= ctx.q;
    }
    prod
}

/// Real version of [`qpoch_inf`].
pub fn qpoch_inf_real(ctx: &QContext, a: f64) -> f64 {
    let mut prod = 1.0;
    let mut aq = a;
    for i in 0..MAX_PRODUCT_FACTORS {
        if i >= 5 && aq.abs() < ctx.series_tol {
            break;
        }
        prod *= 1.0 - aq;
        aq *= ctx.q;
    }
    prod
}

/// If `a = q^{-n}` for some `n ≥ 0` (to rounding), returns `n`.
pub fn terminating_index(q: f64, a: Complex64) -> Option<usize> {
    if a.im.abs() > 1e-14 * a.norm() || a.re < 1.0 - 1e-12 {
        return None;
    }
    let n = (a.re.ln() / -q.ln()).round();
    if n < 0.0 || n > 1e6 {
        return None;
    }
    let n = n as usize;
    if (a.re * qpowi(q, n as i64) - 1.0).abs() <= 1e-12 {
        Some(n)
    } else {
        None
    }
}

/// The basic hypergeometric series
///
/// `Σ_k (a_1,…,a_r;q)_k / (q,b_1,…,b_s;q)_k · ((-1)^k q^{k(k-1)/2})^{1+s-r} z^k`.
///
/// A numerator equal to `q^{-n}` terminates the sum after the `k = n` term.
pub fn basic_phi(
    ctx: &QContext,
    numerators: &[Complex64],
    denominators: &[Complex64],
    z: Complex64,
) -> Result<Complex64> {
    let q = ctx.q;
    let excess = 1 + denominators.len() as i64 - numerators.len() as i64;
    let stop = numerators
        .iter()
        .filter_map(|&a| terminating_index(q, a))
        .min();
    if stop.is_none() && z != Complex64::new(0.0, 0.0) {
        if excess < 0 {
            return Err(Error::Convergence(
                "nonterminating series with r > s+1 has zero radius of convergence".into(),
            ));
        }
        if excess == 0 && z.norm() >= 1.0 {
            return Err(Error::Convergence(format!(
                "nonterminating series with r = s+1 needs |z| < 1, got |z| = {}",
                z.norm()
            )));
        }
    }

    let mut term = Complex64::new(1.0, 0.0);
    let mut sum = term;
    let mut qk = 1.0;
    let mut k = 0usize;
    loop {
        if Some(k) == stop {
            return Ok(sum);
        }
        if k + 1 >= ctx.max_terms {
            return Err(Error::Convergence(format!(
                "basic_phi: {} terms without reaching tolerance",
                ctx.max_terms
            )));
        }
        let mut num = z;
        for &a in numerators {
            num *= 1.0 - a * qk;
        }
        let mut den = Complex64::new(1.0 - q * qk, 0.0);
        for &b in denominators {
            let f = 1.0 - b * qk;
            if f.norm() <= 1e-14 * (1.0 + (b * qk).norm()) {
                return Err(Error::Domain(format!(
                    "denominator parameter {b} hits the pole q^-{k}"
                )));
            }
            den *= f;
        }
        let shift = Complex64::new(-qk, 0.0);
        if excess > 0 {
            num *= shift.powi(excess as i32);
        } else if excess < 0 {
            den *= shift.powi((-excess) as i32);
        }
        let ratio = num / den;
        term *= ratio;
        sum += term;
        k += 1;
        qk *= q;

        if term.norm() == 0.0 {
            return Ok(sum);
        }
        let tail = if excess == 0 {
            term.norm() / (1.0 - z.norm()).max(1e-3)
        } else {
            term.norm()
        };
        if ratio.norm() < 1.0 && tail <= ctx.series_tol * (sum.norm() + 1e-300) {
            return Ok(sum);
        }
    }
}

/// Where the argument `w` of [`product_phi11`] sits relative to the poles `q^{-n}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Lattice {
    /// A plain complex value; the nearest pole is detected automatically.
    Plain(Complex64),
    /// `w = q^{-n} (1 - t)`, so the factor `1 - w q^n` equals `t` exactly.
    Near { n: usize, t: f64 },
}

impl Lattice {
    pub fn w(&self, q: f64) -> Complex64 {
        match *self {
            Lattice::Plain(w) => w,
            Lattice::Near { n, t } => Complex64::new((1.0 - t) * qpowi(q, -(n as i64)), 0.0),
        }
    }
}

/// `(w;q)_∞ ₁φ₁(0; w; q, z)` in split form.
///
/// With `n` the separated pole, `(w;q)_∞ = t·Q` where `Q` collects the other factors,
/// and the value is `Q · g` with `g = t·A + B`: `A` holds the series terms `k ≤ n`,
/// `B` the terms `k > n` with the factor `t` cancelled. `Q` is stored as a
/// log-modulus and a phase so that huge arguments do not overflow.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProductPhi {
    pub log_modulus: f64,
    pub phase: Complex64,
    pub g: Complex64,
    /// `∂g/∂w`, including the dependence through `t`.
    pub dg_dw: Complex64,
    pub dg_dz: Complex64,
    /// `∂ ln Q / ∂w`.
    pub dlog_dw: Complex64,
}

impl ProductPhi {
    pub fn value(&self) -> Complex64 {
        self.phase * self.g * self.log_modulus.exp()
    }

    pub fn d_dw(&self) -> Complex64 {
        self.phase * (self.g * self.dlog_dw + self.dg_dw) * self.log_modulus.exp()
    }

    pub fn d_dz(&self) -> Complex64 {
        self.phase * self.dg_dz * self.log_modulus.exp()
    }
}

/// Index `n` and factor `1 - w q^n` of the factor of `(w;q)_∞` nearest to zero, if it is
/// closer than 1/2.
fn nearest_factor(q: f64, w: Complex64) -> Option<(usize, Complex64)> {
    let mut best: Option<(usize, Complex64)> = None;
    let mut wq = w;
    let mut i = 0usize;
    while wq.norm() >= 0.5 && i < MAX_PRODUCT_FACTORS {
        let f = 1.0 - wq;
        if f.norm() < 0.5 && best.map_or(true, |(_, b)| f.norm() < b.norm()) {
            best = Some((i, f));
        }
        wq *= q;
        i += 1;
    }
    best
}

/// Evaluates `(w;q)_∞ ₁φ₁(0; w; q, z)` together with its partial derivatives.
pub fn product_phi11(ctx: &QContext, arg: Lattice, z: Complex64) -> Result<ProductPhi> {
    let q = ctx.q;
    let (sep, t) = match arg {
        Lattice::Plain(w) => match nearest_factor(q, w) {
            Some((n, t)) => (Some(n), t),
            None => (None, Complex64::new(1.0, 0.0)),
        },
        Lattice::Near { n, t } => (Some(n), Complex64::new(t, 0.0)),
    };
    let wq = |i: usize| -> Complex64 {
        match arg {
            Lattice::Plain(w) => w * qpowi(q, i as i64),
            Lattice::Near { n, t } => Complex64::new((1.0 - t) * qpowi(q, i as i64 - n as i64), 0.0),
        }
    };

    // Q = ∏_{i≠n} (1 - w q^i)
    let mut log_modulus = 0.0;
    let mut phase = Complex64::new(1.0, 0.0);
    let mut dlog_dw = Complex64::new(0.0, 0.0);
    let mut factors: Vec<Complex64> = Vec::new();
    let last_sep = sep.unwrap_or(0);
    for i in 0..MAX_PRODUCT_FACTORS {
        let x = wq(i);
        if i >= 5 && i > last_sep && x.norm() < ctx.series_tol {
            break;
        }
        let f = if Some(i) == sep { t } else { 1.0 - x };
        factors.push(f);
        if Some(i) == sep {
            continue;
        }
        let m = f.norm();
        log_modulus += m.ln();
        phase *= f / m;
        dlog_dw -= qpowi(q, i as i64) / f;
    }
    phase /= phase.norm();

    // Series: term_k = c_k / ∏_{i<k, i≠n} f_i with c_k = (-1)^k q^{k(k-1)/2} z^k / (q;q)_k.
    let zero = Complex64::new(0.0, 0.0);
    let mut term = Complex64::new(1.0, 0.0);
    let mut term_dz = zero;
    let mut slope = zero; // Σ_{i<k, i≠n} q^i / f_i
    let (mut a, mut a_dw, mut a_dz) = (term, zero, zero);
    let (mut b, mut b_dw, mut b_dz) = (zero, zero, zero);
    let limit = ctx.max_terms + last_sep + 1;
    let mut k = 0usize;
    loop {
        if k >= limit {
            return Err(Error::Convergence(format!(
                "product_phi11: no convergence after {limit} terms"
            )));
        }
        let qk = qpowi(q, k as i64);
        let fk = if Some(k) == sep {
            Complex64::new(1.0, 0.0)
        } else if k < factors.len() {
            factors[k]
        } else {
            1.0 - wq(k)
        };
        let denom = (1.0 - q * qk) * fk;
        let ratio = -qk * z / denom;
        term_dz = term_dz * ratio - term * qk / denom;
        term *= ratio;
        if Some(k) != sep {
            slope += qk / fk;
        }
        k += 1;
        let in_tail = sep.map_or(false, |n| k > n);
        if in_tail {
            b += term;
            b_dw += term * slope;
            b_dz += term_dz;
        } else {
            a += term;
            a_dw += term * slope;
            a_dz += term_dz;
        }
        let reference = if sep.is_some() {
            if in_tail {
                b.norm()
            } else {
                continue;
            }
        } else {
            a.norm()
        };
        if term.norm() == 0.0
            || (ratio.norm() < 1.0 && term.norm() <= ctx.series_tol * (reference + 1e-300))
        {
            break;
        }
    }

    let (g, dg_dw, dg_dz) = match sep {
        Some(n) => (
            t * a + b,
            -qpowi(q, n as i64) * a + t * a_dw + b_dw,
            t * a_dz + b_dz,
        ),
        None => (a, a_dw, a_dz),
    };
    Ok(ProductPhi {
        log_modulus,
        phase,
        g,
        dg_dw,
        dg_dz,
        dlog_dw,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn ctx(q: f64) -> QContext {
        QContext::new(q).unwrap()
    }

    #[test]
    fn context_rejects_bad_q() {
        assert!(QContext::new(1.0).is_err());
        assert!(QContext::new(0.0).is_err());
        assert!(QContext::new(0.5).unwrap().with_max_terms(0).is_err());
    }

    #[test]
    fn empty_and_vanishing_products() {
        let k = ctx(0.5);
        assert_eq!(qpoch(&k, c(3.7, -1.0), 0), c(1.0, 0.0));
        assert_eq!(qpoch_real(&k, 0.5f64.powi(-3), 5), 0.0);
    }

    #[test]
    fn infinite_product_matches_long_direct_product() {
        let k = ctx(0.5);
        let direct: f64 = (0..200).map(|i| 1.0 - 0.5f64.powi(i + 1)).product();
        let v = qpoch_inf(&k, c(0.5, 0.0));
        assert!((v.re - direct).abs() < 1e-15, "{} vs {}", v.re, direct);
        assert!((qpoch_inf_real(&k, 0.5) - direct).abs() < 1e-15);
    }

    #[test]
    fn phi_at_zero_argument_is_one() {
        let k = ctx(0.3);
        let v = basic_phi(&k, &[c(0.0, 0.0)], &[c(0.4, 0.2)], c(0.0, 0.0)).unwrap();
        assert_eq!(v, c(1.0, 0.0));
    }

    #[test]
    fn terminating_2phi1_by_hand() {
        let q = 0.6;
        let k = ctx(q);
        let z = c(0.7, 0.3);
        let a = q.powi(-2);
        let b = q.powi(3);
        let v = basic_phi(&k, &[c(a, 0.0), c(b, 0.0)], &[c(q, 0.0)], z).unwrap();
        let t1 = (1.0 - a) * (1.0 - b) / ((1.0 - q) * (1.0 - q)) * z;
        let t2 = (1.0 - a) * (1.0 - a * q) * (1.0 - b) * (1.0 - b * q)
            / ((1.0 - q) * (1.0 - q * q) * (1.0 - q) * (1.0 - q * q))
            * z
            * z;
        let expect = 1.0 + t1 + t2;
        assert!((v - expect).norm() < 1e-13, "{v} vs {expect}");
        let short = k.with_max_terms(3).unwrap();
        let v3 = basic_phi(&short, &[c(a, 0.0), c(b, 0.0)], &[c(q, 0.0)], z).unwrap();
        assert_eq!(v, v3);
    }

    #[test]
    fn phi11_against_long_term_by_term_sum() {
        // 1φ1(0; q; q, q x^2) summed with ten times more terms than needed
        let q = 0.5;
        let k = ctx(q);
        let x: f64 = 1.3;
        let z = q * x * x;
        let v = basic_phi(&k, &[c(0.0, 0.0)], &[c(q, 0.0)], c(z, 0.0)).unwrap();
        let mut s = 0.0;
        for j in 0..300i32 {
            let t = (-1f64).powi(j) * q.powf((j * (j - 1)) as f64 / 2.0) * z.powi(j)
                / (qpoch_real(&k, q, j as usize) * qpoch_real(&k, q, j as usize));
            s += t;
        }
        assert!((v.re - s).abs() < 1e-14 * s.abs().max(1.0));
    }

    #[test]
    fn denominator_pole_is_a_domain_error() {
        let k = ctx(0.5);
        let r = basic_phi(&k, &[c(0.0, 0.0)], &[c(4.0, 0.0)], c(0.1, 0.0));
        assert!(matches!(r, Err(Error::Domain(_))));
    }

    #[test]
    fn divergent_regimes_are_reported() {
        let k = ctx(0.5);
        let r = basic_phi(&k, &[c(0.2, 0.0), c(0.3, 0.0)], &[c(0.1, 0.0)], c(1.5, 0.0));
        assert!(matches!(r, Err(Error::Convergence(_))));
        let r = basic_phi(&k, &[c(0.2, 0.0), c(0.3, 0.0)], &[], c(0.1, 0.0));
        assert!(matches!(r, Err(Error::Convergence(_))));
        let tiny = k.with_max_terms(2).unwrap();
        let r = basic_phi(&tiny, &[c(0.2, 0.0)], &[], c(0.9, 0.0));
        assert!(matches!(r, Err(Error::Convergence(_))));
    }

    #[test]
    fn q_binomial_theorem() {
        for &q in &[0.3, 0.5, 0.8] {
            let k = ctx(q);
            for l in 0..=10 {
                for &x in &[0.2, 0.6, 0.9] {
                    let a = q.powi(l + 1);
                    let z = x * x;
                    let s = basic_phi(&k, &[c(a, 0.0)], &[], c(z, 0.0)).unwrap().re;
                    let closed = qpoch_inf_real(&k, a * z) / qpoch_inf_real(&k, z);
                    assert!((s - closed).abs() < 1e-12 * closed.abs(), "q={q} l={l} x={x}");
                }
            }
        }
    }

    fn direct_product_phi(k: &QContext, w: Complex64, z: Complex64) -> Complex64 {
        qpoch_inf(k, w) * basic_phi(k, &[c(0.0, 0.0)], &[w], z).unwrap()
    }

    #[test]
    fn split_kernel_matches_direct_form_off_lattice() {
        let k = ctx(0.5);
        for &(w, z) in &[
            (c(0.3, 0.1), c(0.25, 0.0)),
            (c(1.7, 0.4), c(0.5, -0.2)),
            (c(5.0, 0.0), c(0.125, 0.0)),
            (c(-3.0, 2.0), c(1.5, 0.5)),
        ] {
            let p = product_phi11(&k, Lattice::Plain(w), z).unwrap();
            let d = direct_product_phi(&k, w, z);
            assert!((p.value() - d).norm() < 1e-13 * d.norm().max(1.0), "w={w}");
        }
    }

    #[test]
    fn split_kernel_is_finite_on_the_lattice() {
        // At w = q^{-2} the direct series has a pole but the product vanishes with it.
        let q = 0.5;
        let k = ctx(q);
        let z = c(q.powf(1.5), 0.0);
        let on = product_phi11(&k, Lattice::Near { n: 2, t: 0.0 }, z).unwrap();
        let left = product_phi11(&k, Lattice::Near { n: 2, t: 1e-9 }, z).unwrap();
        let right = product_phi11(&k, Lattice::Near { n: 2, t: -1e-9 }, z).unwrap();
        assert!(on.value().norm().is_finite() && on.value().norm() > 0.0);
        // g is affine in t, so the midpoint of the two neighbours reproduces t = 0
        let mid = (left.value() + right.value()) * 0.5;
        assert!((mid - on.value()).norm() < 1e-12 * (left.value().norm() + right.value().norm()));
    }

    #[test]
    fn split_kernel_plain_and_near_agree() {
        let q = 0.7;
        let k = ctx(q);
        let t = 0.013;
        let n = 4;
        let near = Lattice::Near { n, t };
        let w = near.w(q);
        let z = c(0.4, 0.0);
        let a = product_phi11(&k, near, z).unwrap();
        let b = product_phi11(&k, Lattice::Plain(w), z).unwrap();
        assert!((a.value() - b.value()).norm() < 1e-12 * a.value().norm());
        assert!((a.d_dw() - b.d_dw()).norm() < 1e-10 * a.d_dw().norm());
    }

    #[test]
    fn split_kernel_derivatives_match_finite_differences() {
        let k = ctx(0.5);
        let h = 1e-6;
        for &(w, z) in &[(c(0.8, 0.0), c(0.3, 0.0)), (c(2.3, 0.0), c(1.1, 0.0)), (c(9.0, 1.0), c(0.2, 0.1))] {
            let p = product_phi11(&k, Lattice::Plain(w), z).unwrap();
            let fw = (product_phi11(&k, Lattice::Plain(w + h), z).unwrap().value()
                - product_phi11(&k, Lattice::Plain(w - h), z).unwrap().value())
                / (2.0 * h);
            let fz = (product_phi11(&k, Lattice::Plain(w), z + h).unwrap().value()
                - product_phi11(&k, Lattice::Plain(w), z - h).unwrap().value())
                / (2.0 * h);
            assert!((p.d_dw() - fw).norm() < 1e-7 * fw.norm().max(1.0), "w={w}");
            assert!((p.d_dz() - fz).norm() < 1e-7 * fz.norm().max(1.0), "w={w}");
        }
    }

    #[test]
    fn huge_argument_keeps_log_scale() {
        let k = ctx(0.5);
        let w = 2f64.powi(70);
        let p = product_phi11(&k, Lattice::Plain(c(w * 1.3, 0.0)), c(0.25, 0.0)).unwrap();
        assert!(p.log_modulus > 709.0);
        assert!(p.g.norm().is_finite() && p.g.norm() > 0.0);
    }

    proptest! {
        #[test]
        fn qpoch_splits(re in -2.0f64..2.0, im in -2.0f64..2.0, m in 0usize..=20, n in 0usize..=20, q in 0.05f64..0.95) {
            let a = c(re, im);
            prop_assume!(a.norm() <= 2.0);
            let k = ctx(q);
            let lhs = qpoch(&k, a, m + n);
            let rhs = qpoch(&k, a, m) * qpoch(&k, a * q.powi(m as i32), n);
            let scale = (0..m + n).map(|i| 1.0 + (a * q.powi(i as i32)).norm()).product::<f64>();
            prop_assert!((lhs - rhs).norm() <= 1e-13 * scale.max(lhs.norm()));
        }

        #[test]
        fn terminating_sum_ignores_max_terms(n in 0usize..12, q in 0.2f64..0.9, zr in -2.0f64..2.0) {
            let k = ctx(q);
            let a = c(q.powi(-(n as i32)), 0.0);
            let nums = [a, c(0.3, 0.1)];
            let dens = [c(0.45, 0.0)];
            let full = basic_phi(&k, &nums, &dens, c(zr, 0.0)).unwrap();
            let short = basic_phi(&k.with_max_terms(n + 1).unwrap(), &nums, &dens, c(zr, 0.0)).unwrap();
            prop_assert_eq!(full, short);
        }
    }
}
