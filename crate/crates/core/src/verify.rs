//! Registry of checkable identities, limits and bounds, each reduced to one scalar
//! residual, plus a batch runner over a `(q, ν)` grid.
//!
//! Residuals are `|LHS - RHS| / max(1, S)` where `S` is the largest magnitude among the
//! terms being combined, so the same tolerance applies to growing and decaying families.
//! Bound checks report the relative excess `max(0, lhs/bound - 1)`.
#![allow(non_snake_case)]

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::bessel::{j_reg, wronskian_residual, theta_product, BesselParams, J_reg};
use crate::error::{Error, Result};
use crate::lommel::{
    al_salam_chihara, chebyshev_U_joukowski, green_tail, h_minimal, h_table, circle_bounds,
    off_circle_bound, minimal_bounds, minimal_bound_near, p1_table, p_table, q_hermite, G_half,
    P1_eval, P1_table, P_eval, P_half_closed, P_table, Side, F_limit_complex,
};
use crate::qseries::{basic_phi, qpoch, qpoch_inf, qpoch_inf_real, qpoch_real, QContext};
use crate::spectral::m_bound;

/// Default tolerance for finite identities and bounds.
pub const ALGEBRAIC_TOL: f64 = 1e-11;
/// Default tolerance for limits and truncated sums.
pub const LIMIT_TOL: f64 = 1e-8;
/// Base index ladder for limit checks.
pub const LADDER: [usize; 3] = [10, 20, 40];

macro_rules! identity_ids {
    ($($variant:ident => $tag:literal, $kind:ident;)*) => {
        /// Registry tags.
        #[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
        pub enum IdentityId {
            $(#[serde(rename = $tag)] $variant,)*
        }

        impl IdentityId {
            pub const ALL: &'static [IdentityId] = &[$(IdentityId::$variant,)*];

            pub fn tag(self) -> &'static str {
                match self {
                    $(IdentityId::$variant => $tag,)*
                }
            }

            pub fn kind(self) -> CheckKind {
                match self {
                    $(IdentityId::$variant => CheckKind::$kind,)*
                }
            }
        }

        impl FromStr for IdentityId {
            type Err = Error;
            fn from_str(s: &str) -> Result<Self> {
                match s {
                    $($tag => Ok(IdentityId::$variant),)*
                    _ => Err(Error::Config(format!("unknown identity id {s:?}"))),
                }
            }
        }
    };
}

identity_ids! {
    RecH => "REC-H", Algebraic;
    ContigEven => "CONTIG-EVEN", Algebraic;
    ContigOdd => "CONTIG-ODD", Algebraic;
    Heine => "HEINE", Algebraic;
    JShiftA => "J-SHIFT-A", Algebraic;
    JShiftB => "J-SHIFT-B", Algebraic;
    Wronsk => "WRONSK", Algebraic;
    ConnJ => "CONN-J", Algebraic;
    ConnP => "CONN-p", Algebraic;
    ConnPP => "CONN-P", Algebraic;
    HurwitzOut => "HURWITZ-OUT", Limit;
    HurwitzIn => "HURWITZ-IN", Limit;
    AsympMin => "ASYMP-MIN", Limit;
    LimP => "LIM-P", Limit;
    LimP1 => "LIM-P1", Limit;
    LimHalf => "LIM-HALF", Limit;
    Sum3phi2 => "SUM-3PHI2", Algebraic;
    HermiteEval => "HERMITE-EVAL", Algebraic;
    Eq522 => "EQ-522", Algebraic;
    AscShift => "ASC-SHIFT", Algebraic;
    GenfunHalf => "GENFUN-HALF", Truncated;
    ClosedHalf => "CLOSED-HALF", Algebraic;
    P1Half => "P1-HALF", Algebraic;
    GreenFwd => "GREEN-FWD", Algebraic;
    GreenBwd => "GREEN-BWD", Truncated;
    BoundCircle => "BOUND-CIRCLE", Bound;
    BoundMin => "BOUND-MIN", Bound;
    ZeroFree => "ZEROFREE", Bound;
    WronskCombo => "WRONSK-COMBO", Algebraic;
}

impl fmt::Display for IdentityId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

/// How a residual is judged.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CheckKind {
    /// Finite identity; [`ALGEBRAIC_TOL`].
    Algebraic,
    /// Limit over the index ladder; [`LIMIT_TOL`] plus the monotonicity guard.
    Limit,
    /// Identity with a truncated infinite sum; [`LIMIT_TOL`].
    Truncated,
    /// Inequality; the residual is the relative excess, judged with [`ALGEBRAIC_TOL`].
    Bound,
}

/// The two default tolerances, overridable together.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    pub algebraic: f64,
    pub limit: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            algebraic: ALGEBRAIC_TOL,
            limit: LIMIT_TOL,
        }
    }
}

impl Tolerances {
    pub fn for_kind(&self, kind: CheckKind) -> f64 {
        match kind {
            CheckKind::Algebraic | CheckKind::Bound => self.algebraic,
            CheckKind::Limit | CheckKind::Truncated => self.limit,
        }
    }
}

/// Inputs of one check. `x = None` selects the built-in sample set of the identity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IdentityParams {
    pub nu: f64,
    pub x: Option<Complex64>,
    /// Largest degree or index used by finite identities.
    pub degree: usize,
    /// Seed for the identities that draw random parameters.
    pub seed: u64,
    pub tolerances: Tolerances,
}

impl IdentityParams {
    pub fn new(nu: f64) -> Self {
        IdentityParams {
            nu,
            x: None,
            degree: 20,
            seed: 0x5eed,
            tolerances: Tolerances::default(),
        }
    }

    pub fn at(self, x: Complex64) -> Self {
        IdentityParams { x: Some(x), ..self }
    }

    pub fn with_degree(self, degree: usize) -> Self {
        IdentityParams { degree, ..self }
    }
}

/// One residual at one ladder index.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LadderStep {
    pub index: usize,
    pub residual: f64,
}

/// Outcome of a single check.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IdentityCase {
    pub id: IdentityId,
    pub q: f64,
    pub nu: f64,
    pub x: Option<Complex64>,
    pub degree: usize,
    pub residual: f64,
    pub tolerance: f64,
    pub passed: bool,
    /// Limit checks only: residuals along the ladder, maximised over sample points.
    pub ladder: Vec<LadderStep>,
    /// Limit checks only: last ladder residual no larger than the first.
    pub monotone: Option<bool>,
}

fn c(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

/// Mixed absolute/relative residual.
fn resid(lhs: Complex64, rhs: Complex64, scale: f64) -> f64 {
    (lhs - rhs).norm() / scale.max(lhs.norm()).max(rhs.norm()).max(1.0)
}

fn excess(value: f64, bound: f64) -> f64 {
    (value / bound - 1.0).max(0.0)
}

fn samples(params: &IdentityParams, default: &[Complex64]) -> Vec<Complex64> {
    match params.x {
        Some(x) => vec![x],
        None => default.to_vec(),
    }
}

fn require(cond: bool, what: impl FnOnce() -> String) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(Error::Domain(what()))
    }
}

/// Ladder for limits whose error decays like `rate^n`: the base ladder stretched by
/// `⌈ln(1/2)/ln(rate)⌉` so every grid point sees at least the decay of `2^{-n}`.
pub fn ladder_for_rate(rate: f64) -> Vec<usize> {
    let stretch = if rate <= 0.5 {
        1
    } else {
        (0.5f64.ln() / rate.ln() - 1e-9).ceil() as usize
    };
    LADDER.iter().map(|&n| n * stretch).collect()
}

fn bp(ctx: &QContext, nu: f64) -> BesselParams {
    BesselParams::new(nu, *ctx)
}

/// Points in the annulus `0.6 ≤ |x| ≤ 1.7`, inside `q^{1/2} < |x| < q^{-1/2}` for `q ≤ 0.3`.
const ANNULUS: [(f64, f64); 6] = [
    (0.7, 0.0),
    (1.3, 0.0),
    (0.8, 0.3),
    (-1.1, 0.5),
    (0.2, -1.5),
    (-0.55, -0.3),
];

/// General complex points for entire functions.
const PLANE: [(f64, f64); 6] = [
    (0.4, 0.0),
    (1.7, 0.0),
    (0.9, 0.6),
    (-1.3, 0.4),
    (0.0, 2.5),
    (3.1, -0.8),
];

fn pts(list: &[(f64, f64)]) -> Vec<Complex64> {
    list.iter().map(|&(a, b)| Complex64::new(a, b)).collect()
}

/// Evaluates one registry entry.
pub fn check_identity(ctx: &QContext, id: IdentityId, params: &IdentityParams) -> Result<IdentityCase> {
    let ctx = &ctx.validated()?;
    if !params.nu.is_finite() {
        return Err(Error::Domain("ν must be finite".into()));
    }
    if let Some(x) = params.x {
        require(x.norm() > 0.0 && x.norm().is_finite(), || "x must be nonzero and finite".into())?;
    }
    let (residual, ladder) = match id.kind() {
        CheckKind::Limit => {
            let ladder = limit_ladder(ctx, id, params)?;
            (ladder.last().map(|s| s.residual).unwrap_or(0.0), ladder)
        }
        _ => (finite_residual(ctx, id, params)?, Vec::new()),
    };
    let tolerance = params.tolerances.for_kind(id.kind());
    let monotone = if ladder.is_empty() {
        None
    } else {
        Some(ladder.last().unwrap().residual <= ladder[0].residual)
    };
    let passed = residual.is_finite() && residual <= tolerance && monotone.unwrap_or(true);
    Ok(IdentityCase {
        id,
        q: ctx.q,
        nu: params.nu,
        x: params.x,
        degree: params.degree,
        residual,
        tolerance,
        passed,
        ladder,
        monotone,
    })
}

fn finite_residual(ctx: &QContext, id: IdentityId, params: &IdentityParams) -> Result<f64> {
    use IdentityId::*;
    let q = ctx.q;
    let nu = params.nu;
    let deg = params.degree;
    let mut worst = 0.0f64;
    let mut track = |r: f64| {
        worst = if r.is_nan() { f64::NAN } else { worst.max(r) };
    };
    match id {
        RecH => {
            // h_m by the explicit sum and h_{m-1,ν+1} by its own recurrence both solve
            // the three-term recurrence of order ν.
            for x in samples(params, &pts(&ANNULUS)) {
                let a = |m: usize| c(1.0) / x + x * (1.0 - q.powf(nu + m as f64));
                let explicit: Vec<Complex64> = (0..=deg + 1)
                    .map(|m| crate::lommel::h_explicit(ctx, nu, m, x))
                    .collect::<Result<_>>()?;
                let shifted = h_table(ctx, nu + 1.0, deg, x);
                for m in 0..=deg {
                    let prev = if m == 0 { c(0.0) } else { explicit[m - 1] };
                    let s = (a(m) * explicit[m]).norm();
                    track(resid(explicit[m + 1], a(m) * explicit[m] - prev, s));
                    if m >= 1 {
                        let g = |k: usize| if k == 0 { c(0.0) } else { shifted[k - 1] };
                        let s = (a(m) * g(m)).norm();
                        track(resid(g(m + 1), a(m) * g(m) - g(m - 1), s));
                    }
                }
            }
        }
        ContigEven => {
            for x in samples(params, &pts(&PLANE)) {
                let l1 = (1.0 - q.powf(nu)) * J_reg(&bp(ctx, nu), x)?;
                let l2 = J_reg(&bp(ctx, nu - 1.0), x)?;
                let rhs = q.powf(nu + 1.0) * x * x * J_reg(&bp(ctx, nu + 1.0), x * q.sqrt())?;
                track(resid(l1 - l2, rhs, l1.norm().max(l2.norm())));
            }
        }
        ContigOdd => {
            for x in samples(params, &pts(&PLANE)) {
                let l1 = (1.0 - q.powf(nu)) * J_reg(&bp(ctx, nu), x)?;
                let l2 = J_reg(&bp(ctx, nu - 1.0), x / q.sqrt())?;
                let rhs = x * x * J_reg(&bp(ctx, nu + 1.0), x)?;
                track(resid(l1 - l2, rhs, l1.norm().max(l2.norm())));
            }
        }
        Heine => {
            let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
            for _ in 0..20 {
                let cc = Complex64::from_polar(rng.gen_range(0.05..0.9), rng.gen_range(0.0..2.0 * PI));
                let z = match params.x {
                    Some(z) => z,
                    None => Complex64::from_polar(rng.gen_range(0.1..4.0), rng.gen_range(0.0..2.0 * PI)),
                };
                let phi = |b: Complex64, arg: Complex64| basic_phi(ctx, &[c(0.0)], &[b], arg);
                let a = phi(cc, z)?;
                let b = phi(cc, q * z)?;
                let rhs = -z / (1.0 - cc) * phi(cc * q, q * z)?;
                track(resid(a - b, rhs, a.norm().max(b.norm())));
            }
        }
        JShiftA => {
            for x in samples(params, &pts(&PLANE)) {
                let a = j_reg(&bp(ctx, nu), x)?;
                let b = j_reg(&bp(ctx, nu + 1.0), x)?;
                let rhs = -q.powf(1.0 + nu) * x * x * j_reg(&bp(ctx, nu), x * q.sqrt())?;
                track(resid(a - b, rhs, a.norm().max(b.norm())));
            }
        }
        JShiftB => {
            for x in samples(params, &pts(&PLANE)) {
                let a = j_reg(&bp(ctx, nu + 1.0), x)?;
                let b = j_reg(&bp(ctx, nu), x * q.sqrt())?;
                let rhs = -q * x * x * j_reg(&bp(ctx, nu + 1.0), x * q.sqrt())?;
                track(resid(a - b, rhs, a.norm().max(b.norm())));
            }
        }
        Wronsk => {
            let p = bp(ctx, nu);
            for x in samples(params, &pts(&[(0.9, 0.0), (1.3, 0.2), (0.2, 0.6), (2.0, 0.0), (-0.7, -0.4)])) {
                let r = wronskian_residual(&p, x)?;
                let t = theta_product(ctx, x);
                track(r.norm() / t.norm().max(1.0));
            }
        }
        ConnJ => {
            for x in samples(params, &pts(&[(1.2, 0.0), (2.0, 0.0), (2.9, 0.0), (1.5, 0.7), (-1.8, 0.3)])) {
                let y = 1.0 / x;
                let h = h_table(ctx, nu, deg, x);
                let h1 = h_table(ctx, nu + 1.0, deg, x);
                let jr = |mu: f64, z: Complex64| J_reg(&bp(ctx, mu), z);
                let js = |mu: f64, z: Complex64| j_reg(&bp(ctx, mu), z);
                let (J0, Jm) = (jr(nu, y)?, jr(nu - 1.0, y)?);
                let (j0, jm) = (js(nu, x)?, js(nu - 1.0, x)?);
                for m in 0..=deg {
                    let hm1 = if m == 0 { c(0.0) } else { h1[m - 1] };
                    // y^{m+1} J_{ν+m}^reg(y) = h_m y J_ν^reg(y) - h_{m-1,ν+1} J_{ν-1}^reg(y)
                    let a = h[m] * y * J0;
                    let b = hm1 * Jm;
                    let lhs = y.powi(m as i32 + 1) * jr(nu + m as f64, y)?;
                    track(resid(lhs, a - b, a.norm().max(b.norm())));
                    let a = h[m] * x * j0;
                    let b = hm1 * jm;
                    let lhs = x.powi(m as i32 + 1) * js(nu + m as f64, x)?;
                    track(resid(lhs, a - b, a.norm().max(b.norm())));
                }
            }
        }
        ConnP => {
            for x in samples(params, &pts(&[(0.4, 0.0), (0.9, 0.0), (1.6, 0.0), (0.7, 0.5), (-1.2, 0.3)])) {
                let y = 1.0 / x;
                let p = p_table(ctx, nu, deg, y);
                let p1 = p1_table(ctx, nu, deg, y);
                let J0 = J_reg(&bp(ctx, nu), x)?;
                let Jm = J_reg(&bp(ctx, nu - 1.0), x)?;
                for n in 0..=deg {
                    let s = ((n + 1) / 2) as f64;
                    let a = p[n] * x * J0;
                    let b = if n == 0 { c(0.0) } else { p1[n - 1] * Jm };
                    let rhs = q.powf(s * (n as f64 + nu))
                        * x.powi(n as i32 + 1)
                        * J_reg(&bp(ctx, nu + n as f64), x * q.powf(s / 2.0))?;
                    track(resid(a - b, rhs, a.norm().max(b.norm())));
                }
            }
        }
        ConnPP => {
            for x in samples(params, &pts(&[(0.4, 0.0), (0.9, 0.0), (1.6, 0.0), (0.7, 0.5), (-1.2, 0.3)])) {
                let y = 1.0 / x;
                let P = P_table(ctx, nu, deg, y);
                let P1 = P1_table(ctx, nu, deg, y);
                let j0 = j_reg(&bp(ctx, nu), x)?;
                let jm = j_reg(&bp(ctx, nu - 1.0), x)?;
                for n in 0..=deg {
                    let a = P[n] * x * j0;
                    let b = if n == 0 { c(0.0) } else { P1[n - 1] * jm };
                    let rhs = if n % 2 == 0 {
                        let m = (n / 2) as f64;
                        q.powf(m * (m + nu))
                            * x.powi(n as i32 + 1)
                            * j_reg(&bp(ctx, nu), x * q.powf(m / 2.0))?
                    } else {
                        let m = ((n + 1) / 2) as f64;
                        q.powf(m * (m + nu - 1.0))
                            * x.powi(n as i32 + 1)
                            * j_reg(&bp(ctx, nu - 1.0), x * q.powf(m / 2.0))?
                    };
                    track(resid(a - b, rhs, a.norm().max(b.norm())));
                }
            }
        }
        Sum3phi2 => {
            let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
            let cs: Vec<Complex64> = match params.x {
                Some(x) => vec![x],
                None => (0..20)
                    .map(|_| Complex64::from_polar(rng.gen_range(0.2..1.2), rng.gen_range(0.0..2.0 * PI)))
                    .collect(),
            };
            // the terminating sums cancel badly in double precision
            let half = QContext { q: q.sqrt(), ..*ctx };
            for cc in cs {
                for k in 0..=deg {
                    let phi = mp::phi32_terminating(q, k, cc / q.sqrt(), cc, cc * cc);
                    let lhs = qpoch(ctx, cc * cc, k) * phi;
                    let rhs = (cc / q.sqrt()).powi(k as i32)
                        * qpoch_real(&half, -q.sqrt(), k)
                        * qpoch(&half, cc, k);
                    track(resid(lhs, rhs, 0.0));
                }
            }
            // the Al-Salam–Chihara instance the summation comes from
            let sq = q.sqrt();
            let hpoch = |k: usize| qpoch_real(&half, sq, k);
            for n in 0..=deg {
                for k in 0..=n {
                    let m = (n - k) as f64;
                    let lhs = al_salam_chihara(
                        ctx,
                        k,
                        -(1.0 + 1.0 / sq) * q.powf(m + 2.0),
                        q.powf(2.0 * m + 3.5),
                        q.powf(1.5),
                        -(q + sq),
                    );
                    let rhs = (-sq).powi(k as i32) * qpoch_real(ctx, q, k) * hpoch(2 * n + 1 - k)
                        / (hpoch(k) * hpoch(2 * n + 1 - 2 * k));
                    track(resid(c(lhs), c(rhs), 0.0));
                }
            }
            // the parameter map between the two normalisations, at random real points
            for _ in 0..5 {
                let alpha: f64 = rng.gen_range(-1.2..-0.3);
                let gamma: f64 = rng.gen_range(0.1..0.8);
                let delta: f64 = rng.gen_range(0.1..0.8);
                let y = Complex64::from_polar(1.0, rng.gen_range(0.1..3.0));
                let xx = ((y + 1.0 / y) * 0.5).re;
                for k in 0..=deg {
                    let lhs = alpha.powi(-(k as i32)) / qpoch_real(ctx, q, k)
                        * al_salam_chihara(
                            ctx,
                            k,
                            (gamma + delta) * alpha,
                            gamma * delta * alpha * alpha,
                            alpha * alpha,
                            2.0 * alpha * xx,
                        );
                    let phi = mp::phi32_terminating(q, k, gamma * y, gamma / y, c(gamma * delta));
                    let rhs = qpoch_real(ctx, gamma * delta, k) / qpoch_real(ctx, q, k)
                        * gamma.powi(-(k as i32))
                        * phi;
                    track(resid(c(lhs), rhs, 0.0));
                }
            }
        }
        HermiteEval => {
            let half = QContext { q: q.sqrt(), ..*ctx };
            let x = (q.powf(0.25) + q.powf(-0.25)) / 2.0;
            for k in 0..=deg {
                let lhs = q_hermite(ctx, k, x);
                let rhs = q.powf(-(k as f64) / 4.0) * qpoch_real(&half, -q.sqrt(), k);
                track(resid(c(lhs), c(rhs), 0.0));
            }
        }
        Eq522 => {
            let p = q.sqrt();
            let base = QContext { q: p, ..*ctx };
            for x in samples(params, &pts(&PLANE)) {
                let x2 = x * x;
                let a = basic_phi(&base, &[], &[c(0.0)], -x2 * p)?;
                let b = j_reg(&bp(ctx, -0.5), x)?;
                track(resid(a, b, 0.0));
                let a = basic_phi(&base, &[], &[c(0.0)], -x2 * q)?;
                let b = j_reg(&bp(ctx, 0.5), x)?;
                track(resid(a, b, 0.0));
            }
        }
        AscShift => {
            let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
            let qn = q.powf(nu);
            for _ in 0..5 {
                let a: f64 = rng.gen_range(-2.0..2.0);
                let b: f64 = rng.gen_range(-2.0..2.0);
                for n in 0..=deg {
                    let first = al_salam_chihara(ctx, n, a, b, qn, -(1.0 + qn));
                    let second = if n == 0 {
                        0.0
                    } else {
                        (1.0 - q.powi(n as i32)) * al_salam_chihara(ctx, n - 1, a, b, qn, -(1.0 + qn))
                    };
                    let rhs = al_salam_chihara(ctx, n, a, b, qn * q, -(q + qn));
                    track(resid(c(first + second), c(rhs), first.abs().max(second.abs())));
                }
            }
        }
        GenfunHalf => {
            let zs: Vec<(f64, f64)> = match params.x {
                Some(x) => vec![(0.3, x.re)],
                None => vec![(0.3, 1.4), (0.2, -0.8), (0.4, 2.0), (-0.35, 0.6)],
            };
            for (z, x) in zs {
                require((z * x).abs() < 0.9, || format!("generating function needs |zx| < 0.9, got {}", (z * x).abs()))?;
                let mut sum = 0.0;
                let mut zn = 1.0;
                let mut n = 0usize;
                let table = P_table(ctx, 0.5, 400, x);
                loop {
                    let term = table[n] * zn;
                    sum += term;
                    n += 1;
                    zn *= z;
                    if (term.abs() < 1e-18 * sum.abs().max(1.0) && n > 5) || n >= 400 {
                        break;
                    }
                }
                track(resid(c(G_half(ctx, z, x)), c(sum), 0.0));
            }
        }
        ClosedHalf => {
            for x in samples(params, &pts(&[(1.4, 0.0), (-0.6, 0.0), (0.3, 0.0), (2.2, 0.0)])) {
                for n in 0..=deg {
                    let a = P_half_closed(ctx, n, x.re);
                    let b = P_eval(ctx, 0.5, n as i64, x.re);
                    track(resid(c(a), c(b), 0.0));
                }
            }
        }
        P1Half => {
            let p = q.sqrt();
            for x in samples(params, &pts(&[(1.4, 0.0), (-0.6, 0.0), (0.3, 0.0), (2.2, 0.0)])) {
                for n in 0..=deg {
                    let a = P1_eval(ctx, 0.5, n as i64, x.re);
                    let b = p.powf(n as f64 / 2.0) * P_eval(ctx, 0.5, n as i64, x.re / p.sqrt());
                    track(resid(c(a), c(b), 0.0));
                }
            }
        }
        GreenFwd => {
            for x in samples(params, &pts(&ANNULUS)) {
                let h = h_table(ctx, nu, deg, x);
                for m in 0..=deg {
                    let mut rhs = chebyshev_U_joukowski(m as i64, x);
                    let mut scale = rhs.norm();
                    for n in 0..m {
                        let t = x * q.powf(nu + n as f64) * chebyshev_U_joukowski((m - n - 1) as i64, x) * h[n];
                        scale = scale.max(t.norm());
                        rhs -= t;
                    }
                    track(resid(h[m], rhs, scale));
                }
            }
        }
        GreenBwd => {
            let plus = pts(&[(1.5, 0.0), (1.2, 1.2), (-2.0, 0.5), (0.0, 3.0)]);
            let minus = pts(&[(0.5, 0.0), (0.3, 0.5), (-0.7, -0.2), (0.0, 0.6)]);
            let cases: Vec<(Side, Complex64)> = match params.x {
                Some(x) if x.norm() > 1.0 => vec![(Side::Plus, x)],
                Some(x) if x.norm() < 1.0 => vec![(Side::Minus, x)],
                Some(x) => vec![(Side::Plus, x), (Side::Minus, x)],
                None => plus
                    .into_iter()
                    .map(|x| (Side::Plus, x))
                    .chain(minus.into_iter().map(|x| (Side::Minus, x)))
                    .collect(),
            };
            for (side, x) in cases {
                for n in 0..=deg as i64 {
                    let h = h_minimal(ctx, nu, side, n, x)?;
                    let lead = match side {
                        Side::Plus => x.powi(-(n as i32)),
                        Side::Minus => x.powi(n as i32),
                    };
                    let tail = green_tail(ctx, nu, side, n, x)?;
                    track(resid(h + tail, lead, lead.norm().max(h.norm())));
                }
            }
        }
        BoundCircle => {
            let nmax = (2 * deg).max(1);
            let circle = circle_bounds;
            for k in 0..100 {
                let theta = 2.0 * PI * (k as f64 + 0.5) / 100.0;
                let x = Complex64::from_polar(1.0, theta);
                let h = h_table(ctx, nu, nmax, x);
                for (n, hn) in h.iter().enumerate() {
                    let b = circle(q, nu, n);
                    track(excess(hn.norm(), b.modulus));
                    track(excess((theta.sin() * hn).norm(), b.sine_weighted));
                }
            }
            for &r in &[0.5, 2.0] {
                for k in 0..100 {
                    let x = Complex64::from_polar(r, 2.0 * PI * (k as f64 + 0.5) / 100.0);
                    let h = h_table(ctx, nu, nmax, x);
                    let bound = off_circle_bound(q, nu, x);
                    for (n, hn) in h.iter().enumerate() {
                        let scaled = if r < 1.0 { x.powi(n as i32) } else { x.powi(-(n as i32)) } * hn;
                        track(excess(scaled.norm(), bound));
                    }
                }
            }
        }
        BoundMin => {
            require(nu > -1.0, || format!("minimal-solution bounds need ν > -1, got {nu}"))?;
            for (side, radii) in [(Side::Plus, [1.0, 1.3, 2.0]), (Side::Minus, [1.0, 0.7, 0.5])] {
                for &r in &radii {
                    for k in 0..24 {
                        let x = Complex64::from_polar(r, 2.0 * PI * (k as f64 + 0.5) / 24.0);
                        for n in 0..=deg as i64 {
                            let h = h_minimal(ctx, nu, side, n, x)?;
                            let scaled = match side {
                                Side::Plus => x.powi(n as i32) * h,
                                Side::Minus => x.powi(-(n as i32)) * h,
                            };
                            track(excess(scaled.norm(), minimal_bound_near(q, nu, side, n, x)));
                            track(excess(scaled.norm(), minimal_bounds(q, nu, n).1));
                        }
                    }
                }
            }
        }
        ZeroFree => {
            let n0 = m_bound(ctx, nu).ceil().max(0.0) as i64;
            for n in n0..=n0 + 10 {
                for side in [Side::Plus, Side::Minus] {
                    let (lo, hi) = match side {
                        Side::Plus => (1.0, 5.0),
                        Side::Minus => (0.2, 1.0),
                    };
                    let mut sign = 0.0;
                    let mut flips = 0usize;
                    for k in 0..400 {
                        let x = lo + (hi - lo) * k as f64 / 399.0;
                        let v = h_minimal(ctx, nu, side, n, c(x))?.re;
                        if v == 0.0 || (sign != 0.0 && v.signum() != sign) {
                            flips += 1;
                        }
                        sign = v.signum();
                    }
                    track(flips as f64);
                    for k in 0..64 {
                        let x = Complex64::from_polar(1.0, 2.0 * PI * k as f64 / 64.0);
                        let h = h_minimal(ctx, nu, side, n, x)?;
                        let scaled = match side {
                            Side::Plus => x.powi(n as i32) * h,
                            Side::Minus => x.powi(-(n as i32)) * h,
                        };
                        track(((c(1.0) - scaled).norm() - 1.0).max(0.0));
                    }
                }
            }
        }
        WronskCombo => {
            // |x| = q^{t/2} for t in (-1, 1) stays inside the annulus for every q
            let default: Vec<Complex64> = [(-0.8, 0.3), (-0.4, 2.0), (0.0, 1.0), (0.3, -2.5), (0.7, 0.0)]
                .iter()
                .map(|&(t, theta)| Complex64::from_polar(q.powf(t / 2.0), theta))
                .collect();
            for x in samples(params, &default) {
                let r2 = x.norm_sqr();
                require(r2 > q && r2 * q < 1.0, || {
                    format!("needs q^(1/2) < |x| < q^(-1/2), got |x| = {}", x.norm())
                })?;
                let h = h_table(ctx, nu, deg, x);
                let mp = h_minimal(ctx, nu, Side::Plus, -1, x)?;
                let mm = h_minimal(ctx, nu, Side::Minus, -1, x)?;
                for n in 0..=deg as i64 {
                    let a = mm * h_minimal(ctx, nu, Side::Plus, n, x)?;
                    let b = mp * h_minimal(ctx, nu, Side::Minus, n, x)?;
                    let lhs = (1.0 / x - x) * h[n as usize];
                    track(resid(lhs, a - b, a.norm().max(b.norm())));
                }
            }
        }
        HurwitzOut | HurwitzIn | AsympMin | LimP | LimP1 | LimHalf => unreachable!(),
    }
    Ok(worst)
}

/// Residual of a limit at index `n`, maximised over the sample points.
fn limit_at(ctx: &QContext, id: IdentityId, params: &IdentityParams, n: usize) -> Result<f64> {
    use IdentityId::*;
    let q = ctx.q;
    let nu = params.nu;
    let mut worst = 0.0f64;
    match id {
        HurwitzOut => {
            let default = pts(&[(2.0, 0.0), (1.2, 1.6), (-2.0, 0.0), (0.0, 3.0)]);
            for x in samples(params, &default) {
                require(x.norm() > 1.0, || format!("needs |x| > 1, got {}", x.norm()))?;
                let h = *h_table(ctx, nu, n, x).last().unwrap();
                let target = qpoch_inf_real(ctx, q) * J_reg(&bp(ctx, nu - 1.0), 1.0 / x)?
                    / qpoch_inf(ctx, 1.0 / (x * x));
                worst = worst.max(resid(x.powi(-(n as i32)) * h, target, 0.0));
            }
        }
        HurwitzIn => {
            let default = pts(&[(0.5, 0.0), (0.2, 0.45), (-0.4, 0.0), (0.0, 0.3)]);
            for x in samples(params, &default) {
                require(x.norm() < 1.0, || format!("needs |x| < 1, got {}", x.norm()))?;
                let h = *h_table(ctx, nu, n, x).last().unwrap();
                let target = j_reg(&bp(ctx, nu - 1.0), x)? / qpoch_inf(ctx, x * x);
                worst = worst.max(resid(x.powi(n as i32) * h, target, 0.0));
            }
        }
        AsympMin => {
            let default = pts(&[(2.0, 0.0), (0.8, 0.0), (1.2, 0.5), (0.5, -0.3)]);
            let mu = nu + n as f64;
            for x in samples(params, &default) {
                let a = J_reg(&bp(ctx, mu), 1.0 / x)?;
                let ta = qpoch_inf(ctx, q / (x * x)) / qpoch_inf_real(ctx, q);
                let b = j_reg(&bp(ctx, mu), x)?;
                let tb = qpoch_inf(ctx, q * x * x);
                worst = worst.max(resid(a, ta, 0.0)).max(resid(b, tb, 0.0));
            }
        }
        LimP | LimP1 => {
            let default = pts(&[(0.5, 0.0), (0.9, 0.3), (-0.7, 0.0), (1.5, 0.0), (0.0, 1.2)]);
            for x in samples(params, &default) {
                let y = 1.0 / x;
                let (v, target) = if id == LimP {
                    (*P_table(ctx, nu, n, y).last().unwrap(), j_reg(&bp(ctx, nu - 1.0), x)?)
                } else {
                    (*P1_table(ctx, nu, n, y).last().unwrap(), j_reg(&bp(ctx, nu), x)?)
                };
                worst = worst.max(resid(x.powi(n as i32) * v, target, 0.0));
            }
        }
        LimHalf => {
            let default = pts(&[(0.5, 0.0), (0.9, 0.3), (-0.7, 0.0), (1.5, 0.0), (0.0, 1.2)]);
            let sp = q.powf(0.25);
            for x in samples(params, &default) {
                let y = 1.0 / x;
                let v = *P_table(ctx, 0.5, n, y).last().unwrap() * x.powi(n as i32);
                let v1 = *P1_table(ctx, 0.5, n, y).last().unwrap() * x.powi(n as i32);
                worst = worst
                    .max(resid(v, F_limit_complex(ctx, x), 0.0))
                    .max(resid(v1, F_limit_complex(ctx, x * sp), 0.0));
            }
        }
        _ => unreachable!(),
    }
    Ok(worst)
}

fn limit_ladder(ctx: &QContext, id: IdentityId, params: &IdentityParams) -> Result<Vec<LadderStep>> {
    use IdentityId::*;
    let q = ctx.q;
    // error rates: q^n for the h and Bessel limits, q^{n/2} for the P families
    let rate = match id {
        LimP | LimP1 | LimHalf => q.sqrt(),
        _ => q,
    };
    ladder_for_rate(rate)
        .into_iter()
        .map(|index| {
            Ok(LadderStep {
                index,
                residual: limit_at(ctx, id, params, index)?,
            })
        })
        .collect()
}

// ---------------------------------------------------------------------------
// Batch runner

/// Grid and filter for [`run_suite`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteConfig {
    pub qs: Vec<f64>,
    pub nus: Vec<f64>,
    pub degree: usize,
    /// `None` runs every registry id.
    pub ids: Option<Vec<IdentityId>>,
    pub tolerances: Tolerances,
    pub seed: u64,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig {
            qs: vec![0.3, 0.5, 0.7],
            nus: vec![0.5, 1.0, 1.5, 2.5],
            degree: 20,
            ids: None,
            tolerances: Tolerances::default(),
            seed: 0x5eed,
        }
    }
}

/// Aggregate over the grid for one id.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteEntry {
    pub id: IdentityId,
    pub kind: CheckKind,
    pub max_residual: f64,
    pub tolerance: f64,
    pub cases: usize,
    pub passed: bool,
    /// Grid points that failed or raised an error, as `q=…, ν=…: reason`.
    pub failures: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub entries: Vec<SuiteEntry>,
    pub all_passed: bool,
}

/// Runs every selected id at every `(q, ν)` of the grid; member errors are recorded as
/// failures and do not stop the run.
pub fn run_suite(ctx: &QContext, config: &SuiteConfig) -> Result<SuiteReport> {
    if config.qs.is_empty() || config.nus.is_empty() {
        return Err(Error::Config("parameter grid is empty".into()));
    }
    let ids: Vec<IdentityId> = match &config.ids {
        Some(ids) if ids.is_empty() => return Err(Error::Config("empty id filter".into())),
        Some(ids) => ids.clone(),
        None => IdentityId::ALL.to_vec(),
    };
    let mut entries = Vec::with_capacity(ids.len());
    for id in ids {
        let tolerance = config.tolerances.for_kind(id.kind());
        let mut entry = SuiteEntry {
            id,
            kind: id.kind(),
            max_residual: 0.0,
            tolerance,
            cases: 0,
            passed: true,
            failures: Vec::new(),
        };
        for &q in &config.qs {
            let local = QContext { q, ..*ctx };
            for &nu in &config.nus {
                entry.cases += 1;
                let params = IdentityParams {
                    degree: config.degree,
                    seed: config.seed,
                    tolerances: config.tolerances,
                    ..IdentityParams::new(nu)
                };
                match check_identity(&local, id, &params) {
                    Ok(case) => {
                        entry.max_residual = if case.residual.is_nan() {
                            f64::NAN
                        } else {
                            entry.max_residual.max(case.residual)
                        };
                        if !case.passed {
                            entry.passed = false;
                            let why = match case.monotone {
                                Some(false) => "residual grew along the ladder".to_string(),
                                _ => format!("residual {:e} > {:e}", case.residual, case.tolerance),
                            };
                            entry.failures.push(format!("q={q}, ν={nu}: {why}"));
                        }
                    }
                    Err(e) => {
                        entry.passed = false;
                        entry.failures.push(format!("q={q}, ν={nu}: {e}"));
                    }
                }
            }
        }
        entries.push(entry);
    }
    let all_passed = entries.iter().all(|e| e.passed);
    Ok(SuiteReport { entries, all_passed })
}


/// Extended-precision complex arithmetic for sums with heavy cancellation.
mod mp {
    use astro_float::{BigFloat, RoundingMode, Sign};
    use num_complex::Complex64;

    const RM: RoundingMode = RoundingMode::ToEven;

    #[derive(Clone)]
    struct C {
        re: BigFloat,
        im: BigFloat,
    }

    fn to_f64(x: &BigFloat) -> f64 {
        match x.as_raw_parts() {
            Some((words, _, sign, exp, _)) => {
                let top = *words.last().unwrap_or(&0) as f64;
                let v = top * 2f64.powi(exp - 64);
                if sign == Sign::Neg {
                    -v
                } else {
                    v
                }
            }
            None => f64::NAN,
        }
    }

    impl C {
        fn real(x: f64, p: usize) -> C {
            C::new(Complex64::new(x, 0.0), p)
        }
        fn new(z: Complex64, p: usize) -> C {
            C {
                re: BigFloat::from_f64(z.re, p),
                im: BigFloat::from_f64(z.im, p),
            }
        }
        fn add(&self, o: &C, p: usize) -> C {
            C {
                re: self.re.add(&o.re, p, RM),
                im: self.im.add(&o.im, p, RM),
            }
        }
        fn sub(&self, o: &C, p: usize) -> C {
            C {
                re: self.re.sub(&o.re, p, RM),
                im: self.im.sub(&o.im, p, RM),
            }
        }
        fn mul(&self, o: &C, p: usize) -> C {
            C {
                re: self.re.mul(&o.re, p, RM).sub(&self.im.mul(&o.im, p, RM), p, RM),
                im: self.re.mul(&o.im, p, RM).add(&self.im.mul(&o.re, p, RM), p, RM),
            }
        }
        fn div(&self, o: &C, p: usize) -> C {
            let d = o.re.mul(&o.re, p, RM).add(&o.im.mul(&o.im, p, RM), p, RM);
            let re = self.re.mul(&o.re, p, RM).add(&self.im.mul(&o.im, p, RM), p, RM);
            let im = self.im.mul(&o.re, p, RM).sub(&self.re.mul(&o.im, p, RM), p, RM);
            C {
                re: re.div(&d, p, RM),
                im: im.div(&d, p, RM),
            }
        }
        fn to_c64(&self) -> Complex64 {
            Complex64::new(to_f64(&self.re), to_f64(&self.im))
        }
    }

    /// Terminating `₃φ₂(q^{-k}, a, b; d, 0; q, q)` summed with enough bits to absorb the
    /// cancellation (about `k²/2·log2(1/q)` bits), rounded once at the end.
    pub fn phi32_terminating(q: f64, k: usize, a: Complex64, b: Complex64, d: Complex64) -> Complex64 {
        let lost = (k * k) as f64 / 2.0 * (1.0 / q).log2();
        let p = 192 + 64 * ((lost / 64.0).ceil() as usize);
        let one = C::real(1.0, p);
        let qb = C::real(q, p);
        let (a, b, d) = (C::new(a, p), C::new(b, p), C::new(d, p));
        let mut qmk = one.clone();
        for _ in 0..k {
            qmk = qmk.div(&qb, p);
        }
        let mut sum = C::real(0.0, p);
        let mut term = one.clone();
        let mut qj = one.clone();
        for _ in 0..=k {
            sum = sum.add(&term, p);
            let num = one
                .sub(&qmk.mul(&qj, p), p)
                .mul(&one.sub(&a.mul(&qj, p), p), p)
                .mul(&one.sub(&b.mul(&qj, p), p), p);
            let den = one.sub(&qb.mul(&qj, p), p).mul(&one.sub(&d.mul(&qj, p), p), p);
            term = term.mul(&num, p).div(&den, p).mul(&qb, p);
            qj = qj.mul(&qb, p);
        }
        sum.to_c64()
    }

}
