//! Moment sequences `c_k`, `d_k`, the strong moment functional `L`, its contour/residue
//! realization, Gram matrices of the orthogonal families and the Stieltjes transform.
#![allow(non_snake_case)]

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::bessel::{j_reg, j_scaled, Abscissa, BesselParams, J_reg, J_scaled};
use crate::error::{Error, Result};
use crate::lommel::{h_coeffs, p_polys, P1_table, P_polys, P_table};
use crate::poly::{LaurentCoeffs, Poly};
use crate::qseries::{basic_phi, qpoch_inf, qpoch_inf_real, qpoch_real, QContext};
use crate::spectral::{zeros_J, zeros_below, zeros_j, ZeroKind, ZeroTable};

/// Which moment sequence a table holds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum MomentKind {
    /// Taylor coefficients of `J_{ν+n}/J_{ν-1}`; for `n = 0` the moments of `L_+`.
    C,
    /// Taylor coefficients of `j_{ν+n}/j_{ν-1}`; for `n = 0` the moments of `L_-`.
    D,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MomentTable {
    pub kind: MomentKind,
    pub nu: f64,
    /// Ratio order `n`.
    pub n: usize,
    pub values: Vec<f64>,
}

/// `A = 1/((q^ν;q)_∞ (q;q)_∞)`, so that `|c_k| ≤ A e^{kA}`.
pub fn gronwall_constant(ctx: &QContext, nu: f64) -> f64 {
    1.0 / (qpoch_inf_real(ctx, ctx.q.powf(nu)) * qpoch_inf_real(ctx, ctx.q))
}

fn phi_coeff(ctx: &QContext, b: f64, k: usize) -> f64 {
    let q = ctx.q;
    let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
    let kk = k as f64;
    sign * q.powf(0.5 * kk * (kk + 1.0)) / (qpoch_real(ctx, b, k) * qpoch_real(ctx, q, k))
}

/// `c_0..=c_K` for the ratio `J_{ν+n}/J_{ν-1} = x^{n+1}/(q^ν;q)_{n+1} Σ c_k x^{2k}`.
pub fn c_moments(ctx: &QContext, nu: f64, n: usize, K: usize) -> Result<MomentTable> {
    if !(nu > 0.0) {
        return Err(Error::Domain(format!("c moments need ν > 0, got {nu}")));
    }
    let q = ctx.q;
    let top = q.powf(nu + n as f64 + 1.0);
    let bottom = q.powf(nu);
    let a: Vec<f64> = (0..=K).map(|j| phi_coeff(ctx, bottom, j)).collect();
    let mut values = Vec::with_capacity(K + 1);
    for k in 0..=K {
        let mut v = phi_coeff(ctx, top, k);
        for (p, cp) in values.iter().enumerate() {
            v -= cp * a[k - p];
        }
        values.push(v);
    }
    Ok(MomentTable {
        kind: MomentKind::C,
        nu,
        n,
        values,
    })
}

fn phi21_zero(ctx: &QContext, k: usize, z: f64) -> f64 {
    let c = |x: f64| Complex64::new(x, 0.0);
    basic_phi(ctx, &[c(ctx.q.powi(-(k as i32))), c(0.0)], &[c(ctx.q)], c(z))
        .map(|v| v.re)
        .unwrap_or(f64::NAN)
}

/// `d_0..=d_K` for the ratio `j_{ν+n}/j_{ν-1} = x^{n+1} Σ d_k x^{2k}`.
pub fn d_moments(ctx: &QContext, nu: f64, n: usize, K: usize) -> MomentTable {
    let q = ctx.q;
    let a: Vec<f64> = (0..=K).map(|j| phi21_zero(ctx, j, q.powf(nu + j as f64))).collect();
    let mut values = Vec::with_capacity(K + 1);
    for k in 0..=K {
        let mut v = phi21_zero(ctx, k, q.powf(nu + (n + 1 + k) as f64));
        for (p, dp) in values.iter().enumerate() {
            v -= dp * a[k - p];
        }
        values.push(v);
    }
    MomentTable {
        kind: MomentKind::D,
        nu,
        n,
        values,
    }
}

/// The strong moment functional on Laurent polynomials, defined through its moments:
/// `L(x^{2k}) = c_k/(1-q^ν)`, `L(x^{-2k-2}) = -d_k`, odd powers `0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StrongFunctional {
    pub nu: f64,
    pub c: MomentTable,
    pub d: MomentTable,
    /// `1/(1-q^ν)`, the mass of `L_+`.
    pub scale: f64,
}

impl StrongFunctional {
    /// Tables long enough for exponents in `[-2K-2, 2K+1]`.
    pub fn new(ctx: &QContext, nu: f64, K: usize) -> Result<Self> {
        Ok(StrongFunctional {
            nu,
            c: c_moments(ctx, nu, 0, K)?,
            d: d_moments(ctx, nu, 0, K),
            scale: 1.0 / (1.0 - ctx.q.powf(nu)),
        })
    }

    /// `L(x^e)`.
    pub fn moment(&self, e: i64) -> Result<f64> {
        if e % 2 != 0 {
            return Ok(0.0);
        }
        let (table, k) = if e >= 0 {
            (&self.c, (e / 2) as usize)
        } else {
            (&self.d, ((-e - 2) / 2) as usize)
        };
        let v = table.values.get(k).ok_or_else(|| {
            Error::Range(format!(
                "L(x^{e}) needs index {k}, table holds {}",
                table.values.len()
            ))
        })?;
        Ok(if e >= 0 { v * self.scale } else { -v })
    }

    pub fn apply(&self, p: &LaurentCoeffs) -> Result<f64> {
        p.terms().try_fold(0.0, |acc, (e, c)| Ok(acc + c * self.moment(e)?))
    }
}

fn table_size_for(p: &LaurentCoeffs) -> usize {
    if p.coeffs.is_empty() {
        return 0;
    }
    let hi = p.high().max(0) as usize / 2;
    let lo = if p.low <= -2 { ((-p.low - 2) / 2) as usize } else { 0 };
    hi.max(lo)
}

/// `L(p)` through the moment recursions.
pub fn L_apply(ctx: &QContext, nu: f64, p: &LaurentCoeffs) -> Result<f64> {
    StrongFunctional::new(ctx, nu, table_size_for(p))?.apply(p)
}

// ---------------------------------------------------------------------------
// Residue / contour realization

/// A point mass of a discrete measure; `location` carries the `+` point, the mirror
/// `-location` has the same weight.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Mass {
    pub location: f64,
    pub weight: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FunctionalReport {
    pub poly: LaurentCoeffs,
    pub nu: f64,
    /// `L(p)` from the moment recursions.
    pub moment_value: f64,
    /// `L(p)` from the contour integral plus residues, when computed.
    pub residue_value: Option<f64>,
    pub s: Option<f64>,
    /// The contour integral alone (real part) and its imaginary part, a quadrature diagnostic.
    pub contour_value: Option<f64>,
    pub contour_imag: Option<f64>,
    /// `N`: zeros `j_k^{ν-1} < 1/s`, contributing masses at `±1/j_k^{ν-1}`.
    pub masses_J: Vec<Mass>,
    /// `M`: zeros `x_l^{ν-1} < s`, contributing masses at `±x_l^{ν-1}`.
    pub masses_j: Vec<Mass>,
    pub quad_nodes: usize,
}

impl FunctionalReport {
    pub fn N(&self) -> usize {
        self.masses_J.len()
    }

    pub fn M(&self) -> usize {
        self.masses_j.len()
    }
}

/// Trapezoid node count cap for the contour integral.
const MAX_QUAD_NODES: usize = 1 << 17;
const QUAD_AGREEMENT: f64 = 1e-10;
/// Relative distance under which `s` counts as colliding with a pole.
const POLE_GUARD: f64 = 1e-6;

/// `-J_ν(a)/(a² J'_{ν-1}(a))` at a zero `a` of `J_{ν-1}`.
///
/// Far zeros carry weights below `1e-280`, where the computed value is rounding noise;
/// those are returned as `0`.
pub fn weight_J(ctx: &QContext, nu: f64, a: &Abscissa) -> Result<f64> {
    let p = BesselParams::new(nu, *ctx);
    let f = J_scaled(&p, a)?;
    let g = J_scaled(&p.shifted(-1.0), a)?;
    // the log scales differ by exactly ln a
    Ok(flush(-f.mantissa / (g.derivative * a.x)))
}

fn flush(w: f64) -> f64 {
    if w.abs() < UNDERFLOW_WEIGHT {
        0.0
    } else {
        w
    }
}

const UNDERFLOW_WEIGHT: f64 = 1e-280;

/// `j_ν(x)/j'_{ν-1}(x)` at a zero `x` of `j_{ν-1}` (negative).
pub fn weight_j(ctx: &QContext, nu: f64, x: &Abscissa) -> Result<f64> {
    let p = BesselParams::new(nu, *ctx);
    let f = j_scaled(&p, x)?;
    let g = j_scaled(&p.shifted(-1.0), x)?;
    Ok(flush(f.mantissa / g.derivative * x.x))
}

fn near_limit(t: &ZeroTable, limit: f64) -> Option<f64> {
    t.values()
        .into_iter()
        .find(|z| ((z - limit) / limit).abs() < POLE_GUARD)
}

/// Contour integrand `p(z)(qz^{-2};q)_∞(z²;q)_∞ / ((q;q)_∞ J_{ν-1}(1/z) j_{ν-1}(z))`
/// (without `dz/(2πi z)`), in the branch-free regularized form.
fn contour_integrand(ctx: &QContext, p: &BesselParams, poly: &LaurentCoeffs, z: Complex64) -> Result<Complex64> {
    let q = ctx.q;
    let z2 = z * z;
    let num = qpoch_inf(ctx, q / z2) * qpoch_inf(ctx, z2);
    let den = J_reg(p, 1.0 / z)? * j_reg(p, z)? * qpoch_inf_real(ctx, q);
    Ok(poly.eval(z) * num / den)
}

/// Trapezoid rule on `|z| = s`, doubling from `nodes` until two successive values agree.
fn contour_mean(ctx: &QContext, nu: f64, poly: &LaurentCoeffs, s: f64, nodes: usize) -> Result<(Complex64, usize)> {
    let p = BesselParams::new(nu - 1.0, *ctx);
    let mut n = nodes.max(4);
    let at = |theta: f64| contour_integrand(ctx, &p, poly, Complex64::from_polar(s, theta));
    let step = |n: usize| 2.0 * std::f64::consts::PI / n as f64;
    let mut sum = Complex64::new(0.0, 0.0);
    for i in 0..n {
        sum += at(step(n) * i as f64)?;
    }
    let mut mean = sum / n as f64;
    while n < MAX_QUAD_NODES {
        let h = step(n);
        for i in 0..n {
            sum += at(h * (i as f64 + 0.5))?;
        }
        n *= 2;
        let next = sum / n as f64;
        let done = (next - mean).norm() <= QUAD_AGREEMENT * next.norm().max(1.0);
        mean = next;
        if done {
            return Ok((mean, n));
        }
    }
    Err(Error::Convergence(format!(
        "contour quadrature on |z| = {s} did not settle within {MAX_QUAD_NODES} nodes"
    )))
}

/// `L(p)` through the contour integral over `|z| = s` plus the residues at the zeros
/// passed when the contours are moved to that circle.
pub fn L_residue(ctx: &QContext, nu: f64, poly: &LaurentCoeffs, s: f64, quad_nodes: usize) -> Result<FunctionalReport> {
    if !(nu > 0.0) {
        return Err(Error::Domain(format!("the strong functional needs ν > 0, got {nu}")));
    }
    let q = ctx.q;
    if !(s > q.sqrt() && s < 1.0 / q.sqrt()) {
        return Err(Error::Domain(format!(
            "contour radius must satisfy q^(1/2) < s < q^(-1/2), got {s}"
        )));
    }
    let moment_value = L_apply(ctx, nu, poly)?;
    let guard = 1.0 + 2.0 * POLE_GUARD;
    let zJ = zeros_below(ctx, ZeroKind::J, nu - 1.0, guard / s)?;
    let zj = zeros_below(ctx, ZeroKind::Companion, nu - 1.0, guard * s)?;
    if let Some(z) = near_limit(&zJ, 1.0 / s) {
        return Err(Error::Domain(format!("1/s = {} is within {POLE_GUARD} of the zero {z} of J_(ν-1)", 1.0 / s)));
    }
    if let Some(z) = near_limit(&zj, s) {
        return Err(Error::Domain(format!("s = {s} is within {POLE_GUARD} of the zero {z} of j_(ν-1)")));
    }
    let masses_J = zJ
        .zeros
        .iter()
        .filter(|a| a.x < 1.0 / s)
        .map(|a| Ok(Mass { location: 1.0 / a.x, weight: weight_J(ctx, nu, a)? }))
        .collect::<Result<Vec<_>>>()?;
    let masses_j = zj
        .zeros
        .iter()
        .filter(|a| a.x < s)
        .map(|a| Ok(Mass { location: a.x, weight: weight_j(ctx, nu, a)? }))
        .collect::<Result<Vec<_>>>()?;
    let (contour, used) = contour_mean(ctx, nu, poly, s, quad_nodes)?;
    let discrete: f64 = masses_J
        .iter()
        .chain(&masses_j)
        .map(|m| (poly.eval_real(m.location) + poly.eval_real(-m.location)) * m.weight)
        .sum();
    Ok(FunctionalReport {
        poly: poly.clone(),
        nu,
        moment_value,
        residue_value: Some(contour.re + discrete),
        s: Some(s),
        contour_value: Some(contour.re),
        contour_imag: Some(contour.im),
        masses_J,
        masses_j,
        quad_nodes: used,
    })
}

// ---------------------------------------------------------------------------
// Gram matrices

/// The two Gram matrices of the Laurent q-Lommel polynomials.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LaurentGram {
    /// `L(h_n h_m)`.
    pub plus: Vec<Vec<f64>>,
    /// `L(x^{-1}h_n x^{-1}h_m)`.
    pub minus: Vec<Vec<f64>>,
    pub max_off_diagonal: f64,
    /// Largest `|G⁺_{mm} - 1/(1-q^{ν+m})|`.
    pub plus_diagonal_error: f64,
    /// Largest `|G⁻_{mm} + 1|`.
    pub minus_diagonal_error: f64,
}

pub fn gram_laurent(ctx: &QContext, nu: f64, nmax: usize) -> Result<LaurentGram> {
    let L = StrongFunctional::new(ctx, nu, nmax + 1)?;
    let h: Vec<LaurentCoeffs> = (0..=nmax).map(|m| h_coeffs(ctx, nu, m)).collect();
    let hm: Vec<LaurentCoeffs> = h.iter().map(|p| p.shift(-1)).collect();
    let mut plus = vec![vec![0.0; nmax + 1]; nmax + 1];
    let mut minus = plus.clone();
    let (mut off, mut dp, mut dm) = (0.0f64, 0.0f64, 0.0f64);
    for n in 0..=nmax {
        for m in 0..=nmax {
            plus[n][m] = L.apply(&(&h[n] * &h[m]))?;
            minus[n][m] = L.apply(&(&hm[n] * &hm[m]))?;
            if n == m {
                dp = dp.max((plus[n][n] - 1.0 / (1.0 - ctx.q.powf(nu + n as f64))).abs());
                dm = dm.max((minus[n][n] + 1.0).abs());
            } else {
                off = off.max(plus[n][m].abs()).max(minus[n][m].abs());
            }
        }
    }
    Ok(LaurentGram {
        plus,
        minus,
        max_off_diagonal: off,
        plus_diagonal_error: dp,
        minus_diagonal_error: dm,
    })
}

/// Largest `|L(x^{-1} h_n h_m)|` for `n, m ≤ nmax`.
pub fn lacunary_check(ctx: &QContext, nu: f64, nmax: usize) -> Result<f64> {
    let L = StrongFunctional::new(ctx, nu, nmax + 1)?;
    let h: Vec<LaurentCoeffs> = (0..=nmax).map(|m| h_coeffs(ctx, nu, m)).collect();
    let mut worst = 0.0f64;
    for n in 0..=nmax {
        for m in 0..=nmax {
            worst = worst.max(L.apply(&(&h[n] * &h[m]).shift(-1))?.abs());
        }
    }
    Ok(worst)
}

/// Tail estimate of a truncated discrete measure exceeding the Gram tolerance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TruncationWarning {
    pub tail_estimate: f64,
    pub tolerance: f64,
}

/// Tail estimates above this trigger a [`TruncationWarning`].
pub const GRAM_TOLERANCE: f64 = 1e-8;

/// Gram matrix of a polynomial family under a symmetric discrete measure.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiscreteGram {
    pub matrix: Vec<Vec<f64>>,
    /// Expected diagonal.
    pub targets: Vec<f64>,
    /// Masses at `±location`.
    pub masses: Vec<Mass>,
    pub mass_at_zero: f64,
    pub max_off_diagonal: f64,
    /// Largest `|G_{nn} - target_n| / target_n`.
    pub max_diagonal_error: f64,
    /// Last included weight times the largest `p_n p_m` on the support hull.
    pub tail_estimate: f64,
    pub warning: Option<TruncationWarning>,
}

fn discrete_gram(polys: &[Poly], masses: Vec<Mass>, mass_at_zero: f64, targets: Vec<f64>) -> DiscreteGram {
    let n = polys.len();
    let mut matrix = vec![vec![0.0; n]; n];
    // sum small masses first
    for m in masses.iter().rev() {
        let plus: Vec<f64> = polys.iter().map(|p| p.eval(m.location)).collect();
        let minus: Vec<f64> = polys.iter().map(|p| p.eval(-m.location)).collect();
        for i in 0..n {
            for j in 0..n {
                matrix[i][j] += m.weight * (plus[i] * plus[j] + minus[i] * minus[j]);
            }
        }
    }
    for i in 0..n {
        for j in 0..n {
            matrix[i][j] += mass_at_zero * polys[i].eval(0.0) * polys[j].eval(0.0);
        }
    }
    let (mut off, mut diag) = (0.0f64, 0.0f64);
    for i in 0..n {
        for j in 0..n {
            if i == j {
                diag = diag.max(((matrix[i][i] - targets[i]) / targets[i]).abs());
            } else {
                off = off.max(matrix[i][j].abs());
            }
        }
    }
    let hull = masses.first().map(|m| m.location.abs()).unwrap_or(0.0);
    let sup = (0..=64)
        .map(|i| -hull + 2.0 * hull * i as f64 / 64.0)
        .flat_map(|t| polys.iter().map(move |p| p.eval(t).abs()))
        .fold(0.0, f64::max);
    let tail_estimate = 2.0 * masses.last().map(|m| m.weight.abs()).unwrap_or(0.0) * sup * sup;
    let warning = (tail_estimate > GRAM_TOLERANCE).then_some(TruncationWarning {
        tail_estimate,
        tolerance: GRAM_TOLERANCE,
    });
    DiscreteGram {
        matrix,
        targets,
        masses,
        mass_at_zero,
        max_off_diagonal: off,
        max_diagonal_error: diag,
        tail_estimate,
        warning,
    }
}

/// Norms `q^{(n+ν)⌊(n+1)/2⌋}/(1-q^{n+ν})` of `p_n`.
pub fn p_norm(q: f64, nu: f64, n: usize) -> f64 {
    let e = (n as f64 + nu) * ((n + 1) / 2) as f64;
    q.powf(e) / (1.0 - q.powf(n as f64 + nu))
}

/// Norms of `P_n`: `q^{l(l+ν)}` for `n = 2l` and `q^{(l+1)(l+ν)}` for `n = 2l+1`.
pub fn P_norm(q: f64, nu: f64, n: usize) -> f64 {
    let l = (n / 2) as f64;
    if n % 2 == 0 {
        q.powf(l * (l + nu))
    } else {
        q.powf((l + 1.0) * (l + nu))
    }
}

/// Gram matrix of `p_0..=p_nmax` under the measure with masses at `±1/j_k^{ν-1}`
/// (first `K_zeros` zeros) and unit mass at `0`.
pub fn gram_p(ctx: &QContext, nu: f64, nmax: usize, K_zeros: usize) -> Result<DiscreteGram> {
    if !(nu > 0.0) {
        return Err(Error::Domain(format!("gram_p needs ν > 0, got {nu}")));
    }
    let zeros = zeros_J(ctx, nu - 1.0, K_zeros)?;
    let masses = zeros
        .zeros
        .iter()
        .map(|a| Ok(Mass { location: 1.0 / a.x, weight: weight_J(ctx, nu, a)? }))
        .collect::<Result<Vec<_>>>()?;
    let polys = p_polys(ctx, nu, nmax);
    let targets = (0..=nmax).map(|n| p_norm(ctx.q, nu, n)).collect();
    Ok(discrete_gram(&polys, masses, 1.0, targets))
}

/// Mass of the `P_n` measure at the origin: `1 - q^{ν-1}` for `ν > 1`, else `0`.
pub fn P_mass_at_zero(q: f64, nu: f64) -> f64 {
    if nu > 1.0 {
        1.0 - q.powf(nu - 1.0)
    } else {
        0.0
    }
}

/// Gram matrix of `P_0..=P_nmax` under the measure with masses at `±1/x_k^{ν-1}`
/// and `1 - q^{ν-1}` at `0` when `ν > 1`.
pub fn gram_P(ctx: &QContext, nu: f64, nmax: usize, K_zeros: usize) -> Result<DiscreteGram> {
    let zeros = zeros_j(ctx, nu - 1.0, K_zeros)?;
    let masses = zeros
        .zeros
        .iter()
        .map(|a| Ok(Mass { location: 1.0 / a.x, weight: -weight_j(ctx, nu, a)? / (a.x * a.x) }))
        .collect::<Result<Vec<_>>>()?;
    let polys = P_polys(ctx, nu, nmax);
    let targets = (0..=nmax).map(|n| P_norm(ctx.q, nu, n)).collect();
    Ok(discrete_gram(&polys, masses, P_mass_at_zero(ctx.q, nu), targets))
}

// ---------------------------------------------------------------------------
// Stieltjes transform and positivity

/// `(P^{(1)}_{n-1}(z)/P_n(z), j_ν(1/z)/j_{ν-1}(1/z))`; the first converges to the second.
pub fn stieltjes_check(ctx: &QContext, nu: f64, n: usize, z: Complex64) -> Result<(Complex64, Complex64)> {
    if n == 0 || z.norm() == 0.0 {
        return Err(Error::Domain("Stieltjes check needs n ≥ 1 and z ≠ 0".into()));
    }
    let pn = P_table(ctx, nu, n, z)[n];
    let scale = z.norm().max(1.0).powi(n as i32);
    if pn.norm() <= 1e-14 * scale {
        return Err(Error::Domain(format!("P_{n}(z) vanishes at z = {z}")));
    }
    let ratio = P1_table(ctx, nu, n - 1, z)[n - 1] / pn;
    let y = 1.0 / z;
    let p = BesselParams::new(nu, *ctx);
    let target = y * j_reg(&p, y)? / j_reg(&p.shifted(-1.0), y)?;
    Ok((ratio, target))
}

/// `Σ_k A_k (1/(z-t_k) + 1/(z+t_k)) + A_0/z` over the masses of [`gram_P`]'s measure.
///
/// The measure has total mass `1` and the omitted masses sit between `-t_K` and `t_K`,
/// so the missing mass `1 - A_0 - 2Σ A_k` is added at the origin. Near `ν = 1` the
/// weights decay only like `k^{-2}` and this correction carries the tail.
pub fn stieltjes_from_masses(masses: &[Mass], mass_at_zero: f64, z: Complex64) -> Complex64 {
    let listed: f64 = 2.0 * masses.iter().rev().map(|m| m.weight).sum::<f64>();
    let rest = 1.0 - mass_at_zero - listed;
    masses
        .iter()
        .rev()
        .map(|m| m.weight * (1.0 / (z - m.location) + 1.0 / (z + m.location)))
        .sum::<Complex64>()
        + (mass_at_zero + rest) / z
}

/// Leading principal minors of orders `1..=order` of the Hankel matrix `(μ_{i+j})`, where
/// `μ_{2k} = even[k]` and odd moments vanish.
pub fn hankel_minors(even: &[f64], order: usize) -> Result<Vec<f64>> {
    if even.len() < order {
        return Err(Error::Range(format!(
            "Hankel minors of order {order} need {order} even moments, got {}",
            even.len()
        )));
    }
    let mu = |i: usize| if i % 2 == 0 { even[i / 2] } else { 0.0 };
    Ok((1..=order)
        .map(|m| {
            let a = (0..m).map(|i| (0..m).map(|j| mu(i + j)).collect()).collect();
            determinant(a)
        })
        .collect())
}

fn determinant(mut a: Vec<Vec<f64>>) -> f64 {
    let n = a.len();
    let mut det = 1.0;
    for col in 0..n {
        let piv = (col..n)
            .max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))
            .unwrap();
        if a[piv][col] == 0.0 {
            return 0.0;
        }
        if piv != col {
            a.swap(piv, col);
            det = -det;
        }
        det *= a[col][col];
        for r in col + 1..n {
            let f = a[r][col] / a[col][col];
            for c in col..n {
                a[r][c] -= f * a[col][c];
            }
        }
    }
    det
}
