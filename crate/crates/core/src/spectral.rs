//! Zeros: the Hessenberg matrix whose spectrum gives the zeros of `V_{n,ν}`, an
//! independent polynomial root solver, and bracketed positive zeros of `J_ν` and `j_ν`.
#![allow(non_snake_case)]

use std::cmp::Ordering;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::bessel::{j_scaled, Abscissa, BesselParams, J_scaled, Scaled};
use crate::error::{Error, Result};
use crate::lommel::V_poly;
use crate::poly::Poly;
use crate::qseries::{qpoch_real, QContext};

// ---------------------------------------------------------------------------
// Hessenberg matrix and its spectrum

/// `H_n = (c_{i,j})_{0 ≤ i,j < n}` with `x V_i = Σ_k c_{i,k} V_k`. Lower Hessenberg:
/// `c_{i,k} = 0` for `k > i + 1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HessenbergMatrix {
    pub n: usize,
    pub entries: Vec<Vec<f64>>,
}

impl HessenbergMatrix {
    /// Sum of row `i`.
    pub fn row_sum(&self, i: usize) -> f64 {
        self.entries[i].iter().sum()
    }
}

/// The coefficient `c_{i,k}` of `V_k` in `x V_i`.
pub fn hessenberg_entry(ctx: &QContext, nu: f64, i: usize, k: usize) -> f64 {
    let q = ctx.q;
    let qnu = q.powf(nu);
    if k == i + 1 {
        1.0 / (1.0 - q.powf(nu + i as f64))
    } else if k == 0 {
        -1.0 / qpoch_real(ctx, qnu, i + 1)
    } else if k <= i {
        qpoch_real(ctx, qnu, k - 1) * q.powf(nu + k as f64 - 1.0) / qpoch_real(ctx, qnu, i + 1)
    } else {
        0.0
    }
}

pub fn hessenberg(ctx: &QContext, nu: f64, n: usize) -> Result<HessenbergMatrix> {
    if n == 0 {
        return Err(Error::Domain("Hessenberg matrix needs n ≥ 1".into()));
    }
    if let Some(i) = (0..n).find(|&i| nu + i as f64 == 0.0) {
        return Err(Error::Domain(format!("1 - q^(ν+{i}) = 0: degenerate order")));
    }
    let entries = (0..n)
        .map(|i| (0..n).map(|k| hessenberg_entry(ctx, nu, i, k)).collect())
        .collect();
    Ok(HessenbergMatrix { n, entries })
}

/// Diagonal similarity that equalises row and column norms (radix 2, so exact).
fn balance(a: &mut [Vec<f64>]) {
    let n = a.len();
    let radix = 2.0;
    let sqrdx = radix * radix;
    let mut done = false;
    while !done {
        done = true;
        for i in 0..n {
            let mut r = 0.0;
            let mut c = 0.0;
            for j in 0..n {
                if j != i {
                    c += a[j][i].abs();
                    r += a[i][j].abs();
                }
            }
            if c == 0.0 || r == 0.0 {
                continue;
            }
            let s = c + r;
            let mut f = 1.0;
            let mut g = r / radix;
            while c < g {
                f *= radix;
                c *= sqrdx;
            }
            g = r * radix;
            while c > g {
                f /= radix;
                c /= sqrdx;
            }
            if (c + r) / f < 0.95 * s {
                done = false;
                for j in 0..n {
                    a[i][j] /= f;
                    a[j][i] *= f;
                }
            }
        }
    }
}

fn sign(a: f64, b: f64) -> f64 {
    if b >= 0.0 {
        a.abs()
    } else {
        -a.abs()
    }
}

/// Eigenvalues of a lower or upper Hessenberg matrix by the Francis double-shift QR
/// iteration.
///
/// On failure the error message lists the eigenvalues deflated so far.
pub fn hessenberg_eigenvalues(h: &HessenbergMatrix) -> Result<Vec<Complex64>> {
    let n = h.entries.len();
    let lower = (0..n).any(|i| (0..i.saturating_sub(1)).any(|j| h.entries[i][j] != 0.0));
    let mut a = if lower {
        (0..n).map(|i| (0..n).map(|j| h.entries[j][i]).collect()).collect()
    } else {
        h.entries.clone()
    };
    balance(&mut a);
    let n = a.len() as isize;
    let mut wr = vec![0.0; a.len()];
    let mut wi = vec![0.0; a.len()];
    let mut anorm = 0.0;
    for i in 0..a.len() {
        for j in i.saturating_sub(1)..a.len() {
            anorm += a[i][j].abs();
        }
    }
    let at = |i: isize| i as usize;
    let mut nn = n - 1;
    let mut t = 0.0;
    while nn >= 0 {
        let mut its = 0;
        loop {
            let mut l = nn;
            while l >= 1 {
                let mut s = a[at(l - 1)][at(l - 1)].abs() + a[at(l)][at(l)].abs();
                if s == 0.0 {
                    s = anorm;
                }
                if a[at(l)][at(l - 1)].abs() + s == s {
                    a[at(l)][at(l - 1)] = 0.0;
                    break;
                }
                l -= 1;
            }
            let mut x = a[at(nn)][at(nn)];
            if l == nn {
                wr[at(nn)] = x + t;
                wi[at(nn)] = 0.0;
                nn -= 1;
                break;
            }
            let mut y = a[at(nn - 1)][at(nn - 1)];
            let mut w = a[at(nn)][at(nn - 1)] * a[at(nn - 1)][at(nn)];
            if l == nn - 1 {
                let p = 0.5 * (y - x);
                let q = p * p + w;
                let mut z = q.abs().sqrt();
                x += t;
                if q >= 0.0 {
                    z = p + sign(z, p);
                    wr[at(nn - 1)] = x + z;
                    wr[at(nn)] = if z != 0.0 { x - w / z } else { x + z };
                    wi[at(nn - 1)] = 0.0;
                    wi[at(nn)] = 0.0;
                } else {
                    wr[at(nn - 1)] = x + p;
                    wr[at(nn)] = x + p;
                    wi[at(nn - 1)] = -z;
                    wi[at(nn)] = z;
                }
                nn -= 2;
                break;
            }
            if its >= 60 {
                let found: Vec<String> = ((nn + 1)..n)
                    .map(|i| format!("{}{:+}i", wr[at(i)], wi[at(i)]))
                    .collect();
                return Err(Error::Convergence(format!(
                    "QR iteration stalled; eigenvalues found so far: [{}]",
                    found.join(", ")
                )));
            }
            if its > 0 && its % 10 == 0 {
                t += x;
                for i in 0..=nn {
                    a[at(i)][at(i)] -= x;
                }
                let s = a[at(nn)][at(nn - 1)].abs() + a[at(nn - 1)][at(nn - 2)].abs();
                x = 0.75 * s;
                y = x;
                w = -0.4375 * s * s;
            }
            its += 1;
            let mut m = nn - 2;
            let (mut p, mut q, mut r);
            loop {
                let z = a[at(m)][at(m)];
                let rr = x - z;
                let ss = y - z;
                p = (rr * ss - w) / a[at(m + 1)][at(m)] + a[at(m)][at(m + 1)];
                q = a[at(m + 1)][at(m + 1)] - z - rr - ss;
                r = a[at(m + 2)][at(m + 1)];
                let s = p.abs() + q.abs() + r.abs();
                p /= s;
                q /= s;
                r /= s;
                if m == l {
                    break;
                }
                let u = a[at(m)][at(m - 1)].abs() * (q.abs() + r.abs());
                let v = p.abs()
                    * (a[at(m - 1)][at(m - 1)].abs() + z.abs() + a[at(m + 1)][at(m + 1)].abs());
                if u + v == v {
                    break;
                }
                m -= 1;
            }
            for i in (m + 2)..=nn {
                a[at(i)][at(i - 2)] = 0.0;
                if i != m + 2 {
                    a[at(i)][at(i - 3)] = 0.0;
                }
            }
            let mut k = m;
            while k <= nn - 1 {
                if k != m {
                    p = a[at(k)][at(k - 1)];
                    q = a[at(k + 1)][at(k - 1)];
                    r = if k != nn - 1 { a[at(k + 2)][at(k - 1)] } else { 0.0 };
                    x = p.abs() + q.abs() + r.abs();
                    if x != 0.0 {
                        p /= x;
                        q /= x;
                        r /= x;
                    }
                }
                let s = sign((p * p + q * q + r * r).sqrt(), p);
                if s != 0.0 {
                    if k == m {
                        if l != m {
                            a[at(k)][at(k - 1)] = -a[at(k)][at(k - 1)];
                        }
                    } else {
                        a[at(k)][at(k - 1)] = -s * x;
                    }
                    p += s;
                    x = p / s;
                    y = q / s;
                    let z = r / s;
                    q /= p;
                    r /= p;
                    for j in k..=nn {
                        let mut pp = a[at(k)][at(j)] + q * a[at(k + 1)][at(j)];
                        if k != nn - 1 {
                            pp += r * a[at(k + 2)][at(j)];
                            a[at(k + 2)][at(j)] -= pp * z;
                        }
                        a[at(k + 1)][at(j)] -= pp * y;
                        a[at(k)][at(j)] -= pp * x;
                    }
                    let mmin = if nn < k + 3 { nn } else { k + 3 };
                    for i in l..=mmin {
                        let mut pp = x * a[at(i)][at(k)] + y * a[at(i)][at(k + 1)];
                        if k != nn - 1 {
                            pp += z * a[at(i)][at(k + 2)];
                            a[at(i)][at(k + 2)] -= pp * r;
                        }
                        a[at(i)][at(k + 1)] -= pp * q;
                        a[at(i)][at(k)] -= pp;
                    }
                }
                k += 1;
            }
        }
    }
    Ok(wr.into_iter().zip(wi).map(|(r, i)| Complex64::new(r, i)).collect())
}

fn horner_with_derivative(p: &Poly, z: Complex64) -> (Complex64, Complex64) {
    let mut v = Complex64::new(0.0, 0.0);
    let mut d = Complex64::new(0.0, 0.0);
    for &c in p.coeffs.iter().rev() {
        d = d * z + v;
        v = v * z + c;
    }
    (v, d)
}

/// `|p(z)| / Σ |c_i| |z|^i`, the backward-error style residual of a root candidate.
pub fn relative_residual(p: &Poly, z: Complex64) -> f64 {
    let r = z.norm();
    let scale = p.coeffs.iter().rev().fold(0.0, |acc, c| acc * r + c.abs());
    if scale == 0.0 {
        return 0.0;
    }
    p.eval_complex(z).norm() / scale
}

fn aberth_iterate(p: &Poly, mut z: Vec<Complex64>, max_iter: usize) -> Option<Vec<Complex64>> {
    let n = z.len();
    for _ in 0..max_iter {
        let mut moved = 0.0f64;
        for i in 0..n {
            let (v, d) = horner_with_derivative(p, z[i]);
            if v.norm() == 0.0 {
                continue;
            }
            let ratio = v / d;
            let mut s = Complex64::new(0.0, 0.0);
            for j in 0..n {
                if j != i {
                    s += 1.0 / (z[i] - z[j]);
                }
            }
            let w = ratio / (1.0 - ratio * s);
            if !w.re.is_finite() || !w.im.is_finite() {
                return None;
            }
            z[i] -= w;
            moved = moved.max(w.norm() / z[i].norm().max(1e-300));
        }
        if moved < 1e-15 {
            return Some(z);
        }
    }
    let ok = z.iter().all(|&r| relative_residual(p, r) < 1e-12);
    ok.then_some(z)
}

/// Roots of `p` by the Aberth–Ehrlich simultaneous iteration.
///
/// With `start` given the iteration begins from those points (slightly perturbed so no
/// two coincide); otherwise, or if that fails, from a circle of the Cauchy radius.
pub fn aberth_roots(p: &Poly, start: Option<&[Complex64]>) -> Result<Vec<Complex64>> {
    let mut p = p.clone();
    while p.coeffs.len() > 1 && p.leading() == 0.0 {
        p.coeffs.pop();
    }
    let n = p.degree().unwrap_or(0);
    if n == 0 {
        return Ok(vec![]);
    }
    if let Some(s) = start.filter(|s| s.len() == n) {
        let init: Vec<Complex64> = s
            .iter()
            .enumerate()
            .map(|(i, &z)| {
                let eps = 1e-7 * (1.0 + i as f64 / n as f64);
                z * Complex64::new(1.0 + eps, eps) + Complex64::new(0.0, 1e-12)
            })
            .collect();
        if let Some(r) = aberth_iterate(&p, init, 500) {
            return Ok(r);
        }
    }
    let lead = p.leading().abs();
    let radius = 1.0 + p.coeffs[..n].iter().fold(0.0f64, |m, c| m.max(c.abs() / lead));
    let init = (0..n)
        .map(|k| Complex64::from_polar(radius, 2.0 * std::f64::consts::PI * (k as f64 + 0.25) / n as f64))
        .collect();
    aberth_iterate(&p, init, 5000)
        .ok_or_else(|| Error::Convergence("Aberth iteration did not converge".into()))
}

/// Largest distance, relative to `max(1, |z|)`, in a greedy nearest-neighbour pairing
/// of two multisets. Infinite if the sizes differ.
pub fn multiset_distance(a: &[Complex64], b: &[Complex64]) -> f64 {
    if a.len() != b.len() {
        return f64::INFINITY;
    }
    let mut used = vec![false; b.len()];
    let mut order: Vec<usize> = (0..a.len()).collect();
    order.sort_by(|&i, &j| b_cmp(a[i], a[j]));
    let mut worst = 0.0f64;
    for i in order {
        let (k, d) = b
            .iter()
            .enumerate()
            .filter(|(k, _)| !used[*k])
            .map(|(k, z)| (k, (a[i] - z).norm() / a[i].norm().max(1.0)))
            .min_by(|x, y| x.1.partial_cmp(&y.1).unwrap_or(Ordering::Equal))
            .unwrap();
        used[k] = true;
        worst = worst.max(d);
    }
    worst
}

fn b_cmp(x: Complex64, y: Complex64) -> Ordering {
    x.re.partial_cmp(&y.re).unwrap_or(Ordering::Equal).then(x.im.partial_cmp(&y.im).unwrap_or(Ordering::Equal))
}

/// Zeros of `V_{n,ν}` (in the squared variable), from the spectrum of `H_n`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LaurentSpectrum {
    pub eigenvalues: Vec<Complex64>,
    /// Roots of `V_{n,ν}` from the independent polynomial solver.
    pub roots: Vec<Complex64>,
    /// [`multiset_distance`] between the two.
    pub discrepancy: f64,
    /// Largest [`relative_residual`] of an eigenvalue in `V_{n,ν}`.
    pub max_residual: f64,
}

impl LaurentSpectrum {
    /// Zeros of `h_{n,ν}` in `x`: both complex square roots of every eigenvalue.
    pub fn h_zeros(&self) -> Vec<Complex64> {
        self.eigenvalues
            .iter()
            .flat_map(|z| {
                let r = z.sqrt();
                [r, -r]
            })
            .collect()
    }
}

pub fn laurent_zeros(ctx: &QContext, nu: f64, n: usize) -> Result<LaurentSpectrum> {
    let h = hessenberg(ctx, nu, n)?;
    let mut eigenvalues = hessenberg_eigenvalues(&h)?;
    eigenvalues.sort_by(|a, b| b_cmp(*a, *b));
    let v = V_poly(ctx, nu, n).poly;
    let mut roots = aberth_roots(&v, Some(&eigenvalues))?;
    roots.sort_by(|a, b| b_cmp(*a, *b));
    let discrepancy = multiset_distance(&eigenvalues, &roots);
    let max_residual = eigenvalues
        .iter()
        .map(|&z| relative_residual(&v, z))
        .fold(0.0, f64::max);
    Ok(LaurentSpectrum {
        eigenvalues,
        roots,
        discrepancy,
        max_residual,
    })
}

// ---------------------------------------------------------------------------
// Real zeros of J_ν and j_ν

/// Which function a zero table belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ZeroKind {
    /// The Hahn-Exton function `J_ν`.
    J,
    /// The companion function `j_ν`.
    Companion,
}

/// Increasing positive zeros with their sign-change brackets.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ZeroTable {
    pub kind: ZeroKind,
    pub nu: f64,
    pub zeros: Vec<Abscissa>,
    pub brackets: Vec<(Abscissa, Abscissa)>,
    pub tol: f64,
}

impl ZeroTable {
    pub fn values(&self) -> Vec<f64> {
        self.zeros.iter().map(|z| z.x).collect()
    }

    pub fn len(&self) -> usize {
        self.zeros.len()
    }

    pub fn is_empty(&self) -> bool {
        self.zeros.is_empty()
    }

    /// Number of zeros strictly below `s`.
    pub fn count_below(&self, s: f64) -> usize {
        self.zeros.iter().filter(|z| z.x < s).count()
    }
}

/// Evaluates the tabulated function (value and derivative, scaled).
pub fn eval_kind(kind: ZeroKind, p: &BesselParams, a: &Abscissa) -> Result<Scaled> {
    match kind {
        ZeroKind::J => J_scaled(p, a),
        ZeroKind::Companion => j_scaled(p, a),
    }
}

/// Proven lower bound for the first positive zero.
pub fn first_zero_lower_bound(q: f64, kind: ZeroKind, nu: f64) -> f64 {
    match kind {
        ZeroKind::J => (1.0 - q.powf(nu + 1.0)) / 2.0,
        ZeroKind::Companion => 1.0 / (1.0 + q.powf((nu + 1.0) / 2.0)),
    }
}

const GRID_RATIO: f64 = 1.05;
const CELLS_PER_ZERO: usize = 10_000;
const REFINE_DEPTH: usize = 4;

#[derive(Clone, Copy)]
struct Point {
    a: Abscissa,
    s: Scaled,
}

impl Point {
    fn sign(&self) -> f64 {
        self.s.mantissa.signum()
    }
}

struct Scanner<'a> {
    kind: ZeroKind,
    p: &'a BesselParams,
    q: f64,
    tol: f64,
}

#[derive(Clone, Copy)]
enum Stop {
    Count(usize),
    Below(f64),
}

impl<'a> Scanner<'a> {
    fn at(&self, a: Abscissa) -> Result<Point> {
        Ok(Point {
            a,
            s: eval_kind(self.kind, self.p, &a)?,
        })
    }

    /// Grid point, moved off an exact lattice point where the cell coordinate is ~0.
    fn grid(&self, x: f64) -> Result<Point> {
        let mut a = Abscissa::new(self.q, x);
        if let Some((_, t)) = a.cell {
            if t.abs() < 1e-12 {
                a = Abscissa::new(self.q, x * (1.0 + 1e-9));
            }
        }
        self.at(a)
    }

    /// Derivative of the regularized part (the `x^ν` factor removed), in mantissa units.
    fn reg_slope(&self, pt: &Point) -> f64 {
        pt.s.derivative - self.p.nu * pt.s.mantissa / pt.a.x
    }

    /// `|f|` decreasing at the left end and increasing at the right end.
    fn inward(&self, l: &Point, r: &Point) -> bool {
        l.s.mantissa * self.reg_slope(l) < 0.0 && r.s.mantissa * self.reg_slope(r) > 0.0
    }

    /// Splits `[l, r]` at lattice-cell boundaries so every piece lives in one cell
    /// (or entirely below the lattice region).
    fn pieces(&self, l: Point, r: Point) -> Result<Vec<Point>> {
        let q = self.q;
        let mut pts = vec![l];
        let lo = l.a.cell.map(|c| c.0 as i64).unwrap_or(-1);
        let hi = r.a.cell.map(|c| c.0 as i64).unwrap_or(-1);
        for n in lo..hi {
            // upper edge of cell n (or lower edge of cell 0 when n = -1)
            let b = if n < 0 {
                Abscissa::from_cell(q, 0, 1.0 - q.sqrt())
            } else {
                Abscissa::from_cell(q, n as usize, 1.0 - 1.0 / q.sqrt())
            };
            pts.push(self.at(b)?);
        }
        pts.push(r);
        Ok(pts)
    }

    /// Bisects a sign change between two points of one cell.
    fn bisect(&self, mut l: Point, mut r: Point) -> Result<(Abscissa, (Abscissa, Abscissa))> {
        let q = self.q;
        let bracket = (l.a, r.a);
        for _ in 0..1200 {
            let mid = match (l.a.cell, r.a.cell) {
                (Some((n, tl)), Some((m, tr))) if n == m => {
                    if (tl - tr).abs() <= self.tol * tl.abs().max(tr.abs()) || (tl - tr).abs() < 1e-300 {
                        break;
                    }
                    Abscissa::from_cell(q, n, 0.5 * (tl + tr))
                }
                _ => {
                    if r.a.x - l.a.x <= self.tol * l.a.x {
                        break;
                    }
                    Abscissa::new(q, 0.5 * (l.a.x + r.a.x))
                }
            };
            let m = self.at(mid)?;
            if m.s.mantissa == 0.0 {
                return Ok((mid, bracket));
            }
            if m.sign() == l.sign() {
                l = m;
            } else {
                r = m;
            }
        }
        let pick = match (l.a.cell, r.a.cell) {
            (Some((n, tl)), Some((_, tr))) => Abscissa::from_cell(q, n, 0.5 * (tl + tr)),
            _ => Abscissa::new(q, 0.5 * (l.a.x + r.a.x)),
        };
        Ok((pick, bracket))
    }

    /// All zeros in `[l, r]`, refining the cell when the endpoint data hint at a
    /// hidden pair of zeros.
    fn zeros_in(&self, l: Point, r: Point, depth: usize, out: &mut Vec<(Abscissa, (Abscissa, Abscissa))>) -> Result<()> {
        if l.s.mantissa == 0.0 {
            out.push((l.a, (l.a, l.a)));
            return Ok(());
        }
        if l.sign() != r.sign() && r.s.mantissa != 0.0 {
            let pieces = self.pieces(l, r)?;
            if pieces.len() > 2 {
                for w in pieces.windows(2) {
                    if w[0].sign() != w[1].sign() {
                        out.push(self.bisect(w[0], w[1])?);
                    }
                }
            } else {
                out.push(self.bisect(l, r)?);
            }
            return Ok(());
        }
        if r.s.mantissa == 0.0 {
            return Ok(());
        }
        if self.inward(&l, &r) {
            if depth >= REFINE_DEPTH {
                return Err(Error::Scan(format!(
                    "cell [{}, {}] looks like it holds two zeros after {depth} refinements",
                    l.a.x, r.a.x
                )));
            }
            let k = 8;
            let ratio = (r.a.x / l.a.x).powf(1.0 / k as f64);
            let mut prev = l;
            for i in 1..=k {
                let next = if i == k { r } else { self.grid(l.a.x * ratio.powi(i as i32))? };
                self.zeros_in(prev, next, depth + 1, out)?;
                prev = next;
            }
        }
        Ok(())
    }

    fn scan(&self, lower: f64, stop: Stop) -> Result<ZeroTable> {
        let mut found = Vec::new();
        let mut x = 0.25 * lower;
        let mut prev = self.grid(x)?;
        let cap = match stop {
            Stop::Count(c) => CELLS_PER_ZERO * c.max(1),
            Stop::Below(lim) => ((lim / x).ln() / GRID_RATIO.ln()).ceil().max(0.0) as usize + 2,
        };
        for _ in 0..cap {
            let done = match stop {
                Stop::Count(c) => found.len() >= c,
                Stop::Below(lim) => x >= lim,
            };
            if done {
                break;
            }
            x *= GRID_RATIO;
            let next = self.grid(x)?;
            self.zeros_in(prev, next, 0, &mut found)?;
            prev = next;
        }
        found.sort_by(|a, b| a.0.order(&b.0));
        found.dedup_by(|a, b| a.0.order(&b.0) == Ordering::Equal);
        match stop {
            Stop::Count(c) => {
                if found.len() < c {
                    return Err(Error::Scan(format!(
                        "found {} of {c} zeros within the grid cap",
                        found.len()
                    )));
                }
                found.truncate(c);
            }
            Stop::Below(lim) => found.retain(|z| z.0.x < lim),
        }
        let (zeros, brackets) = found.into_iter().unzip();
        Ok(ZeroTable {
            kind: self.kind,
            nu: self.p.nu,
            zeros,
            brackets,
            tol: self.tol,
        })
    }
}

fn raw_table(ctx: &QContext, kind: ZeroKind, nu: f64, stop: Stop) -> Result<ZeroTable> {
    if kind == ZeroKind::J && !(nu > -1.0) {
        return Err(Error::Domain(format!("zeros of J_ν need ν > -1, got {nu}")));
    }
    let p = BesselParams::new(nu, *ctx);
    let s = Scanner {
        kind,
        p: &p,
        q: ctx.q,
        tol: ctx.zero_tol,
    };
    s.scan(first_zero_lower_bound(ctx.q, kind, nu), stop)
}

/// Below this the cell coordinate of a zero is no longer resolved in double precision.
const UNRESOLVED_T: f64 = 1e-280;

fn unresolved(a: &Abscissa) -> bool {
    !is_resolved(a)
}

/// False for far zeros whose offset from the lattice point is below double precision
/// range; values there (and quantities such as weights) underflow.
pub fn is_resolved(a: &Abscissa) -> bool {
    !matches!(a.cell, Some((_, t)) if t.abs() < UNRESOLVED_T)
}

/// Checks `z_k^ν < z_k^{ν+1} < z_{k+1}^ν` on the common range of two tables.
///
/// Far zeros sit within `1e-280` (in the cell coordinate) of a lattice point; those
/// are skipped since their order is not representable.
pub fn check_interlacing(low: &ZeroTable, high: &ZeroTable) -> Result<()> {
    for (k, zh) in high.zeros.iter().enumerate() {
        let Some(zl) = low.zeros.get(k) else { break };
        if unresolved(zh) || unresolved(zl) {
            break;
        }
        if zl.order(zh) != Ordering::Less {
            return Err(Error::Scan(format!(
                "interlacing violated: zero {k} of order {} at {} is not below order {} at {}",
                low.nu, zl.x, high.nu, zh.x
            )));
        }
        if let Some(next) = low.zeros.get(k + 1).filter(|z| !unresolved(z)) {
            if zh.order(next) != Ordering::Less {
                return Err(Error::Scan(format!(
                    "interlacing violated: zero {k} of order {} at {} is not below zero {} of order {} at {}",
                    high.nu,
                    zh.x,
                    k + 1,
                    low.nu,
                    next.x
                )));
            }
        }
    }
    Ok(())
}

fn checked(ctx: &QContext, kind: ZeroKind, nu: f64, stop: Stop) -> Result<ZeroTable> {
    let table = raw_table(ctx, kind, nu, stop)?;
    let upper = raw_table(ctx, kind, nu + 1.0, stop)?;
    check_interlacing(&table, &upper)?;
    Ok(table)
}

/// First `count` positive zeros `j_k^ν` of `J_ν`, `ν > -1`, checked for interlacing
/// against order `ν + 1`.
pub fn zeros_J(ctx: &QContext, nu: f64, count: usize) -> Result<ZeroTable> {
    checked(ctx, ZeroKind::J, nu, Stop::Count(count))
}

/// First `count` positive zeros `x_k^ν` of `j_ν`, checked for interlacing.
pub fn zeros_j(ctx: &QContext, nu: f64, count: usize) -> Result<ZeroTable> {
    checked(ctx, ZeroKind::Companion, nu, Stop::Count(count))
}

/// All positive zeros below `limit`.
pub fn zeros_below(ctx: &QContext, kind: ZeroKind, nu: f64, limit: f64) -> Result<ZeroTable> {
    checked(ctx, kind, nu, Stop::Below(limit))
}

/// `M(ν,q) = -ν - 1 + 2 ln(1-q)/ln q - 1/ln q`: beyond this index `h^±_{n,ν}` has no
/// zeros on the closed outer (inner) region.
pub fn m_bound(ctx: &QContext, nu: f64) -> f64 {
    let lq = ctx.q.ln();
    -nu - 1.0 + 2.0 * (1.0 - ctx.q).ln() / lq - 1.0 / lq
}

/// `|f(z)| / (|f'(z)| z)`: the relative abscissa error implied by the value at a zero.
pub fn zero_residual(kind: ZeroKind, p: &BesselParams, z: &Abscissa) -> Result<f64> {
    let s = eval_kind(kind, p, z)?;
    Ok((s.mantissa / (s.derivative * z.x)).abs())
}
