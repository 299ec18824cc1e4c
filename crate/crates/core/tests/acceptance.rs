//! Acceptance checks, one PASS/FAIL line per criterion.
//!
//! Runs without the libtest harness so the report is always printed; the process
//! exits with status 1 if any criterion fails.

use std::process::ExitCode;
use std::time::Instant;

use num_complex::Complex64;

use qlommel::lommel::V_poly;
use qlommel::moments::{gram_P, gram_laurent, gram_p, stieltjes_check, L_apply, L_residue};
use qlommel::poly::LaurentCoeffs;
use qlommel::spectral::{
    aberth_roots, check_interlacing, first_zero_lower_bound, hessenberg, hessenberg_eigenvalues, m_bound,
    multiset_distance, zeros_J, zeros_j, ZeroKind,
};
use qlommel::verify::{check_identity, run_suite, IdentityId, IdentityParams, SuiteConfig};
use qlommel::{QContext, Result};

const GRAM_LAURENT_TOL: f64 = 1e-9;
const GRAM_DISCRETE_TOL: f64 = 1e-7;
const SPECTRUM_TOL: f64 = 1e-8;
const RESIDUE_TOL: f64 = 1e-8;
const HURWITZ_TOL: f64 = 1e-8;
const STIELTJES_TOL: f64 = 1e-8;

fn ctx(q: f64) -> QContext {
    QContext::new(q).expect("valid q")
}

/// Outcome of one criterion: pass flag plus a one-line summary.
struct Outcome {
    passed: bool,
    detail: String,
}

impl Outcome {
    fn new(passed: bool, detail: impl Into<String>) -> Self {
        Outcome { passed, detail: detail.into() }
    }
}

fn c1_laurent_gram() -> Result<Outcome> {
    let (q, nu) = (0.5, 1.5);
    let g = gram_laurent(&ctx(q), nu, 8)?;
    let mut diag = 0f64;
    let mut off = 0f64;
    for m in 0..=8 {
        for n in 0..=8 {
            if m == n {
                let want = 1.0 / (1.0 - q.powf(nu + m as f64));
                diag = diag.max((g.plus[m][m] - want).abs() / want);
                diag = diag.max((g.minus[m][m] + 1.0).abs());
            } else {
                off = off.max(g.plus[m][n].abs()).max(g.minus[m][n].abs());
            }
        }
    }
    Ok(Outcome::new(
        diag < GRAM_LAURENT_TOL && off < GRAM_LAURENT_TOL,
        format!("diag err {diag:.2e}, off-diag {off:.2e} (tol {GRAM_LAURENT_TOL:.0e})"),
    ))
}

/// Worst deviation of a Gram matrix from `diag(targets)`: relative on the diagonal,
/// `|G_nm| / sqrt(G_nn G_mm)` off it.
fn gram_error(matrix: &[Vec<f64>], targets: &[f64]) -> f64 {
    let mut err = 0f64;
    for (n, row) in matrix.iter().enumerate() {
        for (m, v) in row.iter().enumerate() {
            err = err.max(if n == m {
                (v - targets[n]).abs() / targets[n]
            } else {
                v.abs() / (matrix[n][n] * matrix[m][m]).sqrt()
            });
        }
    }
    err
}

/// Every weight is non-negative and the leading ones are strictly positive; weights
/// below the double range come back as zero.
fn weights_positive(masses: &[qlommel::moments::Mass]) -> (bool, usize) {
    let underflowed = masses.iter().filter(|m| m.weight == 0.0).count();
    let ok = masses.iter().all(|m| m.weight >= 0.0) && masses.iter().take(10).all(|m| m.weight > 0.0);
    (ok, underflowed)
}

fn c2_gram_p() -> Result<Outcome> {
    let (q, nu) = (0.5, 1.5);
    let g = gram_p(&ctx(q), nu, 8, 60)?;
    let targets: Vec<f64> = (0..=8)
        .map(|n| {
            let e = n as f64 + nu;
            q.powf(e * ((n + 1) / 2) as f64) / (1.0 - q.powf(e))
        })
        .collect();
    let err = gram_error(&g.matrix, &targets);
    let (positive, underflowed) = weights_positive(&g.masses);
    let ok = err < GRAM_DISCRETE_TOL && positive && g.mass_at_zero == 1.0;
    Ok(Outcome::new(
        ok,
        format!(
            "max err {err:.2e} (tol {GRAM_DISCRETE_TOL:.0e}), {} masses ({underflowed} below the double range), \
             weights positive: {positive}",
            g.masses.len()
        ),
    ))
}

fn c3_gram_big_p() -> Result<Outcome> {
    let q = 0.5;
    let mut ok = true;
    let mut parts = Vec::new();
    for nu in [0.5, 2.0] {
        let g = gram_P(&ctx(q), nu, 8, 60)?;
        let targets: Vec<f64> = (0..=8)
            .map(|n| {
                let l = (n / 2) as f64;
                if n % 2 == 0 {
                    q.powf(l * (l + nu))
                } else {
                    q.powf((l + 1.0) * (l + nu))
                }
            })
            .collect();
        let err = gram_error(&g.matrix, &targets);
        let zero_mass = if nu > 1.0 { 1.0 - q.powf(nu - 1.0) } else { 0.0 };
        let mass_ok = (g.mass_at_zero - zero_mass).abs() < 1e-15 && (g.mass_at_zero > 0.0) == (nu > 1.0);
        let (positive, _) = weights_positive(&g.masses);
        ok &= err < GRAM_DISCRETE_TOL && mass_ok && positive;
        parts.push(format!("ν={nu}: err {err:.2e}, mass at 0 {:.3}", g.mass_at_zero));
    }
    Ok(Outcome::new(ok, format!("{} (tol {GRAM_DISCRETE_TOL:.0e})", parts.join("; "))))
}

fn c4_hessenberg() -> Result<Outcome> {
    let mut worst = 0f64;
    for (q, nu) in [(0.3, 0.5), (0.6, 2.5)] {
        let k = ctx(q);
        for n in 1..=20 {
            let eig = hessenberg_eigenvalues(&hessenberg(&k, nu, n)?)?;
            let roots = aberth_roots(&V_poly(&k, nu, n).poly, None)?;
            worst = worst.max(multiset_distance(&eig, &roots));
        }
    }
    Ok(Outcome::new(
        worst < SPECTRUM_TOL,
        format!("max multiset distance {worst:.2e} over n ≤ 20, (q,ν) ∈ {{(0.3,0.5),(0.6,2.5)}} (tol {SPECTRUM_TOL:.0e})"),
    ))
}

fn c5_residue() -> Result<Outcome> {
    let q = 0.5;
    let k = ctx(q);
    let mut worst = 0f64;
    let mut discrete_seen = false;
    let mut pure_contour = true;
    // small ν puts zeros inside the contour; at ν = 3 the index bound is negative and
    // the unit circle encloses no zeros
    let (small, large) = (0.3, 3.0);
    let large_bound = m_bound(&k, large);
    for nu in [small, 1.5, large] {
        for s in [0.8, 1.0, 1.25] {
            for e in -16..=16 {
                let p = LaurentCoeffs::monomial(e, 1.0);
                let r = L_residue(&k, nu, &p, s, 64)?;
                let want = L_apply(&k, nu, &p)?;
                let got = r.residue_value.expect("residue path ran");
                worst = worst.max((got - want).abs() / want.abs().max(1.0));
                if nu == small && r.N() + r.M() > 0 {
                    discrete_seen = true;
                }
                if nu == large && s == 1.0 && r.N() + r.M() > 0 {
                    pure_contour = false;
                }
            }
        }
    }
    Ok(Outcome::new(
        worst < RESIDUE_TOL && discrete_seen && pure_contour && large_bound < 0.0,
        format!(
            "max rel err {worst:.2e} (tol {RESIDUE_TOL:.0e}); ν={small} has discrete parts: {discrete_seen}; \
             ν={large} M={large_bound:.3}, pure contour at s=1: {pure_contour}"
        ),
    ))
}

fn c6_suite() -> Result<Outcome> {
    let report = run_suite(&ctx(0.5), &SuiteConfig::default())?;
    let failed: Vec<_> = report.entries.iter().filter(|e| !e.passed).map(|e| e.id.tag()).collect();
    let worst = report
        .entries
        .iter()
        .map(|e| e.max_residual / e.tolerance)
        .fold(0f64, f64::max);
    Ok(Outcome::new(
        report.all_passed,
        format!(
            "{} ids, worst residual/tolerance {worst:.2e}, failed: {:?}",
            report.entries.len(),
            failed
        ),
    ))
}

fn c7_hurwitz() -> Result<Outcome> {
    let k = ctx(0.5);
    let mut ok = true;
    let mut parts = Vec::new();
    for (id, r) in [
        (IdentityId::HurwitzOut, 2.0),
        (IdentityId::HurwitzIn, 0.5),
        (IdentityId::LimP, 0.8),
        (IdentityId::LimP1, 0.8),
    ] {
        let mut worst40 = 0f64;
        for (i, nu) in [0.5, 1.5].into_iter().enumerate() {
            let x = Complex64::from_polar(r, 0.3 + 1.1 * i as f64);
            let case = check_identity(&k, id, &IdentityParams::new(nu).at(x))?;
            let first = case.ladder[0].residual;
            let last = case.ladder[case.ladder.len() - 1];
            ok &= last.residual < HURWITZ_TOL && last.residual <= first;
            if let Some(step) = case.ladder.iter().find(|s| s.index == 40) {
                worst40 = worst40.max(step.residual);
            }
            if i == 0 {
                parts.push(format!(
                    "{} ladder {:?}: {:.1e}→{:.1e}",
                    id.tag(),
                    case.ladder.iter().map(|s| s.index).collect::<Vec<_>>(),
                    first,
                    last.residual
                ));
            }
        }
        parts.push(format!("(index 40: {worst40:.1e})"));
    }
    Ok(Outcome::new(ok, format!("{} (tol {HURWITZ_TOL:.0e})", parts.join(" "))))
}

fn c8_zero_bounds() -> Result<Outcome> {
    let mut ok = true;
    let mut slack = f64::INFINITY;
    for q in [0.3, 0.7] {
        let k = ctx(q);
        for nu in [0.0, 1.0, 2.0] {
            let tj = zeros_J(&k, nu, 5)?;
            let tx = zeros_j(&k, nu, 5)?;
            let bj = first_zero_lower_bound(q, ZeroKind::J, nu);
            let bx = first_zero_lower_bound(q, ZeroKind::Companion, nu);
            ok &= tj.zeros[0].x >= bj && tx.zeros[0].x >= bx;
            slack = slack.min(tj.zeros[0].x - bj).min(tx.zeros[0].x - bx);
            ok &= check_interlacing(&tj, &zeros_J(&k, nu + 1.0, 5)?).is_ok();
            ok &= check_interlacing(&tx, &zeros_j(&k, nu + 1.0, 5)?).is_ok();
        }
    }
    Ok(Outcome::new(ok, format!("smallest margin above the bounds {slack:.3e}; interlacing of 5 zeros checked")))
}

fn c9_perturbation() -> Result<Outcome> {
    let mut ok = true;
    let mut parts = Vec::new();
    for (q, nu) in [(0.5, 1.0), (0.3, 0.5), (0.7, 2.5)] {
        let k = ctx(q);
        let circle = check_identity(&k, IdentityId::BoundCircle, &IdentityParams::new(nu).with_degree(20))?;
        let minimal = check_identity(&k, IdentityId::BoundMin, &IdentityParams::new(nu).with_degree(20))?;
        ok &= circle.passed && minimal.passed;
        parts.push(format!("q={q},ν={nu}: excess {:.0e}/{:.0e}", circle.residual, minimal.residual));
    }
    let k = ctx(0.5);
    let zf = check_identity(&k, IdentityId::ZeroFree, &IdentityParams::new(1.0))?;
    ok &= zf.passed;
    parts.push(format!("ZEROFREE from n={} flips {}", m_bound(&k, 1.0).ceil().max(0.0), zf.residual));
    Ok(Outcome::new(ok, parts.join("; ")))
}

fn c10_stieltjes() -> Result<Outcome> {
    let k = ctx(0.5);
    let mut worst = 0f64;
    for z in [Complex64::new(2.0, 0.0), Complex64::new(3.0, 1.0)] {
        let (ratio, target) = stieltjes_check(&k, 1.0, 40, z)?;
        worst = worst.max((ratio - target).norm());
    }
    Ok(Outcome::new(
        worst < STIELTJES_TOL,
        format!("max |P¹₃₉/P₄₀ − target| {worst:.2e} at z ∈ {{2, 3+i}} (tol {STIELTJES_TOL:.0e})"),
    ))
}

fn main() -> ExitCode {
    type Check = fn() -> Result<Outcome>;
    let criteria: [(&str, Check); 10] = [
        ("Laurent orthogonality", c1_laurent_gram),
        ("discrete orthogonality, p family", c2_gram_p),
        ("discrete orthogonality, P family", c3_gram_big_p),
        ("Hessenberg spectrum", c4_hessenberg),
        ("residue functional", c5_residue),
        ("identity suite", c6_suite),
        ("Hurwitz limits", c7_hurwitz),
        ("zero bounds and interlacing", c8_zero_bounds),
        ("perturbation bounds", c9_perturbation),
        ("Stieltjes transform", c10_stieltjes),
    ];
    let mut failures = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = check().unwrap_or_else(|e| Outcome::new(false, format!("error: {e}")));
        let secs = start.elapsed().as_secs_f64();
        let tag = if outcome.passed { "PASS" } else { "FAIL" };
        println!("criterion {:>2} {tag} {name} [{secs:.1}s]: {}", i + 1, outcome.detail);
        if !outcome.passed {
            failures += 1;
        }
    }
    println!("acceptance: {} of {} criteria passed", criteria.len() - failures, criteria.len());
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
