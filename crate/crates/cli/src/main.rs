//! `qlommel`: evaluation, zero tables, Gram matrices, moments, the strong functional
//! and the identity suite from the command line.
//!
//! Exit status: 0 on success, 1 when a verification fails, 2 on usage or parameter errors.
#![allow(non_snake_case)]

mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde::Serialize;
use serde_json::{json, Value};

use qlommel::bessel::{self, BesselParams};
use qlommel::lommel;
use qlommel::moments::{self, MomentKind};
use qlommel::poly::LaurentCoeffs;
use qlommel::spectral::{self, ZeroKind};
use qlommel::verify::{self, IdentityId, SuiteConfig, Tolerances};
use qlommel::{Error, QContext};

use output::{num, Format, Meta, Report, Table};

/// Environment variable overriding the default tolerance.
const TOL_ENV: &str = "QLOMMEL_TOL";

#[derive(Parser, Debug)]
#[command(name = "qlommel", version, about = "Hahn-Exton q-Bessel functions and Laurent q-Lommel polynomials")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Evaluate a function or polynomial family at one or more points.
    Eval(EvalArgs),
    /// Zeros of J_ν or j_ν, or the complex zeros of h_{n,ν}.
    Zeros(ZerosArgs),
    /// Gram matrix of an orthogonal family.
    Gram(GramArgs),
    /// Moment sequences c_k or d_k.
    Moments(MomentsArgs),
    /// Apply the strong moment functional to a Laurent polynomial.
    Functional(FunctionalArgs),
    /// Run the identity suite.
    Verify(VerifyArgs),
    /// (x, value) grid of a family for plotting.
    Table(TableArgs),
}

#[derive(Args, Debug, Serialize)]
struct Common {
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Tolerance override (default from QLOMMEL_TOL, else the command's own default).
    #[arg(long)]
    tol: Option<f64>,
    /// Write to this file instead of standard output.
    #[arg(long, short)]
    output: Option<PathBuf>,
}

#[derive(Args, Debug, Serialize)]
struct Point {
    #[arg(long, default_value_t = 0.5, allow_negative_numbers = true)]
    q: f64,
    #[arg(long, default_value_t = 1.5, allow_negative_numbers = true)]
    nu: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
enum Family {
    #[value(name = "J")]
    #[serde(rename = "J")]
    BigJ,
    #[value(name = "j")]
    #[serde(rename = "j")]
    SmallJ,
    #[value(name = "h")]
    #[serde(rename = "h")]
    H,
    #[value(name = "p")]
    #[serde(rename = "p")]
    SmallP,
    #[value(name = "P")]
    #[serde(rename = "P")]
    BigP,
    #[value(name = "asc")]
    #[serde(rename = "asc")]
    Asc,
    #[value(name = "hermite")]
    #[serde(rename = "hermite")]
    Hermite,
    #[value(name = "chebU")]
    #[serde(rename = "chebU")]
    ChebU,
}

#[derive(Args, Debug, Serialize)]
struct EvalArgs {
    #[arg(long, value_enum)]
    family: Family,
    #[command(flatten)]
    point: Point,
    /// Degree or index (ignored by J and j).
    #[arg(long, default_value_t = 0)]
    n: i64,
    /// Evaluation points, comma separated or repeated.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true, required = true)]
    x: Vec<f64>,
    #[command(flatten)]
    asc: AscParams,
    #[command(flatten)]
    common: Common,
}

/// Parameters of the Al-Salam–Chihara family `P_n(x;q;a,b,c)`.
#[derive(Args, Debug, Serialize)]
struct AscParams {
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    a: f64,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    b: f64,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    c: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
enum ZeroFunction {
    #[value(name = "J")]
    #[serde(rename = "J")]
    BigJ,
    #[value(name = "j")]
    #[serde(rename = "j")]
    SmallJ,
    #[value(name = "laurent")]
    #[serde(rename = "laurent")]
    Laurent,
}

#[derive(Args, Debug, Serialize)]
struct ZerosArgs {
    #[arg(long, value_enum)]
    function: ZeroFunction,
    #[command(flatten)]
    point: Point,
    /// Number of positive zeros (J, j).
    #[arg(long, default_value_t = 10)]
    count: usize,
    /// Index of h_{n,ν} (laurent).
    #[arg(long, default_value_t = 8)]
    n: usize,
    #[command(flatten)]
    common: Common,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
enum GramFamily {
    #[value(name = "laurent")]
    #[serde(rename = "laurent")]
    Laurent,
    #[value(name = "p")]
    #[serde(rename = "p")]
    SmallP,
    #[value(name = "P")]
    #[serde(rename = "P")]
    BigP,
}

#[derive(Args, Debug, Serialize)]
struct GramArgs {
    #[arg(long, value_enum)]
    family: GramFamily,
    #[command(flatten)]
    point: Point,
    #[arg(long, default_value_t = 6)]
    nmax: usize,
    /// Zeros used by the discrete measures (p, P).
    #[arg(long, default_value_t = 60)]
    kzeros: usize,
    #[command(flatten)]
    common: Common,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
enum Kind {
    #[value(name = "c")]
    #[serde(rename = "c")]
    C,
    #[value(name = "d")]
    #[serde(rename = "d")]
    D,
}

#[derive(Args, Debug, Serialize)]
struct MomentsArgs {
    #[arg(long, value_enum)]
    kind: Kind,
    #[command(flatten)]
    point: Point,
    /// Largest moment index.
    #[arg(long = "K", default_value_t = 10)]
    k: usize,
    /// Ratio order n (0 gives the moments of the functional).
    #[arg(long, default_value_t = 0)]
    n: usize,
    #[command(flatten)]
    common: Common,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum Path {
    Moments,
    Residue,
}

#[derive(Args, Debug, Serialize)]
struct FunctionalArgs {
    /// Laurent polynomial as `exponent:coeff,...`, e.g. `-2:1,4:0.5`.
    #[arg(long, allow_hyphen_values = true)]
    poly: String,
    #[command(flatten)]
    point: Point,
    #[arg(long, value_enum, default_value_t = Path::Moments)]
    path: Path,
    /// Contour radius for the residue path, in (q^{1/2}, q^{-1/2}).
    #[arg(long, default_value_t = 1.0)]
    s: f64,
    /// Initial trapezoid node count.
    #[arg(long, default_value_t = 64)]
    nodes: usize,
    #[command(flatten)]
    common: Common,
}

#[derive(Args, Debug, Serialize)]
struct VerifyArgs {
    /// Restrict to these ids (repeatable or comma separated).
    #[arg(long, value_delimiter = ',')]
    id: Vec<String>,
    /// Parameter grid, e.g. `q=0.3,0.5;nu=0.5,1.5`; missing axes keep their defaults.
    #[arg(long)]
    grid: Option<String>,
    #[arg(long, default_value_t = 20)]
    degree: usize,
    /// Tolerance for limits and truncated sums.
    #[arg(long)]
    limit_tol: Option<f64>,
    #[arg(long, default_value_t = 0x5eed)]
    seed: u64,
    #[command(flatten)]
    common: Common,
}

#[derive(Args, Debug, Serialize)]
struct TableArgs {
    #[arg(long, value_enum)]
    family: Family,
    #[command(flatten)]
    point: Point,
    #[arg(long, default_value_t = 0)]
    n: i64,
    #[arg(long, default_value_t = 0.1, allow_negative_numbers = true)]
    from: f64,
    #[arg(long, default_value_t = 5.0, allow_negative_numbers = true)]
    to: f64,
    #[arg(long, default_value_t = 200)]
    points: usize,
    #[command(flatten)]
    asc: AscParams,
    #[command(flatten)]
    common: Common,
}

/// Failure of a run, mapped onto the exit status.
enum Failure {
    Usage(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

type Run<T> = std::result::Result<T, Failure>;

fn context(q: f64) -> Run<QContext> {
    Ok(QContext::new(q)?)
}

/// Tolerance from the flag, else the environment, else `default`.
fn resolve_tol(flag: Option<f64>, default: f64) -> Run<f64> {
    let tol = match flag {
        Some(t) => t,
        None => match std::env::var(TOL_ENV) {
            Ok(s) => s
                .trim()
                .parse::<f64>()
                .map_err(|_| Failure::Usage(format!("{TOL_ENV}={s:?} is not a number")))?,
            Err(_) => default,
        },
    };
    if !(tol > 0.0 && tol.is_finite()) {
        return Err(Failure::Usage(format!("tolerance must be positive, got {tol}")));
    }
    Ok(tol)
}

fn meta(command: &'static str, q: Option<f64>, nu: Option<f64>, tol: f64, args: &impl Serialize) -> Meta {
    Meta {
        command,
        q,
        nu,
        tol,
        version: env!("CARGO_PKG_VERSION"),
        params: serde_json::to_value(args).unwrap_or(Value::Null),
    }
}

fn eval_family(ctx: &QContext, nu: f64, family: Family, n: i64, asc: &AscParams, x: f64) -> Run<f64> {
    let index = |what: &str| -> Run<usize> {
        usize::try_from(n).map_err(|_| Failure::Usage(format!("{what} needs n ≥ 0, got {n}")))
    };
    Ok(match family {
        Family::BigJ => bessel::J(&BesselParams::new(nu, *ctx), x)?,
        Family::SmallJ => bessel::j(&BesselParams::new(nu, *ctx), x)?,
        Family::H => lommel::h_eval(ctx, nu, n, Complex64::new(x, 0.0))?.re,
        Family::SmallP => lommel::p_eval(ctx, nu, n, x),
        Family::BigP => lommel::P_eval(ctx, nu, n, x),
        Family::Asc => lommel::al_salam_chihara(ctx, index("asc")?, asc.a, asc.b, asc.c, x),
        Family::Hermite => lommel::q_hermite(ctx, index("hermite")?, x),
        Family::ChebU => lommel::chebyshev_U(n, x),
    })
}

fn cmd_eval(a: &EvalArgs) -> Run<Report> {
    let ctx = context(a.point.q)?;
    let tol = resolve_tol(a.common.tol, ctx.series_tol)?;
    let ctx = ctx.with_series_tol(tol)?;
    let mut table = Table::new(&["x", "value"]);
    let mut values = Vec::new();
    for &x in &a.x {
        let v = eval_family(&ctx, a.point.nu, a.family, a.n, &a.asc, x)?;
        table.push(vec![num(x), num(v)]);
        values.push(json!({ "x": x, "value": v }));
    }
    Ok(Report {
        meta: meta("eval", Some(a.point.q), Some(a.point.nu), tol, a),
        data: json!({ "family": a.family, "n": a.n, "values": values }),
        table,
        ok: true,
    })
}

fn cmd_table(a: &TableArgs) -> Run<Report> {
    if a.points < 2 {
        return Err(Failure::Usage("table needs at least 2 points".into()));
    }
    if !(a.to > a.from) {
        return Err(Failure::Usage(format!("empty range [{}, {}]", a.from, a.to)));
    }
    let ctx = context(a.point.q)?;
    let tol = resolve_tol(a.common.tol, ctx.series_tol)?;
    let ctx = ctx.with_series_tol(tol)?;
    let mut table = Table::new(&["x", "value"]);
    let mut xs = Vec::with_capacity(a.points);
    let mut vs = Vec::with_capacity(a.points);
    for i in 0..a.points {
        let x = a.from + (a.to - a.from) * i as f64 / (a.points - 1) as f64;
        let v = eval_family(&ctx, a.point.nu, a.family, a.n, &a.asc, x)?;
        table.push(vec![num(x), num(v)]);
        xs.push(x);
        vs.push(v);
    }
    Ok(Report {
        meta: meta("table", Some(a.point.q), Some(a.point.nu), tol, a),
        data: json!({ "family": a.family, "n": a.n, "x": xs, "value": vs }),
        table,
        ok: true,
    })
}

fn pair(z: Complex64) -> [f64; 2] {
    [z.re, z.im]
}

fn cmd_zeros(a: &ZerosArgs) -> Run<Report> {
    let ctx = context(a.point.q)?;
    let tol = resolve_tol(a.common.tol, ctx.zero_tol)?;
    let ctx = ctx.with_zero_tol(tol)?;
    let nu = a.point.nu;
    match a.function {
        ZeroFunction::Laurent => {
            let s = spectral::laurent_zeros(&ctx, nu, a.n)?;
            let mut table = Table::new(&["k", "eigenvalue_re", "eigenvalue_im", "root_re", "root_im"]);
            for (k, (e, r)) in s.eigenvalues.iter().zip(&s.roots).enumerate() {
                table.push(vec![k.to_string(), num(e.re), num(e.im), num(r.re), num(r.im)]);
            }
            let data = json!({
                "function": "laurent",
                "n": a.n,
                "eigenvalues": s.eigenvalues.iter().map(|&z| pair(z)).collect::<Vec<_>>(),
                "roots": s.roots.iter().map(|&z| pair(z)).collect::<Vec<_>>(),
                "h_zeros": s.h_zeros().iter().map(|&z| pair(z)).collect::<Vec<_>>(),
                "discrepancy": s.discrepancy,
                "max_residual": s.max_residual,
            });
            Ok(Report {
                meta: meta("zeros", Some(a.point.q), Some(nu), tol, a),
                data,
                table,
                ok: true,
            })
        }
        f => {
            let (kind, t) = match f {
                ZeroFunction::BigJ => (ZeroKind::J, spectral::zeros_J(&ctx, nu, a.count)?),
                _ => (ZeroKind::Companion, spectral::zeros_j(&ctx, nu, a.count)?),
            };
            let p = BesselParams::new(nu, ctx);
            let mut table = Table::new(&["k", "zero", "residual"]);
            let mut residuals = Vec::with_capacity(t.len());
            for (k, z) in t.zeros.iter().enumerate() {
                let r = spectral::zero_residual(kind, &p, z)?;
                table.push(vec![(k + 1).to_string(), num(z.x), num(r)]);
                residuals.push(r);
            }
            let data = json!({
                "function": f,
                "zeros": t.values(),
                "residuals": residuals,
                "lower_bound": spectral::first_zero_lower_bound(ctx.q, kind, nu),
                "tol": t.tol,
            });
            Ok(Report {
                meta: meta("zeros", Some(a.point.q), Some(nu), tol, a),
                data,
                table,
                ok: true,
            })
        }
    }
}

fn matrix_rows(table: &mut Table, block: &str, m: &[Vec<f64>]) {
    for (i, row) in m.iter().enumerate() {
        for (j, v) in row.iter().enumerate() {
            table.push(vec![block.to_string(), i.to_string(), j.to_string(), num(*v)]);
        }
    }
}

fn cmd_gram(a: &GramArgs) -> Run<Report> {
    let ctx = context(a.point.q)?;
    let tol = resolve_tol(a.common.tol, moments::GRAM_TOLERANCE)?;
    let nu = a.point.nu;
    let mut table = Table::new(&["block", "i", "j", "value"]);
    let (data, worst) = match a.family {
        GramFamily::Laurent => {
            let g = moments::gram_laurent(&ctx, nu, a.nmax)?;
            matrix_rows(&mut table, "plus", &g.plus);
            matrix_rows(&mut table, "minus", &g.minus);
            let targets: Vec<f64> = (0..=a.nmax).map(|m| 1.0 / (1.0 - ctx.q.powf(nu + m as f64))).collect();
            let worst = g.max_off_diagonal.max(g.plus_diagonal_error).max(g.minus_diagonal_error);
            (json!({ "family": "laurent", "gram": g, "plus_targets": targets }), worst)
        }
        f => {
            let g = if f == GramFamily::SmallP {
                moments::gram_p(&ctx, nu, a.nmax, a.kzeros)?
            } else {
                moments::gram_P(&ctx, nu, a.nmax, a.kzeros)?
            };
            matrix_rows(&mut table, "matrix", &g.matrix);
            let worst = g.max_off_diagonal.max(g.max_diagonal_error);
            (json!({ "family": f, "gram": g }), worst)
        }
    };
    let ok = worst <= tol;
    if a.common.format == Format::Csv {
        eprintln!("max deviation from the orthogonality relations: {worst:e} (tol {tol:e})");
    }
    let mut data = data;
    data["within_tol"] = json!(ok);
    Ok(Report {
        meta: meta("gram", Some(a.point.q), Some(nu), tol, a),
        data,
        table,
        ok,
    })
}

fn cmd_moments(a: &MomentsArgs) -> Run<Report> {
    let ctx = context(a.point.q)?;
    let tol = resolve_tol(a.common.tol, ctx.series_tol)?;
    let ctx = ctx.with_series_tol(tol)?;
    let t = match a.kind {
        Kind::C => moments::c_moments(&ctx, a.point.nu, a.n, a.k)?,
        Kind::D => moments::d_moments(&ctx, a.point.nu, a.n, a.k),
    };
    let mut table = Table::new(&["k", "value"]);
    for (k, v) in t.values.iter().enumerate() {
        table.push(vec![k.to_string(), num(*v)]);
    }
    let kind = match t.kind {
        MomentKind::C => "c",
        MomentKind::D => "d",
    };
    Ok(Report {
        meta: meta("moments", Some(a.point.q), Some(a.point.nu), tol, a),
        data: json!({ "kind": kind, "n": t.n, "values": t.values }),
        table,
        ok: true,
    })
}

fn cmd_functional(a: &FunctionalArgs) -> Run<Report> {
    let ctx = context(a.point.q)?;
    let tol = resolve_tol(a.common.tol, ctx.series_tol)?;
    let ctx = ctx.with_series_tol(tol)?;
    let poly = LaurentCoeffs::parse(&a.poly)?;
    let nu = a.point.nu;
    let mut table = Table::new(&["path", "value", "moment_value", "s", "N", "M", "contour", "contour_imag"]);
    let data = match a.path {
        Path::Moments => {
            let v = moments::L_apply(&ctx, nu, &poly)?;
            table.push(vec!["moments".into(), num(v), num(v), String::new(), String::new(), String::new(), String::new(), String::new()]);
            json!({ "path": "moments", "value": v, "poly": poly })
        }
        Path::Residue => {
            let r = moments::L_residue(&ctx, nu, &poly, a.s, a.nodes)?;
            let v = r.residue_value.unwrap_or(f64::NAN);
            let opt = |x: Option<f64>| x.map(num).unwrap_or_default();
            table.push(vec![
                "residue".into(),
                num(v),
                num(r.moment_value),
                num(a.s),
                r.N().to_string(),
                r.M().to_string(),
                opt(r.contour_value),
                opt(r.contour_imag),
            ]);
            json!({ "path": "residue", "value": v, "N": r.N(), "M": r.M(), "report": r })
        }
    };
    Ok(Report {
        meta: meta("functional", Some(a.point.q), Some(nu), tol, a),
        data,
        table,
        ok: true,
    })
}

/// Parses `q=0.3,0.5;nu=0.5,1` into the two axes.
fn parse_grid(text: &str, config: &mut SuiteConfig) -> Run<()> {
    for part in text.split(';').map(str::trim).filter(|s| !s.is_empty()) {
        let (key, list) = part
            .split_once('=')
            .ok_or_else(|| Failure::Usage(format!("grid axis {part:?} lacks '='")))?;
        let values = list
            .split(',')
            .map(str::trim)
            .filter(|s| !s.is_empty())
            .map(|s| s.parse::<f64>().map_err(|_| Failure::Usage(format!("bad grid value {s:?}"))))
            .collect::<Run<Vec<f64>>>()?;
        match key.trim() {
            "q" => config.qs = values,
            "nu" | "ν" => config.nus = values,
            other => return Err(Failure::Usage(format!("unknown grid axis {other:?}"))),
        }
    }
    Ok(())
}

fn cmd_verify(a: &VerifyArgs) -> Run<Report> {
    let algebraic = resolve_tol(a.common.tol, verify::ALGEBRAIC_TOL)?;
    let limit = match a.limit_tol {
        Some(t) if t > 0.0 && t.is_finite() => t,
        Some(t) => return Err(Failure::Usage(format!("tolerance must be positive, got {t}"))),
        None => verify::LIMIT_TOL,
    };
    let mut config = SuiteConfig {
        degree: a.degree,
        seed: a.seed,
        tolerances: Tolerances { algebraic, limit },
        ..SuiteConfig::default()
    };
    if let Some(g) = &a.grid {
        parse_grid(g, &mut config)?;
    }
    if !a.id.is_empty() {
        let ids = a
            .id
            .iter()
            .map(|s| s.parse::<IdentityId>())
            .collect::<qlommel::Result<Vec<_>>>()?;
        config.ids = Some(ids);
    }
    for &q in &config.qs {
        context(q)?;
    }
    let base = context(config.qs.first().copied().unwrap_or(0.5))?;
    let report = verify::run_suite(&base, &config)?;
    let mut table = Table::new(&["id", "kind", "max_residual", "tolerance", "cases", "passed"]);
    for e in &report.entries {
        table.push(vec![
            e.id.tag().to_string(),
            format!("{:?}", e.kind).to_lowercase(),
            num(e.max_residual),
            num(e.tolerance),
            e.cases.to_string(),
            e.passed.to_string(),
        ]);
        for f in &e.failures {
            eprintln!("{}: {f}", e.id);
        }
    }
    Ok(Report {
        meta: meta("verify", None, None, algebraic, a),
        data: json!({ "grid": { "q": config.qs, "nu": config.nus, "degree": config.degree, "limit_tol": limit }, "report": report }),
        table,
        ok: report.all_passed,
    })
}

fn common_of(cmd: &Command) -> &Common {
    match cmd {
        Command::Eval(a) => &a.common,
        Command::Zeros(a) => &a.common,
        Command::Gram(a) => &a.common,
        Command::Moments(a) => &a.common,
        Command::Functional(a) => &a.common,
        Command::Verify(a) => &a.common,
        Command::Table(a) => &a.common,
    }
}

fn run(cli: &Cli) -> Run<Report> {
    match &cli.command {
        Command::Eval(a) => cmd_eval(a),
        Command::Zeros(a) => cmd_zeros(a),
        Command::Gram(a) => cmd_gram(a),
        Command::Moments(a) => cmd_moments(a),
        Command::Functional(a) => cmd_functional(a),
        Command::Verify(a) => cmd_verify(a),
        Command::Table(a) => cmd_table(a),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let common = common_of(&cli.command);
    match run(&cli) {
        Ok(report) => {
            let text = output::render(&report, common.format);
            if let Err(e) = output::emit(&text, common.output.as_deref()) {
                eprintln!("error: cannot write output: {e}");
                return ExitCode::from(2);
            }
            if report.ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
