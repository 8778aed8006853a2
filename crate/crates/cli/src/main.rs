//! Command-line front end: ingest a JSON set descriptor, dispatch one
//! computation, emit JSON/CSV artifacts.
//!
//! Exit codes: 0 success, 1 input error, 2 numerical-inconsistency error,
//! 3 verification-suite failure. Errors print as single-line JSON on
//! stderr. Identical config and input produce bit-identical artifacts
//! regardless of thread count; `BERNSTEIN_LAB_THREADS` caps parallelism.

mod output;

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use rayon::prelude::*;
use serde_json::json;

use bernstein_lab_core as core;
use bernstein_lab_core::{ErrorKind, PointLocation, RealCompactSet, Tolerances};
use output::{to_csv_string, to_json_string};

#[derive(Parser)]
#[command(
    name = "bernstein-lab",
    about = "Equilibrium measures, Green's functions and Bernstein factors on unions of real intervals",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Args)]
struct CommonOpts {
    /// Path to the JSON set descriptor {"intervals": [[a,b], ...]}.
    #[arg(long, value_name = "PATH")]
    set: PathBuf,
    /// Write the artifact here instead of stdout.
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
    /// Equilibrium mass tolerance override (default 1e-8).
    #[arg(long, value_name = "TOL")]
    tol_mass: Option<f64>,
    /// Robin cross-check spread tolerance override (default 1e-7).
    #[arg(long, value_name = "TOL")]
    tol_robin: Option<f64>,
    /// Three-route h spread tolerance override (default 1e-3).
    #[arg(long, value_name = "TOL")]
    tol_h: Option<f64>,
}

#[derive(Subcommand)]
enum Command {
    /// Logarithmic capacity and Robin constant of the set.
    Capacity {
        #[command(flatten)]
        common: CommonOpts,
    },
    /// Equilibrium density over a per-interval Chebyshev grid.
    /// CSV schema: header `x,omega`, one row per grid point.
    Density {
        #[command(flatten)]
        common: CommonOpts,
        /// Grid points per interval (default 512).
        #[arg(long, default_value_t = 512)]
        grid: usize,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
    },
    /// Green's function over a rectangular grid covering the hull.
    /// CSV schema: header `re_z,im_z,g`, rows ordered by im_z then re_z.
    Green {
        #[command(flatten)]
        common: CommonOpts,
        /// Grid resolution per direction (default 64).
        #[arg(long, default_value_t = 64)]
        grid: usize,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
    },
    /// The singular integral of the Green's function against 1/(x-x0)^2.
    Lemma3 {
        #[command(flatten)]
        common: CommonOpts,
        #[arg(long)]
        x0: f64,
    },
    /// Comb-map values along the vertical ray above x0.
    /// CSV schema: header `y,re_f,im_f,re_quotient`.
    Comb {
        #[command(flatten)]
        common: CommonOpts,
        #[arg(long)]
        x0: f64,
        /// Number of ladder levels between 1e-6 and 1e-1 (default 25).
        #[arg(long, default_value_t = 25)]
        grid: usize,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
    },
    /// Bernstein factor h(x0,E) by three routes plus the dilation table
    /// and the Lipschitz verdict, as JSON.
    Bernstein {
        #[command(flatten)]
        common: CommonOpts,
        #[arg(long)]
        x0: f64,
        /// Comma-separated decreasing dilation radii; default scales
        /// {0.4,0.2,0.1,0.05} by the smallest component half-width.
        #[arg(long, value_name = "CSV-REALS")]
        delta_seq: Option<String>,
    },
    /// Near-extremal polynomial for max p'(x0) under |p| <= 1 on E.
    Extremal {
        #[command(flatten)]
        common: CommonOpts,
        #[arg(long)]
        x0: f64,
        /// Polynomial degree.
        #[arg(long)]
        n: usize,
        /// Grid nodes per interval for the LP (default 8n+1, at least 65).
        #[arg(long)]
        grid: Option<usize>,
        /// Optional CSV dump of (x, p(x)) over a plotting grid.
        #[arg(long, value_name = "PATH")]
        dump_poly: Option<PathBuf>,
        /// Optional dump of the Chebyshev coefficients, one per line.
        #[arg(long, value_name = "PATH")]
        dump_coeffs: Option<PathBuf>,
    },
    /// Run every module invariant and print a pass/fail table.
    Verify {
        #[command(flatten)]
        common: CommonOpts,
        /// Probe point (default: midpoint of every component).
        #[arg(long)]
        x0: Option<f64>,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
}

struct Failure {
    message: String,
    code: u8,
}

impl From<core::Error> for Failure {
    fn from(err: core::Error) -> Self {
        let code = match err.kind() {
            ErrorKind::Input => 1,
            ErrorKind::Numerical => 2,
        };
        Failure { message: err.to_string(), code }
    }
}

fn input_failure(message: impl Into<String>) -> Failure {
    Failure { message: message.into(), code: 1 }
}

fn main() -> ExitCode {
    if let Ok(threads) = std::env::var("BERNSTEIN_LAB_THREADS") {
        if let Ok(n) = threads.trim().parse::<usize>() {
            let _ = rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global();
        }
    }
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            // clap renders its own message; usage problems are input errors.
            let _ = err.print();
            return ExitCode::from(if err.use_stderr() { 1 } else { 0 });
        }
    };
    match run(cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(failure) => {
            let kind = if failure.code == 1 { "input" } else { "numerical" };
            eprintln!(
                "{}",
                to_json_string(&json!({"error": failure.message, "kind": kind}))
            );
            ExitCode::from(failure.code)
        }
    }
}

fn load_set(common: &CommonOpts) -> Result<RealCompactSet, Failure> {
    let text = fs::read_to_string(&common.set)
        .map_err(|e| input_failure(format!("cannot read {}: {e}", common.set.display())))?;
    Ok(RealCompactSet::parse(&text)?)
}

fn tolerances(common: &CommonOpts) -> Tolerances {
    let mut tol = Tolerances::default();
    if let Some(m) = common.tol_mass {
        tol.mass = m;
    }
    if let Some(r) = common.tol_robin {
        tol.robin = r;
    }
    if let Some(h) = common.tol_h {
        tol.h_spread = h;
    }
    tol
}

fn require_membership(set: &RealCompactSet, x0: f64) -> Result<(), Failure> {
    if !set.contains(x0) {
        return Err(input_failure(format!("x0 = {x0} does not belong to the set")));
    }
    Ok(())
}

fn emit(common: &CommonOpts, artifact: String) -> Result<(), Failure> {
    match &common.out {
        Some(path) => fs::write(path, artifact)
            .map_err(|e| input_failure(format!("cannot write {}: {e}", path.display()))),
        None => {
            println!("{artifact}");
            Ok(())
        }
    }
}

fn default_deltas(set: &RealCompactSet) -> Vec<f64> {
    let min_half = set
        .intervals()
        .iter()
        .map(|iv| iv.half_width())
        .fold(f64::INFINITY, f64::min);
    [0.4, 0.2, 0.1, 0.05].iter().map(|d| d * min_half).collect()
}

fn parse_delta_seq(text: &str) -> Result<Vec<f64>, Failure> {
    let deltas: Result<Vec<f64>, _> =
        text.split(',').map(|s| s.trim().parse::<f64>()).collect();
    let deltas = deltas.map_err(|e| input_failure(format!("bad --delta-seq: {e}")))?;
    if deltas.is_empty() || deltas.iter().any(|d| *d <= 0.0) {
        return Err(input_failure("--delta-seq needs positive reals"));
    }
    Ok(deltas)
}

fn run(command: Command) -> Result<u8, Failure> {
    match command {
        Command::Capacity { common } => {
            let set = load_set(&common)?;
            let eq = core::solve_gap_polynomial(&set)?;
            let green = core::build_green(&eq)?;
            let tol = tolerances(&common);
            if green.robin_crosscheck_spread() > tol.robin {
                return Err(core::Error::RobinInconsistent {
                    spread: green.robin_crosscheck_spread(),
                    tolerance: tol.robin,
                }
                .into());
            }
            emit(
                &common,
                to_json_string(&json!({
                    "capacity": green.capacity(),
                    "robin": green.robin(),
                    "robin_spread": green.robin_crosscheck_spread(),
                })),
            )?;
            Ok(0)
        }
        Command::Density { common, grid, format } => {
            let set = load_set(&common)?;
            let eq = core::solve_gap_polynomial(&set)?;
            let mut rows: Vec<Vec<f64>> = Vec::new();
            for iv in set.intervals() {
                let (mid, half) = (iv.midpoint(), iv.half_width());
                for j in 0..grid {
                    // Open Chebyshev grid: the density diverges at endpoints.
                    let theta = (2.0 * j as f64 + 1.0) * std::f64::consts::PI
                        / (2.0 * grid as f64);
                    let x = mid - half * theta.cos();
                    rows.push(vec![x, eq.density(x)?]);
                }
            }
            let artifact = match format {
                Format::Csv => to_csv_string(&["x", "omega"], &rows),
                Format::Json => to_json_string(&json!({
                    "points": rows.iter().map(|r| json!([r[0], r[1]])).collect::<Vec<_>>(),
                })),
            };
            emit(&common, artifact)?;
            Ok(0)
        }
        Command::Green { common, grid, format } => {
            let set = load_set(&common)?;
            let eq = core::solve_gap_polynomial(&set)?;
            let green = core::build_green(&eq)?;
            let n = grid.max(2);
            let hull = set.hull();
            let len = hull.length();
            let (x_lo, x_hi) = (hull.left - 0.5 * len, hull.right + 0.5 * len);
            let rows: Vec<Vec<f64>> = (0..n)
                .into_par_iter()
                .flat_map_iter(|iy| {
                    let y = len * iy as f64 / (n - 1) as f64;
                    let green = &green;
                    (0..n).map(move |ix| {
                        let x = x_lo + (x_hi - x_lo) * ix as f64 / (n - 1) as f64;
                        vec![x, y, green.green_value(Complex64::new(x, y))]
                    })
                })
                .collect();
            let artifact = match format {
                Format::Csv => to_csv_string(&["re_z", "im_z", "g"], &rows),
                Format::Json => to_json_string(&json!({
                    "points": rows
                        .iter()
                        .map(|r| json!([r[0], r[1], r[2]]))
                        .collect::<Vec<_>>(),
                })),
            };
            emit(&common, artifact)?;
            Ok(0)
        }
        Command::Lemma3 { common, x0 } => {
            let set = load_set(&common)?;
            require_membership(&set, x0)?;
            if set.classify_point(x0).location == PointLocation::Endpoint {
                eprintln!(
                    "{}",
                    to_json_string(&json!({
                        "warning": "x0 is an interval endpoint: the integral diverges there",
                    }))
                );
            }
            let eq = core::solve_gap_polynomial(&set)?;
            let green = core::build_green(&eq)?;
            let r = green.lemma3_integral(x0)?;
            emit(
                &common,
                to_json_string(&json!({
                    "value": r.value,
                    "error_estimate": r.error_estimate,
                    "nodes": r.nodes_used,
                })),
            )?;
            Ok(0)
        }
        Command::Comb { common, x0, grid, format } => {
            let set = load_set(&common)?;
            require_membership(&set, x0)?;
            let eq = core::solve_gap_polynomial(&set)?;
            let green = core::build_green(&eq)?;
            let w0 = core::base_point(&eq, x0)?;
            let levels = grid.max(2);
            let (y_min, y_max) = (1e-6f64, 1e-1f64);
            let ratio = (y_max / y_min).powf(1.0 / (levels - 1) as f64);
            let mut rows = Vec::with_capacity(levels);
            for k in 0..levels {
                let y = y_max / ratio.powi(k as i32);
                let w = core::comb_value(&green, Complex64::new(x0, y))?.w;
                let quotient = (w - w0) / Complex64::new(0.0, y);
                rows.push(vec![y, w.re, w.im, quotient.re]);
            }
            let artifact = match format {
                Format::Csv => to_csv_string(&["y", "re_f", "im_f", "re_quotient"], &rows),
                Format::Json => to_json_string(&json!({
                    "w0": w0,
                    "rows": rows
                        .iter()
                        .map(|r| json!([r[0], r[1], r[2], r[3]]))
                        .collect::<Vec<_>>(),
                })),
            };
            emit(&common, artifact)?;
            Ok(0)
        }
        Command::Bernstein { common, x0, delta_seq } => {
            let set = load_set(&common)?;
            require_membership(&set, x0)?;
            let deltas = match &delta_seq {
                Some(text) => parse_delta_seq(text)?,
                None => default_deltas(&set),
            };
            let tol = tolerances(&common);
            let report = core::bernstein_report(&set, x0, &deltas)?;
            if report.consistency_spread > tol.h_spread {
                return Err(Failure {
                    message: format!(
                        "three-route spread {} exceeds tolerance {}",
                        report.consistency_spread, tol.h_spread
                    ),
                    code: 2,
                });
            }
            emit(
                &common,
                to_json_string(&json!({
                    "x0": report.x0,
                    "h_normal": report.h_normal,
                    "h_density": report.h_density,
                    "h_comb": report.h_comb,
                    "spread": report.consistency_spread,
                    "delta_table": report
                        .delta_table
                        .iter()
                        .map(|(d, h)| json!([d, h]))
                        .collect::<Vec<_>>(),
                    "lipschitz": {
                        "verdict": report.lipschitz.verdict.as_str(),
                        "exponent_estimate": report.lipschitz.exponent_estimate,
                        "ratios": report
                            .lipschitz
                            .ratios
                            .iter()
                            .map(|(r, v)| json!([r, v]))
                            .collect::<Vec<_>>(),
                    },
                })),
            )?;
            Ok(0)
        }
        Command::Extremal { common, x0, n, grid, dump_poly, dump_coeffs } => {
            let set = load_set(&common)?;
            require_membership(&set, x0)?;
            let grid = grid.unwrap_or_else(|| (8 * n + 1).max(65));
            let result = core::extremal_polynomial(&set, x0, n, grid)?;
            if let Some(path) = dump_poly {
                let mut rows = Vec::new();
                for iv in set.intervals() {
                    for j in 0..512 {
                        let x = iv.left + iv.length() * j as f64 / 511.0;
                        rows.push(vec![x, result.poly.eval(x)]);
                    }
                }
                fs::write(&path, to_csv_string(&["x", "p"], &rows))
                    .map_err(|e| input_failure(format!("cannot write {}: {e}", path.display())))?;
            }
            if let Some(path) = dump_coeffs {
                let lines: Vec<String> = result
                    .poly
                    .coeffs()
                    .iter()
                    .map(|c| core::set::fmt_g17(*c))
                    .collect();
                fs::write(&path, lines.join("\n") + "\n")
                    .map_err(|e| input_failure(format!("cannot write {}: {e}", path.display())))?;
            }
            emit(
                &common,
                to_json_string(&json!({
                    "n": n,
                    "value": result.value,
                    "ratio": result.ratio,
                    "iterations": result.iterations,
                    "grid_size": result.grid_size,
                })),
            )?;
            Ok(0)
        }
        Command::Verify { common, x0, format } => {
            let set = load_set(&common)?;
            let x0_list: Vec<f64> = match x0 {
                Some(x) => vec![x],
                None => set.intervals().iter().map(|iv| iv.midpoint()).collect(),
            };
            let tol = tolerances(&common);
            let results = core::run_verify(&set, &x0_list, tol)?;
            let all_pass = results.iter().all(|r| r.pass);
            let artifact = match format {
                Format::Json => to_json_string(&json!({
                    "pass": all_pass,
                    "checks": results
                        .iter()
                        .map(|r| {
                            json!({
                                "name": r.name,
                                "residual": r.residual,
                                "tolerance": r.tolerance,
                                "pass": r.pass,
                            })
                        })
                        .collect::<Vec<_>>(),
                })),
                Format::Csv => {
                    let mut out = String::from("name,residual,tolerance,pass\n");
                    for r in &results {
                        out.push_str(&format!(
                            "{},{},{},{}\n",
                            r.name,
                            core::set::fmt_g17(r.residual),
                            core::set::fmt_g17(r.tolerance),
                            r.pass
                        ));
                    }
                    out
                }
            };
            emit(&common, artifact)?;
            for r in &results {
                eprintln!(
                    "{} {:<28} residual {:>12.5e}  tol {:>9.1e}",
                    if r.pass { "PASS" } else { "FAIL" },
                    r.name,
                    r.residual,
                    r.tolerance
                );
            }
            Ok(if all_pass { 0 } else { 3 })
        }
    }
}
