use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use corner_lightning::analysis::{convergence_sweep, ConvergenceTable, InteriorCompact, SweepConfig};
use corner_lightning::fastdec::{certify_bounds, BoundReport};
use corner_lightning::geometry::{boundary_grid, Clustering, SectorDomain};
use corner_lightning::minimax::{
    near_best_certificate, solve_minimax, unit_circle, MinimaxProblem, DEFAULT_MAX_ITERATIONS, DEFAULT_OSCILLATION_TOL,
};
use corner_lightning::ComplexPoint;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Map, Value};

use crate::config::{ConfigFile, Resolver};
use crate::{parse_target, ClusteringArg, CliError, Common, FastdecArgs, Format, MinimaxArgs, SweepArgs};

/// `sup |R_n|` on the reference square may exceed 1 by this much.
pub const INNER_BOUND_TOLERANCE: f64 = 1e-10;

/// Minimax errors below this are rounding noise and get no decay ratio.
const NOISE_FLOOR: f64 = 1e-13;

fn resolver(common: &Common, command: &str) -> Result<Resolver, CliError> {
    let file = match &common.config {
        Some(path) => ConfigFile::load(path, command)?,
        None => ConfigFile::default(),
    };
    Ok(Resolver::new(file))
}

fn default_format(out: &Option<PathBuf>) -> Format {
    match out.as_deref().and_then(Path::extension).and_then(|e| e.to_str()) {
        Some("json") => Format::Json,
        _ => Format::Csv,
    }
}

fn write_output(out: &Option<PathBuf>, content: &str) -> Result<(), CliError> {
    match out {
        Some(path) => std::fs::write(path, content)
            .map_err(|e| CliError::Runtime(format!("cannot write {}: {e}", path.display()))),
        None => {
            print!("{content}");
            Ok(())
        }
    }
}

fn settings_json(settings: &[(String, String)]) -> Value {
    let map: Map<String, Value> = settings.iter().map(|(k, v)| (k.clone(), Value::String(v.clone()))).collect();
    Value::Object(map)
}

fn csv_header(command: &str, settings: &[(String, String)]) -> String {
    let mut out = format!("# corner-lightning {command} {}\n", env!("CARGO_PKG_VERSION"));
    for (k, v) in settings {
        let _ = writeln!(out, "# {k} = {v}");
    }
    out
}

fn to_json<T: Serialize>(value: &T) -> Result<String, CliError> {
    serde_json::to_string_pretty(value)
        .map(|s| s + "\n")
        .map_err(|e| CliError::Runtime(e.to_string()))
}

pub fn fastdec_certify(args: FastdecArgs) -> Result<bool, CliError> {
    let mut r = resolver(&args.common, "fastdec-certify")?;
    let n_list = r.require("n", args.n)?;
    let grid: usize = r.get("grid", args.grid, 200)?;
    let settings = r.finish()?;
    if grid < 10 {
        return Err(CliError::Usage(format!("--grid must be at least 10, got {grid}")));
    }
    if n_list.0.contains(&0) {
        return Err(CliError::Usage("--n entries must be at least 1".into()));
    }

    let reports = n_list
        .0
        .iter()
        .map(|&n| certify_bounds(n as u64, grid))
        .collect::<Result<Vec<BoundReport>, _>>()?;
    let passed = reports.iter().all(|rep| rep.sup_inner <= 1.0 + INNER_BOUND_TOLERANCE);
    for rep in &reports {
        eprintln!("n = {:>5}  sup inner = {:.15}  sup extended = {:.6}", rep.n, rep.sup_inner, rep.sup_extended);
    }
    let doc = json!({
        "command": "fastdec-certify",
        "version": env!("CARGO_PKG_VERSION"),
        "settings": settings_json(&settings),
        "innerTolerance": INNER_BOUND_TOLERANCE,
        "passed": passed,
        "reports": reports,
    });
    write_output(&args.common.out, &to_json(&doc)?)?;
    Ok(passed)
}

/// Every fitted column must decay with `R² >= floor`; skipped fits pass.
pub fn sweep_passes(table: &ConvergenceTable, r2_floor: f64) -> bool {
    let fits_ok = table
        .fits
        .iter()
        .filter_map(|c| c.fit.as_ref())
        .all(|f| f.slope < 0.0 && f.r_squared >= r2_floor);
    let cells_ok = table.rows.iter().all(|row| row.errors.is_empty());
    fits_ok && cells_ok
}

fn fit_lines(table: &ConvergenceTable) -> String {
    let mut out = String::new();
    for c in &table.fits {
        match (&c.fit, &c.skipped) {
            (Some(f), _) => {
                let model = serde_json::to_value(f.model).ok();
                let model = model.as_ref().and_then(Value::as_str).unwrap_or("?");
                let _ = writeln!(
                    out,
                    "# fit {} {model} slope = {:e} intercept = {:e} r2 = {:e} points = {}",
                    c.column, f.slope, f.intercept, f.r_squared, f.points_used
                );
            }
            (None, reason) => {
                let _ = writeln!(out, "# fit {} skipped: {}", c.column, reason.as_deref().unwrap_or("no fit"));
            }
        }
    }
    out
}

pub fn lightning_sweep(args: SweepArgs) -> Result<bool, CliError> {
    let mut r = resolver(&args.common, "lightning-sweep")?;
    let target_id: String = r.require("target", args.target)?;
    let rho: f64 = r.get("rho", args.rho, 0.5)?;
    let theta: f64 = r.get("theta", args.theta, std::f64::consts::FRAC_PI_4)?;
    let sigma: f64 = r.get("sigma", args.sigma, corner_lightning::lightning::DEFAULT_SIGMA)?;
    let n_list = r.require("n", args.n)?;
    let boundary_points: usize = r.get("boundary-points", args.boundary_points, 400)?;
    let clustering = r.get("clustering", args.clustering, ClusteringArg::Exponential)?;
    let target = parse_target(&target_id)?;
    let domain = SectorDomain::new(rho, theta)?;
    let default_interior = InteriorCompact::default_for(&domain);
    let interior = InteriorCompact {
        r_min: r.get("interior-r-min", args.interior_r_min, default_interior.r_min)?,
        r_max: r.get("interior-r-max", args.interior_r_max, default_interior.r_max)?,
        half_angle: r.get("interior-half-angle", args.interior_half_angle, default_interior.half_angle)?,
        ..default_interior
    };
    let fit_min_n: usize = r.get("fit-min-n", args.fit_min_n, 16)?;
    let r2_floor: f64 = r.get("r2-floor", args.r2_floor, 0.9)?;
    let format = r.get("format", args.format, default_format(&args.common.out))?;
    let settings = r.finish()?;
    if !(sigma > 0.0 && sigma.is_finite()) {
        return Err(CliError::Usage(format!("--sigma must be positive, got {sigma}")));
    }

    let mut config = SweepConfig::new(domain, n_list.0, sigma);
    config.boundary_points = boundary_points;
    config.clustering = match clustering {
        ClusteringArg::None => Clustering::None,
        ClusteringArg::Exponential => Clustering::Exponential,
    };
    config.interior = vec![interior];
    config.fit_min_n = fit_min_n;
    let table = convergence_sweep(&target, &config)?;
    let passed = sweep_passes(&table, r2_floor);
    eprint!("{}", fit_lines(&table).replace("# ", ""));

    let content = match format {
        Format::Csv => {
            let mut out = csv_header("lightning-sweep", &settings);
            out.push_str(&fit_lines(&table));
            let _ = writeln!(out, "# passed = {passed}");
            out.push_str(&table.to_csv());
            out
        }
        Format::Json => to_json(&json!({
            "command": "lightning-sweep",
            "version": env!("CARGO_PKG_VERSION"),
            "settings": settings_json(&settings),
            "passed": passed,
            "table": table,
        }))?,
    };
    write_output(&args.common.out, &content)?;
    Ok(passed)
}

#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct MinimaxRow {
    pub n: usize,
    pub estimate: f64,
    pub lower_bound: f64,
    /// `E_{n-1} / E_n`; absent for the first row.
    pub decay_ratio: Option<f64>,
    pub near_best_ratio: f64,
    pub iterations: usize,
    pub converged: bool,
}

/// `sum_{j <= n} z^j / (j + 1)` by Horner's rule.
fn row_polynomial(n: usize, z: ComplexPoint) -> ComplexPoint {
    (0..=n).rev().fold(Complex64::new(0.0, 0.0), |acc, j| acc * z + 1.0 / (j as f64 + 1.0))
}

pub fn minimax_sweep(args: MinimaxArgs) -> Result<bool, CliError> {
    let mut r = resolver(&args.common, "minimax-sweep")?;
    let target: String = r.get("target", args.target, "pole".to_string())?;
    let domain_kind: String = r.get("domain", args.domain, "circle".to_string())?;
    let degrees = r.require("degrees", args.degrees)?;
    let samples: usize = r.get("samples", args.samples, 256)?;
    let pole = if target == "pole" { Some(r.get("pole", args.pole, 2.0)?) } else { None };
    let sector = if domain_kind == "sector" {
        let rho = r.get("rho", args.rho, 0.5)?;
        let theta = r.get("theta", args.theta, std::f64::consts::FRAC_PI_4)?;
        Some(SectorDomain::new(rho, theta)?)
    } else {
        None
    };
    let tolerance: f64 = r.get("tolerance", args.tolerance, DEFAULT_OSCILLATION_TOL)?;
    let max_iterations: usize = r.get("max-iterations", args.max_iterations, DEFAULT_MAX_ITERATIONS)?;
    let format = r.get("format", args.format, default_format(&args.common.out))?;
    let settings = r.finish()?;
    if !(tolerance > 0.0 && tolerance < 1.0) {
        return Err(CliError::Usage(format!("--tolerance must lie in (0, 1), got {tolerance}")));
    }
    if max_iterations == 0 {
        return Err(CliError::Usage("--max-iterations must be positive".into()));
    }
    if target != "pole" && target != "poly" {
        return Err(CliError::Usage(format!("unknown minimax target '{target}' (pole, poly)")));
    }
    if domain_kind != "circle" && domain_kind != "sector" {
        return Err(CliError::Usage(format!("unknown domain '{domain_kind}' (circle, sector)")));
    }
    let max_degree = degrees.0.iter().copied().max().unwrap_or(0);
    if samples < 2 * (max_degree + 1) {
        return Err(CliError::Usage(format!(
            "degree {max_degree} needs at least {} samples, got {samples}",
            2 * (max_degree + 1)
        )));
    }

    let points = |count: usize| -> Result<Vec<ComplexPoint>, CliError> {
        Ok(match &sector {
            Some(d) => boundary_grid(d, count, Clustering::None)?.points,
            None => unit_circle(count),
        })
    };
    let coarse = points(samples)?;
    let fine = points(4 * samples)?;
    let f = |n: usize, z: ComplexPoint| match pole {
        Some(a) => 1.0 / (z - a),
        None => row_polynomial(n, z),
    };

    let solved = degrees
        .0
        .par_iter()
        .map(|&n| -> Result<MinimaxRow, CliError> {
            let mut problem = MinimaxProblem::from_fn(coarse.clone(), |z| f(n, z), n)?;
            problem.oscillation_tol = tolerance;
            problem.max_iterations = max_iterations;
            let result = solve_minimax(&problem)?;
            let fine_values: Vec<ComplexPoint> = fine.iter().map(|&z| f(n, z)).collect();
            Ok(MinimaxRow {
                n,
                estimate: result.error_estimate,
                lower_bound: result.lower_bound(),
                decay_ratio: None,
                near_best_ratio: near_best_certificate(&result, &fine, &fine_values),
                iterations: result.iterations,
                converged: result.converged,
            })
        })
        .collect::<Result<Vec<_>, _>>()?;
    let mut rows = solved;
    for i in 1..rows.len() {
        if rows[i].n == rows[i - 1].n + 1 && rows[i].estimate > NOISE_FLOOR && rows[i - 1].estimate > NOISE_FLOOR {
            rows[i].decay_ratio = Some(rows[i - 1].estimate / rows[i].estimate);
        }
    }
    let passed = rows.iter().all(|row| row.converged);
    for row in &rows {
        eprintln!("n = {:>3}  E_n ~ {:e}  near-best ratio {:.4}", row.n, row.estimate, row.near_best_ratio);
    }

    let content = match format {
        Format::Csv => {
            let mut out = csv_header("minimax-sweep", &settings);
            let _ = writeln!(out, "# passed = {passed}");
            out.push_str("n,estimate,lower_bound,decay_ratio,near_best_ratio,iterations,converged\n");
            for row in &rows {
                let _ = writeln!(
                    out,
                    "{},{:e},{:e},{},{:e},{},{}",
                    row.n,
                    row.estimate,
                    row.lower_bound,
                    row.decay_ratio.map(|x| format!("{x:e}")).unwrap_or_default(),
                    row.near_best_ratio,
                    row.iterations,
                    row.converged
                );
            }
            out
        }
        Format::Json => to_json(&json!({
            "command": "minimax-sweep",
            "version": env!("CARGO_PKG_VERSION"),
            "settings": settings_json(&settings),
            "passed": passed,
            "rows": rows,
        }))?,
    };
    write_output(&args.common.out, &content)?;
    Ok(passed)
}
