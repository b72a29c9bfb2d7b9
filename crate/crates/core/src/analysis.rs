//! Sup-norm errors on grids, rate-law fits and convergence tables.

use std::fmt::Write as _;

use log::warn;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::geometry::{boundary_grid, Clustering, EvaluationGrid, SectorDomain};
use crate::lightning::{build_approximant, SlitFunction};
use crate::{ComplexPoint, Error, Result};

/// Max over the grid of `|evaluator(z) - reference(z)|`.
///
/// The reduction is a max, so the result does not depend on evaluation order.
pub fn sup_error<E, R>(evaluator: E, reference: R, grid: &EvaluationGrid) -> Result<f64>
where
    E: Fn(ComplexPoint) -> Result<ComplexPoint> + Sync,
    R: Fn(ComplexPoint) -> ComplexPoint + Sync,
{
    if grid.is_empty() {
        return Err(Error::InvalidParameter("empty evaluation grid".into()));
    }
    grid.points
        .par_iter()
        .enumerate()
        .map(|(index, &z)| {
            let value = evaluator(z).map_err(|e| Error::GridPoint { index, point: z, source: Box::new(e) })?;
            let err = (value - reference(z)).norm();
            if err.is_nan() {
                return Err(Error::NonFinite { index, point: z });
            }
            Ok(err)
        })
        .try_reduce(|| 0.0, |a, b| Ok(a.max(b)))
}

/// Sequential twin of [`sup_error`].
pub fn sup_error_sequential<E, R>(evaluator: E, reference: R, grid: &EvaluationGrid) -> Result<f64>
where
    E: Fn(ComplexPoint) -> Result<ComplexPoint>,
    R: Fn(ComplexPoint) -> ComplexPoint,
{
    if grid.is_empty() {
        return Err(Error::InvalidParameter("empty evaluation grid".into()));
    }
    let mut sup: f64 = 0.0;
    for (index, &z) in grid.points.iter().enumerate() {
        let value = evaluator(z).map_err(|e| Error::GridPoint { index, point: z, source: Box::new(e) })?;
        let err = (value - reference(z)).norm();
        if err.is_nan() {
            return Err(Error::NonFinite { index, point: z });
        }
        sup = sup.max(err);
    }
    Ok(sup)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RateModel {
    /// `err ~ A e^{-C sqrt(n)}`: regress `ln err` on `sqrt(n)`.
    ExpSqrt,
    /// `err ~ A e^{-c n}`: regress `ln err` on `n`.
    ExpLinear,
}

impl RateModel {
    fn abscissa(&self, n: f64) -> f64 {
        match self {
            RateModel::ExpSqrt => n.sqrt(),
            RateModel::ExpLinear => n,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct RateFit {
    pub model: RateModel,
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
    pub points_used: usize,
}

/// Least-squares line through `(sqrt(n) or n, ln err)`.
///
/// Points with a non-positive or non-finite error are dropped with a warning.
pub fn fit_rate(points: &[(f64, f64)], model: RateModel) -> Result<RateFit> {
    let usable: Vec<(f64, f64)> = points
        .iter()
        .filter(|&&(n, err)| {
            let keep = err > 0.0 && err.is_finite();
            if !keep {
                warn!("dropping point n = {n} with error {err} from {model:?} fit");
            }
            keep
        })
        .map(|&(n, err)| (model.abscissa(n), err.ln()))
        .collect();
    if usable.len() < 3 {
        return Err(Error::TooFewPoints(usable.len()));
    }
    let k = usable.len() as f64;
    let mean_x = usable.iter().map(|p| p.0).sum::<f64>() / k;
    let mean_y = usable.iter().map(|p| p.1).sum::<f64>() / k;
    let sxx: f64 = usable.iter().map(|p| (p.0 - mean_x).powi(2)).sum();
    let sxy: f64 = usable.iter().map(|p| (p.0 - mean_x) * (p.1 - mean_y)).sum();
    let syy: f64 = usable.iter().map(|p| (p.1 - mean_y).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::InvalidParameter("fit abscissae are all equal".into()));
    }
    let slope = sxy / sxx;
    let intercept = mean_y - slope * mean_x;
    let sse: f64 = usable.iter().map(|p| (p.1 - intercept - slope * p.0).powi(2)).sum();
    let r_squared = if syy == 0.0 { 1.0 } else { (1.0 - sse / syy).clamp(0.0, 1.0) };
    Ok(RateFit { model, slope, intercept, r_squared, points_used: usable.len() })
}

/// An interior compact `{r_min <= |z| <= r_max, |arg z| <= half_angle}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InteriorCompact {
    pub label: String,
    pub r_min: f64,
    pub r_max: f64,
    pub half_angle: f64,
    pub radial: usize,
    pub angular: usize,
}

impl InteriorCompact {
    /// `{0.2 rho <= |z| <= 0.5 rho, |arg z| <= theta/2}`.
    pub fn default_for(domain: &SectorDomain) -> Self {
        Self {
            label: "annulus".into(),
            r_min: 0.2 * domain.rho(),
            r_max: 0.5 * domain.rho(),
            half_angle: 0.5 * domain.theta(),
            radial: 10,
            angular: 9,
        }
    }

    pub fn grid(&self, domain: &SectorDomain) -> Result<EvaluationGrid> {
        EvaluationGrid::annular_sector(domain, self.r_min, self.r_max, self.half_angle, self.radial, self.angular)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct SweepConfig {
    pub domain: SectorDomain,
    pub n_list: Vec<usize>,
    pub sigma: f64,
    pub boundary_points: usize,
    pub clustering: Clustering,
    pub interior: Vec<InteriorCompact>,
    /// Rows with smaller `n` are excluded from fits.
    pub fit_min_n: usize,
    /// Columns whose errors all sit below this are left unfitted.
    pub noise_floor: f64,
}

impl SweepConfig {
    pub fn new(domain: SectorDomain, n_list: Vec<usize>, sigma: f64) -> Self {
        Self {
            domain,
            n_list,
            sigma,
            boundary_points: 400,
            clustering: Clustering::Exponential,
            interior: vec![InteriorCompact::default_for(&domain)],
            fit_min_n: 16,
            noise_floor: 1e-13,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct TableRow {
    pub n: usize,
    pub boundary_error: Option<f64>,
    pub interior_errors: Vec<Option<f64>>,
    /// Messages for cells that failed to evaluate.
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub errors: Vec<String>,
}

/// A fit, or the reason it was skipped.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ColumnFit {
    pub column: String,
    pub fit: Option<RateFit>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub skipped: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ConvergenceTable {
    pub interior_labels: Vec<String>,
    pub rows: Vec<TableRow>,
    pub fits: Vec<ColumnFit>,
}

impl ConvergenceTable {
    pub fn boundary_fit(&self) -> Option<&RateFit> {
        self.fits.first().and_then(|f| f.fit.as_ref())
    }

    pub fn interior_fit(&self, index: usize) -> Option<&RateFit> {
        self.fits.get(index + 1).and_then(|f| f.fit.as_ref())
    }

    pub fn column_names(&self) -> Vec<String> {
        let mut names = vec!["boundary_err".to_string()];
        names.extend(self.interior_labels.iter().map(|l| format!("interior_{l}_err")));
        names
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "n,{}", self.column_names().join(","));
        let cell = |v: &Option<f64>| v.map(|x| format!("{x:e}")).unwrap_or_default();
        for row in &self.rows {
            let mut line = format!("{},{}", row.n, cell(&row.boundary_error));
            for v in &row.interior_errors {
                line.push(',');
                line.push_str(&cell(v));
            }
            let _ = writeln!(out, "{line}");
        }
        out
    }

    fn fit_column(
        &mut self,
        column: String,
        values: Vec<(usize, Option<f64>)>,
        model: RateModel,
        fit_min_n: usize,
        noise_floor: f64,
    ) {
        let points: Vec<(f64, f64)> = values
            .iter()
            .filter(|(n, _)| *n >= fit_min_n)
            .filter_map(|(n, e)| e.map(|e| (*n as f64, e)))
            .collect();
        let entry = if points.iter().all(|p| p.1 <= noise_floor) && !points.is_empty() {
            ColumnFit { column, fit: None, skipped: Some(format!("all errors below {noise_floor:e}")) }
        } else {
            match fit_rate(&points, model) {
                Ok(fit) => ColumnFit { column, fit: Some(fit), skipped: None },
                Err(e) => ColumnFit { column, fit: None, skipped: Some(e.to_string()) },
            }
        };
        self.fits.push(entry);
    }
}

fn validate_labels(config: &SweepConfig) -> Result<()> {
    for c in &config.interior {
        if c.label.is_empty() || !c.label.chars().all(|ch| ch.is_ascii_alphanumeric() || ch == '-' || ch == '_') {
            return Err(Error::InvalidParameter(format!("bad interior label '{}'", c.label)));
        }
    }
    Ok(())
}

/// Builds `r_n` for each `n` and records the sup error on a fixed boundary
/// grid and on each fixed interior compact, then fits the two rate laws.
pub fn convergence_sweep(f: &dyn SlitFunction, config: &SweepConfig) -> Result<ConvergenceTable> {
    if config.n_list.is_empty() {
        return Err(Error::InvalidParameter("n list is empty".into()));
    }
    if config.n_list.windows(2).any(|p| p[0] >= p[1]) {
        return Err(Error::InvalidParameter("n list must be strictly increasing".into()));
    }
    validate_labels(config)?;
    let boundary = boundary_grid(&config.domain, config.boundary_points, config.clustering)?;
    let interiors = config
        .interior
        .iter()
        .map(|c| c.grid(&config.domain))
        .collect::<Result<Vec<_>>>()?;
    let reference = |z: ComplexPoint| f.value(z);

    let mut rows = Vec::with_capacity(config.n_list.len());
    for &n in &config.n_list {
        let mut row = TableRow { n, boundary_error: None, interior_errors: Vec::new(), errors: Vec::new() };
        match build_approximant(f, &config.domain, n, config.sigma) {
            Ok(approx) => {
                let eval = |z| approx.evaluate(z);
                match sup_error(eval, reference, &boundary) {
                    Ok(e) => row.boundary_error = Some(e),
                    Err(e) => row.errors.push(format!("boundary: {e}")),
                }
                for (compact, grid) in config.interior.iter().zip(&interiors) {
                    match sup_error(eval, reference, grid) {
                        Ok(e) => row.interior_errors.push(Some(e)),
                        Err(e) => {
                            row.interior_errors.push(None);
                            row.errors.push(format!("{}: {e}", compact.label));
                        }
                    }
                }
            }
            Err(e) => {
                row.interior_errors = vec![None; interiors.len()];
                row.errors.push(format!("build: {e}"));
            }
        }
        rows.push(row);
    }

    let mut table = ConvergenceTable {
        interior_labels: config.interior.iter().map(|c| c.label.clone()).collect(),
        rows,
        fits: Vec::new(),
    };
    if table.rows.len() > 1 {
        let names = table.column_names();
        let boundary_col = table.rows.iter().map(|r| (r.n, r.boundary_error)).collect();
        table.fit_column(names[0].clone(), boundary_col, RateModel::ExpSqrt, config.fit_min_n, config.noise_floor);
        for i in 0..interiors.len() {
            let col = table.rows.iter().map(|r| (r.n, r.interior_errors[i])).collect();
            table.fit_column(names[i + 1].clone(), col, RateModel::ExpLinear, config.fit_min_n, config.noise_floor);
        }
    }
    Ok(table)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lightning::Target;
    use approx::assert_abs_diff_eq;
    use num_complex::Complex64;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::FRAC_PI_4;

    fn grid(points: Vec<ComplexPoint>) -> EvaluationGrid {
        EvaluationGrid { points, label: crate::geometry::GridLabel::Boundary, clustering: Clustering::None }
    }

    #[test]
    fn sup_error_basics() {
        let g = grid((0..50).map(|k| Complex64::new(k as f64 / 50.0, 0.3)).collect());
        let f = |z: ComplexPoint| z * z;
        assert_eq!(sup_error(|z| Ok(f(z)), f, &g).unwrap(), 0.0);
        assert_abs_diff_eq!(sup_error(|z| Ok(f(z) + 1e-3), f, &g).unwrap(), 1e-3, epsilon = 1e-15);
        assert!(sup_error(|z| Ok(f(z)), f, &grid(vec![])).is_err());
    }

    #[test]
    fn sup_error_parallel_equals_sequential() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let g = grid((0..5000).map(|_| Complex64::new(rng.gen(), rng.gen())).collect());
        let f = |z: ComplexPoint| z.exp();
        let approx = |z: ComplexPoint| Ok(1.0 + z + z * z / 2.0 + z * z * z / 6.0);
        let a = sup_error(approx, f, &g).unwrap();
        let b = sup_error_sequential(approx, f, &g).unwrap();
        assert_eq!(a.to_bits(), b.to_bits());
    }

    #[test]
    fn sup_error_identifies_failing_point() {
        let g = grid(vec![Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)]);
        let err = sup_error(
            |z| if z.re > 0.5 { Err(Error::EvaluationAtPole(z)) } else { Ok(z) },
            |z| z,
            &g,
        )
        .unwrap_err();
        assert!(matches!(err, Error::GridPoint { index: 1, .. }));
    }

    #[test]
    fn exact_synthetic_fits() {
        let ns = [16.0, 36.0, 64.0, 100.0, 144.0];
        let pts: Vec<_> = ns.iter().map(|&n: &f64| (n, (-2.0 * n.sqrt()).exp())).collect();
        let fit = fit_rate(&pts, RateModel::ExpSqrt).unwrap();
        assert_abs_diff_eq!(fit.slope, -2.0, epsilon = 1e-12);
        assert_abs_diff_eq!(fit.r_squared, 1.0, epsilon = 1e-12);
        let pts: Vec<_> = ns.iter().map(|&n| (n, 5.0 * (-0.3 * n).exp())).collect();
        let fit = fit_rate(&pts, RateModel::ExpLinear).unwrap();
        assert_abs_diff_eq!(fit.slope, -0.3, epsilon = 1e-12);
        assert_abs_diff_eq!(fit.intercept, 5f64.ln(), epsilon = 1e-10);
    }

    #[test]
    fn noisy_fit_stays_close() {
        let mut rng = ChaCha8Rng::seed_from_u64(2024);
        let pts: Vec<_> = (1..=20)
            .map(|k| {
                let n = (k * k) as f64;
                let u: f64 = rng.gen_range(-0.1..=0.1);
                (n, (-2.0 * n.sqrt()).exp() * (1.0 + u))
            })
            .collect();
        let fit = fit_rate(&pts, RateModel::ExpSqrt).unwrap();
        assert!((-2.2..=-1.8).contains(&fit.slope), "{}", fit.slope);
        assert!(fit.r_squared >= 0.95);
    }

    #[test]
    fn nonpositive_errors_are_dropped() {
        let pts = [(1.0, 0.0), (4.0, 0.1), (9.0, 0.01), (16.0, -1.0)];
        assert!(matches!(fit_rate(&pts, RateModel::ExpSqrt), Err(Error::TooFewPoints(2))));
        let pts = [(1.0, 0.0), (4.0, 0.1), (9.0, 0.01), (16.0, 0.001)];
        assert_eq!(fit_rate(&pts, RateModel::ExpSqrt).unwrap().points_used, 3);
    }

    fn small_config(n_list: Vec<usize>) -> SweepConfig {
        let domain = SectorDomain::new(0.5, FRAC_PI_4).unwrap();
        let mut config = SweepConfig::new(domain, n_list, 2.0);
        config.boundary_points = 60;
        config
    }

    #[test]
    fn single_row_sweep_has_no_fits() {
        let table = convergence_sweep(&Target::Zsqrt, &small_config(vec![16])).unwrap();
        assert_eq!(table.rows.len(), 1);
        assert!(table.fits.is_empty());
        assert!(table.to_csv().starts_with("n,boundary_err,interior_annulus_err\n16,"));
    }

    #[test]
    fn zero_target_sweep_skips_fits() {
        let table = convergence_sweep(&Target::Zero, &small_config(vec![16, 36, 64])).unwrap();
        for row in &table.rows {
            assert!(row.boundary_error.unwrap() <= 1e-15);
            assert!(row.interior_errors.iter().all(|e| e.unwrap() <= 1e-15));
        }
        assert!(table.fits.iter().all(|f| f.fit.is_none()));
    }

    #[test]
    fn sweep_rejects_bad_n_lists() {
        assert!(convergence_sweep(&Target::Zsqrt, &small_config(vec![])).is_err());
        assert!(convergence_sweep(&Target::Zsqrt, &small_config(vec![36, 16])).is_err());
    }
}
