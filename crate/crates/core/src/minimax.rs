//! Discrete near-best polynomial approximation.
//!
//! `E_n(f)` is estimated on a finite sample of the boundary by Lawson's
//! iteratively reweighted least squares. The polynomial basis is built by
//! Arnoldi orthogonalization on the samples, which keeps the least-squares
//! problems well conditioned up to high degree.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::{ComplexPoint, Error, Result};

pub const DEFAULT_OSCILLATION_TOL: f64 = 1e-3;
pub const DEFAULT_MAX_ITERATIONS: usize = 200;

/// Weights below this fraction of the largest weight are treated as inactive.
const ACTIVE_WEIGHT_FRACTION: f64 = 1e-3;

/// Orthonormal polynomial basis on a sample set, with its Hessenberg
/// recurrence for evaluation elsewhere.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArnoldiBasis {
    /// `(degree + 1) x degree` upper Hessenberg matrix, row-major.
    hessenberg: Vec<Vec<ComplexPoint>>,
    degree: usize,
}

impl ArnoldiBasis {
    /// Returns the basis and its sample matrix `Q` with `Q^H Q = M I`.
    pub fn build(samples: &[ComplexPoint], degree: usize) -> Result<(Self, DMatrix<ComplexPoint>)> {
        let m = samples.len();
        let mut q = DMatrix::<ComplexPoint>::zeros(m, degree + 1);
        q.column_mut(0).fill(Complex64::new(1.0, 0.0));
        let mut h = vec![vec![Complex64::new(0.0, 0.0); degree]; degree + 1];
        let scale = (m as f64).sqrt();
        for k in 0..degree {
            let mut v: DVector<ComplexPoint> =
                DVector::from_iterator(m, samples.iter().zip(q.column(k).iter()).map(|(z, qk)| z * qk));
            // Two passes of classical Gram-Schmidt.
            for _ in 0..2 {
                for j in 0..=k {
                    let coeff = q.column(j).dotc(&v) / m as f64;
                    h[j][k] += coeff;
                    v -= q.column(j) * coeff;
                }
            }
            let norm = v.norm() / scale;
            if norm <= 1e-13 * samples.iter().map(|z| z.norm()).fold(1.0, f64::max) {
                return Err(Error::RankDeficient(k + 1));
            }
            h[k + 1][k] = Complex64::new(norm, 0.0);
            q.set_column(k + 1, &(v / Complex64::new(norm, 0.0)));
        }
        Ok((Self { hessenberg: h, degree }, q))
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    /// Basis values at arbitrary points, one row per point.
    pub fn basis_at(&self, points: &[ComplexPoint]) -> DMatrix<ComplexPoint> {
        let m = points.len();
        let mut w = DMatrix::<ComplexPoint>::zeros(m, self.degree + 1);
        w.column_mut(0).fill(Complex64::new(1.0, 0.0));
        for k in 0..self.degree {
            let mut v: DVector<ComplexPoint> =
                DVector::from_iterator(m, points.iter().zip(w.column(k).iter()).map(|(z, wk)| z * wk));
            for j in 0..=k {
                v -= w.column(j) * self.hessenberg[j][k];
            }
            w.set_column(k + 1, &(v / self.hessenberg[k + 1][k]));
        }
        w
    }

    pub fn evaluate(&self, coefficients: &[ComplexPoint], points: &[ComplexPoint]) -> Vec<ComplexPoint> {
        let w = self.basis_at(points);
        let c = DVector::from_column_slice(coefficients);
        (w * c).iter().copied().collect()
    }
}

/// Samples, target values and degree for a discrete `E_n(f)` estimate.
#[derive(Debug, Clone, PartialEq)]
pub struct MinimaxProblem {
    samples: Vec<ComplexPoint>,
    values: Vec<ComplexPoint>,
    degree: usize,
    pub max_iterations: usize,
    pub oscillation_tol: f64,
}

impl MinimaxProblem {
    pub fn new(samples: Vec<ComplexPoint>, values: Vec<ComplexPoint>, degree: usize) -> Result<Self> {
        if samples.len() != values.len() {
            return Err(Error::InvalidParameter(format!(
                "{} samples but {} values",
                samples.len(),
                values.len()
            )));
        }
        if samples.len() < 2 * (degree + 1) {
            return Err(Error::InvalidParameter(format!(
                "degree {degree} needs at least {} samples, got {}",
                2 * (degree + 1),
                samples.len()
            )));
        }
        let mut sorted: Vec<(f64, f64)> = samples.iter().map(|z| (z.re, z.im)).collect();
        sorted.sort_by(|a, b| a.partial_cmp(b).expect("finite samples"));
        if sorted.windows(2).any(|p| p[0] == p[1]) {
            return Err(Error::RankDeficient(degree));
        }
        Ok(Self {
            samples,
            values,
            degree,
            max_iterations: DEFAULT_MAX_ITERATIONS,
            oscillation_tol: DEFAULT_OSCILLATION_TOL,
        })
    }

    /// Samples `f` at `samples`.
    pub fn from_fn(
        samples: Vec<ComplexPoint>,
        f: impl Fn(ComplexPoint) -> ComplexPoint,
        degree: usize,
    ) -> Result<Self> {
        let values = samples.iter().map(|&z| f(z)).collect();
        Self::new(samples, values, degree)
    }

    pub fn samples(&self) -> &[ComplexPoint] {
        &self.samples
    }

    pub fn values(&self) -> &[ComplexPoint] {
        &self.values
    }

    pub fn degree(&self) -> usize {
        self.degree
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MinimaxResult {
    pub basis: ArnoldiBasis,
    /// Coefficients in the Arnoldi basis.
    pub coefficients: Vec<ComplexPoint>,
    /// Discrete sup error of the returned polynomial.
    pub error_estimate: f64,
    /// Weighted least-squares errors per iteration; each is a lower bound
    /// on the discrete minimax error.
    pub lower_bounds: Vec<f64>,
    pub weights: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
}

impl MinimaxResult {
    /// Best certified lower bound on the discrete minimax error.
    pub fn lower_bound(&self) -> f64 {
        self.lower_bounds.iter().copied().fold(0.0, f64::max)
    }

    pub fn evaluate(&self, points: &[ComplexPoint]) -> Vec<ComplexPoint> {
        self.basis.evaluate(&self.coefficients, points)
    }
}

fn weighted_least_squares(
    q: &DMatrix<ComplexPoint>,
    values: &[ComplexPoint],
    weights: &[f64],
) -> Result<DVector<ComplexPoint>> {
    let (m, k) = q.shape();
    let a = DMatrix::from_fn(m, k, |i, j| q[(i, j)] * weights[i].sqrt());
    let b = DVector::from_fn(m, |i, _| values[i] * weights[i].sqrt());
    let qr = a.qr();
    let rhs = qr.q().adjoint() * b;
    qr.r().solve_upper_triangular(&rhs).ok_or(Error::RankDeficient(k - 1))
}

/// Lawson iteration: weights are multiplied by the current residual moduli
/// and renormalized until the weighted least-squares error (a lower bound)
/// meets the sup error (an upper bound) within `oscillation_tol`.
pub fn solve_minimax(problem: &MinimaxProblem) -> Result<MinimaxResult> {
    let m = problem.samples.len();
    let (basis, q) = ArnoldiBasis::build(&problem.samples, problem.degree)?;
    let mut weights = vec![1.0 / m as f64; m];
    let mut best: Option<(f64, DVector<ComplexPoint>)> = None;
    let mut lower_bounds = Vec::new();
    let scale = problem.values.iter().map(|v| v.norm()).fold(0.0, f64::max);
    let tol = problem.oscillation_tol;
    let mut converged = false;
    let mut iterations = 0;

    while iterations < problem.max_iterations {
        iterations += 1;
        let c = weighted_least_squares(&q, &problem.values, &weights)?;
        let fitted = &q * &c;
        let residual: Vec<f64> =
            problem.values.iter().zip(fitted.iter()).map(|(f, p)| (f - p).norm()).collect();
        let upper = residual.iter().copied().fold(0.0, f64::max);
        let lower = weights.iter().zip(&residual).map(|(w, e)| w * e * e).sum::<f64>().sqrt();
        lower_bounds.push(lower);
        if upper <= 1e-14 * scale || upper == 0.0 {
            best = Some((upper, c));
            converged = true;
            break;
        }
        let max_w = weights.iter().copied().fold(0.0, f64::max);
        let min_active = weights
            .iter()
            .zip(&residual)
            .filter(|(w, _)| **w >= ACTIVE_WEIGHT_FRACTION * max_w)
            .map(|(_, e)| *e)
            .fold(f64::INFINITY, f64::min);
        if upper - lower <= tol * upper && upper - min_active <= tol * upper {
            // The certified iterate is reported even if an earlier one had a smaller sup.
            best = Some((upper, c));
            converged = true;
            break;
        }
        if best.as_ref().is_none_or(|(u, _)| upper < *u) {
            best = Some((upper, c));
        }
        let total: f64 = weights.iter().zip(&residual).map(|(w, e)| w * e).sum();
        if total <= 0.0 {
            break;
        }
        for (w, e) in weights.iter_mut().zip(&residual) {
            *w *= e / total;
        }
    }

    let (error_estimate, c) = best.expect("at least one iteration");
    Ok(MinimaxResult {
        basis,
        coefficients: c.iter().copied().collect(),
        error_estimate,
        lower_bounds,
        weights,
        iterations,
        converged,
    })
}

/// Ratio of the sup error on a finer grid to the discrete estimate.
pub fn near_best_certificate(
    result: &MinimaxResult,
    fine_points: &[ComplexPoint],
    fine_values: &[ComplexPoint],
) -> f64 {
    let fitted = result.evaluate(fine_points);
    let fine_error = fine_values
        .iter()
        .zip(&fitted)
        .map(|(f, p)| (f - p).norm())
        .fold(0.0, f64::max);
    if fine_error <= 1e-10 && result.error_estimate <= 1e-10 {
        return 1.0;
    }
    fine_error / result.error_estimate
}

/// `count` equispaced points on the unit circle starting at `1`.
pub fn unit_circle(count: usize) -> Vec<ComplexPoint> {
    (0..count)
        .map(|k| Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * k as f64 / count as f64))
        .collect()
}
