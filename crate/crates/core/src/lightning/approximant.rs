use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::quadrature::{gauss_legendre, slit_quadrature, QuadratureRule, DEFAULT_MIN_SCALE};
use super::scheme::{fastdec_factor, kernel_from_parts, LightningScheme};
use super::target::SlitFunction;
use crate::fastdec::LogComplex;
use crate::geometry::{anchor_square, AnchoredSquare, SectorDomain};
use crate::{ComplexPoint, Error, Result};

pub const DEFAULT_SIGMA: f64 = 2.0;

/// Gauss–Legendre nodes per panel on the circle.
const ARC_NODES_PER_PANEL: usize = 16;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ApproximantConfig {
    /// Degree budget `n`; the scheme and the kernel use `[n/2]`.
    pub n: usize,
    pub sigma: f64,
    pub nodes_per_panel: usize,
    pub min_scale: f64,
    /// Taylor degree of the circle part; defaults to `n`.
    pub circular_degree: Option<usize>,
    /// Degree parameter of the fast-decreasing factor inside the kernel;
    /// defaults to `[n/2]`.
    pub fastdec_degree: Option<u64>,
}

impl ApproximantConfig {
    pub fn new(n: usize, sigma: f64) -> Self {
        Self {
            n,
            sigma,
            nodes_per_panel: 16,
            min_scale: DEFAULT_MIN_SCALE,
            circular_degree: None,
            fastdec_degree: None,
        }
    }
}

/// Precomputed data for one slit quadrature node.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct SlitNode {
    zeta: f64,
    /// `weight * jump(zeta) / (2 pi i)`.
    coefficient: ComplexPoint,
    /// `None` at a pole of `phi`, where `1/phi(zeta) = 0`.
    phi: Option<LogComplex>,
    square: AnchoredSquare,
}

/// Summary of an approximant's construction parameters and degrees.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ApproximantMetadata {
    pub n: usize,
    pub sigma: f64,
    pub scheme_size: usize,
    pub poles: Vec<f64>,
    pub epsilon: f64,
    pub fastdec_degree: u64,
    /// Upper bound `2 [n/2]` on the order of the slit part.
    pub slit_order: usize,
    pub circular_degree: usize,
    pub quadrature_nodes: usize,
}

/// A rational approximant on `rho * A_theta`: a quadrature sum of modified
/// Cauchy kernels over the slit plus a Taylor polynomial for the circle.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RationalApproximant {
    domain: SectorDomain,
    scheme: LightningScheme,
    quadrature: QuadratureRule,
    fastdec_degree: u64,
    slit: Vec<SlitNode>,
    circular_coeffs: Vec<ComplexPoint>,
    n: usize,
}

/// `c_k = (1/2 pi i) \oint f(zeta) zeta^{-k-1} d zeta` over the unit circle,
/// for `k = 0..=degree`.
pub fn circular_part(f: &dyn SlitFunction, degree: usize) -> Vec<ComplexPoint> {
    // The boundary values are smooth in the angle on (-pi, pi) but not
    // periodic, so use composite Gauss panels rather than the trapezoid rule.
    let panels = 16 + degree / 2;
    let (x, w) = gauss_legendre(ARC_NODES_PER_PANEL);
    let h = 2.0 * PI / panels as f64;
    let mut samples = Vec::with_capacity(panels * x.len());
    for p in 0..panels {
        let mid = -PI + (p as f64 + 0.5) * h;
        for (xi, wi) in x.iter().zip(&w) {
            let theta = mid + 0.5 * h * xi;
            let value = f.value(Complex64::from_polar(1.0, theta));
            samples.push((theta, 0.5 * h * wi / (2.0 * PI) * value));
        }
    }
    (0..=degree)
        .map(|k| {
            samples
                .iter()
                .map(|&(theta, v)| v * Complex64::from_polar(1.0, -(k as f64) * theta))
                .sum()
        })
        .collect()
}

fn horner(coeffs: &[ComplexPoint], z: ComplexPoint) -> ComplexPoint {
    coeffs.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, &c| acc * z + c)
}

/// Builds `r_n` with default quadrature settings.
pub fn build_approximant(
    f: &dyn SlitFunction,
    domain: &SectorDomain,
    n: usize,
    sigma: f64,
) -> Result<RationalApproximant> {
    build_approximant_with(f, domain, &ApproximantConfig::new(n, sigma))
}

pub fn build_approximant_with(
    f: &dyn SlitFunction,
    domain: &SectorDomain,
    config: &ApproximantConfig,
) -> Result<RationalApproximant> {
    if config.n < 2 {
        return Err(Error::InvalidParameter(format!("n must be >= 2, got {}", config.n)));
    }
    let half = config.n / 2;
    let scheme = LightningScheme::new(half, config.sigma)?;
    let quadrature = slit_quadrature(config.min_scale, config.nodes_per_panel)?;
    let fastdec_degree = config.fastdec_degree.unwrap_or(half as u64);
    // A uniform half side that keeps every square S_zeta, zeta on [-1, 0),
    // around the whole of the closed sector.
    let half_side = 2.0 * (1.0 + domain.rho());
    let slit = if f.is_jump_free() {
        Vec::new()
    } else {
        quadrature
            .nodes
            .iter()
            .zip(&quadrature.weights)
            .map(|(&t, &w)| {
                let zeta = Complex64::new(t, 0.0);
                let phi = match scheme.eval_phi(zeta) {
                    Ok(p) => Some(p),
                    Err(Error::EvaluationAtPole(_)) => None,
                    Err(e) => return Err(e),
                };
                Ok(SlitNode {
                    zeta: t,
                    coefficient: w * f.jump(t) / Complex64::new(0.0, 2.0 * PI),
                    phi,
                    square: anchor_square(domain, zeta, half_side)?,
                })
            })
            .collect::<Result<Vec<_>>>()?
    };
    let circular_coeffs = circular_part(f, config.circular_degree.unwrap_or(config.n));
    Ok(RationalApproximant {
        domain: *domain,
        scheme,
        quadrature,
        fastdec_degree,
        slit,
        circular_coeffs,
        n: config.n,
    })
}

/// Error of the slit part split at `|zeta| = eps`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErrorSplit {
    /// Contribution of nodes with `|zeta| < eps`.
    pub near: ComplexPoint,
    /// Contribution of the remaining nodes.
    pub far: ComplexPoint,
}

impl RationalApproximant {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn domain(&self) -> &SectorDomain {
        &self.domain
    }

    pub fn scheme(&self) -> &LightningScheme {
        &self.scheme
    }

    pub fn quadrature(&self) -> &QuadratureRule {
        &self.quadrature
    }

    pub fn circular_coeffs(&self) -> &[ComplexPoint] {
        &self.circular_coeffs
    }

    pub fn metadata(&self) -> ApproximantMetadata {
        ApproximantMetadata {
            n: self.n,
            sigma: self.scheme.sigma(),
            scheme_size: self.scheme.n(),
            poles: self.scheme.poles().to_vec(),
            epsilon: self.scheme.epsilon_split(),
            fastdec_degree: self.fastdec_degree,
            slit_order: 2 * self.scheme.n(),
            circular_degree: self.circular_coeffs.len() - 1,
            quadrature_nodes: self.quadrature.nodes.len(),
        }
    }

    fn phi_at(&self, z: ComplexPoint) -> Result<LogComplex> {
        self.scheme.eval_phi(z)
    }

    /// The rational slit part at `z`.
    pub fn evaluate_slit(&self, z: ComplexPoint) -> Result<ComplexPoint> {
        let phi_z = self.phi_at(z)?;
        let mut sum = Complex64::new(0.0, 0.0);
        for node in &self.slit {
            let r = fastdec_factor(self.fastdec_degree, &node.square, z);
            let q = kernel_from_parts(Complex64::new(node.zeta, 0.0), z, node.phi, phi_z, r)?;
            sum += node.coefficient * q;
        }
        Ok(sum)
    }

    /// The Taylor polynomial standing in for the circle integral.
    pub fn evaluate_circular(&self, z: ComplexPoint) -> ComplexPoint {
        horner(&self.circular_coeffs, z)
    }

    pub fn evaluate(&self, z: ComplexPoint) -> Result<ComplexPoint> {
        Ok(self.evaluate_slit(z)? + self.evaluate_circular(z))
    }

    /// Pointwise evaluation in parallel; output order follows `points`.
    pub fn evaluate_many(&self, points: &[ComplexPoint]) -> Result<Vec<ComplexPoint>> {
        points.par_iter().map(|&z| self.evaluate(z)).collect()
    }

    /// Slit-part error `(1/2 pi i) sum w jump(zeta) R phi(z)/phi(zeta) / (zeta - z)`
    /// split into the `|zeta| < eps` and `|zeta| >= eps` node sets.
    pub fn slit_error_split(&self, z: ComplexPoint) -> Result<ErrorSplit> {
        let phi_z = self.phi_at(z)?;
        let eps = self.scheme.epsilon_split();
        let mut split = ErrorSplit { near: Complex64::new(0.0, 0.0), far: Complex64::new(0.0, 0.0) };
        for node in &self.slit {
            let Some(phi_zeta) = node.phi else { continue };
            if phi_z.is_zero() {
                continue;
            }
            let r = fastdec_factor(self.fastdec_degree, &node.square, z);
            let ratio = phi_z.mul_raw(&r);
            let ratio = Complex64::from_polar(
                (ratio.log_magnitude - phi_zeta.log_magnitude).exp(),
                ratio.phase - phi_zeta.phase,
            );
            let term = node.coefficient * ratio / (Complex64::new(node.zeta, 0.0) - z);
            if node.zeta.abs() < eps {
                split.near += term;
            } else {
                split.far += term;
            }
        }
        Ok(split)
    }
}
