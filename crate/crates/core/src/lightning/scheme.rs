use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::fastdec::{eval_reference, LogComplex};
use crate::geometry::AnchoredSquare;
use crate::{ComplexPoint, Error, Result};

/// Poles `beta_j = -e^{-sigma j / sqrt(n)}` clustered toward the corner,
/// mirrored interpolation nodes `alpha_j = -beta_j` (with `alpha_0 = 0`),
/// and the split radius `eps = |beta_{n-1}|`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LightningScheme {
    n: usize,
    sigma: f64,
    poles: Vec<f64>,
    nodes: Vec<f64>,
    epsilon_split: f64,
}

impl LightningScheme {
    pub fn new(n: usize, sigma: f64) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidParameter("scheme size must be >= 1".into()));
        }
        if !(sigma > 0.0 && sigma.is_finite()) {
            return Err(Error::InvalidParameter(format!("sigma must be positive, got {sigma}")));
        }
        let root = (n as f64).sqrt();
        let decay = |j: usize| (-sigma * j as f64 / root).exp();
        let poles: Vec<f64> = (0..n).map(|j| -decay(j)).collect();
        let nodes = (0..n).map(|j| if j == 0 { 0.0 } else { -poles[j] }).collect();
        Ok(Self { n, sigma, poles, nodes, epsilon_split: decay(n - 1) })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn poles(&self) -> &[f64] {
        &self.poles
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn epsilon_split(&self) -> f64 {
        self.epsilon_split
    }

    /// `phi(z) = prod (z - alpha_j) / prod (z - beta_j)` in log-space.
    pub fn eval_phi(&self, z: ComplexPoint) -> Result<LogComplex> {
        let mut acc = LogComplex::ONE;
        for (&alpha, &beta) in self.nodes.iter().zip(&self.poles) {
            let den = z - beta;
            if den.re == 0.0 && den.im == 0.0 {
                return Err(Error::EvaluationAtPole(z));
            }
            let num = LogComplex::from_complex(z - alpha);
            let den = LogComplex::from_complex(den);
            acc = acc.mul_raw(&LogComplex { log_magnitude: num.log_magnitude - den.log_magnitude, phase: num.phase - den.phase });
        }
        Ok(acc.wrapped())
    }

    /// `|z - alpha_j| / |z - beta_j|` for every `j`.
    pub fn factor_moduli(&self, z: ComplexPoint) -> Vec<f64> {
        self.nodes
            .iter()
            .zip(&self.poles)
            .map(|(&a, &b)| (z - a).norm() / (z - b).norm())
            .collect()
    }
}

/// Smallest `|zeta - z| / max(|zeta|, |z|)` the kernel accepts.
pub const DIAGONAL_GUARD: f64 = 1e-14;

fn on_diagonal(zeta: ComplexPoint, z: ComplexPoint) -> bool {
    (zeta - z).norm() < DIAGONAL_GUARD * zeta.norm().max(z.norm())
}

/// `ln |R|` and phase of the anchored fast-decreasing factor `R(zeta, z)`.
pub(crate) fn fastdec_factor(degree: u64, square: &AnchoredSquare, z: ComplexPoint) -> LogComplex {
    eval_reference(degree / 3, square.local(z) / (3.0 * square.half_side()))
}

/// `q(zeta, z) = (1 - R(zeta, z) phi(z) / phi(zeta)) / (zeta - z)`, the
/// combined form of
/// `(phi(zeta) - phi(z)) / (phi(zeta)(zeta - z)) + phi(z)(1 - R) / (phi(zeta)(zeta - z))`.
///
/// `phi_zeta` is `None` when `zeta` is a pole of `phi` (so `1/phi(zeta) = 0`).
pub(crate) fn kernel_from_parts(
    zeta: ComplexPoint,
    z: ComplexPoint,
    phi_zeta: Option<LogComplex>,
    phi_z: LogComplex,
    r: LogComplex,
) -> Result<ComplexPoint> {
    let diff = zeta - z;
    if on_diagonal(zeta, z) || diff.norm() == 0.0 {
        return Err(Error::KernelDiagonal { zeta, z });
    }
    let ratio = match phi_zeta {
        Some(p) if !phi_z.is_zero() && !r.is_zero() => {
            let log_mag = phi_z.log_magnitude - p.log_magnitude + r.log_magnitude;
            Complex64::from_polar(log_mag.exp(), phi_z.phase - p.phase + r.phase)
        }
        _ => Complex64::new(0.0, 0.0),
    };
    Ok((1.0 - ratio) / diff)
}

/// The modified Cauchy kernel with the fast-decreasing factor anchored at
/// `square` (whose anchor should be `zeta`) and degree parameter
/// `fastdec_degree` (`R = R_{[fastdec_degree/3]}`; `0` gives `R = 1`).
pub fn eval_kernel_q(
    scheme: &LightningScheme,
    fastdec_degree: u64,
    square: &AnchoredSquare,
    zeta: ComplexPoint,
    z: ComplexPoint,
) -> Result<ComplexPoint> {
    let phi_zeta = match scheme.eval_phi(zeta) {
        Ok(p) if p.is_zero() => {
            return Err(Error::InvalidParameter(format!(
                "kernel needs phi(zeta) != 0, got zeta = {zeta}"
            )))
        }
        Ok(p) => Some(p),
        Err(Error::EvaluationAtPole(_)) => None,
        Err(e) => return Err(e),
    };
    let phi_z = scheme.eval_phi(z)?;
    kernel_from_parts(zeta, z, phi_zeta, phi_z, fastdec_factor(fastdec_degree, square, z))
}
