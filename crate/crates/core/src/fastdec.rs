//! Fast-decreasing polynomials `R_n(z) = ((1+z)(1+z^2))^n`.
//!
//! `R_n` is bounded by one on the reference square
//! `S_{1/3} = {-2/3 <= Re z <= 0, |Im z| <= 1/3}`, stays bounded on an
//! `O(1/n)` enlargement of it and decays geometrically deep inside. All
//! evaluation is done in log-space so that `n` in the hundreds of thousands
//! never overflows.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::geometry::{anchor_square, AnchoredSquare, ConvexDomain, EvaluationGrid};
use crate::{ComplexPoint, Result};

/// Half side of the reference square every anchored square is mapped onto.
pub const REFERENCE_HALF_SIDE: f64 = 1.0 / 3.0;

/// Wraps an angle into `(-pi, pi]`.
pub fn wrap_phase(angle: f64) -> f64 {
    let mut a = angle.rem_euclid(2.0 * PI);
    if a > PI {
        a -= 2.0 * PI;
    }
    a
}

/// A complex number stored as `(ln |w|, arg w)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LogComplex {
    /// `-inf` exactly when the value is zero.
    pub log_magnitude: f64,
    pub phase: f64,
}

impl LogComplex {
    pub const ZERO: Self = Self { log_magnitude: f64::NEG_INFINITY, phase: 0.0 };
    pub const ONE: Self = Self { log_magnitude: 0.0, phase: 0.0 };

    pub fn from_complex(w: ComplexPoint) -> Self {
        if w.re == 0.0 && w.im == 0.0 {
            return Self::ZERO;
        }
        Self { log_magnitude: w.norm().ln(), phase: w.arg() }
    }

    pub fn is_zero(&self) -> bool {
        self.log_magnitude == f64::NEG_INFINITY
    }

    pub fn modulus(&self) -> f64 {
        self.log_magnitude.exp()
    }

    pub fn to_complex(&self) -> ComplexPoint {
        if self.is_zero() {
            return Complex64::new(0.0, 0.0);
        }
        Complex64::from_polar(self.log_magnitude.exp(), self.phase)
    }

    /// Integer power; `w^0 = 1` including `w = 0`.
    pub fn powu(&self, n: u64) -> Self {
        if n == 0 {
            return Self::ONE;
        }
        if self.is_zero() {
            return Self::ZERO;
        }
        let n = n as f64;
        Self { log_magnitude: n * self.log_magnitude, phase: wrap_phase(n * self.phase) }
    }

    /// Product without phase wrapping; call [`LogComplex::wrapped`] once at the end.
    pub fn mul_raw(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::ZERO;
        }
        Self {
            log_magnitude: self.log_magnitude + other.log_magnitude,
            phase: self.phase + other.phase,
        }
    }

    pub fn wrapped(self) -> Self {
        if self.is_zero() {
            return Self::ZERO;
        }
        Self { log_magnitude: self.log_magnitude, phase: wrap_phase(self.phase) }
    }
}

/// `r(z) = (1 + z)(1 + z^2)`.
pub fn eval_base(z: ComplexPoint) -> ComplexPoint {
    (1.0 + z) * (1.0 + z * z)
}

/// `R_n(z) = r(z)^n` in log-space.
pub fn eval_reference(n: u64, z: ComplexPoint) -> LogComplex {
    if n == 0 {
        return LogComplex::ONE;
    }
    let a = LogComplex::from_complex(1.0 + z);
    let b = LogComplex::from_complex(1.0 + z * z);
    let r = a.mul_raw(&b);
    if r.is_zero() {
        return LogComplex::ZERO;
    }
    let n = n as f64;
    LogComplex { log_magnitude: n * r.log_magnitude, phase: wrap_phase(n * r.phase) }
}

/// `R_{[n/3]}` composed with the rigid motion and scaling that carries an
/// anchored square onto `S_{1/3}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AnchoredFastDec {
    degree_param: u64,
    square: AnchoredSquare,
}

impl AnchoredFastDec {
    pub fn new(degree_param: u64, square: AnchoredSquare) -> Result<Self> {
        if degree_param == 0 {
            return Err(crate::Error::InvalidParameter("degree parameter must be >= 1".into()));
        }
        Ok(Self { degree_param, square })
    }

    pub fn degree_param(&self) -> u64 {
        self.degree_param
    }

    /// Degree of the underlying polynomial, `3 [n/3]`.
    pub fn degree(&self) -> u64 {
        3 * (self.degree_param / 3)
    }

    pub fn square(&self) -> &AnchoredSquare {
        &self.square
    }

    /// Reference-square coordinate `e^{-i theta}(z - zeta) / (3 lambda)`.
    pub fn reference_point(&self, z: ComplexPoint) -> ComplexPoint {
        self.square.local(z) / (3.0 * self.square.half_side())
    }
}

pub fn eval_anchored(fd: &AnchoredFastDec, z: ComplexPoint) -> LogComplex {
    eval_reference(fd.degree_param / 3, fd.reference_point(z))
}

/// Square data for the `z^2`-composed polynomials on a bowtie: rotation
/// `Theta(zeta^2)` and half side, both taken from the convex image domain.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BowtieParams {
    pub rotation: f64,
    pub half_side: f64,
}

impl BowtieParams {
    /// Anchors `zeta^2` against the convex image `image` of the bowtie under
    /// `z -> z^2`.
    pub fn for_image<D: ConvexDomain + ?Sized>(
        image: &D,
        zeta: ComplexPoint,
        half_side: f64,
    ) -> Result<Self> {
        let sq = anchor_square(image, zeta * zeta, half_side)?;
        Ok(Self { rotation: sq.rotation(), half_side })
    }
}

/// `R_n(e^{-i Theta(zeta^2)}(z^2 - zeta^2))` with the same `[n/3]` and
/// scaling convention as [`eval_anchored`]; `degree_param` is passed through
/// unchanged.
pub fn eval_bowtie(
    degree_param: u64,
    zeta: ComplexPoint,
    z: ComplexPoint,
    params: &BowtieParams,
) -> Result<LogComplex> {
    let square = AnchoredSquare::new(zeta * zeta, params.rotation, params.half_side)?;
    let fd = AnchoredFastDec::new(degree_param, square)?;
    Ok(eval_anchored(&fd, z * z))
}

/// Numerical bounds on `R_n` over the reference square.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct BoundReport {
    pub n: u64,
    /// `sup |R_n|` over `S_{1/3}`.
    pub sup_inner: f64,
    /// `sup |R_n|` over the `1/n`-neighbourhood of `S_{1/3}`.
    pub sup_extended: f64,
    /// `(eps, -ln|R_n(z_eps)| / n)` at probes with `d(z_eps, boundary) = eps / 3`.
    pub probes: Vec<(f64, f64)>,
}

impl BoundReport {
    /// `ln sup_extended`, the constant `c3` in `(1 + c3/n)^n <= e^{c3}`.
    pub fn extension_constant(&self) -> f64 {
        self.sup_extended.ln()
    }
}

/// Probe depths used by [`certify_bounds`]; `1.0` is the centre of `S_{1/3}`.
pub const PROBE_DEPTHS: [f64; 3] = [0.25, 0.5, 1.0];

fn sup_modulus(n: u64, grid: &EvaluationGrid) -> f64 {
    grid.points
        .par_iter()
        .map(|&z| eval_reference(n, z).log_magnitude)
        .reduce(|| f64::NEG_INFINITY, f64::max)
        .exp()
}

/// Samples `|R_n|` on a `density x density` lattice of `S_{1/3}` and of its
/// `1/n`-neighbourhood, and measures the interior decay exponent.
pub fn certify_bounds(n: u64, density: usize) -> Result<BoundReport> {
    if n == 0 {
        return Err(crate::Error::InvalidParameter("n must be >= 1".into()));
    }
    if density < 10 {
        return Err(crate::Error::InvalidParameter(format!(
            "grid density must be >= 10, got {density}"
        )));
    }
    let l = REFERENCE_HALF_SIDE;
    let inner = EvaluationGrid::rectangle(-2.0 * l, 0.0, -l, l, density);
    let pad = 1.0 / n as f64;
    let extended = EvaluationGrid::rectangle(-2.0 * l - pad, pad, -l - pad, l + pad, density);
    let probes = PROBE_DEPTHS
        .iter()
        .map(|&eps| {
            let z = Complex64::new(-eps * l, 0.0);
            (eps, -eval_reference(n, z).log_magnitude / n as f64)
        })
        .collect();
    Ok(BoundReport {
        n,
        sup_inner: sup_modulus(n, &inner),
        sup_extended: sup_modulus(n, &extended),
        probes,
    })
}
