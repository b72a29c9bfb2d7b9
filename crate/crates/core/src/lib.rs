//! Fast-decreasing polynomials and lightning rational approximation on
//! slit discs and convex sectors.
//!
//! The crate is organized bottom-up:
//!
//! * [`geometry`]: convex sectors and polygons, metric projection onto their
//!   boundary, anchored squares and evaluation grids.
//! * [`fastdec`]: the polynomials `((1+z)(1+z^2))^n` in log-space, their
//!   anchored and `z^2`-composed forms, and numerical bound certificates.
//! * [`lightning`]: exponentially clustered poles, the node function, the
//!   modified Cauchy kernel, graded slit quadrature and the assembled
//!   rational approximant.
//! * [`minimax`]: a discrete near-best polynomial baseline (Lawson iteration on
//!   an Arnoldi-orthogonalized basis).
//! * [`analysis`]: sup-norm errors, rate-law fits and convergence sweeps.

pub mod analysis;
pub mod error;
pub mod fastdec;
pub mod geometry;
pub mod lightning;
pub mod minimax;

pub use error::{Error, Result};
pub use fastdec::LogComplex;
pub use geometry::{AnchoredSquare, ConvexPolygon, Domain, EvaluationGrid, SectorDomain};
pub use lightning::{LightningScheme, RationalApproximant, SlitFunction, Target};

/// A point of the complex plane.
pub type ComplexPoint = num_complex::Complex64;
