//! Lightning rational approximation on the slit disc.
//!
//! A target `f`, analytic in the unit disc slit along `[-1, 0]` and Hölder
//! continuous at the corner `0`, is written as a Cauchy integral over the
//! circle plus an integral of its jump across the slit. The circle part is
//! replaced by a truncated Taylor polynomial; the slit part is discretized
//! with the modified kernel `q(zeta, z)`, a rational function of `z` whose
//! poles sit at exponentially clustered points `beta_j` on the slit.

mod approximant;
mod quadrature;
mod scheme;
mod target;

pub use approximant::{
    build_approximant, build_approximant_with, circular_part, ApproximantConfig,
    ApproximantMetadata, ErrorSplit, RationalApproximant, DEFAULT_SIGMA,
};
pub use quadrature::{gauss_legendre, slit_quadrature, QuadratureRule, DEFAULT_MIN_SCALE};
pub use scheme::{eval_kernel_q, LightningScheme};
pub use target::{LinearCombination, SlitFunction, Target};
