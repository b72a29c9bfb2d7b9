use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::{ComplexPoint, Error};

/// A function analytic in the slit disc, described by its boundary values
/// and its jump across the slit `[-1, 0]`.
pub trait SlitFunction: Send + Sync {
    /// `f(z)` on the closed slit disc. On the slit the sign of `z.im`
    /// (including `-0.0`) selects the side.
    fn value(&self, z: ComplexPoint) -> ComplexPoint;

    /// `f_+(t) - f_-(t)` for `t` in `(-1, 0)`, upper minus lower side.
    fn jump(&self, t: f64) -> ComplexPoint;

    /// `delta` in `f(z) = O(|z|^delta)` at the corner.
    fn holder_exponent(&self) -> f64;

    /// True when the jump vanishes identically.
    fn is_jump_free(&self) -> bool {
        false
    }
}

/// The built-in catalogue of targets.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Target {
    Zero,
    /// Principal `z^{1/2}`.
    Zsqrt,
    /// Principal `z^{0.3}`.
    Zpow03,
    /// `z^2`, with no jump.
    EntireZ2,
    /// `z^{1/2} e^z`.
    ZsqrtTimesExp,
}

impl Target {
    pub const ALL: [Target; 5] =
        [Target::Zero, Target::Zsqrt, Target::Zpow03, Target::EntireZ2, Target::ZsqrtTimesExp];

    pub fn id(&self) -> &'static str {
        match self {
            Target::Zero => "zero",
            Target::Zsqrt => "zsqrt",
            Target::Zpow03 => "zpow03",
            Target::EntireZ2 => "entire-z2",
            Target::ZsqrtTimesExp => "zsqrt-times-exp",
        }
    }
}

impl fmt::Display for Target {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

impl FromStr for Target {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Target::ALL
            .into_iter()
            .find(|t| t.id() == s)
            .ok_or_else(|| Error::InvalidParameter(format!("unknown target '{s}'")))
    }
}

fn principal_power(z: ComplexPoint, exponent: f64) -> ComplexPoint {
    if z.re == 0.0 && z.im == 0.0 {
        return Complex64::new(0.0, 0.0);
    }
    Complex64::from_polar(z.norm().powf(exponent), exponent * z.im.atan2(z.re))
}

impl SlitFunction for Target {
    fn value(&self, z: ComplexPoint) -> ComplexPoint {
        match self {
            Target::Zero => Complex64::new(0.0, 0.0),
            Target::Zsqrt => principal_power(z, 0.5),
            Target::Zpow03 => principal_power(z, 0.3),
            Target::EntireZ2 => z * z,
            Target::ZsqrtTimesExp => principal_power(z, 0.5) * z.exp(),
        }
    }

    fn jump(&self, t: f64) -> ComplexPoint {
        let s = t.abs();
        match self {
            Target::Zero | Target::EntireZ2 => Complex64::new(0.0, 0.0),
            Target::Zsqrt => Complex64::new(0.0, 2.0 * s.sqrt()),
            Target::Zpow03 => Complex64::new(0.0, 2.0 * (0.3 * PI).sin() * s.powf(0.3)),
            Target::ZsqrtTimesExp => Complex64::new(0.0, 2.0 * s.sqrt() * t.exp()),
        }
    }

    fn holder_exponent(&self) -> f64 {
        match self {
            Target::Zero | Target::EntireZ2 => 2.0,
            Target::Zsqrt | Target::ZsqrtTimesExp => 0.5,
            Target::Zpow03 => 0.3,
        }
    }

    fn is_jump_free(&self) -> bool {
        matches!(self, Target::Zero | Target::EntireZ2)
    }
}

/// `a f + b g`.
pub struct LinearCombination<F, G> {
    pub a: ComplexPoint,
    pub f: F,
    pub b: ComplexPoint,
    pub g: G,
}

impl<F: SlitFunction, G: SlitFunction> SlitFunction for LinearCombination<F, G> {
    fn value(&self, z: ComplexPoint) -> ComplexPoint {
        self.a * self.f.value(z) + self.b * self.g.value(z)
    }

    fn jump(&self, t: f64) -> ComplexPoint {
        self.a * self.f.jump(t) + self.b * self.g.jump(t)
    }

    fn holder_exponent(&self) -> f64 {
        self.f.holder_exponent().min(self.g.holder_exponent())
    }

    fn is_jump_free(&self) -> bool {
        self.f.is_jump_free() && self.g.is_jump_free()
    }
}
