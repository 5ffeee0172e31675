//! Built-in target functions on `[0, 1]`, with closed-form derivatives.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Target {
    /// `f ≡ 1`
    Const1,
    /// `2x + 1`
    Affine,
    /// `sin(2πx) + x/2`
    Sin2Pi,
    /// `1 / (1 + 25 (x - 1/2)²)`
    Runge,
    /// `|x - 1/2|`, kinked at the midpoint.
    AbsDev,
}

impl Target {
    pub const ALL: [Target; 5] = [
        Target::Const1,
        Target::Affine,
        Target::Sin2Pi,
        Target::Runge,
        Target::AbsDev,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Target::Const1 => "const1",
            Target::Affine => "affine",
            Target::Sin2Pi => "sin2pi",
            Target::Runge => "runge",
            Target::AbsDev => "absdev",
        }
    }

    pub fn formula(&self) -> &'static str {
        match self {
            Target::Const1 => "1",
            Target::Affine => "2x + 1",
            Target::Sin2Pi => "sin(2πx) + 0.5x",
            Target::Runge => "1 / (1 + 25(x - 0.5)^2)",
            Target::AbsDev => "|x - 0.5|",
        }
    }

    pub fn eval(&self, x: f64) -> f64 {
        match self {
            Target::Const1 => 1.0,
            Target::Affine => 2.0 * x + 1.0,
            Target::Sin2Pi => (2.0 * PI * x).sin() + 0.5 * x,
            Target::Runge => 1.0 / (1.0 + 25.0 * (x - 0.5) * (x - 0.5)),
            Target::AbsDev => (x - 0.5).abs(),
        }
    }

    /// First derivative; for `absdev` the one-sided value `sign(x - 1/2)`.
    pub fn derivative(&self, x: f64) -> f64 {
        match self {
            Target::Const1 => 0.0,
            Target::Affine => 2.0,
            Target::Sin2Pi => 2.0 * PI * (2.0 * PI * x).cos() + 0.5,
            Target::Runge => {
                let d = x - 0.5;
                let den = 1.0 + 25.0 * d * d;
                -50.0 * d / (den * den)
            }
            Target::AbsDev => {
                if x >= 0.5 {
                    1.0
                } else {
                    -1.0
                }
            }
        }
    }

    /// `max |f|` on `[0, 1]`.
    pub fn sup_abs(&self) -> f64 {
        match self {
            Target::Const1 => 1.0,
            Target::Affine => 3.0,
            // f' = 0 at cos(2πx) = -1/(4π); the maximum sits in the first quarter.
            Target::Sin2Pi => {
                let x = (-1.0 / (4.0 * PI)).acos() / (2.0 * PI);
                self.eval(x)
            }
            Target::Runge => 1.0,
            Target::AbsDev => 0.5,
        }
    }

    /// Whether piecewise-linear interpolation reproduces the target exactly.
    pub fn is_affine(&self) -> bool {
        matches!(self, Target::Const1 | Target::Affine)
    }
}

impl fmt::Display for Target {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Target {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Target::ALL
            .into_iter()
            .find(|t| t.name() == s)
            .ok_or_else(|| Error::usage(format!("unknown target `{s}`")))
    }
}
