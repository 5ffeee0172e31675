//! Hidden-layer activation functions.
//!
//! The unit cubic `q` is 0 below `-1`, 1 above `1`, and in between a cubic
//! pinned by `q(-1) = 0` and the anti-symmetry `q(x) + q(-x) = 1`. Those two
//! conditions force `a2 = 0`, `a0 = 0.5` and `a1 + a3 = 0.5`, leaving the
//! slope at the inflection point (`a1`) as the single free parameter.

use crate::error::{Error, Result};

/// Inflection slope for which `q'(±1) = 0`, so `q` joins its plateaus with a
/// continuous first derivative.
pub const DEFAULT_INFLECTION_SLOPE: f64 = 0.75;

/// Largest slope for which `q` stays nondecreasing on `[-1, 1]`.
pub const MAX_INFLECTION_SLOPE: f64 = 0.75;

/// Coefficients of the unit cubic on `[-1, 1]`:
/// `q(x) = a3 x^3 + a2 x^2 + a1 x + a0`.
///
/// Only obtainable through [`solve_cubic_coefficients`], so every value
/// satisfies the constraint system.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CubicCoeffs {
    a0: f64,
    a1: f64,
    a2: f64,
    a3: f64,
}

impl CubicCoeffs {
    pub fn a0(&self) -> f64 {
        self.a0
    }

    pub fn a1(&self) -> f64 {
        self.a1
    }

    pub fn a2(&self) -> f64 {
        self.a2
    }

    pub fn a3(&self) -> f64 {
        self.a3
    }

    /// `(a0, a1, a2, a3)`.
    pub fn as_tuple(&self) -> (f64, f64, f64, f64) {
        (self.a0, self.a1, self.a2, self.a3)
    }

    /// The inflection slope this cubic was solved from.
    pub fn inflection_slope(&self) -> f64 {
        self.a1
    }

    /// The cubic polynomial itself, without the plateaus.
    #[inline]
    pub fn polynomial(&self, x: f64) -> f64 {
        ((self.a3 * x + self.a2) * x + self.a1) * x + self.a0
    }
}

/// Solves the unit cubic's constraint system for a given slope at the
/// inflection point `(0, 0.5)`.
///
/// Slopes outside `[0, 0.75]` make `q` non-monotone on `[-1, 1]` and are
/// rejected.
pub fn solve_cubic_coefficients(inflection_slope: f64) -> Result<CubicCoeffs> {
    if !(0.0..=MAX_INFLECTION_SLOPE).contains(&inflection_slope) {
        return Err(Error::domain(format!(
            "non-monotone cubic: inflection slope {inflection_slope} outside [0, {MAX_INFLECTION_SLOPE}]"
        )));
    }
    Ok(CubicCoeffs {
        a0: 0.5,
        a1: inflection_slope,
        a2: 0.0,
        a3: 0.5 - inflection_slope,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Activation {
    /// Unit step, closed at zero.
    Step,
    Relu,
    /// ReLU clipped at 1.
    Ramp,
    Cubic(CubicCoeffs),
}

impl Activation {
    pub fn cubic(inflection_slope: f64) -> Result<Self> {
        solve_cubic_coefficients(inflection_slope).map(Activation::Cubic)
    }

    /// Serialized tag: `step`, `relu`, `ramp` or `cubic`.
    pub fn kind_name(&self) -> &'static str {
        match self {
            Activation::Step => "step",
            Activation::Relu => "relu",
            Activation::Ramp => "ramp",
            Activation::Cubic(_) => "cubic",
        }
    }

    /// Evaluates the activation, rejecting non-finite input.
    pub fn eval(&self, x: f64) -> Result<f64> {
        if !x.is_finite() {
            return Err(Error::domain(format!("activation input {x} is not finite")));
        }
        Ok(self.apply(x))
    }

    /// Unchecked evaluation for the forward pass.
    #[inline]
    pub fn apply(&self, x: f64) -> f64 {
        match self {
            Activation::Step => {
                if x >= 0.0 {
                    1.0
                } else {
                    0.0
                }
            }
            Activation::Relu => x.max(0.0),
            Activation::Ramp => x.clamp(0.0, 1.0),
            Activation::Cubic(c) => {
                if x <= -1.0 {
                    0.0
                } else if x >= 1.0 {
                    1.0
                } else {
                    c.polynomial(x)
                }
            }
        }
    }
}

/// Free-function form of [`Activation::eval`].
pub fn eval_activation(act: &Activation, x: f64) -> Result<f64> {
    act.eval(x)
}
