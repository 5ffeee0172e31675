//! Weight constructions turning knot samples into networks.
//!
//! Every construction uses knot-relative pre-activations: a rising neuron
//! anchored at knot `i` has `α = 1/h`, `ξ = -x_i/h = -i`, a falling one has
//! `α = -1/h`, `ξ = i`. With `u = (x - x_j)/h` the per-knot groups are
//!
//! | method        | group response (before tap bias)          | tap bias   |
//! |---------------|-------------------------------------------|------------|
//! | linear-relu   | `r(u+1) - r(u) + r(1-u) - r(-u) = 1 + t(u)` | `-f(x_j)` |
//! | linear-ramp   | `r̃(u+1) + r̃(1-u) = 1 + t(u)`              | `-f(x_j)` |
//! | cubic         | `q(u+1) + q(1-u) = 1 + bump(u)`           | `-g(x_j)` |
//!
//! where `t` is the unit triangle and `bump` the cubic bump with support
//! `[-2, 2]`, value 1 at 0 and 0.5 at ±1.

use std::fmt;
use std::str::FromStr;

use crate::activation::{Activation, DEFAULT_INFLECTION_SLOPE};
use crate::error::{Error, Result};
use crate::grid::TargetSamples;
use crate::network::{HiddenNeuron, Network, OutputTap};
use crate::numeric::{solve_tridiagonal, CompensatedSum};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    Constant,
    LinearRelu,
    LinearRamp,
    Cubic,
    CubicSpaced,
}

impl Method {
    pub const ALL: [Method; 5] = [
        Method::Constant,
        Method::LinearRelu,
        Method::LinearRamp,
        Method::Cubic,
        Method::CubicSpaced,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Method::Constant => "constant",
            Method::LinearRelu => "linear-relu",
            Method::LinearRamp => "linear-ramp",
            Method::Cubic => "cubic",
            Method::CubicSpaced => "cubic-spaced",
        }
    }

    pub fn requires_even_n(&self) -> bool {
        matches!(self, Method::CubicSpaced)
    }

    /// Hidden-layer size for `n` subintervals.
    pub fn neuron_count(&self, n: usize) -> usize {
        match self {
            Method::Constant => n,
            Method::LinearRelu => 4 * (n + 1),
            Method::LinearRamp | Method::Cubic => 2 * (n + 1),
            Method::CubicSpaced => n + 2,
        }
    }

    /// Error order the classical piecewise polynomial of this degree attains.
    pub fn nominal_order(&self) -> u32 {
        match self {
            Method::Constant => 1,
            Method::LinearRelu | Method::LinearRamp => 2,
            Method::Cubic | Method::CubicSpaced => 4,
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Method::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| Error::usage(format!("unknown method `{s}`")))
    }
}

/// A construction method together with its cubic inflection slope.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MethodSpec {
    pub method: Method,
    pub slope: f64,
}

impl MethodSpec {
    pub fn new(method: Method) -> Self {
        MethodSpec {
            method,
            slope: DEFAULT_INFLECTION_SLOPE,
        }
    }

    pub fn with_slope(method: Method, slope: f64) -> Result<Self> {
        Activation::cubic(slope)?;
        Ok(MethodSpec { method, slope })
    }

    /// Checks that `n` is usable with this method.
    pub fn check_n(&self, n: usize) -> Result<()> {
        if n == 0 {
            return Err(Error::usage("N must be at least 1"));
        }
        if self.method.requires_even_n() && !n.is_multiple_of(2) {
            return Err(Error::usage("spaced design requires even N"));
        }
        Ok(())
    }

    pub fn build(&self, samples: &TargetSamples) -> Result<Network> {
        match self.method {
            Method::Constant => Ok(build_piecewise_constant(samples)),
            Method::LinearRelu => Ok(build_piecewise_linear_relu(samples)),
            Method::LinearRamp => Ok(build_piecewise_linear_ramp(samples)),
            Method::Cubic => build_piecewise_cubic_coupled(samples, self.slope),
            Method::CubicSpaced => build_piecewise_cubic_spaced(samples, self.slope),
        }
    }
}

fn rising(anchor: i64, n: f64, activation: Activation) -> HiddenNeuron {
    HiddenNeuron::new(n, -(anchor as f64), activation)
}

fn falling(anchor: i64, n: f64, activation: Activation) -> HiddenNeuron {
    HiddenNeuron::new(-n, anchor as f64, activation)
}

/// Assembles taps from per-neuron weight patterns: for output `k`, neuron
/// weight `pattern[i] * coeff[k]`, bias `-Σ coeff`.
fn assemble(neurons: Vec<HiddenNeuron>, per_group: &[f64], coeffs: &[Vec<f64>], method: Method, n: usize) -> Network {
    let q = coeffs[0].len();
    let outputs = (0..q)
        .map(|k| {
            let mut weights = Vec::with_capacity(neurons.len());
            let mut bias = CompensatedSum::new();
            for row in coeffs {
                let c = row[k];
                weights.extend(per_group.iter().map(|p| p * c));
                bias.add(-c);
            }
            OutputTap {
                weights,
                bias: bias.value(),
            }
        })
        .collect();
    Network::new(neurons, outputs, method.name(), n).expect("construction yields a well-formed network")
}

/// Step network realizing the piecewise-constant approximant
/// `Σ f(x_j) b_j(x)`: neuron `j` fires for `x ≥ x_j` and carries the jump
/// `f(x_j) - f(x_{j-1})`.
pub fn build_piecewise_constant(samples: &TargetSamples) -> Network {
    let grid = samples.grid();
    let n = grid.n();
    let inv_h = grid.inv_h();
    let neurons = (0..n as i64).map(|j| rising(j, inv_h, Activation::Step)).collect();
    let outputs = (0..samples.output_dim())
        .map(|k| {
            let weights = (0..n)
                .map(|j| {
                    let prev = if j == 0 { 0.0 } else { samples.row(j - 1)[k] };
                    samples.row(j)[k] - prev
                })
                .collect();
            OutputTap { weights, bias: 0.0 }
        })
        .collect();
    Network::new(neurons, outputs, Method::Constant.name(), n).expect("construction yields a well-formed network")
}

/// Four ReLU neurons per knot `j = 0..=N`, each group equal to
/// `f(x_j) t_j(x)` once the tap bias is added.
pub fn build_piecewise_linear_relu(samples: &TargetSamples) -> Network {
    let grid = samples.grid();
    let inv_h = grid.inv_h();
    let act = Activation::Relu;
    let neurons = (0..=grid.n() as i64)
        .flat_map(|j| {
            [
                rising(j - 1, inv_h, act),
                rising(j, inv_h, act),
                falling(j + 1, inv_h, act),
                falling(j, inv_h, act),
            ]
        })
        .collect();
    assemble(
        neurons,
        &[1.0, -1.0, 1.0, -1.0],
        samples.rows(),
        Method::LinearRelu,
        grid.n(),
    )
}

/// Two ramp neurons per knot: a rising ramp over `[x_{j-1}, x_j]` and a
/// falling one over `[x_j, x_{j+1}]`, which sum to the unit triangle plus one.
pub fn build_piecewise_linear_ramp(samples: &TargetSamples) -> Network {
    let grid = samples.grid();
    let inv_h = grid.inv_h();
    let act = Activation::Ramp;
    let neurons = (0..=grid.n() as i64)
        .flat_map(|j| [rising(j - 1, inv_h, act), falling(j + 1, inv_h, act)])
        .collect();
    assemble(neurons, &[1.0, 1.0], samples.rows(), Method::LinearRamp, grid.n())
}

/// Bump heights `g(x_j)` per output dimension.
#[derive(Debug, Clone, PartialEq)]
pub struct CouplingSolution {
    /// `g[k][j]` for output `k`, knot `j`.
    pub g: Vec<Vec<f64>>,
    /// Largest residual of the coupling equations.
    pub residual_max: f64,
}

impl CouplingSolution {
    /// Bump heights arranged like [`TargetSamples::rows`].
    pub fn rows(&self) -> Vec<Vec<f64>> {
        let knots = self.g[0].len();
        (0..knots).map(|j| self.g.iter().map(|col| col[j]).collect()).collect()
    }
}

/// Solves `g_j + (g_{j-1} + g_{j+1}) / 2 = f_j`, `j = 0..=N`, with
/// `g_{-1} = g_{N+1} = 0`.
///
/// The matrix is symmetric Toeplitz with eigenvalues
/// `1 + cos(kπ/(N+2)) > 0`, so elimination without pivoting is stable.
pub fn solve_coupling_system(rhs: &[f64]) -> Vec<f64> {
    let m = rhs.len();
    let off = vec![0.5; m.saturating_sub(1)];
    solve_tridiagonal(&off, &vec![1.0; m], &off, rhs).expect("coupling matrix is positive definite")
}

/// Max-norm residual of the coupling equations for a candidate `g`.
pub fn coupling_residual(g: &[f64], f: &[f64]) -> f64 {
    let m = g.len();
    (0..m)
        .map(|j| {
            let left = if j > 0 { g[j - 1] } else { 0.0 };
            let right = if j + 1 < m { g[j + 1] } else { 0.0 };
            (g[j] + 0.5 * (left + right) - f[j]).abs()
        })
        .fold(0.0, f64::max)
}

pub fn solve_bump_coupling(samples: &TargetSamples) -> CouplingSolution {
    let mut residual_max = 0.0f64;
    let g = (0..samples.output_dim())
        .map(|k| {
            let f = samples.column(k);
            let g = solve_coupling_system(&f);
            residual_max = residual_max.max(coupling_residual(&g, &f));
            g
        })
        .collect();
    CouplingSolution { g, residual_max }
}

fn bump_neurons(knots: impl Iterator<Item = i64>, inv_h: f64, q: Activation) -> Vec<HiddenNeuron> {
    knots
        .flat_map(|j| [rising(j - 1, inv_h, q), falling(j + 1, inv_h, q)])
        .collect()
}

/// One cubic bump per knot with heights from the coupling solve, so the
/// overlapping half-height tails of the neighbours are compensated and the
/// network interpolates `f` at every knot.
pub fn build_piecewise_cubic_coupled(samples: &TargetSamples, inflection_slope: f64) -> Result<Network> {
    let q = Activation::cubic(inflection_slope)?;
    let grid = samples.grid();
    let neurons = bump_neurons(0..=grid.n() as i64, grid.inv_h(), q);
    let coupling = solve_bump_coupling(samples);
    Ok(assemble(
        neurons,
        &[1.0, 1.0],
        &coupling.rows(),
        Method::Cubic,
        grid.n(),
    ))
}

/// Bumps at even knots only, with heights `f(x_j)`. Adjacent bumps meet at
/// the odd knots, each contributing half its height.
pub fn build_piecewise_cubic_spaced(samples: &TargetSamples, inflection_slope: f64) -> Result<Network> {
    let grid = samples.grid();
    if !grid.n().is_multiple_of(2) {
        return Err(Error::usage("spaced design requires even N"));
    }
    let q = Activation::cubic(inflection_slope)?;
    let neurons = bump_neurons((0..=grid.n() as i64).step_by(2), grid.inv_h(), q);
    let even_rows: Vec<Vec<f64>> = samples.rows().iter().step_by(2).cloned().collect();
    Ok(assemble(
        neurons,
        &[1.0, 1.0],
        &even_rows,
        Method::CubicSpaced,
        grid.n(),
    ))
}
