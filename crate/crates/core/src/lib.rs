//! Feedforward construction of one-hidden-layer MLPs whose outputs are
//! exactly piecewise constant, piecewise linear or piecewise cubic
//! approximants of a sampled function on `[0, 1]`.
//!
//! The crate is split along the life of an approximant:
//!
//! * [`activation`] – unit step, ReLU, ramp and the unit cubic `q`.
//! * [`grid`] – uniform knot grids and target samples at the knots.
//! * [`network`] – the MLP value type, its forward pass and model documents.
//! * [`builders`] – weight constructions for every method, including the
//!   tridiagonal coupling solve used by the cubic design.
//! * [`oracle`] – independent kernel-sum approximants, tensor products and
//!   kernel least-squares fitting.
//! * [`analysis`] – error metrics, equivalence checks and convergence orders.
//!
//! ```
//! use polynet::{builders, grid::{KnotGrid, TargetSamples}};
//!
//! let grid = KnotGrid::new(8).unwrap();
//! let samples = TargetSamples::from_fn(grid, |x| 2.0 * x + 1.0);
//! let net = builders::build_piecewise_linear_relu(&samples);
//! let y = net.forward(0.3).unwrap();
//! assert!((y[0] - 1.6).abs() < 1e-12);
//! ```

pub mod activation;
pub mod analysis;
pub mod builders;
pub mod error;
pub mod grid;
pub mod network;
pub mod numeric;
pub mod oracle;
pub mod targets;

pub use activation::{Activation, CubicCoeffs, DEFAULT_INFLECTION_SLOPE};
pub use builders::{Method, MethodSpec};
pub use error::{Error, Result};
pub use grid::{KnotGrid, TargetSamples};
pub use network::{load_model, save_model, HiddenNeuron, Network, OutputTap};
pub use oracle::{KernelKind, PiecewiseOracle, Spacing};
pub use targets::Target;
