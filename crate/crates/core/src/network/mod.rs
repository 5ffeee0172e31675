//! One-hidden-layer MLP with per-neuron activations and several output taps.
//!
//! Neuron `j` sees `y_j = α_j x + ξ_j`; output `k` is
//! `z_k = ξ̃_k + Σ_j α̃_{k,j} Act_j(y_j)`.

mod model;

pub use model::{load_model, save_model};

use rayon::prelude::*;

use crate::activation::Activation;
use crate::error::{Error, Result};
use crate::numeric::CompensatedSum;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HiddenNeuron {
    /// Input weight `α_j`.
    pub weight: f64,
    /// Input bias `ξ_j`.
    pub bias: f64,
    pub activation: Activation,
}

impl HiddenNeuron {
    pub fn new(weight: f64, bias: f64, activation: Activation) -> Self {
        HiddenNeuron {
            weight,
            bias,
            activation,
        }
    }

    #[inline]
    pub fn response(&self, x: f64) -> f64 {
        self.activation.apply(self.weight * x + self.bias)
    }
}

/// Affine read-out for one output dimension.
#[derive(Debug, Clone, PartialEq)]
pub struct OutputTap {
    /// One weight per hidden neuron.
    pub weights: Vec<f64>,
    /// Accumulated output bias.
    pub bias: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Network {
    neurons: Vec<HiddenNeuron>,
    outputs: Vec<OutputTap>,
    method: String,
    n: usize,
}

impl Network {
    /// Assembles a network, checking that every tap has one finite weight
    /// per neuron.
    pub fn new(
        neurons: Vec<HiddenNeuron>,
        outputs: Vec<OutputTap>,
        method: impl Into<String>,
        n: usize,
    ) -> Result<Self> {
        if neurons.is_empty() {
            return Err(Error::usage("network needs at least one hidden neuron"));
        }
        if outputs.is_empty() {
            return Err(Error::usage("network needs at least one output tap"));
        }
        for (j, neuron) in neurons.iter().enumerate() {
            if !neuron.weight.is_finite() || !neuron.bias.is_finite() {
                return Err(Error::domain(format!("neuron {j} has a non-finite weight or bias")));
            }
        }
        for (k, tap) in outputs.iter().enumerate() {
            if tap.weights.len() != neurons.len() {
                return Err(Error::usage(format!(
                    "output {k} has {} weights for {} neurons",
                    tap.weights.len(),
                    neurons.len()
                )));
            }
            if !tap.bias.is_finite() || tap.weights.iter().any(|w| !w.is_finite()) {
                return Err(Error::domain(format!("output {k} has a non-finite weight or bias")));
            }
        }
        Ok(Network {
            neurons,
            outputs,
            method: method.into(),
            n,
        })
    }

    pub fn neurons(&self) -> &[HiddenNeuron] {
        &self.neurons
    }

    pub fn outputs(&self) -> &[OutputTap] {
        &self.outputs
    }

    pub fn neuron_count(&self) -> usize {
        self.neurons.len()
    }

    pub fn output_dim(&self) -> usize {
        self.outputs.len()
    }

    /// Construction tag, e.g. `linear-relu`.
    pub fn method(&self) -> &str {
        &self.method
    }

    /// Number of knot subintervals the network was built for.
    pub fn n(&self) -> usize {
        self.n
    }

    /// Evaluates every output at `x`. Inputs outside `[0, 1]` are allowed
    /// and extrapolate.
    pub fn forward(&self, x: f64) -> Result<Vec<f64>> {
        if !x.is_finite() {
            return Err(Error::domain(format!("network input {x} is not finite")));
        }
        let hidden: Vec<f64> = self.neurons.iter().map(|n| n.response(x)).collect();
        Ok(self
            .outputs
            .iter()
            .map(|tap| {
                let mut acc = CompensatedSum::new();
                acc.add(tap.bias);
                for (w, a) in tap.weights.iter().zip(&hidden) {
                    acc.add(w * a);
                }
                acc.value()
            })
            .collect())
    }

    /// Row `i` holds `forward(grid[i])`. Rows are computed independently, so
    /// the result does not depend on how the work is split across threads.
    pub fn forward_grid(&self, grid: &[f64]) -> Result<Vec<Vec<f64>>> {
        if grid.is_empty() {
            return Err(Error::usage("evaluation grid is empty"));
        }
        grid.par_iter().map(|&x| self.forward(x)).collect()
    }

    /// A single-output network for output `k`, sharing the hidden layer.
    pub fn select_output(&self, k: usize) -> Result<Network> {
        let tap = self
            .outputs
            .get(k)
            .ok_or_else(|| Error::usage(format!("output {k} out of range for {} outputs", self.outputs.len())))?;
        Ok(Network {
            neurons: self.neurons.clone(),
            outputs: vec![tap.clone()],
            method: self.method.clone(),
            n: self.n,
        })
    }
}
