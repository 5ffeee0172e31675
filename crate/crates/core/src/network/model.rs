//! JSON model documents.
//!
//! ```json
//! {"method": "linear-relu", "n": 4,
//!  "neurons": [{"weight": 4.0, "bias": 1.0, "activation": {"kind": "relu"}}, ...],
//!  "outputs": [{"weights": [...], "bias": -2.5}],
//!  "knots": {"n": 4}}
//! ```
//!
//! Cubic activations store only `a1`; the other coefficients are re-derived
//! on load. Numbers are written in shortest round-trip form and parsed
//! exactly, so a save/load cycle is bit-exact.

use serde::{Deserialize, Serialize};

use super::{HiddenNeuron, Network, OutputTap};
use crate::activation::Activation;
use crate::error::{Error, Result};

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ModelDoc {
    method: String,
    n: usize,
    neurons: Vec<NeuronDoc>,
    outputs: Vec<TapDoc>,
    knots: KnotsDoc,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct NeuronDoc {
    weight: f64,
    bias: f64,
    activation: ActivationDoc,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ActivationDoc {
    kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    a1: Option<f64>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TapDoc {
    weights: Vec<f64>,
    bias: f64,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct KnotsDoc {
    n: usize,
}

impl From<&Activation> for ActivationDoc {
    fn from(act: &Activation) -> Self {
        ActivationDoc {
            kind: act.kind_name().to_string(),
            a1: match act {
                Activation::Cubic(c) => Some(c.a1()),
                _ => None,
            },
        }
    }
}

impl ActivationDoc {
    fn decode(&self, path: &str) -> Result<Activation> {
        let plain = |act| match self.a1 {
            None => Ok(act),
            Some(_) => Err(Error::format(format!("{path}.a1"), "only cubic activations take a1")),
        };
        match self.kind.as_str() {
            "step" => plain(Activation::Step),
            "relu" => plain(Activation::Relu),
            "ramp" => plain(Activation::Ramp),
            "cubic" => {
                let a1 = self
                    .a1
                    .ok_or_else(|| Error::format(format!("{path}.a1"), "cubic activation needs a1"))?;
                Activation::cubic(a1).map_err(|e| Error::format(format!("{path}.a1"), e.to_string()))
            }
            other => Err(Error::format(
                format!("{path}.kind"),
                format!("unknown activation kind `{other}`"),
            )),
        }
    }
}

/// Serializes a network to a pretty-printed JSON model document.
pub fn save_model(net: &Network) -> String {
    let doc = ModelDoc {
        method: net.method.clone(),
        n: net.n,
        neurons: net
            .neurons
            .iter()
            .map(|n| NeuronDoc {
                weight: n.weight,
                bias: n.bias,
                activation: (&n.activation).into(),
            })
            .collect(),
        outputs: net
            .outputs
            .iter()
            .map(|t| TapDoc {
                weights: t.weights.clone(),
                bias: t.bias,
            })
            .collect(),
        knots: KnotsDoc { n: net.n },
    };
    serde_json::to_string_pretty(&doc).expect("model document serializes")
}

/// Parses a model document. Every failure is a [`Error::Format`] naming the
/// offending field.
pub fn load_model(text: &str) -> Result<Network> {
    let de = &mut serde_json::Deserializer::from_str(text);
    let doc: ModelDoc = serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        Error::format(path, e.into_inner().to_string())
    })?;

    if doc.knots.n != doc.n {
        return Err(Error::format(
            "knots.n",
            format!("knot count {} disagrees with n = {}", doc.knots.n, doc.n),
        ));
    }
    if doc.neurons.is_empty() {
        return Err(Error::format("neurons", "at least one neuron required"));
    }
    if doc.outputs.is_empty() {
        return Err(Error::format("outputs", "at least one output tap required"));
    }

    let mut neurons = Vec::with_capacity(doc.neurons.len());
    for (j, n) in doc.neurons.iter().enumerate() {
        let activation = n.activation.decode(&format!("neurons[{j}].activation"))?;
        neurons.push(HiddenNeuron::new(n.weight, n.bias, activation));
    }
    let outputs = doc
        .outputs
        .into_iter()
        .enumerate()
        .map(|(k, t)| {
            if t.weights.len() != neurons.len() {
                return Err(Error::format(
                    format!("outputs[{k}].weights"),
                    format!("{} weights for {} neurons", t.weights.len(), neurons.len()),
                ));
            }
            Ok(OutputTap {
                weights: t.weights,
                bias: t.bias,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    Network::new(neurons, outputs, doc.method, doc.n).map_err(|e| Error::format("", e.to_string()))
}

impl Network {
    pub fn to_json(&self) -> String {
        save_model(self)
    }

    pub fn from_json(text: &str) -> Result<Network> {
        load_model(text)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn sample() -> Network {
        let neurons = vec![
            HiddenNeuron::new(4.0, 1.0, Activation::Relu),
            HiddenNeuron::new(-4.0, 3.0, Activation::cubic(0.3).unwrap()),
            HiddenNeuron::new(0.1, -0.7, Activation::Step),
            HiddenNeuron::new(1.0 / 3.0, 2e-300, Activation::Ramp),
        ];
        let outputs = vec![OutputTap {
            weights: vec![0.1, -0.2, 1e22, std::f64::consts::PI],
            bias: -0.0,
        }];
        Network::new(neurons, outputs, "mixed", 4).unwrap()
    }

    fn replace(doc: &str, from: &str, to: &str) -> String {
        assert!(doc.contains(from), "{from} not in document");
        doc.replacen(from, to, 1)
    }

    #[test]
    fn round_trip_is_bit_exact() {
        let net = sample();
        let back = load_model(&save_model(&net)).unwrap();
        assert_eq!(back, net);
        assert_eq!(back.outputs()[0].bias.to_bits(), (-0.0f64).to_bits());
    }

    #[test]
    fn cubic_stores_only_slope() {
        let text = save_model(&sample());
        let value: serde_json::Value = serde_json::from_str(&text).unwrap();
        let act = &value["neurons"][1]["activation"];
        assert_eq!(act, &serde_json::json!({"kind": "cubic", "a1": 0.3}));
        assert_eq!(value["neurons"][0]["activation"], serde_json::json!({"kind": "relu"}));
        assert_eq!(value["knots"]["n"], 4);
    }

    #[test]
    fn unknown_kind() {
        let text = replace(&save_model(&sample()), "\"relu\"", "\"quadratic\"");
        match load_model(&text) {
            Err(Error::Format { path, message }) => {
                assert_eq!(path, "neurons[0].activation.kind");
                assert!(message.contains("quadratic"));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn tap_length_mismatch() {
        let mut value: serde_json::Value = serde_json::from_str(&save_model(&sample())).unwrap();
        value["outputs"][0]["weights"].as_array_mut().unwrap().pop();
        match load_model(&value.to_string()) {
            Err(Error::Format { path, .. }) => assert_eq!(path, "outputs[0].weights"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn malformed_documents() {
        let base = save_model(&sample());
        let cases = [
            ("{", ""),
            (
                &replace(&base, "\"weight\": 4.0", "\"weight\": \"x\""),
                "neurons[0].weight",
            ),
            (
                &replace(&base, "\"a1\": 0.3", "\"a1\": 0.9"),
                "neurons[1].activation.a1",
            ),
            (&replace(&base, "\"a1\": 0.3", "\"a2\": 0.3"), "neurons[1].activation"),
            (
                &replace(&base, "\"knots\": {\n    \"n\": 4", "\"knots\": {\n    \"n\": 5"),
                "knots.n",
            ),
        ];
        for (text, want) in cases {
            match load_model(text) {
                Err(Error::Format { path, .. }) => {
                    assert!(path.starts_with(want), "path `{path}` for expected `{want}`")
                }
                other => panic!("expected format error, got {other:?}"),
            }
        }
    }

    proptest! {
        #[test]
        fn arbitrary_floats_round_trip(
            ws in prop::collection::vec(any::<f64>().prop_filter("finite", |v| v.is_finite()), 1..20),
            bias in any::<f64>().prop_filter("finite", |v| v.is_finite()),
        ) {
            let neurons = ws.iter().map(|&w| HiddenNeuron::new(w, -w, Activation::Relu)).collect();
            let net = Network::new(neurons, vec![OutputTap { weights: ws.clone(), bias }], "p", 3).unwrap();
            let back = load_model(&save_model(&net)).unwrap();
            for (a, b) in back.outputs()[0].weights.iter().zip(&ws) {
                prop_assert_eq!(a.to_bits(), b.to_bits());
            }
            prop_assert_eq!(back.outputs()[0].bias.to_bits(), bias.to_bits());
        }
    }
}
