//! Classical forward/backward engine.
//!
//! Exact expectation-based forward propagation for both neuron kinds and the
//! quantum-compatible batch normalization, plus gradient-based training with
//! binarized weights. The engine is the golden reference every synthesized
//! circuit is verified against.

mod amp;
mod bn;
pub mod gradcheck;
pub mod loss;
mod model_io;
mod network;
mod prob;
mod train;

pub use amp::{amp_embed, amp_forward, AmplitudeEmbedding};
pub use bn::{bn_fit_batch, bn_forward, bn_forward_running};
pub use model_io::{load_model, model_from_json, model_to_json, save_model};
pub use network::{network_forward, network_forward_trace, predict};
pub use prob::{prob_forward, prob_forward_bruteforce};
pub use train::{accuracy, train, EpochStats, TrainResult};

pub(crate) use amp::amp_value_and_weight_grad;
pub(crate) use bn::BnBatch;
pub(crate) use prob::prob_value_and_grads;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Checks a two-point input probability (chance of reading the -1 outcome).
pub(crate) fn check_probability(p: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::Format(format!("probability {p} outside [0, 1]")));
    }
    Ok(())
}

/// Binarized weight vector: real latent weights carried through training,
/// signs used everywhere else. Ties binarize to +1.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BinaryWeights {
    latent: Vec<f64>,
}

impl BinaryWeights {
    pub fn from_latent(latent: Vec<f64>) -> Self {
        Self { latent }
    }

    pub fn from_signs(signs: &[i8]) -> Result<Self> {
        if signs.iter().any(|s| *s != 1 && *s != -1) {
            return Err(Error::NonBinaryWeight);
        }
        Ok(Self {
            latent: signs.iter().map(|s| *s as f64).collect(),
        })
    }

    pub fn len(&self) -> usize {
        self.latent.len()
    }

    pub fn is_empty(&self) -> bool {
        self.latent.is_empty()
    }

    pub fn latent(&self) -> &[f64] {
        &self.latent
    }

    pub fn latent_mut(&mut self) -> &mut [f64] {
        &mut self.latent
    }

    /// Binarized weights as integers, `+1` iff the latent weight is >= 0.
    pub fn signs(&self) -> Vec<i8> {
        self.latent.iter().map(|w| if *w >= 0.0 { 1 } else { -1 }).collect()
    }

    /// Binarized weights as `±1.0`.
    pub fn signs_f64(&self) -> Vec<f64> {
        self.latent.iter().map(|w| if *w >= 0.0 { 1.0 } else { -1.0 }).collect()
    }
}

/// Batch-normalization parameters for one neuron.
///
/// `theta`/`gamma` are the values applied in the forward pass; the running
/// fields carry the moving averages used at inference time. `lambda` is the
/// trainable spread control of the individual-adjustment stage.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BnParams {
    /// Branch selector fitted from the batch mean: `false` recenters low
    /// means upward (OR composition), `true` scales high means down (AND).
    pub t: bool,
    pub theta: f64,
    pub gamma: f64,
    pub lambda: f64,
    pub momentum: f64,
    pub running_theta: f64,
    pub running_gamma: f64,
}

impl Default for BnParams {
    fn default() -> Self {
        Self {
            t: false,
            theta: 0.0,
            gamma: std::f64::consts::PI,
            lambda: 1.0,
            momentum: 0.1,
            running_theta: 0.0,
            running_gamma: std::f64::consts::PI,
        }
    }
}

/// Neuron layer kind.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum LayerKind {
    /// Two-point probabilistic layer: one qbit per input.
    Prob,
    /// Amplitude-encoded layer: `2^k` inputs on `k` qbits.
    Amp,
}

/// One layer: neuron weights plus optional per-neuron batch normalization.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LayerSpec {
    pub kind: LayerKind,
    pub neurons: Vec<BinaryWeights>,
    pub bn: Option<Vec<BnParams>>,
}

impl LayerSpec {
    pub fn input_width(&self) -> usize {
        self.neurons.first().map_or(0, |n| n.len())
    }

    pub fn neuron_count(&self) -> usize {
        self.neurons.len()
    }

    pub fn validate(&self) -> Result<()> {
        if self.neurons.is_empty() {
            return Err(Error::EmptyInput);
        }
        let m = self.input_width();
        if self.neurons.iter().any(|n| n.len() != m) {
            return Err(Error::LengthMismatch {
                expected: m,
                got: self.neurons.iter().map(|n| n.len()).find(|l| *l != m).unwrap(),
            });
        }
        if self.kind == LayerKind::Amp && !m.is_power_of_two() {
            return Err(Error::NotPowerOfTwo(m));
        }
        if let Some(bn) = &self.bn {
            if bn.len() != self.neurons.len() {
                return Err(Error::LengthMismatch {
                    expected: self.neurons.len(),
                    got: bn.len(),
                });
            }
        }
        Ok(())
    }
}

/// Network family, reflected in the model file's `kind` field.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NetworkKind {
    /// All layers probabilistic (`pnet`).
    Prob,
    /// Amplitude-encoded first layer, probabilistic rest (`hnet`).
    Hybrid,
}

/// Full model: layer stack, expected input shape and class count.
#[derive(Debug, Clone, PartialEq)]
pub struct NetworkSpec {
    pub layers: Vec<LayerSpec>,
    pub input_shape: (usize, usize),
    pub class_count: usize,
}

impl NetworkSpec {
    pub fn kind(&self) -> NetworkKind {
        match self.layers.first() {
            Some(layer) if layer.kind == LayerKind::Amp => NetworkKind::Hybrid,
            _ => NetworkKind::Prob,
        }
    }

    pub fn input_len(&self) -> usize {
        self.input_shape.0 * self.input_shape.1
    }

    pub fn output_count(&self) -> usize {
        self.layers.last().map_or(0, |l| l.neuron_count())
    }

    pub fn validate(&self) -> Result<()> {
        if self.layers.is_empty() {
            return Err(Error::EmptyInput);
        }
        for layer in &self.layers {
            layer.validate()?;
        }
        // only the first layer may be amplitude-encoded
        for layer in &self.layers[1..] {
            if layer.kind == LayerKind::Amp {
                return Err(Error::Format(
                    "amplitude-encoded layers are only supported in the first position".into(),
                ));
            }
        }
        if self.layers[0].input_width() != self.input_len() {
            return Err(Error::LengthMismatch {
                expected: self.input_len(),
                got: self.layers[0].input_width(),
            });
        }
        for pair in self.layers.windows(2) {
            if pair[1].input_width() != pair[0].neuron_count() {
                return Err(Error::LengthMismatch {
                    expected: pair[0].neuron_count(),
                    got: pair[1].input_width(),
                });
            }
        }
        let outputs = self.output_count();
        let ok = outputs == self.class_count || (outputs == 1 && self.class_count == 2);
        if !ok {
            return Err(Error::ClassCountMismatch {
                classes: self.class_count,
                outputs,
            });
        }
        Ok(())
    }

    /// Fresh network with latent weights drawn uniformly from `(-1, 1)`.
    pub fn random<R: Rng>(
        kind: NetworkKind,
        input_shape: (usize, usize),
        layer_sizes: &[usize],
        bn_enabled: bool,
        momentum: f64,
        rng: &mut R,
    ) -> Result<Self> {
        if layer_sizes.is_empty() {
            return Err(Error::EmptyInput);
        }
        let mut layers = Vec::with_capacity(layer_sizes.len());
        let mut width = input_shape.0 * input_shape.1;
        for (idx, &count) in layer_sizes.iter().enumerate() {
            let layer_kind = match (kind, idx) {
                (NetworkKind::Hybrid, 0) => LayerKind::Amp,
                _ => LayerKind::Prob,
            };
            let neurons = (0..count)
                .map(|_| {
                    BinaryWeights::from_latent(
                        (0..width).map(|_| rng.gen_range(-1.0..1.0)).collect(),
                    )
                })
                .collect();
            let bn = bn_enabled.then(|| {
                (0..count)
                    .map(|_| BnParams {
                        momentum,
                        ..BnParams::default()
                    })
                    .collect()
            });
            layers.push(LayerSpec {
                kind: layer_kind,
                neurons,
                bn,
            });
            width = count;
        }
        let outputs = *layer_sizes.last().unwrap();
        let class_count = if outputs == 1 { 2 } else { outputs };
        let net = Self {
            layers,
            input_shape,
            class_count,
        };
        net.validate()?;
        Ok(net)
    }
}

/// Hyper-parameters for `train`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    pub learning_rate: f64,
    pub batch_size: usize,
    pub epochs: usize,
    pub seed: u64,
    pub momentum: f64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            learning_rate: 0.3,
            batch_size: 32,
            epochs: 20,
            seed: 7,
            momentum: 0.1,
        }
    }
}

#[cfg(test)]
mod tests;
