//! Model file format (JSON).
//!
//! ```json
//! {"kind":"hnet","input_shape":[4,4],
//!  "layers":[{"kind":"ULYR","weights":[[1,-1,...]],"latent":[[0.3,...]],
//!             "bn":[{"t":0,"theta":0.4,"gamma":2.9,"lambda":1.02}]}]}
//! ```
//!
//! Saved `theta`/`gamma` are the running (inference) values; loading a model
//! seeds both the active and running parameters from them.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

use super::{BinaryWeights, BnParams, LayerKind, LayerSpec, NetworkKind, NetworkSpec};

#[derive(Serialize, Deserialize)]
struct FileBn {
    t: u8,
    theta: f64,
    gamma: f64,
    lambda: f64,
}

#[derive(Serialize, Deserialize)]
struct FileLayer {
    kind: String,
    weights: Vec<Vec<i8>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    latent: Option<Vec<Vec<f64>>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    bn: Option<Vec<FileBn>>,
}

#[derive(Serialize, Deserialize)]
struct FileModel {
    kind: String,
    input_shape: [usize; 2],
    layers: Vec<FileLayer>,
}

pub fn model_to_json(net: &NetworkSpec) -> Result<String> {
    net.validate()?;
    let kind = match net.kind() {
        NetworkKind::Hybrid => "hnet",
        NetworkKind::Prob => "pnet",
    };
    let layers = net
        .layers
        .iter()
        .map(|layer| FileLayer {
            kind: match layer.kind {
                LayerKind::Amp => "ULYR".into(),
                LayerKind::Prob => "PLYR".into(),
            },
            weights: layer.neurons.iter().map(|n| n.signs()).collect(),
            latent: Some(layer.neurons.iter().map(|n| n.latent().to_vec()).collect()),
            bn: layer.bn.as_ref().map(|bn| {
                bn.iter()
                    .map(|p| FileBn {
                        t: p.t as u8,
                        theta: p.running_theta,
                        gamma: p.running_gamma,
                        lambda: p.lambda,
                    })
                    .collect()
            }),
        })
        .collect();
    let file = FileModel {
        kind: kind.into(),
        input_shape: [net.input_shape.0, net.input_shape.1],
        layers,
    };
    Ok(serde_json::to_string_pretty(&file)?)
}

pub fn model_from_json(json: &str) -> Result<NetworkSpec> {
    let file: FileModel = serde_json::from_str(json)?;
    let mut layers = Vec::with_capacity(file.layers.len());
    for (idx, layer) in file.layers.iter().enumerate() {
        let kind = match layer.kind.as_str() {
            "ULYR" => LayerKind::Amp,
            "PLYR" => LayerKind::Prob,
            other => return Err(Error::Format(format!("unknown layer kind `{other}`"))),
        };
        let mut neurons = Vec::with_capacity(layer.weights.len());
        for (j, signs) in layer.weights.iter().enumerate() {
            let neuron = match &layer.latent {
                Some(latent) => {
                    let values = latent.get(j).ok_or_else(|| {
                        Error::Format(format!("layer {idx}: latent row {j} missing"))
                    })?;
                    let candidate = BinaryWeights::from_latent(values.clone());
                    if candidate.signs() != *signs {
                        return Err(Error::Format(format!(
                            "layer {idx} neuron {j}: latent weights disagree with stored signs"
                        )));
                    }
                    candidate
                }
                None => BinaryWeights::from_signs(signs)?,
            };
            neurons.push(neuron);
        }
        let bn = layer
            .bn
            .as_ref()
            .map(|entries| {
                entries
                    .iter()
                    .map(|e| {
                        if e.t > 1 {
                            return Err(Error::Format("bn field t must be 0 or 1".into()));
                        }
                        Ok(BnParams {
                            t: e.t == 1,
                            theta: e.theta,
                            gamma: e.gamma,
                            lambda: e.lambda,
                            momentum: 0.1,
                            running_theta: e.theta,
                            running_gamma: e.gamma,
                        })
                    })
                    .collect::<Result<Vec<_>>>()
            })
            .transpose()?;
        layers.push(LayerSpec { kind, neurons, bn });
    }

    let outputs = layers.last().map_or(0, |l| l.neurons.len());
    let class_count = if outputs == 1 { 2 } else { outputs };
    let net = NetworkSpec {
        layers,
        input_shape: (file.input_shape[0], file.input_shape[1]),
        class_count,
    };
    net.validate()?;
    let expected_kind = match net.kind() {
        NetworkKind::Hybrid => "hnet",
        NetworkKind::Prob => "pnet",
    };
    if file.kind != expected_kind {
        return Err(Error::Format(format!(
            "model kind `{}` does not match its layer stack (expected `{expected_kind}`)",
            file.kind
        )));
    }
    Ok(net)
}

pub fn save_model(net: &NetworkSpec, path: &Path) -> Result<()> {
    std::fs::write(path, model_to_json(net)?)?;
    Ok(())
}

pub fn load_model(path: &Path) -> Result<NetworkSpec> {
    model_from_json(&std::fs::read_to_string(path)?)
}
