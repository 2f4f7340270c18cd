//! Layer-by-layer propagation and the training-time batch pass.

use crate::error::{Error, Result};

use super::bn::{batch_stage, fit_batch};
use super::{
    amp_embed, amp_value_and_weight_grad, bn_forward_running, loss, prob_value_and_grads,
    BnBatch, LayerKind, NetworkSpec,
};

pub(crate) fn check_image(net: &NetworkSpec, image: &[f64]) -> Result<()> {
    if image.len() != net.input_len() {
        let (h, w) = net.input_shape;
        return Err(Error::ShapeMismatch {
            expected_h: h,
            expected_w: w,
            got_h: image.len(),
            got_w: 1,
        });
    }
    if image.iter().any(|v| !(0.0..=1.0).contains(v)) {
        return Err(Error::Format("image values outside [0, 1]".into()));
    }
    Ok(())
}

/// Per-layer post-normalization activations at inference (running statistics,
/// binarized weights).
pub fn network_forward_trace(net: &NetworkSpec, image: &[f64]) -> Result<Vec<Vec<f64>>> {
    net.validate()?;
    check_image(net, image)?;
    let mut activations = image.to_vec();
    let mut trace = Vec::with_capacity(net.layers.len());
    for layer in &net.layers {
        let unit = match layer.kind {
            LayerKind::Amp => Some(amp_embed(&activations)?.unit),
            LayerKind::Prob => None,
        };
        let mut outputs = Vec::with_capacity(layer.neuron_count());
        for (j, neuron) in layer.neurons.iter().enumerate() {
            let w = neuron.signs_f64();
            let z = match &unit {
                Some(u) => amp_value_and_weight_grad(u, &w).0,
                None => super::prob::expectation_real(&activations, &w),
            };
            let z = match &layer.bn {
                Some(bn) => bn_forward_running(z, &bn[j]),
                None => z,
            };
            outputs.push(z.clamp(0.0, 1.0));
        }
        trace.push(outputs.clone());
        activations = outputs;
    }
    Ok(trace)
}

/// Class probabilities for one image at inference.
pub fn network_forward(net: &NetworkSpec, image: &[f64]) -> Result<Vec<f64>> {
    let trace = network_forward_trace(net, image)?;
    let outputs = trace.last().expect("validated network has layers");
    Ok(loss::class_probabilities(outputs, net.class_count))
}

/// Predicted class for one image at inference.
pub fn predict(net: &NetworkSpec, image: &[f64]) -> Result<usize> {
    Ok(loss::argmax(&network_forward(net, image)?))
}

// --- training-time batch pass ----------------------------------------------

/// Forward state of one batch, kept for the backward pass.
pub(crate) struct BatchCache {
    /// Inputs seen by each layer: `[layer][sample][feature]`.
    pub layer_inputs: Vec<Vec<Vec<f64>>>,
    /// First-layer embeddings per sample when the layer is amplitude-encoded.
    pub units: Option<Vec<Vec<f64>>>,
    /// Raw neuron outputs: `[layer][neuron][sample]`.
    pub pre_bn: Vec<Vec<Vec<f64>>>,
    /// Batch-normalization fit per layer and neuron.
    pub bn: Vec<Option<Vec<BnBatch>>>,
    /// Final outputs: `[sample][output-neuron]`.
    pub outputs: Vec<Vec<f64>>,
}

/// Runs the training forward pass: current-batch normalization statistics,
/// weights taken as signs (`binarize`) or raw latent values.
pub(crate) fn forward_batch(
    net: &NetworkSpec,
    images: &[Vec<f64>],
    binarize: bool,
) -> Result<BatchCache> {
    if images.is_empty() {
        return Err(Error::EmptyDataset);
    }
    for image in images {
        check_image(net, image)?;
    }
    let samples = images.len();
    let mut activations: Vec<Vec<f64>> = images.to_vec();
    let mut cache = BatchCache {
        layer_inputs: Vec::new(),
        units: None,
        pre_bn: Vec::new(),
        bn: Vec::new(),
        outputs: Vec::new(),
    };

    for (l, layer) in net.layers.iter().enumerate() {
        cache.layer_inputs.push(activations.clone());
        let units: Option<Vec<Vec<f64>>> = match layer.kind {
            LayerKind::Amp => Some(
                activations
                    .iter()
                    .map(|a| amp_embed(a).map(|e| e.unit))
                    .collect::<Result<_>>()?,
            ),
            LayerKind::Prob => None,
        };

        let mut pre_bn = vec![vec![0.0; samples]; layer.neuron_count()];
        for (j, neuron) in layer.neurons.iter().enumerate() {
            let w = if binarize {
                neuron.signs_f64()
            } else {
                neuron.latent().to_vec()
            };
            for (i, input) in activations.iter().enumerate() {
                pre_bn[j][i] = match &units {
                    Some(u) => amp_value_and_weight_grad(&u[i], &w).0,
                    None => super::prob::expectation_real(input, &w),
                };
            }
        }

        let bn_fits = match &layer.bn {
            Some(bn_params) => {
                let fits: Vec<BnBatch> = pre_bn
                    .iter()
                    .zip(bn_params)
                    .map(|(zs, params)| fit_batch(zs, params.lambda))
                    .collect::<Result<_>>()?;
                Some(fits)
            }
            None => None,
        };

        let mut next: Vec<Vec<f64>> = vec![vec![0.0; layer.neuron_count()]; samples];
        for j in 0..layer.neuron_count() {
            for i in 0..samples {
                let v = match &bn_fits {
                    Some(fits) => fits[j].out[i],
                    None => pre_bn[j][i],
                };
                next[i][j] = v.clamp(0.0, 1.0);
            }
        }

        if l == 0 {
            cache.units = units;
        }
        cache.pre_bn.push(pre_bn);
        cache.bn.push(bn_fits);
        activations = next;
    }
    cache.outputs = activations;
    Ok(cache)
}

/// Gradient accumulators for one batch.
pub(crate) struct BatchGrads {
    /// `[layer][neuron][weight]`
    pub weights: Vec<Vec<Vec<f64>>>,
    /// `[layer][neuron]`
    pub lambdas: Vec<Vec<f64>>,
}

/// Mean loss over the batch plus gradients with respect to weights (evaluated
/// at the values used in `forward_batch`) and the per-neuron `lambda`.
///
/// Fitted normalization angles are treated as constants; `lambda` keeps its
/// path through the individual-adjustment angle.
pub(crate) fn backward_batch(
    net: &NetworkSpec,
    cache: &BatchCache,
    labels: &[usize],
    binarize: bool,
) -> Result<(f64, BatchGrads)> {
    let samples = cache.outputs.len();
    if labels.len() != samples {
        return Err(Error::LengthMismatch {
            expected: samples,
            got: labels.len(),
        });
    }
    let scale = 1.0 / samples as f64;
    let mut total_loss = 0.0;
    // d loss / d layer-output, [sample][neuron]
    let mut d_out: Vec<Vec<f64>> = Vec::with_capacity(samples);
    for (outputs, &label) in cache.outputs.iter().zip(labels) {
        let (loss_value, grad) = loss::loss_and_grad(outputs, label, net.class_count);
        total_loss += loss_value * scale;
        d_out.push(grad.iter().map(|g| g * scale).collect());
    }

    let mut grads = BatchGrads {
        weights: net
            .layers
            .iter()
            .map(|l| vec![vec![0.0; l.input_width()]; l.neuron_count()])
            .collect(),
        lambdas: net.layers.iter().map(|l| vec![0.0; l.neuron_count()]).collect(),
    };

    for (l, layer) in net.layers.iter().enumerate().rev() {
        let inputs = &cache.layer_inputs[l];
        let neuron_count = layer.neuron_count();

        // through batch normalization
        let mut d_z = vec![vec![0.0; neuron_count]; samples];
        match &cache.bn[l] {
            Some(fits) => {
                for (j, fit) in fits.iter().enumerate() {
                    let g = (fit.gamma / 2.0).sin().powi(2);
                    let dgdgamma = 0.5 * fit.gamma.sin();
                    let s_theta = (fit.theta / 2.0).sin().powi(2);
                    let dz_factor = if fit.t { s_theta } else { 1.0 - s_theta };
                    for i in 0..samples {
                        let upstream = d_out[i][j];
                        grads.lambdas[l][j] +=
                            upstream * fit.zhat[i] * dgdgamma * fit.dgamma_dlambda;
                        d_z[i][j] = upstream * g * dz_factor;
                    }
                }
            }
            None => {
                for i in 0..samples {
                    d_z[i].clone_from_slice(&d_out[i]);
                }
            }
        }

        // through the neurons
        let mut d_input = vec![vec![0.0; layer.input_width()]; samples];
        for (j, neuron) in layer.neurons.iter().enumerate() {
            let w = if binarize {
                neuron.signs_f64()
            } else {
                neuron.latent().to_vec()
            };
            match layer.kind {
                LayerKind::Amp => {
                    let units = cache.units.as_ref().expect("amp layer cached embeddings");
                    for i in 0..samples {
                        let (_, dw) = amp_value_and_weight_grad(&units[i], &w);
                        for (wi, dwi) in grads.weights[l][j].iter_mut().zip(&dw) {
                            *wi += d_z[i][j] * dwi;
                        }
                    }
                }
                LayerKind::Prob => {
                    for i in 0..samples {
                        let (_, dw, dp) = prob_value_and_grads(&inputs[i], &w);
                        for (wi, dwi) in grads.weights[l][j].iter_mut().zip(&dw) {
                            *wi += d_z[i][j] * dwi;
                        }
                        for (pi, dpi) in d_input[i].iter_mut().zip(&dp) {
                            *pi += d_z[i][j] * dpi;
                        }
                    }
                }
            }
        }
        d_out = d_input;
    }

    Ok((total_loss, grads))
}
