//! Stochastic gradient descent with straight-through binarization.

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

use crate::data::Dataset;
use crate::error::{Error, Result};

use super::network::{backward_batch, forward_batch};
use super::{predict, NetworkSpec, TrainConfig};

const LAMBDA_FLOOR: f64 = 1e-3;

/// One row of the training log.
#[derive(Debug, Clone, PartialEq)]
pub struct EpochStats {
    pub epoch: usize,
    pub loss: f64,
    pub train_acc: f64,
    pub test_acc: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct TrainResult {
    pub network: NetworkSpec,
    pub history: Vec<EpochStats>,
}

/// Fraction of dataset samples the network classifies correctly.
pub fn accuracy(net: &NetworkSpec, dataset: &Dataset) -> Result<f64> {
    if dataset.images.is_empty() {
        return Err(Error::EmptyDataset);
    }
    let mut correct = 0usize;
    for (image, &label) in dataset.images.iter().zip(&dataset.labels) {
        if predict(net, image)? == label {
            correct += 1;
        }
    }
    Ok(correct as f64 / dataset.images.len() as f64)
}

fn check_dataset(net: &NetworkSpec, dataset: &Dataset) -> Result<()> {
    if dataset.images.is_empty() {
        return Err(Error::EmptyDataset);
    }
    let classes = dataset.labels.iter().copied().max().map_or(0, |m| m + 1);
    if classes > net.class_count {
        return Err(Error::ClassCountMismatch {
            classes,
            outputs: net.output_count(),
        });
    }
    Ok(())
}

/// Trains a copy of the network with seeded SGD.
///
/// Weights follow the straight-through estimator: the forward pass binarizes
/// the latent weights, gradients flow back as if the sign function were the
/// identity, and latent values are clipped to `[-1, 1]` after each step.
/// Normalization angles are refit from every batch and folded into the
/// moving averages; each neuron's `lambda` descends its own gradient.
pub fn train(
    net: &NetworkSpec,
    train_set: &Dataset,
    test_set: Option<&Dataset>,
    cfg: &TrainConfig,
) -> Result<TrainResult> {
    net.validate()?;
    check_dataset(net, train_set)?;
    if let Some(test) = test_set {
        check_dataset(net, test)?;
    }
    if cfg.batch_size == 0 {
        return Err(Error::Format("batch size must be at least 1".into()));
    }

    let mut model = net.clone();
    for layer in &mut model.layers {
        if let Some(bn) = &mut layer.bn {
            for params in bn {
                params.momentum = cfg.momentum;
            }
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut history = Vec::with_capacity(cfg.epochs);
    let sample_count = train_set.images.len();

    for epoch in 1..=cfg.epochs {
        let mut order: Vec<usize> = (0..sample_count).collect();
        order.shuffle(&mut rng);

        let mut loss_sum = 0.0;
        let mut batch_count = 0usize;
        for chunk in order.chunks(cfg.batch_size) {
            let images: Vec<Vec<f64>> =
                chunk.iter().map(|&i| train_set.images[i].clone()).collect();
            let labels: Vec<usize> = chunk.iter().map(|&i| train_set.labels[i]).collect();

            let cache = forward_batch(&model, &images, true)?;
            let (loss, grads) = backward_batch(&model, &cache, &labels, true)?;
            loss_sum += loss;
            batch_count += 1;

            for (l, layer) in model.layers.iter_mut().enumerate() {
                if let (Some(bn), Some(fits)) = (&mut layer.bn, &cache.bn[l]) {
                    for (j, (params, fit)) in bn.iter_mut().zip(fits).enumerate() {
                        params.t = fit.t;
                        params.theta = fit.theta;
                        params.gamma = fit.gamma;
                        let m = params.momentum;
                        params.running_theta = m * params.running_theta + (1.0 - m) * fit.theta;
                        params.running_gamma = m * params.running_gamma + (1.0 - m) * fit.gamma;
                        params.lambda = (params.lambda
                            - cfg.learning_rate * grads.lambdas[l][j])
                            .max(LAMBDA_FLOOR);
                    }
                }
            }
            for (l, layer) in model.layers.iter_mut().enumerate() {
                for (j, neuron) in layer.neurons.iter_mut().enumerate() {
                    for (w, g) in neuron.latent_mut().iter_mut().zip(&grads.weights[l][j]) {
                        *w = (*w - cfg.learning_rate * g).clamp(-1.0, 1.0);
                    }
                }
            }
        }

        let train_acc = accuracy(&model, train_set)?;
        let test_acc = test_set.map(|t| accuracy(&model, t)).transpose()?;
        history.push(EpochStats {
            epoch,
            loss: loss_sum / batch_count.max(1) as f64,
            train_acc,
            test_acc,
        });
    }

    Ok(TrainResult {
        network: model,
        history,
    })
}
