//! Finite-difference validation of the analytic gradients.
//!
//! The training loss is differentiated with the fitted normalization
//! statistics held constant (only `lambda` keeps its path into the
//! individual-adjustment angle). The oracle here evaluates exactly that
//! frozen-statistics loss under central differences, so analytic and
//! numerical gradients must agree wherever the math is smooth.

use crate::error::Result;

use super::bn::{batch_stage, gamma_terms};
use super::network::{backward_batch, check_image, forward_batch};
use super::{amp_embed, amp_value_and_weight_grad, loss, LayerKind, NetworkSpec};

#[derive(Debug, Clone, Copy)]
pub struct GradCheckReport {
    pub max_rel_err: f64,
    pub checked: usize,
}

/// Frozen per-neuron normalization: branch, recentering angle and the base
/// recentered outputs feeding the gamma formula.
struct FrozenBn {
    t: bool,
    theta: f64,
    zhat_base: Vec<f64>,
}

fn frozen_loss(
    net: &NetworkSpec,
    images: &[Vec<f64>],
    labels: &[usize],
    frozen: &[Option<Vec<FrozenBn>>],
) -> Result<f64> {
    let samples = images.len();
    let mut activations: Vec<Vec<f64>> = images.to_vec();
    for (l, layer) in net.layers.iter().enumerate() {
        let units: Option<Vec<Vec<f64>>> = match layer.kind {
            LayerKind::Amp => Some(
                activations
                    .iter()
                    .map(|a| amp_embed(a).map(|e| e.unit))
                    .collect::<Result<_>>()?,
            ),
            LayerKind::Prob => None,
        };
        let mut next = vec![vec![0.0; layer.neuron_count()]; samples];
        for (j, neuron) in layer.neurons.iter().enumerate() {
            let w = neuron.latent().to_vec();
            let z: Vec<f64> = (0..samples)
                .map(|i| match &units {
                    Some(u) => amp_value_and_weight_grad(&u[i], &w).0,
                    None => super::prob::expectation_real(&activations[i], &w),
                })
                .collect();
            match &frozen[l] {
                Some(stats) => {
                    let stat = &stats[j];
                    let lambda = layer.bn.as_ref().expect("frozen stats imply bn")[j].lambda;
                    let (gamma, _) = gamma_terms(&stat.zhat_base, lambda);
                    let g = (gamma / 2.0).sin().powi(2);
                    for i in 0..samples {
                        let zhat = batch_stage(z[i], stat.t, stat.theta);
                        next[i][j] = (zhat * g).clamp(0.0, 1.0);
                    }
                }
                None => {
                    for i in 0..samples {
                        next[i][j] = z[i].clamp(0.0, 1.0);
                    }
                }
            }
        }
        activations = next;
    }

    let mut total = 0.0;
    for (outputs, &label) in activations.iter().zip(labels) {
        total += loss::loss_and_grad(outputs, label, net.class_count).0;
    }
    Ok(total / samples as f64)
}

/// Compares analytic gradients of the full forward (loss with respect to
/// every latent weight and every `lambda`) against central finite
/// differences of the frozen-statistics loss.
pub fn check_gradients(
    net: &NetworkSpec,
    images: &[Vec<f64>],
    labels: &[usize],
    epsilon: f64,
) -> Result<GradCheckReport> {
    net.validate()?;
    for image in images {
        check_image(net, image)?;
    }
    let cache = forward_batch(net, images, false)?;
    let (_, grads) = backward_batch(net, &cache, labels, false)?;

    let frozen: Vec<Option<Vec<FrozenBn>>> = cache
        .bn
        .iter()
        .map(|layer_fit| {
            layer_fit.as_ref().map(|fits| {
                fits.iter()
                    .map(|fit| FrozenBn {
                        t: fit.t,
                        theta: fit.theta,
                        zhat_base: fit.zhat.clone(),
                    })
                    .collect()
            })
        })
        .collect();

    let mut max_rel_err: f64 = 0.0;
    let mut checked = 0usize;
    let mut compare = |analytic: f64, fd: f64| {
        checked += 1;
        let scale = analytic.abs().max(fd.abs());
        if scale > 1e-10 {
            max_rel_err = max_rel_err.max((analytic - fd).abs() / scale);
        }
    };

    let mut work = net.clone();
    for l in 0..net.layers.len() {
        for j in 0..net.layers[l].neuron_count() {
            for wi in 0..net.layers[l].input_width() {
                let base = work.layers[l].neurons[j].latent()[wi];
                work.layers[l].neurons[j].latent_mut()[wi] = base + epsilon;
                let plus = frozen_loss(&work, images, labels, &frozen)?;
                work.layers[l].neurons[j].latent_mut()[wi] = base - epsilon;
                let minus = frozen_loss(&work, images, labels, &frozen)?;
                work.layers[l].neurons[j].latent_mut()[wi] = base;
                compare(grads.weights[l][j][wi], (plus - minus) / (2.0 * epsilon));
            }
            if net.layers[l].bn.is_some() {
                let base = work.layers[l].bn.as_ref().unwrap()[j].lambda;
                work.layers[l].bn.as_mut().unwrap()[j].lambda = base + epsilon;
                let plus = frozen_loss(&work, images, labels, &frozen)?;
                work.layers[l].bn.as_mut().unwrap()[j].lambda = base - epsilon;
                let minus = frozen_loss(&work, images, labels, &frozen)?;
                work.layers[l].bn.as_mut().unwrap()[j].lambda = base;
                compare(grads.lambdas[l][j], (plus - minus) / (2.0 * epsilon));
            }
        }
    }

    Ok(GradCheckReport {
        max_rel_err,
        checked,
    })
}
