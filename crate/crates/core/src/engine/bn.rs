//! Quantum-compatible batch normalization.
//!
//! Two stages: batch adjustment recenters the batch mean of a neuron's
//! outputs to 0.5, individual adjustment scales each output by
//! `sin^2(gamma/2)` where `gamma` depends on a trainable `lambda`. Both
//! stages stay within probability space so they lower directly to gates.

use crate::error::{Error, Result};

use super::BnParams;

#[inline]
fn half_sin_sq(angle: f64) -> f64 {
    let s = (angle / 2.0).sin();
    s * s
}

/// Batch stage: recentering (t = false) or scaling (t = true).
pub(crate) fn batch_stage(z: f64, t: bool, theta: f64) -> f64 {
    let s = half_sin_sq(theta);
    if t {
        z * s
    } else {
        (1.0 - z) * s + z
    }
}

/// Full normalization using the in-training parameters.
pub fn bn_forward(z: f64, params: &BnParams) -> f64 {
    batch_stage(z, params.t, params.theta) * half_sin_sq(params.gamma)
}

/// Full normalization using the running (inference) parameters.
pub fn bn_forward_running(z: f64, params: &BnParams) -> f64 {
    batch_stage(z, params.t, params.running_theta) * half_sin_sq(params.running_gamma)
}

/// Recentering angle for a batch mean: solves `batch_stage(mean) = 0.5`.
fn fit_theta(p_mean: f64) -> (bool, f64) {
    if p_mean <= 0.5 {
        let ratio = (0.5 - p_mean) / (1.0 - p_mean);
        (false, 2.0 * ratio.sqrt().asin())
    } else {
        (true, 2.0 * (0.5 / p_mean).sqrt().asin())
    }
}

/// Per-batch fit used by the training loop.
///
/// Carries the recentered outputs, the fitted angles and the derivative of
/// `gamma` with respect to `lambda` (batch statistics are held constant when
/// differentiating).
#[derive(Debug, Clone)]
pub(crate) struct BnBatch {
    pub t: bool,
    pub theta: f64,
    pub gamma: f64,
    pub dgamma_dlambda: f64,
    pub zhat: Vec<f64>,
    pub out: Vec<f64>,
}

/// Individual-adjustment angle from recentered outputs: per-sample angles
/// `2 asin(sqrt(0.5 / D_i))` with `D_i = (zhat_i/n + 0.5) * lambda` floored
/// at 0.5, averaged over the batch. Also returns `d gamma / d lambda` with
/// the recentered outputs held constant.
pub(crate) fn gamma_terms(zhat: &[f64], lambda: f64) -> (f64, f64) {
    let n = zhat.len() as f64;
    let mut gamma_sum = 0.0;
    let mut dgamma_sum = 0.0;
    for &z in zhat {
        let scale = z / n + 0.5;
        let d = scale * lambda;
        if d <= 0.5 + 1e-12 {
            // clamped: gamma saturates at pi (identity stage), gradient zero
            gamma_sum += std::f64::consts::PI;
        } else {
            let s = (0.5 / d).sqrt();
            gamma_sum += 2.0 * s.asin();
            dgamma_sum += -s * scale / (d * (1.0 - s * s).sqrt());
        }
    }
    (gamma_sum / n, dgamma_sum / n)
}

pub(crate) fn fit_batch(outputs: &[f64], lambda: f64) -> Result<BnBatch> {
    if outputs.is_empty() {
        return Err(Error::EmptyDataset);
    }
    let p_mean = outputs.iter().sum::<f64>() / outputs.len() as f64;
    let (t, theta) = fit_theta(p_mean);
    let zhat: Vec<f64> = outputs.iter().map(|&z| batch_stage(z, t, theta)).collect();
    let (gamma, dgamma_dlambda) = gamma_terms(&zhat, lambda);
    let g = half_sin_sq(gamma);
    let out = zhat.iter().map(|&z| z * g).collect();
    Ok(BnBatch {
        t,
        theta,
        gamma,
        dgamma_dlambda,
        zhat,
        out,
    })
}

/// Fits `t`, `theta` and `gamma` from one batch of neuron outputs and folds
/// them into the moving averages. `lambda` is left untouched; it is updated
/// by gradient descent.
pub fn bn_fit_batch(outputs: &[f64], params: &BnParams) -> Result<BnParams> {
    let fit = fit_batch(outputs, params.lambda)?;
    let m = params.momentum;
    Ok(BnParams {
        t: fit.t,
        theta: fit.theta,
        gamma: fit.gamma,
        lambda: params.lambda,
        momentum: m,
        running_theta: m * params.running_theta + (1.0 - m) * fit.theta,
        running_gamma: m * params.running_gamma + (1.0 - m) * fit.gamma,
    })
}
