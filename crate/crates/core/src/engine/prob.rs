//! Two-point probabilistic neuron.
//!
//! Inputs are random variables taking `-1` with probability `p` and `+1`
//! otherwise; the neuron output is `E(y^2)` for `y = (sum_i w_i x_i) / m`.
//! Independence collapses the `2^m`-term expectation to a pairwise sum.

use crate::error::{Error, Result};

use super::check_probability;

const BRUTE_FORCE_LIMIT: usize = 20;

fn check_inputs(p: &[f64], weights: &[f64]) -> Result<()> {
    if p.is_empty() {
        return Err(Error::EmptyInput);
    }
    if weights.len() != p.len() {
        return Err(Error::LengthMismatch {
            expected: p.len(),
            got: weights.len(),
        });
    }
    for &prob in p {
        check_probability(prob)?;
    }
    Ok(())
}

/// `E(y^2)` over real-valued weights: `(sum w_i^2 + 2 sum_{i<j} s_i s_j) / m^2`
/// with `s_i = w_i e_i`, `e_i = 1 - 2 p_i`. For binary weights the leading
/// term is exactly `m`.
pub(crate) fn expectation_real(p: &[f64], weights: &[f64]) -> f64 {
    let m = p.len();
    let signals: Vec<f64> = p
        .iter()
        .zip(weights)
        .map(|(pi, wi)| wi * (1.0 - 2.0 * pi))
        .collect();
    let mut pair_sum = 0.0;
    for i in 0..m {
        for j in i + 1..m {
            pair_sum += signals[i] * signals[j];
        }
    }
    let diag: f64 = weights.iter().map(|w| w * w).sum();
    (diag + 2.0 * pair_sum) / (m * m) as f64
}

/// Value plus gradients of the relaxed (real-weight) expectation.
///
/// Returns `(value, d/dw, d/dp)`. The weight gradient is the one fed back
/// through the straight-through estimator during training.
pub(crate) fn prob_value_and_grads(
    p: &[f64],
    weights: &[f64],
) -> (f64, Vec<f64>, Vec<f64>) {
    let m = p.len();
    let m2 = (m * m) as f64;
    let e: Vec<f64> = p.iter().map(|pi| 1.0 - 2.0 * pi).collect();
    let s: Vec<f64> = e.iter().zip(weights).map(|(ei, wi)| wi * ei).collect();
    let total: f64 = s.iter().sum();
    let diag: f64 = weights.iter().map(|w| w * w).sum();
    let sq: f64 = s.iter().map(|si| si * si).sum();
    let value = (diag + total * total - sq) / m2;
    let dw: Vec<f64> = (0..m)
        .map(|i| 2.0 * (weights[i] + e[i] * (total - s[i])) / m2)
        .collect();
    let dp: Vec<f64> = (0..m).map(|i| -4.0 * weights[i] * (total - s[i]) / m2).collect();
    (value, dw, dp)
}

/// Exact neuron output `E(y^2)` for binarized weights, computed in `O(m^2)`.
pub fn prob_forward(p: &[f64], weights: &[i8]) -> Result<f64> {
    let w: Vec<f64> = weights.iter().map(|v| *v as f64).collect();
    check_inputs(p, &w)?;
    if weights.iter().any(|v| *v != 1 && *v != -1) {
        return Err(Error::NonBinaryWeight);
    }
    Ok(expectation_real(p, &w))
}

/// `E(y^2)` by enumerating all `2^m` outcomes; the oracle for `prob_forward`.
pub fn prob_forward_bruteforce(p: &[f64], weights: &[i8]) -> Result<f64> {
    let m = p.len();
    if m > BRUTE_FORCE_LIMIT {
        return Err(Error::InputTooLarge {
            got: m,
            limit: BRUTE_FORCE_LIMIT,
        });
    }
    let w: Vec<f64> = weights.iter().map(|v| *v as f64).collect();
    check_inputs(p, &w)?;
    if weights.iter().any(|v| *v != 1 && *v != -1) {
        return Err(Error::NonBinaryWeight);
    }
    let mut expectation = 0.0;
    for outcome in 0..1usize << m {
        let mut probability = 1.0;
        let mut sum = 0.0;
        for i in 0..m {
            if outcome & (1 << i) != 0 {
                probability *= p[i];
                sum -= w[i];
            } else {
                probability *= 1.0 - p[i];
                sum += w[i];
            }
        }
        let y = sum / m as f64;
        expectation += probability * y * y;
    }
    Ok(expectation)
}
