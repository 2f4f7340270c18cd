//! Amplitude-encoded neuron.
//!
//! `2^k` non-negative inputs become the first column of an orthogonal
//! matrix; applied to `|0...0>` the matrix loads them as state amplitudes on
//! `k` qbits. The neuron output is `((sum_i u_i w_i) / sqrt(m))^2`, exactly
//! the probability the synthesized circuit reports on its output qbit.

use crate::error::{Error, Result};
use crate::linalg::SquareMatrix;

/// Unit input vector together with its orthogonal completion.
#[derive(Debug, Clone, PartialEq)]
pub struct AmplitudeEmbedding {
    pub unit: Vec<f64>,
    pub matrix: SquareMatrix,
}

/// Normalizes the inputs and completes them to an orthogonal matrix.
pub fn amp_embed(inputs: &[f64]) -> Result<AmplitudeEmbedding> {
    let m = inputs.len();
    if m < 2 || !m.is_power_of_two() {
        return Err(Error::NotPowerOfTwo(m));
    }
    let norm: f64 = inputs.iter().map(|v| v * v).sum::<f64>().sqrt();
    if norm == 0.0 {
        return Err(Error::ZeroVector);
    }
    let unit: Vec<f64> = inputs.iter().map(|v| v / norm).collect();
    let matrix = SquareMatrix::with_first_column(&unit)?;
    Ok(AmplitudeEmbedding { unit, matrix })
}

fn check_unit(unit: &[f64], weights_len: usize) -> Result<()> {
    if unit.len() != weights_len {
        return Err(Error::LengthMismatch {
            expected: unit.len(),
            got: weights_len,
        });
    }
    let norm: f64 = unit.iter().map(|v| v * v).sum::<f64>().sqrt();
    if (norm - 1.0).abs() > 1e-6 {
        return Err(Error::NotUnit(norm));
    }
    Ok(())
}

/// Neuron output for a unit input vector and binarized weights.
pub fn amp_forward(unit: &[f64], weights: &[i8]) -> Result<f64> {
    check_unit(unit, weights.len())?;
    if weights.iter().any(|v| *v != 1 && *v != -1) {
        return Err(Error::NonBinaryWeight);
    }
    let w: Vec<f64> = weights.iter().map(|v| *v as f64).collect();
    Ok(amp_value_and_weight_grad(unit, &w).0)
}

/// Relaxed value and weight gradient: `y = sum(u_i w_i)/sqrt(m)`, output
/// `y^2`, `d/dw_i = 2 y u_i / sqrt(m)`.
pub(crate) fn amp_value_and_weight_grad(unit: &[f64], weights: &[f64]) -> (f64, Vec<f64>) {
    let m = unit.len() as f64;
    let projection: f64 =
        unit.iter().zip(weights).map(|(u, w)| u * w).sum::<f64>() / m.sqrt();
    let grad = unit.iter().map(|u| 2.0 * projection * u / m.sqrt()).collect();
    (projection * projection, grad)
}
