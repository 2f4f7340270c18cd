//! Classification loss on output-neuron probabilities.
//!
//! Multi-neuron outputs go through a softmax with negative log-likelihood;
//! a single output neuron with two classes is scored as a Bernoulli
//! probability of class 0.

const EPS: f64 = 1e-12;

/// Expands raw output-neuron values into one probability per class.
pub fn class_probabilities(outputs: &[f64], class_count: usize) -> Vec<f64> {
    if outputs.len() == 1 && class_count == 2 {
        vec![outputs[0], 1.0 - outputs[0]]
    } else {
        outputs.to_vec()
    }
}

/// Index of the most probable class.
pub fn argmax(values: &[f64]) -> usize {
    values
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.partial_cmp(b.1).expect("finite probabilities"))
        .map(|(i, _)| i)
        .unwrap_or(0)
}

/// Loss and gradient with respect to the raw outputs.
pub fn loss_and_grad(outputs: &[f64], label: usize, class_count: usize) -> (f64, Vec<f64>) {
    if outputs.len() == 1 && class_count == 2 {
        let p0 = outputs[0].clamp(EPS, 1.0 - EPS);
        if label == 0 {
            (-p0.ln(), vec![-1.0 / p0])
        } else {
            (-(1.0 - p0).ln(), vec![1.0 / (1.0 - p0)])
        }
    } else {
        let max = outputs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let exps: Vec<f64> = outputs.iter().map(|o| (o - max).exp()).collect();
        let total: f64 = exps.iter().sum();
        let q: Vec<f64> = exps.iter().map(|e| e / total).collect();
        let loss = -(q[label].max(EPS)).ln();
        let grad = q
            .iter()
            .enumerate()
            .map(|(c, qc)| qc - if c == label { 1.0 } else { 0.0 })
            .collect();
        (loss, grad)
    }
}
