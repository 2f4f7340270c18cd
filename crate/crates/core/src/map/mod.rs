//! Weight-mapping compiler and physical qbit assignment.
//!
//! A binarized neuron over `2^k` amplitude-encoded inputs needs the sign of
//! every basis state matched to its weight. Flipping each negative state
//! individually costs `O(2^k)` gates; this module exploits two facts to get
//! to `O(k^2)`:
//!
//! * the quadratic activation makes the sign pattern symmetric, so at most
//!   `2^{k-1}` states ever need flipping;
//! * input amplitudes may be permuted freely (row-swapped initialization
//!   matrices stay orthogonal), so only the *count* of flipped states
//!   matters, not their positions.
//!
//! Any count `R <= 2^{k-1}` decomposes into an alternating sum of powers of
//! two, realized by nested pattern-flip gates whose total cost is bounded by
//! `k^2 + 1` basic gates.

mod backend;

pub use backend::{
    assign_qbits, load_backends, select_backend, BackendDescriptor, PhysicalMapping,
};

use crate::error::{Error, Result};
use crate::sim::Gate;

/// How a sign-flip gate selects the states it acts on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FlipKind {
    /// Flips exactly the anchor state: every qbit is a polarity-selected
    /// control (|0>-controls realized by X conjugation).
    Single,
    /// Flips every state whose bit pattern contains the anchor's 1-bits:
    /// plain controlled-Z on the anchor's 1-bit positions.
    Pattern,
}

/// A multi-controlled Z construction anchored at one basis state.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FlipGate {
    pub kind: FlipKind,
    pub anchor: usize,
    pub num_qbits: usize,
}

impl FlipGate {
    /// Gate flipping the sign of exactly `anchor`.
    pub fn single(anchor: usize, num_qbits: usize) -> Result<Self> {
        if anchor >= 1 << num_qbits {
            return Err(Error::StateOutOfRange {
                state: anchor,
                num_qbits,
            });
        }
        Ok(Self {
            kind: FlipKind::Single,
            anchor,
            num_qbits,
        })
    }

    /// Gate flipping every superset of `anchor`'s bit pattern.
    pub fn pattern(anchor: usize, num_qbits: usize) -> Result<Self> {
        if anchor == 0 {
            return Err(Error::ZeroAnchor);
        }
        if anchor >= 1 << num_qbits {
            return Err(Error::StateOutOfRange {
                state: anchor,
                num_qbits,
            });
        }
        Ok(Self {
            kind: FlipKind::Pattern,
            anchor,
            num_qbits,
        })
    }

    /// Whether this gate flips the sign of `state`.
    pub fn flips(&self, state: usize) -> bool {
        match self.kind {
            FlipKind::Single => state == self.anchor,
            FlipKind::Pattern => state & self.anchor == self.anchor,
        }
    }

    /// Number of states the gate flips.
    pub fn flip_count(&self) -> usize {
        match self.kind {
            FlipKind::Single => 1,
            FlipKind::Pattern => 1 << (self.num_qbits - self.anchor.count_ones() as usize),
        }
    }

    /// Simulator gate realizing the flip.
    pub fn to_gate(&self) -> Gate {
        match self.kind {
            FlipKind::Single => {
                let qbits: Vec<usize> = (0..self.num_qbits).collect();
                let polarity: Vec<bool> =
                    (0..self.num_qbits).map(|j| self.anchor & (1 << j) != 0).collect();
                if self.num_qbits == 1 && polarity[0] {
                    Gate::Z(0)
                } else {
                    Gate::ControlledZ { qbits, polarity }
                }
            }
            FlipKind::Pattern => {
                let qbits: Vec<usize> = (0..self.num_qbits)
                    .filter(|j| self.anchor & (1 << j) != 0)
                    .collect();
                if qbits.len() == 1 {
                    Gate::Z(qbits[0])
                } else {
                    Gate::cz(qbits)
                }
            }
        }
    }
}

/// Basic-gate cost of a flip gate.
///
/// With `y` involved qbits a controlled-Z decomposes into `2y - 1` basic
/// gates (`y - 1` Toffolis in, one controlled-Z, `y - 1` Toffolis out), or a
/// single gate when `y <= 2`. Single-state gates add two X gates per
/// |0>-polarity control for the conjugation.
pub fn gate_cost(gate: &FlipGate) -> usize {
    let (involved, zero_polarity) = match gate.kind {
        FlipKind::Single => (
            gate.num_qbits,
            gate.num_qbits - gate.anchor.count_ones() as usize,
        ),
        FlipKind::Pattern => (gate.anchor.count_ones() as usize, 0),
    };
    let core = if involved <= 2 { 1 } else { 2 * involved - 1 };
    core + 2 * zero_polarity
}

/// Sign of every basis state after a gate sequence.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SignPattern {
    pub num_qbits: usize,
    /// One entry per basis state, `+1` or `-1`.
    pub signs: Vec<i8>,
}

impl SignPattern {
    pub fn all_positive(num_qbits: usize) -> Self {
        Self {
            num_qbits,
            signs: vec![1; 1 << num_qbits],
        }
    }

    pub fn negative_states(&self) -> Vec<usize> {
        self.signs
            .iter()
            .enumerate()
            .filter(|(_, s)| **s < 0)
            .map(|(i, _)| i)
            .collect()
    }

    pub fn count_negative(&self) -> usize {
        self.signs.iter().filter(|s| **s < 0).count()
    }
}

/// Composes flip gates over the all-positive pattern. Sign flips commute, so
/// the order of `gates` is irrelevant.
pub fn flipped_states(gates: &[FlipGate], num_qbits: usize) -> SignPattern {
    let mut pattern = SignPattern::all_positive(num_qbits);
    for gate in gates {
        for (state, sign) in pattern.signs.iter_mut().enumerate() {
            if gate.flips(state) {
                *sign = -*sign;
            }
        }
    }
    pattern
}

/// Compiled weight mapping: flip gates plus the input permutation aligning
/// flipped states with negative weights.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GatePlan {
    pub num_qbits: usize,
    pub gates: Vec<FlipGate>,
    /// `permutation[i]` is the basis state carrying input (and weight) `i`.
    pub permutation: Vec<usize>,
    /// All weights were negated before mapping; harmless under the quadratic
    /// activation.
    pub global_negated: bool,
    /// Total basic-gate cost of `gates`.
    pub cost: usize,
}

fn check_binary(weights: &[i8]) -> Result<usize> {
    let m = weights.len();
    if m < 2 || !m.is_power_of_two() {
        return Err(Error::NotPowerOfTwo(m));
    }
    if weights.iter().any(|w| *w != 1 && *w != -1) {
        return Err(Error::NonBinaryWeight);
    }
    Ok(m.trailing_zeros() as usize)
}

/// Strictly decreasing exponents expressing `r` as an alternating sum
/// `2^{e0} - 2^{e1} + 2^{e2} - ...` with leading sign positive.
fn alternating_exponents(r: usize) -> Vec<u32> {
    let mut exponents = Vec::new();
    let mut rem = r;
    loop {
        if rem.is_power_of_two() {
            exponents.push(rem.trailing_zeros());
            return exponents;
        }
        // smallest power of two above rem
        let above = usize::BITS - rem.leading_zeros();
        exponents.push(above);
        rem = (1usize << above) - rem;
    }
}

/// Maps `2^k` binary weights onto sign-flip gates and an input permutation.
///
/// The plan flips exactly as many states as there are negative weights
/// (after optional global negation), at a cost of at most `k^2 + 1` basic
/// gates, and pairs flipped states with negative-weight indices in ascending
/// order on both sides.
pub fn weight_map(weights: &[i8]) -> Result<GatePlan> {
    let k = check_binary(weights)?;
    let m = weights.len();
    let negatives = weights.iter().filter(|w| **w < 0).count();
    let (global_negated, flips_needed) = if negatives > m / 2 {
        (true, m - negatives)
    } else {
        (false, negatives)
    };

    let mut gates = Vec::new();
    if flips_needed > 0 {
        for e in alternating_exponents(flips_needed) {
            // a gate anchored at 2^j - 1 flips 2^{k-j} states
            let ones = k - e as usize;
            gates.push(FlipGate::pattern((1usize << ones) - 1, k)?);
        }
    }

    let pattern = flipped_states(&gates, k);
    let flipped = pattern.negative_states();
    debug_assert_eq!(flipped.len(), flips_needed);

    let sign_of = |i: usize| if global_negated { -weights[i] } else { weights[i] };
    let mut permutation = vec![0usize; m];
    let mut positive_states = (0..m).filter(|s| pattern.signs[*s] > 0);
    let mut flipped_iter = flipped.iter().copied();
    for i in 0..m {
        permutation[i] = if sign_of(i) < 0 {
            flipped_iter.next().expect("flip count matches negative weights")
        } else {
            positive_states.next().expect("sign counts cover all states")
        };
    }

    let cost = gates.iter().map(gate_cost).sum();
    Ok(GatePlan {
        num_qbits: k,
        gates,
        permutation,
        global_negated,
        cost,
    })
}

/// Baseline mapper: one single-state flip per negative weight, identity
/// permutation. Cost grows as `O(2^k)`; kept for the benchmark comparison.
pub fn naive_map(weights: &[i8]) -> Result<GatePlan> {
    let k = check_binary(weights)?;
    let mut gates = Vec::new();
    for (state, w) in weights.iter().enumerate() {
        if *w < 0 {
            gates.push(FlipGate::single(state, k)?);
        }
    }
    let cost = gates.iter().map(gate_cost).sum();
    Ok(GatePlan {
        num_qbits: k,
        gates,
        permutation: (0..weights.len()).collect(),
        global_negated: false,
        cost,
    })
}

#[cfg(test)]
mod tests;
