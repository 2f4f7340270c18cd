use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

use super::*;
use crate::sim::{apply_gate, Circuit, Gate, StateVector};

/// Statevector oracle: prepares the uniform superposition, applies the flip
/// gates and reads each basis state's sign off the amplitudes.
fn signs_via_statevector(gates: &[FlipGate], k: usize) -> Vec<i8> {
    let mut circuit = Circuit::new(k);
    for q in 0..k {
        circuit.push(Gate::H(q));
    }
    let mut state = crate::sim::run(&circuit).unwrap();
    for gate in gates {
        state = apply_gate(state, &gate.to_gate()).unwrap();
    }
    let scale = ((1usize << k) as f64).sqrt();
    state
        .amplitudes()
        .iter()
        .map(|a| {
            let v = a.re * scale;
            assert!((v.abs() - 1.0).abs() < 1e-9, "amplitude magnitude drifted");
            if v > 0.0 {
                1
            } else {
                -1
            }
        })
        .collect()
}

#[test]
fn single_state_gate_flips_only_its_anchor() {
    for k in 1..=5usize {
        let mut rng = ChaCha8Rng::seed_from_u64(k as u64);
        for _ in 0..8 {
            let x = rng.gen_range(0..1usize << k);
            let gate = FlipGate::single(x, k).unwrap();
            let signs = signs_via_statevector(&[gate], k);
            for (state, sign) in signs.iter().enumerate() {
                assert_eq!(*sign < 0, state == x, "k={k} x={x} state={state}");
            }
        }
    }
}

#[test]
fn single_state_gate_control_layout() {
    // anchor 6 = |0110>: positive controls on qbits 1 and 2, negative on 0 and 3
    let gate = FlipGate::single(6, 4).unwrap();
    match gate.to_gate() {
        Gate::ControlledZ { qbits, polarity } => {
            assert_eq!(qbits, vec![0, 1, 2, 3]);
            assert_eq!(polarity, vec![false, true, true, false]);
        }
        other => panic!("unexpected gate {other:?}"),
    }
}

#[test]
fn width_one_single_gate_is_plain_z() {
    let gate = FlipGate::single(1, 1).unwrap();
    assert_eq!(gate.to_gate(), Gate::Z(0));
}

#[test]
fn pattern_gate_flips_supersets() {
    let gate = FlipGate::pattern(6, 4).unwrap();
    let signs = signs_via_statevector(&[gate], 4);
    let flipped: Vec<usize> = signs
        .iter()
        .enumerate()
        .filter(|(_, s)| **s < 0)
        .map(|(i, _)| i)
        .collect();
    assert_eq!(flipped, vec![6, 7, 14, 15]);
}

#[test]
fn pattern_gate_single_bit_is_plain_z() {
    let gate = FlipGate::pattern(4, 4).unwrap();
    assert_eq!(gate.to_gate(), Gate::Z(2));
    let signs = signs_via_statevector(&[gate], 4);
    assert_eq!(signs.iter().filter(|s| **s < 0).count(), 8);
}

#[test]
fn pattern_flip_counts() {
    for k in 1..=10usize {
        for x in 1..1usize << k.min(6) {
            let gate = FlipGate::pattern(x, k).unwrap();
            let expected = 1 << (k - x.count_ones() as usize);
            assert_eq!(gate.flip_count(), expected);
            if k <= 6 {
                let signs = flipped_states(&[gate], k);
                assert_eq!(signs.count_negative(), expected);
            }
        }
    }
}

#[test]
fn flipped_states_composition() {
    assert_eq!(flipped_states(&[], 3).count_negative(), 0);

    let pg1 = FlipGate::pattern(1, 3).unwrap();
    let twice = flipped_states(&[pg1, pg1], 3);
    assert_eq!(twice.count_negative(), 0);

    let pg7 = FlipGate::pattern(7, 3).unwrap();
    let three = flipped_states(&[pg1, pg7], 3);
    assert_eq!(three.count_negative(), 3);
    assert_eq!(three.signs, signs_via_statevector(&[pg1, pg7], 3));
}

#[test]
fn gate_costs() {
    // plain Z
    assert_eq!(gate_cost(&FlipGate::pattern(4, 4).unwrap()), 1);
    // CZ on two qbits
    assert_eq!(gate_cost(&FlipGate::pattern(3, 4).unwrap()), 1);
    // three involved qbits: 2*3 - 1
    assert_eq!(gate_cost(&FlipGate::pattern(7, 4).unwrap()), 5);
    // single-state gate at k=4 anchored at 6: core 2*4-1 plus four X gates
    assert_eq!(gate_cost(&FlipGate::single(6, 4).unwrap()), 11);
}

#[test]
fn weight_map_identity_when_all_positive() {
    let plan = weight_map(&[1, 1, 1, 1]).unwrap();
    assert!(plan.gates.is_empty());
    assert_eq!(plan.cost, 0);
    assert!(!plan.global_negated);
}

#[test]
fn weight_map_single_negative_uses_full_pattern_gate() {
    // R = 1 at k = 2: one CZ anchored at 3 flips only |11>
    let plan = weight_map(&[1, -1, 1, 1]).unwrap();
    assert_eq!(plan.gates.len(), 1);
    assert_eq!(plan.gates[0], FlipGate::pattern(3, 2).unwrap());
    assert_eq!(plan.cost, 1);
    // negative weight index 1 must sit on the flipped state |11> = 3
    assert_eq!(plan.permutation[1], 3);
}

#[test]
fn weight_map_single_negative_is_minimal() {
    // brute force over every subset of available gates at k=2 confirms no
    // cheaper plan flips exactly one state
    let k = 2;
    let mut candidates = Vec::new();
    for x in 0..1usize << k {
        candidates.push(FlipGate::single(x, k).unwrap());
    }
    for x in 1..1usize << k {
        candidates.push(FlipGate::pattern(x, k).unwrap());
    }
    let mut best = usize::MAX;
    for mask in 1u32..(1 << candidates.len()) {
        let chosen: Vec<FlipGate> = candidates
            .iter()
            .enumerate()
            .filter(|(i, _)| mask & (1 << i) != 0)
            .map(|(_, g)| *g)
            .collect();
        if flipped_states(&chosen, k).count_negative() == 1 {
            best = best.min(chosen.iter().map(gate_cost).sum());
        }
    }
    assert_eq!(best, 1);
    assert_eq!(weight_map(&[1, -1, 1, 1]).unwrap().cost, best);
}

#[test]
fn weight_map_three_negatives_at_k3() {
    // R = 3 = 4 - 1: Z on qbit 0 flips four states, then the full-width CZ
    // flips |111> back; costs 1 + 5
    let plan = weight_map(&[-1, -1, -1, 1, 1, 1, 1, 1]).unwrap();
    assert_eq!(
        plan.gates,
        vec![
            FlipGate::pattern(1, 3).unwrap(),
            FlipGate::pattern(7, 3).unwrap()
        ]
    );
    assert_eq!(plan.cost, 6);
    let flipped = flipped_states(&plan.gates, 3);
    assert_eq!(flipped.count_negative(), 3);
}

#[test]
fn weight_map_negates_majorities() {
    let weights = [-1, -1, -1, 1];
    let plan = weight_map(&weights).unwrap();
    assert!(plan.global_negated);
    // after negation only one flip is needed
    assert_eq!(flipped_states(&plan.gates, 2).count_negative(), 1);
    // the surviving negative weight after negation is index 3
    assert_eq!(plan.permutation[3], flipped_states(&plan.gates, 2).negative_states()[0]);
}

#[test]
fn weight_map_exact_and_bounded_small_widths() {
    for k in 1..=7usize {
        let m = 1usize << k;
        for r in 0..=m / 2 {
            let mut weights = vec![1i8; m];
            for w in weights.iter_mut().take(r) {
                *w = -1;
            }
            let plan = weight_map(&weights).unwrap();
            assert_eq!(
                flipped_states(&plan.gates, k).count_negative(),
                r,
                "k={k} r={r}"
            );
            assert!(plan.cost <= k * k + 1, "k={k} r={r} cost={}", plan.cost);
        }
    }
}

#[test]
fn weight_map_permutation_is_bijective_and_sign_aligned() {
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    for k in 1..=6usize {
        let m = 1usize << k;
        for _ in 0..20 {
            let weights: Vec<i8> = (0..m).map(|_| if rng.gen_bool(0.5) { 1 } else { -1 }).collect();
            let plan = weight_map(&weights).unwrap();
            let mut seen = vec![false; m];
            for &s in &plan.permutation {
                assert!(!seen[s]);
                seen[s] = true;
            }
            let pattern = flipped_states(&plan.gates, k);
            for (i, &w) in weights.iter().enumerate() {
                let effective = if plan.global_negated { -w } else { w };
                let state_sign = pattern.signs[plan.permutation[i]];
                assert_eq!(state_sign as i32, effective as i32, "k={k} i={i}");
            }
        }
    }
}

#[test]
fn naive_map_costs_one_single_gate_per_negative() {
    let weights = [-1, 1, -1, 1];
    let plan = naive_map(&weights).unwrap();
    assert_eq!(plan.gates.len(), 2);
    assert_eq!(plan.permutation, vec![0, 1, 2, 3]);
    let expected: usize = [FlipGate::single(0, 2).unwrap(), FlipGate::single(2, 2).unwrap()]
        .iter()
        .map(gate_cost)
        .sum();
    assert_eq!(plan.cost, expected);
}

#[test]
fn non_binary_weights_rejected() {
    assert!(matches!(weight_map(&[1, 0, 1, 1]), Err(crate::Error::NonBinaryWeight)));
    assert!(matches!(weight_map(&[1, -1, 1]), Err(crate::Error::NotPowerOfTwo(3))));
}

// --- backend selection and placement ---------------------------------------

fn chain_backend(name: &str, errors: Vec<f64>) -> BackendDescriptor {
    let edges = (0..errors.len().saturating_sub(1))
        .map(|i| (i, i + 1, 0.01))
        .collect();
    BackendDescriptor {
        name: name.into(),
        qbits: errors,
        edges,
    }
}

#[test]
fn select_smallest_fit_then_lowest_error() {
    let backends = [
        chain_backend("tiny", vec![0.01]),
        chain_backend("a", vec![0.02; 5]),
        chain_backend("b", vec![0.01; 5]),
    ];
    let circuit = Circuit::new(3);
    let chosen = select_backend(&circuit, &backends).unwrap();
    assert_eq!(chosen.name, "b");

    let one_qbit = Circuit::new(1);
    assert_eq!(select_backend(&one_qbit, &backends).unwrap().name, "tiny");

    let six = Circuit::new(6);
    assert!(select_backend(&six, &backends).is_err());
}

/// Exhaustive placement oracle: minimizes total error, then total coupling
/// distance over gate partners, then the assignment vector itself.
fn exhaustive_best(circuit: &Circuit, backend: &BackendDescriptor) -> Vec<usize> {
    fn hop(backend: &BackendDescriptor, a: usize, b: usize) -> usize {
        // BFS on demand; the oracle only runs on tiny graphs
        let n = backend.qbits.len();
        let mut dist = vec![usize::MAX / 4; n];
        dist[a] = 0;
        let mut queue = std::collections::VecDeque::from([a]);
        while let Some(v) = queue.pop_front() {
            for (x, y, _) in &backend.edges {
                for (s, t) in [(*x, *y), (*y, *x)] {
                    if s == v && dist[t] > dist[v] + 1 {
                        dist[t] = dist[v] + 1;
                        queue.push_back(t);
                    }
                }
            }
        }
        dist[b]
    }

    let v = circuit.num_qbits;
    let p = backend.qbits.len();
    let mut pairs = Vec::new();
    for gate in &circuit.gates {
        let qs = gate.qbits();
        if qs.len() >= 2 {
            for i in 0..qs.len() {
                for j in i + 1..qs.len() {
                    pairs.push((qs[i], qs[j]));
                }
            }
        }
    }

    let mut best: Option<(f64, usize, Vec<usize>)> = None;
    let mut assignment = vec![0usize; v];
    fn recurse(
        idx: usize,
        v: usize,
        p: usize,
        assignment: &mut Vec<usize>,
        pairs: &[(usize, usize)],
        backend: &BackendDescriptor,
        best: &mut Option<(f64, usize, Vec<usize>)>,
        hop: &dyn Fn(&BackendDescriptor, usize, usize) -> usize,
    ) {
        if idx == v {
            let err: f64 = assignment.iter().map(|&q| backend.qbits[q]).sum();
            let dist: usize = pairs
                .iter()
                .map(|&(a, b)| hop(backend, assignment[a], assignment[b]))
                .sum();
            let key = (err, dist, assignment.clone());
            if best.as_ref().map_or(true, |b| key < *b) {
                *best = Some(key);
            }
            return;
        }
        for cand in 0..p {
            if !assignment[..idx].contains(&cand) {
                assignment[idx] = cand;
                recurse(idx + 1, v, p, assignment, pairs, backend, best, hop);
            }
        }
    }
    recurse(0, v, p, &mut assignment, &pairs, backend, &mut best, &|b, x, y| hop(b, x, y));
    best.unwrap().2
}

#[test]
fn two_qbit_circuit_lands_on_lowest_error_adjacent_pair() {
    let backend = chain_backend("chain", vec![0.05, 0.01, 0.02, 0.05, 0.05]);
    let mut circuit = Circuit::new(2);
    circuit.push(Gate::cz(vec![0, 1]));
    let mapping = assign_qbits(&circuit, &backend).unwrap();
    let mut placed = mapping.assignment.clone();
    placed.sort_unstable();
    assert_eq!(placed, vec![1, 2]);
    assert_eq!(mapping.assignment, exhaustive_best(&circuit, &backend));
}

#[test]
fn equal_error_tie_broken_by_coupling_distance() {
    let backend = chain_backend("chain", vec![0.01, 0.02, 0.02, 0.02, 0.05]);
    let mut circuit = Circuit::new(2);
    circuit.push(Gate::cz(vec![0, 1]));
    let mapping = assign_qbits(&circuit, &backend).unwrap();
    assert_eq!(mapping.assignment, vec![0, 1]);
    assert_eq!(mapping.assignment, exhaustive_best(&circuit, &backend));
}

#[test]
fn single_qbit_circuit_takes_lowest_error_qbit() {
    let backend = chain_backend("chain", vec![0.05, 0.04, 0.003, 0.04, 0.05]);
    let circuit = Circuit::new(1);
    let mapping = assign_qbits(&circuit, &backend).unwrap();
    assert_eq!(mapping.assignment, vec![2]);
}

#[test]
fn uniform_errors_fall_back_to_lowest_indices_at_min_distance() {
    let backend = chain_backend("chain", vec![0.02; 5]);
    let mut circuit = Circuit::new(2);
    circuit.push(Gate::cz(vec![0, 1]));
    let mapping = assign_qbits(&circuit, &backend).unwrap();
    assert_eq!(mapping.assignment, vec![0, 1]);
}

#[test]
fn assignment_is_injective_on_random_instances() {
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    for _ in 0..20 {
        let n = rng.gen_range(3..8);
        let backend = chain_backend("r", (0..n).map(|_| rng.gen_range(0.0..0.2)).collect());
        let v = rng.gen_range(1..=n.min(4));
        let mut circuit = Circuit::new(v);
        if v >= 2 {
            circuit.push(Gate::cz(vec![0, 1]));
        }
        let mapping = assign_qbits(&circuit, &backend).unwrap();
        let mut seen = mapping.assignment.clone();
        seen.sort_unstable();
        seen.dedup();
        assert_eq!(seen.len(), v);
    }
}

#[test]
fn backend_json_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let backend = BackendDescriptor {
        name: "essex".into(),
        qbits: vec![0.02, 0.03, 0.01, 0.04, 0.02],
        edges: vec![(0, 1, 0.015), (1, 2, 0.02), (1, 3, 0.01), (3, 4, 0.03)],
    };
    let path = dir.path().join("backend.json");
    std::fs::write(&path, serde_json::to_string(&backend).unwrap()).unwrap();
    let loaded = load_backends(&path).unwrap();
    assert_eq!(loaded, vec![backend.clone()]);

    let list_path = dir.path().join("backends.json");
    std::fs::write(&list_path, serde_json::to_string(&vec![backend.clone()]).unwrap()).unwrap();
    assert_eq!(load_backends(&list_path).unwrap(), vec![backend]);
}

#[test]
fn sign_flips_commute() {
    let mut rng = ChaCha8Rng::seed_from_u64(37);
    for _ in 0..10 {
        let k = rng.gen_range(2..6);
        let mut gates: Vec<FlipGate> = (0..4)
            .map(|_| {
                let anchor = rng.gen_range(1..1usize << k);
                if rng.gen_bool(0.5) {
                    FlipGate::pattern(anchor, k).unwrap()
                } else {
                    FlipGate::single(anchor, k).unwrap()
                }
            })
            .collect();
        let forward = flipped_states(&gates, k);
        gates.reverse();
        assert_eq!(forward, flipped_states(&gates, k));
    }
}
