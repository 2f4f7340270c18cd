//! Backend selection and error-aware virtual-to-physical qbit assignment.

use std::collections::VecDeque;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sim::Circuit;

/// Physical processor description: per-qbit error rates plus the coupling
/// graph with per-edge error rates.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct BackendDescriptor {
    pub name: String,
    pub qbits: Vec<f64>,
    pub edges: Vec<(usize, usize, f64)>,
}

impl BackendDescriptor {
    pub fn num_qbits(&self) -> usize {
        self.qbits.len()
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.qbits.len();
        if self.qbits.iter().any(|e| !(0.0..=1.0).contains(e)) {
            return Err(Error::Format(format!(
                "backend {}: qbit error rate outside [0, 1]",
                self.name
            )));
        }
        for (a, b, err) in &self.edges {
            if *a >= n || *b >= n {
                return Err(Error::Format(format!(
                    "backend {}: edge ({a}, {b}) references a missing qbit",
                    self.name
                )));
            }
            if !(0.0..=1.0).contains(err) {
                return Err(Error::Format(format!(
                    "backend {}: edge error rate outside [0, 1]",
                    self.name
                )));
            }
        }
        Ok(())
    }

    /// Mean over all qbit and edge error rates.
    pub fn average_error(&self) -> f64 {
        let total: f64 =
            self.qbits.iter().sum::<f64>() + self.edges.iter().map(|(_, _, e)| e).sum::<f64>();
        let count = self.qbits.len() + self.edges.len();
        if count == 0 {
            0.0
        } else {
            total / count as f64
        }
    }

    /// All-pairs hop distances over the coupling graph (BFS per qbit).
    fn hop_distances(&self) -> Vec<Vec<usize>> {
        let n = self.qbits.len();
        let unreachable = usize::MAX / 4;
        let mut adjacency = vec![Vec::new(); n];
        for (a, b, _) in &self.edges {
            adjacency[*a].push(*b);
            adjacency[*b].push(*a);
        }
        let mut dist = vec![vec![unreachable; n]; n];
        for start in 0..n {
            dist[start][start] = 0;
            let mut queue = VecDeque::from([start]);
            while let Some(v) = queue.pop_front() {
                for &w in &adjacency[v] {
                    if dist[start][w] > dist[start][v] + 1 {
                        dist[start][w] = dist[start][v] + 1;
                        queue.push_back(w);
                    }
                }
            }
        }
        dist
    }
}

/// Loads one descriptor or a JSON array of them.
pub fn load_backends(path: &Path) -> Result<Vec<BackendDescriptor>> {
    let text = std::fs::read_to_string(path)?;
    let backends: Vec<BackendDescriptor> = if text.trim_start().starts_with('[') {
        serde_json::from_str(&text)?
    } else {
        vec![serde_json::from_str(&text)?]
    };
    for b in &backends {
        b.validate()?;
    }
    Ok(backends)
}

/// Picks the smallest backend that fits the circuit; ties broken by minimum
/// average error rate, then by declaration order.
pub fn select_backend<'a>(
    circuit: &Circuit,
    backends: &'a [BackendDescriptor],
) -> Result<&'a BackendDescriptor> {
    let needed = circuit.num_qbits;
    backends
        .iter()
        .filter(|b| b.num_qbits() >= needed)
        .min_by(|a, b| {
            (a.num_qbits(), a.average_error())
                .partial_cmp(&(b.num_qbits(), b.average_error()))
                .expect("error rates are finite")
        })
        .ok_or(Error::NoBackendFits { needed })
}

/// Injective map from circuit qbits to physical qbits.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct PhysicalMapping {
    pub backend: String,
    /// `assignment[v]` is the physical qbit carrying virtual qbit `v`.
    pub assignment: Vec<usize>,
}

/// Greedy error-aware placement.
///
/// Virtual qbits are ranked by descending gate count; each is placed on the
/// free physical qbit with the lowest error rate, preferring (among
/// equal-error candidates) the one closest to already-placed partners that
/// share a multi-qbit gate, then the lowest physical index.
pub fn assign_qbits(circuit: &Circuit, backend: &BackendDescriptor) -> Result<PhysicalMapping> {
    backend.validate()?;
    let virtual_count = circuit.num_qbits;
    if backend.num_qbits() < virtual_count {
        return Err(Error::NoBackendFits {
            needed: virtual_count,
        });
    }

    let mut gate_count = vec![0usize; virtual_count];
    let mut partners = vec![Vec::new(); virtual_count];
    for gate in &circuit.gates {
        let qs = gate.qbits();
        for &q in &qs {
            gate_count[q] += 1;
        }
        if qs.len() >= 2 {
            for &a in &qs {
                for &b in &qs {
                    if a != b && !partners[a].contains(&b) {
                        partners[a].push(b);
                    }
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..virtual_count).collect();
    order.sort_by_key(|&v| (std::cmp::Reverse(gate_count[v]), v));

    let dist = backend.hop_distances();
    let mut assignment = vec![usize::MAX; virtual_count];
    let mut used = vec![false; backend.num_qbits()];
    for &v in &order {
        let mut best: Option<(f64, usize, usize)> = None;
        for (p, &taken) in used.iter().enumerate() {
            if taken {
                continue;
            }
            let coupling: usize = partners[v]
                .iter()
                .filter(|&&u| assignment[u] != usize::MAX)
                .map(|&u| dist[p][assignment[u]])
                .sum();
            let key = (backend.qbits[p], coupling, p);
            if best.map_or(true, |b| key < b) {
                best = Some(key);
            }
        }
        let (_, _, chosen) = best.expect("backend accommodates circuit");
        assignment[v] = chosen;
        used[chosen] = true;
    }

    Ok(PhysicalMapping {
        backend: backend.name.clone(),
        assignment,
    })
}
