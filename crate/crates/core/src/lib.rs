//! Quantum-friendly neural networks with verified circuit compilation.
//!
//! The crate covers the full pipeline:
//!
//! * [`engine`] — exact classical forward propagation and gradient training
//!   for probabilistic (two-point) and amplitude-encoded neuron layers with
//!   quantum-compatible batch normalization;
//! * [`map`] — the sign-flip weight-mapping compiler that realizes a
//!   `2^k`-input binarized neuron with `O(k^2)` basic gates, plus error-aware
//!   virtual-to-physical qbit assignment;
//! * [`circ`] — lowering of trained networks into quantum gate circuits;
//! * [`sim`] — a dense statevector simulator used as the correctness oracle
//!   for every synthesized circuit;
//! * [`data`] — MNIST IDX ingestion, average-pooling downsampling and class
//!   subsetting.

pub mod circ;
pub mod data;
pub mod engine;
pub mod error;
pub mod linalg;
pub mod map;
pub mod sim;

pub use error::{Error, Result};
pub use linalg::SquareMatrix;
