//! Dense statevector simulator.
//!
//! The simulator is the quantum-side oracle for every synthesized circuit:
//! it computes exact amplitudes, so synthesized networks can be checked
//! against the classical engine to floating-point precision.
//!
//! Basis convention shared by all modules: qbit `j` is bit `j` of the basis
//! index, i.e. the state `|b_{k-1} ... b_1 b_0>` corresponds to the integer
//! `sum_j b_j * 2^j`.

mod text;

pub use text::{parse_circuit, parse_circuit_str, write_circuit, write_matrix_file};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::SquareMatrix;

/// Hard cap on register width; a 24-qbit state already holds 16M amplitudes.
pub const MAX_QBITS: usize = 24;

/// Tolerance for the orthogonality check on initialization matrices.
pub const INIT_ORTHO_TOL: f64 = 1e-9;

/// Role tag for a circuit qbit, used in reports and emitted circuit headers.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QbitRole {
    Input,
    Encoding,
    Output,
    Parameter,
    Auxiliary,
}

impl QbitRole {
    pub fn as_str(self) -> &'static str {
        match self {
            QbitRole::Input => "input",
            QbitRole::Encoding => "encoding",
            QbitRole::Output => "output",
            QbitRole::Parameter => "parameter",
            QbitRole::Auxiliary => "auxiliary",
        }
    }

    pub fn from_str(s: &str) -> Option<Self> {
        match s {
            "input" => Some(QbitRole::Input),
            "encoding" => Some(QbitRole::Encoding),
            "output" => Some(QbitRole::Output),
            "parameter" => Some(QbitRole::Parameter),
            "auxiliary" => Some(QbitRole::Auxiliary),
            _ => None,
        }
    }
}

/// State preparation by a real orthogonal matrix on the lowest qbits.
#[derive(Debug, Clone, PartialEq)]
pub struct UnitaryInit {
    /// Number of qbits covered; the matrix is `2^num_qbits` square.
    pub num_qbits: usize,
    pub matrix: SquareMatrix,
}

impl UnitaryInit {
    pub fn new(num_qbits: usize, matrix: SquareMatrix) -> Result<Self> {
        if matrix.dim() != 1 << num_qbits {
            return Err(Error::LengthMismatch {
                expected: 1 << num_qbits,
                got: matrix.dim(),
            });
        }
        matrix.check_orthogonal(INIT_ORTHO_TOL)?;
        Ok(Self { num_qbits, matrix })
    }
}

/// A single circuit operation.
#[derive(Debug, Clone, PartialEq)]
pub enum Gate {
    /// Pauli-X on one qbit.
    X(usize),
    /// Hadamard on one qbit.
    H(usize),
    /// Rotation about Y: `|0> -> cos(a/2)|0> + sin(a/2)|1>`.
    Ry { qbit: usize, angle: f64 },
    /// Pauli-Z on one qbit.
    Z(usize),
    /// Sign flip on every basis state whose bits at `qbits` match `polarity`
    /// (`true` = control satisfied by `|1>`). Covers Z, CZ and the
    /// polarity-selected multi-controlled Z used by flip gates.
    ControlledZ { qbits: Vec<usize>, polarity: Vec<bool> },
    /// Flip `target` on every basis state whose control bits match `polarity`.
    ControlledX {
        controls: Vec<usize>,
        polarity: Vec<bool>,
        target: usize,
    },
    /// State preparation; must be the first gate of a circuit.
    Init(UnitaryInit),
}

impl Gate {
    pub fn ry(qbit: usize, angle: f64) -> Self {
        Gate::Ry { qbit, angle }
    }

    /// Controlled-Z with all controls satisfied by `|1>`.
    pub fn cz(qbits: Vec<usize>) -> Self {
        let polarity = vec![true; qbits.len()];
        Gate::ControlledZ { qbits, polarity }
    }

    /// Controlled-X with all controls satisfied by `|1>` (Toffoli family).
    pub fn cx(controls: Vec<usize>, target: usize) -> Self {
        let polarity = vec![true; controls.len()];
        Gate::ControlledX {
            controls,
            polarity,
            target,
        }
    }

    /// Qbits the gate touches.
    pub fn qbits(&self) -> Vec<usize> {
        match self {
            Gate::X(q) | Gate::H(q) | Gate::Z(q) => vec![*q],
            Gate::Ry { qbit, .. } => vec![*qbit],
            Gate::ControlledZ { qbits, .. } => qbits.clone(),
            Gate::ControlledX {
                controls, target, ..
            } => {
                let mut qs = controls.clone();
                qs.push(*target);
                qs
            }
            Gate::Init(init) => (0..init.num_qbits).collect(),
        }
    }

    fn validate(&self, num_qbits: usize) -> Result<()> {
        let check = |q: usize| -> Result<()> {
            if q >= num_qbits {
                Err(Error::QbitOutOfRange { qbit: q, num_qbits })
            } else {
                Ok(())
            }
        };
        match self {
            Gate::X(q) | Gate::H(q) | Gate::Z(q) => check(*q),
            Gate::Ry { qbit, .. } => check(*qbit),
            Gate::ControlledZ { qbits, polarity } => {
                if qbits.is_empty() {
                    return Err(Error::InvalidGate("controlled Z with no qbits".into()));
                }
                if qbits.len() != polarity.len() {
                    return Err(Error::InvalidGate(format!(
                        "polarity list has {} entries for {} qbits",
                        polarity.len(),
                        qbits.len()
                    )));
                }
                for &q in qbits {
                    check(q)?;
                }
                if has_duplicates(qbits) {
                    return Err(Error::InvalidGate("repeated qbit in controlled Z".into()));
                }
                Ok(())
            }
            Gate::ControlledX {
                controls,
                polarity,
                target,
            } => {
                if controls.len() != polarity.len() {
                    return Err(Error::InvalidGate(format!(
                        "polarity list has {} entries for {} controls",
                        polarity.len(),
                        controls.len()
                    )));
                }
                for &q in controls {
                    check(q)?;
                }
                check(*target)?;
                if controls.contains(target) {
                    return Err(Error::InvalidGate(
                        "controlled X target repeated as control".into(),
                    ));
                }
                if has_duplicates(controls) {
                    return Err(Error::InvalidGate("repeated control qbit".into()));
                }
                Ok(())
            }
            Gate::Init(init) => {
                if init.num_qbits > num_qbits {
                    return Err(Error::QbitOutOfRange {
                        qbit: init.num_qbits - 1,
                        num_qbits,
                    });
                }
                Ok(())
            }
        }
    }
}

fn has_duplicates(qbits: &[usize]) -> bool {
    let mut seen = qbits.to_vec();
    seen.sort_unstable();
    seen.windows(2).any(|w| w[0] == w[1])
}

/// Ordered gate list over a fixed-width qbit register.
#[derive(Debug, Clone, PartialEq)]
pub struct Circuit {
    pub num_qbits: usize,
    pub gates: Vec<Gate>,
    /// Role per qbit; defaults to auxiliary.
    pub qbit_roles: Vec<QbitRole>,
}

impl Circuit {
    pub fn new(num_qbits: usize) -> Self {
        Self {
            num_qbits,
            gates: Vec::new(),
            qbit_roles: vec![QbitRole::Auxiliary; num_qbits],
        }
    }

    pub fn push(&mut self, gate: Gate) {
        self.gates.push(gate);
    }

    pub fn set_role(&mut self, qbit: usize, role: QbitRole) {
        self.qbit_roles[qbit] = role;
    }

    /// Structural checks: widths, gate indices and init placement.
    pub fn validate(&self) -> Result<()> {
        if self.num_qbits > MAX_QBITS {
            return Err(Error::TooManyQbits {
                requested: self.num_qbits,
                max: MAX_QBITS,
            });
        }
        for (pos, gate) in self.gates.iter().enumerate() {
            gate.validate(self.num_qbits)?;
            if matches!(gate, Gate::Init(_)) && pos != 0 {
                return Err(Error::InitNotFirst);
            }
        }
        Ok(())
    }
}

/// Complex amplitude vector over `2^k` basis states.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    num_qbits: usize,
    amps: Vec<Complex64>,
}

impl StateVector {
    /// `|0...0>` on `num_qbits` qbits.
    pub fn zero(num_qbits: usize) -> Result<Self> {
        if num_qbits > MAX_QBITS {
            return Err(Error::TooManyQbits {
                requested: num_qbits,
                max: MAX_QBITS,
            });
        }
        let mut amps = vec![Complex64::new(0.0, 0.0); 1 << num_qbits];
        amps[0] = Complex64::new(1.0, 0.0);
        Ok(Self { num_qbits, amps })
    }

    pub fn from_amplitudes(num_qbits: usize, amps: Vec<Complex64>) -> Result<Self> {
        if num_qbits > MAX_QBITS {
            return Err(Error::TooManyQbits {
                requested: num_qbits,
                max: MAX_QBITS,
            });
        }
        if amps.len() != 1 << num_qbits {
            return Err(Error::LengthMismatch {
                expected: 1 << num_qbits,
                got: amps.len(),
            });
        }
        Ok(Self { num_qbits, amps })
    }

    pub fn num_qbits(&self) -> usize {
        self.num_qbits
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    /// Probability of each basis state.
    pub fn probabilities(&self) -> Vec<f64> {
        self.amps.iter().map(|a| a.norm_sqr()).collect()
    }
}

/// Marginal probability of reading `|1>` on one qbit.
pub fn measure_prob(state: &StateVector, qbit: usize) -> Result<f64> {
    if qbit >= state.num_qbits {
        return Err(Error::QbitOutOfRange {
            qbit,
            num_qbits: state.num_qbits,
        });
    }
    let mask = 1usize << qbit;
    Ok(state
        .amps
        .iter()
        .enumerate()
        .filter(|(i, _)| i & mask != 0)
        .map(|(_, a)| a.norm_sqr())
        .sum())
}

/// Applies one gate, consuming the state and returning the transformed one.
pub fn apply_gate(state: StateVector, gate: &Gate) -> Result<StateVector> {
    gate.validate(state.num_qbits)?;
    let mut st = state;
    match gate {
        Gate::X(q) => {
            apply_single(&mut st.amps, *q, |a, b| (b, a));
        }
        Gate::H(q) => {
            let s = std::f64::consts::FRAC_1_SQRT_2;
            apply_single(&mut st.amps, *q, |a, b| (s * (a + b), s * (a - b)));
        }
        Gate::Ry { qbit, angle } => {
            let c = (angle / 2.0).cos();
            let s = (angle / 2.0).sin();
            apply_single(&mut st.amps, *qbit, |a, b| (c * a - s * b, s * a + c * b));
        }
        Gate::Z(q) => {
            let mask = 1usize << q;
            for (i, amp) in st.amps.iter_mut().enumerate() {
                if i & mask != 0 {
                    *amp = -*amp;
                }
            }
        }
        Gate::ControlledZ { qbits, polarity } => {
            let (mask, pattern) = mask_pattern(qbits, polarity);
            for (i, amp) in st.amps.iter_mut().enumerate() {
                if i & mask == pattern {
                    *amp = -*amp;
                }
            }
        }
        Gate::ControlledX {
            controls,
            polarity,
            target,
        } => {
            let (mask, pattern) = mask_pattern(controls, polarity);
            let tmask = 1usize << target;
            for i in 0..st.amps.len() {
                if i & tmask == 0 && i & mask == pattern {
                    st.amps.swap(i, i | tmask);
                }
            }
        }
        Gate::Init(init) => {
            init.matrix.check_orthogonal(INIT_ORTHO_TOL)?;
            apply_init(&mut st.amps, init);
        }
    }
    Ok(st)
}

fn mask_pattern(qbits: &[usize], polarity: &[bool]) -> (usize, usize) {
    let mut mask = 0usize;
    let mut pattern = 0usize;
    for (&q, &p) in qbits.iter().zip(polarity) {
        mask |= 1 << q;
        if p {
            pattern |= 1 << q;
        }
    }
    (mask, pattern)
}

fn apply_single<F>(amps: &mut [Complex64], qbit: usize, f: F)
where
    F: Fn(Complex64, Complex64) -> (Complex64, Complex64),
{
    let mask = 1usize << qbit;
    for i in 0..amps.len() {
        if i & mask == 0 {
            let (a, b) = f(amps[i], amps[i | mask]);
            amps[i] = a;
            amps[i | mask] = b;
        }
    }
}

fn apply_init(amps: &mut [Complex64], init: &UnitaryInit) {
    let dim = 1usize << init.num_qbits;
    let mut block = vec![Complex64::new(0.0, 0.0); dim];
    for start in (0..amps.len()).step_by(dim) {
        let src = &amps[start..start + dim];
        for (r, out) in block.iter_mut().enumerate() {
            let mut acc = Complex64::new(0.0, 0.0);
            for (c, v) in src.iter().enumerate() {
                if v.norm_sqr() != 0.0 {
                    acc += init.matrix.get(r, c) * v;
                }
            }
            *out = acc;
        }
        amps[start..start + dim].copy_from_slice(&block);
    }
}

/// Runs a circuit from `|0...0>` and returns the final state.
pub fn run(circuit: &Circuit) -> Result<StateVector> {
    circuit.validate()?;
    let mut state = StateVector::zero(circuit.num_qbits)?;
    for gate in &circuit.gates {
        state = apply_gate(state, gate)?;
    }
    Ok(state)
}
