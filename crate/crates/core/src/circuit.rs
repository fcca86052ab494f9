//! Gate descriptors and ordered gate lists.
//!
//! Qubits are 0-based and qubit 0 is the most significant bit of a basis
//! index, i.e. the leftmost tensor factor.

use crate::error::{Error, Result};
use crate::linalg::{self, is_unitary2, Mat2};

/// Unitarity tolerance for user-supplied `2×2` matrices.
pub const UNITARY_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub enum Gate {
    H { q: usize },
    Rx { q: usize, theta: f64 },
    Ry { q: usize, theta: f64 },
    Rz { q: usize, theta: f64 },
    Cnot { control: usize, target: usize },
    /// Arbitrary single-qubit unitary.
    U1 { q: usize, matrix: Mat2 },
}

impl Gate {
    pub fn h(q: usize) -> Self {
        Gate::H { q }
    }

    pub fn rx(q: usize, theta: f64) -> Self {
        Gate::Rx { q, theta }
    }

    pub fn ry(q: usize, theta: f64) -> Self {
        Gate::Ry { q, theta }
    }

    pub fn rz(q: usize, theta: f64) -> Self {
        Gate::Rz { q, theta }
    }

    pub fn cnot(control: usize, target: usize) -> Self {
        Gate::Cnot { control, target }
    }

    pub fn u1(q: usize, matrix: Mat2) -> Self {
        Gate::U1 { q, matrix }
    }

    /// Short kind tag as used in circuit files.
    pub fn kind(&self) -> &'static str {
        match self {
            Gate::H { .. } => "H",
            Gate::Rx { .. } => "RX",
            Gate::Ry { .. } => "RY",
            Gate::Rz { .. } => "RZ",
            Gate::Cnot { .. } => "CNOT",
            Gate::U1 { .. } => "U1",
        }
    }

    pub fn is_rotation(&self) -> bool {
        matches!(self, Gate::Rx { .. } | Gate::Ry { .. } | Gate::Rz { .. })
    }

    /// The single qubit this gate acts on, or `None` for CNOT.
    pub fn single_qubit(&self) -> Option<usize> {
        match *self {
            Gate::H { q } | Gate::Rx { q, .. } | Gate::Ry { q, .. } | Gate::Rz { q, .. } | Gate::U1 { q, .. } => {
                Some(q)
            }
            Gate::Cnot { .. } => None,
        }
    }

    /// `2×2` matrix of a single-qubit gate.
    pub fn matrix(&self) -> Option<Mat2> {
        match self {
            Gate::H { .. } => Some(linalg::hadamard()),
            Gate::Rx { theta, .. } => Some(linalg::rx(*theta)),
            Gate::Ry { theta, .. } => Some(linalg::ry(*theta)),
            Gate::Rz { theta, .. } => Some(linalg::rz(*theta)),
            Gate::U1 { matrix, .. } => Some(*matrix),
            Gate::Cnot { .. } => None,
        }
    }

    pub fn validate(&self, n: usize) -> Result<()> {
        let check = |q: usize, what: &str| {
            if q >= n {
                Err(Error::domain(format!("{} {what} index {q} out of range for {n} qubits", self.kind())))
            } else {
                Ok(())
            }
        };
        match self {
            Gate::Cnot { control, target } => {
                check(*control, "control")?;
                check(*target, "target")?;
                if control == target {
                    return Err(Error::domain(format!("CNOT control and target are both {control}")));
                }
            }
            Gate::Rx { q, theta } | Gate::Ry { q, theta } | Gate::Rz { q, theta } => {
                check(*q, "qubit")?;
                if !theta.is_finite() {
                    return Err(Error::domain(format!("{} angle is not finite", self.kind())));
                }
            }
            Gate::H { q } => check(*q, "qubit")?,
            Gate::U1 { q, matrix } => {
                check(*q, "qubit")?;
                if !is_unitary2(matrix, UNITARY_TOL) {
                    return Err(Error::domain("U1 matrix is not unitary"));
                }
            }
        }
        Ok(())
    }
}

/// An ordered gate list over `n` qubits; gates apply in list order.
#[derive(Debug, Clone, PartialEq)]
pub struct Circuit {
    n: usize,
    gates: Vec<Gate>,
}

impl Circuit {
    pub fn new(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::domain("circuit needs at least one qubit"));
        }
        Ok(Circuit { n, gates: Vec::new() })
    }

    pub fn from_gates(n: usize, gates: Vec<Gate>) -> Result<Self> {
        let mut c = Circuit::new(n)?;
        for g in gates {
            c.push(g)?;
        }
        Ok(c)
    }

    pub fn push(&mut self, gate: Gate) -> Result<()> {
        gate.validate(self.n)?;
        self.gates.push(gate);
        Ok(())
    }

    /// Append all gates of `other`, which acts after `self`.
    pub fn extend(&mut self, other: &Circuit) -> Result<()> {
        if other.n != self.n {
            return Err(Error::domain(format!("cannot join {}-qubit and {}-qubit circuits", self.n, other.n)));
        }
        self.gates.extend(other.gates.iter().cloned());
        Ok(())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn len(&self) -> usize {
        self.gates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }

    pub(crate) fn from_trusted(n: usize, gates: Vec<Gate>) -> Self {
        debug_assert!(gates.iter().all(|g| g.validate(n).is_ok()));
        Circuit { n, gates }
    }
}
