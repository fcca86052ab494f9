//! Applying gates and circuits to states, and materializing full unitaries.

use crate::circuit::{Circuit, Gate};
use crate::error::{Error, Result};
use crate::linalg::{UnitaryMatrix, C64, ONE, ZERO};
use crate::state::{apply_cnot_kernel, apply_single_kernel, StateVector};

/// Default qubit cap for dense `2ⁿ×2ⁿ` matrices (16 MiB at n = 10).
pub const DENSE_CAP: usize = 10;

pub(crate) fn apply_gate_in_place(amps: &mut [C64], n: usize, gate: &Gate) {
    match gate {
        Gate::Cnot { control, target } => apply_cnot_kernel(amps, n, *control, *target),
        g => {
            let q = g.single_qubit().expect("single-qubit gate");
            let m = g.matrix().expect("single-qubit gate");
            apply_single_kernel(amps, n, q, &m);
        }
    }
}

impl StateVector {
    pub fn apply(&mut self, gate: &Gate) -> Result<()> {
        gate.validate(self.n())?;
        let n = self.n();
        apply_gate_in_place(self.amplitudes_mut(), n, gate);
        Ok(())
    }

    pub fn apply_circuit(&mut self, circuit: &Circuit) -> Result<()> {
        check_dims(self.n(), circuit.n())?;
        let n = self.n();
        let amps = self.amplitudes_mut();
        for g in circuit.gates() {
            apply_gate_in_place(amps, n, g);
        }
        Ok(())
    }
}

fn check_dims(state_n: usize, circuit_n: usize) -> Result<()> {
    if state_n != circuit_n {
        return Err(Error::domain(format!(
            "{circuit_n}-qubit circuit applied to {state_n}-qubit state"
        )));
    }
    Ok(())
}

/// `U|ψ⟩` for a single gate.
pub fn apply_gate(state: &StateVector, gate: &Gate) -> Result<StateVector> {
    let mut out = state.clone();
    out.apply(gate)?;
    Ok(out)
}

/// `U_l⋯U_1|ψ⟩` with gates taken in list order.
pub fn apply_circuit(state: &StateVector, circuit: &Circuit) -> Result<StateVector> {
    let mut out = state.clone();
    out.apply_circuit(circuit)?;
    Ok(out)
}

/// Dense unitary of a circuit under the default cap.
pub fn circuit_unitary(circuit: &Circuit) -> Result<UnitaryMatrix> {
    circuit_unitary_with_cap(circuit, DENSE_CAP)
}

pub fn circuit_unitary_with_cap(circuit: &Circuit, cap: usize) -> Result<UnitaryMatrix> {
    let n = circuit.n();
    if n > cap {
        return Err(Error::Resource { n, cap });
    }
    let dim = 1usize << n;
    let mut u = UnitaryMatrix::from_element(dim, dim, ZERO);
    // nalgebra is column-major, so each column is a contiguous amplitude vector.
    for (k, col) in u.as_mut_slice().chunks_mut(dim).enumerate() {
        col[k] = ONE;
        for g in circuit.gates() {
            apply_gate_in_place(col, n, g);
        }
    }
    Ok(u)
}
