//! Fixed workloads shared by the benchmarks.

use uqcpac::{AnsatzShape, Circuit, Gate, ParamVector};

/// A deterministic mixed circuit of `len` gates on `n` qubits.
pub fn mixed_circuit(n: usize, len: usize) -> Circuit {
    let gates = (0..len)
        .map(|k| match k % 4 {
            0 => Gate::h(k % n),
            1 => Gate::rx(k % n, 0.1 * k as f64),
            2 => Gate::cnot(k % n, (k + 1) % n),
            _ => Gate::rz((k + 2) % n, 0.37 * k as f64),
        })
        .collect();
    Circuit::from_gates(n, gates).expect("indices are in range")
}

/// Ansatz parameters with a fixed irregular pattern.
pub fn ramp_params(shape: &AnsatzShape) -> ParamVector {
    let values = (0..shape.param_count()).map(|i| (i as f64 * 0.618_033_988_7) % 6.0).collect();
    ParamVector::new(shape, values).expect("length matches shape")
}
