//! Exact compilation of single-qubit + CNOT circuits into the universal ansatz.
//!
//! The source circuit is first rewritten so every CNOT has qubit 0 as its
//! control. Each single-qubit gate then takes one ansatz layer and each
//! `CNOT₀ⱼ` takes two. All other blocks stay at zero angles, which makes
//! them the identity. The compiler also sums the global phase dropped at
//! every step, so the result satisfies `C = e^{iφ}·F(θ)` for a known `φ`.

use crate::ansatz::{
    ansatz_unitary, AnsatzShape, ParamVector, ANGLES_PER_BLOCK, ANGLES_PER_LEVEL1,
};
use crate::circuit::{Circuit, Gate, UNITARY_TOL};
use crate::error::{Error, Result};
use crate::linalg::{self, det2, is_unitary2, mul2, scale2, spectral_norm2, wrap_angle, wrap_phase, Mat2, C64, I};
use crate::metrics::equal_up_to_phase;
use crate::sim::{circuit_unitary, DENSE_CAP};
use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI, TAU};

/// `sin(γ/2)` or `cos(γ/2)` below this counts as a pole of the decomposition.
const POLE_TOL: f64 = 1e-13;

/// Phase agreement required between the ledger and the recovered phase.
pub const PHASE_TOL: f64 = 1e-8;

/// `V = e^{iα}·Rz(β)·Rx(γ)·Rz(δ)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EulerZX {
    /// Global phase in `(−π, π]`.
    pub alpha: f64,
    /// In `[0, 2π)`.
    pub beta: f64,
    /// In `[0, π]`.
    pub gamma: f64,
    /// In `[0, 2π)`.
    pub delta: f64,
}

impl EulerZX {
    pub fn reconstruct(&self) -> Mat2 {
        let zxz = mul2(&mul2(&linalg::rz(self.beta), &linalg::rx(self.gamma)), &linalg::rz(self.delta));
        scale2(C64::from_polar(1.0, self.alpha), &zxz)
    }
}

/// Reduce a Z-angle to `[0, 2π)`; `Rz(θ+2π) = −Rz(θ)`, so each odd wrap
/// flips the global phase by `π`.
fn canonical_z(theta: f64, alpha: &mut f64) -> f64 {
    let turns = (theta / TAU).floor();
    if turns.rem_euclid(2.0) == 1.0 {
        *alpha += PI;
    }
    wrap_angle(theta)
}

/// Z–X–Z Euler angles of a `2×2` unitary.
///
/// Away from the poles `β ± δ` come from the phases of the diagonal and
/// off-diagonal entries of `e^{−iα}V ∈ SU(2)`. At a pole (diagonal or
/// antidiagonal `V`) only `β + δ` or `β − δ` is defined, so `δ = 0`.
pub fn euler_zx(v: &Mat2) -> Result<EulerZX> {
    if !is_unitary2(v, UNITARY_TOL) {
        return Err(Error::domain("euler_zx input is not unitary"));
    }
    let mut alpha = det2(v).arg() / 2.0;
    let su = scale2(C64::from_polar(1.0, -alpha), v);
    let gamma = 2.0 * su[1][0].norm().atan2(su[0][0].norm());
    let (s, c) = (gamma / 2.0).sin_cos();
    let (beta, delta) = if s <= POLE_TOL {
        (-2.0 * su[0][0].arg(), 0.0)
    } else if c <= POLE_TOL {
        (2.0 * (I * su[1][0]).arg(), 0.0)
    } else {
        let sum = -2.0 * su[0][0].arg();
        let diff = 2.0 * (I * su[1][0]).arg();
        ((sum + diff) / 2.0, (sum - diff) / 2.0)
    };
    let beta = canonical_z(beta, &mut alpha);
    let delta = canonical_z(delta, &mut alpha);
    Ok(EulerZX {
        alpha: wrap_phase(alpha),
        beta,
        gamma,
        delta,
    })
}

/// Spectral-norm residual of an Euler reconstruction.
pub fn euler_residual(v: &Mat2, e: &EulerZX) -> f64 {
    let r = e.reconstruct();
    let diff = [[r[0][0] - v[0][0], r[0][1] - v[0][1]], [r[1][0] - v[1][0], r[1][1] - v[1][1]]];
    spectral_norm2(&diff)
}

/// A gate in the restricted set the layer construction consumes.
#[derive(Debug, Clone, PartialEq)]
pub enum NormalizedGate {
    SingleQubit { qubit: usize, matrix: Mat2 },
    /// CNOT with control on qubit 0.
    CnotFromFirst { target: usize },
}

impl NormalizedGate {
    pub fn layers(&self) -> usize {
        match self {
            NormalizedGate::SingleQubit { .. } => 1,
            NormalizedGate::CnotFromFirst { .. } => 2,
        }
    }

    pub fn to_gate(&self) -> Gate {
        match self {
            NormalizedGate::SingleQubit { qubit, matrix } => Gate::u1(*qubit, *matrix),
            NormalizedGate::CnotFromFirst { target } => Gate::cnot(0, *target),
        }
    }
}

fn h_on(q: usize) -> NormalizedGate {
    NormalizedGate::SingleQubit {
        qubit: q,
        matrix: linalg::hadamard(),
    }
}

/// `CNOT_{c,0} = (H⊗H)·CNOT_{0,c}·(H⊗H)`
fn push_reversed_cnot(out: &mut Vec<NormalizedGate>, control: usize) {
    out.push(h_on(0));
    out.push(h_on(control));
    out.push(NormalizedGate::CnotFromFirst { target: control });
    out.push(h_on(0));
    out.push(h_on(control));
}

/// Rewrite a circuit into single-qubit gates and CNOTs controlled by qubit 0.
/// The product of the output equals the input unitary exactly.
pub fn normalize_circuit(circuit: &Circuit) -> Result<Vec<NormalizedGate>> {
    let mut out = Vec::with_capacity(circuit.len());
    for gate in circuit.gates() {
        match *gate {
            Gate::Cnot { control: 0, target } => out.push(NormalizedGate::CnotFromFirst { target }),
            Gate::Cnot { control, target: 0 } => push_reversed_cnot(&mut out, control),
            Gate::Cnot { control, target } => {
                // CNOT_{c,t} = (CNOT_{0,t}·CNOT_{c,0})²; the factors are
                // involutions, so either time order of each pair works.
                for _ in 0..2 {
                    out.push(NormalizedGate::CnotFromFirst { target });
                    push_reversed_cnot(&mut out, control);
                }
            }
            ref g => {
                let qubit = g.single_qubit().expect("non-CNOT gates act on one qubit");
                let matrix = g.matrix().expect("non-CNOT gates have a 2x2 matrix");
                out.push(NormalizedGate::SingleQubit { qubit, matrix });
            }
        }
    }
    Ok(out)
}

/// Parameters contributed by one normalized gate.
#[derive(Debug, Clone, PartialEq)]
pub struct LayerAssignment {
    /// One `12(n−1)` slice per consumed layer, in time order.
    pub layers: Vec<Vec<f64>>,
    /// Phase `φ` with `gate = e^{iφ}·(realized layers)`.
    pub phase: f64,
}

fn put_level1(layer: &mut [f64], block: usize, sub_block: usize, e: &EulerZX) {
    let at = block * ANGLES_PER_BLOCK + sub_block * ANGLES_PER_LEVEL1;
    layer[at] = e.delta;
    layer[at + 1] = e.gamma;
    layer[at + 2] = e.beta;
}

/// The four single-qubit factors of the CNOT identity
/// `(W₄⊗W₃)·CNOT·(I⊗W₂)·CNOT·(I⊗W₁) = e^{iπ/4}·CNOT`.
pub fn cnot_w_factors() -> [Mat2; 4] {
    [
        linalg::rz(FRAC_PI_2),
        linalg::ry(FRAC_PI_2),
        mul2(&linalg::rz(-FRAC_PI_2), &linalg::ry(-FRAC_PI_2)),
        linalg::rz(-FRAC_PI_2),
    ]
}

/// Phase of `CNOT` relative to the W-sequence product.
pub const CNOT_W_PHASE: f64 = -FRAC_PI_4;

/// Ansatz parameters for a single normalized gate on `n` qubits.
///
/// A single-qubit gate on qubit `j > 0` goes in the second level-1 block
/// of the level-2 block targeting `j`; on qubit 0 it goes in the first
/// level-1 block of the first level-2 block. `CNOT₀ⱼ` uses the level-2
/// block targeting `j` in two consecutive layers: `W₁`, `W₂` on qubit `j`
/// around the two CNOTs of the first, then `W₄ ⊗ W₃` ahead of the
/// self-cancelling CNOT pair of the second.
pub fn layers_for_gate(gate: &NormalizedGate, n: usize) -> Result<LayerAssignment> {
    if n < 2 {
        return Err(Error::domain(format!("ansatz needs at least 2 qubits, got {n}")));
    }
    let width = crate::ansatz::layer_param_count(n);
    match gate {
        NormalizedGate::SingleQubit { qubit, matrix } => {
            if *qubit >= n {
                return Err(Error::domain(format!("qubit {qubit} out of range for {n} qubits")));
            }
            let e = euler_zx(matrix)?;
            let mut layer = vec![0.0; width];
            if *qubit == 0 {
                put_level1(&mut layer, 0, 0, &e);
            } else {
                put_level1(&mut layer, qubit - 1, 1, &e);
            }
            Ok(LayerAssignment {
                layers: vec![layer],
                phase: e.alpha,
            })
        }
        NormalizedGate::CnotFromFirst { target } => {
            if *target == 0 || *target >= n {
                return Err(Error::domain(format!("CNOT target {target} invalid for {n} qubits")));
            }
            let block = target - 1;
            let [w1, w2, w3, w4] = cnot_w_factors().map(|w| euler_zx(&w).expect("W factors are unitary"));
            let mut first = vec![0.0; width];
            put_level1(&mut first, block, 1, &w1);
            put_level1(&mut first, block, 3, &w2);
            let mut second = vec![0.0; width];
            put_level1(&mut second, block, 0, &w4);
            put_level1(&mut second, block, 1, &w3);
            Ok(LayerAssignment {
                layers: vec![first, second],
                phase: CNOT_W_PHASE + w1.alpha + w2.alpha + w3.alpha + w4.alpha,
            })
        }
    }
}

/// Result of compiling a circuit: `source = e^{i·global_phase}·F(θ)`.
#[derive(Debug, Clone, PartialEq)]
pub struct CompiledAnsatz {
    pub shape: AnsatzShape,
    pub theta: ParamVector,
    pub layers_used: usize,
    /// Radians, in `(−π, π]`.
    pub global_phase: f64,
    /// Length of the normalized gate list the layers were built from.
    pub normalized_len: usize,
}

/// Compile into the ansatz. Without a budget the depth is exactly the number
/// of layers used (at least 1); with one, the unused tail stays at zero.
pub fn compile_to_ansatz(circuit: &Circuit, depth_budget: Option<usize>) -> Result<CompiledAnsatz> {
    let n = circuit.n();
    if n < 2 {
        return Err(Error::domain("compilation needs a circuit on at least 2 qubits"));
    }
    let normalized = normalize_circuit(circuit)?;
    let required: usize = normalized.iter().map(NormalizedGate::layers).sum();
    let depth = match depth_budget {
        Some(budget) if required > budget => return Err(Error::Capacity { required, budget }),
        Some(budget) => budget,
        None => required.max(1),
    };
    let shape = AnsatzShape::new(n, depth)?;
    let mut values = Vec::with_capacity(shape.param_count());
    let mut phase = 0.0;
    for g in &normalized {
        let a = layers_for_gate(g, n)?;
        phase += a.phase;
        for layer in a.layers {
            values.extend(layer);
        }
    }
    values.resize(shape.param_count(), 0.0);
    Ok(CompiledAnsatz {
        shape,
        theta: ParamVector::new(&shape, values)?,
        layers_used: required,
        global_phase: wrap_phase(phase),
        normalized_len: normalized.len(),
    })
}

/// Default fixed depth `M·nᶜ`, saturating.
pub fn fixed_depth(n: usize, c: u32, m: usize) -> usize {
    (n as u64).checked_pow(c).and_then(|p| p.checked_mul(m as u64)).map_or(usize::MAX, |d| d as usize)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Verification {
    pub ok: bool,
    /// `‖F†C − e^{iφ}I‖₂`.
    pub residual: f64,
    /// Phase `φ` recovered from the unitaries.
    pub phase: f64,
    /// Distance on the circle between `phase` and the recorded global phase.
    pub phase_error: f64,
}

/// Rebuild both unitaries and check `source = e^{iφ}·F(θ)` with `φ` the
/// recorded global phase.
pub fn verify_compilation(compiled: &CompiledAnsatz, source: &Circuit, tol: f64) -> Result<Verification> {
    if source.n() > DENSE_CAP {
        return Err(Error::Resource { n: source.n(), cap: DENSE_CAP });
    }
    if source.n() != compiled.shape.n() {
        return Err(Error::domain(format!(
            "{}-qubit source against {}-qubit ansatz",
            source.n(),
            compiled.shape.n()
        )));
    }
    let f = ansatz_unitary(&compiled.shape, &compiled.theta)?;
    let c = circuit_unitary(source)?;
    let r = equal_up_to_phase(&f, &c, tol)?;
    let phase_error = wrap_phase(r.phase - compiled.global_phase).abs();
    Ok(Verification {
        ok: r.equivalent && phase_error <= PHASE_TOL,
        residual: r.residual,
        phase: r.phase,
        phase_error,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{hadamard, identity2, kron, mat2_to_dense, max_abs_diff2, pauli_x, UnitaryMatrix, ONE, ZERO};
    use crate::rng::{haar_unitary2, rng_from_seed};

    fn cnot01() -> UnitaryMatrix {
        circuit_unitary(&Circuit::from_gates(2, vec![Gate::cnot(0, 1)]).unwrap()).unwrap()
    }

    fn assert_angles(e: &EulerZX, expected: [f64; 4]) {
        let got = [e.alpha, e.beta, e.gamma, e.delta];
        for (g, x) in got.iter().zip(expected) {
            assert!((g - x).abs() < 1e-12, "{got:?} vs {expected:?}");
        }
    }

    #[test]
    fn euler_examples() {
        assert_angles(&euler_zx(&identity2()).unwrap(), [0.0, 0.0, 0.0, 0.0]);
        assert_angles(&euler_zx(&linalg::rx(1.3)).unwrap(), [0.0, 0.0, 1.3, 0.0]);
        assert_angles(&euler_zx(&hadamard()).unwrap(), [FRAC_PI_2; 4]);
    }

    #[test]
    fn euler_rejects_non_unitary() {
        assert!(euler_zx(&[[ONE, ONE], [ZERO, ONE]]).is_err());
    }

    #[test]
    fn euler_poles() {
        let diag = linalg::rz(2.2);
        let e = euler_zx(&diag).unwrap();
        assert_eq!(e.delta, 0.0);
        assert!(euler_residual(&diag, &e) < 1e-12);
        let anti = mul2(&pauli_x(), &linalg::rz(0.9));
        let e = euler_zx(&anti).unwrap();
        assert_eq!(e.delta, 0.0);
        assert!((e.gamma - PI).abs() < 1e-12);
        assert!(euler_residual(&anti, &e) < 1e-12);
    }

    #[test]
    fn euler_ranges_and_round_trip() {
        let mut rng = rng_from_seed(77);
        for _ in 0..2000 {
            let v = haar_unitary2(&mut rng);
            let e = euler_zx(&v).unwrap();
            assert!((0.0..TAU).contains(&e.beta) && (0.0..TAU).contains(&e.delta));
            assert!((0.0..=PI).contains(&e.gamma));
            assert!(e.alpha > -PI && e.alpha <= PI);
            assert!(euler_residual(&v, &e) < 1e-12);
        }
    }

    #[test]
    fn w_sequence_is_cnot_up_to_phase() {
        let [w1, w2, w3, w4] = cnot_w_factors();
        let id = UnitaryMatrix::identity(2, 2);
        let c = cnot01();
        let p = kron(&mat2_to_dense(&w4), &mat2_to_dense(&w3))
            * &c
            * kron(&id, &mat2_to_dense(&w2))
            * &c
            * kron(&id, &mat2_to_dense(&w1));
        let r = equal_up_to_phase(&p, &c, 1e-12).unwrap();
        assert!(r.equivalent);
        assert!((r.phase - CNOT_W_PHASE).abs() < 1e-12);
    }

    #[test]
    fn normalize_examples() {
        let c = Circuit::from_gates(3, vec![Gate::cnot(0, 2)]).unwrap();
        assert_eq!(normalize_circuit(&c).unwrap(), vec![NormalizedGate::CnotFromFirst { target: 2 }]);

        let c = Circuit::from_gates(3, vec![Gate::cnot(2, 0)]).unwrap();
        let out = normalize_circuit(&c).unwrap();
        assert_eq!(out, vec![h_on(0), h_on(2), NormalizedGate::CnotFromFirst { target: 2 }, h_on(0), h_on(2)]);

        let c = Circuit::from_gates(3, vec![Gate::cnot(1, 2)]).unwrap();
        let out = normalize_circuit(&c).unwrap();
        assert_eq!(out.len(), 12);
        assert_eq!(out[0], NormalizedGate::CnotFromFirst { target: 2 });
        assert_eq!(out[6], NormalizedGate::CnotFromFirst { target: 2 });
        let rebuilt = Circuit::from_gates(3, out.iter().map(NormalizedGate::to_gate).collect()).unwrap();
        let diff = circuit_unitary(&rebuilt).unwrap() - circuit_unitary(&c).unwrap();
        assert!(diff.norm() < 1e-10);
    }

    #[test]
    fn single_qubit_layer() {
        let g = NormalizedGate::SingleQubit { qubit: 1, matrix: linalg::rx(0.7) };
        let a = layers_for_gate(&g, 3).unwrap();
        assert_eq!(a.layers.len(), 1);
        let shape = AnsatzShape::new(3, 1).unwrap();
        let f = ansatz_unitary(&shape, &ParamVector::new(&shape, a.layers[0].clone()).unwrap()).unwrap();
        let id = UnitaryMatrix::identity(2, 2);
        let expected = kron(&kron(&id, &mat2_to_dense(&linalg::rx(0.7))), &id);
        assert!(equal_up_to_phase(&f, &expected, 1e-10).unwrap().equivalent);

        let g = NormalizedGate::SingleQubit { qubit: 0, matrix: identity2() };
        let a = layers_for_gate(&g, 2).unwrap();
        assert_eq!(a.layers, vec![vec![0.0; 12]]);
        assert_eq!(a.phase, 0.0);
    }

    #[test]
    fn cnot_takes_two_layers() {
        let g = NormalizedGate::CnotFromFirst { target: 1 };
        let a = layers_for_gate(&g, 2).unwrap();
        assert_eq!(a.layers.len(), 2);
        let shape = AnsatzShape::new(2, 2).unwrap();
        let theta = ParamVector::new(&shape, a.layers.concat()).unwrap();
        let f = ansatz_unitary(&shape, &theta).unwrap();
        let r = equal_up_to_phase(&f, &cnot01(), 1e-10).unwrap();
        assert!(r.equivalent);
        assert!(wrap_phase(r.phase - a.phase).abs() < 1e-10);
    }

    #[test]
    fn compile_examples() {
        let c = Circuit::from_gates(2, vec![Gate::h(0)]).unwrap();
        let compiled = compile_to_ansatz(&c, None).unwrap();
        assert_eq!(compiled.layers_used, 1);
        let v = verify_compilation(&compiled, &c, 1e-9).unwrap();
        assert!(v.ok && v.residual <= 1e-9);

        let c = Circuit::from_gates(2, vec![Gate::cnot(0, 1)]).unwrap();
        let compiled = compile_to_ansatz(&c, None).unwrap();
        assert_eq!(compiled.layers_used, 2);
        assert!(verify_compilation(&compiled, &c, 1e-9).unwrap().ok);
    }

    #[test]
    fn budget_handling() {
        let c = Circuit::from_gates(3, vec![Gate::cnot(1, 2)]).unwrap();
        match compile_to_ansatz(&c, Some(4)) {
            Err(Error::Capacity { required, budget }) => {
                assert_eq!(required, 16);
                assert_eq!(budget, 4);
            }
            other => panic!("expected capacity error, got {other:?}"),
        }
        let compiled = compile_to_ansatz(&c, Some(20)).unwrap();
        assert_eq!(compiled.shape.depth(), 20);
        assert!(compiled.theta.values()[16 * 24..].iter().all(|&x| x == 0.0));
        assert!(verify_compilation(&compiled, &c, 1e-9).unwrap().ok);
    }

    #[test]
    fn identity_and_perturbed_verification() {
        let c = Circuit::new(2).unwrap();
        let compiled = compile_to_ansatz(&c, None).unwrap();
        assert_eq!(compiled.layers_used, 0);
        let v = verify_compilation(&compiled, &c, 1e-12).unwrap();
        assert!(v.ok && v.phase.abs() < 1e-12);

        let c = Circuit::from_gates(2, vec![Gate::h(1), Gate::cnot(1, 0), Gate::rx(0, 0.4)]).unwrap();
        let mut compiled = compile_to_ansatz(&c, None).unwrap();
        assert!(verify_compilation(&compiled, &c, 1e-6).unwrap().ok);
        let old = compiled.theta.get(13);
        compiled.theta.set(13, old + 0.1);
        assert!(!verify_compilation(&compiled, &c, 1e-6).unwrap().ok);
    }

    #[test]
    fn one_qubit_circuits_are_rejected() {
        let c = Circuit::from_gates(1, vec![Gate::h(0)]).unwrap();
        assert!(compile_to_ansatz(&c, None).is_err());
    }

    #[test]
    fn reconstruct_matches_definition() {
        let e = EulerZX { alpha: 0.3, beta: 1.0, gamma: 2.0, delta: 3.0 };
        let v = e.reconstruct();
        let again = euler_zx(&v).unwrap();
        assert!(max_abs_diff2(&again.reconstruct(), &v) < 1e-12);
    }

    #[test]
    fn fixed_depth_saturates() {
        assert_eq!(fixed_depth(3, 2, 2), 18);
        assert_eq!(fixed_depth(1 << 20, 8, 2), usize::MAX);
    }
}
