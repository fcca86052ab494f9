//! The fixed-pattern universal variational circuit.
//!
//! A *level-1 block* on one qubit is `H·Rx(β)·H·Rx(γ)·H·Rx(δ)·H`, which
//! equals `Rz(β)Rx(γ)Rz(δ)`. A *level-2 block* `Bᵢ` (for `i = 2..n`, counting
//! qubits from 1) holds four level-1 blocks on qubits 1 and `i` and two
//! `CNOT₁ᵢ`. One layer is `Bₙ⋯B₃B₂`, so `B₂` acts first, and the full
//! circuit is that layer repeated `depth` times.
//!
//! Parameters are laid out flat as
//! `(((layer·(n−1) + (i−2))·4 + sub_block)·3 + slot)` with slot order
//! `δ, γ, β` (application order inside the level-1 block). Within `Bᵢ` the
//! sub-blocks are, in time order: qubit 1, qubit `i`, CNOT, qubit 1,
//! qubit `i`, CNOT.

use crate::circuit::{Circuit, Gate};
use crate::error::{Error, Result};
use crate::linalg::{wrap_angle, UnitaryMatrix};
use crate::sim::circuit_unitary;

/// Angles per level-1 block.
pub const ANGLES_PER_LEVEL1: usize = 3;
/// Level-1 blocks per level-2 block.
pub const SUB_BLOCKS: usize = 4;
/// Angles per level-2 block.
pub const ANGLES_PER_BLOCK: usize = ANGLES_PER_LEVEL1 * SUB_BLOCKS;
/// Gates emitted by one level-1 block.
pub const LEVEL1_GATES: usize = 7;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct AnsatzShape {
    n: usize,
    depth: usize,
}

impl AnsatzShape {
    pub fn new(n: usize, depth: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::domain(format!("ansatz needs at least 2 qubits, got {n}")));
        }
        if depth < 1 {
            return Err(Error::domain("ansatz depth must be at least 1"));
        }
        Ok(AnsatzShape { n, depth })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    /// Angles in one layer: `12(n−1)`.
    pub fn layer_param_count(&self) -> usize {
        layer_param_count(self.n)
    }

    /// Total angle count `12(n−1)·depth`.
    pub fn param_count(&self) -> usize {
        self.layer_param_count() * self.depth
    }

    pub fn with_depth(&self, depth: usize) -> Result<Self> {
        AnsatzShape::new(self.n, depth)
    }
}

pub fn layer_param_count(n: usize) -> usize {
    ANGLES_PER_BLOCK * n.saturating_sub(1)
}

/// Angle vector for an ansatz, every entry reduced to `[0, 2π)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ParamVector {
    values: Vec<f64>,
}

impl ParamVector {
    pub fn zeros(shape: &AnsatzShape) -> Self {
        ParamVector {
            values: vec![0.0; shape.param_count()],
        }
    }

    /// Wraps each entry into `[0, 2π)`; non-finite entries are rejected.
    pub fn new(shape: &AnsatzShape, values: Vec<f64>) -> Result<Self> {
        if values.len() != shape.param_count() {
            return Err(Error::domain(format!(
                "shape (n={}, depth={}) needs {} parameters, got {}",
                shape.n,
                shape.depth,
                shape.param_count(),
                values.len()
            )));
        }
        Self::from_values(values)
    }

    /// Shape-free constructor; length is checked later against a shape.
    pub fn from_values(values: Vec<f64>) -> Result<Self> {
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::domain(format!("parameter {i} is not finite")));
        }
        Ok(ParamVector {
            values: values.into_iter().map(wrap_angle).collect(),
        })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn get(&self, i: usize) -> f64 {
        self.values[i]
    }

    /// Set entry `i`, wrapping into `[0, 2π)`.
    pub fn set(&mut self, i: usize, value: f64) {
        self.values[i] = wrap_angle(value);
    }

    pub fn layer(&self, shape: &AnsatzShape, layer: usize) -> &[f64] {
        let k = shape.layer_param_count();
        &self.values[layer * k..(layer + 1) * k]
    }

    /// `max |θᵢ − φᵢ|` without wrap-around.
    pub fn max_abs_diff(&self, other: &ParamVector) -> f64 {
        self.values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    pub(crate) fn check_shape(&self, shape: &AnsatzShape) -> Result<()> {
        if self.values.len() != shape.param_count() {
            return Err(Error::domain(format!(
                "parameter vector has {} entries, shape needs {}",
                self.values.len(),
                shape.param_count()
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AngleSlot {
    Delta = 0,
    Gamma = 1,
    Beta = 2,
}

/// Structured address of one ansatz angle.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ParamIndex {
    pub layer: usize,
    /// Target-qubit label of the level-2 block, counting from 1 (`2..=n`).
    pub block: usize,
    /// Time-order position of the level-1 block inside `Bᵢ` (`0..4`).
    pub sub_block: usize,
    pub angle: AngleSlot,
}

impl ParamIndex {
    pub fn flat(&self, shape: &AnsatzShape) -> Result<usize> {
        if self.layer >= shape.depth
            || self.block < 2
            || self.block > shape.n
            || self.sub_block >= SUB_BLOCKS
        {
            return Err(Error::domain(format!("parameter index {self:?} outside shape {shape:?}")));
        }
        Ok((((self.layer * (shape.n - 1) + (self.block - 2)) * SUB_BLOCKS + self.sub_block)
            * ANGLES_PER_LEVEL1)
            + self.angle as usize)
    }

    pub fn from_flat(shape: &AnsatzShape, flat: usize) -> Result<Self> {
        if flat >= shape.param_count() {
            return Err(Error::domain(format!("flat index {flat} outside shape {shape:?}")));
        }
        let angle = match flat % ANGLES_PER_LEVEL1 {
            0 => AngleSlot::Delta,
            1 => AngleSlot::Gamma,
            _ => AngleSlot::Beta,
        };
        let rest = flat / ANGLES_PER_LEVEL1;
        let sub_block = rest % SUB_BLOCKS;
        let rest = rest / SUB_BLOCKS;
        Ok(ParamIndex {
            layer: rest / (shape.n - 1),
            block: rest % (shape.n - 1) + 2,
            sub_block,
            angle,
        })
    }
}

/// Gates of one level-1 block in time order: `H, Rx(δ), H, Rx(γ), H, Rx(β), H`.
pub fn expand_level1(qubit: usize, beta: f64, gamma: f64, delta: f64) -> Vec<Gate> {
    vec![
        Gate::h(qubit),
        Gate::rx(qubit, delta),
        Gate::h(qubit),
        Gate::rx(qubit, gamma),
        Gate::h(qubit),
        Gate::rx(qubit, beta),
        Gate::h(qubit),
    ]
}

fn push_level1(out: &mut Vec<Gate>, qubit: usize, angles: &[f64]) {
    // angles are stored (δ, γ, β)
    out.extend(expand_level1(qubit, angles[2], angles[1], angles[0]));
}

/// Gates of one layer `Bₙ⋯B₂` in time order (so `B₂` first).
pub fn expand_layer(n: usize, layer_params: &[f64]) -> Result<Vec<Gate>> {
    if n < 2 {
        return Err(Error::domain(format!("ansatz needs at least 2 qubits, got {n}")));
    }
    if layer_params.len() != layer_param_count(n) {
        return Err(Error::domain(format!(
            "a {n}-qubit layer needs {} parameters, got {}",
            layer_param_count(n),
            layer_params.len()
        )));
    }
    let mut gates = Vec::with_capacity((n - 1) * (SUB_BLOCKS * LEVEL1_GATES + 2));
    for (b, block) in layer_params.chunks(ANGLES_PER_BLOCK).enumerate() {
        let target = b + 1;
        let sub = |k: usize| &block[k * ANGLES_PER_LEVEL1..(k + 1) * ANGLES_PER_LEVEL1];
        push_level1(&mut gates, 0, sub(0));
        push_level1(&mut gates, target, sub(1));
        gates.push(Gate::cnot(0, target));
        push_level1(&mut gates, 0, sub(2));
        push_level1(&mut gates, target, sub(3));
        gates.push(Gate::cnot(0, target));
    }
    Ok(gates)
}

/// The full ansatz circuit for `θ`, layer 0 first.
pub fn build_ansatz(shape: &AnsatzShape, theta: &ParamVector) -> Result<Circuit> {
    theta.check_shape(shape)?;
    let mut gates = Vec::new();
    for layer in 0..shape.depth {
        gates.extend(expand_layer(shape.n, theta.layer(shape, layer))?);
    }
    Ok(Circuit::from_trusted(shape.n, gates))
}

pub fn ansatz_unitary(shape: &AnsatzShape, theta: &ParamVector) -> Result<UnitaryMatrix> {
    circuit_unitary(&build_ansatz(shape, theta)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{self, mat2_to_dense, mul2};
    use crate::metrics::equal_up_to_phase;
    use std::f64::consts::{FRAC_PI_2, PI};

    fn level1_unitary(beta: f64, gamma: f64, delta: f64) -> UnitaryMatrix {
        circuit_unitary(&Circuit::from_gates(1, expand_level1(0, beta, gamma, delta)).unwrap()).unwrap()
    }

    #[test]
    fn level1_zero_is_identity() {
        let u = level1_unitary(0.0, 0.0, 0.0);
        assert!((u - UnitaryMatrix::identity(2, 2)).norm() < 1e-12);
    }

    #[test]
    fn level1_gate_census() {
        let g = expand_level1(0, 0.1, 0.2, 0.3);
        assert_eq!(g.len(), 7);
        assert_eq!(g.iter().filter(|g| matches!(g, Gate::H { .. })).count(), 4);
    }

    #[test]
    fn level1_equals_zxz() {
        let (b, g, d) = (0.7, 2.1, 5.3);
        let zxz = mul2(&mul2(&linalg::rz(b), &linalg::rx(g)), &linalg::rz(d));
        let r = equal_up_to_phase(&level1_unitary(b, g, d), &mat2_to_dense(&zxz), 1e-12).unwrap();
        assert!(r.equivalent);
        assert!(r.phase.abs() < 1e-12, "level-1 block should match exactly, phase {}", r.phase);
    }

    #[test]
    fn level1_quarter_turns_give_hadamard() {
        let u = level1_unitary(FRAC_PI_2, FRAC_PI_2, FRAC_PI_2);
        let r = equal_up_to_phase(&u, &mat2_to_dense(&linalg::hadamard()), 1e-12).unwrap();
        assert!(r.equivalent);
        // H = i·(-iH), so H = e^{iπ/2}·U
        assert!((r.phase - FRAC_PI_2).abs() < 1e-12);
    }

    #[test]
    fn layer_gate_counts_and_order() {
        let g2 = expand_layer(2, &[0.0; 12]).unwrap();
        assert_eq!(g2.len(), 30);
        let g3 = expand_layer(3, &[0.0; 24]).unwrap();
        assert_eq!(g3.len(), 60);
        assert_eq!(g3[14], Gate::cnot(0, 1));
        assert_eq!(g3[44], Gate::cnot(0, 2));
        assert!(expand_layer(3, &[0.0; 12]).is_err());
    }

    #[test]
    fn zero_layer_is_identity() {
        let c = Circuit::from_gates(3, expand_layer(3, &[0.0; 24]).unwrap()).unwrap();
        assert!((circuit_unitary(&c).unwrap() - UnitaryMatrix::identity(8, 8)).norm() < 1e-10);
    }

    #[test]
    fn shape_param_counts() {
        let s = AnsatzShape::new(3, 2).unwrap();
        assert_eq!(s.param_count(), 48);
        assert!(build_ansatz(&s, &ParamVector::from_values(vec![0.0; 47]).unwrap()).is_err());
        assert!(AnsatzShape::new(1, 1).is_err());
        assert!(AnsatzShape::new(2, 0).is_err());
    }

    #[test]
    fn param_vector_wraps() {
        let s = AnsatzShape::new(2, 1).unwrap();
        let mut v = vec![0.0; 12];
        v[0] = -0.5;
        v[1] = 2.0 * PI + 0.25;
        let p = ParamVector::new(&s, v).unwrap();
        assert!((p.get(0) - (2.0 * PI - 0.5)).abs() < 1e-15);
        assert!((p.get(1) - 0.25).abs() < 1e-14);
        let mut bad = vec![0.0; 12];
        bad[3] = f64::NAN;
        assert!(ParamVector::new(&s, bad).is_err());
    }

    #[test]
    fn flat_index_round_trip() {
        let s = AnsatzShape::new(4, 3).unwrap();
        for flat in 0..s.param_count() {
            let idx = ParamIndex::from_flat(&s, flat).unwrap();
            assert_eq!(idx.flat(&s).unwrap(), flat);
        }
        let idx = ParamIndex { layer: 1, block: 3, sub_block: 2, angle: AngleSlot::Beta };
        assert_eq!(idx.flat(&s).unwrap(), (((3 + 1) * 4 + 2) * 3) + 2);
        let bad = ParamIndex { layer: 0, block: 1, sub_block: 0, angle: AngleSlot::Delta };
        assert!(bad.flat(&s).is_err());
    }

    #[test]
    fn single_qubit_in_first_sub_block() {
        // Rz(0.4)Rx(1.1)Rz(2.5) on qubit 0 via B₂'s first level-1 block.
        let s = AnsatzShape::new(2, 1).unwrap();
        let mut theta = ParamVector::zeros(&s);
        theta.set(0, 2.5);
        theta.set(1, 1.1);
        theta.set(2, 0.4);
        let v = mul2(&mul2(&linalg::rz(0.4), &linalg::rx(1.1)), &linalg::rz(2.5));
        let expected = linalg::kron(&mat2_to_dense(&v), &UnitaryMatrix::identity(2, 2));
        let r = equal_up_to_phase(&ansatz_unitary(&s, &theta).unwrap(), &expected, 1e-10).unwrap();
        assert!(r.equivalent, "residual {}", r.residual);
    }
}
