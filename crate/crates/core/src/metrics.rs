//! Distances between states and between unitaries.

use crate::error::{Error, Result};
use crate::linalg::{spectral_norm, UnitaryMatrix, C64};
use crate::sim::DENSE_CAP;
use crate::state::StateVector;

/// Pure-state trace distance, always in `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct LossValue(f64);

impl LossValue {
    pub fn value(self) -> f64 {
        self.0
    }
}

impl From<LossValue> for f64 {
    fn from(l: LossValue) -> f64 {
        l.0
    }
}

/// `|⟨ψ₁|ψ₂⟩|`
pub fn fidelity(s1: &StateVector, s2: &StateVector) -> Result<f64> {
    Ok(s1.inner(s2)?.norm().min(1.0))
}

/// Trace distance of two pure states, `√(1 − F²)`.
///
/// Evaluated as `√(‖ψ₂ − e^{iφ}ψ₁‖²·(1 + F)/2)` with `e^{iφ}` the phase of
/// `⟨ψ₁|ψ₂⟩`. For unit vectors this equals `√(1 − F²)`, but it keeps full
/// relative precision when the states nearly coincide.
pub fn loss(s1: &StateVector, s2: &StateVector) -> Result<LossValue> {
    let c = s1.inner(s2)?;
    let (n1, n2) = (s1.norm(), s2.norm());
    let c = c / (n1 * n2);
    let f = c.norm().min(1.0);
    let align = if f > 0.0 { c / c.norm() } else { C64::new(1.0, 0.0) };
    let dist_sqr: f64 = s1
        .amplitudes()
        .iter()
        .zip(s2.amplitudes())
        .map(|(a, b)| (b / n2 - align * a / n1).norm_sqr())
        .sum();
    Ok(LossValue((dist_sqr * (1.0 + f) / 2.0).clamp(0.0, 1.0).sqrt()))
}

fn projector(s: &StateVector) -> UnitaryMatrix {
    let v = nalgebra::DVector::from_column_slice(s.amplitudes());
    &v * v.adjoint()
}

/// Half the trace norm of `|ψ₁⟩⟨ψ₁| − |ψ₂⟩⟨ψ₂|`, from the singular values of
/// the dense difference. Independent cross-check for [`loss`].
pub fn trace_distance_oracle(s1: &StateVector, s2: &StateVector) -> Result<f64> {
    if s1.n() != s2.n() {
        return Err(Error::domain(format!("{}-qubit and {}-qubit states", s1.n(), s2.n())));
    }
    if s1.n() > DENSE_CAP {
        return Err(Error::Resource { n: s1.n(), cap: DENSE_CAP });
    }
    let diff = projector(s1) - projector(s2);
    let svd = diff.svd(false, false);
    Ok(0.5 * svd.singular_values.iter().sum::<f64>())
}

fn check_square_pair(u1: &UnitaryMatrix, u2: &UnitaryMatrix) -> Result<()> {
    if u1.shape() != u2.shape() || u1.nrows() != u1.ncols() {
        return Err(Error::domain(format!(
            "matrix shapes {:?} and {:?} are not equal square",
            u1.shape(),
            u2.shape()
        )));
    }
    Ok(())
}

/// Spectral norm `‖U₁ − U₂‖₂`.
pub fn op_norm_distance(u1: &UnitaryMatrix, u2: &UnitaryMatrix) -> Result<f64> {
    check_square_pair(u1, u2)?;
    Ok(spectral_norm(&(u1 - u2)))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseEquivalence {
    pub equivalent: bool,
    /// `φ` such that `U₂ ≈ e^{iφ}U₁`.
    pub phase: f64,
    pub residual: f64,
}

/// Test `U₂ = e^{iφ}U₁` for some `φ`.
///
/// `φ` is read off the largest-modulus diagonal entry of `U₁†U₂` (lowest
/// index on ties) and the residual is `‖U₁†U₂ − e^{iφ}I‖₂`.
pub fn equal_up_to_phase(u1: &UnitaryMatrix, u2: &UnitaryMatrix, tol: f64) -> Result<PhaseEquivalence> {
    check_square_pair(u1, u2)?;
    let mut w = u1.adjoint() * u2;
    let mut best = 0;
    let mut best_abs = -1.0;
    for i in 0..w.nrows() {
        let a = w[(i, i)].norm();
        if a > best_abs {
            best_abs = a;
            best = i;
        }
    }
    let phase = if w.nrows() == 0 { 0.0 } else { w[(best, best)].arg() };
    let shift = C64::from_polar(1.0, phase);
    for i in 0..w.nrows() {
        w[(i, i)] -= shift;
    }
    let residual = spectral_norm(&w);
    Ok(PhaseEquivalence {
        equivalent: residual <= tol,
        phase,
        residual,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::{Circuit, Gate};
    use crate::linalg::{mat2_to_dense, pauli_x, rx};
    use crate::sim::{apply_gate, circuit_unitary};
    use crate::state::{basis_state, sample_haar_state};
    use std::f64::consts::{FRAC_1_SQRT_2, PI};

    fn plus() -> StateVector {
        apply_gate(&basis_state(1, 0).unwrap(), &Gate::h(0)).unwrap()
    }

    #[test]
    fn fidelity_examples() {
        let psi = sample_haar_state(3, 1).unwrap();
        assert!((fidelity(&psi, &psi).unwrap() - 1.0).abs() < 1e-12);
        let (zero, one) = (basis_state(1, 0).unwrap(), basis_state(1, 1).unwrap());
        assert_eq!(fidelity(&zero, &one).unwrap(), 0.0);
        assert!((fidelity(&zero, &plus()).unwrap() - FRAC_1_SQRT_2).abs() < 1e-15);
        assert!(fidelity(&zero, &basis_state(2, 0).unwrap()).is_err());
    }

    #[test]
    fn loss_examples() {
        let psi = sample_haar_state(2, 5).unwrap();
        assert!(loss(&psi, &psi).unwrap().value() < 1e-15);
        let (zero, one) = (basis_state(1, 0).unwrap(), basis_state(1, 1).unwrap());
        assert_eq!(loss(&zero, &one).unwrap().value(), 1.0);
        assert!((loss(&zero, &plus()).unwrap().value() - FRAC_1_SQRT_2).abs() < 1e-15);
        assert!(loss(&zero, &basis_state(2, 0).unwrap()).is_err());
    }

    #[test]
    fn oracle_examples() {
        let psi = sample_haar_state(2, 8).unwrap();
        assert!(trace_distance_oracle(&psi, &psi).unwrap() < 1e-12);
        let (zero, one) = (basis_state(1, 0).unwrap(), basis_state(1, 1).unwrap());
        assert!((trace_distance_oracle(&zero, &one).unwrap() - 1.0).abs() < 1e-12);
        let big = basis_state(11, 0).unwrap();
        assert!(matches!(trace_distance_oracle(&big, &big), Err(Error::Resource { .. })));
    }

    #[test]
    fn op_norm_examples() {
        let u = mat2_to_dense(&rx(0.4));
        assert!(op_norm_distance(&u, &u).unwrap() < 1e-15);
        let d = op_norm_distance(&UnitaryMatrix::identity(2, 2), &mat2_to_dense(&rx(1.0))).unwrap();
        assert!((d - 2.0 * 0.25f64.sin()).abs() < 1e-12);
        assert!(op_norm_distance(&u, &UnitaryMatrix::identity(4, 4)).is_err());
    }

    #[test]
    fn phase_equivalence_examples() {
        let c = Circuit::from_gates(2, vec![Gate::h(0), Gate::cnot(0, 1), Gate::rx(1, 0.3)]).unwrap();
        let u = circuit_unitary(&c).unwrap();
        let shifted = &u * C64::from_polar(1.0, PI / 3.0);
        let r = equal_up_to_phase(&u, &shifted, 1e-12).unwrap();
        assert!(r.equivalent && r.residual <= 1e-12);
        assert!((r.phase - PI / 3.0).abs() < 1e-12);

        let r = equal_up_to_phase(&UnitaryMatrix::identity(2, 2), &mat2_to_dense(&pauli_x()), 1e-9).unwrap();
        assert!(!r.equivalent);
    }
}
