//! Pure n-qubit states as dense amplitude vectors.

use crate::error::{Error, Result};
use crate::linalg::{Mat2, C64, ONE, ZERO};
use crate::rng::{complex_gaussian, rng_from_seed};
use rand::Rng;

/// Normalization tolerance enforced on construction.
pub const NORM_TOL: f64 = 1e-10;

/// Largest qubit count a dense state may have.
pub const MAX_STATE_QUBITS: usize = 30;

#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    n: usize,
    amplitudes: Vec<C64>,
}

impl StateVector {
    /// Build a state from raw amplitudes, checking length `2ⁿ` and unit norm.
    pub fn from_amplitudes(n: usize, amplitudes: Vec<C64>) -> Result<Self> {
        check_width(n)?;
        if amplitudes.len() != 1usize << n {
            return Err(Error::domain(format!(
                "{} amplitudes given, {n} qubits need {}",
                amplitudes.len(),
                1usize << n
            )));
        }
        let norm_sqr: f64 = amplitudes.iter().map(|a| a.norm_sqr()).sum();
        if !norm_sqr.is_finite() || (norm_sqr - 1.0).abs() > NORM_TOL {
            return Err(Error::domain(format!("state is not normalized (Σ|a|² = {norm_sqr})")));
        }
        Ok(StateVector { n, amplitudes })
    }

    pub(crate) fn from_raw(n: usize, amplitudes: Vec<C64>) -> Self {
        debug_assert_eq!(amplitudes.len(), 1usize << n);
        StateVector { n, amplitudes }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amplitudes
    }

    pub fn into_amplitudes(self) -> Vec<C64> {
        self.amplitudes
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    /// `⟨self|other⟩`
    pub fn inner(&self, other: &StateVector) -> Result<C64> {
        if self.n != other.n {
            return Err(Error::domain(format!("{}-qubit and {}-qubit states", self.n, other.n)));
        }
        Ok(self
            .amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    pub(crate) fn amplitudes_mut(&mut self) -> &mut [C64] {
        &mut self.amplitudes
    }
}

fn check_width(n: usize) -> Result<()> {
    if n == 0 || n > MAX_STATE_QUBITS {
        return Err(Error::domain(format!("qubit count {n} outside 1..={MAX_STATE_QUBITS}")));
    }
    Ok(())
}

/// Computational basis state `|index⟩`.
pub fn basis_state(n: usize, index: usize) -> Result<StateVector> {
    check_width(n)?;
    let dim = 1usize << n;
    if index >= dim {
        return Err(Error::domain(format!("basis index {index} out of range for {n} qubits")));
    }
    let mut amps = vec![ZERO; dim];
    amps[index] = ONE;
    Ok(StateVector::from_raw(n, amps))
}

/// Haar-random pure state from a normalized complex Gaussian vector.
pub fn sample_haar_state(n: usize, seed: u64) -> Result<StateVector> {
    let mut rng = rng_from_seed(seed);
    haar_state_with(n, &mut rng)
}

pub fn haar_state_with<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<StateVector> {
    check_width(n)?;
    loop {
        let mut amps: Vec<C64> = (0..1usize << n).map(|_| complex_gaussian(rng)).collect();
        let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if norm < 1e-300 {
            continue;
        }
        amps.iter_mut().for_each(|a| *a /= norm);
        return Ok(StateVector::from_raw(n, amps));
    }
}

#[inline]
pub(crate) fn bit_of(n: usize, q: usize) -> usize {
    1usize << (n - 1 - q)
}

/// Apply a `2×2` operator to qubit `q` of a length-`2ⁿ` amplitude slice.
pub(crate) fn apply_single_kernel(amps: &mut [C64], n: usize, q: usize, m: &Mat2) {
    let bit = bit_of(n, q);
    for base in 0..amps.len() {
        if base & bit != 0 {
            continue;
        }
        let i0 = base;
        let i1 = base | bit;
        let (a0, a1) = (amps[i0], amps[i1]);
        amps[i0] = m[0][0] * a0 + m[0][1] * a1;
        amps[i1] = m[1][0] * a0 + m[1][1] * a1;
    }
}

pub(crate) fn apply_cnot_kernel(amps: &mut [C64], n: usize, control: usize, target: usize) {
    let cbit = bit_of(n, control);
    let tbit = bit_of(n, target);
    for i in 0..amps.len() {
        if i & cbit != 0 && i & tbit == 0 {
            amps.swap(i, i | tbit);
        }
    }
}
