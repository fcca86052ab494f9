//! Random members of the concept class: circuits of at most `nᶜ` gates over
//! `{H, Rx, U1, CNOT}`.

use crate::circuit::{Circuit, Gate};
use crate::error::{Error, Result};
use crate::rng::{haar_unitary2, rng_from_seed};
use rand::Rng;
use std::f64::consts::TAU;

/// `nᶜ`, saturating.
pub fn gate_cap(n: usize, c: u32) -> usize {
    (n as u64).checked_pow(c).map_or(usize::MAX, |p| p.min(usize::MAX as u64) as usize)
}

/// A random concept circuit with a gate count uniform in `[1, nᶜ]`.
pub fn random_concept_circuit(n: usize, c: u32, seed: u64) -> Result<Circuit> {
    random_concept_circuit_capped(n, c, usize::MAX, seed)
}

/// As [`random_concept_circuit`] with the count drawn from `[1, min(nᶜ, max_gates)]`.
pub fn random_concept_circuit_capped(n: usize, c: u32, max_gates: usize, seed: u64) -> Result<Circuit> {
    if n < 2 || c < 1 {
        return Err(Error::domain(format!("concept circuits need n ≥ 2 and c ≥ 1, got n = {n}, c = {c}")));
    }
    if max_gates == 0 {
        return Err(Error::domain("max_gates must be positive"));
    }
    let mut rng = rng_from_seed(seed);
    let cap = gate_cap(n, c).min(max_gates);
    let count = rng.random_range(1..=cap);
    let mut gates = Vec::with_capacity(count);
    for _ in 0..count {
        let g = match rng.random_range(0..4) {
            0 => Gate::h(rng.random_range(0..n)),
            1 => Gate::rx(rng.random_range(0..n), rng.random_range(0.0..TAU)),
            2 => Gate::u1(rng.random_range(0..n), haar_unitary2(&mut rng)),
            _ => {
                let control = rng.random_range(0..n);
                let target = (control + rng.random_range(1..n)) % n;
                Gate::cnot(control, target)
            }
        };
        gates.push(g);
    }
    Circuit::from_gates(n, gates)
}
