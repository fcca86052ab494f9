//! Seeded random streams and Haar sampling.
//!
//! Every parallel unit of work derives its own generator from a master seed
//! and a tuple of indices, so results never depend on scheduling.

use crate::linalg::{Mat2, C64};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

pub type SimRng = ChaCha8Rng;

pub fn rng_from_seed(seed: u64) -> SimRng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Mix a master seed with a path of indices into a fresh seed.
pub fn derive_seed(seed: u64, path: &[u64]) -> u64 {
    path.iter()
        .fold(splitmix64(seed), |acc, &k| splitmix64(acc ^ splitmix64(k.wrapping_add(0x632B_E59B_D9B4_E019))))
}

pub fn derived_rng(seed: u64, path: &[u64]) -> SimRng {
    rng_from_seed(derive_seed(seed, path))
}

pub fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

/// Haar-random element of U(2): a uniform point on S³ gives the SU(2) part,
/// times an independent uniform phase.
pub fn haar_unitary2<R: Rng + ?Sized>(rng: &mut R) -> Mat2 {
    loop {
        let a = complex_gaussian(rng);
        let b = complex_gaussian(rng);
        let norm = (a.norm_sqr() + b.norm_sqr()).sqrt();
        if norm < 1e-12 {
            continue;
        }
        let (a, b) = (a / norm, b / norm);
        let phase = C64::from_polar(1.0, rng.random_range(0.0..std::f64::consts::TAU));
        return [[phase * a, -phase * b.conj()], [phase * b, phase * a.conj()]];
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::is_unitary2;

    #[test]
    fn derived_seeds_differ() {
        let a = derive_seed(7, &[0, 1]);
        let b = derive_seed(7, &[1, 0]);
        let c = derive_seed(8, &[0, 1]);
        assert_ne!(a, b);
        assert_ne!(a, c);
        assert_eq!(a, derive_seed(7, &[0, 1]));
    }

    #[test]
    fn haar_unitaries_are_unitary() {
        let mut rng = rng_from_seed(3);
        for _ in 0..1000 {
            assert!(is_unitary2(&haar_unitary2(&mut rng), 1e-12));
        }
    }
}
