//! Small dense complex linear algebra used throughout the crate.
//!
//! Single-qubit operators are plain `2×2` arrays; anything larger is a
//! [`UnitaryMatrix`] backed by `nalgebra`.

use nalgebra::DMatrix;
use num_complex::Complex64;
use std::f64::consts::FRAC_1_SQRT_2;

pub type C64 = Complex64;

/// Row-major `2×2` complex matrix.
pub type Mat2 = [[C64; 2]; 2];

/// Dense `2ⁿ×2ⁿ` complex matrix.
pub type UnitaryMatrix = DMatrix<C64>;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);
pub const I: C64 = C64::new(0.0, 1.0);

pub fn identity2() -> Mat2 {
    [[ONE, ZERO], [ZERO, ONE]]
}

pub fn hadamard() -> Mat2 {
    let h = C64::new(FRAC_1_SQRT_2, 0.0);
    [[h, h], [h, -h]]
}

pub fn pauli_x() -> Mat2 {
    [[ZERO, ONE], [ONE, ZERO]]
}

/// `exp(-iθX/2)`
pub fn rx(theta: f64) -> Mat2 {
    let (s, c) = (theta / 2.0).sin_cos();
    let c = C64::new(c, 0.0);
    let mis = C64::new(0.0, -s);
    [[c, mis], [mis, c]]
}

/// `exp(-iθY/2)`
pub fn ry(theta: f64) -> Mat2 {
    let (s, c) = (theta / 2.0).sin_cos();
    [[C64::new(c, 0.0), C64::new(-s, 0.0)], [C64::new(s, 0.0), C64::new(c, 0.0)]]
}

/// `exp(-iθZ/2)`
pub fn rz(theta: f64) -> Mat2 {
    [
        [C64::from_polar(1.0, -theta / 2.0), ZERO],
        [ZERO, C64::from_polar(1.0, theta / 2.0)],
    ]
}

pub fn mul2(a: &Mat2, b: &Mat2) -> Mat2 {
    let mut out = [[ZERO; 2]; 2];
    for (i, row) in out.iter_mut().enumerate() {
        for (j, cell) in row.iter_mut().enumerate() {
            *cell = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    out
}

pub fn scale2(s: C64, a: &Mat2) -> Mat2 {
    [[s * a[0][0], s * a[0][1]], [s * a[1][0], s * a[1][1]]]
}

pub fn dagger2(a: &Mat2) -> Mat2 {
    [[a[0][0].conj(), a[1][0].conj()], [a[0][1].conj(), a[1][1].conj()]]
}

pub fn det2(a: &Mat2) -> C64 {
    a[0][0] * a[1][1] - a[0][1] * a[1][0]
}

/// Largest entrywise modulus of `a − b`.
pub fn max_abs_diff2(a: &Mat2, b: &Mat2) -> f64 {
    let mut m: f64 = 0.0;
    for i in 0..2 {
        for j in 0..2 {
            m = m.max((a[i][j] - b[i][j]).norm());
        }
    }
    m
}

/// Spectral norm of a `2×2` matrix in closed form.
pub fn spectral_norm2(a: &Mat2) -> f64 {
    // σ_max² is the larger eigenvalue of A†A: (f + sqrt(f² − 4|det|²)) / 2 with f = ‖A‖_F².
    let f: f64 = a.iter().flatten().map(|z| z.norm_sqr()).sum();
    let d = det2(a).norm_sqr();
    let disc = (f * f - 4.0 * d).max(0.0).sqrt();
    ((f + disc) / 2.0).max(0.0).sqrt()
}

/// `‖A†A − I‖_max ≤ tol`
pub fn is_unitary2(a: &Mat2, tol: f64) -> bool {
    let p = mul2(&dagger2(a), a);
    max_abs_diff2(&p, &identity2()) <= tol && a.iter().flatten().all(|z| z.re.is_finite() && z.im.is_finite())
}

pub fn mat2_to_dense(a: &Mat2) -> UnitaryMatrix {
    DMatrix::from_row_slice(2, 2, &[a[0][0], a[0][1], a[1][0], a[1][1]])
}

/// Kronecker product `a ⊗ b`, with `a` acting on the more significant index bits.
pub fn kron(a: &UnitaryMatrix, b: &UnitaryMatrix) -> UnitaryMatrix {
    a.kronecker(b)
}

/// Largest singular value, via full SVD.
pub fn spectral_norm(m: &UnitaryMatrix) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    m.clone()
        .svd(false, false)
        .singular_values
        .iter()
        .cloned()
        .fold(0.0, f64::max)
}

/// Reduce an angle to `[0, 2π)`.
pub fn wrap_angle(theta: f64) -> f64 {
    let tau = std::f64::consts::TAU;
    let r = theta.rem_euclid(tau);
    if r >= tau {
        0.0
    } else {
        r
    }
}

/// Reduce an angle to `(−π, π]`.
pub fn wrap_phase(phi: f64) -> f64 {
    let pi = std::f64::consts::PI;
    let r = wrap_angle(phi + pi) - pi;
    if r <= -pi {
        r + std::f64::consts::TAU
    } else {
        r
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn rx_pi_is_minus_i_x() {
        let m = rx(PI);
        let expected = scale2(-I, &pauli_x());
        assert!(max_abs_diff2(&m, &expected) < 1e-15);
    }

    #[test]
    fn spectral_norm2_matches_svd() {
        let a: Mat2 = [[C64::new(0.3, 0.1), C64::new(-1.2, 0.4)], [C64::new(0.0, 2.0), C64::new(0.5, -0.5)]];
        let dense = mat2_to_dense(&a);
        assert!((spectral_norm2(&a) - spectral_norm(&dense)).abs() < 1e-12);
    }

    #[test]
    fn wrapping() {
        assert_eq!(wrap_angle(0.0), 0.0);
        assert!((wrap_angle(-0.5) - (2.0 * PI - 0.5)).abs() < 1e-15);
        assert!(wrap_angle(2.0 * PI) < 1e-15);
        assert!((wrap_phase(PI) - PI).abs() < 1e-15);
        assert!((wrap_phase(-PI) - PI).abs() < 1e-15);
        assert!((wrap_phase(3.0 * PI / 2.0) + PI / 2.0).abs() < 1e-15);
    }
}
