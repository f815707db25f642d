//! Brute-force reference for the small d-matrix via dense matrix
//! exponentiation of the angular-momentum generator.
//!
//! `-i beta J_y` is a real antisymmetric tridiagonal matrix in the
//! `|j, m>` basis (built from the ladder-operator elements
//! `<j, m±1|J_±|j, m> = sqrt(j(j+1) - m(m±1))`), so its exponential is a
//! real orthogonal matrix. Scaling-and-squaring with a Taylor series is
//! entirely adequate at the supported sizes. This path shares nothing with
//! the production sum formula and exists to check it.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::halfint::HalfInt;
use crate::wigner::{DMatrix, EulerAngles, ORACLE_MAX_TWICE_J};

/// Dense row-major square matrix of f64, just enough for the oracle.
struct Dense {
    n: usize,
    a: Vec<f64>,
}

impl Dense {
    fn zeros(n: usize) -> Self {
        Dense {
            n,
            a: vec![0.0; n * n],
        }
    }

    fn identity(n: usize) -> Self {
        let mut m = Dense::zeros(n);
        for i in 0..n {
            m.a[i * n + i] = 1.0;
        }
        m
    }

    fn matmul(&self, other: &Dense) -> Dense {
        let n = self.n;
        let mut out = Dense::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let v = self.a[i * n + k];
                if v == 0.0 {
                    continue;
                }
                for j in 0..n {
                    out.a[i * n + j] += v * other.a[k * n + j];
                }
            }
        }
        out
    }

    fn scale(&mut self, s: f64) {
        for v in &mut self.a {
            *v *= s;
        }
    }

    fn add_assign(&mut self, other: &Dense) {
        for (v, w) in self.a.iter_mut().zip(&other.a) {
            *v += w;
        }
    }

    fn max_abs(&self) -> f64 {
        self.a.iter().fold(0.0, |m, v| m.max(v.abs()))
    }
}

/// Evaluates `exp(-i beta J_y)` for the spin `j` representation by
/// scaling-and-squaring, returning it as a [`DMatrix`] at angles
/// `(0, beta, 0)`.
///
/// Intended as an independent cross-check of [`d_matrix`]; refuses
/// `2j > 20`.
///
/// [`d_matrix`]: crate::wigner::d_matrix
pub fn d_matrix_oracle(j: HalfInt, beta: f64) -> Result<DMatrix> {
    let tj = j.twice();
    if tj < 0 || j != HalfInt::from_twice(tj) {
        return Err(Error::InvalidQuantumPair { j, m: j });
    }
    if tj > ORACLE_MAX_TWICE_J {
        return Err(Error::UnsupportedJ {
            twice_j: tj,
            limit: ORACLE_MAX_TWICE_J,
        });
    }
    let n = tj as usize + 1;

    // -i beta J_y = -beta (J_+ - J_-) / 2, real antisymmetric, in the basis
    // m = j, j-1, ..., -j (descending).
    let mut gen = Dense::zeros(n);
    for r in 0..n.saturating_sub(1) {
        let w = (((r + 1) * (tj as usize - r)) as f64).sqrt();
        gen.a[r * n + (r + 1)] = -beta / 2.0 * w;
        gen.a[(r + 1) * n + r] = beta / 2.0 * w;
    }

    // Scale so the entries are small, expand the Taylor series, square back.
    let mut squarings = 0u32;
    let mut norm = gen.max_abs() * n as f64;
    while norm > 0.25 {
        norm /= 2.0;
        squarings += 1;
    }
    gen.scale(0.5f64.powi(squarings as i32));

    let mut result = Dense::identity(n);
    let mut term = Dense::identity(n);
    for order in 1..=30 {
        term = term.matmul(&gen);
        term.scale(1.0 / order as f64);
        result.add_assign(&term);
        if term.max_abs() < 1e-22 {
            break;
        }
    }
    for _ in 0..squarings {
        result = result.matmul(&result);
    }

    let entries = result.a.iter().map(|&x| Complex64::new(x, 0.0)).collect();
    Ok(DMatrix::from_parts(
        j,
        EulerAngles::y_rotation(beta),
        entries,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn trivial_representation() {
        let m = d_matrix_oracle(HalfInt::ZERO, 1.234).unwrap();
        assert_eq!(m.dim(), 1);
        assert_eq!(m.entry(0, 0), Complex64::new(1.0, 0.0));
    }

    #[test]
    fn spin_half_at_pi() {
        // Closed form: [[cos(pi/2), -sin(pi/2)], [sin(pi/2), cos(pi/2)]]
        let m = d_matrix_oracle(HalfInt::from_twice(1), std::f64::consts::PI).unwrap();
        let expect = [[0.0, -1.0], [1.0, 0.0]];
        for (r, row) in expect.iter().enumerate() {
            for (c, want) in row.iter().enumerate() {
                assert!((m.entry(r, c).re - want).abs() < 1e-12, "entry ({r},{c})");
            }
        }
    }

    #[test]
    fn orthogonality_at_spin_five() {
        let m = d_matrix_oracle(HalfInt::integer(5), 0.7).unwrap();
        let n = m.dim();
        for r1 in 0..n {
            for r2 in 0..n {
                let dot: f64 = (0..n).map(|c| m.entry(r1, c).re * m.entry(r2, c).re).sum();
                let expected = if r1 == r2 { 1.0 } else { 0.0 };
                assert!((dot - expected).abs() < 1e-12, "rows {r1},{r2}: {dot}");
            }
        }
    }

    #[test]
    fn refuses_large_j() {
        let err = d_matrix_oracle(HalfInt::integer(11), 0.1).unwrap_err();
        assert!(matches!(err, Error::UnsupportedJ { .. }));
    }
}
