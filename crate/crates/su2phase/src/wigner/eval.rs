//! Evaluation core for the Wigner small d-matrix.
//!
//! Elements are computed from the explicit sum
//!
//! ```text
//! d^j_{m',m}(beta) = sqrt( C(2j, j-m) / C(2j, j-m') )
//!     * sum_s (-1)^{m'-m+s} C(j+m, s) C(j-m, j-m'-s)
//!       * cos(beta/2)^{2j+m-m'-2s} * sin(beta/2)^{m'-m+2s}
//! ```
//!
//! with `s` running over `max(0, m-m') ..= min(j+m, j-m')`. The terms
//! alternate in sign and their magnitudes grow like a central binomial
//! coefficient, so the whole sum is evaluated in double-double precision,
//! ordered by increasing magnitude. The worst-case cancellation at the
//! matrix centre scales like `C(j, j/2)`; with ~106-bit accumulation the
//! result keeps f64 accuracy through `2j` of roughly 140 and degrades
//! gradually beyond (see [`DMatrix::unitarity_residual`] for an on-demand
//! measurement and the limit constant's docs for measured numbers).
//!
//! [`DMatrix::unitarity_residual`]: crate::wigner::DMatrix::unitarity_residual

use crate::dd::{Dd, DD_ONE, DD_ZERO};
use crate::wigner::factorial::{binomials, Binomials};

/// Power tables for cos(beta/2) and sin(beta/2) plus the shared binomial
/// table, prepared once per column (or matrix).
pub(crate) struct DEval {
    twice_j: i32,
    cos_pow: Vec<Dd>,
    sin_pow: Vec<Dd>,
    binom: &'static Binomials,
}

impl DEval {
    pub fn new(twice_j: i32, beta: f64) -> Self {
        let cos_half = (beta / 2.0).cos();
        let sin_half = (beta / 2.0).sin();
        let len = twice_j as usize + 1;
        let mut cos_pow = Vec::with_capacity(len);
        let mut sin_pow = Vec::with_capacity(len);
        cos_pow.push(DD_ONE);
        sin_pow.push(DD_ONE);
        for t in 1..len {
            cos_pow.push(cos_pow[t - 1].mul_f64(cos_half));
            sin_pow.push(sin_pow[t - 1].mul_f64(sin_half));
        }
        DEval {
            twice_j,
            cos_pow,
            sin_pow,
            binom: binomials(),
        }
    }

    /// d^j_{m_row, m_col}(beta) for quantum numbers given as twice-values.
    /// Assumes both pairs are valid for this `j`.
    pub fn element(&self, twice_m_row: i32, twice_m_col: i32) -> f64 {
        let tj = self.twice_j;
        let j_plus_m = ((tj + twice_m_col) / 2) as i64;
        let j_minus_m = ((tj - twice_m_col) / 2) as i64;
        let j_minus_mr = ((tj - twice_m_row) / 2) as i64;
        let dm = ((twice_m_row - twice_m_col) / 2) as i64; // m' - m

        let s_lo = 0.max(-dm); // max(0, m - m')
        let s_hi = j_plus_m.min(j_minus_mr);

        let mut terms: Vec<Dd> = Vec::with_capacity((s_hi - s_lo + 1).max(0) as usize);
        for s in s_lo..=s_hi {
            let b1 = self.binom.get(j_plus_m as usize, s as usize);
            let b2 = self
                .binom
                .get(j_minus_m as usize, (j_minus_mr - s) as usize);
            let a = (j_plus_m + j_minus_mr - 2 * s) as usize; // cos exponent
            let b = (dm + 2 * s) as usize; // sin exponent
            let mut t = b1.mul(b2).mul(self.cos_pow[a]).mul(self.sin_pow[b]);
            if (dm + s) & 1 != 0 {
                t = t.neg();
            }
            terms.push(t);
        }
        terms.sort_by(|x, y| {
            x.hi.abs()
                .partial_cmp(&y.hi.abs())
                .unwrap_or(std::cmp::Ordering::Equal)
        });
        let mut sum = DD_ZERO;
        for t in terms {
            sum = sum.add(t);
        }

        let prefactor = self
            .binom
            .get(tj as usize, j_minus_m as usize)
            .div(self.binom.get(tj as usize, j_minus_mr as usize))
            .sqrt();
        sum.mul(prefactor).to_f64()
    }

    /// One full column `m_col`, rows ordered `m' = j, j-1, ..., -j`.
    pub fn column(&self, twice_m_col: i32) -> Vec<f64> {
        let tj = self.twice_j;
        (0..=tj)
            .map(|r| self.element(tj - 2 * r, twice_m_col))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn d(tj: i32, tmr: i32, tmc: i32, beta: f64) -> f64 {
        DEval::new(tj, beta).element(tmr, tmc)
    }

    #[test]
    fn spin_half_closed_forms() {
        let beta = 0.7f64;
        let (c, s) = ((beta / 2.0).cos(), (beta / 2.0).sin());
        assert!((d(1, 1, 1, beta) - c).abs() < 1e-15);
        assert!((d(1, 1, -1, beta) + s).abs() < 1e-15);
        assert!((d(1, -1, 1, beta) - s).abs() < 1e-15);
        assert!((d(1, -1, -1, beta) - c).abs() < 1e-15);
    }

    #[test]
    fn spin_one_closed_forms() {
        let beta = 1.23f64;
        let (cb, sb) = (beta.cos(), beta.sin());
        let r = std::f64::consts::FRAC_1_SQRT_2;
        assert!((d(2, 2, 2, beta) - (1.0 + cb) / 2.0).abs() < 1e-15);
        assert!((d(2, 2, 0, beta) + r * sb).abs() < 1e-15);
        assert!((d(2, 2, -2, beta) - (1.0 - cb) / 2.0).abs() < 1e-15);
        assert!((d(2, 0, 2, beta) - r * sb).abs() < 1e-15);
        assert!((d(2, 0, 0, beta) - cb).abs() < 1e-15);
        assert!((d(2, -2, 2, beta) - (1.0 - cb) / 2.0).abs() < 1e-15);
    }

    #[test]
    fn beta_zero_is_exact_identity() {
        for tj in [0, 1, 2, 5, 6] {
            let eval = DEval::new(tj, 0.0);
            for r in 0..=tj {
                for c in 0..=tj {
                    let expected = if r == c { 1.0 } else { 0.0 };
                    assert_eq!(eval.element(tj - 2 * r, tj - 2 * c), expected);
                }
            }
        }
    }

    #[test]
    fn central_element_is_a_legendre_polynomial() {
        // For integer j, d^j_{0,0}(beta) = P_j(cos beta): an independent
        // closed form for precisely the elements with the worst
        // cancellation. Evaluated by the standard three-term recurrence.
        for &beta in &[0.1f64, 0.9, std::f64::consts::FRAC_PI_2, 2.7] {
            let x = beta.cos();
            let (mut p_prev, mut p) = (1.0f64, x);
            for j in 1..=40i32 {
                let eval = DEval::new(2 * j, beta);
                let got = eval.element(0, 0);
                assert!((got - p).abs() < 1e-12, "j={j} beta={beta}: {got} vs {p}");
                let next = ((2 * j + 1) as f64 * x * p - j as f64 * p_prev) / (j + 1) as f64;
                p_prev = p;
                p = next;
            }
        }
    }

    #[test]
    fn documented_error_budget_at_the_support_limit() {
        // Pins the numbers quoted on MAX_TWICE_J: comfortable at 2j = 140,
        // degraded but bounded at 2j = 200.
        use crate::halfint::HalfInt;
        use crate::wigner::{d_matrix, EulerAngles};
        let bs = EulerAngles::beam_splitter();
        let mid = d_matrix(HalfInt::from_twice(140), &bs).unwrap();
        assert!(mid.unitarity_residual() < 1e-11);
        let limit = d_matrix(HalfInt::from_twice(200), &bs).unwrap();
        let residual = limit.unitarity_residual();
        assert!(residual < 2e-3, "residual {residual:e}");
    }

    #[test]
    fn edge_column_single_term() {
        // d^j_{m', j} = sqrt(C(2j, j-m')) cos^{j+m'} sin^{j-m'}; one term,
        // no cancellation.
        let beta = 2.1f64;
        let (c, s) = ((beta / 2.0).cos(), (beta / 2.0).sin());
        let tj = 7;
        for r in 0..=tj {
            let tmr = tj - 2 * r;
            let k = ((tj - tmr) / 2) as u32;
            let jp = ((tj + tmr) / 2) as u32;
            let binom: f64 = binomials().get(tj as usize, k as usize).to_f64();
            let expected = binom.sqrt() * c.powi(jp as i32) * s.powi(k as i32);
            assert!((d(tj, tmr, tj, beta) - expected).abs() < 1e-14);
        }
    }
}
