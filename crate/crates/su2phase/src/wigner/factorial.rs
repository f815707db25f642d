//! Log-factorials and binomial-coefficient tables.

use std::sync::OnceLock;

use crate::dd::{Dd, DD_ONE};
use crate::wigner::MAX_TWICE_J;

const TABLE_LEN: usize = 1024;

/// ln(2π)/2
const HALF_LN_TWO_PI: f64 = 0.918_938_533_204_672_8;

fn ln_factorial_table() -> &'static [f64; TABLE_LEN] {
    static TABLE: OnceLock<[f64; TABLE_LEN]> = OnceLock::new();
    TABLE.get_or_init(|| {
        let mut table = [0.0f64; TABLE_LEN];
        let mut acc = Dd::from_f64(0.0);
        for (n, slot) in table.iter_mut().enumerate().skip(1) {
            acc = acc.add(Dd::from_f64((n as f64).ln()));
            *slot = acc.to_f64();
        }
        table
    })
}

/// Natural logarithm of `n!`.
///
/// Exact cumulative summation below 1024, Stirling's series above; the
/// relative error stays below 1e-14 over the whole range (tested up to 10^6).
/// Monotone nondecreasing in `n`.
pub fn log_factorial(n: u64) -> f64 {
    if (n as usize) < TABLE_LEN {
        ln_factorial_table()[n as usize]
    } else {
        // Stirling series for ln Gamma(z) at z = n + 1. With z > 1024 the
        // truncation error of four Bernoulli terms is below 1e-30 absolute.
        let z = (n + 1) as f64;
        let zz = z * z;
        let series =
            (1.0 / 12.0 + (-1.0 / 360.0 + (1.0 / 1260.0 - 1.0 / (1680.0 * zz)) / zz) / zz) / z;
        (z - 0.5) * z.ln() - z + HALF_LN_TWO_PI + series
    }
}

/// Binomial coefficients `C(n, k)` for all `n <= MAX_TWICE_J`, held in
/// double-double precision. Row `n` has `n + 1` entries. Built once; readers
/// only ever observe the finished table.
pub(crate) struct Binomials {
    rows: Vec<Vec<Dd>>,
}

impl Binomials {
    #[inline]
    pub fn get(&self, n: usize, k: usize) -> Dd {
        self.rows[n][k]
    }
}

pub(crate) fn binomials() -> &'static Binomials {
    static TABLE: OnceLock<Binomials> = OnceLock::new();
    TABLE.get_or_init(|| {
        let n_max = MAX_TWICE_J as usize;
        let mut rows: Vec<Vec<Dd>> = Vec::with_capacity(n_max + 1);
        rows.push(vec![DD_ONE]);
        for n in 1..=n_max {
            let prev = &rows[n - 1];
            let mut row = Vec::with_capacity(n + 1);
            row.push(DD_ONE);
            for k in 1..n {
                row.push(prev[k - 1].add(prev[k]));
            }
            row.push(DD_ONE);
            rows.push(row);
        }
        Binomials { rows }
    })
}
