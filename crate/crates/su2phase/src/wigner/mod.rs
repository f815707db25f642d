//! Wigner rotation matrices for SU(2) and their orthogonality identities.
//!
//! # Conventions
//!
//! Everything in this module (and the rest of the crate) uses the *active*
//! rotation
//!
//! ```text
//! R(alpha, beta, gamma) = exp(-i alpha J_z) exp(-i beta J_y) exp(-i gamma J_z)
//! D^j_{m',m}(alpha, beta, gamma) = <j,m'| R |j,m>
//!                                = exp(-i m' alpha) d^j_{m',m}(beta) exp(-i m gamma)
//! ```
//!
//! Textbooks differ in these signs; every identity below is stated for this
//! convention and the tests pin it against a matrix-exponential reference.
//! Dense matrices index both rows and columns by *descending* magnetic
//! number, `m = j, j-1, ..., -j`.
//!
//! Two families of identities are exposed as first-class, checkable
//! quantities:
//!
//! * ordinary row orthogonality, `sum_mu D_{m',mu} conj(D_{m,mu}) =
//!   delta_{m',m}`, measured by [`DMatrix::unitarity_residual`];
//! * the even/odd split of the orthogonality sum at `beta = pi/2`,
//!   restricted to rows `m' = j - k` with `k` even (or odd), evaluated by
//!   [`parity_orthogonality_sum`]: each half equals `delta_{m,m'} / 2`
//!   whenever `|m| != |m'|` or `m = m'`, with two refinements: for integer
//!   spin and `m = 0` the even half carries the whole of `delta_{0,m'}`
//!   while the odd half vanishes identically, and on the anti-diagonal
//!   `m' = -m != 0` the halves take the opposite values
//!   `±(-1)^N exp(-2 i m gamma) / 2` (cancelling in the total). See
//!   [`parity_orthogonality_sum`] for the full table.

mod eval;
mod factorial;
mod oracle;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::halfint::HalfInt;

pub use factorial::log_factorial;
pub use oracle::d_matrix_oracle;

use eval::DEval;

/// Largest supported representation for the production evaluator.
///
/// The cancellation of the defining sum grows like a central binomial
/// coefficient, so accuracy fades with spin even in double-double
/// accumulation. Measured at `beta = pi/2` (the worst angle): unitarity
/// residuals sit at rounding level (~3e-15) through `2j = 100`, reach
/// ~4e-13 at `2j = 140`, cross 1e-10 near `2j = 155`, and grow to ~4e-4
/// at the limit `2j = 200`. Use [`DMatrix::unitarity_residual`] to measure
/// the budget of a particular matrix. Beyond this limit the evaluator
/// refuses instead of degrading silently.
pub const MAX_TWICE_J: i32 = 200;

/// Largest representation the brute-force oracle accepts.
pub const ORACLE_MAX_TWICE_J: i32 = 20;

/// Euler angles of an active `z-y-z` rotation, in radians.
///
/// Identities hold for any finite real values; the canonical ranges
/// `0 < alpha < 2pi`, `0 < beta < pi`, `0 < gamma < 2pi` are nowhere
/// enforced.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EulerAngles {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
}

impl EulerAngles {
    pub const fn new(alpha: f64, beta: f64, gamma: f64) -> Self {
        EulerAngles { alpha, beta, gamma }
    }

    /// Rotation about `y` alone: `(0, beta, 0)`.
    pub const fn y_rotation(beta: f64) -> Self {
        EulerAngles::new(0.0, beta, 0.0)
    }

    /// The balanced beam splitter, `R_y(pi/2)`.
    pub const fn beam_splitter() -> Self {
        EulerAngles::y_rotation(std::f64::consts::FRAC_PI_2)
    }
}

/// Selects the even- or odd-`k` half of an orthogonality sum.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    #[inline]
    fn matches(self, k: i32) -> bool {
        match self {
            Parity::Even => k % 2 == 0,
            Parity::Odd => k % 2 != 0,
        }
    }
}

/// A dense Wigner D-matrix for one spin-`j` representation.
///
/// Row index runs over `m' = j, j-1, ..., -j` and column index over
/// `m = j, ..., -j`. When `alpha = gamma = 0` every entry is real (the
/// imaginary parts are exact zeros by construction).
#[derive(Clone, Debug)]
pub struct DMatrix {
    j: HalfInt,
    angles: EulerAngles,
    entries: Vec<Complex64>,
}

impl DMatrix {
    pub(crate) fn from_parts(j: HalfInt, angles: EulerAngles, entries: Vec<Complex64>) -> Self {
        debug_assert_eq!(entries.len(), (j.twice() as usize + 1).pow(2));
        DMatrix { j, angles, entries }
    }

    pub fn j(&self) -> HalfInt {
        self.j
    }

    pub fn angles(&self) -> EulerAngles {
        self.angles
    }

    /// Matrix dimension `2j + 1`.
    pub fn dim(&self) -> usize {
        self.j.twice() as usize + 1
    }

    /// Entry by raw indices (row-major, descending `m`).
    #[inline]
    pub fn entry(&self, row: usize, col: usize) -> Complex64 {
        self.entries[row * self.dim() + col]
    }

    /// Entry by quantum numbers.
    pub fn get(&self, m_row: HalfInt, m_col: HalfInt) -> Result<Complex64> {
        HalfInt::require_valid_pair(self.j, m_row)?;
        HalfInt::require_valid_pair(self.j, m_col)?;
        Ok(self.entry(self.row_of(m_row), self.row_of(m_col)))
    }

    /// Index of the row (or column) carrying magnetic number `m`.
    #[inline]
    pub fn row_of(&self, m: HalfInt) -> usize {
        ((self.j.twice() - m.twice()) / 2) as usize
    }

    /// Magnetic number of a row (or column) index.
    #[inline]
    pub fn m_of(&self, index: usize) -> HalfInt {
        HalfInt::from_twice(self.j.twice() - 2 * index as i32)
    }

    /// Largest deviation of the row Gram matrix from the identity,
    /// `max_{m,m'} | sum_mu D_{m',mu} conj(D_{m,mu}) - delta_{m',m} |`.
    ///
    /// This measures, on demand, how much numerical error the matrix
    /// actually carries.
    pub fn unitarity_residual(&self) -> f64 {
        let n = self.dim();
        let mut worst = 0.0f64;
        for r1 in 0..n {
            for r2 in r1..n {
                let mut acc = Complex64::new(0.0, 0.0);
                for c in 0..n {
                    acc += self.entry(r1, c) * self.entry(r2, c).conj();
                }
                let expected = if r1 == r2 { 1.0 } else { 0.0 };
                worst = worst.max((acc - expected).norm());
            }
        }
        worst
    }
}

fn require_supported_j(j: HalfInt) -> Result<()> {
    if j.twice() < 0 {
        return Err(Error::InvalidQuantumPair { j, m: j });
    }
    if j.twice() > MAX_TWICE_J {
        return Err(Error::UnsupportedJ {
            twice_j: j.twice(),
            limit: MAX_TWICE_J,
        });
    }
    Ok(())
}

/// The Wigner small d-matrix element `d^j_{m_row, m_col}(beta) =
/// <j, m_row| exp(-i beta J_y) |j, m_col>`, a real number.
pub fn small_d(j: HalfInt, m_row: HalfInt, m_col: HalfInt, beta: f64) -> Result<f64> {
    require_supported_j(j)?;
    HalfInt::require_valid_pair(j, m_row)?;
    HalfInt::require_valid_pair(j, m_col)?;
    Ok(DEval::new(j.twice(), beta).element(m_row.twice(), m_col.twice()))
}

#[inline]
fn phase(theta: f64) -> Complex64 {
    Complex64::new(theta.cos(), theta.sin())
}

/// The full D-matrix element
/// `exp(-i m_row alpha) d^j_{m_row,m_col}(beta) exp(-i m_col gamma)`.
pub fn big_d(
    j: HalfInt,
    m_row: HalfInt,
    m_col: HalfInt,
    angles: &EulerAngles,
) -> Result<Complex64> {
    let d = small_d(j, m_row, m_col, angles.beta)?;
    Ok(phase(-(m_row.value() * angles.alpha + m_col.value() * angles.gamma)) * d)
}

/// The dense D-matrix at the given angles, rows and columns in descending
/// `m` order. Entries agree elementwise with [`big_d`].
pub fn d_matrix(j: HalfInt, angles: &EulerAngles) -> Result<DMatrix> {
    require_supported_j(j)?;
    let tj = j.twice();
    let n = tj as usize + 1;
    let eval = DEval::new(tj, angles.beta);
    let mut entries = vec![Complex64::new(0.0, 0.0); n * n];
    for col in 0..n {
        let tm = tj - 2 * col as i32;
        let column = eval.column(tm);
        let col_phase = -0.5 * f64::from(tm) * angles.gamma;
        for (row, &d) in column.iter().enumerate() {
            let tmr = tj - 2 * row as i32;
            let theta = -0.5 * f64::from(tmr) * angles.alpha + col_phase;
            entries[row * n + col] = phase(theta) * d;
        }
    }
    Ok(DMatrix::from_parts(j, *angles, entries))
}

/// Sign `(-1)^(j+mu)`, defined whenever `j + mu` is an integer.
#[inline]
fn row_sign(j: HalfInt, mu: HalfInt) -> f64 {
    // j + mu is integer for any valid (j, mu); its parity equals the parity
    // of (2j + 2mu)/2.
    if ((j.twice() + mu.twice()) / 2) % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// Both sides of the column-negation identity at `beta = pi/2`,
///
/// ```text
/// d^j_{mu,-m}(pi/2) = (-1)^(j+mu) d^j_{mu,m}(pi/2),
/// ```
///
/// dressed with the phases of the full D-matrix. The left side is
/// `D^j_{mu,-m}(alpha, pi/2, gamma)` with its column phase equalized to the
/// right side's `exp(-i m gamma)` (they differ for `m != 0` because
/// negating the column negates its phase), and the right side is
/// `(-1)^(j+mu) D^j_{mu,m}(alpha, pi/2, gamma)`. The two returned values
/// agree to near machine precision for every valid input; at `gamma = 0`
/// the left side is the bare `D^j_{mu,-m}`.
pub fn symmetry_negate_column(
    j: HalfInt,
    mu: HalfInt,
    m: HalfInt,
    alpha: f64,
    gamma: f64,
) -> Result<(Complex64, Complex64)> {
    let half_pi = std::f64::consts::FRAC_PI_2;
    let angles = EulerAngles::new(alpha, half_pi, gamma);
    let lhs = big_d(j, mu, -m, &angles)? * phase(-2.0 * m.value() * gamma);
    let rhs = big_d(j, mu, m, &angles)? * row_sign(j, mu);
    Ok((lhs, rhs))
}

/// The even- or odd-`k` half of the orthogonality sum at `beta = pi/2`,
///
/// ```text
/// S = sum_{k in 0..=N, k parity-selected}
///       D^j_{j-k,m}(alpha, pi/2, gamma) conj(D^j_{j-k,m'}(alpha, pi/2, gamma))
/// ```
///
/// with `j = N/2`.
///
/// The theorem under test, for either parity selection:
///
/// * `m = m'`: each half equals `1/2`, except that for even `N` and
///   `m = m' = 0` the even half carries the whole weight (`1`) and the odd
///   half vanishes identically (every odd-`k` term contains a
///   `d^j_{j-k,0}(pi/2)` that the column-negation identity forces to zero).
/// * `|m| != |m'|`: both halves vanish.
/// * `m' = -m != 0`: the halves do *not* vanish individually; the
///   column-negation identity makes every selected term pick up the same
///   sign, giving `(-1)^N exp(-2 i m gamma) / 2` for the even half and its
///   negative for the odd half. (States drawn from the path-symmetric
///   ansatz always combine the `+m` and `-m` columns, which is why these
///   cells never contribute there.)
/// * In every cell the two halves add to `delta_{m,m'}`, the ordinary
///   orthogonality at `beta = pi/2`.
pub fn parity_orthogonality_sum(
    n_photons: u32,
    parity: Parity,
    m: HalfInt,
    m_prime: HalfInt,
    alpha: f64,
    gamma: f64,
) -> Result<Complex64> {
    let j = HalfInt::from_twice(n_photons as i32);
    require_supported_j(j)?;
    HalfInt::require_valid_pair(j, m)?;
    HalfInt::require_valid_pair(j, m_prime)?;

    let half_pi = std::f64::consts::FRAC_PI_2;
    let eval = DEval::new(j.twice(), half_pi);
    let col_m = eval.column(m.twice());
    let col_mp = eval.column(m_prime.twice());

    // The row phase exp(-i (j-k) alpha) meets its own conjugate and drops
    // out; the column phases survive as exp(-i (m - m') gamma).
    let mut acc = Complex64::new(0.0, 0.0);
    for k in 0..=j.twice() {
        if parity.matches(k) {
            let mu = (j.twice() - 2 * k) as f64 / 2.0;
            let lhs = phase(-(mu * alpha + m.value() * gamma)) * col_m[k as usize];
            let rhs = phase(-(mu * alpha + m_prime.value() * gamma)) * col_mp[k as usize];
            acc += lhs * rhs.conj();
        }
    }
    Ok(acc)
}

/// Result of sweeping [`parity_orthogonality_sum`] over every `(m, m')`
/// pair of one representation at fixed angles.
#[derive(Clone, Copy, Debug)]
pub struct ParityCheck {
    /// Largest deviation of a selected-parity sum from its predicted value.
    pub max_contract_residual: f64,
    /// Largest deviation of (even sum + odd sum) from `delta_{m,m'}`.
    pub max_totality_residual: f64,
    /// `(m, m', parity)` attaining the contract residual.
    pub worst: (HalfInt, HalfInt, Parity),
}

/// Checks the even/odd orthogonality contract for all `(m, m')` pairs of
/// `j = N/2` at the given `(alpha, gamma)`, sharing one matrix evaluation
/// across the sweep.
pub fn parity_orthogonality_check(n_photons: u32, alpha: f64, gamma: f64) -> Result<ParityCheck> {
    let j = HalfInt::from_twice(n_photons as i32);
    require_supported_j(j)?;
    let half_pi = std::f64::consts::FRAC_PI_2;
    let matrix = d_matrix(j, &EulerAngles::new(alpha, half_pi, gamma))?;
    let n = matrix.dim();
    let even_n = n_photons.is_multiple_of(2);

    let mut check = ParityCheck {
        max_contract_residual: 0.0,
        max_totality_residual: 0.0,
        worst: (j, j, Parity::Even),
    };
    for cm in 0..n {
        let m = matrix.m_of(cm);
        for cmp in 0..n {
            let m_prime = matrix.m_of(cmp);
            let mut even = Complex64::new(0.0, 0.0);
            let mut odd = Complex64::new(0.0, 0.0);
            for k in 0..n {
                let prod = matrix.entry(k, cm) * matrix.entry(k, cmp).conj();
                if k % 2 == 0 {
                    even += prod;
                } else {
                    odd += prod;
                }
            }
            let delta = if cm == cmp { 1.0 } else { 0.0 };
            let (even_expected, odd_expected) = if m.twice() == -m_prime.twice() && m.twice() != 0 {
                // Anti-diagonal: the halves carry opposite, gamma-dependent
                // phases that cancel in the total.
                let sign = if n_photons.is_multiple_of(2) {
                    1.0
                } else {
                    -1.0
                };
                let v = phase(-2.0 * m.value() * gamma) * (sign * 0.5);
                (v, -v)
            } else if even_n && (m.twice() == 0 || m_prime.twice() == 0) {
                (Complex64::new(delta, 0.0), Complex64::new(0.0, 0.0))
            } else {
                (
                    Complex64::new(delta / 2.0, 0.0),
                    Complex64::new(delta / 2.0, 0.0),
                )
            };
            let even_res = (even - even_expected).norm();
            let odd_res = (odd - odd_expected).norm();
            let total_res = (even + odd - delta).norm();
            if even_res > check.max_contract_residual {
                check.max_contract_residual = even_res;
                check.worst = (m, m_prime, Parity::Even);
            }
            if odd_res > check.max_contract_residual {
                check.max_contract_residual = odd_res;
                check.worst = (m, m_prime, Parity::Odd);
            }
            check.max_totality_residual = check.max_totality_residual.max(total_res);
        }
    }
    Ok(check)
}
