//! Wigner rotation matrices, their even/odd orthogonality identities, and
//! Fisher-information analysis of two-mode interferometric phase
//! estimation.
//!
//! # What's here
//!
//! * [`wigner`]: numerically careful evaluation of the small d-matrix
//!   `d^j_{m',m}(beta)` and the full D-matrix for `2j` up to 200, a
//!   brute-force matrix-exponential oracle to check it against, and the
//!   orthogonality sums (ordinary, and split by the parity of `k = j - m'`
//!   at `beta = pi/2`) as first-class checkable quantities.
//! * [`states`]: NOON states, entangled-coherent probes, generic two-mode
//!   states, and phase averaging into block-diagonal photon-sector
//!   ensembles, all in the Schwinger picture.
//! * [`dynamics`]: single-arm and balanced phase shifts with exact
//!   analytic phase derivatives, beam-splitter rotations, and generator
//!   moments.
//! * [`metrology`]: double-photon-counting and parity measurement
//!   statistics, classical and quantum Fisher information, and the
//!   closed-form benchmarks they are tested against.
//! * [`estimation`]: seeded Monte-Carlo sampling, maximum-likelihood
//!   phase fits, and Cramer-Rao saturation reports.
//!
//! # Conventions (fixed across the crate)
//!
//! Rotations are active, `R(alpha, beta, gamma) = e^{-i alpha J_z}
//! e^{-i beta J_y} e^{-i gamma J_z}`, with matrix element
//! `D^j_{m',m} = <j,m'|R|j,m>`. Dense matrices and amplitude vectors index
//! `m` *descending* from `+j` to `-j`. Two photon modes enter through
//! `J_z = (a†a - b†b)/2`, i.e. `|n_a, n_b> = |j = (n_a+n_b)/2,
//! m = (n_a-n_b)/2>`. The output beam splitter is `R_y(pi/2)`. Quantum
//! numbers are exact half-integers ([`HalfInt`]); nothing in the API takes
//! a floating-point `j` or `m`.
//!
//! Every operation is a pure function of its arguments and safe to call
//! from any number of threads; the only shared state is a pair of lookup
//! tables built once and immutable afterwards.
//!
//! # Quick start
//!
//! ```
//! use su2phase::{HalfInt, wigner, states, metrology, dynamics::PhaseConfig};
//!
//! // d^{1/2}(pi/2) is the balanced beam splitter.
//! let j = HalfInt::from_twice(1);
//! let d = wigner::small_d(j, j, j, std::f64::consts::FRAC_PI_2).unwrap();
//! assert!((d - 0.5f64.sqrt()).abs() < 1e-15);
//!
//! // A four-photon NOON probe reaches the Heisenberg limit F = N^2
//! // under double photon counting.
//! let probe = states::PhotonSectorEnsemble::pure(states::noon(4).unwrap());
//! let dist = metrology::dpc_distribution(&probe, 0.3, PhaseConfig::SingleArm).unwrap();
//! let fisher = metrology::cfi_from_distribution(&dist).unwrap();
//! assert!((fisher.value - 16.0).abs() < 1e-8);
//! ```

mod dd;
mod error;
mod halfint;

pub mod dynamics;
pub mod estimation;
pub mod metrology;
pub mod states;
pub mod wigner;

pub use error::{Error, Result};
pub use halfint::HalfInt;

#[cfg(doctest)]
mod book {
    //! Chapters of the guide double as doctests so the book's code never
    //! drifts from the library.
    macro_rules! chapter {
        ($name:ident, $path:literal) => {
            #[doc = include_str!($path)]
            pub mod $name {}
        };
    }

    chapter!(introduction, "../../../book/src/introduction.md");
    chapter!(rotations, "../../../book/src/rotations.md");
    chapter!(orthogonality, "../../../book/src/orthogonality.md");
    chapter!(probe_states, "../../../book/src/probe-states.md");
    chapter!(phase_dynamics, "../../../book/src/phase-dynamics.md");
    chapter!(
        fisher_information,
        "../../../book/src/fisher-information.md"
    );
    chapter!(estimation, "../../../book/src/estimation.md");
}
