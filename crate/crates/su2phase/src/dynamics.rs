//! Phase-shift evolutions and beam-splitter rotations, with exact analytic
//! derivatives in the phase.
//!
//! Two phase configurations are supported:
//!
//! * [`PhaseConfig::SingleArm`]: the shift acts on one arm only,
//!   `U_1(phi) = exp(-i (N/2 + J_z) phi)`; the generator eigenvalue on
//!   `|j, m>` is `j + m = n_a`.
//! * [`PhaseConfig::Balanced`]: opposite half-shifts on the two arms,
//!   `U_2(phi) = exp(-i J_z phi)`; the eigenvalue is `m`.
//!
//! Within a fixed photon-number sector the two differ by the global phase
//! `exp(-i j phi)` only. The derivative arrays produced here are exact
//! (`-i g` times the evolved amplitude, never a finite difference), which
//! is what keeps Fisher-information quantities well behaved where outcome
//! probabilities vanish.

use num_complex::Complex64;

use crate::error::Result;
use crate::states::{SectorState, TwoModePureState};
use crate::wigner::{d_matrix, DMatrix, EulerAngles};

/// Which arms of the interferometer the phase shift acts on.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PhaseConfig {
    /// `U_1(phi) = exp(-i (N/2 + J_z) phi)`, the single-arm shift.
    SingleArm,
    /// `U_2(phi) = exp(-i J_z phi)`, balanced counter-rotating shifts.
    Balanced,
}

impl PhaseConfig {
    /// Generator eigenvalue on `|j, m>` (an amplitude at index `idx` of a
    /// sector state).
    #[inline]
    pub(crate) fn eigenvalue(self, twice_j: i32, idx: usize) -> f64 {
        let tm = twice_j - 2 * idx as i32;
        match self {
            PhaseConfig::SingleArm => f64::from(twice_j + tm) / 2.0, // j + m = n_a
            PhaseConfig::Balanced => f64::from(tm) / 2.0,            // m
        }
    }
}

/// A phase-evolved sector state together with the exact derivative of each
/// amplitude with respect to the phase.
#[derive(Clone, Debug)]
pub struct EvolvedState {
    pub state: SectorState,
    /// `d/dphi` of each amplitude, same indexing as the state.
    pub derivative: Vec<Complex64>,
    pub phi: f64,
    pub config: PhaseConfig,
}

impl EvolvedState {
    /// `Re <state|derivative>`, zero (to rounding) because the evolution is
    /// unitary.
    pub fn norm_derivative_residual(&self) -> f64 {
        self.state
            .amps()
            .iter()
            .zip(&self.derivative)
            .map(|(a, d)| (a.conj() * d).re)
            .sum()
    }

    /// Applies a phase-independent rotation to the state and its
    /// derivative (the derivative map is linear, so the same matrix acts on
    /// both).
    pub fn rotate(&self, angles: &EulerAngles) -> Result<EvolvedState> {
        let matrix = d_matrix(self.state.j(), angles)?;
        let state = SectorState::from_parts_unchecked(
            self.state.j(),
            rotate_amplitudes(&matrix, self.state.amps()),
        );
        let derivative = rotate_amplitudes(&matrix, &self.derivative);
        Ok(EvolvedState {
            state,
            derivative,
            phi: self.phi,
            config: self.config,
        })
    }
}

/// Evolves a sector state through the phase shift: `C_m -> exp(-i g phi) C_m`
/// with `g = m` (balanced) or `g = j + m` (single-arm), attaching the exact
/// derivative `-i g` times the evolved amplitude.
pub fn apply_phase(state: &SectorState, phi: f64, config: PhaseConfig) -> EvolvedState {
    let tj = state.j().twice();
    let mut amps = Vec::with_capacity(state.amps().len());
    let mut derivative = Vec::with_capacity(state.amps().len());
    for (idx, &amp) in state.amps().iter().enumerate() {
        let g = config.eigenvalue(tj, idx);
        let evolved = Complex64::new(0.0, -g * phi).exp() * amp;
        amps.push(evolved);
        derivative.push(Complex64::new(0.0, -g) * evolved);
    }
    EvolvedState {
        state: SectorState::from_parts_unchecked(state.j(), amps),
        derivative,
        phi,
        config,
    }
}

/// `C~_mu = sum_m D^j_{mu,m}(angles) C_m` for a prepared matrix.
pub(crate) fn rotate_amplitudes(matrix: &DMatrix, amps: &[Complex64]) -> Vec<Complex64> {
    let n = matrix.dim();
    debug_assert_eq!(n, amps.len());
    (0..n)
        .map(|row| {
            let mut acc = Complex64::new(0.0, 0.0);
            for (col, &amp) in amps.iter().enumerate() {
                acc += matrix.entry(row, col) * amp;
            }
            acc
        })
        .collect()
}

/// Rotates a sector state by `R(alpha, beta, gamma)`.
pub fn apply_rotation(state: &SectorState, angles: &EulerAngles) -> Result<SectorState> {
    let matrix = d_matrix(state.j(), angles)?;
    Ok(SectorState::from_parts_unchecked(
        state.j(),
        rotate_amplitudes(&matrix, state.amps()),
    ))
}

/// First and second moments of the phase generator and of the total photon
/// number.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GeneratorMoments {
    /// `<G>` for the configured generator.
    pub mean: f64,
    /// `<G^2> - <G>^2`.
    pub variance: f64,
    /// `<N>`.
    pub mean_photons: f64,
    /// `<N^2> - <N>^2`.
    pub photon_variance: f64,
    /// `Cov(N, J_z) = <N J_z> - <N><J_z>`.
    pub photon_jz_covariance: f64,
}

/// States that expose the moments of the phase generator; quantum Fisher
/// information is four times [`GeneratorMoments::variance`].
pub trait GeneratorStats {
    fn generator_moments(&self, config: PhaseConfig) -> GeneratorMoments;
}

impl GeneratorStats for SectorState {
    fn generator_moments(&self, config: PhaseConfig) -> GeneratorMoments {
        let tj = self.j().twice();
        let n = f64::from(tj); // photon number of the sector, exactly
        let mut mean = 0.0;
        let mut mean_sq = 0.0;
        for (idx, amp) in self.amps().iter().enumerate() {
            let w = amp.norm_sqr();
            let g = config.eigenvalue(tj, idx);
            mean += g * w;
            mean_sq += g * g * w;
        }
        GeneratorMoments {
            mean,
            variance: mean_sq - mean * mean,
            mean_photons: n,
            photon_variance: 0.0,
            photon_jz_covariance: 0.0,
        }
    }
}

impl GeneratorStats for TwoModePureState {
    fn generator_moments(&self, config: PhaseConfig) -> GeneratorMoments {
        let mut mean = 0.0;
        let mut mean_sq = 0.0;
        let mut mean_n = 0.0;
        let mut mean_n_sq = 0.0;
        let mut mean_jz = 0.0;
        let mut mean_n_jz = 0.0;
        for (&(n_a, n_b), amp) in self.amplitudes() {
            let w = amp.norm_sqr();
            let n = f64::from(n_a + n_b);
            let jz = (f64::from(n_a) - f64::from(n_b)) / 2.0;
            let g = match config {
                PhaseConfig::SingleArm => f64::from(n_a),
                PhaseConfig::Balanced => jz,
            };
            mean += g * w;
            mean_sq += g * g * w;
            mean_n += n * w;
            mean_n_sq += n * n * w;
            mean_jz += jz * w;
            mean_n_jz += n * jz * w;
        }
        GeneratorMoments {
            mean,
            variance: mean_sq - mean * mean,
            mean_photons: mean_n,
            photon_variance: mean_n_sq - mean_n * mean_n,
            photon_jz_covariance: mean_n_jz - mean_n * mean_jz,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::halfint::HalfInt;
    use crate::states::{ec_pure_state, noon, SectorState};
    use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, PI};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn noon_under_single_arm_matches_parametric_form() {
        let n = 4u32;
        let phi = 0.37;
        let evolved = apply_phase(&noon(n).unwrap(), phi, PhaseConfig::SingleArm);
        // Amplitude at m = j carries exp(-i N phi), at m = -j none; equal up
        // to the global phase exp(-i j phi) to the balanced form.
        let top = evolved.state.amps()[0];
        let bottom = evolved.state.amps()[n as usize];
        let expected_top = c(0.0, -(n as f64) * phi).exp() * FRAC_1_SQRT_2;
        assert!((top - expected_top).norm() < 1e-15);
        assert!((bottom - c(FRAC_1_SQRT_2, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn zero_phase_is_identity_with_generator_derivative() {
        let state = noon(3).unwrap();
        let evolved = apply_phase(&state, 0.0, PhaseConfig::Balanced);
        for (idx, (a, d)) in evolved
            .state
            .amps()
            .iter()
            .zip(&evolved.derivative)
            .enumerate()
        {
            assert_eq!(*a, state.amps()[idx]);
            let g = PhaseConfig::Balanced.eigenvalue(3, idx);
            assert_eq!(*d, c(0.0, -g) * a);
        }
    }

    #[test]
    fn balanced_at_pi_flips_m_one_amplitude() {
        let j = HalfInt::integer(2);
        let state = SectorState::basis(j, HalfInt::integer(1)).unwrap();
        let evolved = apply_phase(&state, PI, PhaseConfig::Balanced);
        let amp = evolved.state.amp(HalfInt::integer(1)).unwrap();
        assert!((amp - c(-1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn single_arm_differs_from_balanced_by_global_phase() {
        let state = noon(5).unwrap();
        let phi = 0.81;
        let single = apply_phase(&state, phi, PhaseConfig::SingleArm);
        let balanced = apply_phase(&state, phi, PhaseConfig::Balanced);
        let global = c(0.0, -2.5 * phi).exp(); // exp(-i j phi)
        for (s, b) in single.state.amps().iter().zip(balanced.state.amps()) {
            assert!((s - global * b).norm() < 1e-15);
        }
    }

    #[test]
    fn rotation_by_beam_splitter_spin_half() {
        let j = HalfInt::from_twice(1);
        let state = SectorState::basis(j, j).unwrap();
        let rotated = apply_rotation(&state, &EulerAngles::beam_splitter()).unwrap();
        assert!((rotated.amps()[0] - c(FRAC_1_SQRT_2, 0.0)).norm() < 1e-15);
        assert!((rotated.amps()[1] - c(FRAC_1_SQRT_2, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn identity_rotation_is_identity() {
        let state = noon(6).unwrap();
        let rotated = apply_rotation(&state, &EulerAngles::new(0.0, 0.0, 0.0)).unwrap();
        for (a, b) in rotated.amps().iter().zip(state.amps()) {
            assert_eq!(a, b);
        }
    }

    #[test]
    fn rotation_preserves_norm() {
        let state = noon(10).unwrap();
        let rotated = apply_rotation(&state, &EulerAngles::new(0.2, FRAC_PI_2, 0.9)).unwrap();
        let norm_sq: f64 = rotated.amps().iter().map(|a| a.norm_sqr()).sum();
        assert!((norm_sq - 1.0).abs() < 1e-12);
    }

    #[test]
    fn derivative_is_orthogonal_to_state() {
        let state = noon(7).unwrap();
        for config in [PhaseConfig::SingleArm, PhaseConfig::Balanced] {
            let evolved = apply_phase(&state, 0.63, config);
            assert!(evolved.norm_derivative_residual().abs() < 1e-12);
            let rotated = evolved.rotate(&EulerAngles::beam_splitter()).unwrap();
            assert!(rotated.norm_derivative_residual().abs() < 1e-12);
        }
    }

    #[test]
    fn phase_commutes_with_z_rotation() {
        let state = noon(4).unwrap();
        let phi = 0.52;
        let z = EulerAngles::new(0.77, 0.0, 0.0);
        let a = apply_rotation(&apply_phase(&state, phi, PhaseConfig::Balanced).state, &z).unwrap();
        let b = apply_phase(
            &apply_rotation(&state, &z).unwrap(),
            phi,
            PhaseConfig::Balanced,
        );
        for (x, y) in a.amps().iter().zip(b.state.amps()) {
            assert!((x - y).norm() < 1e-12);
        }
    }

    #[test]
    fn derivative_matches_finite_difference() {
        // Central difference with step 1e-5 against the analytic arrays.
        let h = 1e-5;
        let state = noon(9).unwrap();
        for config in [PhaseConfig::SingleArm, PhaseConfig::Balanced] {
            let phi = 0.4;
            let evolved = apply_phase(&state, phi, config);
            let plus = apply_phase(&state, phi + h, config);
            let minus = apply_phase(&state, phi - h, config);
            for ((d, p), m) in evolved
                .derivative
                .iter()
                .zip(plus.state.amps())
                .zip(minus.state.amps())
            {
                let fd = (p - m) / c(2.0 * h, 0.0);
                assert!((d - fd).norm() < 1e-7);
            }
        }
    }

    #[test]
    fn moments_of_noon_balanced() {
        for n in [1u32, 2, 7, 20] {
            let m = noon(n).unwrap().generator_moments(PhaseConfig::Balanced);
            assert!(m.mean.abs() < 1e-14);
            let expected = (n as f64).powi(2) / 4.0;
            assert!((m.variance - expected).abs() < 1e-10 * expected.max(1.0));
            assert_eq!(m.photon_variance, 0.0);
            assert_eq!(m.photon_jz_covariance, 0.0);
        }
    }

    #[test]
    fn fixed_sector_configs_share_variance() {
        let state = noon(6).unwrap();
        let single = state.generator_moments(PhaseConfig::SingleArm);
        let balanced = state.generator_moments(PhaseConfig::Balanced);
        assert!((single.variance - balanced.variance).abs() < 1e-12);
        assert!((single.mean - (balanced.mean + 3.0)).abs() < 1e-14);
    }

    #[test]
    fn two_mode_variance_decomposition() {
        // 4 Var(N/2 + J_z) = Var(N) + 4 Cov(N, J_z) + 4 Var(J_z), exactly.
        let psi = ec_pure_state(c(5.0f64.sqrt(), 0.0), 1e-12).unwrap();
        let single = psi.generator_moments(PhaseConfig::SingleArm);
        let balanced = psi.generator_moments(PhaseConfig::Balanced);
        let lhs = 4.0 * single.variance;
        let rhs =
            single.photon_variance + 4.0 * single.photon_jz_covariance + 4.0 * balanced.variance;
        assert!((lhs - rhs).abs() < 1e-10, "{lhs} vs {rhs}");
    }
}
