//! Measurement statistics and Fisher information for two-mode phase
//! estimation.
//!
//! The measurement pipeline is: evolve each photon-number sector through
//! the phase shift ([`apply_phase`](crate::dynamics::apply_phase)), send
//! it through the output beam splitter `R_y(pi/2)`, and read out photon
//! numbers at both ports (double photon counting, DPC) or the
//! photon-number parity of one port.
//! Probabilities carry exact analytic phase derivatives throughout, so the
//! classical Fisher information is free of finite-difference noise and its
//! `0/0` outcomes are removable exactly where they should be.
//!
//! # Parity convention
//!
//! Parity detection measures `(-1)^n` on a single output port. With the
//! conventions fixed in this crate (beam splitter `exp(-i (pi/2) J_y)`,
//! Fock correspondence `n_a = j + m`), the port whose parity traces the
//! canonical `cos(N phi)` fringe for a NOON probe (and hence gives `+1` at
//! `phi = 0` for every path-symmetric probe) is port *a*:
//! [`parity_expectation`] returns `sum (-1)^(n_a) p(n_a, n_b)`. Reading the
//! other port flips the fringe sign for odd `N`; that changes nothing for a
//! single sector (Fisher information is sign-blind) but would scramble the
//! even/odd sectors of a mixture and destroy the small-phase optimality of
//! parity detection.

use num_complex::Complex64;

use crate::dynamics::{EvolvedState, GeneratorStats, PhaseConfig};
use crate::error::{Error, Result};
use crate::states::{coherent_weight, PhotonSectorEnsemble};
use crate::wigner::{d_matrix, DMatrix, EulerAngles};

/// The deterministic phase grid used by the verification suites.
pub const PHI_TEST_GRID: [f64; 9] = [
    1e-4,
    0.1,
    0.3,
    0.5,
    0.7,
    1.0,
    std::f64::consts::FRAC_PI_2,
    2.0,
    3.0,
];

/// Below this probability an outcome is treated as an exact zero; analytic
/// derivatives must vanish with it.
const ZERO_PROB: f64 = 1e-300;
const ZERO_PROB_DERIVATIVE: f64 = 1e-150;

/// `p <= ddp * PROB_NOISE_FLOOR` flags an outcome whose amplitude is pure
/// rounding noise (the phase sits within ~1e-10 of a fringe zero, far wider
/// than the ~1e-14 the grid can produce, far narrower than anything
/// resolvable); its Fisher contribution switches to the analytic limit.
const PROB_NOISE_FLOOR: f64 = 5e-21;

/// Guard threshold on `1 - <Pi>^2` for the parity Fisher information.
const PARITY_SINGULARITY: f64 = 1e-10;

/// What a [`FisherReport`] measures.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FisherKind {
    /// Classical Fisher information of double photon counting.
    CfiDpc,
    /// Classical Fisher information of single-port parity detection.
    CfiParity,
    /// Quantum Fisher information.
    Qfi,
}

/// A Fisher-information value with the metadata needed to interpret it.
#[derive(Clone, Copy, Debug)]
pub struct FisherReport {
    /// Fisher information, in radians^-2.
    pub value: f64,
    pub kind: FisherKind,
    /// Phase at which a classical value was evaluated; `None` for
    /// phase-independent quantum values.
    pub phi: Option<f64>,
    /// Probability mass excluded when the probe was truncated; tolerances
    /// downstream should budget for it.
    pub truncation_residual: f64,
    pub config: PhaseConfig,
}

/// One DPC outcome with its probability and exact phase derivatives.
#[derive(Clone, Copy, Debug)]
pub struct OutcomeEntry {
    pub n_a: u32,
    pub n_b: u32,
    pub p: f64,
    pub dp: f64,
    /// Second phase derivative; carried so that Fisher sums can take the
    /// analytic limit where `p` touches zero.
    pub ddp: f64,
}

/// The full outcome distribution `p(n_a, n_b | phi)` of a probe, with
/// analytic derivatives attached.
///
/// Probabilities sum to one minus the probe's truncation residual;
/// derivatives sum to zero.
#[derive(Clone, Debug)]
pub struct OutcomeDistribution {
    pub entries: Vec<OutcomeEntry>,
    pub phi: f64,
    pub config: PhaseConfig,
    pub truncation_residual: f64,
}

struct PreparedBlock {
    n_photons: u32,
    weight: f64,
    amps: Vec<Complex64>,
    beam_splitter: DMatrix,
}

/// A probe with its per-sector beam-splitter matrices prebuilt, so that
/// sweeping the phase costs one matrix-vector product per sector instead of
/// a fresh matrix evaluation.
pub struct PreparedProbe {
    blocks: Vec<PreparedBlock>,
    truncation_residual: f64,
}

/// Per-block outcome amplitudes and their first two phase derivatives.
struct RotatedBlock {
    out: Vec<Complex64>,
    d_out: Vec<Complex64>,
    dd_out: Vec<Complex64>,
}

impl PreparedProbe {
    pub fn new(ensemble: &PhotonSectorEnsemble) -> Result<Self> {
        let bs = EulerAngles::beam_splitter();
        let mut blocks = Vec::with_capacity(ensemble.blocks().len());
        for block in ensemble.blocks() {
            blocks.push(PreparedBlock {
                n_photons: block.n_photons,
                weight: block.weight,
                amps: block.state.amps().to_vec(),
                beam_splitter: d_matrix(block.state.j(), &bs)?,
            });
        }
        Ok(PreparedProbe {
            blocks,
            truncation_residual: ensemble.truncation_residual(),
        })
    }

    pub fn truncation_residual(&self) -> f64 {
        self.truncation_residual
    }

    fn rotate_block(block: &PreparedBlock, phi: f64, config: PhaseConfig) -> RotatedBlock {
        let tj = block.n_photons as i32;
        let n = block.amps.len();
        let mut evolved = Vec::with_capacity(n);
        let mut d_evolved = Vec::with_capacity(n);
        let mut dd_evolved = Vec::with_capacity(n);
        for (idx, &amp) in block.amps.iter().enumerate() {
            let g = config.eigenvalue(tj, idx);
            let a = Complex64::new(0.0, -g * phi).exp() * amp;
            evolved.push(a);
            d_evolved.push(Complex64::new(0.0, -g) * a);
            dd_evolved.push(Complex64::new(-g * g, 0.0) * a);
        }
        let rotate = |v: &[Complex64]| -> Vec<Complex64> {
            (0..n)
                .map(|row| {
                    let mut acc = Complex64::new(0.0, 0.0);
                    for (col, &amp) in v.iter().enumerate() {
                        acc += block.beam_splitter.entry(row, col) * amp;
                    }
                    acc
                })
                .collect()
        };
        RotatedBlock {
            out: rotate(&evolved),
            d_out: rotate(&d_evolved),
            dd_out: rotate(&dd_evolved),
        }
    }

    /// The DPC outcome distribution at phase `phi`.
    ///
    /// Outcomes from different sectors never collide (their total photon
    /// numbers differ), so entries are emitted sector by sector, `n_a`
    /// descending within a sector.
    pub fn distribution(&self, phi: f64, config: PhaseConfig) -> OutcomeDistribution {
        let mut entries = Vec::new();
        for block in &self.blocks {
            let rotated = Self::rotate_block(block, phi, config);
            let n = block.n_photons;
            for (idx, (a, da)) in rotated.out.iter().zip(&rotated.d_out).enumerate() {
                let dda = rotated.dd_out[idx];
                let n_b = idx as u32;
                entries.push(OutcomeEntry {
                    n_a: n - n_b,
                    n_b,
                    p: block.weight * a.norm_sqr(),
                    dp: block.weight * 2.0 * (a.conj() * da).re,
                    ddp: block.weight * 2.0 * ((a.conj() * dda).re + da.norm_sqr()),
                });
            }
        }
        OutcomeDistribution {
            entries,
            phi,
            config,
            truncation_residual: self.truncation_residual,
        }
    }

    /// Parity expectation on port `a` with its first two phase derivatives,
    /// plus the stable complements `1 -+ <Pi>` needed near the fringe
    /// extremes.
    ///
    /// Truncated probability mass is counted at parity `+1`: every omitted
    /// sector is path-symmetric with a fringe peaking at `+1`, so this
    /// attribution is exact to `O(residual * (N phi)^2)` in the small-phase
    /// region where the complement `1 - <Pi>` is delicate, and off by at
    /// most `2 * residual` anywhere else.
    fn parity_moments(&self, phi: f64, config: PhaseConfig) -> ParityMoments {
        let mut even_mass = self.truncation_residual;
        let mut odd_mass = 0.0;
        let mut d1 = 0.0;
        let mut d2 = 0.0;
        for block in &self.blocks {
            let rotated = Self::rotate_block(block, phi, config);
            let n = block.n_photons;
            for (idx, a) in rotated.out.iter().enumerate() {
                let n_a = n - idx as u32;
                let p = block.weight * a.norm_sqr();
                let da = rotated.d_out[idx];
                let dda = rotated.dd_out[idx];
                let dp = block.weight * 2.0 * (a.conj() * da).re;
                let ddp = block.weight * 2.0 * ((a.conj() * dda).re + da.norm_sqr());
                if n_a.is_multiple_of(2) {
                    even_mass += p;
                    d1 += dp;
                    d2 += ddp;
                } else {
                    odd_mass += p;
                    d1 -= dp;
                    d2 -= ddp;
                }
            }
        }
        ParityMoments {
            value: even_mass - odd_mass,
            // 1 - <Pi> = 2 * odd mass exactly (masses add to one): the
            // complement never cancels.
            one_minus: 2.0 * odd_mass,
            one_plus: 2.0 * even_mass,
            d1,
            d2,
        }
    }
}

struct ParityMoments {
    value: f64,
    one_minus: f64,
    one_plus: f64,
    d1: f64,
    d2: f64,
}

/// Double-photon-counting outcome distribution of a sector ensemble.
///
/// Each sector is evolved by the phase shift, rotated through the
/// `R_y(pi/2)` beam splitter, and projected on `|n_a, n_b>`; probabilities
/// are weighted by the sector weights, and derivatives are propagated as
/// `dp = 2 Re(conj(A) dA)` per outcome.
pub fn dpc_distribution(
    ensemble: &PhotonSectorEnsemble,
    phi: f64,
    config: PhaseConfig,
) -> Result<OutcomeDistribution> {
    Ok(PreparedProbe::new(ensemble)?.distribution(phi, config))
}

/// Classical Fisher information `F = sum dp^2 / p` of an outcome
/// distribution.
///
/// Outcomes with `p <= 1e-300` are removable double zeros (the analytic
/// derivative vanishes with the amplitude) and contribute nothing. That
/// removability is asserted, not assumed: such an outcome with
/// `|dp| > 1e-150` trips a numerical-integrity error rather than silently
/// discarding information.
///
/// An outcome whose probability is nonzero but drowned in rounding noise
/// (possible where a fringe zero falls within ~1e-10 of the evaluation
/// phase, as happens on a grid containing `pi/2`) would make `dp^2 / p`
/// meaningless; there the contribution switches to its analytic limit
/// `2 ddp`, exact to second order in the distance from the zero.
pub fn cfi_from_distribution(dist: &OutcomeDistribution) -> Result<FisherReport> {
    let mut value = 0.0;
    for entry in &dist.entries {
        if entry.p < 0.0 {
            return Err(Error::NumericalIntegrity(format!(
                "negative probability {} at outcome ({}, {})",
                entry.p, entry.n_a, entry.n_b
            )));
        }
        if entry.p <= ZERO_PROB {
            if entry.dp.abs() > ZERO_PROB_DERIVATIVE {
                return Err(Error::NumericalIntegrity(format!(
                    "outcome ({}, {}) has p = {:e} but dp = {:e}",
                    entry.n_a, entry.n_b, entry.p, entry.dp
                )));
            }
            continue;
        }
        if entry.ddp > 0.0 && entry.p <= entry.ddp * PROB_NOISE_FLOOR {
            value += 2.0 * entry.ddp;
            continue;
        }
        value += entry.dp * entry.dp / entry.p;
    }
    Ok(FisherReport {
        value,
        kind: FisherKind::CfiDpc,
        phi: Some(dist.phi),
        truncation_residual: dist.truncation_residual,
        config: dist.config,
    })
}

/// Expectation value of the output-port parity `(-1)^(n_a)` and its exact
/// phase derivative. See the module docs for the port convention.
pub fn parity_expectation(
    ensemble: &PhotonSectorEnsemble,
    phi: f64,
    config: PhaseConfig,
) -> Result<(f64, f64)> {
    let m = PreparedProbe::new(ensemble)?.parity_moments(phi, config);
    Ok((m.value, m.d1))
}

fn cfi_parity_from_moments(
    moments: &ParityMoments,
    phi: f64,
    config: PhaseConfig,
    truncation_residual: f64,
) -> Result<FisherReport> {
    let pi = moments.value;
    if pi * pi > 1.0 + 1e-12 {
        return Err(Error::NumericalIntegrity(format!(
            "parity expectation {pi} lies outside [-1, 1]"
        )));
    }
    let denominator = moments.one_minus * moments.one_plus; // 1 - <Pi>^2
    let value = if denominator.abs() < PARITY_SINGULARITY {
        // At a fringe extreme both the numerator and `1 - <Pi>^2` have
        // second-order zeros; the ratio's limit is -Pi''/Pi.
        -moments.d2 / pi
    } else {
        moments.d1 * moments.d1 / denominator
    };
    Ok(FisherReport {
        value,
        kind: FisherKind::CfiParity,
        phi: Some(phi),
        truncation_residual,
        config,
    })
}

/// Classical Fisher information of single-port parity detection,
/// `F = (d<Pi>/dphi)^2 / (1 - <Pi>^2)`.
///
/// Where the fringe touches `|<Pi>| = 1` (within 1e-10 of it) the
/// expression is an exact `0/0`; the evaluation switches to the analytic
/// limit `-Pi''/Pi` from the second-order expansion around the extreme.
pub fn cfi_parity(
    ensemble: &PhotonSectorEnsemble,
    phi: f64,
    config: PhaseConfig,
) -> Result<FisherReport> {
    let probe = PreparedProbe::new(ensemble)?;
    let moments = probe.parity_moments(phi, config);
    cfi_parity_from_moments(&moments, phi, config, probe.truncation_residual)
}

impl PreparedProbe {
    /// CFI of DPC detection at `phi`, reusing the prepared matrices.
    pub fn cfi_dpc(&self, phi: f64, config: PhaseConfig) -> Result<FisherReport> {
        cfi_from_distribution(&self.distribution(phi, config))
    }

    /// CFI of parity detection at `phi`, reusing the prepared matrices.
    pub fn cfi_parity(&self, phi: f64, config: PhaseConfig) -> Result<FisherReport> {
        let moments = self.parity_moments(phi, config);
        cfi_parity_from_moments(&moments, phi, config, self.truncation_residual)
    }

    /// Parity expectation and derivative at `phi`.
    pub fn parity_expectation(&self, phi: f64, config: PhaseConfig) -> (f64, f64) {
        let m = self.parity_moments(phi, config);
        (m.value, m.d1)
    }
}

/// Quantum Fisher information of a pure state, `H = 4 Var(G)` for the
/// configured generator.
///
/// An independent route to the same number goes through the evolved state
/// and its analytic derivative ([`qfi_from_evolved`]); the two are required
/// to agree and the test suites hold them to 1e-10.
pub fn qfi_pure(state: &impl GeneratorStats, config: PhaseConfig) -> FisherReport {
    let moments = state.generator_moments(config);
    FisherReport {
        value: 4.0 * moments.variance,
        kind: FisherKind::Qfi,
        phi: None,
        truncation_residual: 0.0,
        config,
    }
}

/// Quantum Fisher information from an evolved state's derivative array,
/// `H = 4 (<d psi|d psi> - |<psi|d psi>|^2)`.
pub fn qfi_from_evolved(evolved: &EvolvedState) -> f64 {
    let mut dd = 0.0;
    let mut sd = Complex64::new(0.0, 0.0);
    for (a, d) in evolved.state.amps().iter().zip(&evolved.derivative) {
        dd += d.norm_sqr();
        sd += a.conj() * d;
    }
    4.0 * (dd - sd.norm_sqr())
}

/// Quantum Fisher information of a block-diagonal sector ensemble:
/// the weighted sum of per-sector pure-state values.
///
/// Within a fixed sector the single-arm and balanced generators differ by
/// a constant (`N/2`), so their variances are identical; both
/// configurations therefore share this code path, which evaluates
/// `4 Var(J_z)` per block, and return bit-identical values. The requested
/// configuration is recorded in the report.
pub fn qfi_ensemble(ensemble: &PhotonSectorEnsemble, config: PhaseConfig) -> FisherReport {
    let value = ensemble
        .blocks()
        .iter()
        .map(|b| b.weight * 4.0 * b.state.generator_moments(PhaseConfig::Balanced).variance)
        .sum();
    FisherReport {
        value,
        kind: FisherKind::Qfi,
        phi: None,
        truncation_residual: ensemble.truncation_residual(),
        config,
    }
}

#[inline]
fn n_alpha_sq(lambda: f64) -> f64 {
    0.5 / (1.0 + (-lambda).exp())
}

/// The reference-beam QFI of the entangled-coherent probe,
/// `4 [N_alpha^2 (|alpha|^4 + |alpha|^2) - (N_alpha^2 |alpha|^2)^2]`.
///
/// This is what a single-arm phase shift can reach when a common phase
/// reference is available; it exceeds [`ec_qfi`] by the photon-number
/// variance of the probe.
pub fn h_joo(alpha: Complex64) -> f64 {
    let lambda = alpha.norm_sqr();
    let na2 = n_alpha_sq(lambda);
    4.0 * (na2 * (lambda * lambda + lambda) - (na2 * lambda).powi(2))
}

/// Closed-form QFI of the phase-averaged entangled-coherent probe,
/// `2 N_alpha^2 (|alpha|^4 + |alpha|^2)`.
///
/// The NOON-sector weights are Poisson, whose second moment is
/// `|alpha|^4 + |alpha|^2`, so the block sum collapses with no truncation
/// at all.
pub fn ec_qfi(alpha: Complex64) -> f64 {
    let lambda = alpha.norm_sqr();
    2.0 * n_alpha_sq(lambda) * (lambda * lambda + lambda)
}

/// Closed-form parity expectation of the entangled-coherent probe,
/// `2 N_alpha^2 [2 |c_0|^2 + sum_{n>=1} |c_n|^2 cos(n phi)]`.
pub fn ec_parity_expectation_series(alpha: Complex64, phi: f64) -> f64 {
    let lambda = alpha.norm_sqr();
    let scale = 2.0 * n_alpha_sq(lambda);
    let mut sum = 2.0 * coherent_weight(lambda, 0);
    let mut n = 1u32;
    loop {
        let w = coherent_weight(lambda, n);
        sum += w * (n as f64 * phi).cos();
        if n as f64 > lambda && w < 1e-22 {
            break;
        }
        n += 1;
    }
    scale * sum
}

/// Closed-form parity CFI of the entangled-coherent probe,
///
/// ```text
/// F = |2 N_a^2 sum |c_n|^2 n sin(n phi)|^2
///     / (1 - (2 N_a^2 [2|c_0|^2 + sum |c_n|^2 cos(n phi)])^2)
/// ```
///
/// evaluated with the complement `1 - <Pi>` summed directly (as
/// `2 N_a^2 sum |c_n|^2 (1 - cos(n phi))`, which is exact because the
/// weights add to one) so the small-phase region does not cancel away; at
/// the `phi -> 0` extreme the analytic limit is [`ec_qfi`].
pub fn ec_parity_cfi_series(alpha: Complex64, phi: f64) -> f64 {
    let lambda = alpha.norm_sqr();
    let scale = 2.0 * n_alpha_sq(lambda);
    let mut numerator_root = 0.0;
    let mut one_minus = 0.0;
    let mut n = 1u32;
    loop {
        let w = coherent_weight(lambda, n);
        let nphi = n as f64 * phi;
        numerator_root += w * n as f64 * nphi.sin();
        one_minus += w * 2.0 * (nphi / 2.0).sin().powi(2); // 1 - cos(n phi)
        if n as f64 > lambda && w < 1e-22 {
            break;
        }
        n += 1;
    }
    let one_minus = scale * one_minus;
    let denominator = one_minus * (2.0 - one_minus);
    if denominator.abs() < PARITY_SINGULARITY {
        return ec_qfi(alpha);
    }
    (scale * numerator_root).powi(2) / denominator
}
