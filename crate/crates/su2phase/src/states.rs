//! Probe states for two-mode interferometry in the Schwinger
//! angular-momentum picture.
//!
//! Two photon modes map onto angular momentum through
//! `J_z = (a†a - b†b)/2`: a Fock state `|n_a, n_b>` is the state
//! `|j, m>` with `j = (n_a + n_b)/2` and `m = (n_a - n_b)/2`, so a fixed
//! total photon number `N` spans the single spin-`j = N/2` representation.
//! Probes with indefinite photon number are handled either as sparse
//! two-mode superpositions ([`TwoModePureState`]) or, after phase
//! averaging, as block-diagonal mixtures over photon-number sectors
//! ([`PhotonSectorEnsemble`]).

use std::collections::BTreeMap;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::halfint::HalfInt;
use crate::wigner::log_factorial;

const NORM_TOL: f64 = 1e-12;

/// A pure state within one fixed-photon-number sector, expanded as
/// `sum_m C_m |j, m>` with amplitudes stored in descending `m` order
/// (`m = j, j-1, ..., -j`).
#[derive(Clone, Debug)]
pub struct SectorState {
    j: HalfInt,
    amps: Vec<Complex64>,
}

impl SectorState {
    /// Builds a sector state from amplitudes in descending-`m` order,
    /// checking the dimension and unit norm (within 1e-12).
    pub fn new(j: HalfInt, amps: Vec<Complex64>) -> Result<Self> {
        if j.twice() < 0 {
            return Err(Error::InvalidQuantumPair { j, m: j });
        }
        let dim = j.twice() as usize + 1;
        if amps.len() != dim {
            return Err(Error::InvalidArgument(format!(
                "expected {dim} amplitudes for j = {j}, got {}",
                amps.len()
            )));
        }
        let norm_sq: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
        if (norm_sq - 1.0).abs() > NORM_TOL {
            return Err(Error::InvalidArgument(format!(
                "state norm^2 = {norm_sq}, expected 1 within {NORM_TOL:e}"
            )));
        }
        Ok(SectorState { j, amps })
    }

    /// The basis state `|j, m>`.
    pub fn basis(j: HalfInt, m: HalfInt) -> Result<Self> {
        HalfInt::require_valid_pair(j, m)?;
        let dim = j.twice() as usize + 1;
        let mut amps = vec![Complex64::new(0.0, 0.0); dim];
        amps[((j.twice() - m.twice()) / 2) as usize] = Complex64::new(1.0, 0.0);
        Ok(SectorState { j, amps })
    }

    /// The two-mode vacuum `|0, 0>` as the trivial `j = 0` sector.
    pub fn vacuum() -> Self {
        SectorState {
            j: HalfInt::ZERO,
            amps: vec![Complex64::new(1.0, 0.0)],
        }
    }

    pub fn j(&self) -> HalfInt {
        self.j
    }

    /// Total photon number `N = 2j` of the sector.
    pub fn n_photons(&self) -> u32 {
        self.j.twice() as u32
    }

    /// Amplitudes in descending-`m` order.
    pub fn amps(&self) -> &[Complex64] {
        &self.amps
    }

    /// Amplitude `C_m`.
    pub fn amp(&self, m: HalfInt) -> Result<Complex64> {
        HalfInt::require_valid_pair(self.j, m)?;
        Ok(self.amps[((self.j.twice() - m.twice()) / 2) as usize])
    }

    /// Magnetic number of the amplitude at `index`.
    #[inline]
    pub fn m_of(&self, index: usize) -> HalfInt {
        HalfInt::from_twice(self.j.twice() - 2 * index as i32)
    }

    /// Photon numbers `(n_a, n_b) = (j + m, j - m)` of the amplitude at
    /// `index`.
    #[inline]
    pub fn fock_of(&self, index: usize) -> (u32, u32) {
        let tj = self.j.twice();
        let tm = tj - 2 * index as i32;
        (((tj + tm) / 2) as u32, ((tj - tm) / 2) as u32)
    }

    pub(crate) fn from_parts_unchecked(j: HalfInt, amps: Vec<Complex64>) -> Self {
        SectorState { j, amps }
    }
}

/// `<J_z> = sum_m m |C_m|^2`; zero for every path-symmetric state
/// (`C_m = C_{-m}`).
pub fn mean_jz(state: &SectorState) -> f64 {
    state
        .amps
        .iter()
        .enumerate()
        .map(|(i, a)| state.m_of(i).value() * a.norm_sqr())
        .sum()
}

/// The NOON state `|N::0> = (|N,0> + |0,N>)/sqrt(2)`, i.e. the spin-`N/2`
/// sector state with `C_j = C_{-j} = 1/sqrt(2)`.
///
/// `N = 0` is rejected; the vacuum block needed by [`ec_ensemble`] is kept
/// as plain `|0,0>` with its own weight bookkeeping.
pub fn noon(n_photons: u32) -> Result<SectorState> {
    if n_photons == 0 {
        return Err(Error::InvalidArgument(
            "a NOON state needs at least one photon".into(),
        ));
    }
    let j = HalfInt::from_twice(n_photons as i32);
    let dim = n_photons as usize + 1;
    let mut amps = vec![Complex64::new(0.0, 0.0); dim];
    let w = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    amps[0] = w;
    amps[dim - 1] = w;
    Ok(SectorState { j, amps })
}

/// A generic two-mode pure state `sum C_{n_a,n_b} |n_a, n_b>`, stored
/// sparsely and keyed by photon numbers.
#[derive(Clone, Debug)]
pub struct TwoModePureState {
    amps: BTreeMap<(u32, u32), Complex64>,
}

impl TwoModePureState {
    /// Builds a normalized two-mode state; zero amplitudes are dropped.
    pub fn new(amps: impl IntoIterator<Item = ((u32, u32), Complex64)>) -> Result<Self> {
        let mut map = BTreeMap::new();
        for (key, amp) in amps {
            if amp != Complex64::new(0.0, 0.0) {
                *map.entry(key).or_insert(Complex64::new(0.0, 0.0)) += amp;
            }
        }
        let norm_sq: f64 = map.values().map(|a| a.norm_sqr()).sum();
        if (norm_sq - 1.0).abs() > NORM_TOL {
            return Err(Error::InvalidArgument(format!(
                "two-mode state norm^2 = {norm_sq}, expected 1 within {NORM_TOL:e}"
            )));
        }
        Ok(TwoModePureState { amps: map })
    }

    pub fn amplitudes(&self) -> impl Iterator<Item = (&(u32, u32), &Complex64)> {
        self.amps.iter()
    }

    pub fn amp(&self, n_a: u32, n_b: u32) -> Complex64 {
        self.amps
            .get(&(n_a, n_b))
            .copied()
            .unwrap_or(Complex64::new(0.0, 0.0))
    }
}

/// One block of a photon-sector mixture.
#[derive(Clone, Debug)]
pub struct SectorBlock {
    pub n_photons: u32,
    pub weight: f64,
    pub state: SectorState,
}

/// A block-diagonal mixture over photon-number sectors,
/// `rho = (+)_N p_N |psi_N><psi_N|`, plus the probability mass excluded by
/// truncation.
///
/// Truncated mass is never silently renormalized: it is carried in
/// `truncation_residual` so downstream Fisher-information reports can bound
/// the truncation error explicitly.
#[derive(Clone, Debug)]
pub struct PhotonSectorEnsemble {
    blocks: Vec<SectorBlock>,
    truncation_residual: f64,
}

impl PhotonSectorEnsemble {
    /// Builds an ensemble from `(N, p_N, state)` blocks; weights plus the
    /// residual must reach 1 within 1e-12.
    pub fn new(blocks: Vec<SectorBlock>, truncation_residual: f64) -> Result<Self> {
        let mut total = truncation_residual;
        for block in &blocks {
            if block.weight < 0.0 {
                return Err(Error::InvalidArgument(format!(
                    "negative weight {} at N = {}",
                    block.weight, block.n_photons
                )));
            }
            if block.state.n_photons() != block.n_photons {
                return Err(Error::InvalidArgument(format!(
                    "block at N = {} holds a j = {} state",
                    block.n_photons,
                    block.state.j()
                )));
            }
            total += block.weight;
        }
        if (total - 1.0).abs() > NORM_TOL {
            return Err(Error::InvalidArgument(format!(
                "ensemble weights sum to {total}, expected 1 within {NORM_TOL:e}"
            )));
        }
        Ok(PhotonSectorEnsemble {
            blocks,
            truncation_residual,
        })
    }

    /// A single sector with unit weight.
    pub fn pure(state: SectorState) -> Self {
        PhotonSectorEnsemble {
            blocks: vec![SectorBlock {
                n_photons: state.n_photons(),
                weight: 1.0,
                state,
            }],
            truncation_residual: 0.0,
        }
    }

    pub fn blocks(&self) -> &[SectorBlock] {
        &self.blocks
    }

    pub fn truncation_residual(&self) -> f64 {
        self.truncation_residual
    }

    /// Largest photon number retained.
    pub fn max_photons(&self) -> u32 {
        self.blocks.iter().map(|b| b.n_photons).max().unwrap_or(0)
    }
}

/// Poisson-like weight `|c_n|^2 = exp(-|alpha|^2) |alpha|^(2n) / n!` of the
/// coherent-state expansion.
pub(crate) fn coherent_weight(lambda: f64, n: u32) -> f64 {
    if lambda == 0.0 {
        return if n == 0 { 1.0 } else { 0.0 };
    }
    (-lambda + n as f64 * lambda.ln() - log_factorial(n as u64)).exp()
}

/// Tail mass `scale * sum_{k > n} |c_k|^2`, summed forward until the terms
/// stop mattering. Accurate to a relative ~1e-16, which is what lets very
/// small `tail_tol` values be resolved at all.
fn coherent_tail(lambda: f64, n: u32, scale: f64) -> f64 {
    let mut total = 0.0;
    let mut k = n + 1;
    loop {
        let w = coherent_weight(lambda, k);
        total += w;
        // Beyond the Poisson peak the terms decay at least geometrically.
        if k as f64 > lambda && w < total * 1e-18 + f64::MIN_POSITIVE {
            break;
        }
        k += 1;
        if k > n + 10_000 {
            break;
        }
    }
    scale * total
}

/// The entangled-coherent probe after phase averaging: a statistical
/// ensemble of NOON states,
///
/// ```text
/// rho_EC = 2 N_alpha^2 (+)_n |c_n|^2 |n::0><n::0|,
/// N_alpha^2 = 1 / (2 (1 + exp(-|alpha|^2))),
/// c_n = exp(-|alpha|^2/2) alpha^n / sqrt(n!),
/// ```
///
/// stored with `p_0 = 4 N_alpha^2 |c_0|^2` on a normalized vacuum block
/// (the doubled vacuum weight keeps every stored state normalized while
/// reproducing the unnormalized `N = 0` bookkeeping of the ensemble form
/// term by term) and `p_n = 2 N_alpha^2 |c_n|^2` on `noon(n)` blocks for
/// `n >= 1`. Blocks are kept until the excluded mass drops below
/// `tail_tol`; the leftover goes into the truncation residual.
pub fn ec_ensemble(alpha: Complex64, tail_tol: f64) -> Result<PhotonSectorEnsemble> {
    if !(tail_tol > 0.0 && tail_tol <= 1e-6) {
        return Err(Error::InvalidArgument(format!(
            "tail_tol = {tail_tol:e} outside (0, 1e-6]"
        )));
    }
    let lambda = alpha.norm_sqr();
    let scale = 1.0 / (1.0 + (-lambda).exp()); // 2 N_alpha^2

    let mut blocks = vec![SectorBlock {
        n_photons: 0,
        weight: 2.0 * scale * coherent_weight(lambda, 0),
        state: SectorState::vacuum(),
    }];
    let mut n_max = 0u32;
    while coherent_tail(lambda, n_max, scale) >= tail_tol {
        n_max += 1;
        blocks.push(SectorBlock {
            n_photons: n_max,
            weight: scale * coherent_weight(lambda, n_max),
            state: noon(n_max)?,
        });
    }
    let residual = coherent_tail(lambda, n_max, scale);
    PhotonSectorEnsemble::new(blocks, residual)
}

/// The entangled-coherent state itself,
/// `N_alpha (|alpha>|0> + |0>|alpha>)`, as a sparse two-mode pure state,
/// truncated once the excluded probability drops below `tail_tol` and
/// renormalized (a pure state carries no residual field, so the lost mass
/// is spread back over the kept amplitudes; it is below `tail_tol` by
/// construction).
pub fn ec_pure_state(alpha: Complex64, tail_tol: f64) -> Result<TwoModePureState> {
    if !(tail_tol > 0.0 && tail_tol <= 1e-6) {
        return Err(Error::InvalidArgument(format!(
            "tail_tol = {tail_tol:e} outside (0, 1e-6]"
        )));
    }
    let lambda = alpha.norm_sqr();
    let n_alpha = (0.5 / (1.0 + (-lambda).exp())).sqrt();
    let mut amps: Vec<((u32, u32), Complex64)> = Vec::new();

    // c_n with the phase of alpha carried along.
    let mut c_n = Complex64::new((-lambda / 2.0).exp(), 0.0);
    amps.push(((0, 0), 2.0 * n_alpha * c_n));
    let mut n = 0u32;
    while coherent_tail(lambda, n, 2.0 * n_alpha * n_alpha) >= tail_tol {
        n += 1;
        c_n *= alpha / Complex64::new((n as f64).sqrt(), 0.0);
        amps.push(((n, 0), n_alpha * c_n));
        amps.push(((0, n), n_alpha * c_n));
    }
    let norm: f64 = amps.iter().map(|(_, a)| a.norm_sqr()).sum::<f64>().sqrt();
    TwoModePureState::new(amps.into_iter().map(|(k, a)| (k, a / norm)))
}

/// Removes coherence between photon-number sectors:
/// `p_N = sum_n |C_{n,N-n}|^2` with block states
/// `|psi_N> = p_N^{-1/2} sum_n C_{n,N-n} |n, N-n>`.
///
/// Blocks with `p_N < 1e-15` are omitted and their mass accumulated into
/// the truncation residual.
pub fn phase_average(psi: &TwoModePureState) -> Result<PhotonSectorEnsemble> {
    const BLOCK_FLOOR: f64 = 1e-15;
    let mut by_sector: BTreeMap<u32, BTreeMap<(u32, u32), Complex64>> = BTreeMap::new();
    for (&(n_a, n_b), &amp) in psi.amplitudes() {
        by_sector
            .entry(n_a + n_b)
            .or_default()
            .insert((n_a, n_b), amp);
    }

    let mut blocks = Vec::new();
    let mut residual = 0.0;
    for (n, amps) in by_sector {
        let p: f64 = amps.values().map(|a| a.norm_sqr()).sum();
        if p < BLOCK_FLOOR {
            residual += p;
            continue;
        }
        let j = HalfInt::from_twice(n as i32);
        let dim = n as usize + 1;
        let mut sector = vec![Complex64::new(0.0, 0.0); dim];
        let scale = 1.0 / p.sqrt();
        for ((n_a, _), amp) in amps {
            // m = (n_a - n_b)/2, index = j - m = n_b = n - n_a.
            sector[(n - n_a) as usize] = amp * scale;
        }
        blocks.push(SectorBlock {
            n_photons: n,
            weight: p,
            state: SectorState::from_parts_unchecked(j, sector),
        });
    }
    // The input was normalized, so any shortfall is truncation, not error.
    let total: f64 = blocks.iter().map(|b| b.weight).sum();
    residual += (1.0 - total - residual).max(0.0);
    PhotonSectorEnsemble::new(blocks, residual)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn noon_amplitudes() {
        let s = noon(1).unwrap();
        assert_eq!(s.j(), HalfInt::from_twice(1));
        let r = std::f64::consts::FRAC_1_SQRT_2;
        assert!((s.amps()[0] - c(r)).norm() < 1e-15);
        assert!((s.amps()[1] - c(r)).norm() < 1e-15);

        let s = noon(2).unwrap();
        assert_eq!(s.amps().len(), 3);
        assert_eq!(s.amps()[1], c(0.0));
        assert!((s.amps()[0] - c(r)).norm() < 1e-15);

        assert!(noon(0).is_err());
    }

    #[test]
    fn noon_is_path_symmetric_with_zero_jz() {
        for n in 1..=30 {
            let s = noon(n).unwrap();
            let dim = s.amps().len();
            for i in 0..dim {
                assert!((s.amps()[i] - s.amps()[dim - 1 - i]).norm() < 1e-15);
            }
            assert!(mean_jz(&s).abs() < 1e-14);
        }
    }

    #[test]
    fn mean_jz_eigenstate() {
        let j = HalfInt::from_twice(5);
        let s = SectorState::basis(j, j).unwrap();
        assert_eq!(mean_jz(&s), 2.5);
    }

    #[test]
    fn fock_round_trip() {
        for n_a in 0..=100u32 {
            for n_b in 0..=100u32 {
                let tj = (n_a + n_b) as i32;
                let tm = n_a as i32 - n_b as i32;
                let j = HalfInt::from_twice(tj);
                let m = HalfInt::from_twice(tm);
                assert!(HalfInt::is_valid_pair(j, m));
                let back_a = (j.twice() + m.twice()) / 2;
                let back_b = (j.twice() - m.twice()) / 2;
                assert_eq!((back_a as u32, back_b as u32), (n_a, n_b));
            }
        }
    }

    #[test]
    fn ec_ensemble_normalization_and_ratio_law() {
        let alpha = c(5.0f64.sqrt());
        let ens = ec_ensemble(alpha, 1e-12).unwrap();
        let total: f64 =
            ens.blocks().iter().map(|b| b.weight).sum::<f64>() + ens.truncation_residual();
        assert!((total - 1.0).abs() < 1e-12);

        // p_n / p_n' = |c_n|^2 / |c_n'|^2 for n, n' >= 1.
        let lambda = 5.0;
        let b = ens.blocks();
        for w in b.windows(2).skip(1) {
            let ratio = w[1].weight / w[0].weight;
            let expected = lambda / w[1].n_photons as f64;
            assert!(
                (ratio - expected).abs() < 1e-12 * expected,
                "N = {}",
                w[1].n_photons
            );
        }
    }

    #[test]
    fn ec_ensemble_vacuum_limit() {
        let ens = ec_ensemble(c(0.0), 1e-9).unwrap();
        assert_eq!(ens.blocks().len(), 1);
        assert_eq!(ens.blocks()[0].n_photons, 0);
        assert!((ens.blocks()[0].weight - 1.0).abs() < 1e-15);
    }

    #[test]
    fn ec_ensemble_truncation_matches_tail_oracle() {
        let alpha = c(5.0f64.sqrt());
        let tol = 1e-12;
        let ens = ec_ensemble(alpha, tol).unwrap();
        let n_max = ens.max_photons();
        assert!(ens.truncation_residual() < tol);
        // Independent check: the tail just above the cut is >= tol, so the
        // cut is minimal.
        let scale = 1.0 / (1.0 + (-5.0f64).exp());
        assert!(coherent_tail(5.0, n_max - 1, scale) >= tol);
        // Poisson(5) decays fast: the 1e-12 cut lands in the twenties.
        assert!((20..=40).contains(&n_max), "n_max = {n_max}");
    }

    #[test]
    fn ec_ensemble_rejects_bad_tail_tol() {
        assert!(ec_ensemble(c(1.0), 0.0).is_err());
        assert!(ec_ensemble(c(1.0), 1e-3).is_err());
    }

    #[test]
    fn phase_average_single_sector_is_identity() {
        let psi = TwoModePureState::new([((1, 0), c(1.0))]).unwrap();
        let ens = phase_average(&psi).unwrap();
        assert_eq!(ens.blocks().len(), 1);
        let block = &ens.blocks()[0];
        assert_eq!(block.n_photons, 1);
        assert!((block.weight - 1.0).abs() < 1e-15);
        assert!((block.state.amp(HalfInt::from_twice(1)).unwrap() - c(1.0)).norm() < 1e-15);
    }

    #[test]
    fn phase_average_fixed_n_superposition() {
        let h = 0.5;
        let psi = TwoModePureState::new([
            ((2, 0), c(h)),
            ((0, 2), c(h)),
            ((1, 1), c(std::f64::consts::FRAC_1_SQRT_2)),
        ])
        .unwrap();
        let ens = phase_average(&psi).unwrap();
        assert_eq!(ens.blocks().len(), 1);
        let block = &ens.blocks()[0];
        assert_eq!(block.n_photons, 2);
        assert!((block.weight - 1.0).abs() < 1e-14);
        for (idx, expected) in [(0, h), (1, std::f64::consts::FRAC_1_SQRT_2), (2, h)] {
            assert!((block.state.amps()[idx] - c(expected)).norm() < 1e-14);
        }
    }

    #[test]
    fn ec_pure_state_is_normalized_even_with_loose_tails() {
        for tol in [1e-6, 1e-9, 1e-15] {
            let psi = ec_pure_state(c(2.0), tol).unwrap();
            let norm: f64 = psi.amplitudes().map(|(_, a)| a.norm_sqr()).sum();
            assert!((norm - 1.0).abs() < 1e-14, "tol={tol:e}: {norm}");
        }
    }

    #[test]
    fn phase_average_of_ec_pure_matches_ec_ensemble() {
        let alpha = c(5.0f64.sqrt());
        let psi = ec_pure_state(alpha, 1e-12).unwrap();
        let from_pure = phase_average(&psi).unwrap();
        let direct = ec_ensemble(alpha, 1e-12).unwrap();
        for block in direct.blocks() {
            let twin = from_pure
                .blocks()
                .iter()
                .find(|b| b.n_photons == block.n_photons);
            match twin {
                Some(twin) => {
                    assert!(
                        (twin.weight - block.weight).abs() < 1e-12,
                        "weight mismatch at N = {}",
                        block.n_photons
                    );
                    for (a, b) in twin.state.amps().iter().zip(block.state.amps()) {
                        assert!((a - b).norm() < 1e-12);
                    }
                }
                None => assert!(block.weight < 1e-12),
            }
        }
    }

    #[test]
    fn ec_blocks_are_path_symmetric() {
        let ens = ec_ensemble(c(1.3), 1e-10).unwrap();
        for block in ens.blocks() {
            let amps = block.state.amps();
            let dim = amps.len();
            for i in 0..dim {
                assert!((amps[i] - amps[dim - 1 - i]).norm() < 1e-15);
            }
            assert!(mean_jz(&block.state).abs() < 1e-14);
        }
    }
}
