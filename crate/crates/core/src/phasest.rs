//! Phase estimation of the magnetic quantum number from a lattice state.
//!
//! The estimated unitary is `U = Rz(−2π/2^t)`, under which a lattice
//! `Y_{ℓm}` picks up `e^{+2πim/2^t}`, so the ideal outcome is `m mod 2^t`.
//! Measurement is never sampled: the full outcome distribution is computed.

use rayon::prelude::*;
use std::f64::consts::TAU;

use crate::error::{Error, Result};
use crate::lattice::{Axis, Grid3, LatticeState, SpectralFrame};
use crate::linalg::{self, CMatrix, C64};
use crate::shear::{self, LatticePermutation};
use crate::stateprep::TaggedState;

/// Largest supported ancilla count.
pub const MAX_BITS: u32 = 12;

/// Leakage above this makes the estimate unusable.
pub const LEAKAGE_LIMIT: f64 = 0.5;

/// Lattice rotation about z by `phi` (any value, reduced mod 2π).
pub fn lattice_z_rotation(grid: Grid3, phi: f64) -> LatticePermutation {
    shear::rotation_3d(grid, Axis::Z, shear::wrap_angle(phi)).expect("reduced angles are always in shear range")
}

/// How z-rotations act on the lattice.
#[derive(Debug, Clone)]
pub enum RotationBackend {
    /// Diagonal action on a frame of `Y_{ℓm}` vectors, exact on the frame.
    Exact(SpectralFrame),
    /// Three-shear lattice permutation.
    Shear,
}

impl RotationBackend {
    pub fn name(&self) -> &'static str {
        match self {
            Self::Exact(_) => "exact",
            Self::Shear => "shear",
        }
    }
}

enum ZOp<'a> {
    Perm(LatticePermutation),
    Frame(&'a SpectralFrame, CMatrix),
}

impl ZOp<'_> {
    fn new(backend: &RotationBackend, grid: Grid3, phi: f64) -> Result<ZOp<'_>> {
        Ok(match backend {
            RotationBackend::Shear => ZOp::Perm(lattice_z_rotation(grid, phi)),
            RotationBackend::Exact(frame) => {
                frame.grid().check_same(&grid)?;
                let l = frame.ell() as i32;
                let diag = (-l..=l).map(|m| C64::from_polar(1.0, -(m as f64) * phi));
                ZOp::Frame(frame, CMatrix::from_diagonal(&nalgebra::DVector::from_iterator((2 * l + 1) as usize, diag)))
            }
        })
    }

    fn apply(&self, amps: &[C64]) -> Vec<C64> {
        match self {
            ZOp::Perm(p) => p.apply_to(amps),
            ZOp::Frame(f, mat) => f.apply(amps, mat),
        }
    }
}

/// Per-bit stages of `U^{±j}` by angle doubling: stage `b` rotates by
/// `∓2^b·2π/2^t` directly.
fn stages(backend: &RotationBackend, grid: Grid3, t: u32, inverse: bool) -> Result<Vec<ZOp<'_>>> {
    let step = TAU / (1u64 << t) as f64;
    let sign = if inverse { 1.0 } else { -1.0 };
    (0..t).map(|b| ZOp::new(backend, grid, sign * (1u64 << b) as f64 * step)).collect()
}

/// `U^j ψ` for `j = 0..2^t`.
fn forward_powers(amps: &[C64], stages: &[ZOp<'_>]) -> Vec<Vec<C64>> {
    let mut powers = vec![amps.to_vec()];
    for op in stages {
        let next: Vec<Vec<C64>> = powers.par_iter().map(|p| op.apply(p)).collect();
        powers.extend(next);
    }
    powers
}

/// `φ_k = 2^{−t} Σ_j e^{−2πijk/2^t} U^j ψ`, the lattice state paired with
/// ancilla outcome `k` after the inverse Fourier transform.
fn qpe_components(powers: &[Vec<C64>]) -> Vec<Vec<C64>> {
    let big_n = powers.len();
    let len = powers[0].len();
    let scale = 1.0 / big_n as f64;
    (0..big_n)
        .into_par_iter()
        .map(|k| {
            let tw: Vec<C64> =
                (0..big_n).map(|j| C64::from_polar(scale, -TAU * ((j * k) % big_n) as f64 / big_n as f64)).collect();
            (0..len).map(|s| powers.iter().zip(&tw).map(|(p, w)| p[s] * w).sum()).collect()
        })
        .collect()
}

/// Smallest ancilla count whose centered window holds `−ℓ..=ℓ` with room to spare.
pub fn min_bits(ell: u32) -> u32 {
    let need = 2 * ell as u64 + 2;
    64 - (need - 1).leading_zeros()
}

/// Centered decoding: outcomes `≥ 2^{t−1}` are negative.
pub fn decode_outcome(k: usize, t: u32) -> i32 {
    let big_n = 1i64 << t;
    let k = k as i64;
    (if k >= big_n / 2 { k - big_n } else { k }) as i32
}

/// Outcome index holding `m`.
pub fn encode_outcome(m: i32, t: u32) -> usize {
    (m as i64).rem_euclid(1i64 << t) as usize
}

fn check_bits(ell: u32, t: u32) -> Result<()> {
    let need = min_bits(ell);
    if t < need {
        return Err(Error::Precision(format!("t = {t} bits cannot resolve ell = {ell}, need at least {need}")));
    }
    if t > MAX_BITS {
        return Err(Error::Domain(format!("t = {t} exceeds the supported maximum {MAX_BITS}")));
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq)]
pub struct PhaseEstimate {
    pub t: u32,
    pub distribution: Vec<f64>,
    pub m: i32,
    pub confidence: f64,
}

impl PhaseEstimate {
    pub fn probability_of(&self, m: i32) -> f64 {
        self.distribution[encode_outcome(m, self.t)]
    }
}

/// Lattice branch paired with each ancilla outcome `k = 0..2^t` after
/// phase estimation (unnormalized).
pub fn phase_branches(state: &LatticeState, ell: u32, t: u32, backend: &RotationBackend) -> Result<Vec<Vec<C64>>> {
    check_bits(ell, t)?;
    let ops = stages(backend, state.grid(), t, false)?;
    Ok(qpe_components(&forward_powers(state.amps(), &ops)))
}

/// Simulates textbook phase estimation with `t` ancillas on `state`.
pub fn estimate_m(state: &LatticeState, ell: u32, t: u32, backend: &RotationBackend) -> Result<PhaseEstimate> {
    let comps = phase_branches(state, ell, t, backend)?;
    let raw: Vec<f64> = comps.iter().map(|c| linalg::norm_sqr(c)).collect();
    let total = linalg::compensated_sum(raw.iter().copied());
    if !(total > 0.0) {
        return Err(Error::Domain("cannot estimate the phase of a zero state".into()));
    }
    let distribution: Vec<f64> = raw.iter().map(|p| p / total).collect();
    let (best, &confidence) = distribution
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .expect("at least two outcomes");
    Ok(PhaseEstimate { t, distribution, m: decode_outcome(best, t), confidence })
}

/// Result of removing the `m` tag.
#[derive(Debug, Clone)]
pub struct Uncomputed {
    /// Renormalized lattice state.
    pub state: LatticeState,
    /// Mass left with a nonzero tag or nonzero ancilla.
    pub leakage: f64,
    /// Norm before renormalization.
    pub norm: f64,
}

/// In-place Walsh–Hadamard transform across a list of vectors.
fn walsh_hadamard(vs: &mut [Vec<C64>]) {
    let big_n = vs.len();
    let scale = std::f64::consts::FRAC_1_SQRT_2;
    let mut h = 1;
    while h < big_n {
        for i in (0..big_n).step_by(2 * h) {
            for j in i..i + h {
                let (lo, hi) = vs.split_at_mut(j + h);
                lo[j].par_iter_mut().zip(hi[0].par_iter_mut()).for_each(|(a, b)| {
                    let (x, y) = (*a, *b);
                    *a = (x + y) * scale;
                    *b = (x - y) * scale;
                });
            }
        }
        h *= 2;
    }
}

/// Removes the `m` tag from `Σ_m c_m |m⟩|Y_{ℓm}⟩`.
///
/// Phase estimation runs on each tag block, the decoded estimate is
/// subtracted from the tag, and only the tag-zero branch is kept. The
/// ancilla is then returned to `|0⟩` by inverse phase estimation. Both the
/// tag-nonzero mass and the ancilla-nonzero mass count as leakage.
pub fn uncompute_m(tagged: &TaggedState, t: u32, backend: &RotationBackend) -> Result<Uncomputed> {
    let ell = tagged.ell();
    check_bits(ell, t)?;
    let grid = tagged.grid();
    let big_n = 1usize << t;
    let forward = stages(backend, grid, t, false)?;

    let mut chi: Vec<(usize, Vec<C64>)> = Vec::new();
    let mut tag_leak = Vec::new();
    for (m, block) in (-(ell as i32)..=ell as i32).zip(tagged.blocks()) {
        if linalg::norm_sqr(block) == 0.0 {
            continue;
        }
        let mut comps = qpe_components(&forward_powers(block, &forward));
        let keep = encode_outcome(m, t);
        tag_leak.extend(comps.iter().enumerate().filter(|(k, _)| *k != keep).map(|(_, c)| linalg::norm_sqr(c)));
        chi.push((keep, std::mem::take(&mut comps[keep])));
    }

    let inverse = stages(backend, grid, t, true)?;
    let mut xi: Vec<Vec<C64>> = (0..big_n)
        .into_par_iter()
        .map(|j| {
            let mut y = vec![C64::from(0.0); grid.len()];
            for (k, c) in &chi {
                let w = C64::from_polar(1.0 / (big_n as f64).sqrt(), TAU * ((j * k) % big_n) as f64 / big_n as f64);
                y.iter_mut().zip(c).for_each(|(a, b)| *a += b * w);
            }
            for (b, op) in inverse.iter().enumerate() {
                if j >> b & 1 == 1 {
                    y = op.apply(&y);
                }
            }
            y
        })
        .collect();
    walsh_hadamard(&mut xi);
    let anc_leak = xi[1..].iter().map(|v| linalg::norm_sqr(v));
    let leakage = linalg::compensated_sum(tag_leak.into_iter().chain(anc_leak));

    let out = std::mem::take(&mut xi[0]);
    let norm = linalg::norm_sqr(&out).sqrt();
    if leakage > LEAKAGE_LIMIT || norm == 0.0 {
        return Err(Error::Leakage(leakage));
    }
    let state = LatticeState::normalized(grid, out)?.with_ell(Some(ell));
    Ok(Uncomputed { state, leakage, norm })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{sample_ylm_state, ShellSpec};
    use crate::specfun::CompactState;
    use crate::stateprep::PreparedFamily;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_8};

    fn setup(n: usize) -> (Grid3, ShellSpec) {
        let grid = Grid3::new(n).unwrap();
        (grid, ShellSpec::default_for(&grid))
    }

    #[test]
    fn bits_and_decoding() {
        assert_eq!(min_bits(0), 1);
        assert_eq!(min_bits(1), 2);
        assert_eq!(min_bits(3), 3);
        assert_eq!(min_bits(4), 4);
        assert_eq!(min_bits(6), 4);
        assert_eq!(min_bits(7), 4);
        assert_eq!(min_bits(8), 5);
        for t in 1..6 {
            let half = 1i32 << (t - 1);
            for m in -half..half {
                assert_eq!(decode_outcome(encode_outcome(m, t), t), m);
            }
        }
    }

    #[test]
    fn z_rotation_special_angles() {
        let grid = Grid3::new(16).unwrap();
        assert!(lattice_z_rotation(grid, 0.0).is_identity());
        assert!(lattice_z_rotation(grid, TAU).is_identity());
        let q = lattice_z_rotation(grid, FRAC_PI_2);
        assert_eq!(q, shear::rotation_90(grid, Axis::Z, 1));
        assert_eq!(lattice_z_rotation(grid, FRAC_PI_2 + 3.0 * TAU), q);
    }

    #[test]
    fn z_rotation_phases_sampled_harmonics() {
        let (grid, shell) = setup(64);
        let perm = lattice_z_rotation(grid, FRAC_PI_8);
        for ell in 0..=4u32 {
            for m in -(ell as i32)..=ell as i32 {
                let s = sample_ylm_state(ell, m, grid, shell).unwrap();
                let rotated = perm.apply_to(s.amps());
                let phase = C64::from_polar(1.0, -(m as f64) * FRAC_PI_8);
                let target: Vec<C64> = s.amps().iter().map(|a| a * phase).collect();
                let ov = linalg::inner(&target, &rotated);
                // Calibrated worst case over this scan is 0.918; the loss is
                // sites rounded across the edges of the 3-unit shell.
                assert!(ov.re >= 0.91, "ell={ell} m={m} overlap={ov}");
                assert!(ov.im.abs() < 0.01);
            }
        }
    }

    #[test]
    fn exact_backend_is_deterministic() {
        let (grid, shell) = setup(32);
        let backend = RotationBackend::Exact(SpectralFrame::raw_samples(4, grid, shell).unwrap());
        for m in [3, -2, 0, -4, 4] {
            let s = sample_ylm_state(4, m, grid, shell).unwrap();
            let est = estimate_m(&s, 4, 4, &backend).unwrap();
            assert_eq!(est.m, m);
            assert!((est.confidence - 1.0).abs() < 1e-12);
            assert!((est.distribution.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn too_few_bits_is_a_precision_error() {
        let (grid, shell) = setup(32);
        let s = sample_ylm_state(2, 1, grid, shell).unwrap();
        assert!(matches!(estimate_m(&s, 2, 2, &RotationBackend::Shear), Err(Error::Precision(_))));
    }

    #[test]
    fn distribution_ignores_global_phase() {
        let (grid, shell) = setup(32);
        let s = sample_ylm_state(2, 1, grid, shell).unwrap();
        let rotated: Vec<C64> = s.amps().iter().map(|a| a * C64::from_polar(1.0, 0.7)).collect();
        let r = LatticeState::new(grid, rotated).unwrap();
        let a = estimate_m(&s, 2, 3, &RotationBackend::Shear).unwrap();
        let b = estimate_m(&r, 2, 3, &RotationBackend::Shear).unwrap();
        for (x, y) in a.distribution.iter().zip(&b.distribution) {
            assert!((x - y).abs() < 1e-12);
        }
    }

    #[test]
    fn shear_backend_finds_m() {
        let (grid, shell) = setup(64);
        let s = sample_ylm_state(3, 1, grid, shell).unwrap();
        let est = estimate_m(&s, 3, 3, &RotationBackend::Shear).unwrap();
        assert_eq!(est.m, 1);
        assert!(est.probability_of(1) >= 0.9, "{}", est.probability_of(1));
    }

    #[test]
    fn uncompute_exact_superposition() {
        let (grid, shell) = setup(32);
        let ell = 2;
        let frame = SpectralFrame::raw_samples(ell, grid, shell).unwrap();
        let fam = PreparedFamily::new(ell, grid, shell).unwrap();
        let backend = RotationBackend::Exact(frame.clone());
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let c = CompactState::random(ell, &mut rng);
        let out = uncompute_m(&fam.tag(&c).unwrap(), 3, &backend).unwrap();
        assert!(out.leakage <= 1e-10, "{}", out.leakage);

        let mut target = vec![C64::from(0.0); grid.len()];
        for m in -2..=2 {
            let v = fam.state(m);
            target.iter_mut().zip(v.amps()).for_each(|(a, b)| *a += b * c.amp(m));
        }
        let target = LatticeState::normalized(grid, target).unwrap();
        assert!(out.state.fidelity(&target).unwrap() >= 1.0 - 1e-9);
    }

    #[test]
    fn uncompute_shear_has_small_leakage() {
        let (grid, shell) = setup(64);
        let fam = PreparedFamily::new(2, grid, shell).unwrap();
        let c = CompactState::basis(2, 1).unwrap();
        let out = uncompute_m(&fam.tag(&c).unwrap(), 3, &RotationBackend::Shear).unwrap();
        assert!(out.leakage <= 0.1, "{}", out.leakage);
        assert!(out.norm <= 1.0 + 1e-12);
    }
}
