//! Amplitude encoding by a cascade of conditional rotations.
//!
//! Qubits are processed from the most significant down. Qubit `i` is rotated
//! by an angle that depends on the values of all higher qubits (its prefix);
//! the angle is fixed by the ratio of the probability of the prefix's lower
//! half-interval to that of the whole prefix interval. With exact interval
//! sums the cascade reproduces `√density` exactly.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::lattice::{Grid3, LatticeState, ShellSites, ShellSpec};
use crate::linalg::{self, C64};
use crate::specfun::CompactState;

/// Source of dyadic-interval probability sums.
///
/// `interval_sum(level, k)` is the probability of `x ∈ [k·2^level, (k+1)·2^level)`.
/// The exact implementation is [`TargetDensity`]; an approximate evaluator
/// (e.g. quadrature of a smooth density) can stand in for it.
pub trait IntervalSums {
    fn n_qubits(&self) -> u32;
    fn interval_sum(&self, level: u32, index: usize) -> Result<f64>;
}

/// Probability distribution over `2^n` basis states.
#[derive(Debug, Clone, PartialEq)]
pub struct TargetDensity {
    n_qubits: u32,
    /// `tree[level][k]`: level 0 holds the density itself, each level above
    /// holds pairwise sums of the one below.
    tree: Vec<Vec<f64>>,
}

impl TargetDensity {
    pub fn new(probs: Vec<f64>) -> Result<Self> {
        let len = probs.len();
        if len == 0 || !len.is_power_of_two() {
            return Err(Error::InvalidDensity(format!("length {len} is not a power of two")));
        }
        if probs.iter().any(|p| !p.is_finite() || *p < 0.0) {
            return Err(Error::InvalidDensity("entries must be finite and non-negative".into()));
        }
        let total = linalg::compensated_sum(probs.iter().copied());
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidDensity(format!("sums to {total}, expected 1")));
        }
        let n_qubits = len.trailing_zeros();
        let mut tree = vec![probs];
        while tree.last().unwrap().len() > 1 {
            let below = tree.last().unwrap();
            tree.push(below.chunks_exact(2).map(|p| p[0] + p[1]).collect());
        }
        Ok(Self { n_qubits, tree })
    }

    /// Normalizes non-negative weights into a density.
    pub fn from_weights(weights: Vec<f64>) -> Result<Self> {
        let total = linalg::compensated_sum(weights.iter().copied());
        if !(total > 0.0 && total.is_finite()) {
            return Err(Error::InvalidDensity("weights must have a positive finite sum".into()));
        }
        Self::new(weights.into_iter().map(|w| w / total).collect())
    }

    pub fn probs(&self) -> &[f64] {
        &self.tree[0]
    }
}

impl IntervalSums for TargetDensity {
    fn n_qubits(&self) -> u32 {
        self.n_qubits
    }

    fn interval_sum(&self, level: u32, index: usize) -> Result<f64> {
        let row = self
            .tree
            .get(level as usize)
            .ok_or_else(|| Error::Domain(format!("level {level} exceeds {}", self.n_qubits)))?;
        row.get(index)
            .copied()
            .ok_or_else(|| Error::Domain(format!("interval index {index} out of range at level {level}")))
    }
}

/// Conditional rotation angles; `angles[i][prefix]` for qubit `i` counted
/// from the most significant.
#[derive(Debug, Clone, PartialEq)]
pub struct PrepPlan {
    pub n_qubits: u32,
    pub angles: Vec<Vec<f64>>,
}

/// Angle for a prefix is `arccos √(P(prefix, next bit 0) / P(prefix))`;
/// zero-probability prefixes get angle 0.
pub fn build_prep_plan<S: IntervalSums + ?Sized>(sums: &S) -> Result<PrepPlan> {
    let n = sums.n_qubits();
    let angles = (0..n)
        .map(|i| {
            let level = n - i;
            (0..1usize << i)
                .map(|prefix| {
                    let parent = sums.interval_sum(level, prefix)?;
                    if parent <= 0.0 {
                        return Ok(0.0);
                    }
                    let lower = sums.interval_sum(level - 1, 2 * prefix)?;
                    Ok((lower / parent).clamp(0.0, 1.0).sqrt().acos())
                })
                .collect::<Result<Vec<f64>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(PrepPlan { n_qubits: n, angles })
}

/// Runs the cascade on `|0…0⟩`, applying for each qubit the rotation
/// `|0⟩ → cos θ|0⟩ + sin θ|1⟩` selected by the higher bits.
pub fn apply_prep(plan: &PrepPlan) -> Vec<C64> {
    let n = plan.n_qubits as usize;
    let mut amps = vec![0.0f64; 1 << n];
    amps[0] = 1.0;
    for (i, table) in plan.angles.iter().enumerate() {
        let bit = 1usize << (n - 1 - i);
        for x in 0..amps.len() {
            if x & bit != 0 {
                continue;
            }
            let prefix = x >> (n - i);
            let (s, c) = table[prefix].sin_cos();
            let (a0, a1) = (amps[x], amps[x | bit]);
            amps[x] = c * a0 - s * a1;
            amps[x | bit] = s * a0 + c * a1;
        }
    }
    amps.into_iter().map(C64::from).collect()
}

/// `amps[x] ← e^{iφ(x)}·amps[x]`.
pub fn rephase(state: &[C64], phase_fn: impl Fn(usize) -> f64) -> Vec<C64> {
    state.iter().enumerate().map(|(x, a)| a * C64::from_polar(1.0, phase_fn(x))).collect()
}

/// Shell site values of `Y_{ℓm}` keyed for prep, plus the polar data.
struct ShellDensity {
    sites: ShellSites,
    values: Vec<C64>,
}

impl ShellDensity {
    fn new(ell: u32, m: i32, grid: Grid3, shell: ShellSpec) -> Result<Self> {
        if m.unsigned_abs() > ell {
            return Err(Error::Domain(format!("|m| = {} exceeds ell = {ell}", m.abs())));
        }
        let sites = ShellSites::new(grid, shell)?;
        sites.check_resolution(ell)?;
        let mut cols = sites.ylm_values(ell);
        let values = cols.swap_remove((m + ell as i32) as usize);
        Ok(Self { sites, values })
    }
}

/// Prepares the lattice `Y_{ℓm}` state with the cascade:
///
/// 1. the z register from the marginal `Σ_{x,y} |Y|²` over shell sites;
/// 2. conditioned on z, the (x, y) register from the slice distribution,
///    which is the ring of shell sites at that height;
/// 3. a rephasing by the phase of `Y_{ℓm}`, i.e. `e^{imφ}` times the sign of
///    the Legendre factor.
pub fn prepare_ylm_lattice(ell: u32, m: i32, grid: Grid3, shell: ShellSpec) -> Result<LatticeState> {
    let dens = ShellDensity::new(ell, m, grid, shell)?;
    let n = grid.n();
    let mut weights = vec![0.0f64; grid.len()];
    let mut phases = vec![0.0f64; grid.len()];
    for (&i, v) in dens.sites.indices.iter().zip(&dens.values) {
        weights[i] = v.norm_sqr();
        phases[i] = v.arg();
    }

    // Stage 1: z marginal.
    let mut z_weights = vec![0.0f64; n];
    for (i, w) in weights.iter().enumerate() {
        z_weights[i % n] += w;
    }
    let z_amps = apply_prep(&build_prep_plan(&TargetDensity::from_weights(z_weights.clone())?)?);

    // Stage 2: one cascade per z slice over the 2·log₂n qubits of (x, y).
    let slices: Vec<Vec<C64>> = (0..n)
        .into_par_iter()
        .map(|z| {
            if z_weights[z] <= 0.0 {
                return Ok(vec![C64::from(0.0); n * n]);
            }
            let slice: Vec<f64> = (0..n * n).map(|xy| weights[xy * n + z]).collect();
            Ok(apply_prep(&build_prep_plan(&TargetDensity::from_weights(slice)?)?))
        })
        .collect::<Result<_>>()?;

    let mut amps = vec![C64::from(0.0); grid.len()];
    for (i, a) in amps.iter_mut().enumerate() {
        let (xy, z) = (i / n, i % n);
        *a = z_amps[z] * slices[z][xy];
    }

    // Stage 3.
    let amps = rephase(&amps, |i| phases[i]);
    Ok(LatticeState::normalized(grid, amps)?.with_ell(Some(ell)))
}

/// `Σ_m c_m |m⟩ ⊗ |Y_{ℓm}⟩` stored as one dense lattice block per tag value.
#[derive(Debug, Clone)]
pub struct TaggedState {
    ell: u32,
    grid: Grid3,
    blocks: Vec<Vec<C64>>,
}

impl TaggedState {
    pub fn new(ell: u32, grid: Grid3, blocks: Vec<Vec<C64>>) -> Result<Self> {
        let dim = 2 * ell as usize + 1;
        if blocks.len() != dim {
            return Err(Error::DimensionMismatch { expected: dim, actual: blocks.len() });
        }
        if let Some(b) = blocks.iter().find(|b| b.len() != grid.len()) {
            return Err(Error::DimensionMismatch { expected: grid.len(), actual: b.len() });
        }
        Ok(Self { ell, grid, blocks })
    }

    pub fn ell(&self) -> u32 {
        self.ell
    }

    pub fn grid(&self) -> Grid3 {
        self.grid
    }

    pub fn block(&self, m: i32) -> &[C64] {
        &self.blocks[(m + self.ell as i32) as usize]
    }

    pub fn blocks(&self) -> &[Vec<C64>] {
        &self.blocks
    }

    pub fn norm(&self) -> f64 {
        linalg::compensated_sum(self.blocks.iter().map(|b| linalg::norm_sqr(b))).sqrt()
    }
}

/// Prepared `Y_{ℓm}` lattice states for every `m`, reusable across calls.
#[derive(Debug, Clone)]
pub struct PreparedFamily {
    pub ell: u32,
    pub grid: Grid3,
    pub shell: ShellSpec,
    states: Vec<LatticeState>,
}

impl PreparedFamily {
    pub fn new(ell: u32, grid: Grid3, shell: ShellSpec) -> Result<Self> {
        let l = ell as i32;
        let states = (-l..=l).map(|m| prepare_ylm_lattice(ell, m, grid, shell)).collect::<Result<_>>()?;
        Ok(Self { ell, grid, shell, states })
    }

    pub fn state(&self, m: i32) -> &LatticeState {
        &self.states[(m + self.ell as i32) as usize]
    }

    pub fn tag(&self, compact: &CompactState) -> Result<TaggedState> {
        if compact.ell() != self.ell {
            return Err(Error::DimensionMismatch { expected: 2 * self.ell as usize + 1, actual: compact.dim() });
        }
        let blocks = self
            .states
            .iter()
            .zip(compact.amps())
            .map(|(s, &c)| s.amps().iter().map(|a| a * c).collect())
            .collect();
        TaggedState::new(self.ell, self.grid, blocks)
    }
}

/// `|m⟩ → |m⟩ ⊗ |Y_{ℓm}⟩`, extended linearly.
pub fn translate_with_tag(compact: &CompactState, grid: Grid3, shell: ShellSpec) -> Result<TaggedState> {
    PreparedFamily::new(compact.ell(), grid, shell)?.tag(compact)
}
