//! Arbitrary rotations of the compact register routed through the lattice.
//!
//! A rotation `Rz(α)·Ry(β)·Rz(γ)` is applied as two exact diagonal phases
//! on the compact register around a single lattice y-rotation: translate to
//! the lattice, rotate, translate back.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{self, Axis, Grid3, LatticeState, ShellSites, ShellSpec, SpectralFrame, TranslateIsometry};
use crate::linalg::{self, CMatrix, C64};
use crate::phasest::{self, RotationBackend};
use crate::rotation::Rotation;
use crate::shear::{self, LatticePermutation};
use crate::specfun::{exact_rotate, CompactState, Spin, SpinRotator};
use crate::stateprep::PreparedFamily;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TranslateMode {
    /// Encode with the orthonormalized isometry, decode by projection.
    Isometry,
    /// Tag-and-uncompute on the way in, phase estimation on the way out.
    Circuit,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BackendKind {
    Shear,
    Exact,
}

impl std::str::FromStr for TranslateMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "isometry" => Ok(Self::Isometry),
            "circuit" => Ok(Self::Circuit),
            _ => Err(Error::Domain(format!("unknown translate mode `{s}`"))),
        }
    }
}

impl std::str::FromStr for BackendKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "shear" => Ok(Self::Shear),
            "exact" => Ok(Self::Exact),
            _ => Err(Error::Domain(format!("unknown rotation backend `{s}`"))),
        }
    }
}

impl TranslateMode {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::Isometry => "isometry",
            Self::Circuit => "circuit",
        }
    }
}

impl BackendKind {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::Shear => "shear",
            Self::Exact => "exact",
        }
    }
}

/// Largest `ℓ` accepted for lattice-backed runs.
pub const MAX_ELL: u32 = 8;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PipelineConfig {
    pub ell: u32,
    pub n: usize,
    pub shell: ShellSpec,
    pub mode: TranslateMode,
    pub backend: BackendKind,
    pub t: u32,
}

impl PipelineConfig {
    /// Isometry mode, shear backend, default shell, minimal `t`.
    pub fn new(ell: u32, n: usize) -> Result<Self> {
        let grid = Grid3::new(n)?;
        Ok(Self {
            ell,
            n,
            shell: ShellSpec::default_for(&grid),
            mode: TranslateMode::Isometry,
            backend: BackendKind::Shear,
            t: phasest::min_bits(ell),
        })
    }

    pub fn with_mode(mut self, mode: TranslateMode) -> Self {
        self.mode = mode;
        self
    }

    pub fn with_backend(mut self, backend: BackendKind) -> Self {
        self.backend = backend;
        self
    }

    /// Every violated precondition as `(field, message)`.
    pub fn violations(&self) -> Vec<(&'static str, String)> {
        let mut out = Vec::new();
        if self.ell > MAX_ELL {
            out.push(("ell", format!("ell = {} exceeds {MAX_ELL}", self.ell)));
        }
        if self.t < phasest::min_bits(self.ell) || self.t > phasest::MAX_BITS {
            out.push((
                "t",
                format!("t = {} must lie in {}..={}", self.t, phasest::min_bits(self.ell), phasest::MAX_BITS),
            ));
        }
        let grid = match Grid3::new(self.n) {
            Ok(g) => g,
            Err(e) => {
                out.push(("n", e.to_string()));
                return out;
            }
        };
        if let Err(e) = self.shell.validate(&grid) {
            out.push(("shell", e.to_string()));
            return out;
        }
        match ShellSites::new(grid, self.shell).and_then(|s| s.check_resolution(self.ell)) {
            Ok(()) => {}
            Err(e) => out.push(("shell", e.to_string())),
        }
        out
    }

    pub fn validate(&self) -> Result<()> {
        match self.violations().into_iter().next() {
            None => Ok(()),
            Some((field, msg)) => Err(Error::Domain(format!("{field}: {msg}"))),
        }
    }

    pub fn grid(&self) -> Result<Grid3> {
        Grid3::new(self.n)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FidelityReport {
    /// `|⟨ψ_exact|ψ_pipeline⟩|²`.
    pub fidelity: f64,
    /// Probability mass lost in translation and uncomputation.
    pub leakage: f64,
    /// Output norm before renormalization.
    pub norm: f64,
    pub stages: BTreeMap<String, f64>,
}

/// `|m⟩ → e^{−imφ}|m⟩`, the exact z-rotation.
pub fn rotate_z_compact(state: &CompactState, phi: f64) -> CompactState {
    state.map_phase(|m| -(m as f64) * phi)
}

/// `|⟨a|b⟩|²`.
pub fn fidelity(a: &CompactState, b: &CompactState) -> Result<f64> {
    if a.ell() != b.ell() {
        return Err(Error::DimensionMismatch { expected: a.dim(), actual: b.dim() });
    }
    Ok(linalg::inner(a.amps(), b.amps()).norm_sqr().min(1.0))
}

/// Product `R₁·R₂·…·R_k` (the last acts first), re-extracted as Euler angles.
pub fn compose_rotations(rots: &[Rotation]) -> Rotation {
    rots.iter().fold(Rotation::identity(), |acc, r| acc.compose(r))
}

/// Translate-rotate-translate machinery for one configuration, built once
/// and reused across rotations.
#[derive(Debug, Clone)]
pub struct LatticeRotator {
    cfg: PipelineConfig,
    grid: Grid3,
    spin: SpinRotator,
    backend: RotationBackend,
    isometry: Option<TranslateIsometry>,
    family: Option<PreparedFamily>,
}

enum YOp<'a> {
    Perm(LatticePermutation),
    Frame(&'a SpectralFrame, CMatrix),
}

impl LatticeRotator {
    pub fn new(cfg: PipelineConfig) -> Result<Self> {
        cfg.validate()?;
        let grid = cfg.grid()?;
        let (isometry, family) = match cfg.mode {
            TranslateMode::Isometry => (Some(lattice::translate_isometry(cfg.ell, grid, cfg.shell)?), None),
            TranslateMode::Circuit => (None, Some(PreparedFamily::new(cfg.ell, grid, cfg.shell)?)),
        };
        let backend = match (cfg.backend, &isometry) {
            (BackendKind::Shear, _) => RotationBackend::Shear,
            (BackendKind::Exact, Some(iso)) => RotationBackend::Exact(SpectralFrame::from_isometry(iso)),
            (BackendKind::Exact, None) => RotationBackend::Exact(SpectralFrame::raw_samples(cfg.ell, grid, cfg.shell)?),
        };
        Ok(Self { cfg, grid, spin: SpinRotator::new(Spin::integer(cfg.ell)), backend, isometry, family })
    }

    pub fn config(&self) -> &PipelineConfig {
        &self.cfg
    }

    pub fn isometry(&self) -> Option<&TranslateIsometry> {
        self.isometry.as_ref()
    }

    fn y_op(&self, beta: f64) -> Result<YOp<'_>> {
        Ok(match &self.backend {
            RotationBackend::Shear => YOp::Perm(shear::rotation_3d(self.grid, Axis::Y, beta)?),
            RotationBackend::Exact(frame) => YOp::Frame(frame, self.spin.small_d(beta)),
        })
    }

    /// Lattice part: `Ry(β)` applied between translate and translate-back.
    /// Returns the unnormalized compact result and per-stage diagnostics.
    fn rotate_y(&self, state: &CompactState, beta: f64, stages: &mut BTreeMap<String, f64>) -> Result<(Vec<C64>, f64)> {
        match self.cfg.mode {
            TranslateMode::Isometry => {
                let iso = self.isometry.as_ref().expect("isometry mode");
                let encoded = lattice::encode(state, iso)?;
                let rotated = self.rotate_lattice(encoded.amps(), beta)?;
                let decoded = lattice::decode(&LatticeState::from_parts(self.grid, rotated, Some(self.cfg.ell)), iso)?;
                let coeffs = decoded.state.amps().iter().map(|a| a * decoded.norm).collect();
                stages.insert("gram_max_offdiag".into(), lattice::max_offdiag(iso.gram()));
                stages.insert("decode_residual".into(), decoded.residual);
                Ok((coeffs, decoded.residual * decoded.residual))
            }
            TranslateMode::Circuit => {
                let fam = self.family.as_ref().expect("circuit mode");
                let t = self.cfg.t;
                let unc = phasest::uncompute_m(&fam.tag(state)?, t, &self.backend)?;
                stages.insert("uncompute_leakage".into(), unc.leakage);
                let rotated = self.rotate_lattice(unc.state.amps(), beta)?;
                let rotated = LatticeState::from_parts(self.grid, rotated, Some(self.cfg.ell));
                let branches = phasest::phase_branches(&rotated, self.cfg.ell, t, &self.backend)?;

                // Un-prepare: the branch with outcome m is projected onto the
                // prepared Y_{ℓm}; everything else is lost.
                let l = self.cfg.ell as i32;
                let mut coeffs = vec![C64::from(0.0); (2 * l + 1) as usize];
                let mut kept = vec![false; branches.len()];
                let mut lost = Vec::new();
                for m in -l..=l {
                    let k = phasest::encode_outcome(m, t);
                    kept[k] = true;
                    let y = fam.state(m).amps();
                    let c = linalg::inner(y, &branches[k]);
                    coeffs[(m + l) as usize] = c;
                    lost.push(linalg::compensated_sum(
                        branches[k].iter().zip(y).map(|(b, v)| (b - v * c).norm_sqr()),
                    ));
                }
                lost.extend(branches.iter().zip(&kept).filter(|(_, k)| !**k).map(|(b, _)| linalg::norm_sqr(b)));
                let back = linalg::compensated_sum(lost);
                stages.insert("translate_back_leakage".into(), back);
                // The uncomputed state was renormalized; undo that here.
                coeffs.iter_mut().for_each(|c| *c *= unc.norm);
                Ok((coeffs, unc.leakage + unc.norm * unc.norm * back))
            }
        }
    }

    fn rotate_lattice(&self, amps: &[C64], beta: f64) -> Result<Vec<C64>> {
        Ok(match self.y_op(beta)? {
            YOp::Perm(p) => p.apply_to(amps),
            YOp::Frame(f, d) => f.apply(amps, &d),
        })
    }

    /// Applies `rot` to `state`; the report compares with the exact rotation.
    pub fn rotate(&self, state: &CompactState, rot: &Rotation) -> Result<(CompactState, FidelityReport)> {
        if state.ell() != self.cfg.ell {
            return Err(Error::DimensionMismatch { expected: 2 * self.cfg.ell as usize + 1, actual: state.dim() });
        }
        let mut stages = BTreeMap::new();
        let first = rotate_z_compact(state, rot.gamma);
        let beta = shear::wrap_angle(rot.beta);
        let (middle, leakage, norm) = if beta == 0.0 {
            (first, 0.0, 1.0)
        } else {
            let (coeffs, leakage) = self.rotate_y(&first, beta, &mut stages)?;
            let norm = linalg::norm_sqr(&coeffs).sqrt();
            if norm == 0.0 {
                return Err(Error::Leakage(leakage));
            }
            (CompactState::normalized(self.cfg.ell, coeffs)?, leakage, norm)
        };
        let out = rotate_z_compact(&middle, rot.alpha);
        let fid = fidelity(&exact_rotate(state, rot), &out)?;
        Ok((out, FidelityReport { fidelity: fid, leakage, norm, stages }))
    }
}

/// One-shot [`LatticeRotator::rotate`].
pub fn rotate_via_lattice(
    state: &CompactState,
    rot: &Rotation,
    cfg: &PipelineConfig,
) -> Result<(CompactState, FidelityReport)> {
    LatticeRotator::new(*cfg)?.rotate(state, rot)
}
