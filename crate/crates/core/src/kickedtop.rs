//! Quantum kicked top: alternating y-rotations and quadratic phase kicks.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pipeline::{self, LatticeRotator};
use crate::rotation::Rotation;
use crate::specfun::{exact_rotate, CompactState};

/// Exponent of the kick.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum KickScale {
    /// `e^{icm²}`.
    #[default]
    Literal,
    /// `e^{icm²/(2j)}`.
    Scaled,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum StepOrder {
    #[default]
    RotateThenKick,
    KickThenRotate,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KickedTopParams {
    pub j: u32,
    /// Kick strength, radians per `m²`.
    pub c: f64,
    /// y-rotation angle per step.
    pub p: f64,
    pub steps: usize,
    #[serde(default)]
    pub scale: KickScale,
    #[serde(default)]
    pub order: StepOrder,
}

impl KickedTopParams {
    pub fn new(j: u32, c: f64, p: f64, steps: usize) -> Self {
        Self { j, c, p, steps, scale: KickScale::Literal, order: StepOrder::RotateThenKick }
    }

    fn kick_strength(&self) -> f64 {
        match self.scale {
            KickScale::Literal => self.c,
            KickScale::Scaled if self.j > 0 => self.c / (2.0 * self.j as f64),
            KickScale::Scaled => 0.0,
        }
    }
}

/// `|m⟩ → e^{icm²}|m⟩`.
pub fn kick_phase(state: &CompactState, c: f64) -> CompactState {
    state.map_phase(|m| c * (m as f64) * (m as f64))
}

/// How the y-rotation is carried out.
#[derive(Debug, Clone, Copy)]
pub enum TopBackend<'a> {
    Exact,
    Lattice(&'a LatticeRotator),
}

impl TopBackend<'_> {
    fn rotate(&self, state: &CompactState, p: f64) -> Result<(CompactState, f64)> {
        let rot = Rotation::about_y(p);
        match self {
            TopBackend::Exact => Ok((exact_rotate(state, &rot), 0.0)),
            TopBackend::Lattice(r) => {
                if r.config().ell != state.ell() {
                    return Err(Error::DimensionMismatch {
                        expected: 2 * r.config().ell as usize + 1,
                        actual: state.dim(),
                    });
                }
                let (out, report) = r.rotate(state, &rot)?;
                Ok((out, report.leakage))
            }
        }
    }
}

/// One Floquet step; returns the new state and the leakage it incurred.
pub fn kicked_top_step(
    state: &CompactState,
    params: &KickedTopParams,
    backend: TopBackend<'_>,
) -> Result<(CompactState, f64)> {
    let c = params.kick_strength();
    match params.order {
        StepOrder::RotateThenKick => {
            let (rotated, leak) = backend.rotate(state, params.p)?;
            Ok((kick_phase(&rotated, c), leak))
        }
        StepOrder::KickThenRotate => backend.rotate(&kick_phase(state, c), params.p),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TopRecord {
    pub step: usize,
    /// Fidelity between the two trajectories.
    pub fidelity: f64,
    /// `⟨J_z⟩/j` on the first trajectory.
    pub jz_a: f64,
    /// `⟨J_z⟩/j` on the second trajectory.
    pub jz_b: f64,
    /// Accumulated leakage of the second trajectory.
    pub leakage: f64,
}

/// Runs two backends in lockstep from `initial`; one record per step,
/// starting with step 0.
pub fn kicked_top_run(
    initial: &CompactState,
    params: &KickedTopParams,
    a: TopBackend<'_>,
    b: TopBackend<'_>,
) -> Result<Vec<TopRecord>> {
    if initial.ell() != params.j {
        return Err(Error::DimensionMismatch { expected: 2 * params.j as usize + 1, actual: initial.dim() });
    }
    let scale = if params.j > 0 { 1.0 / params.j as f64 } else { 0.0 };
    let (mut sa, mut sb) = (initial.clone(), initial.clone());
    let mut leakage = 0.0;
    let mut out = Vec::with_capacity(params.steps + 1);
    for step in 0..=params.steps {
        if step > 0 {
            sa = kicked_top_step(&sa, params, a)?.0;
            let (next, leak) = kicked_top_step(&sb, params, b)?;
            sb = next;
            leakage += leak;
        }
        out.push(TopRecord {
            step,
            fidelity: pipeline::fidelity(&sa, &sb)?,
            jz_a: sa.expect_jz() * scale,
            jz_b: sb.expect_jz() * scale,
            leakage,
        });
    }
    Ok(out)
}
