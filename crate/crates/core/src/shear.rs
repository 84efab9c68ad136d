//! Bijective lattice rotations built from three integer shears.
//!
//! A shear moves every lattice line parallel to one axis by a constant
//! integer offset, `u ← (u + round(a·(v − c))) mod n`, so it permutes sites
//! exactly. `Shx(a)·Shy(b)·Shx(a)` with `a = −tan(θ/2)`, `b = sin θ` equals
//! the planar rotation by θ in real arithmetic; on the lattice it deviates
//! by a few sites from the true rotation near the center and wraps
//! periodically at the edges. Rounding is half-away-from-zero.

use std::f64::consts::{FRAC_PI_2, PI, TAU};

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::lattice::{Axis, Grid3, LatticeState};
use crate::linalg::C64;
use crate::rotation::{mat_apply, Mat3};

/// Explicit bijection of grid sites: the amplitude at site `i` moves to
/// `map[i]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LatticePermutation {
    grid: Grid3,
    map: Vec<u32>,
}

fn check_bijection(n: usize, map: &[u32]) -> Result<()> {
    if map.len() != n {
        return Err(Error::NotBijective(format!("map has {} entries, expected {n}", map.len())));
    }
    let mut seen = vec![false; n];
    for &j in map {
        let j = j as usize;
        if j >= n {
            return Err(Error::NotBijective(format!("image {j} out of range")));
        }
        if std::mem::replace(&mut seen[j], true) {
            return Err(Error::NotBijective(format!("site {j} hit twice")));
        }
    }
    Ok(())
}

impl LatticePermutation {
    /// Validates that `map` is a bijection of `0..n³`.
    pub fn new(grid: Grid3, map: Vec<u32>) -> Result<Self> {
        check_bijection(grid.len(), &map)?;
        Ok(Self { grid, map })
    }

    fn from_site_fn(grid: Grid3, f: impl Fn([i64; 3]) -> [i64; 3] + Sync) -> Result<Self> {
        let n = grid.n() as i64;
        let map = (0..grid.len())
            .into_par_iter()
            .map(|i| {
                let p = grid.coords(i);
                let q = f([p[0] as i64, p[1] as i64, p[2] as i64]);
                let w = |v: i64| v.rem_euclid(n) as usize;
                grid.index([w(q[0]), w(q[1]), w(q[2])]) as u32
            })
            .collect();
        Self::new(grid, map)
    }

    pub fn identity(grid: Grid3) -> Self {
        Self { grid, map: (0..grid.len() as u32).collect() }
    }

    pub fn grid(&self) -> Grid3 {
        self.grid
    }

    pub fn map(&self) -> &[u32] {
        &self.map
    }

    pub fn image(&self, i: usize) -> usize {
        self.map[i] as usize
    }

    pub fn is_identity(&self) -> bool {
        self.map.iter().enumerate().all(|(i, &j)| i == j as usize)
    }

    /// Re-runs the bijection check (sorted image equals the full range).
    pub fn is_bijective(&self) -> bool {
        let mut sorted = self.map.clone();
        sorted.par_sort_unstable();
        sorted.iter().enumerate().all(|(i, &j)| i == j as usize)
    }

    pub fn inverse(&self) -> Self {
        let mut inv = vec![0u32; self.map.len()];
        for (i, &j) in self.map.iter().enumerate() {
            inv[j as usize] = i as u32;
        }
        Self { grid: self.grid, map: inv }
    }

    /// `next ∘ self`: `self` acts first.
    pub fn then(&self, next: &LatticePermutation) -> Result<Self> {
        self.grid.check_same(&next.grid)?;
        let map = self.map.par_iter().map(|&j| next.map[j as usize]).collect();
        Ok(Self { grid: self.grid, map })
    }

    /// Moves amplitudes of an arbitrary (not necessarily normalized) vector.
    pub fn apply_to(&self, amps: &[C64]) -> Vec<C64> {
        let mut out = vec![C64::from(0.0); amps.len()];
        for (a, &j) in amps.iter().zip(&self.map) {
            out[j as usize] = *a;
        }
        out
    }
}

pub fn apply_permutation(state: &LatticeState, perm: &LatticePermutation) -> Result<LatticeState> {
    state.grid().check_same(&perm.grid)?;
    Ok(LatticeState::from_parts(state.grid(), perm.apply_to(state.amps()), state.ell()))
}

/// Shear coefficients realizing a planar rotation by `theta`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShearParams {
    pub theta: f64,
    pub a: f64,
    pub b: f64,
}

impl ShearParams {
    pub fn new(theta: f64) -> Result<Self> {
        if !theta.is_finite() || theta.abs() > FRAC_PI_2 {
            return Err(Error::AngleRange(theta));
        }
        Ok(Self { theta, a: -(theta / 2.0).tan(), b: theta.sin() })
    }

    /// `Shx(a)·Shy(b)·Shx(a)` as a real 2×2 matrix.
    pub fn product(&self) -> [[f64; 2]; 2] {
        let (a, b) = (self.a, self.b);
        [[1.0 + a * b, a * (2.0 + a * b)], [b, 1.0 + a * b]]
    }
}

#[inline]
fn shift(a: f64, v: i64, c: i64) -> i64 {
    (a * (v - c) as f64).round() as i64
}

/// `sheared ← (sheared + round(a·(along − c))) mod n` in every slice.
pub fn shear_2d(grid: Grid3, sheared: Axis, along: Axis, a: f64) -> Result<LatticePermutation> {
    if sheared == along {
        return Err(Error::Domain("shear needs two distinct axes".into()));
    }
    if !a.is_finite() {
        return Err(Error::Domain("shear coefficient must be finite".into()));
    }
    let c = grid.center() as i64;
    let (s, t) = (sheared.index(), along.index());
    LatticePermutation::from_site_fn(grid, move |mut p| {
        p[s] += shift(a, p[t], c);
        p
    })
}

/// Three-shear rotation by `theta` (`|θ| ≤ π/2`) in the plane
/// perpendicular to `axis`, right-hand sense.
pub fn rotation_2d(grid: Grid3, axis: Axis, theta: f64) -> Result<LatticePermutation> {
    let params = ShearParams::new(theta)?;
    let c = grid.center() as i64;
    let (u, v) = axis.plane();
    let (u, v) = (u.index(), v.index());
    let (a, b) = (params.a, params.b);
    let n = grid.n() as i64;
    // Each shear is cyclic on its own lines, so wrap between stages.
    LatticePermutation::from_site_fn(grid, move |mut p| {
        p[u] = (p[u] + shift(a, p[v], c)).rem_euclid(n);
        p[v] = (p[v] + shift(b, p[u], c)).rem_euclid(n);
        p[u] += shift(a, p[v], c);
        p
    })
}

/// Exact rotation by `quarter_turns · π/2` about `axis`, right-hand sense,
/// taken about the center and wrapped mod n.
pub fn rotation_90(grid: Grid3, axis: Axis, quarter_turns: i32) -> LatticePermutation {
    let k = quarter_turns.rem_euclid(4);
    if k == 0 {
        return LatticePermutation::identity(grid);
    }
    let c2 = 2 * grid.center() as i64;
    let (u, v) = axis.plane();
    let (u, v) = (u.index(), v.index());
    LatticePermutation::from_site_fn(grid, move |mut p| {
        for _ in 0..k {
            let (pu, pv) = (p[u], p[v]);
            p[u] = c2 - pv;
            p[v] = pu;
        }
        p
    })
    .expect("quarter turns are bijective")
}

/// Wraps into `(−π, π]`.
pub fn wrap_angle(theta: f64) -> f64 {
    let t = theta.rem_euclid(TAU);
    if t > PI {
        t - TAU
    } else {
        t
    }
}

/// Angles this close to a multiple of π/2 are treated as exact quarter turns.
const QUARTER_SNAP: f64 = 1e-12;

/// Splits θ into `k·π/2 + residual` with `|residual| ≤ π/4`.
pub fn reduce_angle(theta: f64) -> (i32, f64) {
    let theta = wrap_angle(theta);
    let k = (theta / FRAC_PI_2).round();
    let mut residual = theta - k * FRAC_PI_2;
    if residual.abs() < QUARTER_SNAP {
        residual = 0.0;
    }
    (k as i32, residual)
}

/// Rotation about a principal axis by any angle: exact quarter turns plus a
/// residual shear rotation. For θ ≥ 0 the shear acts first, for θ < 0 last,
/// so that `rotation_3d(−θ)` is exactly the inverse of `rotation_3d(θ)`.
pub fn rotation_3d(grid: Grid3, axis: Axis, theta: f64) -> Result<LatticePermutation> {
    if !theta.is_finite() {
        return Err(Error::Domain("rotation angle must be finite".into()));
    }
    let wrapped = wrap_angle(theta);
    let (k, residual) = reduce_angle(wrapped);
    let quarter = rotation_90(grid, axis, k);
    if residual == 0.0 {
        return Ok(quarter);
    }
    let sheared = rotation_2d(grid, axis, residual)?;
    if wrapped >= 0.0 {
        sheared.then(&quarter)
    } else {
        quarter.then(&sheared)
    }
}

/// [`rotation_3d`] for an axis given as a unit vector; only the six
/// principal directions are accepted.
pub fn rotation_3d_about(grid: Grid3, axis: [f64; 3], theta: f64) -> Result<LatticePermutation> {
    let principal = [Axis::X, Axis::Y, Axis::Z];
    for (i, ax) in principal.iter().enumerate() {
        let others_zero = (0..3).filter(|&j| j != i).all(|j| axis[j] == 0.0);
        if others_zero && (axis[i].abs() - 1.0).abs() <= 1e-12 {
            return rotation_3d(grid, *ax, theta * axis[i].signum());
        }
    }
    Err(Error::UnsupportedAxis)
}

/// Sites over which displacement is measured.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Region {
    /// Euclidean distance from the center at most `r`.
    Ball(f64),
    /// Every coordinate within `r` of the center.
    Cube(f64),
}

impl Region {
    fn contains(&self, p: [f64; 3]) -> bool {
        match *self {
            Region::Ball(r) => p.iter().map(|x| x * x).sum::<f64>() <= r * r,
            Region::Cube(r) => p.iter().all(|x| x.abs() <= r),
        }
    }
}

#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct DisplacementStats {
    pub max: f64,
    pub mean: f64,
    pub sites: usize,
    /// Counts per half-unit bin; the last bin collects everything ≥ 4.
    pub histogram: Vec<usize>,
}

pub const HISTOGRAM_BIN: f64 = 0.5;
const HISTOGRAM_BINS: usize = 9;

fn axis_rotation(axis: Axis, theta: f64) -> Mat3 {
    // Snap so that quarter turns are represented exactly.
    let snap = |v: f64| if (v - v.round()).abs() < 1e-14 { v.round() } else { v };
    let (s, c) = theta.sin_cos();
    let (s, c) = (snap(s), snap(c));
    match axis {
        Axis::X => [[1.0, 0.0, 0.0], [0.0, c, -s], [0.0, s, c]],
        Axis::Y => [[c, 0.0, s], [0.0, 1.0, 0.0], [-s, 0.0, c]],
        Axis::Z => [[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]],
    }
}

/// Distance between each image site and the exactly rotated position, with
/// periodic (minimum-image) differences.
pub fn displacement_stats(perm: &LatticePermutation, axis: Axis, theta: f64, region: Region) -> DisplacementStats {
    let grid = perm.grid;
    let n = grid.n() as f64;
    let rot = axis_rotation(axis, theta);
    let dists: Vec<f64> = (0..grid.len())
        .into_par_iter()
        .filter_map(|i| {
            let p = grid.physical(i);
            if !region.contains(p) {
                return None;
            }
            let exact = mat_apply(&rot, p);
            let got = grid.physical(perm.image(i));
            let d2: f64 = (0..3)
                .map(|k| {
                    let d = (got[k] - exact[k]).rem_euclid(n);
                    let d = if d > n / 2.0 { d - n } else { d };
                    d * d
                })
                .sum();
            Some(d2.sqrt())
        })
        .collect();
    let mut histogram = vec![0usize; HISTOGRAM_BINS];
    for &d in &dists {
        let bin = ((d / HISTOGRAM_BIN) as usize).min(HISTOGRAM_BINS - 1);
        histogram[bin] += 1;
    }
    let max = dists.iter().copied().fold(0.0, f64::max);
    let mean = if dists.is_empty() { 0.0 } else { dists.iter().sum::<f64>() / dists.len() as f64 };
    DisplacementStats { max, mean, sites: dists.len(), histogram }
}
