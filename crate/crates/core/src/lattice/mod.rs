//! Periodic cubic grids and discretized spherical harmonics on a thin shell.
//!
//! Sites are addressed by integer coordinates `0..n` on each axis with the
//! flat index `(x·n + y)·n + z` (x-major). Physical coordinates are taken
//! relative to the center `c = n/2`.

mod io;

pub use io::{read_binary, write_binary, write_csv};

use nalgebra::DVector;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix, C64};
use crate::specfun::{legendre_row, CompactState};

/// Minimum shell sites per compact basis state.
pub const SITES_PER_STATE: usize = 20;

/// Largest tolerated off-diagonal Gram entry for orthogonalization.
pub const MAX_GRAM_OFFDIAG: f64 = 0.3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub enum Axis {
    X,
    Y,
    Z,
}

impl Axis {
    pub fn index(self) -> usize {
        match self {
            Axis::X => 0,
            Axis::Y => 1,
            Axis::Z => 2,
        }
    }

    /// The ordered plane `(u, v)` with `u × v` along this axis.
    pub fn plane(self) -> (Axis, Axis) {
        match self {
            Axis::X => (Axis::Y, Axis::Z),
            Axis::Y => (Axis::Z, Axis::X),
            Axis::Z => (Axis::X, Axis::Y),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Grid3 {
    n: usize,
}

impl Grid3 {
    pub const MIN_N: usize = 8;
    pub const MAX_N: usize = 256;

    pub fn new(n: usize) -> Result<Self> {
        if !n.is_power_of_two() || !(Self::MIN_N..=Self::MAX_N).contains(&n) {
            return Err(Error::InvalidGrid(format!(
                "n = {n} must be a power of two in [{}, {}]",
                Self::MIN_N,
                Self::MAX_N
            )));
        }
        Ok(Self { n })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn center(&self) -> usize {
        self.n / 2
    }

    pub fn len(&self) -> usize {
        self.n * self.n * self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    #[inline]
    pub fn index(&self, p: [usize; 3]) -> usize {
        (p[0] * self.n + p[1]) * self.n + p[2]
    }

    #[inline]
    pub fn coords(&self, i: usize) -> [usize; 3] {
        let n = self.n;
        [i / (n * n), (i / n) % n, i % n]
    }

    /// Coordinates relative to the center.
    #[inline]
    pub fn physical(&self, i: usize) -> [f64; 3] {
        let c = self.center() as f64;
        let p = self.coords(i);
        [p[0] as f64 - c, p[1] as f64 - c, p[2] as f64 - c]
    }

    pub(crate) fn check_same(&self, other: &Grid3) -> Result<()> {
        if self.n != other.n {
            return Err(Error::GridMismatch(self.n, other.n));
        }
        Ok(())
    }
}

/// Radial window `|r − r0| ≤ width/2`, constant inside.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct ShellSpec {
    pub r0: f64,
    pub width: f64,
}

impl ShellSpec {
    pub fn new(r0: f64, width: f64) -> Result<Self> {
        if !(r0.is_finite() && width.is_finite() && width > 0.0 && r0 - width / 2.0 > 0.0) {
            return Err(Error::InvalidShell(format!(
                "need width > 0 and r0 - width/2 > 0 (r0 = {r0}, width = {width})"
            )));
        }
        Ok(Self { r0, width })
    }

    /// `r0 = 0.35·n`, width 3.
    pub fn default_for(grid: &Grid3) -> Self {
        Self { r0: 0.35 * grid.n() as f64, width: 3.0 }
    }

    /// The shell must stay strictly inside radius `n/2 − 1`.
    pub fn validate(&self, grid: &Grid3) -> Result<()> {
        Self::new(self.r0, self.width)?;
        let outer = self.r0 + self.width / 2.0;
        let limit = grid.n() as f64 / 2.0 - 1.0;
        if outer >= limit {
            return Err(Error::InvalidShell(format!(
                "outer radius {outer} must be below n/2 - 1 = {limit}"
            )));
        }
        Ok(())
    }

    #[inline]
    pub fn contains(&self, r: f64) -> bool {
        (r - self.r0).abs() <= self.width / 2.0
    }
}

/// The shell sites of a grid with their polar coordinates.
#[derive(Debug, Clone)]
pub struct ShellSites {
    pub grid: Grid3,
    pub shell: ShellSpec,
    /// Ascending flat indices.
    pub indices: Vec<usize>,
    /// `(cos θ, φ)` per site.
    pub angles: Vec<(f64, f64)>,
}

impl ShellSites {
    pub fn new(grid: Grid3, shell: ShellSpec) -> Result<Self> {
        shell.validate(&grid)?;
        let (indices, angles): (Vec<usize>, Vec<(f64, f64)>) = (0..grid.len())
            .into_par_iter()
            .filter_map(|i| {
                let [x, y, z] = grid.physical(i);
                let r = (x * x + y * y + z * z).sqrt();
                shell.contains(r).then(|| (i, ((z / r).clamp(-1.0, 1.0), y.atan2(x))))
            })
            .unzip();
        if indices.is_empty() {
            return Err(Error::EmptySupport);
        }
        Ok(Self { grid, shell, indices, angles })
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn check_resolution(&self, ell: u32) -> Result<()> {
        let required = SITES_PER_STATE * (2 * ell as usize + 1);
        if self.len() < required {
            return Err(Error::Resolution { sites: self.len(), required });
        }
        Ok(())
    }

    /// Unnormalized `Y_{ℓm}` values at every shell site, one column per
    /// `m = −ℓ..=ℓ`.
    pub fn ylm_values(&self, ell: u32) -> Vec<Vec<C64>> {
        let l = ell as i32;
        let per_site: Vec<Vec<C64>> = self
            .angles
            .par_iter()
            .map(|&(cos_t, phi)| {
                let row = legendre_row(ell, cos_t);
                (-l..=l)
                    .map(|m| {
                        let p = row[m.unsigned_abs() as usize];
                        let p = if m < 0 && m % 2 != 0 { -p } else { p };
                        C64::from_polar(1.0, m as f64 * phi) * p
                    })
                    .collect()
            })
            .collect();
        (0..(2 * l + 1) as usize)
            .map(|k| per_site.iter().map(|v| v[k]).collect())
            .collect()
    }

    /// Unit-normalized sampled columns.
    pub fn normalized_ylm(&self, ell: u32) -> Vec<Vec<C64>> {
        self.ylm_values(ell)
            .into_iter()
            .map(|mut col| {
                let norm = linalg::norm_sqr(&col).sqrt();
                col.iter_mut().for_each(|a| *a /= norm);
                col
            })
            .collect()
    }

    /// Scatters support values into a dense grid vector.
    pub fn scatter(&self, values: &[C64]) -> Vec<C64> {
        let mut amps = vec![C64::from(0.0); self.grid.len()];
        for (&i, &v) in self.indices.iter().zip(values) {
            amps[i] = v;
        }
        amps
    }

    /// `Σ |amps_i|²` over sites outside the shell.
    pub fn off_support_norm_sqr(&self, amps: &[C64]) -> f64 {
        let mut support = self.indices.iter().peekable();
        linalg::compensated_sum(amps.iter().enumerate().filter_map(|(i, a)| {
            if support.peek() == Some(&&i) {
                support.next();
                None
            } else {
                Some(a.norm_sqr())
            }
        }))
    }

    pub fn gather(&self, amps: &[C64]) -> Vec<C64> {
        self.indices.iter().map(|&i| amps[i]).collect()
    }
}

/// Dense amplitude field over an `n³` grid.
#[derive(Debug, Clone, PartialEq)]
pub struct LatticeState {
    grid: Grid3,
    amps: Vec<C64>,
    ell: Option<u32>,
}

impl LatticeState {
    pub fn new(grid: Grid3, amps: Vec<C64>) -> Result<Self> {
        if amps.len() != grid.len() {
            return Err(Error::DimensionMismatch { expected: grid.len(), actual: amps.len() });
        }
        let norm = linalg::norm_sqr(&amps).sqrt();
        if (norm - 1.0).abs() > 1e-12 {
            return Err(Error::Domain(format!("lattice state has norm {norm}")));
        }
        Ok(Self { grid, amps, ell: None })
    }

    pub fn normalized(grid: Grid3, mut amps: Vec<C64>) -> Result<Self> {
        let norm = linalg::norm_sqr(&amps).sqrt();
        if !(norm > 0.0 && norm.is_finite()) {
            return Err(Error::Domain("cannot normalize a zero lattice vector".into()));
        }
        amps.iter_mut().for_each(|a| *a /= norm);
        Self::new(grid, amps)
    }

    pub(crate) fn from_parts(grid: Grid3, amps: Vec<C64>, ell: Option<u32>) -> Self {
        debug_assert_eq!(amps.len(), grid.len());
        Self { grid, amps, ell }
    }

    pub fn with_ell(mut self, ell: Option<u32>) -> Self {
        self.ell = ell;
        self
    }

    pub fn grid(&self) -> Grid3 {
        self.grid
    }

    pub fn ell(&self) -> Option<u32> {
        self.ell
    }

    pub fn amps(&self) -> &[C64] {
        &self.amps
    }

    pub fn into_amps(self) -> Vec<C64> {
        self.amps
    }

    pub fn norm(&self) -> f64 {
        linalg::norm_sqr(&self.amps).sqrt()
    }

    pub fn inner(&self, other: &LatticeState) -> Result<C64> {
        self.grid.check_same(&other.grid)?;
        Ok(linalg::inner(&self.amps, &other.amps))
    }

    /// `|⟨self|other⟩|²`.
    pub fn fidelity(&self, other: &LatticeState) -> Result<f64> {
        Ok(self.inner(other)?.norm_sqr())
    }

    /// Largest distance from the center among nonzero sites.
    pub fn support_radius(&self) -> f64 {
        self.amps
            .iter()
            .enumerate()
            .filter(|(_, a)| a.norm_sqr() > 0.0)
            .map(|(i, _)| {
                let [x, y, z] = self.grid.physical(i);
                (x * x + y * y + z * z).sqrt()
            })
            .fold(0.0, f64::max)
    }
}

/// Discretized `Y_{ℓm}·R(r)` with `R` the indicator of the shell.
pub fn sample_ylm_state(ell: u32, m: i32, grid: Grid3, shell: ShellSpec) -> Result<LatticeState> {
    if m.unsigned_abs() > ell {
        return Err(Error::Domain(format!("|m| = {} exceeds ell = {ell}", m.abs())));
    }
    let sites = ShellSites::new(grid, shell)?;
    sites.check_resolution(ell)?;
    let cols = sites.normalized_ylm(ell);
    let col = &cols[(m + ell as i32) as usize];
    Ok(LatticeState::from_parts(grid, sites.scatter(col), Some(ell)))
}

fn gram_of(cols: &[Vec<C64>]) -> CMatrix {
    let d = cols.len();
    let mut g = CMatrix::zeros(d, d);
    for r in 0..d {
        g[(r, r)] = C64::from(1.0);
        for c in (r + 1)..d {
            let v = linalg::inner(&cols[r], &cols[c]);
            g[(r, c)] = v;
            g[(c, r)] = v.conj();
        }
    }
    g
}

/// `G_{mm'} = ⟨state(ℓ,m)|state(ℓ,m')⟩`.
pub fn gram_matrix(ell: u32, grid: Grid3, shell: ShellSpec) -> Result<CMatrix> {
    let sites = ShellSites::new(grid, shell)?;
    sites.check_resolution(ell)?;
    Ok(gram_of(&sites.normalized_ylm(ell)))
}

pub fn max_offdiag(g: &CMatrix) -> f64 {
    let mut best: f64 = 0.0;
    for r in 0..g.nrows() {
        for c in 0..g.ncols() {
            if r != c {
                best = best.max(g[(r, c)].norm());
            }
        }
    }
    best
}

/// Symmetrically orthonormalized embedding of the compact basis into the
/// lattice: `T = V·(V†V)^{-1/2}`.
#[derive(Debug, Clone)]
pub struct TranslateIsometry {
    ell: u32,
    sites: ShellSites,
    raw: Vec<Vec<C64>>,
    columns: Vec<Vec<C64>>,
    gram: CMatrix,
}

impl TranslateIsometry {
    pub fn ell(&self) -> u32 {
        self.ell
    }

    pub fn grid(&self) -> Grid3 {
        self.sites.grid
    }

    pub fn shell(&self) -> ShellSpec {
        self.sites.shell
    }

    pub fn sites(&self) -> &ShellSites {
        &self.sites
    }

    pub fn gram(&self) -> &CMatrix {
        &self.gram
    }

    /// Orthonormal columns restricted to the shell support, indexed by `m + ℓ`.
    pub fn columns(&self) -> &[Vec<C64>] {
        &self.columns
    }

    /// Unit-normalized raw samples, indexed by `m + ℓ`.
    pub fn raw_columns(&self) -> &[Vec<C64>] {
        &self.raw
    }

    /// `max_m ‖column_m − raw_m‖`.
    pub fn max_column_shift(&self) -> f64 {
        self.columns
            .iter()
            .zip(&self.raw)
            .map(|(c, r)| {
                let diff: Vec<C64> = c.iter().zip(r).map(|(a, b)| a - b).collect();
                linalg::norm_sqr(&diff).sqrt()
            })
            .fold(0.0, f64::max)
    }

    /// `max |(T†T − I)_{ij}|`.
    pub fn orthonormality_error(&self) -> f64 {
        linalg::max_abs(&(gram_of(&self.columns) - CMatrix::identity(self.columns.len(), self.columns.len())))
            .max(
                self.columns
                    .iter()
                    .map(|c| (linalg::norm_sqr(c) - 1.0).abs())
                    .fold(0.0, f64::max),
            )
    }

    pub fn column_state(&self, m: i32) -> LatticeState {
        let col = &self.columns[(m + self.ell as i32) as usize];
        LatticeState::from_parts(self.grid(), self.sites.scatter(col), Some(self.ell))
    }
}

pub fn translate_isometry(ell: u32, grid: Grid3, shell: ShellSpec) -> Result<TranslateIsometry> {
    let sites = ShellSites::new(grid, shell)?;
    sites.check_resolution(ell)?;
    let raw = sites.normalized_ylm(ell);
    let gram = gram_of(&raw);
    let off = max_offdiag(&gram);
    if off > MAX_GRAM_OFFDIAG {
        return Err(Error::Conditioning(format!(
            "max off-diagonal Gram entry {off:.3} exceeds {MAX_GRAM_OFFDIAG}"
        )));
    }
    let root = linalg::inverse_sqrt(&gram, 1e-8)?;
    let columns = combine(&raw, &root);
    Ok(TranslateIsometry { ell, sites, raw, columns, gram })
}

/// `out_c = Σ_k vecs_k · coeffs[(k, c)]`.
fn combine(vecs: &[Vec<C64>], coeffs: &CMatrix) -> Vec<Vec<C64>> {
    (0..coeffs.ncols())
        .map(|c| {
            let mut out = vec![C64::from(0.0); vecs[0].len()];
            for (k, v) in vecs.iter().enumerate() {
                let w = coeffs[(k, c)];
                if w != C64::from(0.0) {
                    out.iter_mut().zip(v).for_each(|(o, x)| *o += x * w);
                }
            }
            out
        })
        .collect()
}

/// `T·amps`.
pub fn encode(compact: &CompactState, t: &TranslateIsometry) -> Result<LatticeState> {
    if compact.ell() != t.ell {
        return Err(Error::DimensionMismatch { expected: 2 * t.ell as usize + 1, actual: compact.dim() });
    }
    let mut values = vec![C64::from(0.0); t.sites.len()];
    for (col, &c) in t.columns.iter().zip(compact.amps()) {
        values.iter_mut().zip(col).for_each(|(v, x)| *v += x * c);
    }
    Ok(LatticeState::from_parts(t.grid(), t.sites.scatter(&values), Some(t.ell)))
}

/// Result of projecting a lattice state back onto the compact register.
#[derive(Debug, Clone)]
pub struct Decoded {
    /// Renormalized `T†·amps`.
    pub state: CompactState,
    /// `‖T†·amps‖` before renormalization.
    pub norm: f64,
    /// `‖(I − TT†)·amps‖`.
    pub residual: f64,
}

pub fn decode(lattice: &LatticeState, t: &TranslateIsometry) -> Result<Decoded> {
    lattice.grid.check_same(&t.grid())?;
    let local = t.sites.gather(&lattice.amps);
    let coeffs: Vec<C64> = t.columns.iter().map(|col| linalg::inner(col, &local)).collect();

    let mut projected = vec![C64::from(0.0); local.len()];
    for (col, &c) in t.columns.iter().zip(&coeffs) {
        projected.iter_mut().zip(col).for_each(|(p, x)| *p += x * c);
    }
    let on_support = linalg::compensated_sum(local.iter().zip(&projected).map(|(a, p)| (a - p).norm_sqr()));
    let off_support = t.sites.off_support_norm_sqr(&lattice.amps);
    let residual = (on_support + off_support).sqrt();

    let norm = linalg::norm_sqr(&coeffs).sqrt();
    let state = CompactState::normalized(t.ell, coeffs)?;
    Ok(Decoded { state, norm, residual })
}

/// Operator that is exact on the span of a frame of lattice vectors:
/// `ψ ↦ ψ + V·(M − I)·W†ψ` with `W†V = I`. For an orthonormal frame this is
/// unitary; for the raw sampled `Y_{ℓm}` family it acts exactly on every
/// member of the family.
#[derive(Debug, Clone)]
pub struct SpectralFrame {
    ell: u32,
    sites: ShellSites,
    vectors: Vec<Vec<C64>>,
    duals: Vec<Vec<C64>>,
}

impl SpectralFrame {
    pub fn from_isometry(t: &TranslateIsometry) -> Self {
        Self { ell: t.ell, sites: t.sites.clone(), vectors: t.columns.clone(), duals: t.columns.clone() }
    }

    /// Frame of the unit-normalized raw samples `state(ℓ, m)`.
    pub fn raw_samples(ell: u32, grid: Grid3, shell: ShellSpec) -> Result<Self> {
        let sites = ShellSites::new(grid, shell)?;
        sites.check_resolution(ell)?;
        let vectors = sites.normalized_ylm(ell);
        let gram = gram_of(&vectors);
        let inv = gram
            .clone()
            .try_inverse()
            .ok_or_else(|| Error::Conditioning("singular Gram matrix".into()))?;
        // W = V·G^{-1} gives W†V = G^{-1}·G = I.
        let duals = combine(&vectors, &inv);
        Ok(Self { ell, sites, vectors, duals })
    }

    pub fn ell(&self) -> u32 {
        self.ell
    }

    pub fn grid(&self) -> Grid3 {
        self.sites.grid
    }

    pub fn sites(&self) -> &ShellSites {
        &self.sites
    }

    /// Frame vector `m` as a dense lattice state.
    pub fn vector_state(&self, m: i32) -> LatticeState {
        let v = &self.vectors[(m + self.ell as i32) as usize];
        LatticeState::from_parts(self.grid(), self.sites.scatter(v), Some(self.ell))
    }

    /// Frame vector `m` restricted to the shell support.
    pub fn vector(&self, m: i32) -> &[C64] {
        &self.vectors[(m + self.ell as i32) as usize]
    }

    /// `W†ψ`.
    pub fn coefficients(&self, amps: &[C64]) -> Vec<C64> {
        let local = self.sites.gather(amps);
        self.duals.iter().map(|w| linalg::inner(w, &local)).collect()
    }

    /// Applies the frame operator for coefficient matrix `mat`.
    pub fn apply(&self, amps: &[C64], mat: &CMatrix) -> Vec<C64> {
        let coeffs = DVector::from_vec(self.coefficients(amps));
        let delta = mat * &coeffs - &coeffs;
        let mut out = amps.to_vec();
        for (k, v) in self.vectors.iter().enumerate() {
            let w = delta[k];
            for (&i, x) in self.sites.indices.iter().zip(v) {
                out[i] += x * w;
            }
        }
        out
    }
}
