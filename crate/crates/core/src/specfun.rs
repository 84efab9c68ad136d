//! Exact special functions and the Wigner-matrix rotation oracle.
//!
//! Conventions used throughout the crate:
//!
//! * Basis order is `m = −j, …, +j`, so index `i` holds `m = i − j`.
//! * Rotations are active z-y-z, `D(α, β, γ) = e^{−iαJz}·e^{−iβJy}·e^{−iγJz}`;
//!   a z-rotation by `φ` multiplies `amps[m]` by `e^{−imφ}`.
//! * Spherical harmonics carry the Condon–Shortley phase, and
//!   `Y_{ℓ,−m} = (−1)^m conj(Y_{ℓm})`.

use std::f64::consts::PI;

use nalgebra::DVector;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix, C64, I};
use crate::rotation::Rotation;

/// Largest angular momentum the dense oracle is meant for.
pub const MAX_ELL: u32 = 64;

/// Normalized associated Legendre values `P̄_{ℓm}(x)` for `m = 0..=ℓ`, with
/// `∫|P̄_{ℓm}(cos θ) e^{imφ}|² dΩ = 1` and Condon–Shortley phase.
///
/// Upward recurrence in ℓ with normalized coefficients; `x` is clamped into
/// `[−1, 1]`.
pub fn legendre_row(ell: u32, x: f64) -> Vec<f64> {
    let x = x.clamp(-1.0, 1.0);
    let s = ((1.0 - x) * (1.0 + x)).sqrt();
    let l = ell as usize;
    let mut out = vec![0.0; l + 1];
    let mut pmm = (1.0 / (4.0 * PI)).sqrt();
    for m in 0..=l {
        if m > 0 {
            let k = m as f64;
            pmm *= -((2.0 * k + 1.0) / (2.0 * k)).sqrt() * s;
        }
        if m == l {
            out[m] = pmm;
            break;
        }
        let mf = m as f64;
        let mut prev = pmm;
        let mut cur = x * (2.0 * mf + 3.0).sqrt() * pmm;
        let mut a_prev = (2.0 * mf + 3.0).sqrt();
        for deg in (m + 2)..=l {
            let d = deg as f64;
            let a = ((4.0 * d * d - 1.0) / (d * d - mf * mf)).sqrt();
            let next = a * (x * cur - prev / a_prev);
            prev = cur;
            cur = next;
            a_prev = a;
        }
        out[m] = cur;
    }
    out
}

fn check_lm(ell: u32, m: i32) -> Result<()> {
    if m.unsigned_abs() > ell {
        return Err(Error::Domain(format!("|m| = {} exceeds ell = {ell}", m.abs())));
    }
    Ok(())
}

/// `P̄_{ℓm}(x)`, extended to `m < 0` by `P̄_{ℓ,−m} = (−1)^m P̄_{ℓm}`.
pub fn assoc_legendre_norm(ell: u32, m: i32, x: f64) -> Result<f64> {
    check_lm(ell, m)?;
    if !(-1.0..=1.0).contains(&x) {
        return Err(Error::Domain(format!("x = {x} outside [-1, 1]")));
    }
    let value = legendre_row(ell, x)[m.unsigned_abs() as usize];
    Ok(if m < 0 && m % 2 != 0 { -value } else { value })
}

pub fn ylm(ell: u32, m: i32, theta: f64, phi: f64) -> Result<C64> {
    let p = assoc_legendre_norm(ell, m, theta.cos())?;
    Ok(C64::from_polar(1.0, m as f64 * phi) * p)
}

/// Spin stored as `2j` so that half-integers are representable.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Spin(u32);

impl Spin {
    pub const fn integer(ell: u32) -> Self {
        Spin(2 * ell)
    }

    pub const fn from_doubled(two_j: u32) -> Self {
        Spin(two_j)
    }

    pub const fn doubled(self) -> u32 {
        self.0
    }

    pub fn value(self) -> f64 {
        self.0 as f64 / 2.0
    }

    pub const fn dim(self) -> usize {
        self.0 as usize + 1
    }

    /// `m` for basis index `i`.
    pub fn m_at(self, i: usize) -> f64 {
        i as f64 - self.value()
    }

    pub const fn is_integer(self) -> bool {
        self.0.is_multiple_of(2)
    }
}

/// Dense `(2j+1)²` representation matrix of a rotation.
#[derive(Debug, Clone)]
pub struct WignerMatrix {
    pub spin: Spin,
    pub entries: CMatrix,
}

impl WignerMatrix {
    pub fn dim(&self) -> usize {
        self.spin.dim()
    }

    /// `max |(D†D − I)_{ij}|`.
    pub fn unitarity_deviation(&self) -> f64 {
        linalg::unitarity_deviation(&self.entries)
    }

    pub fn apply(&self, amps: &[C64]) -> Vec<C64> {
        let v = DVector::from_column_slice(amps);
        (&self.entries * v).iter().copied().collect()
    }
}

/// `J_z` for a spin.
pub fn jz_matrix(spin: Spin) -> CMatrix {
    let d = spin.dim();
    CMatrix::from_fn(d, d, |r, c| if r == c { C64::from(spin.m_at(r)) } else { C64::from(0.0) })
}

/// Raising operator: `J₊|m⟩ = √(j(j+1) − m(m+1))|m+1⟩`.
pub fn jplus_matrix(spin: Spin) -> CMatrix {
    let d = spin.dim();
    let j = spin.value();
    CMatrix::from_fn(d, d, |r, c| {
        if r == c + 1 {
            let m = spin.m_at(c);
            C64::from((j * (j + 1.0) - m * (m + 1.0)).max(0.0).sqrt())
        } else {
            C64::from(0.0)
        }
    })
}

pub fn jx_matrix(spin: Spin) -> CMatrix {
    let p = jplus_matrix(spin);
    (&p + p.adjoint()) * C64::from(0.5)
}

/// `J_y = (J₊ − J₋)/2i`.
pub fn jy_matrix(spin: Spin) -> CMatrix {
    let p = jplus_matrix(spin);
    (&p - p.adjoint()) * (-0.5 * I)
}

/// Cached spectral data of `J_y` for repeated rotations at one spin.
#[derive(Debug, Clone)]
pub struct SpinRotator {
    spin: Spin,
    jy_eigvals: Vec<f64>,
    jy_eigvecs: CMatrix,
}

impl SpinRotator {
    pub fn new(spin: Spin) -> Self {
        let (values, vectors) = linalg::hermitian_eigen(&jy_matrix(spin));
        // The spectrum of J_y is exactly {−j, …, j}; snap to it.
        let jy_eigvals = values.iter().map(|v| (2.0 * v).round() / 2.0).collect();
        Self { spin, jy_eigvals, jy_eigvecs: vectors }
    }

    pub fn spin(&self) -> Spin {
        self.spin
    }

    /// `d(β) = e^{−iβJy}`.
    pub fn small_d(&self, beta: f64) -> CMatrix {
        let v = &self.jy_eigvecs;
        let d = self.spin.dim();
        let scaled = CMatrix::from_fn(d, d, |r, c| {
            v[(r, c)] * C64::from_polar(1.0, -beta * self.jy_eigvals[c])
        });
        scaled * v.adjoint()
    }

    pub fn matrix(&self, rot: &Rotation) -> WignerMatrix {
        let mut entries = self.small_d(rot.beta);
        let d = self.spin.dim();
        for r in 0..d {
            let left = C64::from_polar(1.0, -rot.alpha * self.spin.m_at(r));
            for c in 0..d {
                let right = C64::from_polar(1.0, -rot.gamma * self.spin.m_at(c));
                entries[(r, c)] *= left * right;
            }
        }
        WignerMatrix { spin: self.spin, entries }
    }
}

/// Exact rotation matrix for integer `ell`.
pub fn wigner_oracle(ell: u32, rot: &Rotation) -> WignerMatrix {
    SpinRotator::new(Spin::integer(ell)).matrix(rot)
}

/// Exact rotation matrix for spin `two_j / 2`.
pub fn wigner_oracle_doubled(two_j: u32, rot: &Rotation) -> WignerMatrix {
    SpinRotator::new(Spin::from_doubled(two_j)).matrix(rot)
}

/// Compact `|m⟩` register for integer angular momentum.
#[derive(Debug, Clone, PartialEq)]
pub struct CompactState {
    ell: u32,
    amps: Vec<C64>,
}

const NORM_TOL: f64 = 1e-12;

impl CompactState {
    /// Wraps amplitudes that must already be unit-normalized.
    pub fn new(ell: u32, amps: Vec<C64>) -> Result<Self> {
        let dim = 2 * ell as usize + 1;
        if amps.len() != dim {
            return Err(Error::DimensionMismatch { expected: dim, actual: amps.len() });
        }
        let norm = linalg::norm_sqr(&amps).sqrt();
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(Error::Domain(format!("compact state has norm {norm}")));
        }
        Ok(Self { ell, amps })
    }

    /// Rescales to unit norm; rejects the zero vector.
    pub fn normalized(ell: u32, mut amps: Vec<C64>) -> Result<Self> {
        let norm = linalg::norm_sqr(&amps).sqrt();
        if !(norm > 0.0 && norm.is_finite()) {
            return Err(Error::Domain("cannot normalize a zero or non-finite vector".into()));
        }
        amps.iter_mut().for_each(|a| *a /= norm);
        Self::new(ell, amps)
    }

    pub fn basis(ell: u32, m: i32) -> Result<Self> {
        check_lm(ell, m)?;
        let mut amps = vec![C64::from(0.0); 2 * ell as usize + 1];
        amps[(m + ell as i32) as usize] = C64::from(1.0);
        Ok(Self { ell, amps })
    }

    /// Gaussian-random state (uniform on the unit sphere).
    pub fn random<R: Rng + ?Sized>(ell: u32, rng: &mut R) -> Self {
        let amps = (0..2 * ell + 1)
            .map(|_| C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
            .collect();
        Self::normalized(ell, amps).expect("gaussian vector is nonzero")
    }

    pub fn ell(&self) -> u32 {
        self.ell
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amps(&self) -> &[C64] {
        &self.amps
    }

    pub fn amp(&self, m: i32) -> C64 {
        self.amps[(m + self.ell as i32) as usize]
    }

    pub fn into_amps(self) -> Vec<C64> {
        self.amps
    }

    pub fn norm(&self) -> f64 {
        linalg::norm_sqr(&self.amps).sqrt()
    }

    /// `m` values in basis order.
    pub fn m_values(&self) -> impl Iterator<Item = i32> {
        let l = self.ell as i32;
        -l..=l
    }

    /// `⟨J_z⟩`.
    pub fn expect_jz(&self) -> f64 {
        self.m_values().zip(&self.amps).map(|(m, a)| m as f64 * a.norm_sqr()).sum()
    }

    /// Multiplies `amps[m]` by `e^{i f(m)}`.
    pub fn map_phase(&self, f: impl Fn(i32) -> f64) -> Self {
        let amps = self.m_values().zip(&self.amps).map(|(m, a)| a * C64::from_polar(1.0, f(m))).collect();
        Self { ell: self.ell, amps }
    }
}

/// `D(rot)·state`.
pub fn exact_rotate(state: &CompactState, rot: &Rotation) -> CompactState {
    let d = wigner_oracle(state.ell, rot);
    let amps = d.apply(&state.amps);
    CompactState { ell: state.ell, amps }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::FRAC_PI_2;

    /// Brute-force `P_ℓ^m(x)` from the Rodrigues formula with exact
    /// polynomial differentiation, normalized by the factorial formula.
    fn rodrigues_normalized(ell: u32, m: u32, x: f64) -> f64 {
        // (x² − 1)^ℓ coefficients, ascending powers.
        let l = ell as usize;
        let mut poly = vec![0.0f64; 2 * l + 1];
        for k in 0..=l {
            let binom = (0..k).fold(1.0, |acc, i| acc * (l - i) as f64 / (i + 1) as f64);
            let sign = if (l - k).is_multiple_of(2) { 1.0 } else { -1.0 };
            poly[2 * k] = binom * sign;
        }
        let derive = |p: &mut Vec<f64>| {
            let q: Vec<f64> = (1..p.len()).map(|i| p[i] * i as f64).collect();
            *p = if q.is_empty() { vec![0.0] } else { q };
        };
        for _ in 0..(ell + m) {
            derive(&mut poly);
        }
        let fact = |n: u32| (1..=n).fold(1.0, |acc, i| acc * i as f64);
        let deriv_value: f64 = poly.iter().enumerate().map(|(i, c)| c * x.powi(i as i32)).sum();
        let p_lm = (if m.is_multiple_of(2) { 1.0 } else { -1.0 })
            * (1.0 - x * x).powf(m as f64 / 2.0)
            * deriv_value
            / (2f64.powi(ell as i32) * fact(ell));
        let norm = ((2.0 * ell as f64 + 1.0) / (4.0 * PI) * fact(ell - m) / fact(ell + m)).sqrt();
        norm * p_lm
    }

    #[test]
    fn legendre_matches_rodrigues_oracle() {
        for ell in 0..=8 {
            for m in 0..=ell {
                for &x in &[-0.9, -0.31, 0.0, 0.5, 0.77, 1.0] {
                    let got = assoc_legendre_norm(ell, m as i32, x).unwrap();
                    let want = rodrigues_normalized(ell, m, x);
                    assert!((got - want).abs() < 1e-11, "l={ell} m={m} x={x}: {got} vs {want}");
                }
            }
        }
    }

    #[test]
    fn legendre_examples() {
        let y00 = assoc_legendre_norm(0, 0, 0.3).unwrap();
        assert!((y00 - 0.28209479177387814).abs() < 1e-15);
        assert!((y00 - 1.0 / (4.0 * PI).sqrt()).abs() < 1e-15);
        let p10 = assoc_legendre_norm(1, 0, 1.0).unwrap();
        assert!((p10 - rodrigues_normalized(1, 0, 1.0)).abs() < 1e-14);
        assert!((p10 - 0.4886025119029199).abs() < 1e-14);
        assert!(matches!(assoc_legendre_norm(2, 3, 0.5), Err(Error::Domain(_))));
        assert!(matches!(assoc_legendre_norm(2, 1, 1.5), Err(Error::Domain(_))));
    }

    #[test]
    fn legendre_normalization_by_quadrature() {
        // 2π ∫ P̄² dx = 1, composite Simpson on [−1, 1].
        let n = 4000;
        for &(ell, m) in &[(3u32, 1i32), (10, 4), (20, 0), (64, 7), (64, 64)] {
            let h = 2.0 / n as f64;
            let mut acc = 0.0;
            for i in 0..=n {
                let x = -1.0 + i as f64 * h;
                let w = if i == 0 || i == n { 1.0 } else if i % 2 == 1 { 4.0 } else { 2.0 };
                acc += w * assoc_legendre_norm(ell, m, x).unwrap().powi(2);
            }
            let integral = 2.0 * PI * acc * h / 3.0;
            assert!((integral - 1.0).abs() < 1e-6, "l={ell} m={m}: {integral}");
        }
    }

    #[test]
    fn ylm_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..10 {
            let (t, p) = (rng.random::<f64>() * PI, rng.random::<f64>() * 6.0);
            let y = ylm(0, 0, t, p).unwrap();
            assert!((y - C64::from(1.0 / (4.0 * PI).sqrt())).norm() < 1e-15);
        }
        let y11 = ylm(1, 1, FRAC_PI_2, 0.0).unwrap();
        let want = -rodrigues_normalized(1, 1, 0.0).abs();
        assert!((y11 - C64::from(want)).norm() < 1e-14);
        assert!((y11.re + (3.0 / (8.0 * PI)).sqrt()).abs() < 1e-14);
        let a = ylm(5, -3, 0.7, 0.2).unwrap().norm();
        let b = ylm(5, -3, 0.7, 0.2 + FRAC_PI_2).unwrap().norm();
        assert!((a - b).abs() < 1e-14);
    }

    #[test]
    fn ylm_negative_m_relation() {
        for ell in 0..6u32 {
            for m in 1..=ell as i32 {
                let pos = ylm(ell, m, 1.1, 0.4).unwrap();
                let neg = ylm(ell, -m, 1.1, 0.4).unwrap();
                let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
                assert!((neg - pos.conj() * sign).norm() < 1e-14);
            }
        }
    }

    #[test]
    fn addition_theorem() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for ell in 0..=20u32 {
            for _ in 0..5 {
                let (t, p) = (rng.random::<f64>() * PI, rng.random::<f64>() * 6.3);
                let sum: f64 = (-(ell as i32)..=ell as i32)
                    .map(|m| ylm(ell, m, t, p).unwrap().norm_sqr())
                    .sum();
                let want = (2.0 * ell as f64 + 1.0) / (4.0 * PI);
                assert!((sum - want).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn legendre_stable_at_ell_64() {
        for &x in &[-0.999, -0.5, 0.0, 0.123, 0.999] {
            let row = legendre_row(64, x);
            assert!(row.iter().all(|v| v.is_finite()));
            // Σ_m (2 − δ_{m0}) P̄² = (2ℓ+1)/4π
            let s: f64 = row.iter().enumerate().map(|(m, v)| if m == 0 { v * v } else { 2.0 * v * v }).sum();
            assert!((s - 129.0 / (4.0 * PI)).abs() < 1e-10);
        }
    }

    /// Wigner's explicit sum for `d^j_{m'm}(β)`, integer spins only.
    fn wigner_small_d_sum(j: i64, mp: i64, m: i64, beta: f64) -> f64 {
        let f = |n: i64| (1..=n).fold(1.0, |acc, i| acc * i as f64);
        let pre = (f(j + mp) * f(j - mp) * f(j + m) * f(j - m)).sqrt();
        let (c, s) = ((beta / 2.0).cos(), (beta / 2.0).sin());
        let kmin = 0.max(m - mp);
        let kmax = (j + m).min(j - mp);
        let mut acc = 0.0;
        for k in kmin..=kmax {
            let sign = if (mp - m + k) % 2 == 0 { 1.0 } else { -1.0 };
            let den = f(j + m - k) * f(k) * f(j - k - mp) * f(mp - m + k);
            acc += sign * c.powi((2 * j + m - mp - 2 * k) as i32) * s.powi((mp - m + 2 * k) as i32) / den;
        }
        pre * acc
    }

    #[test]
    fn small_d_matches_explicit_sum() {
        for ell in 0..=8u32 {
            let rot = SpinRotator::new(Spin::integer(ell));
            for &beta in &[0.0, 0.3, 1.7, PI] {
                let d = rot.small_d(beta);
                let l = ell as i64;
                for mp in -l..=l {
                    for m in -l..=l {
                        let want = wigner_small_d_sum(l, mp, m, beta);
                        let got = d[((mp + l) as usize, (m + l) as usize)];
                        assert!((got - C64::from(want)).norm() < 1e-10, "l={ell} {mp},{m} b={beta}");
                    }
                }
            }
        }
    }

    /// Dense Taylor exponential, independent of the eigendecomposition.
    fn expm_taylor(a: &CMatrix) -> CMatrix {
        let n = a.nrows();
        let mut term = CMatrix::identity(n, n);
        let mut sum = term.clone();
        for k in 1..60 {
            term = &term * a * C64::from(1.0 / k as f64);
            sum += &term;
        }
        sum
    }

    #[test]
    fn ell_one_pi_rotation_matches_dense_exponential() {
        let spin = Spin::integer(1);
        let target = expm_taylor(&(jy_matrix(spin) * C64::new(0.0, -PI)));
        let d = wigner_oracle(1, &Rotation::about_y(PI));
        assert!(linalg::max_abs(&(d.entries.clone() - target)) < 1e-12);
        assert!((d.entries[(1, 1)] + C64::from(1.0)).norm() < 1e-12);
    }

    #[test]
    fn identity_and_unitarity() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for ell in [0u32, 1, 5, 10, 64] {
            let d = wigner_oracle(ell, &Rotation::identity());
            let n = d.dim();
            assert!(linalg::max_abs(&(d.entries - CMatrix::identity(n, n))) < 1e-12);
            let r = Rotation::haar(&mut rng);
            assert!(wigner_oracle(ell, &r).unitarity_deviation() < 1e-10);
        }
    }

    #[test]
    fn half_integer_spin_one_half() {
        // Index order (m = −½, +½): d = [[cos β/2, sin β/2], [−sin β/2, cos β/2]]
        let d = wigner_oracle_doubled(1, &Rotation::about_y(0.8));
        let (c, s) = ((0.4f64).cos(), (0.4f64).sin());
        let want = CMatrix::from_row_slice(2, 2, &[c.into(), s.into(), (-s).into(), c.into()]);
        assert!(linalg::max_abs(&(d.entries - want)) < 1e-13);
    }

    #[test]
    fn exact_rotate_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let s = CompactState::random(4, &mut rng);
        let z = exact_rotate(&s, &Rotation::about_z(0.9));
        for (m, (a, b)) in s.m_values().zip(s.amps().iter().zip(z.amps())) {
            assert!((a * C64::from_polar(1.0, -(m as f64) * 0.9) - b).norm() < 1e-12);
        }
        let id = exact_rotate(&s, &Rotation::identity());
        assert!(s.amps().iter().zip(id.amps()).all(|(a, b)| (a - b).norm() < 1e-12));
        let r = Rotation::haar(&mut rng);
        let back = exact_rotate(&exact_rotate(&s, &r), &r.inverse());
        assert!(s.amps().iter().zip(back.amps()).all(|(a, b)| (a - b).norm() < 1e-10));
        assert!((exact_rotate(&s, &r).norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn compact_state_validation() {
        assert!(CompactState::new(1, vec![C64::from(1.0); 2]).is_err());
        assert!(CompactState::new(1, vec![C64::from(1.0); 3]).is_err());
        assert!(CompactState::normalized(1, vec![C64::from(0.0); 3]).is_err());
        assert!(CompactState::basis(2, 3).is_err());
        let b = CompactState::basis(2, -1).unwrap();
        assert_eq!(b.amp(-1), C64::from(1.0));
        assert_eq!(b.expect_jz(), -1.0);
    }
}
