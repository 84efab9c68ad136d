//! Symmetric subspace of N qubits and coupling of two angular momenta.
//!
//! The symmetric basis state `S_h` is the normalized uniform superposition
//! of all N-bit strings of Hamming weight `h`. Qubit `|0⟩` is spin up, so
//! `S_h` is `|N/2, N/2 − h⟩`, which sits at Wigner index `N − h`.

use nalgebra::{DMatrix, Matrix2};

use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix, C64};
use crate::rotation::Rotation;
use crate::specfun::{jplus_matrix, jx_matrix, jy_matrix, jz_matrix, wigner_oracle_doubled, Spin};

/// Largest N for brute-force constructions over `2^N` amplitudes.
pub const MAX_BRUTE_QUBITS: u32 = 12;

/// Largest N for the combinatorial hyper-Hadamard.
pub const MAX_HADAMARD_QUBITS: u32 = 30;

fn binomial(n: u32, k: u32) -> i64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k) as i64;
    (0..k).fold(1i64, |acc, i| acc * (n as i64 - i) / (i + 1))
}

/// Binary Krawtchouk polynomial `K_k(x; N) = Σ_j (−1)^j C(x, j) C(N − x, k − j)`.
pub fn krawtchouk(k: u32, x: u32, n: u32) -> i64 {
    (0..=k)
        .map(|j| {
            let term = binomial(x, j) * binomial(n - x, k - j);
            if j % 2 == 0 {
                term
            } else {
                -term
            }
        })
        .sum()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SymmetricBasis {
    n_qubits: u32,
}

impl SymmetricBasis {
    pub fn new(n_qubits: u32) -> Result<Self> {
        if n_qubits == 0 || n_qubits > MAX_BRUTE_QUBITS {
            return Err(Error::Domain(format!("N = {n_qubits} must lie in 1..={MAX_BRUTE_QUBITS}")));
        }
        Ok(Self { n_qubits })
    }

    pub fn n_qubits(&self) -> u32 {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        self.n_qubits as usize + 1
    }

    /// `S_h` as a dense `2^N` vector.
    pub fn vector(&self, h: u32) -> Vec<C64> {
        let amp = 1.0 / (binomial(self.n_qubits, h) as f64).sqrt();
        (0..1u32 << self.n_qubits)
            .map(|x| if x.count_ones() == h { C64::from(amp) } else { C64::from(0.0) })
            .collect()
    }

    /// `2^N × (N+1)` matrix with columns `S_0 … S_N`.
    pub fn matrix(&self) -> CMatrix {
        let cols: Vec<Vec<C64>> = (0..=self.n_qubits).map(|h| self.vector(h)).collect();
        CMatrix::from_fn(1 << self.n_qubits, self.dim(), |r, c| cols[c][r])
    }
}

/// `H^{⊗N}` restricted to the symmetric subspace:
/// entry `(h', h) = 2^{−N/2}·√(C(N,h)/C(N,h'))·K_{h'}(h; N)`.
pub fn hyper_hadamard(n: u32) -> Result<DMatrix<f64>> {
    if n == 0 || n > MAX_HADAMARD_QUBITS {
        return Err(Error::Domain(format!("N = {n} must lie in 1..={MAX_HADAMARD_QUBITS}")));
    }
    let scale = 2f64.powf(-(n as f64) / 2.0);
    let d = n as usize + 1;
    Ok(DMatrix::from_fn(d, d, |hp, h| {
        let (hp, h) = (hp as u32, h as u32);
        let ratio = binomial(n, h) as f64 / binomial(n, hp) as f64;
        scale * ratio.sqrt() * krawtchouk(hp, h, n) as f64
    }))
}

/// Applies `u` to every qubit of a `2^N` vector. Bit `N−1−q` of the index
/// is qubit `q`.
fn apply_each_qubit(u: &Matrix2<C64>, amps: &mut [C64], n: u32) {
    for q in 0..n {
        let bit = 1usize << q;
        for x in 0..amps.len() {
            if x & bit == 0 {
                let (a0, a1) = (amps[x], amps[x | bit]);
                amps[x] = u[(0, 0)] * a0 + u[(0, 1)] * a1;
                amps[x | bit] = u[(1, 0)] * a0 + u[(1, 1)] * a1;
            }
        }
    }
}

/// `U^{⊗N}` on the symmetric subspace together with the largest norm that
/// any image leaves outside it.
pub fn restrict_with_leakage(u: &Matrix2<C64>, n: u32) -> Result<(CMatrix, f64)> {
    let basis = SymmetricBasis::new(n)?;
    let dev = (u.adjoint() * u - Matrix2::identity()).iter().map(|z| z.norm()).fold(0.0, f64::max);
    if dev > 1e-10 {
        return Err(Error::NotUnitary(dev));
    }
    let cols: Vec<Vec<C64>> = (0..=n).map(|h| basis.vector(h)).collect();
    let d = basis.dim();
    let mut out = CMatrix::zeros(d, d);
    let mut leak = 0.0f64;
    for (h, col) in cols.iter().enumerate() {
        let mut img = col.clone();
        apply_each_qubit(u, &mut img, n);
        let mut rest = img.clone();
        for (hp, s) in cols.iter().enumerate() {
            let c = linalg::inner(s, &img);
            out[(hp, h)] = c;
            rest.iter_mut().zip(s).for_each(|(r, v)| *r -= v * c);
        }
        leak = leak.max(linalg::norm_sqr(&rest).sqrt());
    }
    Ok((out, leak))
}

/// `U^{⊗N}` on the symmetric subspace, by brute force over `2^N` amplitudes.
pub fn symmetric_restrict(u: &Matrix2<C64>, n: u32) -> Result<CMatrix> {
    let (m, leak) = restrict_with_leakage(u, n)?;
    if leak > 1e-12 {
        return Err(Error::Leakage(leak));
    }
    Ok(m)
}

/// The rotation as a qubit unitary in the `(|0⟩, |1⟩) = (up, down)` basis.
pub fn qubit_unitary(rot: &Rotation) -> Matrix2<C64> {
    // Wigner index order is (down, up).
    let d = wigner_oracle_doubled(1, rot).entries;
    Matrix2::new(d[(1, 1)], d[(1, 0)], d[(0, 1)], d[(0, 0)])
}

/// `max |restrict(U) − D^{N/2}|` after the alignment `h ↔ N − h`.
pub fn symmetric_vs_wigner(n: u32, rot: &Rotation) -> Result<f64> {
    let r = symmetric_restrict(&qubit_unitary(rot), n)?;
    let d = wigner_oracle_doubled(n, rot).entries;
    let k = n as usize;
    let mut worst = 0.0f64;
    for hp in 0..=k {
        for h in 0..=k {
            worst = worst.max((r[(hp, h)] - d[(k - hp, k - h)]).norm());
        }
    }
    Ok(worst)
}

/// State on the product of spin `ℓ` and spin `ℓ'` registers; index
/// `(m + ℓ)·(2ℓ'+1) + (m' + ℓ')`.
#[derive(Debug, Clone, PartialEq)]
pub struct JointState {
    pub ell: u32,
    pub ell2: u32,
    pub amps: Vec<C64>,
}

impl JointState {
    pub fn index(&self, m: i32, m2: i32) -> usize {
        ((m + self.ell as i32) * (2 * self.ell2 as i32 + 1) + m2 + self.ell2 as i32) as usize
    }

    pub fn amp(&self, m: i32, m2: i32) -> C64 {
        self.amps[self.index(m, m2)]
    }
}

/// `|M⟩ → c·Σ_m |m, M − m⟩` over all admissible `m`, with `c` normalizing.
pub fn add_translate(big_m: i32, ell: u32, ell2: u32) -> Result<JointState> {
    let (l1, l2) = (ell as i32, ell2 as i32);
    let terms: Vec<i32> = (-l1..=l1).filter(|m| (big_m - m).abs() <= l2).collect();
    if terms.is_empty() {
        return Err(Error::Domain(format!("no pairs (m, m') with m + m' = {big_m} for ell = {ell}, ell' = {ell2}")));
    }
    let c = 1.0 / (terms.len() as f64).sqrt();
    let mut out = JointState { ell, ell2, amps: vec![C64::from(0.0); ((2 * l1 + 1) * (2 * l2 + 1)) as usize] };
    for m in terms {
        let i = out.index(m, big_m - m);
        out.amps[i] = C64::from(c);
    }
    Ok(out)
}

/// Coupled basis of `j₁ ⊗ j₂`: one isometry per total spin `L`, columns
/// `|L, M⟩` for `M = −L..=L` in product-basis coordinates.
#[derive(Debug, Clone)]
pub struct CGDecomposition {
    pub j1: Spin,
    pub j2: Spin,
    pub blocks: Vec<(Spin, CMatrix)>,
}

/// Relative tolerance when identifying `L` from a `J²` eigenvalue.
const CG_TOL: f64 = 1e-8;

/// Largest spin (doubled) accepted by [`cg_oracle`].
pub const MAX_CG_DOUBLED: u32 = 12;

fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.kronecker(b)
}

/// Builds the coupled basis by diagonalizing total `J²` in each total-`M`
/// sector, then fixing signs: the top state of each `L` has a positive
/// component on the largest `m₁`, and `⟨L,M−1|J₋|L,M⟩ > 0` below it.
pub fn cg_oracle(j1: Spin, j2: Spin) -> Result<CGDecomposition> {
    if j1.doubled() > MAX_CG_DOUBLED || j2.doubled() > MAX_CG_DOUBLED {
        return Err(Error::Domain(format!("spins must be at most {}", MAX_CG_DOUBLED / 2)));
    }
    let (d1, d2) = (j1.dim(), j2.dim());
    let (i1, i2) = (CMatrix::identity(d1, d1), CMatrix::identity(d2, d2));
    let total = |f: fn(Spin) -> CMatrix| kron(&f(j1), &i2) + kron(&i1, &f(j2));
    let (jx, jy, jz) = (total(jx_matrix), total(jy_matrix), total(jz_matrix));
    let j2_op = &jx * &jx + &jy * &jy + &jz * &jz;
    let jminus = total(jplus_matrix).adjoint();
    let dim = d1 * d2;

    // Doubled total M of each product basis state.
    let two_m: Vec<i32> = (0..dim)
        .map(|k| (2 * (k / d2) as i32 - j1.doubled() as i32) + (2 * (k % d2) as i32 - j2.doubled() as i32))
        .collect();

    let lo = (j1.doubled() as i32 - j2.doubled() as i32).unsigned_abs();
    let hi = j1.doubled() + j2.doubled();
    // states[(2L, 2M)] = real coupled vector in product coordinates.
    let mut states: std::collections::BTreeMap<(u32, i32), Vec<f64>> = Default::default();
    for sector in (-(hi as i32)..=hi as i32).step_by(2) {
        let idx: Vec<usize> = (0..dim).filter(|&k| two_m[k] == sector).collect();
        let s = idx.len();
        let mut h = DMatrix::<f64>::zeros(s, s);
        for (a, &ka) in idx.iter().enumerate() {
            for (b, &kb) in idx.iter().enumerate() {
                let z = j2_op[(ka, kb)];
                if z.im.abs() > 1e-12 {
                    return Err(Error::Degeneracy(format!("J² entry {z} is not real")));
                }
                h[(a, b)] = z.re;
            }
        }
        let eig = h.symmetric_eigen();
        for (c, &lambda) in eig.eigenvalues.iter().enumerate() {
            let two_l = ((1.0 + 4.0 * lambda).max(0.0).sqrt() - 1.0).round() as u32;
            let l = two_l as f64 / 2.0;
            if (lambda - l * (l + 1.0)).abs() > CG_TOL * lambda.abs().max(1.0)
                || two_l < lo
                || two_l > hi
                || !(two_l + lo).is_multiple_of(2)
            {
                return Err(Error::Degeneracy(format!("eigenvalue {lambda} is not L(L+1) for an allowed L")));
            }
            let mut v = vec![0.0; dim];
            for (a, &ka) in idx.iter().enumerate() {
                v[ka] = eig.eigenvectors[(a, c)];
            }
            if states.insert((two_l, sector), v).is_some() {
                return Err(Error::Degeneracy(format!("L = {l} appears twice in sector 2M = {sector}")));
            }
        }
    }

    let mut blocks = Vec::new();
    for two_l in (lo..=hi).step_by(2) {
        let l = two_l as i32;
        // Top state: positive on the largest m₁ present.
        let top = states.get_mut(&(two_l, l)).ok_or_else(|| Error::Degeneracy(format!("missing top state of 2L = {two_l}")))?;
        let lead = (0..dim).rev().find(|&k| top[k].abs() > 1e-10).expect("nonzero eigenvector");
        if top[lead] < 0.0 {
            top.iter_mut().for_each(|x| *x = -*x);
        }
        for two_mm in ((-l..l).step_by(2)).rev() {
            let upper = states[&(two_l, two_mm + 2)].clone();
            let lower = states.get_mut(&(two_l, two_mm)).ok_or_else(|| Error::Degeneracy("missing ladder state".into()))?;
            let lowered: Vec<f64> = (0..dim).map(|r| (0..dim).map(|c| jminus[(r, c)].re * upper[c]).sum()).collect();
            let ladder: f64 = lowered.iter().zip(lower.iter()).map(|(a, b)| a * b).sum();
            if ladder < 0.0 {
                lower.iter_mut().for_each(|x| *x = -*x);
            }
        }
        let cols = two_l as usize + 1;
        let mat = CMatrix::from_fn(dim, cols, |r, c| C64::from(states[&(two_l, 2 * c as i32 - l)][r]));
        blocks.push((Spin::from_doubled(two_l), mat));
    }
    Ok(CGDecomposition { j1, j2, blocks })
}

impl CGDecomposition {
    pub fn block(&self, l: Spin) -> Option<&CMatrix> {
        self.blocks.iter().find(|(s, _)| *s == l).map(|(_, m)| m)
    }

    /// All blocks side by side, ascending `L`.
    pub fn full_matrix(&self) -> CMatrix {
        let dim = self.j1.dim() * self.j2.dim();
        let mut out = CMatrix::zeros(dim, dim);
        let mut col = 0;
        for (_, b) in &self.blocks {
            out.columns_mut(col, b.ncols()).copy_from(b);
            col += b.ncols();
        }
        out
    }

    /// `max |C†C − I|` over the full coupled basis.
    pub fn orthonormality_error(&self) -> f64 {
        linalg::unitarity_deviation(&self.full_matrix())
    }

    /// `max |C†(D₁⊗D₂)C − ⊕_L D^L|`.
    pub fn intertwining_error(&self, rot: &Rotation) -> f64 {
        let d1 = wigner_oracle_doubled(self.j1.doubled(), rot).entries;
        let d2 = wigner_oracle_doubled(self.j2.doubled(), rot).entries;
        let c = self.full_matrix();
        let conj = c.adjoint() * kron(&d1, &d2) * &c;
        let mut target = CMatrix::zeros(c.ncols(), c.ncols());
        let mut off = 0;
        for (l, b) in &self.blocks {
            let d = wigner_oracle_doubled(l.doubled(), rot).entries;
            target.view_mut((off, off), (b.ncols(), b.ncols())).copy_from(&d);
            off += b.ncols();
        }
        linalg::max_abs(&(conj - target))
    }
}

/// `|⟨ℓ+ℓ', M | add_translate(M)⟩|²` against the coupled top-`L` state.
pub fn add_translate_overlap(big_m: i32, ell: u32, ell2: u32) -> Result<f64> {
    let joint = add_translate(big_m, ell, ell2)?;
    let cg = cg_oracle(Spin::integer(ell), Spin::integer(ell2))?;
    let top = Spin::integer(ell + ell2);
    let block = cg.block(top).expect("top block present");
    let col = (big_m + (ell + ell2) as i32) as usize;
    let ov: C64 = block.column(col).iter().zip(&joint.amps).map(|(a, b)| a.conj() * b).sum();
    Ok(ov.norm_sqr())
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2};

    fn hadamard() -> Matrix2<C64> {
        Matrix2::new(1.0, 1.0, 1.0, -1.0).map(|x| C64::from(x * FRAC_1_SQRT_2))
    }

    /// Explicit 4-dimensional H⊗H projected on {|00⟩, (|01⟩+|10⟩)/√2, |11⟩}.
    #[test]
    fn hyper_hadamard_two_qubits_by_hand() {
        let hh = [[1.0, 1.0, 1.0, 1.0], [1.0, -1.0, 1.0, -1.0], [1.0, 1.0, -1.0, -1.0], [1.0, -1.0, -1.0, 1.0]];
        let s = FRAC_1_SQRT_2;
        let basis = [[1.0, 0.0, 0.0, 0.0], [0.0, s, s, 0.0], [0.0, 0.0, 0.0, 1.0]];
        let m = hyper_hadamard(2).unwrap();
        for a in 0..3 {
            for b in 0..3 {
                let mut e = 0.0;
                for i in 0..4 {
                    for j in 0..4 {
                        e += basis[a][i] * hh[i][j] * 0.5 * basis[b][j];
                    }
                }
                assert!((m[(a, b)] - e).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn hyper_hadamard_examples() {
        let m = hyper_hadamard(1).unwrap();
        let s = FRAC_1_SQRT_2;
        assert!((m - DMatrix::from_row_slice(2, 2, &[s, s, s, -s])).abs().max() < 1e-15);
        assert!(hyper_hadamard(0).is_err());
        assert!(hyper_hadamard(31).is_err());
        for n in [5, 20, 30] {
            let m = hyper_hadamard(n).unwrap();
            assert!((&m - m.transpose()).abs().max() < 1e-12);
            let sq = &m * &m;
            let d = m.nrows();
            assert!((sq - DMatrix::<f64>::identity(d, d)).abs().max() < 1e-9);
        }
    }

    #[test]
    fn hyper_hadamard_matches_brute_force() {
        for n in 1..=MAX_BRUTE_QUBITS {
            let fast = hyper_hadamard(n).unwrap();
            let slow = symmetric_restrict(&hadamard(), n).unwrap();
            let dev = fast.map(C64::from) - slow;
            assert!(linalg::max_abs(&dev) < 1e-12, "N={n}");
        }
    }

    #[test]
    fn restrict_examples() {
        let id = symmetric_restrict(&Matrix2::identity(), 5).unwrap();
        assert!(linalg::max_abs(&(id - CMatrix::identity(6, 6))) < 1e-14);
        let phi = 0.37;
        let ph = Matrix2::new(C64::from(1.0), C64::from(0.0), C64::from(0.0), C64::from_polar(1.0, phi));
        let r = symmetric_restrict(&ph, 6).unwrap();
        for h in 0..7 {
            for hp in 0..7 {
                let want = if h == hp { C64::from_polar(1.0, h as f64 * phi) } else { C64::from(0.0) };
                assert!((r[(hp, h)] - want).norm() < 1e-12);
            }
        }
        let bad = Matrix2::new(1.0, 0.0, 0.0, 2.0).map(C64::from);
        assert!(matches!(symmetric_restrict(&bad, 3), Err(Error::NotUnitary(_))));
        assert!(SymmetricBasis::new(13).is_err());
    }

    #[test]
    fn symmetric_basis_is_orthonormal() {
        let b = SymmetricBasis::new(6).unwrap().matrix();
        assert!(linalg::unitarity_deviation(&b) < 1e-14);
    }

    #[test]
    fn restrict_is_a_homomorphism() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..5 {
            let (u, v) = (qubit_unitary(&Rotation::haar(&mut rng)), qubit_unitary(&Rotation::haar(&mut rng)));
            let lhs = symmetric_restrict(&(u * v), 7).unwrap();
            let rhs = symmetric_restrict(&u, 7).unwrap() * symmetric_restrict(&v, 7).unwrap();
            assert!(linalg::max_abs(&(lhs - rhs)) < 1e-10);
        }
    }

    #[test]
    fn symmetric_power_is_the_wigner_matrix() {
        assert!(symmetric_vs_wigner(4, &Rotation::identity()).unwrap() < 1e-14);
        assert!(symmetric_vs_wigner(2, &Rotation::about_y(FRAC_PI_2)).unwrap() <= 1e-10);
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for n in 1..=8 {
            let rot = Rotation::haar(&mut rng);
            assert!(symmetric_vs_wigner(n, &rot).unwrap() <= 1e-9, "N={n}");
        }
    }

    #[test]
    fn add_translate_examples() {
        let top = add_translate(3, 2, 1).unwrap();
        assert_eq!(top.amp(2, 1), C64::from(1.0));
        assert_eq!(top.amps.iter().filter(|a| a.norm() > 0.0).count(), 1);

        let mid = add_translate(0, 1, 1).unwrap();
        let nz: Vec<&C64> = mid.amps.iter().filter(|a| a.norm() > 0.0).collect();
        assert_eq!(nz.len(), 3);
        assert!(nz.iter().all(|a| (a.re - 1.0 / 3f64.sqrt()).abs() < 1e-15));
        assert!(add_translate(4, 2, 1).is_err());
    }

    #[test]
    fn add_translate_is_a_z_eigenvector() {
        let phi = 0.91;
        for big_m in -5..=5 {
            let s = add_translate(big_m, 3, 2).unwrap();
            for m in -3..=3 {
                for m2 in -2..=2 {
                    let a = s.amp(m, m2);
                    let rotated = a * C64::from_polar(1.0, -((m + m2) as f64) * phi);
                    let want = a * C64::from_polar(1.0, -(big_m as f64) * phi);
                    assert_eq!(rotated, want);
                }
            }
        }
    }

    #[test]
    fn singlet_and_triplet() {
        let half = Spin::from_doubled(1);
        let cg = cg_oracle(half, half).unwrap();
        let dims: Vec<u32> = cg.blocks.iter().map(|(l, _)| l.doubled()).collect();
        assert_eq!(dims, vec![0, 2]);
        // Product index (i1, i2) with index 0 = down; |01⟩ is up-down = index 2.
        let singlet = cg.block(Spin::from_doubled(0)).unwrap();
        let (ud, du) = (singlet[(2, 0)], singlet[(1, 0)]);
        assert!((ud.norm() - FRAC_1_SQRT_2).abs() < 1e-12);
        assert!((ud + du).norm() < 1e-12);
        assert!(ud.re > 0.0);
    }

    #[test]
    fn known_coefficients() {
        // ⟨1,1; 1,−1 | 0,0⟩ = 1/√3 and ⟨1,0; 1,0 | 2,0⟩ = √(2/3).
        let cg = cg_oracle(Spin::integer(1), Spin::integer(1)).unwrap();
        let idx = |m1: i32, m2: i32| ((m1 + 1) * 3 + m2 + 1) as usize;
        let l0 = cg.block(Spin::integer(0)).unwrap();
        assert!((l0[(idx(1, -1), 0)].re - 1.0 / 3f64.sqrt()).abs() < 1e-12);
        let l2 = cg.block(Spin::integer(2)).unwrap();
        assert!((l2[(idx(0, 0), 2)].re - (2.0f64 / 3.0).sqrt()).abs() < 1e-12);
    }

    #[test]
    fn cg_blocks_and_intertwining() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for (a, b) in [(1, 2), (2, 2), (3, 1), (2, 5), (4, 4)] {
            let cg = cg_oracle(Spin::from_doubled(a), Spin::from_doubled(b)).unwrap();
            let total: usize = cg.blocks.iter().map(|(l, _)| l.dim()).sum();
            assert_eq!(total, (a as usize + 1) * (b as usize + 1));
            assert!(cg.orthonormality_error() < 1e-12);
            let rot = Rotation::haar(&mut rng);
            assert!(cg.intertwining_error(&rot) < 1e-9, "({a},{b})");
        }
        assert!(cg_oracle(Spin::integer(7), Spin::integer(1)).is_err());
    }

    #[test]
    fn uniform_translation_is_not_the_cg_image() {
        assert!((add_translate_overlap(3, 2, 1).unwrap() - 1.0).abs() < 1e-12);
        let mid = add_translate_overlap(0, 1, 1).unwrap();
        // |2,0⟩ = (|1,−1⟩ + 2|0,0⟩ + |−1,1⟩)/√6 against the uniform state.
        assert!((mid - 8.0 / 9.0).abs() < 1e-12);
    }
}
