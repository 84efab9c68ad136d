//! Quick invariants that hold by construction; a broken build fails them.

use std::f64::consts::{FRAC_PI_2, PI, TAU};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use su2lat::kickedtop::kick_phase;
use su2lat::lattice::{sample_ylm_state, translate_isometry, Axis, Grid3, ShellSpec};
use su2lat::pipeline::{compose_rotations, fidelity, rotate_z_compact};
use su2lat::shear::{rotation_3d, rotation_90, shear_2d};
use su2lat::specfun::{exact_rotate, wigner_oracle, ylm};
use su2lat::stateprep::{apply_prep, build_prep_plan, TargetDensity};
use su2lat::symm::{add_translate, hyper_hadamard};
use su2lat::{CompactState, Rotation, C64};

type Check = (&'static str, fn() -> bool);

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol
}

fn states_close(a: &CompactState, b: &CompactState, tol: f64) -> bool {
    a.amps().iter().zip(b.amps()).all(|(x, y)| (x - y).norm() <= tol)
}

fn random_state(ell: u32, seed: u64) -> CompactState {
    CompactState::random(ell, &mut ChaCha8Rng::seed_from_u64(seed))
}

fn grid8() -> Grid3 {
    Grid3::new(8).expect("8 is a valid size")
}

pub const CHECKS: &[Check] = &[
    ("ylm: Y00 is constant", || {
        let v = 1.0 / (4.0 * PI).sqrt();
        [(0.3, 0.0), (1.2, 2.0), (2.9, -1.0)]
            .iter()
            .all(|&(t, p)| ylm(0, 0, t, p).map(|y| close(y.re, v, 1e-15) && y.im == 0.0).unwrap_or(false))
    }),
    ("ylm: |m| > l is rejected", || ylm(2, 3, 0.5, 0.0).is_err()),
    ("wigner: identity rotation", || {
        let w = wigner_oracle(3, &Rotation::identity());
        let s = random_state(3, 1);
        w.apply(s.amps()).iter().zip(s.amps()).all(|(a, b)| (a - b).norm() < 1e-15)
    }),
    ("rotate: R then inverse", || {
        let r = Rotation::euler(0.3, 1.1, -2.0);
        let s = random_state(4, 2);
        states_close(&exact_rotate(&exact_rotate(&s, &r), &r.inverse()), &s, 1e-10)
    }),
    ("rotate: z phase e^{-im phi}", || {
        let s = CompactState::basis(1, 1).expect("valid m");
        close((rotate_z_compact(&s, FRAC_PI_2).amp(1) - C64::new(0.0, -1.0)).norm(), 0.0, 1e-15)
    }),
    ("rotate: 2 pi about z is identity", || {
        let s = random_state(3, 3);
        states_close(&rotate_z_compact(&s, TAU), &s, 1e-12)
    }),
    ("compose: with identity", || {
        let r = Rotation::euler(0.7, 0.4, -0.2);
        let c = compose_rotations(&[r, Rotation::identity()]);
        let (a, b) = (c.matrix(), r.matrix());
        (0..3).all(|i| (0..3).all(|j| close(a[i][j], b[i][j], 1e-12)))
    }),
    ("fidelity: phase blind", || {
        let s = random_state(2, 4);
        close(fidelity(&s, &s.map_phase(|_| 1.3)).unwrap_or(0.0), 1.0, 1e-12)
    }),
    ("shear: zero is identity", || shear_2d(grid8(), Axis::X, Axis::Y, 0.0).map(|p| p.is_identity()).unwrap_or(false)),
    ("shear: a then -a", || {
        let (f, b) = (shear_2d(grid8(), Axis::X, Axis::Y, 0.7), shear_2d(grid8(), Axis::X, Axis::Y, -0.7));
        matches!((f, b), (Ok(f), Ok(b)) if f.then(&b).map(|p| p.is_identity()).unwrap_or(false))
    }),
    ("shear: four quarter turns", || {
        [Axis::X, Axis::Y, Axis::Z].iter().all(|&a| rotation_90(grid8(), a, 4).is_identity())
    }),
    ("shear: theta and -theta are inverse", || {
        let (f, b) = (rotation_3d(grid8(), Axis::Y, 0.9), rotation_3d(grid8(), Axis::Y, -0.9));
        matches!((f, b), (Ok(f), Ok(b)) if f.inverse() == b)
    }),
    ("lattice: l = 0 is uniform on the shell", || {
        let g = Grid3::new(32).expect("valid");
        match sample_ylm_state(0, 0, g, ShellSpec::default_for(&g)) {
            Ok(s) => {
                let nz: Vec<f64> = s.amps().iter().filter(|a| a.norm() > 0.0).map(|a| a.re).collect();
                nz.iter().all(|&a| close(a, nz[0], 1e-15))
            }
            Err(_) => false,
        }
    }),
    ("lattice: isometry is orthonormal", || {
        let g = Grid3::new(32).expect("valid");
        translate_isometry(2, g, ShellSpec::default_for(&g)).map(|t| t.orthonormality_error() < 1e-12).unwrap_or(false)
    }),
    ("prep: point mass", || {
        let mut p = vec![0.0; 8];
        p[0] = 1.0;
        match TargetDensity::new(p).and_then(|d| build_prep_plan(&d)) {
            Ok(plan) => {
                let out = apply_prep(&plan);
                plan.angles.iter().flatten().all(|&a| a == 0.0) && out[0] == C64::from(1.0)
            }
            Err(_) => false,
        }
    }),
    ("prep: uniform", || match TargetDensity::new(vec![0.125; 8]).and_then(|d| build_prep_plan(&d)) {
        Ok(plan) => {
            plan.angles.iter().flatten().all(|&a| close(a, PI / 4.0, 1e-15))
                && apply_prep(&plan).iter().all(|a| close(a.re, 0.125f64.sqrt(), 1e-15))
        }
        Err(_) => false,
    }),
    ("symm: N = 1 is the Hadamard", || {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        hyper_hadamard(1).map(|m| m.iter().zip([s, s, s, -s]).all(|(a, b)| close(*a, b, 1e-15))).unwrap_or(false)
    }),
    ("symm: top weight is a single term", || {
        add_translate(3, 1, 2).map(|j| j.amps.iter().filter(|a| a.norm() > 0.0).count() == 1).unwrap_or(false)
    }),
    ("kick: c = 0 is identity", || {
        let s = random_state(3, 5);
        kick_phase(&s, 0.0) == s
    }),
];

/// Runs every check and prints one line each; returns the failure count.
pub fn run() -> usize {
    let mut failed = 0;
    for (name, check) in CHECKS {
        let ok = check();
        println!("{} {name}", if ok { "ok  " } else { "FAIL" });
        failed += usize::from(!ok);
    }
    println!("selftest: {} checks, {failed} failed", CHECKS.len());
    failed
}
