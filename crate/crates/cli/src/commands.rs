//! Subcommands. Each resolves its parameters (flag, then file, then default),
//! validates all of them, and only then computes.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, FRAC_PI_8, PI};

use clap::Args;
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde_json::{json, Value};
use su2lat::kickedtop::{kicked_top_run, KickScale, KickedTopParams, StepOrder, TopBackend};
use su2lat::lattice::{sample_ylm_state, Axis, SpectralFrame};
use su2lat::phasest::{estimate_m, uncompute_m, RotationBackend};
use su2lat::pipeline::{BackendKind, LatticeRotator, PipelineConfig, TranslateMode};
use su2lat::shear::{displacement_stats, rotation_3d, Region};
use su2lat::stateprep::{prepare_ylm_lattice, PreparedFamily};
use su2lat::symm::{hyper_hadamard, symmetric_restrict, MAX_BRUTE_QUBITS, MAX_HADAMARD_QUBITS};
use su2lat::{CompactState, Rotation};

use crate::config::{shell_for, t_bits_for, Checker, FileConfig};
use crate::output::{num, Output};
use crate::CliError;

const RNG_NAME: &str = "ChaCha8Rng";

fn parse_axis(s: &str) -> Option<Axis> {
    match s.to_ascii_lowercase().as_str() {
        "x" => Some(Axis::X),
        "y" => Some(Axis::Y),
        "z" => Some(Axis::Z),
        _ => None,
    }
}

fn parse_scale(s: &str) -> Result<KickScale, String> {
    match s {
        "literal" => Ok(KickScale::Literal),
        "scaled" => Ok(KickScale::Scaled),
        _ => Err(format!("unknown kick scale `{s}` (literal, scaled)")),
    }
}

fn parse_order(s: &str) -> Result<StepOrder, String> {
    match s {
        "rotate-then-kick" => Ok(StepOrder::RotateThenKick),
        "kick-then-rotate" => Ok(StepOrder::KickThenRotate),
        _ => Err(format!("unknown step order `{s}` (rotate-then-kick, kick-then-rotate)")),
    }
}

fn axis_name(a: Axis) -> &'static str {
    match a {
        Axis::X => "x",
        Axis::Y => "y",
        Axis::Z => "z",
    }
}

fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(f64::total_cmp);
    let k = v.len();
    if k == 0 {
        f64::NAN
    } else if k % 2 == 1 {
        v[k / 2]
    } else {
        0.5 * (v[k / 2 - 1] + v[k / 2])
    }
}

/// Lattice parameters shared by most subcommands.
#[derive(Debug, Clone, Default, Args)]
pub struct LatticeArgs {
    /// Grid points per axis (power of two, at least 8)
    #[arg(long)]
    pub n: Option<usize>,
    /// Shell radius [default: 0.35 n]
    #[arg(long)]
    pub r0: Option<f64>,
    /// Shell width [default: 3]
    #[arg(long)]
    pub width: Option<f64>,
}

impl LatticeArgs {
    fn resolve(&self, file: &FileConfig, default_n: usize) -> (usize, Option<f64>, Option<f64>) {
        (
            self.n.or(file.n).unwrap_or(default_n),
            self.r0.or(file.r0),
            self.width.or(file.width),
        )
    }
}

#[derive(Debug, Clone, Default, Args)]
pub struct RotateArgs {
    /// Angular momentum of the compact register
    #[arg(long)]
    pub ell: Option<u32>,
    #[command(flatten)]
    pub lattice: LatticeArgs,
    #[arg(long, allow_hyphen_values = true)]
    pub alpha: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub beta: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub gamma: Option<f64>,
    /// Translation into the lattice: isometry or circuit
    #[arg(long)]
    pub mode: Option<TranslateMode>,
    /// Lattice rotation backend: shear or exact
    #[arg(long)]
    pub backend: Option<BackendKind>,
    /// Phase-estimation register size [default: smallest sufficient]
    #[arg(long)]
    pub t_bits: Option<u32>,
    /// Seed for the random input state
    #[arg(long)]
    pub seed: Option<u64>,
}

pub fn rotate(a: &RotateArgs, f: &FileConfig) -> Result<Output, CliError> {
    let ell = a.ell.or(f.ell).unwrap_or(3);
    let (n, r0, width) = a.lattice.resolve(f, 64);
    let rot = Rotation::euler(
        a.alpha.or(f.alpha).unwrap_or(0.0),
        a.beta.or(f.beta).unwrap_or(0.0),
        a.gamma.or(f.gamma).unwrap_or(0.0),
    );
    let seed = a.seed.or(f.seed).unwrap_or(0);
    let cfg = PipelineConfig {
        ell,
        n,
        shell: shell_for(n, r0, width),
        mode: a.mode.or(f.mode).unwrap_or(TranslateMode::Isometry),
        backend: a.backend.or(f.backend).unwrap_or(BackendKind::Shear),
        t: t_bits_for(ell, a.t_bits.or(f.t_bits)),
    };
    let mut ck = Checker::default();
    ck.pipeline(&cfg, "ell");
    ck.finite("alpha", rot.alpha);
    ck.finite("beta", rot.beta);
    ck.finite("gamma", rot.gamma);
    ck.finish()?;

    let state = CompactState::random(ell, &mut ChaCha8Rng::seed_from_u64(seed));
    let (_, report) = LatticeRotator::new(cfg)?.rotate(&state, &rot)?;
    let config = json!({
        "ell": ell, "n": n, "r0": cfg.shell.r0, "width": cfg.shell.width,
        "alpha": rot.alpha, "beta": rot.beta, "gamma": rot.gamma,
        "mode": cfg.mode.as_str(), "backend": cfg.backend.as_str(), "t-bits": cfg.t,
        "seed": seed, "rng": RNG_NAME,
    });
    let mut out = Output::table(
        "rotate",
        config,
        &["fidelity", "leakage", "norm"],
        vec![vec![num(report.fidelity), num(report.leakage), num(report.norm)]],
    );
    let stages = report.stages.iter().map(|(k, v)| (k.clone(), num(*v))).collect();
    out.extra.insert("stages".into(), Value::Object(stages));
    out.record = true;
    out.default_format = crate::config::Format::Json;
    out.summary = format!("rotate: fidelity {:.12} leakage {:.3e}", report.fidelity, report.leakage);
    Ok(out)
}

#[derive(Debug, Clone, Default, Args)]
pub struct SweepArgs {
    /// Comma-separated angular momenta
    #[arg(long, value_delimiter = ',')]
    pub ells: Option<Vec<u32>>,
    /// Comma-separated grid sizes
    #[arg(long, value_delimiter = ',')]
    pub ns: Option<Vec<usize>>,
    /// Comma-separated beta angles
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub betas: Option<Vec<f64>>,
    /// Comma-separated translation modes
    #[arg(long, value_delimiter = ',')]
    pub modes: Option<Vec<TranslateMode>>,
    #[arg(long)]
    pub backend: Option<BackendKind>,
    #[arg(long, allow_hyphen_values = true)]
    pub alpha: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub gamma: Option<f64>,
    /// Random input states per point; the median is reported
    #[arg(long)]
    pub samples: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
}

pub fn fidelity_sweep(a: &SweepArgs, f: &FileConfig) -> Result<Output, CliError> {
    let ells = a.ells.clone().or(f.ells.clone()).unwrap_or_else(|| vec![f.ell.unwrap_or(3)]);
    let ns = a.ns.clone().or(f.ns.clone()).unwrap_or_else(|| vec![32, 64]);
    let betas = a.betas.clone().or(f.betas.clone()).unwrap_or_else(|| vec![FRAC_PI_8, FRAC_PI_4, 3.0 * FRAC_PI_8, FRAC_PI_2]);
    let modes = a.modes.clone().or(f.modes.clone()).unwrap_or_else(|| vec![f.mode.unwrap_or(TranslateMode::Isometry)]);
    let backend = a.backend.or(f.backend).unwrap_or(BackendKind::Shear);
    let (alpha, gamma) = (a.alpha.or(f.alpha).unwrap_or(0.0), a.gamma.or(f.gamma).unwrap_or(0.0));
    let samples = a.samples.or(f.samples).unwrap_or(5);
    let seed = a.seed.or(f.seed).unwrap_or(0);

    let mut ck = Checker::default();
    for (name, empty) in [("ells", ells.is_empty()), ("ns", ns.is_empty()), ("betas", betas.is_empty()), ("modes", modes.is_empty())] {
        ck.check(!empty, name, || "needs at least one value".into());
    }
    ck.check(samples > 0, "samples", || "must be positive".into());
    betas.iter().for_each(|b| ck.finite("betas", *b));
    ck.finite("alpha", alpha);
    ck.finite("gamma", gamma);
    let mut combos = Vec::new();
    for &ell in &ells {
        for &n in &ns {
            for &mode in &modes {
                let cfg = PipelineConfig {
                    ell,
                    n,
                    shell: shell_for(n, f.r0, f.width),
                    mode,
                    backend,
                    t: t_bits_for(ell, f.t_bits),
                };
                let mut sub = Checker::default();
                sub.pipeline(&cfg, "ell");
                if let Err(e) = sub.finish() {
                    for (field, msg) in e.problems {
                        ck.fail(if field == "ell" { "ells" } else if field == "n" { "ns" } else { &field }, msg);
                    }
                }
                combos.push(cfg);
            }
        }
    }
    ck.finish()?;

    // Inputs are drawn once per ell so every point sees the same states.
    let inputs: Vec<(u32, Vec<CompactState>)> = ells
        .iter()
        .map(|&ell| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            (ell, (0..samples).map(|_| CompactState::random(ell, &mut rng)).collect())
        })
        .collect();
    let rows: Vec<Vec<Vec<Value>>> = combos
        .par_iter()
        .map(|cfg| -> Result<Vec<Vec<Value>>, CliError> {
            let rotator = LatticeRotator::new(*cfg)?;
            let states = &inputs.iter().find(|(l, _)| *l == cfg.ell).expect("drawn above").1;
            betas
                .par_iter()
                .map(|&beta| {
                    let rot = Rotation::euler(alpha, beta, gamma);
                    let mut fids = Vec::new();
                    let mut leaks = Vec::new();
                    for s in states {
                        let (_, rep) = rotator.rotate(s, &rot)?;
                        fids.push(rep.fidelity);
                        leaks.push(rep.leakage);
                    }
                    Ok(vec![
                        Value::from(cfg.ell),
                        Value::from(cfg.n),
                        num(beta),
                        Value::from(cfg.mode.as_str()),
                        num(median(fids)),
                        num(median(leaks)),
                    ])
                })
                .collect()
        })
        .collect::<Result<_, _>>()?;
    let rows: Vec<Vec<Value>> = rows.into_iter().flatten().collect();
    let worst = rows.iter().filter_map(|r| r[4].as_f64()).fold(1.0, f64::min);
    let config = json!({
        "ells": ells, "ns": ns, "betas": betas, "modes": modes.iter().map(|m| m.as_str()).collect::<Vec<_>>(),
        "backend": backend.as_str(), "alpha": alpha, "gamma": gamma, "r0": f.r0, "width": f.width,
        "t-bits": f.t_bits, "samples": samples, "statistic": "median", "seed": seed, "rng": RNG_NAME,
    });
    let mut out = Output::table("fidelity-sweep", config, &["ell", "n", "beta", "mode", "fidelity", "leakage"], rows);
    out.summary = format!("fidelity-sweep: {} points, lowest median fidelity {worst:.6}", out.rows.len());
    Ok(out)
}

#[derive(Debug, Clone, Default, Args)]
pub struct ShearArgs {
    #[arg(long)]
    pub n: Option<usize>,
    /// Rotation axis: x, y or z
    #[arg(long)]
    pub axis: Option<String>,
}

/// 25 angles evenly spaced over [−π/2, π/2].
pub fn shear_angles() -> Vec<f64> {
    (0..25).map(|i| -FRAC_PI_2 + PI * i as f64 / 24.0).collect()
}

pub fn shear_check(a: &ShearArgs, f: &FileConfig) -> Result<Output, CliError> {
    let n = a.n.or(f.n).unwrap_or(64);
    let axis_s = a.axis.clone().or(f.axis.clone()).unwrap_or_else(|| "z".into());
    let mut ck = Checker::default();
    let grid = ck.grid("n", n);
    let axis = parse_axis(&axis_s);
    ck.check(axis.is_some(), "axis", || format!("{axis_s:?} is not one of x, y, z"));
    ck.finish()?;
    let (grid, axis) = (grid.expect("checked"), axis.expect("checked"));
    let radius = n as f64 / 4.0;

    let rows = shear_angles()
        .into_par_iter()
        .map(|theta| -> Result<Vec<Value>, CliError> {
            let perm = rotation_3d(grid, axis, theta)?;
            let stats = displacement_stats(&perm, axis, theta, Region::Ball(radius));
            Ok(vec![
                num(theta),
                Value::from(n),
                Value::from(axis_name(axis)),
                Value::from(perm.is_bijective()),
                num(stats.max),
                num(stats.mean),
            ])
        })
        .collect::<Result<Vec<_>, _>>()?;
    let all = rows.iter().all(|r| r[3] == Value::Bool(true));
    let worst = rows.iter().filter_map(|r| r[4].as_f64()).fold(0.0, f64::max);
    let config = json!({"n": n, "axis": axis_name(axis), "region": "ball", "radius": radius});
    let mut out = Output::table("shear-check", config, &["theta", "n", "axis", "bijective", "max_disp", "mean_disp"], rows);
    out.summary = format!("shear-check: all bijective = {all}, worst displacement {worst:.4}");
    Ok(out)
}

#[derive(Debug, Clone, Default, Args)]
pub struct PrepArgs {
    #[arg(long)]
    pub ell: Option<u32>,
    #[command(flatten)]
    pub lattice: LatticeArgs,
}

fn lattice_config(ell: u32, n: usize, r0: Option<f64>, width: Option<f64>, t: Option<u32>) -> PipelineConfig {
    PipelineConfig {
        ell,
        n,
        shell: shell_for(n, r0, width),
        mode: TranslateMode::Isometry,
        backend: BackendKind::Shear,
        t: t_bits_for(ell, t),
    }
}

pub fn prep_check(a: &PrepArgs, f: &FileConfig) -> Result<Output, CliError> {
    let ell = a.ell.or(f.ell).unwrap_or(3);
    let (n, r0, width) = a.lattice.resolve(f, 32);
    let cfg = lattice_config(ell, n, r0, width, None);
    let mut ck = Checker::default();
    ck.pipeline(&cfg, "ell");
    ck.finish()?;
    let grid = cfg.grid()?;
    let l = ell as i32;
    let rows = (-l..=l)
        .map(|m| -> Result<Vec<Value>, CliError> {
            let prepared = prepare_ylm_lattice(ell, m, grid, cfg.shell)?;
            let direct = sample_ylm_state(ell, m, grid, cfg.shell)?;
            let err = prepared.amps().iter().zip(direct.amps()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max);
            Ok(vec![Value::from(ell), Value::from(m), Value::from(n), num(err)])
        })
        .collect::<Result<Vec<_>, _>>()?;
    let worst = rows.iter().filter_map(|r| r[3].as_f64()).fold(0.0, f64::max);
    let config = json!({"ell": ell, "n": n, "r0": cfg.shell.r0, "width": cfg.shell.width});
    let mut out = Output::table("prep-check", config, &["ell", "m", "n", "max_abs_err"], rows);
    out.summary = format!("prep-check: largest amplitude error {worst:.3e}");
    Ok(out)
}

#[derive(Debug, Clone, Default, Args)]
pub struct QpeArgs {
    #[arg(long)]
    pub ell: Option<u32>,
    #[command(flatten)]
    pub lattice: LatticeArgs,
    #[arg(long)]
    pub t_bits: Option<u32>,
    #[arg(long)]
    pub backend: Option<BackendKind>,
}

pub fn qpe_check(a: &QpeArgs, f: &FileConfig) -> Result<Output, CliError> {
    let ell = a.ell.or(f.ell).unwrap_or(2);
    let (n, r0, width) = a.lattice.resolve(f, 32);
    let cfg = lattice_config(ell, n, r0, width, a.t_bits.or(f.t_bits));
    let kind = a.backend.or(f.backend).unwrap_or(BackendKind::Shear);
    let mut ck = Checker::default();
    ck.pipeline(&cfg, "ell");
    ck.finish()?;
    let grid = cfg.grid()?;
    let backend = match kind {
        BackendKind::Shear => RotationBackend::Shear,
        BackendKind::Exact => RotationBackend::Exact(SpectralFrame::raw_samples(ell, grid, cfg.shell)?),
    };
    let family = PreparedFamily::new(ell, grid, cfg.shell)?;
    let l = ell as i32;
    let mut rows = Vec::new();
    for m in -l..=l {
        let est = estimate_m(&sample_ylm_state(ell, m, grid, cfg.shell)?, ell, cfg.t, &backend)?;
        let unc = uncompute_m(&family.tag(&CompactState::basis(ell, m)?)?, cfg.t, &backend)?;
        rows.push(vec![
            Value::from(ell),
            Value::from(m),
            Value::from(n),
            Value::from(cfg.t),
            Value::from(backend.name()),
            num(est.probability_of(m)),
            num(unc.leakage),
        ]);
    }
    let worst = rows.iter().filter_map(|r| r[5].as_f64()).fold(1.0, f64::min);
    let config = json!({
        "ell": ell, "n": n, "r0": cfg.shell.r0, "width": cfg.shell.width,
        "t-bits": cfg.t, "backend": kind.as_str(),
    });
    let mut out = Output::table("qpe-check", config, &["ell", "m", "n", "t", "backend", "p_correct", "leakage"], rows);
    out.summary = format!("qpe-check: lowest p_correct {worst:.4}");
    Ok(out)
}

#[derive(Debug, Clone, Default, Args)]
pub struct HadamardArgs {
    /// Number of qubits N
    #[arg(long)]
    pub qubits: Option<u32>,
}

pub fn hadamard(a: &HadamardArgs, f: &FileConfig) -> Result<Output, CliError> {
    let q = a.qubits.or(f.qubits).unwrap_or(4);
    let mut ck = Checker::default();
    ck.check((1..=MAX_HADAMARD_QUBITS).contains(&q), "qubits", || {
        format!("{q} must lie in 1..={MAX_HADAMARD_QUBITS}")
    });
    ck.finish()?;
    let m = hyper_hadamard(q)?;
    let deviation = if q <= MAX_BRUTE_QUBITS {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let h = nalgebra::Matrix2::new(s, s, s, -s).map(Complex64::from);
        let brute = symmetric_restrict(&h, q)?;
        Some(brute.iter().zip(m.iter()).map(|(b, x)| (b - x).norm()).fold(0.0, f64::max))
    } else {
        None
    };
    let mut columns = vec!["h".to_string()];
    columns.extend((0..=q).map(|k| k.to_string()));
    let rows = (0..m.nrows())
        .map(|i| std::iter::once(Value::from(i)).chain(m.row(i).iter().map(|x| num(*x))).collect())
        .collect();
    let mut out = Output::table("hyper-hadamard", json!({"qubits": q}), &[], rows);
    out.columns = columns;
    out.extra.insert("deviation".into(), deviation.map(num).unwrap_or_else(|| Value::from("skipped")));
    out.summary = match deviation {
        Some(d) => format!("hyper-hadamard: N = {q}, deviation from brute force {d:.3e}"),
        None => format!("hyper-hadamard: N = {q}, brute force skipped above {MAX_BRUTE_QUBITS} qubits"),
    };
    Ok(out)
}

#[derive(Debug, Clone, Default, Args)]
pub struct TopArgs {
    /// Spin of the top
    #[arg(long)]
    pub j: Option<u32>,
    /// Kick strength
    #[arg(long, allow_hyphen_values = true)]
    pub c: Option<f64>,
    /// Rotation angle per step
    #[arg(long, allow_hyphen_values = true)]
    pub p: Option<f64>,
    #[arg(long)]
    pub steps: Option<usize>,
    #[arg(long)]
    pub backend: Option<BackendKind>,
    #[arg(long)]
    pub mode: Option<TranslateMode>,
    #[command(flatten)]
    pub lattice: LatticeArgs,
    /// Kick exponent: literal (c m^2) or scaled (c m^2 / 2j)
    #[arg(long, value_parser = parse_scale)]
    pub kick_scale: Option<KickScale>,
    /// rotate-then-kick or kick-then-rotate
    #[arg(long, value_parser = parse_order)]
    pub step_order: Option<StepOrder>,
}

pub fn kicked_top(a: &TopArgs, f: &FileConfig) -> Result<Output, CliError> {
    let j = a.j.or(f.j).unwrap_or(4);
    let (n, r0, width) = a.lattice.resolve(f, 64);
    let mut params = KickedTopParams::new(
        j,
        a.c.or(f.c).unwrap_or(3.0),
        a.p.or(f.p).unwrap_or(FRAC_PI_2),
        a.steps.or(f.steps).unwrap_or(10),
    );
    params.scale = a.kick_scale.or(f.kick_scale).unwrap_or_default();
    params.order = a.step_order.or(f.step_order).unwrap_or_default();
    let cfg = PipelineConfig {
        ell: j,
        n,
        shell: shell_for(n, r0, width),
        mode: a.mode.or(f.mode).unwrap_or(TranslateMode::Isometry),
        backend: a.backend.or(f.backend).unwrap_or(BackendKind::Shear),
        t: t_bits_for(j, f.t_bits),
    };
    let mut ck = Checker::default();
    ck.pipeline(&cfg, "j");
    ck.finite("c", params.c);
    ck.finite("p", params.p);
    ck.finish()?;

    let rotator = LatticeRotator::new(cfg)?;
    let init = CompactState::basis(j, j as i32)?;
    let recs = kicked_top_run(&init, &params, TopBackend::Exact, TopBackend::Lattice(&rotator))?;
    let rows: Vec<Vec<Value>> = recs
        .iter()
        .map(|r| vec![Value::from(r.step), num(r.fidelity), num(r.jz_a), num(r.jz_b), num(r.leakage)])
        .collect();
    let last = recs.last().map(|r| r.fidelity).unwrap_or(1.0);
    let config = json!({
        "j": j, "c": params.c, "p": params.p, "steps": params.steps,
        "kick-scale": params.scale, "step-order": params.order, "initial": "m = j",
        "n": n, "r0": cfg.shell.r0, "width": cfg.shell.width,
        "mode": cfg.mode.as_str(), "backend": cfg.backend.as_str(), "t-bits": cfg.t,
    });
    let mut out = Output::table("kicked-top", config, &["step", "fidelity", "jz_exact", "jz_lattice", "leakage"], rows);
    out.summary = format!("kicked-top: final fidelity {last:.9}");
    Ok(out)
}
