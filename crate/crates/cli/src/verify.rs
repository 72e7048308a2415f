//! End-to-end verification: runs the full artifact pipeline, then checks
//! every acceptance criterion against it and writes a machine-readable
//! report. All report content is deterministic for a fixed configuration;
//! wall-clock timings are returned separately and never enter artifacts.

use std::fs;
use std::path::Path;
use std::time::Instant;

use num_complex::Complex64;
use serde::Serialize;

use lee_core::langevin::{self, NoiseSpec};
use lee_core::master::{self, DissipatorVariant, InitialState};
use lee_core::model::FormFactor;
use lee_core::sector;
use lee_core::spectral::{self, PoleResult};

use crate::artifacts::{write_json, ArtifactMeta, TOOL_VERSION};
use crate::commands::{self, CommandError};
use crate::config::RunConfig;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Skip,
}

#[derive(Debug, Clone, Serialize)]
pub struct CriterionResult {
    pub id: u32,
    pub name: String,
    pub status: Status,
    pub details: String,
}

impl CriterionResult {
    fn pass(id: u32, name: &str, details: String) -> Self {
        Self {
            id,
            name: name.into(),
            status: Status::Pass,
            details,
        }
    }
    fn fail(id: u32, name: &str, details: String) -> Self {
        Self {
            id,
            name: name.into(),
            status: Status::Fail,
            details,
        }
    }
    fn skip(id: u32, name: &str, details: String) -> Self {
        Self {
            id,
            name: name.into(),
            status: Status::Skip,
            details,
        }
    }
    fn gated(id: u32, name: &str, ok: bool, details: String) -> Self {
        if ok {
            Self::pass(id, name, details)
        } else {
            Self::fail(id, name, details)
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct VerifyReport {
    pub tool_version: String,
    pub config_hash: String,
    pub seed: u64,
    pub criteria: Vec<CriterionResult>,
    pub all_pass: bool,
}

pub struct VerifyOutput {
    pub report: VerifyReport,
    /// (criterion id, seconds); diagnostics only, never part of artifacts.
    pub timings: Vec<(u32, f64)>,
}

struct Pipeline {
    kernels: Result<lee_core::spectral::KernelTable, String>,
    sector: Result<commands::SectorRun, String>,
    master: Result<commands::MasterCmdRun, String>,
    stage_errors: Vec<String>,
}

fn run_pipeline(cfg: &RunConfig, meta: &ArtifactMeta, out_dir: &Path) -> Pipeline {
    let mut stage_errors = Vec::new();
    if let Err(e) = commands::cmd_pole(cfg, meta, out_dir) {
        stage_errors.push(format!("pole: {e}"));
    }
    let kernels = commands::cmd_kernels(cfg, meta, out_dir).map_err(|e| {
        let msg = format!("kernels: {e}");
        stage_errors.push(msg.clone());
        msg
    });
    let sector = commands::cmd_sector(cfg, meta, out_dir).map_err(|e| {
        let msg = format!("sector: {e}");
        stage_errors.push(msg.clone());
        msg
    });
    let master = commands::cmd_master(cfg, meta, out_dir).map_err(|e| {
        let msg = format!("master: {e}");
        stage_errors.push(msg.clone());
        msg
    });
    if let Err(e) = commands::cmd_langevin(cfg, meta, out_dir) {
        stage_errors.push(format!("langevin: {e}"));
    }
    Pipeline {
        kernels,
        sector,
        master,
        stage_errors,
    }
}

/// Strict double run of the artifact pipeline, for the determinism check.
fn run_pipeline_strict(
    cfg: &RunConfig,
    meta: &ArtifactMeta,
    out_dir: &Path,
) -> Result<(), String> {
    let pipe = run_pipeline(cfg, meta, out_dir);
    if pipe.stage_errors.is_empty() {
        Ok(())
    } else {
        Err(pipe.stage_errors.join("; "))
    }
}

pub fn run_verify(
    cfg: &RunConfig,
    config_text: &str,
    out_dir: &Path,
) -> Result<VerifyOutput, CommandError> {
    fs::create_dir_all(out_dir).map_err(|source| CommandError::Io {
        path: out_dir.display().to_string(),
        source,
    })?;
    let meta = ArtifactMeta::new(config_text, cfg.langevin.seed);

    let mut criteria = Vec::new();
    let mut timings = Vec::new();

    let t0 = Instant::now();
    let pipe = run_pipeline(cfg, &meta, out_dir);
    let pipeline_secs = t0.elapsed().as_secs_f64();

    macro_rules! timed {
        ($id:expr, $expr:expr) => {{
            let t = Instant::now();
            let r = $expr;
            timings.push(($id, t.elapsed().as_secs_f64()));
            criteria.push(r);
        }};
    }

    timed!(1, match &pipe.kernels {
        Ok(table) => criterion_1_kernel_identities(cfg, table),
        Err(e) => CriterionResult::fail(1, "kernel identities", e.clone()),
    });
    timed!(2, match &pipe.sector {
        Ok(run) => criterion_2_width_cross_check(run),
        Err(e) => CriterionResult::fail(2, "width cross-check", e.clone()),
    });
    timed!(3, criterion_3_stable_eigenvalue(cfg));
    let reusable = cfg.master.variant == DissipatorVariant::Hermitized
        && cfg.master.initial_state == InitialState::PureV;
    let t = Instant::now();
    let (r4, r5) = criteria_4_5_master(cfg, pipe.master.as_ref().ok().filter(|_| reusable));
    timings.push((4, t.elapsed().as_secs_f64()));
    timings.push((5, 0.0));
    criteria.push(r4);
    criteria.push(r5);
    timed!(6, criterion_6_two_level_closed_form());
    timed!(7, criterion_7_langevin_mean_decay(cfg));
    timed!(8, criterion_8_fluctuation_dissipation(cfg));
    timed!(9, criterion_9_scaling_laws(cfg));
    timed!(10, match &pipe.sector {
        Ok(run) => criterion_10_recurrence_scaling(cfg, &run.pole),
        Err(e) => CriterionResult::fail(10, "recurrence scaling", e.clone()),
    });
    timed!(11, criterion_11_artifact_determinism(cfg, config_text, out_dir));

    if !pipe.stage_errors.is_empty() {
        criteria.insert(
            0,
            CriterionResult::fail(0, "artifact pipeline", pipe.stage_errors.join("; ")),
        );
    }
    timings.push((0, pipeline_secs));

    let all_pass = criteria.iter().all(|c| c.status != Status::Fail);
    let report = VerifyReport {
        tool_version: TOOL_VERSION.to_string(),
        config_hash: meta.config_hash.clone(),
        seed: meta.seed,
        criteria,
        all_pass,
    };
    let path = out_dir.join("report.json");
    write_json(&path, &report).map_err(|source| CommandError::Io {
        path: path.display().to_string(),
        source,
    })?;
    Ok(VerifyOutput { report, timings })
}

// ---------------------------------------------------------------- 1

pub fn criterion_1_kernel_identities(
    cfg: &RunConfig,
    table: &lee_core::spectral::KernelTable,
) -> CriterionResult {
    let name = "kernel identities";
    let model = match cfg.model_params() {
        Ok(m) => m,
        Err(e) => return CriterionResult::fail(1, name, e.to_string()),
    };
    let t = table;
    let mut max_asym = 0.0_f64;
    let mut min_b = f64::INFINITY;
    let mut max_b_below = 0.0_f64;
    for (i, &e) in t.energies.iter().enumerate() {
        let s = if e > 0.0 {
            1.0
        } else if e < 0.0 {
            -1.0
        } else {
            0.0
        };
        max_asym = max_asym.max((t.a[i] - s * t.b[i]).abs());
        min_b = min_b.min(t.b[i]);
        if e <= model.threshold() {
            max_b_below = max_b_below.max(t.b[i].abs());
        }
    }
    let ok = max_asym == 0.0 && min_b >= 0.0 && max_b_below == 0.0;
    CriterionResult::gated(
        1,
        name,
        ok,
        format!(
            "max|A-sign(E)B| = {max_asym:e}, min B = {min_b:e}, max B below threshold = {max_b_below:e}"
        ),
    )
}

// ---------------------------------------------------------------- 2

pub fn criterion_2_width_cross_check(sector_run: &commands::SectorRun) -> CriterionResult {
    let name = "width cross-check";
    let s = &sector_run.summary;
    match (s.gamma_fit, s.rel_width_diff) {
        (Some(fit), Some(rel)) => CriterionResult::gated(
            2,
            name,
            rel <= 0.05,
            format!(
                "Gamma_pole = {:e}, Gamma_fit = {:e}, rel = {:.4e}",
                s.gamma_pole, fit, rel
            ),
        ),
        _ => CriterionResult::skip(2, name, "stable regime: no width to fit".into()),
    }
}

// ---------------------------------------------------------------- 3

pub fn criterion_3_stable_eigenvalue(cfg: &RunConfig) -> CriterionResult {
    let name = "stable-case eigenvalue";
    let run = || -> Result<CriterionResult, lee_core::Error> {
        let mut stable_cfg = cfg.clone();
        stable_cfg.model.m_v0 = 10.4;
        let model = stable_cfg.model_params()?;
        if model.m_v0 >= model.threshold() {
            return Ok(CriterionResult::skip(
                3,
                name,
                format!("m_V0 = 10.4 is not below the threshold {}", model.threshold()),
            ));
        }
        let grid = stable_cfg.make_grid(512)?;
        let root = spectral::physical_mass(&model, &grid)?;
        let h = sector::build_sector(&model, &grid);
        let mode = sector::diagonalize_stable(&h)?;
        let mass_diff = (mode.m_v - root).abs();

        let mut max_rel = 0.0_f64;
        for (&k, &g) in grid.k_values.iter().zip(&mode.weights) {
            let omega = model.omega(k);
            if (mode.m_v - model.m_n - omega).abs() < 0.05 {
                continue; // resonant denominators excluded
            }
            let form = model.lambda0 * model.form_factor(omega)
                / ((2.0 * omega).sqrt() * (mode.m_v - model.m_n - omega));
            if form == 0.0 {
                continue;
            }
            max_rel = max_rel.max(((g - form) / form).abs());
        }
        let ok = mass_diff < 1e-4 && max_rel < 1e-6;
        Ok(CriterionResult::gated(
            3,
            name,
            ok,
            format!(
                "eigenvalue {} vs root {root}: |diff| = {mass_diff:e}; max weight deviation = {max_rel:e}",
                mode.m_v
            ),
        ))
    };
    run().unwrap_or_else(|e| CriterionResult::fail(3, name, e.to_string()))
}

// ---------------------------------------------------------------- 4 & 5

pub fn criteria_4_5_master(
    cfg: &RunConfig,
    reuse: Option<&commands::MasterCmdRun>,
) -> (CriterionResult, CriterionResult) {
    let n4 = "probability conservation";
    let n5 = "entropy monotonicity and rate identity";

    let dedicated;
    let run_ref: &commands::MasterCmdRun = if let Some(run) = reuse {
        run
    } else {
        // pinned variant and initial state; step and horizon stay as
        // configured so a bad dt surfaces here
        let mut pinned = cfg.clone();
        pinned.master.variant = DissipatorVariant::Hermitized;
        pinned.master.initial_state = InitialState::PureV;
        let meta = ArtifactMeta::new("criterion-4-5 dedicated run", cfg.langevin.seed);
        let tmp = std::env::temp_dir().join(format!("lee-verify-master-{}", std::process::id()));
        if fs::create_dir_all(&tmp).is_err() {
            let r = CriterionResult::fail(4, n4, "cannot create scratch directory".into());
            let r5 = CriterionResult::fail(5, n5, "cannot create scratch directory".into());
            return (r, r5);
        }
        match commands::cmd_master(&pinned, &meta, &tmp) {
            Ok(run) => {
                dedicated = run;
                let _ = fs::remove_dir_all(&tmp);
                &dedicated
            }
            Err(e) => {
                let msg = e.to_string();
                return (
                    CriterionResult::fail(4, n4, msg.clone()),
                    CriterionResult::fail(5, n5, msg),
                );
            }
        }
    };

    let run = &run_ref.run;
    let kappa = run_ref.kappa;
    let gamma = run_ref.pole.gamma;
    let regime_note = if gamma > 0.0 {
        String::new()
    } else {
        "; stable regime, fixed horizon".to_string()
    };

    let r4 = CriterionResult::gated(
        4,
        n4,
        run.max_trace_defect < 1e-10,
        format!("max |Tr rho - 1| = {:e}{regime_note}", run.max_trace_defect),
    );

    // entropy: exact purity at t = 0, per-step monotonicity, and the
    // 4th-order finite difference of S against the production formula
    let s = &run.s_per_step;
    let n_steps = s.len() - 1;
    let s0_exact = s[0] == -1.0;
    let monotone = run.min_entropy_increment >= -1e-12;

    let limit = if kappa > 0.0 {
        (((1.0 / kappa) / run.dt).ceil() as usize).min(n_steps.saturating_sub(3))
    } else {
        n_steps.saturating_sub(3)
    };
    let mut max_rate_rel = 0.0_f64;
    let mut max_rate_abs = 0.0_f64;
    let mut samples = 0;
    if limit > 14 {
        for k in 1..=12 {
            let j = 2 + (limit - 2) * k / 12;
            let fd = (-s[j + 2] + 8.0 * s[j + 1] - 8.0 * s[j - 1] + s[j - 2]) / (12.0 * run.dt);
            let ep = run.ep_per_step[j];
            if ep.abs() > 1e-14 {
                max_rate_rel = max_rate_rel.max(((fd - ep) / ep).abs());
            } else {
                max_rate_abs = max_rate_abs.max(fd.abs());
            }
            samples += 1;
        }
    }
    let rate_ok = max_rate_rel < 1e-6 && max_rate_abs < 1e-10;
    let ok = s0_exact && monotone && rate_ok;
    let r5 = CriterionResult::gated(
        5,
        n5,
        ok,
        format!(
            "S(0) = {:e}; min per-step dS = {:e}; dS/dt vs production over {samples} samples: max rel = {:e}, max abs (quiet) = {:e}{regime_note}",
            s[0], run.min_entropy_increment, max_rate_rel, max_rate_abs
        ),
    );
    (r4, r5)
}

// ---------------------------------------------------------------- 6

pub fn criterion_6_two_level_closed_form() -> CriterionResult {
    let name = "two-level closed form";
    let kappa = 0.05;
    let gen = master::GeneratorSpec::dephasing_two_level(kappa, DissipatorVariant::Hermitized);
    let rho0 = master::DensityMatrix::from_initial_state(InitialState::VacuumVSuperposition, 2);
    let dt = 0.01 / kappa;
    let n_steps = ((5.0 / kappa) / dt).ceil() as usize;
    let steps: Vec<usize> = (0..=n_steps).collect();
    match master::evolve_density_detailed(&gen, &rho0, dt, n_steps, &steps) {
        Ok(run) => {
            let mut worst = 0.0_f64;
            for (t, snap) in run.times.iter().zip(&run.snapshots) {
                let expect = 0.5 * (-kappa * t).exp();
                worst = worst.max((snap.get(0, 1) - Complex64::new(expect, 0.0)).norm());
                worst = worst.max((snap.get(0, 0).re - 0.5).abs());
                worst = worst.max((snap.get(1, 1).re - 0.5).abs());
            }
            CriterionResult::gated(
                6,
                name,
                worst < 1e-8,
                format!("max |rho_0V(t) - rho_0V(0) e^(-kappa t)| = {worst:e} over t in [0, 5/kappa]"),
            )
        }
        Err(e) => CriterionResult::fail(6, name, e.to_string()),
    }
}

// ---------------------------------------------------------------- 7

pub fn criterion_7_langevin_mean_decay(cfg: &RunConfig) -> CriterionResult {
    let name = "langevin mean decay";
    let run = || -> lee_core::Result<CriterionResult> {
        // dedicated unstable set with a friction large enough for the
        // Euler–Maruyama bias to sit well inside the statistical error
        let model = lee_core::model::ModelParams::new(
            2.2,
            1.0,
            1.0,
            0.8,
            FormFactor::SharpCutoff(4.0),
        )?;
        let grid = lee_core::model::MomentumGrid::with_default_coverage(&model, 512)?;
        let pole = spectral::find_pole(&model, &grid)?;
        let gamma = pole.gamma_friction;
        let rate_theory = gamma * pole.m_v / (1.0 + gamma * gamma);
        let dt = 1e-4;
        let n_steps = ((2.0 / rate_theory) / dt).ceil() as usize;
        let spec = NoiseSpec {
            b_loc: gamma * pole.m_v,
            dt,
            seed: cfg.langevin.seed,
            n_steps,
            n_trajectories: 10_000,
        };
        let ens = langevin::run_ensemble(
            Complex64::new(1.0, 0.0),
            &pole,
            &spec,
            0.0,
            (n_steps / 400).max(1),
            0.5,
        )?;
        let fit = ens.fit.expect("fit exists for a decaying mean");
        let delta = (fit.rate - rate_theory).abs();
        let ok = !fit.degenerate && delta <= 3.0 * fit.rate_se;
        Ok(CriterionResult::gated(
            7,
            name,
            ok,
            format!(
                "rate_fit = {:e} +- {:e}, theory gamma m_V/(1+gamma^2) = {:e}, |diff|/se = {:.2}",
                fit.rate,
                fit.rate_se,
                rate_theory,
                delta / fit.rate_se.max(1e-300)
            ),
        ))
    };
    run().unwrap_or_else(|e| CriterionResult::fail(7, name, e.to_string()))
}

// ---------------------------------------------------------------- 8

pub fn criterion_8_fluctuation_dissipation(cfg: &RunConfig) -> CriterionResult {
    let name = "fluctuation-dissipation";
    let settings = [(0.3_f64, 1.0_f64), (0.12, 2.5)];
    let mut details = Vec::new();
    let mut ok = true;
    for (i, &(gamma, m_v)) in settings.iter().enumerate() {
        let pole = PoleResult {
            m_v,
            gamma: 0.0,
            gamma_friction: gamma,
            z_v: 1.0,
            lambda_ren: 0.0,
            c0: 0.0,
            c1: 0.0,
        };
        let rate = gamma * m_v / (1.0 + gamma * gamma);
        let dt = 0.002 * 2.0 * gamma / m_v;
        let n_steps = ((14.0 / rate) / dt).ceil() as usize;
        let spec = NoiseSpec {
            b_loc: gamma * m_v,
            dt,
            seed: cfg.langevin.seed.wrapping_add(1000 + i as u64),
            n_steps,
            n_trajectories: 2000,
        };
        let ens = match langevin::run_ensemble(
            Complex64::new(0.5_f64.sqrt(), 0.0),
            &pole,
            &spec,
            0.0,
            (n_steps / 200).max(1),
            0.6,
        ) {
            Ok(e) => e,
            Err(e) => return CriterionResult::fail(8, name, e.to_string()),
        };
        let dev = (ens.tail_mean_sq - 0.5).abs();
        let pass = dev <= 3.0 * ens.tail_mean_sq_se;
        ok &= pass;
        details.push(format!(
            "(gamma={gamma}, m_V={m_v}): <|phi|^2> = {:.6} +- {:.6} ({:.2} se)",
            ens.tail_mean_sq,
            ens.tail_mean_sq_se,
            dev / ens.tail_mean_sq_se.max(1e-300)
        ));
    }
    CriterionResult::gated(8, name, ok, details.join("; "))
}

// ---------------------------------------------------------------- 9

pub fn criterion_9_scaling_laws(cfg: &RunConfig) -> CriterionResult {
    let name = "scaling laws";
    let run = || -> lee_core::Result<CriterionResult> {
        let model1 = cfg.model_params()?;
        let mut doubled = cfg.clone();
        doubled.model.lambda0 = 2.0 * cfg.model.lambda0;
        let model2 = doubled.model_params()?;
        let grid = cfg.make_grid(cfg.grid.n_modes.min(512))?;

        let x_star = match model1.form_factor {
            FormFactor::SharpCutoff(l) => 0.5 * (model1.mu + l),
            FormFactor::Lorentzian(_) => 2.0 * model1.mu,
        };
        let e_star = model1.m_n + x_star;

        let quartic = |a: f64, b: f64| (b - 4.0 * a).abs() <= 1e-12 * b.abs().max(1e-300);
        let s1 = spectral::self_energy(e_star, &model1, &grid)?;
        let s2 = spectral::self_energy(e_star, &model2, &grid)?;
        let (c0a, c1a) = spectral::renorm_constants(&model1, &grid, model1.m_v0)?;
        let (c0b, c1b) = spectral::renorm_constants(&model2, &grid, model1.m_v0)?;
        let b1 = spectral::kernel_table(&model1, &grid, &[e_star])?.b[0];
        let b2 = spectral::kernel_table(&model2, &grid, &[e_star])?.b[0];
        let p1 = spectral::find_pole(&model1, &grid)?;
        let p2 = spectral::find_pole(&model2, &grid)?;
        // friction at a common reference mass factors the cutoff out
        let g1 = model1.lambda0 * model1.lambda0 * model1.form_factor(x_star)
            / (4.0 * std::f64::consts::PI);
        let g2 = model2.lambda0 * model2.lambda0 * model2.form_factor(x_star)
            / (4.0 * std::f64::consts::PI);
        let mut scaling_ok = quartic(s1.re, s2.re)
            && quartic(s1.im, s2.im)
            && quartic(c0a, c0b)
            && quartic(c1a, c1b)
            && quartic(b1, b2)
            && quartic(g1, g2);
        if let FormFactor::SharpCutoff(_) = model1.form_factor {
            if model1.form_factor(p1.m_v - model1.m_n) == 1.0
                && model2.form_factor(p2.m_v - model2.m_n) == 1.0
            {
                scaling_ok &= quartic(p1.gamma_friction, p2.gamma_friction);
            }
        }

        // free theory at lambda0 = 0
        let mut free_cfg = cfg.clone();
        free_cfg.model.lambda0 = 0.0;
        let model0 = free_cfg.model_params()?;
        let p0 = spectral::find_pole(&model0, &grid)?;
        let free_pole_ok = p0.gamma == 0.0
            && p0.z_v == 1.0
            && p0.lambda_ren == 0.0
            && p0.m_v == model0.m_v0
            && p0.gamma_friction == 0.0;
        let tbl0 = spectral::kernel_table(
            &model0,
            &grid,
            &[e_star - 1.0, e_star, e_star + 0.5],
        )?;
        let free_kernels_ok = tbl0.b.iter().all(|&b| b == 0.0);

        let grid_small = free_cfg.make_grid(64)?;
        let h0 = sector::build_sector(&model0, &grid_small);
        let rec = sector::evolve_survival(&h0, &[0.0, 1.0, 5.0])?;
        let free_survival_ok = rec.probability.iter().all(|&p| (p - 1.0).abs() < 1e-12);

        let grid_master = free_cfg.make_grid(32)?;
        let gen0 = master::build_generator(
            &model0,
            &grid_master,
            &p0,
            DissipatorVariant::Hermitized,
        );
        let rho0 = master::DensityMatrix::from_initial_state(
            InitialState::VacuumVSuperposition,
            gen0.dim,
        );
        let dt = gen0.max_step() * 0.4;
        let n_steps = (10.0 / dt).ceil() as usize;
        let run0 = master::evolve_density_detailed(&gen0, &rho0, dt, n_steps, &[])?;
        let s_drift = run0
            .s_per_step
            .iter()
            .fold(0.0_f64, |acc, &s| acc.max((s - run0.s_per_step[0]).abs()));
        let free_entropy_ok = gen0.kappa == 0.0 && s_drift < 1e-8;

        let ok = scaling_ok && free_pole_ok && free_kernels_ok && free_survival_ok && free_entropy_ok;
        Ok(CriterionResult::gated(
            9,
            name,
            ok,
            format!(
                "lambda0 -> 2 lambda0 quartic: {scaling_ok}; free theory: pole {free_pole_ok}, kernels {free_kernels_ok}, survival {free_survival_ok}, unitary entropy drift = {s_drift:e}"
            ),
        ))
    };
    run().unwrap_or_else(|e| CriterionResult::fail(9, name, e.to_string()))
}

// ---------------------------------------------------------------- 10

pub fn criterion_10_recurrence_scaling(cfg: &RunConfig, pole: &PoleResult) -> CriterionResult {
    let name = "recurrence scaling";
    if pole.gamma == 0.0 {
        return CriterionResult::skip(10, name, "stable regime: no decay to recur from".into());
    }
    let run = || -> lee_core::Result<CriterionResult> {
        let model = cfg.model_params()?;
        let threshold = 0.5 * pole.z_v * pole.z_v;
        let mut times = Vec::new();
        for n in [128usize, 256, 512] {
            let grid = cfg.make_grid(n)?;
            let h = sector::build_sector(&model, &grid);
            match sector::recurrence_estimate(&h, threshold)? {
                Some(t) => times.push(t),
                None => {
                    return Ok(CriterionResult::fail(
                        10,
                        name,
                        format!("no recurrence found within the scan horizon at n = {n}"),
                    ))
                }
            }
        }
        let r1 = times[1] / times[0];
        let r2 = times[2] / times[1];
        let in_window = |r: f64| (1.7..=2.3).contains(&r);
        Ok(CriterionResult::gated(
            10,
            name,
            in_window(r1) && in_window(r2),
            format!(
                "t_rec = [{:.2}, {:.2}, {:.2}] for n = [128, 256, 512]; ratios = [{r1:.3}, {r2:.3}]",
                times[0], times[1], times[2]
            ),
        ))
    };
    run().unwrap_or_else(|e| CriterionResult::fail(10, name, e.to_string()))
}

// ---------------------------------------------------------------- 11

fn reduced_for_determinism(cfg: &RunConfig) -> RunConfig {
    let mut c = cfg.clone();
    c.grid.n_modes = 256;
    c.kernels.n_points = 121;
    c.sector.n_modes = 256;
    c.sector.n_times = 201;
    c.master.n_modes = 48;
    c.master.t_max = Some(12.0);
    c.master.dt = None;
    c.master.n_snapshots = 40;
    c.langevin.n_trajectories = 64;
    c.langevin.n_steps = 20_000;
    c.langevin.record_stride = 200;
    c
}

fn criterion_11_artifact_determinism(
    cfg: &RunConfig,
    config_text: &str,
    out_dir: &Path,
) -> CriterionResult {
    let name = "artifact determinism";
    let reduced = reduced_for_determinism(cfg);
    let meta = ArtifactMeta::new(config_text, cfg.langevin.seed);
    let dir_a = out_dir.join("det_a");
    let dir_b = out_dir.join("det_b");
    for d in [&dir_a, &dir_b] {
        if let Err(e) = fs::create_dir_all(d) {
            return CriterionResult::fail(11, name, format!("cannot create {}: {e}", d.display()));
        }
    }
    if let Err(e) = run_pipeline_strict(&reduced, &meta, &dir_a) {
        return CriterionResult::fail(11, name, format!("first pipeline run failed: {e}"));
    }
    if let Err(e) = run_pipeline_strict(&reduced, &meta, &dir_b) {
        return CriterionResult::fail(11, name, format!("second pipeline run failed: {e}"));
    }
    let files = [
        "pole.json",
        "kernels.csv",
        "survival.csv",
        "sector.json",
        "master.csv",
        "master.json",
        "langevin.csv",
        "langevin.json",
    ];
    let mut mismatched = Vec::new();
    for f in files {
        let a = fs::read(dir_a.join(f));
        let b = fs::read(dir_b.join(f));
        match (a, b) {
            (Ok(a), Ok(b)) if a == b => {}
            _ => mismatched.push(f),
        }
    }
    CriterionResult::gated(
        11,
        name,
        mismatched.is_empty(),
        if mismatched.is_empty() {
            format!("{} artifacts byte-identical across repeated runs", files.len())
        } else {
            format!("artifacts differ between runs: {mismatched:?}")
        },
    )
}
