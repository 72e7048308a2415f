//! Subcommand implementations: each computes its data, writes the CSV/JSON
//! artifacts into the output directory, and returns the computed summaries
//! so the verification engine can reuse them without recomputation.

use std::path::Path;

use serde::Serialize;
use thiserror::Error;

use lee_core::langevin::{self, NoiseSpec, TrajectoryEnsemble};
use lee_core::master::{self, DissipatorVariant, InitialState, MasterRun};
use lee_core::sector::{self, SurvivalRecord};
use lee_core::spectral::{self, KernelTable, PoleResult};

use crate::artifacts::{write_csv, write_json, ArtifactMeta};
use crate::config::RunConfig;

#[derive(Debug, Error)]
pub enum CommandError {
    #[error("{0}")]
    Core(#[from] lee_core::Error),
    #[error("io error on {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> CommandError + '_ {
    move |source| CommandError::Io {
        path: path.display().to_string(),
        source,
    }
}

/// Horizon used when the width vanishes and t_max = auto.
const STABLE_HORIZON: f64 = 20.0;

fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64)
        .collect()
}

// ---------------------------------------------------------------- pole

#[derive(Debug, Clone, Serialize)]
pub struct PoleArtifact {
    pub meta: ArtifactMeta,
    pub m_v: f64,
    pub gamma: f64,
    pub gamma_friction: f64,
    pub z_v: f64,
    pub lambda_ren: f64,
    pub c0: f64,
    pub c1: f64,
    pub kappa: f64,
    pub unstable: bool,
}

pub fn cmd_pole(
    cfg: &RunConfig,
    meta: &ArtifactMeta,
    out_dir: &Path,
) -> Result<PoleResult, CommandError> {
    let model = cfg.model_params()?;
    let grid = cfg.make_grid(cfg.grid.n_modes)?;
    let pole = spectral::find_pole(&model, &grid)?;
    let path = out_dir.join("pole.json");
    write_json(
        &path,
        &PoleArtifact {
            meta: meta.clone(),
            m_v: pole.m_v,
            gamma: pole.gamma,
            gamma_friction: pole.gamma_friction,
            z_v: pole.z_v,
            lambda_ren: pole.lambda_ren,
            c0: pole.c0,
            c1: pole.c1,
            kappa: pole.gamma_friction * pole.m_v,
            unstable: pole.gamma > 0.0,
        },
    )
    .map_err(io_err(&path))?;
    Ok(pole)
}

// ---------------------------------------------------------------- kernels

pub fn cmd_kernels(
    cfg: &RunConfig,
    meta: &ArtifactMeta,
    out_dir: &Path,
) -> Result<KernelTable, CommandError> {
    let model = cfg.model_params()?;
    let grid = cfg.make_grid(cfg.grid.n_modes)?;
    let es = linspace(cfg.kernels.e_min, cfg.kernels.e_max, cfg.kernels.n_points);
    let table = spectral::kernel_table(&model, &grid, &es)?;
    let rows: Vec<Vec<f64>> = (0..es.len())
        .map(|i| vec![table.energies[i], table.d[i], table.b[i], table.a[i]])
        .collect();
    let path = out_dir.join("kernels.csv");
    write_csv(&path, meta, &["E", "D", "B", "A"], &rows).map_err(io_err(&path))?;
    Ok(table)
}

// ---------------------------------------------------------------- sector

#[derive(Debug, Clone, Serialize)]
pub struct SectorSummary {
    pub meta: ArtifactMeta,
    pub n_modes: usize,
    pub gamma_pole: f64,
    pub gamma_fit: Option<f64>,
    pub rel_width_diff: Option<f64>,
    pub fit_window: Option<(f64, f64)>,
    pub t_max: f64,
    pub z_v: f64,
}

pub struct SectorRun {
    pub record: SurvivalRecord,
    pub pole: PoleResult,
    pub summary: SectorSummary,
}

pub fn cmd_sector(
    cfg: &RunConfig,
    meta: &ArtifactMeta,
    out_dir: &Path,
) -> Result<SectorRun, CommandError> {
    let model = cfg.model_params()?;
    let grid = cfg.make_grid(cfg.sector.n_modes)?;
    let pole = spectral::find_pole(&model, &grid)?;
    let t_max = cfg.sector.t_max.unwrap_or(if pole.gamma > 0.0 {
        3.0 / pole.gamma
    } else {
        STABLE_HORIZON
    });
    let h = sector::build_sector(&model, &grid);
    let ts = linspace(0.0, t_max, cfg.sector.n_times);
    let record = sector::evolve_survival(&h, &ts)?;

    let (gamma_fit, window) = if pole.gamma > 0.0 {
        let w = (cfg.sector.fit_lo / pole.gamma, cfg.sector.fit_hi / pole.gamma);
        (Some(sector::fit_width(&record, w.0, w.1)?), Some(w))
    } else {
        (None, None)
    };
    let summary = SectorSummary {
        meta: meta.clone(),
        n_modes: cfg.sector.n_modes,
        gamma_pole: pole.gamma,
        gamma_fit,
        rel_width_diff: gamma_fit.map(|g| ((g - pole.gamma) / pole.gamma).abs()),
        fit_window: window,
        t_max,
        z_v: pole.z_v,
    };

    let rows: Vec<Vec<f64>> = record
        .times
        .iter()
        .zip(&record.amplitude)
        .zip(&record.probability)
        .map(|((&t, c), &p)| vec![t, c.re, c.im, p])
        .collect();
    let csv_path = out_dir.join("survival.csv");
    write_csv(&csv_path, meta, &["t", "re_c", "im_c", "prob"], &rows)
        .map_err(io_err(&csv_path))?;
    let json_path = out_dir.join("sector.json");
    write_json(&json_path, &summary).map_err(io_err(&json_path))?;
    Ok(SectorRun {
        record,
        pole,
        summary,
    })
}

// ---------------------------------------------------------------- master

#[derive(Debug, Clone, Serialize)]
pub struct MasterSummary {
    pub meta: ArtifactMeta,
    pub n_modes: usize,
    pub variant: DissipatorVariant,
    pub kappa: f64,
    pub dt: f64,
    pub t_max: f64,
    pub final_entropy: f64,
    pub max_trace_defect: f64,
    pub min_entropy_increment: f64,
    pub max_hermiticity_defect: f64,
    /// max over snapshots of |Tr ρ² − 1|, the purity drift of unitary runs.
    pub purity_defect_max: f64,
    /// Exponential decay rate of |ρ_0V| when the initial state carries
    /// vacuum coherence.
    pub coherence_rate_fit: Option<f64>,
}

pub struct MasterCmdRun {
    pub run: MasterRun,
    pub pole: PoleResult,
    pub kappa: f64,
    pub summary: MasterSummary,
}

pub fn cmd_master(
    cfg: &RunConfig,
    meta: &ArtifactMeta,
    out_dir: &Path,
) -> Result<MasterCmdRun, CommandError> {
    let model = cfg.model_params()?;
    let grid = cfg.make_grid(cfg.master.n_modes)?;
    let pole = spectral::find_pole(&model, &grid)?;
    let gen = master::build_generator(&model, &grid, &pole, cfg.master.variant);
    let t_max = cfg.master.t_max.unwrap_or(if pole.gamma > 0.0 {
        3.0 / pole.gamma
    } else {
        STABLE_HORIZON
    });
    let dt = cfg.master.dt.unwrap_or_else(|| gen.max_step());
    let n_steps = (t_max / dt).ceil() as usize;
    let stride = (n_steps / (cfg.master.n_snapshots - 1)).max(1);
    let snapshot_steps: Vec<usize> = (0..=n_steps).step_by(stride).collect();
    let rho0 = master::DensityMatrix::from_initial_state(cfg.master.initial_state, gen.dim);
    let run = master::evolve_density_detailed(&gen, &rho0, dt, n_steps, &snapshot_steps)?;

    let mut rows = Vec::with_capacity(run.times.len());
    let mut purity_defect = 0.0_f64;
    let mut coh_t = Vec::new();
    let mut coh_ln = Vec::new();
    for (t, snap) in run.times.iter().zip(&run.snapshots) {
        let tr = snap.trace().re;
        let s = master::linear_entropy(snap);
        let rho_vv = snap.get(master::V_INDEX, master::V_INDEX).re;
        let coh = snap.get(master::VACUUM, master::V_INDEX).norm();
        let herm = snap.hermiticity_defect();
        purity_defect = purity_defect.max((snap.purity() - 1.0).abs());
        rows.push(vec![*t, tr, s, rho_vv, coh, herm]);
        if coh > 1e-12 {
            coh_t.push(*t);
            coh_ln.push(coh.ln());
        }
    }
    let coherence_rate_fit = if cfg.master.initial_state == InitialState::VacuumVSuperposition {
        lee_core::fit::fit_line(&coh_t, &coh_ln).map(|f| -f.slope)
    } else {
        None
    };

    let kappa = gen.kappa;
    let summary = MasterSummary {
        meta: meta.clone(),
        n_modes: cfg.master.n_modes,
        variant: cfg.master.variant,
        kappa,
        dt,
        t_max,
        final_entropy: *run.s_per_step.last().unwrap(),
        max_trace_defect: run.max_trace_defect,
        min_entropy_increment: run.min_entropy_increment,
        max_hermiticity_defect: run.max_hermiticity_defect,
        purity_defect_max: purity_defect,
        coherence_rate_fit,
    };
    let csv_path = out_dir.join("master.csv");
    write_csv(
        &csv_path,
        meta,
        &["t", "trace", "entropy", "rho_vv", "abs_rho_0v", "herm_defect"],
        &rows,
    )
    .map_err(io_err(&csv_path))?;
    let json_path = out_dir.join("master.json");
    write_json(&json_path, &summary).map_err(io_err(&json_path))?;
    Ok(MasterCmdRun {
        run,
        pole,
        kappa,
        summary,
    })
}

// ---------------------------------------------------------------- langevin

#[derive(Debug, Clone, Serialize)]
pub struct LangevinSummary {
    pub meta: ArtifactMeta,
    pub gamma_friction: f64,
    pub m_v: f64,
    pub b_loc: f64,
    pub rate_theory: f64,
    pub rate_fit: Option<f64>,
    pub rate_se: Option<f64>,
    pub degenerate_fit: bool,
    pub tail_mean_sq: f64,
    pub tail_mean_sq_se: f64,
    /// ⟨|φ|²⟩∞ · 2γ m_eff / B_loc, unity when fluctuation balances
    /// dissipation.
    pub fd_balance: Option<f64>,
}

pub struct LangevinRun {
    pub ensemble: TrajectoryEnsemble,
    pub pole: PoleResult,
    pub summary: LangevinSummary,
}

pub fn cmd_langevin(
    cfg: &RunConfig,
    meta: &ArtifactMeta,
    out_dir: &Path,
) -> Result<LangevinRun, CommandError> {
    let model = cfg.model_params()?;
    let grid = cfg.make_grid(cfg.grid.n_modes)?;
    let pole = spectral::find_pole(&model, &grid)?;
    let local = spectral::local_kernels(&pole, &model);
    let spec = NoiseSpec {
        b_loc: local.b_loc,
        dt: cfg.langevin.dt,
        seed: cfg.langevin.seed,
        n_steps: cfg.langevin.n_steps,
        n_trajectories: cfg.langevin.n_trajectories,
    };
    let ensemble = langevin::run_ensemble(
        cfg.langevin.phi0,
        &pole,
        &spec,
        cfg.langevin.momentum,
        cfg.langevin.record_stride,
        cfg.langevin.tail_start,
    )?;

    let gamma = pole.gamma_friction;
    let m_eff = pole.m_v + cfg.langevin.momentum.powi(2) / (2.0 * pole.m_v);
    let rate_theory = gamma * m_eff / (1.0 + gamma * gamma);
    let fd_balance = if local.b_loc > 0.0 {
        Some(ensemble.tail_mean_sq * 2.0 * gamma * m_eff / local.b_loc)
    } else {
        None
    };
    let summary = LangevinSummary {
        meta: meta.clone(),
        gamma_friction: gamma,
        m_v: pole.m_v,
        b_loc: local.b_loc,
        rate_theory,
        rate_fit: ensemble.fit.map(|f| f.rate),
        rate_se: ensemble.fit.map(|f| f.rate_se),
        degenerate_fit: ensemble.fit.map(|f| f.degenerate).unwrap_or(true),
        tail_mean_sq: ensemble.tail_mean_sq,
        tail_mean_sq_se: ensemble.tail_mean_sq_se,
        fd_balance,
    };

    let rows: Vec<Vec<f64>> = (0..ensemble.times.len())
        .map(|i| {
            vec![
                ensemble.times[i],
                ensemble.mean_field[i].re,
                ensemble.mean_field[i].im,
                ensemble.mean_sq[i],
                ensemble.se_mean_re[i],
                ensemble.se_mean_im[i],
                ensemble.se_mean_sq[i],
            ]
        })
        .collect();
    let csv_path = out_dir.join("langevin.csv");
    write_csv(
        &csv_path,
        meta,
        &[
            "t",
            "re_mean",
            "im_mean",
            "mean_sq",
            "se_re_mean",
            "se_im_mean",
            "se_mean_sq",
        ],
        &rows,
    )
    .map_err(io_err(&csv_path))?;
    let json_path = out_dir.join("langevin.json");
    write_json(&json_path, &summary).map_err(io_err(&json_path))?;
    Ok(LangevinRun {
        ensemble,
        pole,
        summary,
    })
}
