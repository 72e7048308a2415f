//! Plain-text configuration: `key = value` lines under `[section]` headers,
//! `#` comments. Unknown sections or keys are rejected, every value is
//! validated before any computation runs.
//!
//! Grammar (all sections optional, defaults shown in configs/benchmark.conf):
//!
//! ```text
//! [model]    mu, m_n, m_v0, lambda0, form_factor = sharp|lorentzian, cutoff
//! [grid]     n_modes, k_max = <float>|auto
//! [kernels]  e_min, e_max, n_points
//! [sector]   n_modes, t_max = <float>|auto, n_times, fit_lo, fit_hi
//! [master]   n_modes, variant = hermitized|literal,
//!            initial_state = v|superposition|mixed,
//!            dt = <float>|auto, t_max = <float>|auto, n_snapshots
//! [langevin] seed, n_trajectories, n_steps, dt, phi0_re, phi0_im,
//!            momentum, record_stride, tail_start
//! ```

use std::collections::BTreeMap;

use num_complex::Complex64;
use thiserror::Error;

use lee_core::master::{DissipatorVariant, InitialState};
use lee_core::model::{FormFactor, ModelParams, MomentumGrid};

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("config line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("unknown section [{0}]")]
    UnknownSection(String),
    #[error("unknown key '{key}' in section [{section}]")]
    UnknownKey { section: String, key: String },
    #[error("invalid value for {key}: {msg}")]
    Invalid { key: String, msg: String },
    #[error("{0}")]
    Model(String),
}

#[derive(Debug, Clone)]
pub struct ModelCfg {
    pub mu: f64,
    pub m_n: f64,
    pub m_v0: f64,
    pub lambda0: f64,
    pub form_factor: String,
    pub cutoff: f64,
}

#[derive(Debug, Clone)]
pub struct GridCfg {
    pub n_modes: usize,
    /// `None` selects the default coverage for the form factor.
    pub k_max: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct KernelsCfg {
    pub e_min: f64,
    pub e_max: f64,
    pub n_points: usize,
}

#[derive(Debug, Clone)]
pub struct SectorCfg {
    pub n_modes: usize,
    /// `None`: 3/Γ in the unstable regime, a fixed window otherwise.
    pub t_max: Option<f64>,
    pub n_times: usize,
    /// Fit window in units of 1/Γ.
    pub fit_lo: f64,
    pub fit_hi: f64,
}

#[derive(Debug, Clone)]
pub struct MasterCfg {
    pub n_modes: usize,
    pub variant: DissipatorVariant,
    pub initial_state: InitialState,
    pub dt: Option<f64>,
    pub t_max: Option<f64>,
    pub n_snapshots: usize,
}

#[derive(Debug, Clone)]
pub struct LangevinCfg {
    pub seed: u64,
    pub n_trajectories: usize,
    pub n_steps: usize,
    pub dt: f64,
    pub phi0: Complex64,
    pub momentum: f64,
    pub record_stride: usize,
    pub tail_start: f64,
}

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub model: ModelCfg,
    pub grid: GridCfg,
    pub kernels: KernelsCfg,
    pub sector: SectorCfg,
    pub master: MasterCfg,
    pub langevin: LangevinCfg,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            model: ModelCfg {
                mu: 1.0,
                m_n: 10.0,
                m_v0: 12.0,
                lambda0: 0.2,
                form_factor: "sharp".into(),
                cutoff: 5.0,
            },
            grid: GridCfg {
                n_modes: 1024,
                k_max: None,
            },
            kernels: KernelsCfg {
                e_min: -14.0,
                e_max: 14.0,
                n_points: 561,
            },
            sector: SectorCfg {
                n_modes: 1024,
                t_max: None,
                n_times: 1201,
                fit_lo: 0.2,
                fit_hi: 2.0,
            },
            master: MasterCfg {
                n_modes: 128,
                variant: DissipatorVariant::Hermitized,
                initial_state: InitialState::PureV,
                dt: None,
                t_max: None,
                n_snapshots: 300,
            },
            langevin: LangevinCfg {
                seed: 42,
                n_trajectories: 200,
                n_steps: 3_000_000,
                dt: 2.0e-5,
                phi0: Complex64::new(1.0, 0.0),
                momentum: 0.0,
                record_stride: 3000,
                tail_start: 0.5,
            },
        }
    }
}

fn parse_num<T: std::str::FromStr>(key: &str, raw: &str) -> Result<T, ConfigError> {
    raw.parse().map_err(|_| ConfigError::Invalid {
        key: key.into(),
        msg: format!("cannot parse '{raw}'"),
    })
}

fn parse_auto(key: &str, raw: &str) -> Result<Option<f64>, ConfigError> {
    if raw == "auto" {
        Ok(None)
    } else {
        parse_num::<f64>(key, raw).map(Some)
    }
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        // collect (section, key) -> (value, line) and reject duplicates
        let mut entries: BTreeMap<(String, String), String> = BTreeMap::new();
        let mut section = String::new();
        for (i, raw_line) in text.lines().enumerate() {
            let line = raw_line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            if let Some(name) = line.strip_prefix('[') {
                let name = name.strip_suffix(']').ok_or(ConfigError::Parse {
                    line: i + 1,
                    msg: "unterminated section header".into(),
                })?;
                section = name.trim().to_string();
                continue;
            }
            let (key, value) = line.split_once('=').ok_or(ConfigError::Parse {
                line: i + 1,
                msg: format!("expected 'key = value', got '{line}'"),
            })?;
            if section.is_empty() {
                return Err(ConfigError::Parse {
                    line: i + 1,
                    msg: "key outside of any [section]".into(),
                });
            }
            let key = key.trim().to_string();
            if entries
                .insert((section.clone(), key.clone()), value.trim().to_string())
                .is_some()
            {
                return Err(ConfigError::Parse {
                    line: i + 1,
                    msg: format!("duplicate key '{key}' in [{section}]"),
                });
            }
        }

        let mut cfg = RunConfig::default();
        for ((section, key), value) in &entries {
            let v = value.as_str();
            let k = key.as_str();
            match section.as_str() {
                "model" => match k {
                    "mu" => cfg.model.mu = parse_num(k, v)?,
                    "m_n" => cfg.model.m_n = parse_num(k, v)?,
                    "m_v0" => cfg.model.m_v0 = parse_num(k, v)?,
                    "lambda0" => cfg.model.lambda0 = parse_num(k, v)?,
                    "form_factor" => cfg.model.form_factor = v.to_string(),
                    "cutoff" => cfg.model.cutoff = parse_num(k, v)?,
                    _ => {
                        return Err(ConfigError::UnknownKey {
                            section: section.clone(),
                            key: key.clone(),
                        })
                    }
                },
                "grid" => match k {
                    "n_modes" => cfg.grid.n_modes = parse_num(k, v)?,
                    "k_max" => cfg.grid.k_max = parse_auto(k, v)?,
                    _ => {
                        return Err(ConfigError::UnknownKey {
                            section: section.clone(),
                            key: key.clone(),
                        })
                    }
                },
                "kernels" => match k {
                    "e_min" => cfg.kernels.e_min = parse_num(k, v)?,
                    "e_max" => cfg.kernels.e_max = parse_num(k, v)?,
                    "n_points" => cfg.kernels.n_points = parse_num(k, v)?,
                    _ => {
                        return Err(ConfigError::UnknownKey {
                            section: section.clone(),
                            key: key.clone(),
                        })
                    }
                },
                "sector" => match k {
                    "n_modes" => cfg.sector.n_modes = parse_num(k, v)?,
                    "t_max" => cfg.sector.t_max = parse_auto(k, v)?,
                    "n_times" => cfg.sector.n_times = parse_num(k, v)?,
                    "fit_lo" => cfg.sector.fit_lo = parse_num(k, v)?,
                    "fit_hi" => cfg.sector.fit_hi = parse_num(k, v)?,
                    _ => {
                        return Err(ConfigError::UnknownKey {
                            section: section.clone(),
                            key: key.clone(),
                        })
                    }
                },
                "master" => match k {
                    "n_modes" => cfg.master.n_modes = parse_num(k, v)?,
                    "variant" => {
                        cfg.master.variant = match v {
                            "hermitized" => DissipatorVariant::Hermitized,
                            "literal" => DissipatorVariant::Literal,
                            _ => {
                                return Err(ConfigError::Invalid {
                                    key: key.clone(),
                                    msg: format!("expected hermitized|literal, got '{v}'"),
                                })
                            }
                        }
                    }
                    "initial_state" => {
                        cfg.master.initial_state = match v {
                            "v" => InitialState::PureV,
                            "superposition" => InitialState::VacuumVSuperposition,
                            "mixed" => InitialState::MaximallyMixed,
                            _ => {
                                return Err(ConfigError::Invalid {
                                    key: key.clone(),
                                    msg: format!("expected v|superposition|mixed, got '{v}'"),
                                })
                            }
                        }
                    }
                    "dt" => cfg.master.dt = parse_auto(k, v)?,
                    "t_max" => cfg.master.t_max = parse_auto(k, v)?,
                    "n_snapshots" => cfg.master.n_snapshots = parse_num(k, v)?,
                    _ => {
                        return Err(ConfigError::UnknownKey {
                            section: section.clone(),
                            key: key.clone(),
                        })
                    }
                },
                "langevin" => match k {
                    "seed" => cfg.langevin.seed = parse_num(k, v)?,
                    "n_trajectories" => cfg.langevin.n_trajectories = parse_num(k, v)?,
                    "n_steps" => cfg.langevin.n_steps = parse_num(k, v)?,
                    "dt" => cfg.langevin.dt = parse_num(k, v)?,
                    "phi0_re" => cfg.langevin.phi0.re = parse_num(k, v)?,
                    "phi0_im" => cfg.langevin.phi0.im = parse_num(k, v)?,
                    "momentum" => cfg.langevin.momentum = parse_num(k, v)?,
                    "record_stride" => cfg.langevin.record_stride = parse_num(k, v)?,
                    "tail_start" => cfg.langevin.tail_start = parse_num(k, v)?,
                    _ => {
                        return Err(ConfigError::UnknownKey {
                            section: section.clone(),
                            key: key.clone(),
                        })
                    }
                },
                other => return Err(ConfigError::UnknownSection(other.to_string())),
            }
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        // model parameters go through the library constructor
        self.model_params().map_err(|e| ConfigError::Model(e.to_string()))?;
        let bad = |key: &str, msg: &str| {
            Err(ConfigError::Invalid {
                key: key.into(),
                msg: msg.into(),
            })
        };
        if self.kernels.n_points < 2 {
            return bad("kernels.n_points", "need at least 2 points");
        }
        if !(self.kernels.e_min < self.kernels.e_max) {
            return bad("kernels.e_min", "e_min must be below e_max");
        }
        if self.sector.n_times < 8 {
            return bad("sector.n_times", "need at least 8 points");
        }
        if !(self.sector.fit_lo > 0.0 && self.sector.fit_lo < self.sector.fit_hi) {
            return bad("sector.fit_lo", "window must satisfy 0 < fit_lo < fit_hi");
        }
        if self.master.n_snapshots < 2 {
            return bad("master.n_snapshots", "need at least 2 snapshots");
        }
        if let Some(dt) = self.master.dt {
            if !(dt > 0.0) {
                return bad("master.dt", "dt must be positive");
            }
        }
        if let Some(t) = self.master.t_max {
            if !(t > 0.0) {
                return bad("master.t_max", "t_max must be positive");
            }
        }
        if let Some(t) = self.sector.t_max {
            if !(t > 0.0) {
                return bad("sector.t_max", "t_max must be positive");
            }
        }
        if !(self.langevin.dt > 0.0) {
            return bad("langevin.dt", "dt must be positive");
        }
        if self.langevin.n_steps == 0 {
            return bad("langevin.n_steps", "n_steps must be positive");
        }
        if self.langevin.n_trajectories < 2 {
            return bad("langevin.n_trajectories", "need at least 2 trajectories");
        }
        if self.langevin.record_stride == 0 {
            return bad("langevin.record_stride", "record_stride must be positive");
        }
        if !(0.0..1.0).contains(&self.langevin.tail_start) {
            return bad("langevin.tail_start", "tail_start must lie in [0, 1)");
        }
        if !self.langevin.phi0.re.is_finite() || !self.langevin.phi0.im.is_finite() {
            return bad("langevin.phi0_re", "initial amplitude must be finite");
        }
        Ok(())
    }

    pub fn model_params(&self) -> lee_core::Result<ModelParams> {
        let ff = match self.model.form_factor.as_str() {
            "sharp" => FormFactor::SharpCutoff(self.model.cutoff),
            "lorentzian" => FormFactor::Lorentzian(self.model.cutoff),
            other => {
                return Err(lee_core::Error::Config(format!(
                    "unknown form factor '{other}' (expected sharp|lorentzian)"
                )))
            }
        };
        ModelParams::new(
            self.model.m_v0,
            self.model.m_n,
            self.model.mu,
            self.model.lambda0,
            ff,
        )
    }

    pub fn make_grid(&self, n_modes: usize) -> lee_core::Result<MomentumGrid> {
        let params = self.model_params()?;
        match self.grid.k_max {
            Some(k) => MomentumGrid::new(&params, n_modes, k),
            None => MomentumGrid::with_default_coverage(&params, n_modes),
        }
    }
}
