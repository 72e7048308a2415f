//! Exact reference dynamics in the single-excitation sector.
//!
//! On the discretized grid the span of {|V⟩, |N θ_k⟩} closes under the
//! Hamiltonian, which becomes a real symmetric arrowhead matrix
//!
//! ```text
//! H = [ m_V⁰   h_1  h_2 ... ]        h_i = λ₀ f(ω_i) √(w_i / 2ω_i),
//!     [ h_1    m_N+ω_1       ]
//!     [ h_2        m_N+ω_2   ]
//! ```
//!
//! with the grid weights folded into the couplings as √w so the discrete
//! model is a bona fide Hermitian matrix. Full dense diagonalization makes
//! the survival amplitude c(t) = ⟨V|e^{−iHt}|V⟩ = Σ_a |⟨V|a⟩|² e^{−iE_a t}
//! exact to eigensolver precision — this module is the ground truth the
//! spectral and master layers are checked against.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fit;
use crate::model::{ModelParams, MomentumGrid};

/// Arrowhead Hamiltonian of the V ⊕ Nθ sector.
#[derive(Debug, Clone)]
pub struct SectorHamiltonian {
    /// n_modes + 1.
    pub dim: usize,
    /// Diagonal [m_V⁰, m_N+ω_1, …, m_N+ω_n].
    pub diag: Vec<f64>,
    /// Off-diagonal couplings h_k to the V entry.
    pub couplings: Vec<f64>,
    /// Decay threshold m_N + μ separating an isolated level from the band.
    pub threshold: f64,
    /// √w_i of the underlying grid, for mapping eigenvectors back to the
    /// continuum weight normalization.
    pub sqrt_weights: Vec<f64>,
}

/// Eigen data needed for survival dynamics: energies and |⟨V|a⟩|².
#[derive(Debug, Clone)]
pub struct SectorEigen {
    pub energies: Vec<f64>,
    pub v_weights: Vec<f64>,
}

/// Isolated dressed state of the stable regime.
#[derive(Debug, Clone)]
pub struct StableMode {
    pub m_v: f64,
    /// Continuum-normalized weights g_k = (v_k / v_V) / √w_k.
    pub weights: Vec<f64>,
    /// |⟨V|dressed⟩|².
    pub z_v_discrete: f64,
}

/// Survival amplitude record.
#[derive(Debug, Clone)]
pub struct SurvivalRecord {
    pub times: Vec<f64>,
    pub amplitude: Vec<Complex64>,
    pub probability: Vec<f64>,
}

/// Restrict the Hamiltonian to one excitation on the grid.
pub fn build_sector(model: &ModelParams, grid: &MomentumGrid) -> SectorHamiltonian {
    let n = grid.n_modes;
    let mut diag = Vec::with_capacity(n + 1);
    diag.push(model.m_v0);
    let mut couplings = Vec::with_capacity(n);
    let mut sqrt_weights = Vec::with_capacity(n);
    for (&k, &w) in grid.k_values.iter().zip(&grid.weights) {
        let omega = model.omega(k);
        diag.push(model.m_n + omega);
        couplings.push(model.lambda0 * model.form_factor(omega) * (w / (2.0 * omega)).sqrt());
        sqrt_weights.push(w.sqrt());
    }
    SectorHamiltonian {
        dim: n + 1,
        diag,
        couplings,
        threshold: model.threshold(),
        sqrt_weights,
    }
}

impl SectorHamiltonian {
    /// Construct directly from arrowhead data (mainly for small closed-form
    /// checks).
    pub fn from_parts(
        diag: Vec<f64>,
        couplings: Vec<f64>,
        threshold: f64,
        sqrt_weights: Vec<f64>,
    ) -> Self {
        assert_eq!(diag.len(), couplings.len() + 1);
        assert_eq!(couplings.len(), sqrt_weights.len());
        Self {
            dim: diag.len(),
            diag,
            couplings,
            threshold,
            sqrt_weights,
        }
    }

    pub fn dense(&self) -> DMatrix<f64> {
        let d = self.dim;
        let mut m = DMatrix::zeros(d, d);
        for i in 0..d {
            m[(i, i)] = self.diag[i];
        }
        for (i, &h) in self.couplings.iter().enumerate() {
            m[(0, i + 1)] = h;
            m[(i + 1, 0)] = h;
        }
        m
    }

    /// Full eigendecomposition reduced to the V-projected weights, sorted by
    /// energy.
    pub fn eigen(&self) -> SectorEigen {
        let se = self.dense().symmetric_eigen();
        let mut idx: Vec<usize> = (0..self.dim).collect();
        idx.sort_by(|&a, &b| se.eigenvalues[a].total_cmp(&se.eigenvalues[b]));
        let energies = idx.iter().map(|&a| se.eigenvalues[a]).collect();
        let v_weights = idx
            .iter()
            .map(|&a| {
                let v = se.eigenvectors.column(a)[0];
                v * v
            })
            .collect();
        SectorEigen {
            energies,
            v_weights,
        }
    }
}

impl SectorEigen {
    /// Survival amplitude at one time.
    pub fn amplitude(&self, t: f64) -> Complex64 {
        let mut c = Complex64::new(0.0, 0.0);
        for (&e, &p) in self.energies.iter().zip(&self.v_weights) {
            let (s, co) = (e * t).sin_cos();
            c += p * Complex64::new(co, -s);
        }
        c
    }

    /// Local level spacing at the maximum-weight eigenvalue, the inverse of
    /// the finite-size revival scale.
    pub fn resonance_gap(&self) -> f64 {
        let n = self.energies.len();
        let amax = self
            .v_weights
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.total_cmp(b.1))
            .map(|(i, _)| i)
            .unwrap();
        let mut gap = f64::INFINITY;
        if amax + 1 < n {
            gap = gap.min(self.energies[amax + 1] - self.energies[amax]);
        }
        if amax > 0 {
            gap = gap.min(self.energies[amax] - self.energies[amax - 1]);
        }
        gap
    }
}

/// Isolated eigenvalue and dressed-state weights of the stable regime.
///
/// Fails with a regime error when no eigenvalue lies below the threshold
/// m_N + μ (the unstable case: level repulsion keeps the lowest eigenvalue
/// inside the band bottom).
pub fn diagonalize_stable(h: &SectorHamiltonian) -> Result<StableMode> {
    let se = h.dense().symmetric_eigen();
    let mut lowest = 0;
    for a in 1..h.dim {
        if se.eigenvalues[a] < se.eigenvalues[lowest] {
            lowest = a;
        }
    }
    let m_v = se.eigenvalues[lowest];
    if m_v >= h.threshold {
        return Err(Error::Regime(format!(
            "lowest eigenvalue {m_v} is not below the threshold {}; no isolated dressed state",
            h.threshold
        )));
    }
    let col = se.eigenvectors.column(lowest);
    let v_v = col[0];
    if v_v == 0.0 {
        return Err(Error::Regime(
            "dressed state carries no V component".into(),
        ));
    }
    let weights = (0..h.dim - 1)
        .map(|i| col[i + 1] / v_v / h.sqrt_weights[i].max(f64::MIN_POSITIVE))
        .collect();
    Ok(StableMode {
        m_v,
        weights,
        z_v_discrete: v_v * v_v,
    })
}

/// Evaluate the survival amplitude on a time grid (exact, no time stepping).
pub fn evolve_survival(h: &SectorHamiltonian, t_grid: &[f64]) -> Result<SurvivalRecord> {
    if t_grid.is_empty() || t_grid[0] < 0.0 || t_grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::Config(
            "time grid must be ascending and start at t >= 0".into(),
        ));
    }
    let eig = h.eigen();
    let amplitude: Vec<Complex64> = t_grid.iter().map(|&t| eig.amplitude(t)).collect();
    let probability = amplitude.iter().map(|c| c.norm_sqr()).collect();
    Ok(SurvivalRecord {
        times: t_grid.to_vec(),
        amplitude,
        probability,
    })
}

/// Least-squares width from the intermediate-time window of a survival
/// record: slope of ln|c|² on t ∈ [lo, hi] gives −Γ.
pub fn fit_width(record: &SurvivalRecord, t_lo: f64, t_hi: f64) -> Result<f64> {
    let mut ts = Vec::new();
    let mut ys = Vec::new();
    for (&t, &p) in record.times.iter().zip(&record.probability) {
        if t >= t_lo && t <= t_hi && p > 0.0 {
            ts.push(t);
            ys.push(p.ln());
        }
    }
    let f = fit::fit_line(&ts, &ys)
        .ok_or_else(|| Error::Regime("too few points in the fit window".into()))?;
    Ok(-f.slope)
}

/// First time t > 2/Γ at which the survival probability re-exceeds
/// `threshold` — the finite-size revival the continuum limit removes.
///
/// Returns `Ok(None)` when no recurrence occurs within the scan horizon
/// (2.5 revival periods of the local level spacing). Fails with a regime
/// error when the state does not decay at all (stable or free theory).
pub fn recurrence_estimate(h: &SectorHamiltonian, threshold: f64) -> Result<Option<f64>> {
    if threshold > 1.0 {
        // |c|² ≤ 1: unattainable
        return Ok(None);
    }
    let eig = h.eigen();

    // decay scale: coarse scan for the first 1/e crossing
    let gap = eig.resonance_gap();
    let p_max = eig.v_weights.iter().cloned().fold(0.0, f64::max);
    let gamma_guess = (2.0 * gap / (std::f64::consts::PI * p_max)).max(1e-12);
    let dt_coarse = 0.05 / gamma_guess;
    let mut t_e = None;
    for j in 1..=600 {
        let t = j as f64 * dt_coarse;
        if eig.amplitude(t).norm_sqr() < (-1.0_f64).exp() {
            t_e = Some(t);
            break;
        }
    }
    let t_e = t_e.ok_or_else(|| {
        Error::Regime("survival probability never decays below 1/e; unstable regime required".into())
    })?;
    let gamma_e = 1.0 / t_e;

    // refine on the standard window [0.2/Γ, 2/Γ]
    let n_fit = 200;
    let (lo, hi) = (0.2 / gamma_e, 2.0 / gamma_e);
    let ts: Vec<f64> = (0..n_fit)
        .map(|i| lo + (hi - lo) * i as f64 / (n_fit - 1) as f64)
        .collect();
    let ys: Vec<f64> = ts
        .iter()
        .map(|&t| eig.amplitude(t).norm_sqr().max(1e-300).ln())
        .collect();
    let gamma_fit = fit::fit_line(&ts, &ys).map(|f| -f.slope).unwrap_or(gamma_e);
    let gamma_fit = if gamma_fit > 0.0 { gamma_fit } else { gamma_e };

    // revival scan
    let start = 2.0 / gamma_fit;
    let step = 0.02 / gamma_fit;
    let horizon = 2.5 * (2.0 * std::f64::consts::PI / gap);
    let mut t = start + step;
    while t <= horizon {
        if eig.amplitude(t).norm_sqr() > threshold {
            return Ok(Some(t));
        }
        t += step;
    }
    Ok(None)
}
