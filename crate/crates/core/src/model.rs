//! Lee-model parameters, boson dispersion, form factor, and the momentum
//! discretization shared by all other modules.
//!
//! The model couples a heavy fermion V to an N fermion plus a boson θ with
//! dispersion ω_k = √(k² + μ²). Rotationally invariant momentum integrals
//! reduce to
//!
//! ```text
//! ∫ d³k/(2π)³ g(ω_k)  =  (1/2π²) ∫ k² g(ω_k) dk,
//! ```
//!
//! discretized here on a uniform-in-k composite midpoint grid. Natural units
//! with μ = 1 as the default energy scale; the bare coupling λ₀ is
//! dimensionless.

use serde::Serialize;

use crate::error::{Error, Result};

/// Interaction cutoff function f(ω).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum FormFactor {
    /// f(ω) = 1 for ω ≤ Λ, 0 above.
    SharpCutoff(f64),
    /// f(ω) = Λ² / (ω² + Λ²).
    Lorentzian(f64),
}

impl FormFactor {
    pub fn cutoff(&self) -> f64 {
        match *self {
            FormFactor::SharpCutoff(l) | FormFactor::Lorentzian(l) => l,
        }
    }

    /// Evaluate f(ω). Lies in [0, 1] for all ω ≥ 0.
    pub fn eval(&self, omega: f64) -> f64 {
        match *self {
            FormFactor::SharpCutoff(l) => {
                if omega <= l {
                    1.0
                } else {
                    0.0
                }
            }
            FormFactor::Lorentzian(l) => l * l / (omega * omega + l * l),
        }
    }
}

/// Bare couplings, masses, and cutoff defining the Lee model.
#[derive(Debug, Clone, Serialize)]
pub struct ModelParams {
    /// Bare V mass.
    pub m_v0: f64,
    /// N mass.
    pub m_n: f64,
    /// Boson mass μ.
    pub mu: f64,
    /// Bare coupling λ₀.
    pub lambda0: f64,
    pub form_factor: FormFactor,
}

impl ModelParams {
    pub fn new(
        m_v0: f64,
        m_n: f64,
        mu: f64,
        lambda0: f64,
        form_factor: FormFactor,
    ) -> Result<Self> {
        if !(mu > 0.0) {
            return Err(Error::Config(format!("boson mass mu must be > 0, got {mu}")));
        }
        if !(m_n > 0.0) {
            return Err(Error::Config(format!("m_N must be > 0, got {m_n}")));
        }
        if !(lambda0 >= 0.0) {
            return Err(Error::Config(format!("lambda0 must be >= 0, got {lambda0}")));
        }
        if !(form_factor.cutoff() > mu) {
            return Err(Error::Config(format!(
                "cutoff {} must exceed the boson mass {mu}",
                form_factor.cutoff()
            )));
        }
        if !m_v0.is_finite() {
            return Err(Error::Config(format!("m_V0 must be finite, got {m_v0}")));
        }
        Ok(Self {
            m_v0,
            m_n,
            mu,
            lambda0,
            form_factor,
        })
    }

    /// Boson dispersion ω(k) = √(k² + μ²); ≥ μ with equality iff k = 0.
    pub fn omega(&self, k: f64) -> f64 {
        (k * k + self.mu * self.mu).sqrt()
    }

    pub fn form_factor(&self, omega: f64) -> f64 {
        self.form_factor.eval(omega)
    }

    /// Decay threshold m_N + μ.
    pub fn threshold(&self) -> f64 {
        self.m_n + self.mu
    }

    /// Unstable regime: the physical mass lies above the decay threshold.
    pub fn is_unstable_at(&self, m_v: f64) -> bool {
        m_v > self.threshold()
    }
}

/// Radial momentum grid with quadrature weights w_i = Δk k_i²/(2π²),
/// reducing ∫d³k/(2π)³ to a finite sum.
#[derive(Debug, Clone, Serialize)]
pub struct MomentumGrid {
    /// Strictly increasing midpoints k_i = (i + ½)Δk.
    pub k_values: Vec<f64>,
    /// Midpoint weights, all positive.
    pub weights: Vec<f64>,
    pub n_modes: usize,
}

impl MomentumGrid {
    /// Uniform-in-k midpoint grid on (0, k_max). Deterministic for fixed inputs.
    pub fn new(params: &ModelParams, n_modes: usize, k_max: f64) -> Result<Self> {
        if n_modes < 2 {
            return Err(Error::Config(format!(
                "grid needs at least 2 modes, got {n_modes}"
            )));
        }
        if !(k_max > 0.0) {
            return Err(Error::Config(format!("k_max must be > 0, got {k_max}")));
        }
        if let FormFactor::SharpCutoff(l) = params.form_factor {
            let k_support = (l * l - params.mu * params.mu).sqrt();
            if k_max < k_support {
                return Err(Error::Config(format!(
                    "k_max = {k_max} does not cover the sharp cutoff support k = {k_support}"
                )));
            }
        }
        let dk = k_max / n_modes as f64;
        let k_values: Vec<f64> = (0..n_modes).map(|i| (i as f64 + 0.5) * dk).collect();
        let weights = k_values
            .iter()
            .map(|&k| dk * k * k / (2.0 * std::f64::consts::PI.powi(2)))
            .collect();
        Ok(Self {
            k_values,
            weights,
            n_modes,
        })
    }

    /// Default coverage: for a sharp cutoff exactly the support k = √(Λ²−μ²),
    /// so the quadrature domain edge coincides with the integrand support and
    /// midpoint convergence is clean; for a Lorentzian a wide tail.
    pub fn default_k_max(params: &ModelParams) -> f64 {
        match params.form_factor {
            FormFactor::SharpCutoff(l) => (l * l - params.mu * params.mu).sqrt(),
            FormFactor::Lorentzian(l) => 25.0 * l,
        }
    }

    pub fn with_default_coverage(params: &ModelParams, n_modes: usize) -> Result<Self> {
        Self::new(params, n_modes, Self::default_k_max(params))
    }

    /// Uniform spacing Δk.
    pub fn dk(&self) -> f64 {
        if self.k_values.len() >= 2 {
            self.k_values[1] - self.k_values[0]
        } else {
            2.0 * self.k_values[0]
        }
    }

    /// Upper edge of the covered k interval (last midpoint + Δk/2).
    pub fn k_edge(&self) -> f64 {
        self.k_values[self.n_modes - 1] + 0.5 * self.dk()
    }

    /// Σ w_i g(k_i) ≈ ∫ d³k/(2π)³ g(k).
    pub fn integrate(&self, g: impl Fn(f64) -> f64) -> f64 {
        self.k_values
            .iter()
            .zip(&self.weights)
            .map(|(&k, &w)| w * g(k))
            .sum()
    }
}
