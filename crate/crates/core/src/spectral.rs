//! Self-energy, in-in kernels D/B/A, renormalization constants, and the
//! complex pole of the retarded V propagator.
//!
//! The one-loop self-energy at zero total momentum is
//!
//! ```text
//! Σ(E) = ∫ d³k/(2π)³ [λ₀² f²(ω_k)/(2ω_k)] / (m_N + ω_k − E − iε),
//! ```
//!
//! whose real part is a principal-value integral and whose imaginary part
//! opens at the decay threshold E = m_N + μ:
//!
//! ```text
//! Im Σ(E) = λ₀² f²(x) √(x² − μ²) / 4π,   x = E − m_N > μ.
//! ```
//!
//! The kernels follow as D(E) = E − m_V⁰ + Re Σ(E), B(E) = Im Σ(E) (with the
//! cutoff squared, consistent with the self-energy), A(E) = sign(E)·B(E).
//!
//! Principal values are evaluated by subtraction in the k variable, where
//! the measure k²dk makes the integrand analytic through the threshold:
//! with M(k) = (k²/2π²)·[f²/(2ω)]·(ω + x) one has
//!
//! ```text
//! P∫ M(k)/(k² − k_x²) dk = ∫ [M(k) − M(k_x)]/(k² − k_x²) dk
//!                          + M(k_x)/(2k_x) · ln[(K − k_x)/(K + k_x)],
//! ```
//!
//! which removes any grid-alignment sensitivity of naive bin skipping. All
//! loop quantities factor the bare coupling as an overall λ₀², so rescaling
//! λ₀ → 2λ₀ multiplies Σ, C₀, C₁ and B by exactly 4 in floating point.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{FormFactor, ModelParams, MomentumGrid};

const TWO_PI2: f64 = 2.0 * PI * PI;

/// Tabulated kernels on an energy grid.
#[derive(Debug, Clone, Serialize)]
pub struct KernelTable {
    pub energies: Vec<f64>,
    /// Dispersive kernel D(E) = E − m_V⁰ + Re Σ(E).
    pub d: Vec<f64>,
    /// Noise kernel B(E) ≥ 0, zero below threshold.
    pub b: Vec<f64>,
    /// Dissipative kernel A(E) = sign(E)·B(E).
    pub a: Vec<f64>,
    /// Description of the principal-value prescription.
    pub epsilon_scheme: String,
}

/// Physical mass, width, and renormalization data of the V pole.
#[derive(Debug, Clone, Serialize)]
pub struct PoleResult {
    /// Physical mass m_V solving D(m_V) = 0.
    pub m_v: f64,
    /// Width Γ = 2 Z_V Im Σ(m_V); zero in the stable regime.
    pub gamma: f64,
    /// Dimensionless friction γ = λ₀² f(m_V − m_N)/4π of the local kernels.
    ///
    /// The cutoff is evaluated at the boson energy m_V − m_N carried by the
    /// decay products; in the heavy-V regime m_V ≫ m_N, μ this coincides
    /// with f(m_V) of the local approximation.
    pub gamma_friction: f64,
    /// Wave-function renormalization Z_V = 1/(1 + C₁).
    pub z_v: f64,
    /// Renormalized coupling, λ² = Z_V λ₀².
    pub lambda_ren: f64,
    pub c0: f64,
    pub c1: f64,
}

impl PoleResult {
    /// Free pole for λ₀ = 0.
    pub fn free(m_v0: f64) -> Self {
        Self {
            m_v: m_v0,
            gamma: 0.0,
            gamma_friction: 0.0,
            z_v: 1.0,
            lambda_ren: 0.0,
            c0: 0.0,
            c1: 0.0,
        }
    }
}

/// Local-approximation coefficients: A(E) ≈ γ·E, B(E) ≈ γ·m_V.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct LocalKernels {
    pub a_slope: f64,
    pub b_loc: f64,
    pub gamma_friction: f64,
}

/// Reduced spectral density √(x²−μ²) f²(x) / 4π at x = E − m_N (unit coupling).
fn im_reduced(e: f64, model: &ModelParams) -> f64 {
    let x = e - model.m_n;
    if x <= model.mu {
        return 0.0;
    }
    let f = model.form_factor(x);
    (x * x - model.mu * model.mu).sqrt() * f * f / (4.0 * PI)
}

/// M(k) of the subtraction scheme (unit coupling).
fn subtraction_numerator(k: f64, x: f64, model: &ModelParams) -> f64 {
    let omega = model.omega(k);
    let f = model.form_factor(omega);
    (k * k / TWO_PI2) * (f * f / (2.0 * omega)) * (omega + x)
}

/// P∫ d³k/(2π)³ [f²/(2ω)] / (ω − x) on the grid (unit coupling),
/// with x = E − m_N.
fn reduced_re_sigma(e: f64, model: &ModelParams, grid: &MomentumGrid) -> Result<f64> {
    let x = e - model.m_n;
    let mu = model.mu;
    let dk = grid.dk();
    let k_edge = grid.k_edge();
    let omega_edge = model.omega(k_edge);

    let pole_in_support = x > mu && model.form_factor(x) > 0.0;

    if !pole_in_support {
        // No singularity inside the integrand support: plain midpoint sum.
        // Nodes where the cutoff vanishes are skipped so that a node landing
        // exactly on ω = x in dead territory cannot produce 0/0.
        let mut sum = 0.0;
        for (&k, &w) in grid.k_values.iter().zip(&grid.weights) {
            let omega = model.omega(k);
            let f = model.form_factor(omega);
            if f == 0.0 {
                continue;
            }
            sum += w * (f * f / (2.0 * omega)) / (omega - x);
        }
        return Ok(sum);
    }

    let k_x = (x * x - mu * mu).sqrt();
    let margin = 2.0 * dk * (k_x / x);
    if x >= omega_edge - margin {
        return Err(Error::PrincipalValueCoverage {
            e,
            omega_pole: x,
            omega_edge,
        });
    }

    // Upper limit of the subtraction domain: the sharp cutoff truncates the
    // support below the grid edge; the Lorentzian runs to the edge.
    let k_upper = match model.form_factor {
        FormFactor::SharpCutoff(l) => ((l * l - mu * mu).sqrt()).min(k_edge),
        FormFactor::Lorentzian(_) => k_edge,
    };

    let m_x = k_x * k_x * {
        let f = model.form_factor(x);
        f * f
    } / TWO_PI2;

    let mut sum = 0.0;
    for (&k, &w) in grid.k_values.iter().zip(&grid.weights) {
        if k > k_upper {
            break;
        }
        let denom = k * k - k_x * k_x;
        if denom.abs() < 1e-14 * k_upper * k_upper {
            // Node collides with the singular point: removable limit
            // M'(k_x)/(2 k_x), taken by central difference.
            let delta = 1e-6 * k_upper;
            let dm = (subtraction_numerator(k_x + delta, x, model)
                - subtraction_numerator(k_x - delta, x, model))
                / (2.0 * delta);
            sum += (w * TWO_PI2 / (k * k)) * dm / (2.0 * k_x);
            continue;
        }
        let omega = model.omega(k);
        let f = model.form_factor(omega);
        let dk_i = w * TWO_PI2 / (k * k);
        // w·c·(ω+x)/(k²−k_x²) − Δk·M_x/(k²−k_x²)
        sum += (w * (f * f / (2.0 * omega)) * (omega + x) - dk_i * m_x) / denom;
    }
    sum += m_x / (2.0 * k_x) * ((k_upper - k_x) / (k_upper + k_x)).ln();
    Ok(sum)
}

/// One-loop self-energy Σ(E) = Re Σ + i Im Σ at real E.
///
/// Re Σ is the principal-value integral over the grid; Im Σ is π times the
/// on-shell spectral density, nonzero only above threshold.
pub fn self_energy(e: f64, model: &ModelParams, grid: &MomentumGrid) -> Result<Complex64> {
    if model.lambda0 == 0.0 {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let c = model.lambda0 * model.lambda0;
    let re = c * reduced_re_sigma(e, model, grid)?;
    let im = c * im_reduced(e, model);
    Ok(Complex64::new(re, im))
}

fn sign(e: f64) -> f64 {
    if e > 0.0 {
        1.0
    } else if e < 0.0 {
        -1.0
    } else {
        0.0
    }
}

/// Tabulate D, B, A on an ascending energy grid.
pub fn kernel_table(
    model: &ModelParams,
    grid: &MomentumGrid,
    e_grid: &[f64],
) -> Result<KernelTable> {
    if e_grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::Config("energy grid must be strictly ascending".into()));
    }
    let c = model.lambda0 * model.lambda0;
    let rows: Vec<Result<(f64, f64)>> = e_grid
        .par_iter()
        .map(|&e| {
            let re = if c == 0.0 {
                0.0
            } else {
                c * reduced_re_sigma(e, model, grid)?
            };
            let d = e - model.m_v0 + re;
            let b = c * im_reduced(e, model);
            Ok((d, b))
        })
        .collect();
    let mut d = Vec::with_capacity(e_grid.len());
    let mut b = Vec::with_capacity(e_grid.len());
    let mut a = Vec::with_capacity(e_grid.len());
    for (row, &e) in rows.into_iter().zip(e_grid) {
        let (di, bi) = row?;
        d.push(di);
        b.push(bi);
        a.push(sign(e) * bi);
    }
    Ok(KernelTable {
        energies: e_grid.to_vec(),
        d,
        b,
        a,
        epsilon_scheme: "principal value by integrand subtraction in k; \
                         delta-function imaginary part"
            .into(),
    })
}

/// Mass and wave-function renormalization integrals at a trial mass.
///
/// C₀ = P∫ [λ₀²f²/2ω]/(m_N+ω−m) and C₁ = ∂C₀/∂m, the latter realizing the
/// finite-part of the squared-denominator integral (central difference with
/// step 1e−5·m).
pub fn renorm_constants(
    model: &ModelParams,
    grid: &MomentumGrid,
    m_v_trial: f64,
) -> Result<(f64, f64)> {
    if model.lambda0 == 0.0 {
        return Ok((0.0, 0.0));
    }
    let c = model.lambda0 * model.lambda0;
    let h = 1e-5 * m_v_trial.abs().max(1e-3);
    let c0 = c * reduced_re_sigma(m_v_trial, model, grid)?;
    let up = reduced_re_sigma(m_v_trial + h, model, grid)?;
    let dn = reduced_re_sigma(m_v_trial - h, model, grid)?;
    let c1 = c * (up - dn) / (2.0 * h);
    Ok((c0, c1))
}

/// Solve the self-consistency m_V = m_V⁰ − C₀(m_V), i.e. D(m_V) = 0, by
/// damped Newton iteration from m_V⁰.
pub fn physical_mass(model: &ModelParams, grid: &MomentumGrid) -> Result<f64> {
    if model.lambda0 == 0.0 {
        return Ok(model.m_v0);
    }
    let c = model.lambda0 * model.lambda0;
    let residual = |m: f64| -> Result<f64> {
        Ok(m - model.m_v0 + c * reduced_re_sigma(m, model, grid)?)
    };
    let mut m = model.m_v0;
    let mut r = residual(m)?;
    for iter in 0..200 {
        if r.abs() < 1e-10 * m.abs().max(1.0) {
            return Ok(m);
        }
        let h = 1e-6 * m.abs().max(1e-3);
        let deriv = (residual(m + h)? - residual(m - h)?) / (2.0 * h);
        if deriv.abs() < 1e-14 {
            return Err(Error::RootFinding {
                iterations: iter,
                residual: r,
            });
        }
        let mut step = -r / deriv;
        // damping factor 0.5 on overshoot
        let mut accepted = false;
        for _ in 0..40 {
            let trial = m + step;
            let rt = residual(trial)?;
            if rt.abs() < r.abs() {
                m = trial;
                r = rt;
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if !accepted {
            return Err(Error::RootFinding {
                iterations: iter,
                residual: r,
            });
        }
    }
    Err(Error::RootFinding {
        iterations: 200,
        residual: r,
    })
}

/// Physical mass, width, friction, and renormalization constants of the pole.
///
/// The width uses the first-order pole formula Γ = 2 Z_V Im Σ(m_V); in the
/// stable regime (m_V below threshold) Im Σ vanishes and Γ = 0 exactly.
pub fn find_pole(model: &ModelParams, grid: &MomentumGrid) -> Result<PoleResult> {
    if model.lambda0 == 0.0 {
        return Ok(PoleResult::free(model.m_v0));
    }
    let m_v = physical_mass(model, grid)?;
    let (c0, c1) = renorm_constants(model, grid, m_v)?;
    let z_v = 1.0 / (1.0 + c1);
    if !(z_v > 0.0) {
        return Err(Error::Regime(format!(
            "wave-function renormalization is not positive (C1 = {c1})"
        )));
    }
    let lam2 = model.lambda0 * model.lambda0;
    let gamma = if model.is_unstable_at(m_v) {
        2.0 * z_v * lam2 * im_reduced(m_v, model)
    } else {
        0.0
    };
    let gamma_friction = lam2 * model.form_factor(m_v - model.m_n) / (4.0 * PI);
    Ok(PoleResult {
        m_v,
        gamma,
        gamma_friction,
        z_v,
        lambda_ren: model.lambda0 * z_v.sqrt(),
        c0,
        c1,
    })
}

/// Local approximation of the kernels: A(E) ≈ γE and B ≈ γ·m_V, with Z_V
/// set to one.
pub fn local_kernels(pole: &PoleResult, _model: &ModelParams) -> LocalKernels {
    LocalKernels {
        a_slope: pole.gamma_friction,
        b_loc: pole.gamma_friction * pole.m_v,
        gamma_friction: pole.gamma_friction,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn benchmark() -> (ModelParams, MomentumGrid) {
        let m = ModelParams::new(12.0, 10.0, 1.0, 0.2, FormFactor::SharpCutoff(5.0)).unwrap();
        let g = MomentumGrid::with_default_coverage(&m, 1024).unwrap();
        (m, g)
    }

    // Frozen against an adaptive principal-value quadrature of the reduced
    // integrand (agreement between refinements better than 1e-10).
    const RE_SIGMA_BENCH: f64 = 7.115560453239e-3; // E = 10 + √2
    const C0_TRIAL_115: f64 = 7.054155455567e-3;
    const C1_TRIAL_115: f64 = -7.678345195131e-4;
    const M_V_BENCH: f64 = 11.993475295;
    const GAMMA_BENCH: f64 = 1.09938217506e-2;
    const Z_V_BENCH: f64 = 1.00138756274;
    const M_V_STABLE: f64 = 10.3957779564; // m_V0 = 10.4
    const Z_V_STABLE: f64 = 0.997979987892;

    #[test]
    fn free_theory_sigma_vanishes() {
        let m = ModelParams::new(12.0, 10.0, 1.0, 0.0, FormFactor::SharpCutoff(5.0)).unwrap();
        let g = MomentumGrid::with_default_coverage(&m, 64).unwrap();
        for e in [-3.0, 0.0, 11.5, 40.0] {
            let s = self_energy(e, &m, &g).unwrap();
            assert_eq!(s, Complex64::new(0.0, 0.0));
        }
    }

    #[test]
    fn below_threshold_im_vanishes() {
        let (m, g) = benchmark();
        for e in [0.0, 9.0, 10.9999] {
            assert_eq!(self_energy(e, &m, &g).unwrap().im, 0.0);
        }
    }

    #[test]
    fn sigma_at_benchmark_point() {
        let (m, g) = benchmark();
        let e = 10.0 + 2.0_f64.sqrt();
        let s = self_energy(e, &m, &g).unwrap();
        // Im Σ = λ₀²·k·f²/4π with k = 1 exactly
        assert!((s.im - 0.01 / PI).abs() < 1e-15);
        assert!(
            (s.re - RE_SIGMA_BENCH).abs() < 1e-9,
            "Re Σ = {:e}, expected {:e}",
            s.re,
            RE_SIGMA_BENCH
        );
    }

    #[test]
    fn renorm_constants_at_trial_mass() {
        let (m, g) = benchmark();
        let (c0, c1) = renorm_constants(&m, &g, 11.5).unwrap();
        assert!((c0 - C0_TRIAL_115).abs() < 1e-9, "C0 = {c0:e}");
        assert!((c1 - C1_TRIAL_115).abs() < 1e-8, "C1 = {c1:e}");
    }

    #[test]
    fn renorm_constants_free_and_stable_sign() {
        let (m, g) = benchmark();
        let free = ModelParams::new(12.0, 10.0, 1.0, 0.0, m.form_factor).unwrap();
        assert_eq!(renorm_constants(&free, &g, 11.5).unwrap(), (0.0, 0.0));
        // below threshold the squared-denominator integrand is positive
        let (_, c1) = renorm_constants(&m, &g, 10.4).unwrap();
        assert!(c1 > 0.0);
    }

    #[test]
    fn physical_mass_free_theory() {
        let m = ModelParams::new(12.0, 10.0, 1.0, 0.0, FormFactor::SharpCutoff(5.0)).unwrap();
        let g = MomentumGrid::with_default_coverage(&m, 64).unwrap();
        assert_eq!(physical_mass(&m, &g).unwrap(), 12.0);
    }

    #[test]
    fn physical_mass_weak_coupling_expansion() {
        let m = ModelParams::new(12.0, 10.0, 1.0, 0.02, FormFactor::SharpCutoff(5.0)).unwrap();
        let g = MomentumGrid::with_default_coverage(&m, 1024).unwrap();
        let mv = physical_mass(&m, &g).unwrap();
        let (c0_at_bare, _) = renorm_constants(&m, &g, m.m_v0).unwrap();
        // m_V = m_V0 − C0(m_V0) + O(λ₀⁴)
        assert!((mv - (m.m_v0 - c0_at_bare)).abs() < 1e-8);
    }

    #[test]
    fn benchmark_pole_frozen_values() {
        let (m, g) = benchmark();
        let p = find_pole(&m, &g).unwrap();
        assert!((p.m_v - M_V_BENCH).abs() < 1e-6, "m_V = {}", p.m_v);
        assert!(
            (p.gamma - GAMMA_BENCH).abs() / GAMMA_BENCH < 1e-4,
            "Gamma = {:e}",
            p.gamma
        );
        assert!((p.z_v - Z_V_BENCH).abs() < 1e-6, "Z_V = {}", p.z_v);
        assert!((p.gamma_friction - 0.01 / PI).abs() < 1e-15);
        assert!((p.lambda_ren - 0.2 * p.z_v.sqrt()).abs() < 1e-15);
        // residual of the self-consistency
        let d = p.m_v - m.m_v0
            + m.lambda0 * m.lambda0 * reduced_re_sigma(p.m_v, &m, &g).unwrap();
        assert!(d.abs() < 1e-10 * p.m_v);
    }

    #[test]
    fn stable_pole_has_zero_width() {
        let m = ModelParams::new(10.4, 10.0, 1.0, 0.2, FormFactor::SharpCutoff(5.0)).unwrap();
        let g = MomentumGrid::with_default_coverage(&m, 1024).unwrap();
        let p = find_pole(&m, &g).unwrap();
        assert_eq!(p.gamma, 0.0);
        assert!((p.m_v - M_V_STABLE).abs() < 1e-6, "m_V = {}", p.m_v);
        assert!((p.z_v - Z_V_STABLE).abs() < 1e-6, "Z_V = {}", p.z_v);
        assert!(p.c1 > 0.0);
        assert!(p.z_v < 1.0);
    }

    #[test]
    fn tiny_coupling_below_threshold_is_stable() {
        let m = ModelParams::new(10.5, 10.0, 1.0, 0.01, FormFactor::SharpCutoff(5.0)).unwrap();
        let g = MomentumGrid::with_default_coverage(&m, 512).unwrap();
        let p = find_pole(&m, &g).unwrap();
        assert_eq!(p.gamma, 0.0);
    }

    #[test]
    fn kernel_table_free_theory() {
        let m = ModelParams::new(12.0, 10.0, 1.0, 0.0, FormFactor::SharpCutoff(5.0)).unwrap();
        let g = MomentumGrid::with_default_coverage(&m, 64).unwrap();
        let es: Vec<f64> = (0..21).map(|i| -5.0 + i as f64 * 0.5).collect();
        let t = kernel_table(&m, &g, &es).unwrap();
        for ((&e, &d), (&b, &a)) in es.iter().zip(&t.d).zip(t.b.iter().zip(&t.a)) {
            assert_eq!(d, e - 12.0);
            assert_eq!(b, 0.0);
            assert_eq!(a, 0.0);
        }
    }

    #[test]
    fn kernel_identities() {
        let (m, g) = benchmark();
        let es: Vec<f64> = (0..561).map(|i| -14.0 + i as f64 * 0.05).collect();
        let t = kernel_table(&m, &g, &es).unwrap();
        for i in 0..es.len() {
            assert!(t.b[i] >= 0.0);
            assert_eq!(t.a[i], sign(es[i]) * t.b[i]);
            if es[i] <= m.threshold() {
                assert_eq!(t.b[i], 0.0);
            }
        }
        // benchmark value on the physical sheet
        let e = 10.0 + 2.0_f64.sqrt();
        let t1 = kernel_table(&m, &g, &[e]).unwrap();
        assert!((t1.b[0] - 0.01 / PI).abs() < 1e-15);
    }

    #[test]
    fn kernel_symmetry_inside_threshold_window() {
        // A odd and B even hold identically on symmetric grids that stay
        // inside |E| <= m_N + μ, where both kernels vanish.
        let (m, g) = benchmark();
        let es: Vec<f64> = (0..43).map(|i| -10.5 + i as f64 * 0.5).collect();
        let t = kernel_table(&m, &g, &es).unwrap();
        let n = es.len();
        for i in 0..n {
            assert_eq!(t.a[i], -t.a[n - 1 - i]);
            assert_eq!(t.b[i], t.b[n - 1 - i]);
        }
    }

    #[test]
    fn threshold_onset_is_continuous() {
        let (m, g) = benchmark();
        let _ = &g;
        let eps = 1e-6;
        let b_just_above = m.lambda0 * m.lambda0 * im_reduced(m.threshold() + eps, &m);
        assert!(b_just_above > 0.0);
        assert!(b_just_above < 1e-4, "B at threshold+1e-6 = {b_just_above:e}");
    }

    #[test]
    fn coupling_scaling_is_exactly_quartic() {
        let (m1, g) = benchmark();
        let m2 = ModelParams::new(12.0, 10.0, 1.0, 0.4, FormFactor::SharpCutoff(5.0)).unwrap();
        let e = 10.0 + 2.0_f64.sqrt();
        let s1 = self_energy(e, &m1, &g).unwrap();
        let s2 = self_energy(e, &m2, &g).unwrap();
        assert_eq!(s2.re, 4.0 * s1.re);
        assert_eq!(s2.im, 4.0 * s1.im);
        let (c0a, c1a) = renorm_constants(&m1, &g, 11.5).unwrap();
        let (c0b, c1b) = renorm_constants(&m2, &g, 11.5).unwrap();
        assert_eq!(c0b, 4.0 * c0a);
        assert_eq!(c1b, 4.0 * c1a);
    }

    #[test]
    fn doubling_the_grid_changes_d_below_tolerance() {
        let (m, _) = benchmark();
        let g1 = MomentumGrid::with_default_coverage(&m, 512).unwrap();
        let g2 = MomentumGrid::with_default_coverage(&m, 1024).unwrap();
        let es: Vec<f64> = (0..41).map(|i| 9.0 + i as f64 * 0.125).collect();
        let t1 = kernel_table(&m, &g1, &es).unwrap();
        let t2 = kernel_table(&m, &g2, &es).unwrap();
        let scale = t2.d.iter().fold(0.0_f64, |acc, v| acc.max(v.abs()));
        let max_dd = t1
            .d
            .iter()
            .zip(&t2.d)
            .fold(0.0_f64, |acc, (a, b)| acc.max((a - b).abs()));
        assert!(max_dd / scale < 1e-6, "relative change {:e}", max_dd / scale);
        // B is closed-form and grid independent
        for (a, b) in t1.b.iter().zip(&t2.b) {
            assert_eq!(a, b);
        }
    }

    #[test]
    fn node_aligned_pv_point_stays_finite() {
        // the subtraction point can land on (or next to) a grid node
        let (m, g) = benchmark();
        let e = m.m_n + m.omega(g.k_values[500]);
        let s = self_energy(e, &m, &g).unwrap();
        assert!(s.re.is_finite());
        let s2 = self_energy(e + 1e-7, &m, &g).unwrap();
        assert!((s.re - s2.re).abs() < 1e-6, "{} vs {}", s.re, s2.re);
    }

    #[test]
    fn coverage_error_when_pole_leaves_grid() {
        let m = ModelParams::new(12.0, 10.0, 1.0, 0.2, FormFactor::Lorentzian(5.0)).unwrap();
        let g = MomentumGrid::new(&m, 256, 10.0).unwrap();
        // pole at ω = 30 is far beyond ω(k_edge) ≈ 10.05
        let err = self_energy(40.0, &m, &g).unwrap_err();
        assert!(matches!(err, Error::PrincipalValueCoverage { .. }), "{err}");
    }

    #[test]
    fn width_consistency_in_heavy_v_regime() {
        // m_V ≫ m_N, μ with f ≈ 1 at the pole: Γ/2 and γ·m_V agree within 10%.
        let m = ModelParams::new(30.0, 1.0, 1.0, 0.4, FormFactor::SharpCutoff(50.0)).unwrap();
        let g = MomentumGrid::with_default_coverage(&m, 2048).unwrap();
        let p = find_pole(&m, &g).unwrap();
        assert!(p.gamma > 0.0);
        let lhs = p.gamma / 2.0;
        let rhs = p.gamma_friction * p.m_v;
        assert!(
            ((lhs - rhs) / rhs).abs() < 0.10,
            "Γ/2 = {lhs}, γ·m_V = {rhs}"
        );
    }

    #[test]
    fn local_kernels_benchmark() {
        let (m, g) = benchmark();
        let p = find_pole(&m, &g).unwrap();
        let lk = local_kernels(&p, &m);
        // γ = λ₀² f / 4π with f = 1 at the pole
        assert!((lk.gamma_friction - 3.18310e-3).abs() < 1e-8);
        assert_eq!(lk.b_loc, lk.gamma_friction * p.m_v);
        assert_eq!(lk.a_slope, lk.gamma_friction);
        let free = PoleResult::free(12.0);
        let lk0 = local_kernels(&free, &m);
        assert_eq!(lk0.gamma_friction, 0.0);
        assert_eq!(lk0.b_loc, 0.0);
    }
}
