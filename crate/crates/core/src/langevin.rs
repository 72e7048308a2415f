//! Stochastic dynamics of the V amplitude under the renormalized Langevin
//! equation, reduced to a complex-number process at fixed momentum:
//!
//! ```text
//! (i − γ) ∂_t φ = m_eff φ − ξ,      m_eff = m_V + p²/2m_V,
//! ```
//!
//! i.e. φ̇ = −a φ + (a/m_eff) ξ with drift a = (γ + i)·m_eff/(1 + γ²).
//! The white noise carries the local noise kernel: ⟨ξ*(t) ξ(t')⟩ =
//! B_loc δ(t − t') with B_loc = γ·m_V, ⟨ξξ⟩ = 0, discretized as
//! ξ_j = √(B_loc/2dt)·(g₁ + i g₂) so that ⟨ξ_j* ξ_k⟩ = (B_loc/dt)·δ_jk.
//!
//! The mean obeys the noise-free linear equation exactly: |⟨φ⟩| decays at
//! γ·m_eff/(1+γ²). The stationary second moment balances friction against
//! noise: ⟨|φ|²⟩_∞ = B_loc/(2γ·m_eff) = 1/2 at p = 0 — friction and noise
//! strength are not independent knobs.
//!
//! Trajectories use per-index ChaCha streams split deterministically from
//! the base seed; ensembles are accumulated block-by-block in index order,
//! so results are bit-identical for any thread count.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::fit;
use crate::spectral::PoleResult;

/// White-noise discretization and run sizes.
#[derive(Debug, Clone, Serialize)]
pub struct NoiseSpec {
    /// Noise strength B_loc = γ·m_V (energy).
    pub b_loc: f64,
    pub dt: f64,
    pub seed: u64,
    pub n_steps: usize,
    pub n_trajectories: usize,
}

impl NoiseSpec {
    fn validate(&self) -> Result<()> {
        if !(self.dt > 0.0) {
            return Err(Error::Config(format!("dt must be > 0, got {}", self.dt)));
        }
        if !(self.b_loc >= 0.0) {
            return Err(Error::Config(format!(
                "noise strength must be >= 0, got {}",
                self.b_loc
            )));
        }
        if self.n_steps == 0 {
            return Err(Error::Config("n_steps must be positive".into()));
        }
        Ok(())
    }
}

/// Ensemble summary statistics with block standard errors.
#[derive(Debug, Clone, Serialize)]
pub struct TrajectoryEnsemble {
    pub times: Vec<f64>,
    /// ⟨φ⟩(t).
    pub mean_field: Vec<Complex64>,
    /// ⟨|φ|²⟩(t).
    pub mean_sq: Vec<f64>,
    pub se_mean_re: Vec<f64>,
    pub se_mean_im: Vec<f64>,
    pub se_mean_sq: Vec<f64>,
    /// Seed provenance: base seed of the deterministic per-trajectory split.
    pub seed: u64,
    pub n_trajectories: usize,
    /// Exponential fit of |⟨φ⟩|(t).
    pub fit: Option<MeanDecayFit>,
    /// Time average of ⟨|φ|²⟩ over the tail window, with its standard error
    /// across trajectories.
    pub tail_mean_sq: f64,
    pub tail_mean_sq_se: f64,
    pub tail_start: f64,
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct MeanDecayFit {
    /// Decay rate of |⟨φ⟩|.
    pub rate: f64,
    /// Standard error across trajectory blocks.
    pub rate_se: f64,
    /// Non-decaying data: slope of the wrong sign or negligible decay.
    pub degenerate: bool,
}

/// SplitMix64 step, used to derive independent per-trajectory seeds.
fn splitmix64(state: u64) -> u64 {
    let mut z = state.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn trajectory_seed(base: u64, index: u64) -> u64 {
    splitmix64(base ^ splitmix64(index.wrapping_add(1)))
}

#[inline]
fn draw_noise(rng: &mut ChaCha8Rng, amp: f64) -> Complex64 {
    let g1: f64 = rng.sample(StandardNormal);
    let g2: f64 = rng.sample(StandardNormal);
    Complex64::new(amp * g1, amp * g2)
}

/// One discrete noise path ξ_j, j = 0..n_steps, from the base seed.
pub fn sample_noise(spec: &NoiseSpec) -> Vec<Complex64> {
    let amp = (spec.b_loc / (2.0 * spec.dt)).sqrt();
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    (0..spec.n_steps).map(|_| draw_noise(&mut rng, amp)).collect()
}

/// Drift coefficient a = (γ + i)·m_eff/(1 + γ²) at momentum p.
pub fn drift_coefficient(pole: &PoleResult, momentum: f64) -> Complex64 {
    let gamma = pole.gamma_friction;
    let m_eff = pole.m_v + momentum * momentum / (2.0 * pole.m_v);
    Complex64::new(gamma, 1.0) * (m_eff / (1.0 + gamma * gamma))
}

fn check_step(spec: &NoiseSpec, a: Complex64) -> Result<()> {
    spec.validate()?;
    if spec.dt * a.norm() >= 0.1 {
        return Err(Error::Config(format!(
            "dt·|a| = {:.3e} is not < 0.1; reduce the step",
            spec.dt * a.norm()
        )));
    }
    Ok(())
}

/// Euler–Maruyama path of a single trajectory seeded from the base seed.
/// Returns φ at every step, length n_steps + 1.
pub fn integrate_trajectory(
    phi0: Complex64,
    pole: &PoleResult,
    spec: &NoiseSpec,
    momentum: f64,
) -> Result<Vec<Complex64>> {
    let a = drift_coefficient(pole, momentum);
    check_step(spec, a)?;
    let m_eff = pole.m_v + momentum * momentum / (2.0 * pole.m_v);
    let noise_gain = a / m_eff;
    let amp = (spec.b_loc / (2.0 * spec.dt)).sqrt();
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut phi = phi0;
    let mut path = Vec::with_capacity(spec.n_steps + 1);
    path.push(phi);
    for _ in 0..spec.n_steps {
        let xi = draw_noise(&mut rng, amp);
        phi += spec.dt * (-a * phi + noise_gain * xi);
        path.push(phi);
    }
    Ok(path)
}

fn block_partition(n: usize, blocks: usize) -> Vec<(usize, usize)> {
    let q = n / blocks;
    let r = n % blocks;
    let mut out = Vec::with_capacity(blocks);
    let mut start = 0;
    for b in 0..blocks {
        let len = q + usize::from(b < r);
        out.push((start, start + len));
        start += len;
    }
    out
}

struct BlockSums {
    sum_phi: Vec<Complex64>,
    sum_sq: Vec<f64>,
    tail_means: Vec<f64>,
}

/// Run the full ensemble without materializing paths: per-trajectory seeded
/// streams, recorded every `record_stride` steps. `tail_start_frac` sets
/// the start of the stationary averaging window as a fraction of the run.
pub fn run_ensemble(
    phi0: Complex64,
    pole: &PoleResult,
    spec: &NoiseSpec,
    momentum: f64,
    record_stride: usize,
    tail_start_frac: f64,
) -> Result<TrajectoryEnsemble> {
    let a = drift_coefficient(pole, momentum);
    check_step(spec, a)?;
    if spec.n_trajectories < 2 {
        return Err(Error::Config("ensemble needs at least 2 trajectories".into()));
    }
    if record_stride == 0 {
        return Err(Error::Config("record_stride must be positive".into()));
    }
    let m_eff = pole.m_v + momentum * momentum / (2.0 * pole.m_v);
    let noise_gain = a / m_eff;
    let amp = (spec.b_loc / (2.0 * spec.dt)).sqrt();
    let n_rec = spec.n_steps / record_stride + 1;
    let tail_start_step = ((spec.n_steps as f64) * tail_start_frac).floor() as usize;

    let n_blocks = spec.n_trajectories.min(25);
    let ranges = block_partition(spec.n_trajectories, n_blocks);

    let block_sums: Vec<BlockSums> = ranges
        .par_iter()
        .map(|&(lo, hi)| {
            let mut sums = BlockSums {
                sum_phi: vec![Complex64::new(0.0, 0.0); n_rec],
                sum_sq: vec![0.0; n_rec],
                tail_means: Vec::with_capacity(hi - lo),
            };
            for traj in lo..hi {
                let mut rng =
                    ChaCha8Rng::seed_from_u64(trajectory_seed(spec.seed, traj as u64));
                let mut phi = phi0;
                let mut rec = 0;
                let mut tail_acc = 0.0;
                let mut tail_n = 0u64;
                for step in 0..=spec.n_steps {
                    if step % record_stride == 0 {
                        sums.sum_phi[rec] += phi;
                        sums.sum_sq[rec] += phi.norm_sqr();
                        rec += 1;
                    }
                    if step >= tail_start_step {
                        tail_acc += phi.norm_sqr();
                        tail_n += 1;
                    }
                    if step < spec.n_steps {
                        let xi = draw_noise(&mut rng, amp);
                        phi += spec.dt * (-a * phi + noise_gain * xi);
                    }
                }
                sums.tail_means.push(tail_acc / tail_n as f64);
            }
            sums
        })
        .collect();

    // deterministic reduction in block order
    let times: Vec<f64> = (0..n_rec).map(|r| (r * record_stride) as f64 * spec.dt).collect();
    let n_traj_f = spec.n_trajectories as f64;
    let mut mean_field = vec![Complex64::new(0.0, 0.0); n_rec];
    let mut mean_sq = vec![0.0; n_rec];
    for bs in &block_sums {
        for r in 0..n_rec {
            mean_field[r] += bs.sum_phi[r];
            mean_sq[r] += bs.sum_sq[r];
        }
    }
    for r in 0..n_rec {
        mean_field[r] /= n_traj_f;
        mean_sq[r] /= n_traj_f;
    }

    // block means for standard errors
    let mut se_mean_re = vec![0.0; n_rec];
    let mut se_mean_im = vec![0.0; n_rec];
    let mut se_mean_sq = vec![0.0; n_rec];
    if n_blocks >= 2 {
        for r in 0..n_rec {
            let re: Vec<f64> = block_sums
                .iter()
                .zip(&ranges)
                .map(|(bs, &(lo, hi))| bs.sum_phi[r].re / (hi - lo) as f64)
                .collect();
            let im: Vec<f64> = block_sums
                .iter()
                .zip(&ranges)
                .map(|(bs, &(lo, hi))| bs.sum_phi[r].im / (hi - lo) as f64)
                .collect();
            let sq: Vec<f64> = block_sums
                .iter()
                .zip(&ranges)
                .map(|(bs, &(lo, hi))| bs.sum_sq[r] / (hi - lo) as f64)
                .collect();
            se_mean_re[r] = fit::mean_and_se(&re).1;
            se_mean_im[r] = fit::mean_and_se(&im).1;
            se_mean_sq[r] = fit::mean_and_se(&sq).1;
        }
    }

    // exponential fit of |⟨φ⟩|: global slope, block spread for the error
    let ln_mean: Vec<f64> = mean_field.iter().map(|c| c.norm().max(1e-300).ln()).collect();
    let global = fit::fit_line(&times, &ln_mean);
    let fit = global.map(|g| {
        let mut block_rates = Vec::with_capacity(n_blocks);
        for (bs, &(lo, hi)) in block_sums.iter().zip(&ranges) {
            let ln_b: Vec<f64> = bs
                .sum_phi
                .iter()
                .map(|c| (c.norm() / (hi - lo) as f64).max(1e-300).ln())
                .collect();
            if let Some(f) = fit::fit_line(&times, &ln_b) {
                block_rates.push(-f.slope);
            }
        }
        let (_, rate_se) = fit::mean_and_se(&block_rates);
        let rate = -g.slope;
        let end_ratio = mean_field.last().unwrap().norm() / mean_field[0].norm().max(1e-300);
        MeanDecayFit {
            rate,
            rate_se: if rate_se.is_nan() { g.slope_se } else { rate_se },
            degenerate: rate <= 0.0 || end_ratio > 0.8,
        }
    });

    let mut tail_all: Vec<f64> = Vec::with_capacity(spec.n_trajectories);
    for bs in &block_sums {
        tail_all.extend_from_slice(&bs.tail_means);
    }
    let (tail_mean_sq, tail_mean_sq_se) = fit::mean_and_se(&tail_all);

    Ok(TrajectoryEnsemble {
        times,
        mean_field,
        mean_sq,
        se_mean_re,
        se_mean_im,
        se_mean_sq,
        seed: spec.seed,
        n_trajectories: spec.n_trajectories,
        fit,
        tail_mean_sq,
        tail_mean_sq_se,
        tail_start: tail_start_step as f64 * spec.dt,
    })
}

/// Summary statistics from materialized paths sampled at step `dt`
/// (diagnostic-scale ensembles).
pub fn ensemble_stats(paths: &[Vec<Complex64>], dt: f64, seed: u64) -> Result<TrajectoryEnsemble> {
    if paths.len() < 2 {
        return Err(Error::Config("ensemble needs at least 2 trajectories".into()));
    }
    let n_rec = paths[0].len();
    if paths.iter().any(|p| p.len() != n_rec) || n_rec == 0 {
        return Err(Error::Config("trajectories must share a nonempty time grid".into()));
    }
    let n = paths.len();
    let times: Vec<f64> = (0..n_rec).map(|r| r as f64 * dt).collect();
    let mut mean_field = vec![Complex64::new(0.0, 0.0); n_rec];
    let mut mean_sq = vec![0.0; n_rec];
    for p in paths {
        for (r, &phi) in p.iter().enumerate() {
            mean_field[r] += phi;
            mean_sq[r] += phi.norm_sqr();
        }
    }
    for r in 0..n_rec {
        mean_field[r] /= n as f64;
        mean_sq[r] /= n as f64;
    }
    let mut se_mean_re = vec![0.0; n_rec];
    let mut se_mean_im = vec![0.0; n_rec];
    let mut se_mean_sq = vec![0.0; n_rec];
    for r in 0..n_rec {
        let re: Vec<f64> = paths.iter().map(|p| p[r].re).collect();
        let im: Vec<f64> = paths.iter().map(|p| p[r].im).collect();
        let sq: Vec<f64> = paths.iter().map(|p| p[r].norm_sqr()).collect();
        se_mean_re[r] = fit::mean_and_se(&re).1;
        se_mean_im[r] = fit::mean_and_se(&im).1;
        se_mean_sq[r] = fit::mean_and_se(&sq).1;
    }
    let ln_mean: Vec<f64> = mean_field.iter().map(|c| c.norm().max(1e-300).ln()).collect();
    let fit = fit::fit_line(&times, &ln_mean).map(|g| {
        let rate = -g.slope;
        let end_ratio = mean_field.last().unwrap().norm() / mean_field[0].norm().max(1e-300);
        MeanDecayFit {
            rate,
            rate_se: g.slope_se,
            degenerate: rate <= 0.0 || end_ratio > 0.8,
        }
    });
    let tail_start_rec = n_rec / 2;
    let tail_all: Vec<f64> = paths
        .iter()
        .map(|p| {
            p[tail_start_rec..].iter().map(|phi| phi.norm_sqr()).sum::<f64>()
                / (n_rec - tail_start_rec) as f64
        })
        .collect();
    let (tail_mean_sq, tail_mean_sq_se) = fit::mean_and_se(&tail_all);
    Ok(TrajectoryEnsemble {
        times: times.clone(),
        mean_field,
        mean_sq,
        se_mean_re,
        se_mean_im,
        se_mean_sq,
        seed,
        n_trajectories: n,
        fit,
        tail_mean_sq,
        tail_mean_sq_se,
        tail_start: times[tail_start_rec],
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pole(gamma: f64, m_v: f64) -> PoleResult {
        PoleResult {
            m_v,
            gamma: 2.0 * gamma * m_v,
            gamma_friction: gamma,
            z_v: 1.0,
            lambda_ren: 0.0,
            c0: 0.0,
            c1: 0.0,
        }
    }

    #[test]
    fn zero_noise_strength_gives_zero_path() {
        let spec = NoiseSpec {
            b_loc: 0.0,
            dt: 0.01,
            seed: 1,
            n_steps: 100,
            n_trajectories: 1,
        };
        assert!(sample_noise(&spec).iter().all(|x| x.norm() == 0.0));
    }

    #[test]
    fn noise_moments_match_discretization() {
        let spec = NoiseSpec {
            b_loc: 0.7,
            dt: 0.02,
            seed: 42,
            n_steps: 1_000_000,
            n_trajectories: 1,
        };
        let xs = sample_noise(&spec);
        let n = xs.len() as f64;
        let mean = xs.iter().sum::<Complex64>() / n;
        let target = spec.b_loc / spec.dt;
        // CLT bound on the sample mean of ξ
        assert!(mean.norm() < 4.0 * (target / n).sqrt(), "mean = {mean}");
        let second: f64 = xs.iter().map(|x| x.norm_sqr()).sum::<f64>() / n;
        assert!(
            ((second - target) / target).abs() < 0.01,
            "<ξ*ξ> = {second}, expected {target}"
        );
        // anomalous correlator vanishes
        let anon = xs.iter().map(|x| x * x).sum::<Complex64>() / n;
        assert!(anon.norm() < 4.0 * target / n.sqrt());
    }

    #[test]
    fn free_oscillation_holds_modulus() {
        let p = pole(0.0, 2.0);
        let spec = NoiseSpec {
            b_loc: 0.0,
            dt: 5e-5,
            seed: 3,
            n_steps: 10_000,
            n_trajectories: 1,
        };
        let path = integrate_trajectory(Complex64::new(1.0, 0.0), &p, &spec, 0.0).unwrap();
        let t_end = spec.dt * spec.n_steps as f64;
        let last = *path.last().unwrap();
        assert!((last.norm() - 1.0).abs() < 1e-4);
        let expect = Complex64::new(0.0, -p.m_v * t_end).exp();
        assert!((last - expect).norm() < 1e-3, "phase drift {last}");
    }

    #[test]
    fn damped_modulus_matches_closed_form() {
        let p = pole(0.5, 1.0);
        let spec = NoiseSpec {
            b_loc: 0.0,
            dt: 1e-4,
            seed: 3,
            n_steps: 20_000,
            n_trajectories: 1,
        };
        let path = integrate_trajectory(Complex64::new(0.3, 0.4), &p, &spec, 0.0).unwrap();
        let t_end = spec.dt * spec.n_steps as f64;
        let rate = p.gamma_friction * p.m_v / (1.0 + p.gamma_friction * p.gamma_friction);
        let expect = 0.5 * (-rate * t_end).exp();
        let got = path.last().unwrap().norm();
        assert!(
            (got / expect).ln().abs() < 1e-3,
            "|φ| = {got}, closed form {expect}"
        );
    }

    #[test]
    fn momentum_raises_effective_mass() {
        let p = pole(0.1, 2.0);
        let a0 = drift_coefficient(&p, 0.0);
        let a1 = drift_coefficient(&p, 1.0);
        assert!((a1.im / a0.im - (1.0 + 1.0 / (2.0 * 4.0))).abs() < 1e-12);
    }

    #[test]
    fn oversized_step_rejected() {
        let p = pole(0.1, 10.0);
        let spec = NoiseSpec {
            b_loc: 1.0,
            dt: 0.02,
            seed: 1,
            n_steps: 10,
            n_trajectories: 4,
        };
        assert!(matches!(
            integrate_trajectory(Complex64::new(1.0, 0.0), &p, &spec, 0.0),
            Err(Error::Config(_))
        ));
        assert!(matches!(
            run_ensemble(Complex64::new(1.0, 0.0), &p, &spec, 0.0, 1, 0.5),
            Err(Error::Config(_))
        ));
    }

    #[test]
    fn ensemble_needs_two_trajectories() {
        let p = pole(0.1, 1.0);
        let spec = NoiseSpec {
            b_loc: 0.1,
            dt: 1e-3,
            seed: 1,
            n_steps: 10,
            n_trajectories: 1,
        };
        assert!(run_ensemble(Complex64::new(1.0, 0.0), &p, &spec, 0.0, 1, 0.5).is_err());
    }

    #[test]
    fn ensemble_is_bit_reproducible_and_thread_independent() {
        let p = pole(0.2, 1.5);
        let spec = NoiseSpec {
            b_loc: 0.3,
            dt: 1e-3,
            seed: 77,
            n_steps: 2000,
            n_trajectories: 64,
        };
        let phi0 = Complex64::new(1.0, 0.0);
        let e1 = run_ensemble(phi0, &p, &spec, 0.0, 10, 0.5).unwrap();
        let e2 = run_ensemble(phi0, &p, &spec, 0.0, 10, 0.5).unwrap();
        assert_eq!(e1.mean_field, e2.mean_field);
        assert_eq!(e1.mean_sq, e2.mean_sq);

        let single = rayon::ThreadPoolBuilder::new()
            .num_threads(1)
            .build()
            .unwrap()
            .install(|| run_ensemble(phi0, &p, &spec, 0.0, 10, 0.5).unwrap());
        assert_eq!(e1.mean_field, single.mean_field);
        assert_eq!(e1.mean_sq, single.mean_sq);
        assert_eq!(e1.tail_mean_sq, single.tail_mean_sq);
    }

    #[test]
    fn mean_is_linear_in_initial_condition() {
        // with the same noise stream and b_loc = 0 the mean scales exactly
        let p = pole(0.2, 1.5);
        let spec = NoiseSpec {
            b_loc: 0.0,
            dt: 1e-3,
            seed: 5,
            n_steps: 500,
            n_trajectories: 8,
        };
        let e1 = run_ensemble(Complex64::new(0.3, -0.1), &p, &spec, 0.0, 5, 0.5).unwrap();
        let e2 = run_ensemble(Complex64::new(0.6, -0.2), &p, &spec, 0.0, 5, 0.5).unwrap();
        for (a, b) in e1.mean_field.iter().zip(&e2.mean_field) {
            assert_eq!(2.0 * a, *b);
        }
    }

    #[test]
    fn stationary_second_moment_balances_friction() {
        // OU fluctuation–dissipation: ⟨|φ|²⟩∞ = B/(2γ m) = 1/2 for B = γm
        let gamma = 0.3;
        let m = 1.0;
        let p = pole(gamma, m);
        let dt = 0.002 * 2.0 * gamma / m;
        let rate = gamma * m / (1.0 + gamma * gamma);
        let n_steps = (14.0 / rate / dt).ceil() as usize;
        let spec = NoiseSpec {
            b_loc: gamma * m,
            dt,
            seed: 99,
            n_steps,
            n_trajectories: 400,
        };
        let e = run_ensemble(
            Complex64::new(0.5_f64.sqrt(), 0.0),
            &p,
            &spec,
            0.0,
            n_steps / 200,
            0.6,
        )
        .unwrap();
        assert!(
            (e.tail_mean_sq - 0.5).abs() < 4.0 * e.tail_mean_sq_se.max(0.004),
            "<|φ|²> = {} ± {}",
            e.tail_mean_sq,
            e.tail_mean_sq_se
        );
        // the product with the friction recovers the noise strength
        let fd = e.tail_mean_sq * 2.0 * gamma * m;
        assert!((fd - spec.b_loc).abs() < 0.05 * spec.b_loc);
    }

    #[test]
    fn ensemble_stats_from_paths_matches_run() {
        let p = pole(0.2, 1.5);
        let mut spec = NoiseSpec {
            b_loc: 0.2,
            dt: 1e-3,
            seed: 11,
            n_steps: 300,
            n_trajectories: 16,
        };
        let phi0 = Complex64::new(1.0, 0.0);
        let mut paths = Vec::new();
        for t in 0..spec.n_trajectories {
            spec.seed = trajectory_seed(11, t as u64);
            paths.push(integrate_trajectory(phi0, &p, &spec, 0.0).unwrap());
        }
        spec.seed = 11;
        let from_paths = ensemble_stats(&paths, spec.dt, 11).unwrap();
        let from_run = run_ensemble(phi0, &p, &spec, 0.0, 1, 0.5).unwrap();
        for (a, b) in from_paths.mean_field.iter().zip(&from_run.mean_field) {
            assert!((a - b).norm() < 1e-12);
        }
    }

    #[test]
    fn degenerate_fit_is_flagged() {
        let p = pole(0.0, 1.0); // no damping: the mean never decays
        let spec = NoiseSpec {
            b_loc: 0.0,
            dt: 1e-3,
            seed: 2,
            n_steps: 400,
            n_trajectories: 4,
        };
        let e = run_ensemble(Complex64::new(1.0, 0.0), &p, &spec, 0.0, 4, 0.5).unwrap();
        let f = e.fit.unwrap();
        assert!(f.degenerate);
    }
}
