//! Consistency checks that tie the independently built layers together:
//! the spectral root against the arrowhead eigenvalue, the pole width
//! against the survival-probability fit, the master population against the
//! sector oracle, and the Langevin mean decay against the same pole.

use num_complex::Complex64;

use lee_core::langevin::{self, NoiseSpec};
use lee_core::master::{self, DissipatorVariant};
use lee_core::model::{FormFactor, ModelParams, MomentumGrid};
use lee_core::sector;
use lee_core::spectral;

#[test]
fn stable_eigenvalue_matches_mass_root() {
    let m = ModelParams::new(10.4, 10.0, 1.0, 0.2, FormFactor::SharpCutoff(5.0)).unwrap();
    let g = MomentumGrid::with_default_coverage(&m, 512).unwrap();
    let root = spectral::physical_mass(&m, &g).unwrap();
    let mode = sector::diagonalize_stable(&sector::build_sector(&m, &g)).unwrap();
    assert!(
        (mode.m_v - root).abs() < 1e-6,
        "eigenvalue {} vs root {root}",
        mode.m_v
    );
    // discrete Z agrees with 1/(1 + C1)
    let (_, c1) = spectral::renorm_constants(&m, &g, root).unwrap();
    assert!((mode.z_v_discrete - 1.0 / (1.0 + c1)).abs() < 1e-6);
}

#[test]
fn survival_width_matches_pole() {
    let m = ModelParams::new(12.0, 10.0, 1.0, 0.2, FormFactor::SharpCutoff(5.0)).unwrap();
    let g = MomentumGrid::with_default_coverage(&m, 1024).unwrap();
    let pole = spectral::find_pole(&m, &g).unwrap();
    let gamma = pole.gamma;
    assert!(gamma > 0.0);

    let h = sector::build_sector(&m, &g);
    let n_t = 1201;
    let t_max = 3.0 / gamma;
    let ts: Vec<f64> = (0..n_t).map(|i| t_max * i as f64 / (n_t - 1) as f64).collect();
    let rec = sector::evolve_survival(&h, &ts).unwrap();
    let fitted = sector::fit_width(&rec, 0.2 / gamma, 2.0 / gamma).unwrap();
    let rel = ((fitted - gamma) / gamma).abs();
    assert!(rel < 0.05, "Γ_fit = {fitted:e}, Γ_pole = {gamma:e}, rel = {rel:e}");
}

#[test]
fn width_fit_improves_with_mode_count() {
    // the intermediate-time rate converges to Γ as the grid refines, down
    // to the systematic floor of the fixed fit window
    let m = ModelParams::new(12.0, 10.0, 1.0, 0.2, FormFactor::SharpCutoff(5.0)).unwrap();
    let g_ref = MomentumGrid::with_default_coverage(&m, 1024).unwrap();
    let gamma = spectral::find_pole(&m, &g_ref).unwrap().gamma;
    let mut errs = Vec::new();
    for n in [128usize, 256, 512, 1024] {
        let g = MomentumGrid::with_default_coverage(&m, n).unwrap();
        let h = sector::build_sector(&m, &g);
        let ts: Vec<f64> = (0..1201).map(|i| 3.0 / gamma * i as f64 / 1200.0).collect();
        let rec = sector::evolve_survival(&h, &ts).unwrap();
        let fit = sector::fit_width(&rec, 0.2 / gamma, 2.0 / gamma).unwrap();
        errs.push(((fit - gamma) / gamma).abs());
    }
    for w in errs.windows(2) {
        assert!(w[1] <= w[0] * 1.02, "error grew on refinement: {errs:?}");
    }
    assert!(errs[3] < errs[0] / 10.0, "no overall improvement: {errs:?}");
}

#[test]
fn master_population_tracks_survival_when_kappa_off() {
    let m = ModelParams::new(12.0, 10.0, 1.0, 0.2, FormFactor::SharpCutoff(5.0)).unwrap();
    let g = MomentumGrid::with_default_coverage(&m, 128).unwrap();
    let pole = spectral::find_pole(&m, &g).unwrap();
    let gamma = pole.gamma;

    let mut gen = master::build_generator(&m, &g, &pole, DissipatorVariant::Hermitized);
    gen.kappa = 0.0; // pure Hamiltonian flow isolates the shared construction
    let dt = gen.max_step();
    let t_end = 1.0 / gamma;
    let n_steps = (t_end / dt).ceil() as usize;
    let snaps: Vec<usize> = (0..=10).map(|i| i * n_steps / 10).collect();
    let rho0 = master::DensityMatrix::pure_v(gen.dim);
    let run = master::evolve_density_detailed(&gen, &rho0, dt, n_steps, &snaps).unwrap();

    let oracle = sector::build_sector(&m, &g).eigen();
    for (t, snap) in run.times.iter().zip(&run.snapshots) {
        let p_master = snap.get(master::V_INDEX, master::V_INDEX).re;
        let p_oracle = oracle.amplitude(*t).norm_sqr();
        assert!(
            (p_master - p_oracle).abs() <= 0.10 * p_oracle.max(0.05),
            "t = {t}: master {p_master} vs oracle {p_oracle}"
        );
    }
}

#[test]
fn langevin_mean_decay_matches_sector_width() {
    // heavy-V regime with γ ≤ 0.05 where the mean-field rate γm_V/(1+γ²)
    // and the sector width Γ/2 approximate the same pole
    let m = ModelParams::new(30.0, 1.0, 1.0, 0.75, FormFactor::SharpCutoff(50.0)).unwrap();
    let g = MomentumGrid::with_default_coverage(&m, 1024).unwrap();
    let pole = spectral::find_pole(&m, &g).unwrap();
    assert!(pole.gamma_friction <= 0.05);

    let h = sector::build_sector(&m, &g);
    let n_t = 1001;
    let t_max = 3.0 / pole.gamma;
    let ts: Vec<f64> = (0..n_t).map(|i| t_max * i as f64 / (n_t - 1) as f64).collect();
    let rec = sector::evolve_survival(&h, &ts).unwrap();
    let gamma_fit = sector::fit_width(&rec, 0.2 / pole.gamma, 2.0 / pole.gamma).unwrap();

    // the mean-field rate approximates the same pole as the sector width
    let rate_theory = pole.gamma_friction * pole.m_v
        / (1.0 + pole.gamma_friction * pole.gamma_friction);
    let rel = ((rate_theory - gamma_fit / 2.0) / (gamma_fit / 2.0)).abs();
    assert!(
        rel < 0.05,
        "mean rate {rate_theory} vs sector Γ/2 {} (rel {rel})",
        gamma_fit / 2.0
    );

    // and the simulated ensemble reproduces that rate within its errors
    let dt = 2.5e-5;
    let n_steps = ((1.2 / rate_theory) / dt).ceil() as usize;
    let spec = NoiseSpec {
        b_loc: pole.gamma_friction * pole.m_v,
        dt,
        seed: 20240,
        n_steps,
        n_trajectories: 2000,
    };
    let ens = langevin::run_ensemble(
        Complex64::new(1.0, 0.0),
        &pole,
        &spec,
        0.0,
        (n_steps / 400).max(1),
        0.5,
    )
    .unwrap();
    let fit = ens.fit.unwrap();
    assert!(!fit.degenerate);
    let delta = (fit.rate - rate_theory).abs();
    assert!(
        delta <= 3.0 * fit.rate_se.max(0.005 * rate_theory),
        "simulated rate {} ± {} vs {rate_theory}",
        fit.rate,
        fit.rate_se
    );
}
