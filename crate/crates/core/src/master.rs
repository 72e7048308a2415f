//! Generalized Pauli equation in operator form on the truncated basis
//! {|0⟩, |V⟩, |N θ_k⟩}.
//!
//! The flow couples a commutator with the renormalized Hamiltonian H_R to a
//! double-commutator decoherence term built from the V lowering operator
//! Φ with Φ|V⟩ = |0⟩:
//!
//! ```text
//! literal:     ρ̇ = −i[H_R, ρ] − κ [Φ†, [Φ, ρ]]
//! hermitized:  ρ̇ = −i[H_R, ρ] − κ/2 ([Φ†,[Φ,ρ]] + [Φ,[Φ†,ρ]])
//! ```
//!
//! with κ = γ·m_V. Both maps are trace free. The literal double commutator
//! with non-Hermitian Φ does not preserve Hermiticity of ρ (the mismatch is
//! [[Φ,Φ†],ρ]); the hermitized variant is the symmetric combination, which
//! is of Lindblad form with jump operators √κ Φ and √κ Φ† and therefore
//! preserves Hermiticity, positivity, and monotone linear-entropy growth.
//! Both variants are available; the hermitized one is the default.
//!
//! Φ and Φ† close on the vacuum ⊕ single-excitation span and H_R conserves
//! it, so the truncation is exact. Time stepping is classical fixed-step
//! RK4, which conserves Tr ρ identically (a linear invariant).

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{ModelParams, MomentumGrid};
use crate::spectral::PoleResult;

/// Basis index of the vacuum.
pub const VACUUM: usize = 0;
/// Basis index of the bare V state.
pub const V_INDEX: usize = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum DissipatorVariant {
    /// The printed double commutator −κ[Φ†,[Φ,ρ]].
    Literal,
    /// Symmetrized −κ/2([Φ†,[Φ,ρ]] + [Φ,[Φ†,ρ]]); Lindblad form.
    Hermitized,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InitialState {
    /// |V⟩⟨V|.
    PureV,
    /// (|0⟩+|V⟩)(⟨0|+⟨V|)/2.
    VacuumVSuperposition,
    /// I/d.
    MaximallyMixed,
}

/// Complex density matrix on the truncated basis, row major.
#[derive(Debug, Clone)]
pub struct DensityMatrix {
    pub dim: usize,
    pub data: Vec<Complex64>,
}

impl DensityMatrix {
    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            data: vec![Complex64::new(0.0, 0.0); dim * dim],
        }
    }

    pub fn from_initial_state(state: InitialState, dim: usize) -> Self {
        let mut rho = Self::zeros(dim);
        match state {
            InitialState::PureV => {
                rho.data[V_INDEX * dim + V_INDEX] = Complex64::new(1.0, 0.0);
            }
            InitialState::VacuumVSuperposition => {
                let half = Complex64::new(0.5, 0.0);
                for &i in &[VACUUM, V_INDEX] {
                    for &j in &[VACUUM, V_INDEX] {
                        rho.data[i * dim + j] = half;
                    }
                }
            }
            InitialState::MaximallyMixed => {
                let p = Complex64::new(1.0 / dim as f64, 0.0);
                for i in 0..dim {
                    rho.data[i * dim + i] = p;
                }
            }
        }
        rho
    }

    pub fn pure_v(dim: usize) -> Self {
        Self::from_initial_state(InitialState::PureV, dim)
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.data[i * self.dim + j]
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.dim).map(|i| self.get(i, i)).sum()
    }

    /// Tr ρ² (real part; exactly real for Hermitian ρ).
    pub fn trace_rho_squared(&self) -> f64 {
        let d = self.dim;
        let mut acc = Complex64::new(0.0, 0.0);
        for i in 0..d {
            for j in 0..d {
                acc += self.data[i * d + j] * self.data[j * d + i];
            }
        }
        acc.re
    }

    pub fn purity(&self) -> f64 {
        self.trace_rho_squared()
    }

    /// max_{ij} |ρ_ij − conj(ρ_ji)|.
    pub fn hermiticity_defect(&self) -> f64 {
        let d = self.dim;
        let mut worst = 0.0_f64;
        for i in 0..d {
            for j in i..d {
                let delta = (self.data[i * d + j] - self.data[j * d + i].conj()).norm();
                worst = worst.max(delta);
            }
        }
        worst
    }

    /// Smallest eigenvalue of the Hermitian part.
    pub fn min_eigenvalue(&self) -> f64 {
        let d = self.dim;
        let mut m = DMatrix::<Complex64>::zeros(d, d);
        for i in 0..d {
            for j in 0..d {
                m[(i, j)] = 0.5 * (self.data[i * d + j] + self.data[j * d + i].conj());
            }
        }
        let eig = m.symmetric_eigen();
        eig.eigenvalues.iter().cloned().fold(f64::INFINITY, f64::min)
    }

    /// Hermiticity and trace at 1e−10, positivity at 1e−8.
    pub fn check_invariants(&self, t: f64) -> Result<()> {
        let herm = self.hermiticity_defect();
        if herm > 1e-10 {
            return Err(Error::Integration {
                t,
                reason: format!("hermiticity defect {herm:e} exceeds 1e-10"),
            });
        }
        let tr = self.trace();
        if (tr.re - 1.0).abs() > 1e-10 || tr.im.abs() > 1e-10 {
            return Err(Error::Integration {
                t,
                reason: format!("trace defect {:e}", (tr - Complex64::new(1.0, 0.0)).norm()),
            });
        }
        let min_eig = self.min_eigenvalue();
        if min_eig < -1e-8 {
            return Err(Error::Integration {
                t,
                reason: format!("negative eigenvalue {min_eig:e}"),
            });
        }
        Ok(())
    }
}

/// Linear entropy S = −Tr ρ² ∈ [−1, 0]; −1 iff ρ is pure.
pub fn linear_entropy(rho: &DensityMatrix) -> f64 {
    -rho.trace_rho_squared()
}

/// Generator data: renormalized arrowhead Hamiltonian bordered by the
/// vacuum, decoherence rate κ, and the dissipator variant.
#[derive(Debug, Clone)]
pub struct GeneratorSpec {
    /// n_modes + 2.
    pub dim: usize,
    /// Diagonal of H_R: [0, m_V, m_N+ω_1, …].
    pub h_diag: Vec<f64>,
    /// Couplings h_k of the V row/column (renormalized λ).
    pub h_couplings: Vec<f64>,
    /// Decoherence rate κ = γ·m_V.
    pub kappa: f64,
    pub variant: DissipatorVariant,
}

/// Renormalized generator on the vacuum ⊕ single-excitation basis.
pub fn build_generator(
    model: &ModelParams,
    grid: &MomentumGrid,
    pole: &PoleResult,
    variant: DissipatorVariant,
) -> GeneratorSpec {
    let n = grid.n_modes;
    let mut h_diag = Vec::with_capacity(n + 2);
    h_diag.push(0.0);
    h_diag.push(pole.m_v);
    let mut h_couplings = Vec::with_capacity(n);
    for (&k, &w) in grid.k_values.iter().zip(&grid.weights) {
        let omega = model.omega(k);
        h_diag.push(model.m_n + omega);
        h_couplings.push(pole.lambda_ren * model.form_factor(omega) * (w / (2.0 * omega)).sqrt());
    }
    GeneratorSpec {
        dim: n + 2,
        h_diag,
        h_couplings,
        kappa: pole.gamma_friction * pole.m_v,
        variant,
    }
}

impl GeneratorSpec {
    pub fn new(
        h_diag: Vec<f64>,
        h_couplings: Vec<f64>,
        kappa: f64,
        variant: DissipatorVariant,
    ) -> Result<Self> {
        if h_diag.len() < 2 || h_diag.len() != h_couplings.len() + 2 {
            return Err(Error::Config(
                "generator needs dim >= 2 with dim-2 couplings".into(),
            ));
        }
        if !(kappa >= 0.0) {
            return Err(Error::Config(format!("kappa must be >= 0, got {kappa}")));
        }
        Ok(Self {
            dim: h_diag.len(),
            h_diag,
            h_couplings,
            kappa,
            variant,
        })
    }

    /// Two-level {|0⟩, |V⟩} dephasing generator with H = 0.
    pub fn dephasing_two_level(kappa: f64, variant: DissipatorVariant) -> Self {
        Self::new(vec![0.0, 0.0], vec![], kappa, variant).unwrap()
    }

    pub fn hamiltonian_dense(&self) -> DMatrix<f64> {
        let d = self.dim;
        let mut m = DMatrix::zeros(d, d);
        for i in 0..d {
            m[(i, i)] = self.h_diag[i];
        }
        for (k, &h) in self.h_couplings.iter().enumerate() {
            m[(V_INDEX, 2 + k)] = h;
            m[(2 + k, V_INDEX)] = h;
        }
        m
    }

    /// Lowering operator Φ with Φ|V⟩ = |0⟩ and zero elsewhere.
    pub fn lowering_op_dense(&self) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(self.dim, self.dim);
        m[(VACUUM, V_INDEX)] = 1.0;
        m
    }

    /// Spectral norm of H_R (dense Hermitian eigenvalues).
    pub fn h_spectral_norm(&self) -> f64 {
        self.hamiltonian_dense()
            .symmetric_eigen()
            .eigenvalues
            .iter()
            .fold(0.0_f64, |acc, &e| acc.max(e.abs()))
    }

    /// Largest admissible step, 0.05/max(‖H_R‖₂, κ).
    pub fn max_step(&self) -> f64 {
        0.05 / self.h_spectral_norm().max(self.kappa).max(f64::MIN_POSITIVE)
    }

    /// ρ̇ = −i[H_R, ρ] + dissipator(ρ), written into `out`.
    fn apply(&self, rho: &[Complex64], out: &mut [Complex64]) {
        let d = self.dim;
        let diag = &self.h_diag;
        let h = &self.h_couplings;
        let mv = diag[V_INDEX];

        // u[j] = Σ_m h_m ρ_{(2+m) j}  (column reductions for the V row of Hρ)
        let mut u = vec![Complex64::new(0.0, 0.0); d];
        for (m, &hm) in h.iter().enumerate() {
            let row = &rho[(2 + m) * d..(2 + m) * d + d];
            for (uj, &r) in u.iter_mut().zip(row) {
                *uj += hm * r;
            }
        }
        // v[i] = Σ_m h_m ρ_{i (2+m)}  (row dots for the V column of ρH)
        let mut v = vec![Complex64::new(0.0, 0.0); d];
        for i in 0..d {
            let row = &rho[i * d..i * d + d];
            let mut acc = Complex64::new(0.0, 0.0);
            for (m, &hm) in h.iter().enumerate() {
                acc += hm * row[2 + m];
            }
            v[i] = acc;
        }

        let minus_i = Complex64::new(0.0, -1.0);
        for i in 0..d {
            let row = &rho[i * d..i * d + d];
            let rho_i1 = row[V_INDEX];
            let out_row = &mut out[i * d..i * d + d];
            let rho_1 = &rho[V_INDEX * d..V_INDEX * d + d];
            for j in 0..d {
                let h_rho = if i == 0 {
                    Complex64::new(0.0, 0.0)
                } else if i == V_INDEX {
                    mv * row[j] + u[j]
                } else {
                    diag[i] * row[j] + h[i - 2] * rho_1[j]
                };
                let rho_h = if j == 0 {
                    Complex64::new(0.0, 0.0)
                } else if j == V_INDEX {
                    mv * rho_i1 + v[i]
                } else {
                    diag[j] * row[j] + h[j - 2] * rho_i1
                };
                out_row[j] = minus_i * (h_rho - rho_h);
            }
        }

        // dissipator, rank-1 structure: only the V/vacuum rows and columns
        let kappa = self.kappa;
        if kappa == 0.0 {
            return;
        }
        let rho00 = rho[0];
        let rho11 = rho[V_INDEX * d + V_INDEX];
        match self.variant {
            DissipatorVariant::Literal => {
                // −κ [Φ†,[Φ,ρ]]
                for j in 0..d {
                    out[V_INDEX * d + j] -= kappa * rho[V_INDEX * d + j];
                }
                out[V_INDEX * d + V_INDEX] += kappa * rho00;
                out[0] += kappa * rho11;
                for i in 0..d {
                    out[i * d] -= kappa * rho[i * d];
                }
            }
            DissipatorVariant::Hermitized => {
                let half = 0.5 * kappa;
                for j in 0..d {
                    out[V_INDEX * d + j] -= half * rho[V_INDEX * d + j];
                    out[j] -= half * rho[j];
                }
                out[V_INDEX * d + V_INDEX] += kappa * rho00;
                out[0] += kappa * rho11;
                for i in 0..d {
                    out[i * d] -= half * rho[i * d];
                    out[i * d + V_INDEX] -= half * rho[i * d + V_INDEX];
                }
            }
        }
    }
}

/// Instantaneous linear-entropy production rate.
///
/// 2κ‖[Φ,ρ]‖² for the literal variant; κ(‖[Φ,ρ]‖² + ‖[Φ†,ρ]‖²) for the
/// hermitized one. Always ≥ 0, and equal to dS/dt along the flow (the
/// Hamiltonian contribution cancels exactly).
pub fn entropy_production(gen: &GeneratorSpec, rho: &DensityMatrix) -> f64 {
    let d = rho.dim;
    let rho00 = rho.get(VACUUM, VACUUM);
    let rho11 = rho.get(V_INDEX, V_INDEX);

    // ‖[Φ,ρ]‖²: row 0 holds ρ_{Vj} (with (0,V) ↦ ρ_VV−ρ_00), column V holds −ρ_{i0}
    let mut norm_x = (rho11 - rho00).norm_sqr();
    for j in 0..d {
        if j != V_INDEX {
            norm_x += rho.get(V_INDEX, j).norm_sqr();
        }
    }
    for i in 0..d {
        if i != VACUUM {
            norm_x += rho.get(i, VACUUM).norm_sqr();
        }
    }
    match gen.variant {
        DissipatorVariant::Literal => 2.0 * gen.kappa * norm_x,
        DissipatorVariant::Hermitized => {
            let mut norm_y = (rho00 - rho11).norm_sqr();
            for j in 0..d {
                if j != VACUUM {
                    norm_y += rho.get(VACUUM, j).norm_sqr();
                }
            }
            for i in 0..d {
                if i != V_INDEX {
                    norm_y += rho.get(i, V_INDEX).norm_sqr();
                }
            }
            gen.kappa * (norm_x + norm_y)
        }
    }
}

/// Full diagnostics of one master-equation integration.
#[derive(Debug, Clone)]
pub struct MasterRun {
    pub dt: f64,
    /// Snapshot times (multiples of dt).
    pub times: Vec<f64>,
    pub snapshots: Vec<DensityMatrix>,
    /// Linear entropy at every step, length n_steps + 1.
    pub s_per_step: Vec<f64>,
    /// Entropy production at every step.
    pub ep_per_step: Vec<f64>,
    pub max_trace_defect: f64,
    /// min over steps of S(t_{j+1}) − S(t_j).
    pub min_entropy_increment: f64,
    pub max_hermiticity_defect: f64,
}

/// Integrate the flow with fixed-step RK4, snapshotting at the given steps.
///
/// Every output snapshot is re-checked against the density-matrix
/// invariants (hermitized variant) or its Hermiticity defect is recorded
/// (literal variant).
pub fn evolve_density_detailed(
    gen: &GeneratorSpec,
    rho0: &DensityMatrix,
    dt: f64,
    n_steps: usize,
    snapshot_steps: &[usize],
) -> Result<MasterRun> {
    if rho0.dim != gen.dim {
        return Err(Error::Config(format!(
            "density matrix dimension {} does not match generator dimension {}",
            rho0.dim, gen.dim
        )));
    }
    if !(dt > 0.0) {
        return Err(Error::Config(format!("dt must be positive, got {dt}")));
    }
    let dt_max = gen.max_step();
    if dt > dt_max * (1.0 + 1e-12) {
        return Err(Error::Config(format!(
            "dt = {dt:e} exceeds the stability bound 0.05/max(|H|, kappa) = {dt_max:e}"
        )));
    }
    rho0.check_invariants(0.0)?;

    let d = gen.dim;
    let n2 = d * d;
    let mut rho = rho0.clone();
    let mut k1 = vec![Complex64::new(0.0, 0.0); n2];
    let mut k2 = k1.clone();
    let mut k3 = k1.clone();
    let mut k4 = k1.clone();
    let mut tmp = k1.clone();

    let mut s_per_step = Vec::with_capacity(n_steps + 1);
    let mut ep_per_step = Vec::with_capacity(n_steps + 1);
    let mut snapshots = Vec::with_capacity(snapshot_steps.len());
    let mut times = Vec::with_capacity(snapshot_steps.len());
    let mut max_trace_defect = 0.0_f64;
    let mut min_entropy_increment = f64::INFINITY;
    let mut max_herm = 0.0_f64;
    let mut snap_iter = snapshot_steps.iter().peekable();

    let mut s_prev = linear_entropy(&rho);
    for step in 0..=n_steps {
        let t = step as f64 * dt;
        let s = linear_entropy(&rho);
        s_per_step.push(s);
        ep_per_step.push(entropy_production(gen, &rho));
        if step > 0 {
            min_entropy_increment = min_entropy_increment.min(s - s_prev);
        }
        s_prev = s;
        let tr = rho.trace();
        max_trace_defect = max_trace_defect.max((tr - Complex64::new(1.0, 0.0)).norm());

        while snap_iter.peek() == Some(&&step) {
            snap_iter.next();
            match gen.variant {
                DissipatorVariant::Hermitized => rho.check_invariants(t)?,
                DissipatorVariant::Literal => {
                    max_herm = max_herm.max(rho.hermiticity_defect());
                }
            }
            times.push(t);
            snapshots.push(rho.clone());
        }

        if step == n_steps {
            break;
        }

        gen.apply(&rho.data, &mut k1);
        for i in 0..n2 {
            tmp[i] = rho.data[i] + 0.5 * dt * k1[i];
        }
        gen.apply(&tmp, &mut k2);
        for i in 0..n2 {
            tmp[i] = rho.data[i] + 0.5 * dt * k2[i];
        }
        gen.apply(&tmp, &mut k3);
        for i in 0..n2 {
            tmp[i] = rho.data[i] + dt * k3[i];
        }
        gen.apply(&tmp, &mut k4);
        let w = dt / 6.0;
        for i in 0..n2 {
            rho.data[i] += w * (k1[i] + 2.0 * (k2[i] + k3[i]) + k4[i]);
        }
    }
    if min_entropy_increment == f64::INFINITY {
        min_entropy_increment = 0.0;
    }

    Ok(MasterRun {
        dt,
        times,
        snapshots,
        s_per_step,
        ep_per_step,
        max_trace_defect,
        min_entropy_increment,
        max_hermiticity_defect: max_herm,
    })
}

/// Integrate and return the density matrix at the requested times (each
/// snapped to the nearest step of the fixed grid).
pub fn evolve_density(
    gen: &GeneratorSpec,
    rho0: &DensityMatrix,
    t_grid: &[f64],
    dt: f64,
) -> Result<Vec<DensityMatrix>> {
    if t_grid.is_empty() || t_grid[0] < 0.0 || t_grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::Config(
            "time grid must be ascending and start at t >= 0".into(),
        ));
    }
    let mut steps: Vec<usize> = t_grid.iter().map(|&t| (t / dt).round() as usize).collect();
    steps.dedup();
    let n_steps = *steps.last().unwrap();
    let run = evolve_density_detailed(gen, rho0, dt, n_steps, &steps)?;
    Ok(run.snapshots)
}
