//! Double-commutator master equations and their analyses.
//!
//! The generator integrated here is
//!
//! ```text
//! dρ/dt = -(i/ħ)[H, ρ] - p Σ_ij K_ij [Q_i, [Q_j, ρ]]
//! ```
//!
//! with a positive symmetric kernel K and Hermitian couplings Q_i. Two
//! prefactor conventions are supported and never inferred from units:
//! `p = 1/(2ħ²)` for generic energy-valued kernels, and `p = 1/(2ħ)` for
//! the Newtonian case where the kernel carries G and the couplings are
//! cell-mass operators. With a PSD kernel the generator is in Lindblad
//! form, so trace, Hermiticity and positivity are contracts the integrator
//! must track rather than assume.
//!
//! On top of the integrator: extraction of the finite-time propagator as an
//! N²×N² map, a stochastic-potential unraveling whose Itô average
//! reproduces the same generator, closed-form cat-state decay rates, and
//! heating-rate diagnostics for the energy non-conservation the dissipator
//! causes.

use alloc::vec::Vec;

use nalgebra::{DVector, Normed};

use crate::constants::PhysConstants;
use crate::error::{require_positive, Error, Result};
use crate::kernel::{newton_kernel_from_positions, Kernel, KernelKind, MassConfiguration};
use crate::linalg::{self, CMatrix, CVector, C64};
use crate::qstate::{
    projector, purity_raw, DensityMatrix, HermitianOperator, StateVector, UnitTag,
};
use crate::seeding::substream;

/// Accumulated |tr ρ − 1| allowed over a whole run.
pub const TRACE_BUDGET: f64 = 1e-9;
/// Decay fits use samples with |ρ_kl| inside this window relative to the
/// initial magnitude, clear of both the transient and the noise floor.
pub const FIT_WINDOW: (f64, f64) = (0.05, 0.8);
/// Largest N² the propagator-map extraction accepts.
pub const MAP_DIMENSION_CAP: usize = 4096;

/// Where ħ and G sit in the double-commutator prefactor.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PrefactorConvention {
    /// `1/(2ħ²)`, generic kernel with energy-valued couplings contract.
    Generic,
    /// `1/(2ħ)`, Newtonian kernel (G absorbed) with mass-valued couplings.
    MassDensity,
}

/// Hamiltonian, couplings and kernel of one open system.
#[derive(Debug, Clone, PartialEq)]
pub struct OpenSystem {
    hamiltonian: HermitianOperator,
    couplings: Vec<HermitianOperator>,
    kernel: Kernel,
    convention: PrefactorConvention,
    /// R_i = Σ_j K_ij Q_j, cached so one dissipator evaluation costs
    /// N_c outer commutators instead of N_c².
    weighted: Vec<CMatrix>,
    prefactor: f64,
    hbar: f64,
}

impl OpenSystem {
    pub fn new(
        hamiltonian: HermitianOperator,
        couplings: Vec<HermitianOperator>,
        kernel: Kernel,
        convention: PrefactorConvention,
    ) -> Result<Self> {
        if hamiltonian.unit() != UnitTag::Joule {
            return Err(Error::UnitMismatch {
                expected: UnitTag::Joule,
                got: hamiltonian.unit(),
            });
        }
        if couplings.is_empty() {
            return Err(Error::Invalid("open system needs at least one coupling"));
        }
        let dim = hamiltonian.dim();
        for q in &couplings {
            if q.dim() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    got: q.dim(),
                });
            }
        }
        let tag = couplings[0].unit();
        for q in &couplings {
            if q.unit() != tag {
                return Err(Error::UnitMismatch {
                    expected: tag,
                    got: q.unit(),
                });
            }
        }
        if convention == PrefactorConvention::MassDensity && tag != UnitTag::Kilogram {
            return Err(Error::UnitMismatch {
                expected: UnitTag::Kilogram,
                got: tag,
            });
        }
        if kernel.dim() != couplings.len() {
            return Err(Error::DimensionMismatch {
                expected: couplings.len(),
                got: kernel.dim(),
            });
        }

        let hbar = PhysConstants::codata2018().hbar;
        let prefactor = match convention {
            PrefactorConvention::Generic => 1.0 / (2.0 * hbar * hbar),
            PrefactorConvention::MassDensity => 1.0 / (2.0 * hbar),
        };
        let weighted = (0..couplings.len())
            .map(|i| {
                let mut r = CMatrix::zeros(dim, dim);
                for (j, q) in couplings.iter().enumerate() {
                    r += q.matrix() * linalg::cscale(kernel.matrix()[(i, j)]);
                }
                r
            })
            .collect();

        Ok(Self {
            hamiltonian,
            couplings,
            kernel,
            convention,
            weighted,
            prefactor,
            hbar,
        })
    }

    pub fn dim(&self) -> usize {
        self.hamiltonian.dim()
    }

    pub fn n_couplings(&self) -> usize {
        self.couplings.len()
    }

    pub fn hamiltonian(&self) -> &HermitianOperator {
        &self.hamiltonian
    }

    pub fn couplings(&self) -> &[HermitianOperator] {
        &self.couplings
    }

    pub fn kernel(&self) -> &Kernel {
        &self.kernel
    }

    pub fn convention(&self) -> PrefactorConvention {
        self.convention
    }

    pub fn prefactor(&self) -> f64 {
        self.prefactor
    }

    pub fn hbar(&self) -> f64 {
        self.hbar
    }

    /// `-p Σ_ij K_ij [Q_i, [Q_j, m]]`, written as `-p Σ_i [Q_i, [R_i, m]]`.
    fn dissipator_raw(&self, m: &CMatrix) -> CMatrix {
        let dim = self.dim();
        let mut acc = CMatrix::zeros(dim, dim);
        for (q, r) in self.couplings.iter().zip(&self.weighted) {
            let inner = linalg::commutator(r, m);
            acc += linalg::commutator(q.matrix(), &inner);
        }
        acc * linalg::cscale(-self.prefactor)
    }

    /// Full right-hand side `-(i/ħ)[H, m] + dissipator(m)`.
    fn rhs(&self, m: &CMatrix) -> CMatrix {
        let ham = linalg::commutator(self.hamiltonian.matrix(), m)
            * (-linalg::I * linalg::cscale(1.0 / self.hbar));
        ham + self.dissipator_raw(m)
    }
}

/// Dissipator contribution, s⁻¹ scaled: Hermitian and traceless for valid
/// inputs.
pub fn dissipator(rho: &DensityMatrix, sys: &OpenSystem) -> Result<CMatrix> {
    if rho.dim() != sys.dim() {
        return Err(Error::DimensionMismatch {
            expected: sys.dim(),
            got: rho.dim(),
        });
    }
    Ok(sys.dissipator_raw(rho.matrix()))
}

/// Per-step integrator health record.
#[derive(Debug, Clone, PartialEq)]
pub struct StepDiagnostics {
    pub t_s: f64,
    /// |tr ρ − 1|.
    pub trace_drift: f64,
    /// Largest entry of the anti-Hermitian part discarded this step.
    pub hermiticity_drift: f64,
    pub min_eigenvalue: f64,
    pub purity: f64,
    pub mean_energy_j: f64,
}

/// Trajectory of states with diagnostics recorded every accepted step.
#[derive(Debug, Clone, PartialEq)]
pub struct EvolutionResult {
    pub times_s: Vec<f64>,
    pub states: Vec<DensityMatrix>,
    pub diagnostics: Vec<StepDiagnostics>,
}

impl EvolutionResult {
    pub fn final_state(&self) -> &DensityMatrix {
        self.states.last().expect("evolution records ≥ 1 state")
    }

    pub fn entry_series(&self, m: usize, n: usize) -> Vec<C64> {
        self.states.iter().map(|s| s.entry(m, n)).collect()
    }

    pub fn abs_entry_series(&self, m: usize, n: usize) -> Vec<f64> {
        self.states.iter().map(|s| s.entry(m, n).norm()).collect()
    }

    pub fn mean_energies_j(&self) -> Vec<f64> {
        self.diagnostics.iter().map(|d| d.mean_energy_j).collect()
    }
}

fn diagnose(t_s: f64, m: &CMatrix, hermiticity_drift: f64, sys: &OpenSystem) -> StepDiagnostics {
    let tr = linalg::trace(m);
    let trace_drift = (tr - linalg::ONE).norm();
    let min_eigenvalue = linalg::min_eigenvalue(m);
    let purity = purity_raw(m);
    let mean_energy_j = (sys.hamiltonian.matrix() * m).diagonal().sum().re;
    StepDiagnostics {
        t_s,
        trace_drift,
        hermiticity_drift,
        min_eigenvalue,
        purity,
        mean_energy_j,
    }
}

/// One classical RK4 step followed by Hermitian symmetrization; returns the
/// new state and the largest discarded anti-Hermitian entry.
fn rk4_step(sys: &OpenSystem, m: &CMatrix, h: f64) -> (CMatrix, f64) {
    let k1 = sys.rhs(m);
    let k2 = sys.rhs(&(m + &k1 * linalg::cscale(0.5 * h)));
    let k3 = sys.rhs(&(m + &k2 * linalg::cscale(0.5 * h)));
    let k4 = sys.rhs(&(m + &k3 * linalg::cscale(h)));
    let next = m + (k1 + k2 * linalg::cscale(2.0) + k3 * linalg::cscale(2.0) + k4)
        * linalg::cscale(h / 6.0);
    let sym = linalg::hermitian_part(&next);
    let drift = linalg::max_abs(&(&next - &sym));
    (sym, drift)
}

fn plan_steps(t_final: f64, dt: f64) -> Vec<f64> {
    // Fixed user dt; a shorter final step lands exactly on t_final.
    let mut steps = Vec::new();
    let n_full = libm::floor(t_final / dt + 1e-12) as usize;
    for _ in 0..n_full {
        steps.push(dt);
    }
    let remainder = t_final - n_full as f64 * dt;
    if remainder > 1e-12 * dt {
        steps.push(remainder);
    }
    steps
}

/// Integrates the full right-hand side with classical fixed-step RK4,
/// recording per-step diagnostics. Fails if the accumulated trace drift
/// leaves the `TRACE_BUDGET`.
pub fn evolve(
    rho0: &DensityMatrix,
    sys: &OpenSystem,
    t_final_s: f64,
    dt_s: f64,
) -> Result<EvolutionResult> {
    require_positive("dt", dt_s)?;
    if !(t_final_s >= 0.0) || !t_final_s.is_finite() {
        return Err(Error::Domain {
            name: "t_final",
            requirement: "finite and ≥ 0",
            value: t_final_s,
        });
    }
    if rho0.dim() != sys.dim() {
        return Err(Error::DimensionMismatch {
            expected: sys.dim(),
            got: rho0.dim(),
        });
    }

    let mut state = rho0.matrix().clone();
    let mut t = 0.0;
    let mut times_s = alloc::vec![0.0];
    let mut states = alloc::vec![rho0.clone()];
    let mut diagnostics = alloc::vec![diagnose(0.0, &state, 0.0, sys)];

    for (step_index, h) in plan_steps(t_final_s, dt_s).into_iter().enumerate() {
        let (next, herm_drift) = rk4_step(sys, &state, h);
        state = next;
        t += h;
        let diag = diagnose(t, &state, herm_drift, sys);
        if !(diag.trace_drift <= TRACE_BUDGET) {
            return Err(Error::StepInstability {
                trace_drift: diag.trace_drift,
                budget: TRACE_BUDGET,
                step: step_index + 1,
            });
        }
        times_s.push(t);
        states.push(DensityMatrix::unchecked(state.clone()));
        diagnostics.push(diag);
    }

    Ok(EvolutionResult {
        times_s,
        states,
        diagnostics,
    })
}

/// Lean propagation without history, for map extraction.
fn propagate(sys: &OpenSystem, m0: &CMatrix, dt: f64, steps: usize) -> Result<CMatrix> {
    let mut state = m0.clone();
    for step in 0..steps {
        let (next, _) = rk4_step(sys, &state, dt);
        state = next;
        let drift = (linalg::trace(&state) - linalg::ONE).norm();
        if !(drift <= TRACE_BUDGET) {
            return Err(Error::StepInstability {
                trace_drift: drift,
                budget: TRACE_BUDGET,
                step: step + 1,
            });
        }
    }
    Ok(state)
}

/// Finite-time propagator ρ(0) ↦ ρ(t) as an N²×N² matrix over the
/// matrix-unit basis, row-major: (m, n) ↦ m·N + n.
#[derive(Debug, Clone, PartialEq)]
pub struct SuperscatteringMap {
    matrix: CMatrix,
    dim: usize,
    t_s: f64,
}

impl SuperscatteringMap {
    /// Hilbert-space dimension N.
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn t_s(&self) -> f64 {
        self.t_s
    }

    /// The N²×N² representation.
    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn apply_raw(&self, x: &CMatrix) -> CMatrix {
        let n = self.dim;
        let v = CVector::from_iterator(n * n, (0..n * n).map(|k| x[(k / n, k % n)]));
        let y = &self.matrix * v;
        CMatrix::from_fn(n, n, |i, j| y[i * n + j])
    }

    pub fn apply(&self, rho: &DensityMatrix) -> Result<CMatrix> {
        if rho.dim() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: rho.dim(),
            });
        }
        Ok(self.apply_raw(rho.matrix()))
    }

    /// Largest |tr S(E_mn) − δ_mn| over the input basis.
    pub fn max_trace_defect(&self) -> f64 {
        let n = self.dim;
        let mut worst = 0.0_f64;
        for m in 0..n {
            for j in 0..n {
                let col = m * n + j;
                let mut tr = C64::new(0.0, 0.0);
                for d in 0..n {
                    tr += self.matrix[(d * n + d, col)];
                }
                let expect = if m == j { 1.0 } else { 0.0 };
                worst = worst.max((tr - linalg::cscale(expect)).norm());
            }
        }
        worst
    }

    /// Choi matrix Σ_mn E_mn ⊗ S(E_mn); the map is completely positive iff
    /// this is PSD.
    pub fn choi(&self) -> CMatrix {
        let n = self.dim;
        CMatrix::from_fn(n * n, n * n, |row, col| {
            let (m, i) = (row / n, row % n);
            let (j, l) = (col / n, col % n);
            // (E_mj ⊗ S(E_mj))[(m·N+i, j·N+l)] = S(E_mj)[(i, l)]
            self.matrix[(i * n + l, m * n + j)]
        })
    }

    pub fn choi_min_eigenvalue(&self) -> f64 {
        let choi = self.choi();
        // The Choi matrix of a Hermiticity-preserving map is Hermitian up to
        // integrator rounding; symmetrize before the eigensolve.
        linalg::min_eigenvalue(&linalg::hermitian_part(&choi))
    }

    /// Map composition; for a time-independent generator
    /// `map(t₁)∘map(t₂) = map(t₁+t₂)`.
    pub fn compose(&self, other: &SuperscatteringMap) -> Result<SuperscatteringMap> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: other.dim,
            });
        }
        Ok(SuperscatteringMap {
            matrix: &self.matrix * &other.matrix,
            dim: self.dim,
            t_s: self.t_s + other.t_s,
        })
    }
}

/// Extracts the propagator by evolving N² Hermitian basis states: the N
/// basis projectors and, per off-diagonal pair, the two superposition
/// projectors `(e_m + e_n)/√2` and `(e_m + i·e_n)/√2`.
pub fn superscattering_map(sys: &OpenSystem, t_s: f64) -> Result<SuperscatteringMap> {
    let n = sys.dim();
    if n * n > MAP_DIMENSION_CAP {
        return Err(Error::DimensionCap {
            dim: n * n,
            cap: MAP_DIMENSION_CAP,
        });
    }
    if !(t_s >= 0.0) || !t_s.is_finite() {
        return Err(Error::Domain {
            name: "t",
            requirement: "finite and ≥ 0",
            value: t_s,
        });
    }
    if t_s == 0.0 {
        return Ok(SuperscatteringMap {
            matrix: CMatrix::identity(n * n, n * n),
            dim: n,
            t_s: 0.0,
        });
    }

    // Resolution heuristic: ~200 steps per unit of combined Hamiltonian and
    // decay action keeps the RK4 error below the 1e-7 composition contract.
    let omega = sys.hamiltonian.matrix().norm() / sys.hbar;
    let mut rate = 0.0;
    for (i, qi) in sys.couplings.iter().enumerate() {
        for (j, qj) in sys.couplings.iter().enumerate() {
            rate += sys.kernel.matrix()[(i, j)].abs() * qi.matrix().norm() * qj.matrix().norm();
        }
    }
    rate *= sys.prefactor;
    let action = (omega + rate) * t_s;
    let steps = libm::ceil(200.0 * action).max(64.0).min(2_000_000.0) as usize;
    let dt = t_s / steps as f64;

    let mut evolved_diag: Vec<CMatrix> = Vec::with_capacity(n);
    for m in 0..n {
        let basis = projector(&StateVector::basis_state(n, m)?);
        evolved_diag.push(propagate(sys, basis.matrix(), dt, steps)?);
    }

    let mut matrix = CMatrix::zeros(n * n, n * n);
    let mut set_column = |m: usize, j: usize, s: &CMatrix| {
        let col = m * n + j;
        for r in 0..n {
            for c in 0..n {
                matrix[(r * n + c, col)] = s[(r, c)];
            }
        }
    };

    for (m, s) in evolved_diag.iter().enumerate() {
        set_column(m, m, s);
    }

    for m in 0..n {
        for j in (m + 1)..n {
            let plus = projector(&StateVector::equal_pair(n, m, j)?);
            let s_plus = propagate(sys, plus.matrix(), dt, steps)?;

            let mut amps = CVector::zeros(n);
            amps[m] = linalg::cscale(1.0 / libm::sqrt(2.0));
            amps[j] = linalg::I * linalg::cscale(1.0 / libm::sqrt(2.0));
            let imag = projector(&StateVector::try_new(amps)?);
            let s_imag = propagate(sys, imag.matrix(), dt, steps)?;

            // E_mj = (P - (E_mm+E_jj)/2) + i (Q - (E_mm+E_jj)/2)
            let half_diag = (&evolved_diag[m] + &evolved_diag[j]) * linalg::cscale(0.5);
            let s_mj = &s_plus - &half_diag + (&s_imag - &half_diag) * linalg::I;
            let s_jm = s_mj.adjoint();
            set_column(m, j, &s_mj);
            set_column(j, m, &s_jm);
        }
    }

    Ok(SuperscatteringMap {
        matrix,
        dim: n,
        t_s,
    })
}

/// One pure trajectory of the stochastic-potential unraveling: per step the
/// unitary `exp(-(i/ħ)(H·dt + Σ_i Q_i W_i))` with W drawn on substream
/// `(seed, index)` at covariance ħ·K·dt.
pub fn unraveled_trajectory(
    psi0: &StateVector,
    sys: &OpenSystem,
    dt_s: f64,
    steps: usize,
    seed: u64,
    index: u64,
) -> Result<StateVector> {
    if sys.convention() != PrefactorConvention::MassDensity {
        return Err(Error::Invalid(
            "the unraveling reproduces the mass-density convention; build the system with it",
        ));
    }
    if psi0.dim() != sys.dim() {
        return Err(Error::DimensionMismatch {
            expected: sys.dim(),
            got: psi0.dim(),
        });
    }
    require_positive("dt", dt_s)?;

    let l = sys.kernel().noise_factor(sys.hbar, dt_s);
    let mut rng = substream(seed, index);
    let n_cells = sys.n_couplings();
    let mut psi = psi0.amplitudes().clone();
    for _ in 0..steps {
        let z = DVector::from_iterator(n_cells, (0..n_cells).map(|_| {
            crate::seeding::standard_normal(&mut rng)
        }));
        let w = &l * z;
        let mut generator = sys.hamiltonian.matrix() * linalg::cscale(dt_s);
        for (q, &wi) in sys.couplings.iter().zip(w.iter()) {
            generator += q.matrix() * linalg::cscale(wi);
        }
        generator *= linalg::cscale(1.0 / sys.hbar);
        psi = linalg::phase_exponential(&generator) * psi;
    }
    Ok(StateVector::unchecked(psi))
}

/// Trajectory average of projectors, accumulated in ascending trajectory
/// order so a fixed seed reproduces the result bit for bit. The Itô average
/// of the random-potential evolution is exactly the deterministic
/// double-commutator dynamics, so this should match [`evolve`] within
/// Monte-Carlo error.
pub fn unraveled_evolve(
    psi0: &StateVector,
    sys: &OpenSystem,
    dt_s: f64,
    steps: usize,
    trajectories: usize,
    seed: u64,
) -> Result<DensityMatrix> {
    if trajectories == 0 {
        return Err(Error::TooFewSamples { got: 0, need: 1 });
    }
    let n = sys.dim();
    let mut acc = CMatrix::zeros(n, n);
    for k in 0..trajectories {
        let psi = unraveled_trajectory(psi0, sys, dt_s, steps, seed, k as u64)?;
        acc += projector(&psi).matrix();
    }
    Ok(DensityMatrix::unchecked(
        acc * linalg::cscale(1.0 / trajectories as f64),
    ))
}

/// Ensemble mean with entrywise Monte-Carlo standard errors and trajectory
/// purity extremes.
#[derive(Debug, Clone, PartialEq)]
pub struct UnravelingStats {
    pub mean: DensityMatrix,
    /// Entrywise standard error of the mean, `√(Σ|x-μ|² / (T(T-1)))`.
    pub standard_error: nalgebra::DMatrix<f64>,
    pub trajectories: usize,
    /// Largest |purity − 1| over the individual trajectories.
    pub max_purity_defect: f64,
}

/// Entrywise Welford accumulator over trajectory projectors. Feeding the
/// same trajectories in the same ascending order gives bit-identical
/// statistics whether the trajectories were computed serially or in
/// parallel.
#[derive(Debug, Clone)]
pub struct UnravelingAccumulator {
    mean: CMatrix,
    m2: nalgebra::DMatrix<f64>,
    count: usize,
    max_purity_defect: f64,
}

impl UnravelingAccumulator {
    pub fn new(dim: usize) -> Self {
        Self {
            mean: CMatrix::zeros(dim, dim),
            m2: nalgebra::DMatrix::zeros(dim, dim),
            count: 0,
            max_purity_defect: 0.0,
        }
    }

    pub fn push(&mut self, psi: &StateVector) {
        let n = self.mean.nrows();
        let norm_sq = psi.norm_sq();
        self.max_purity_defect = self.max_purity_defect.max((norm_sq * norm_sq - 1.0).abs());
        let p = projector(psi);
        self.count += 1;
        let count = self.count as f64;
        for i in 0..n {
            for j in 0..n {
                let x = p.entry(i, j);
                let delta_old = x - self.mean[(i, j)];
                self.mean[(i, j)] += delta_old * linalg::cscale(1.0 / count);
                let delta_new = x - self.mean[(i, j)];
                self.m2[(i, j)] += (delta_old * delta_new.conj()).re;
            }
        }
    }

    pub fn finish(self) -> Result<UnravelingStats> {
        if self.count < 2 {
            return Err(Error::TooFewSamples {
                got: self.count,
                need: 2,
            });
        }
        let t = self.count as f64;
        let standard_error = self.m2.map(|v| libm::sqrt(v.max(0.0) / (t * (t - 1.0))));
        Ok(UnravelingStats {
            mean: DensityMatrix::unchecked(self.mean),
            standard_error,
            trajectories: self.count,
            max_purity_defect: self.max_purity_defect,
        })
    }
}

pub fn unraveled_stats(
    psi0: &StateVector,
    sys: &OpenSystem,
    dt_s: f64,
    steps: usize,
    trajectories: usize,
    seed: u64,
) -> Result<UnravelingStats> {
    if trajectories < 2 {
        return Err(Error::TooFewSamples {
            got: trajectories,
            need: 2,
        });
    }
    let mut acc = UnravelingAccumulator::new(sys.dim());
    for k in 0..trajectories {
        let psi = unraveled_trajectory(psi0, sys, dt_s, steps, seed, k as u64)?;
        acc.push(&psi);
    }
    acc.finish()
}

/// Union lattice of two configurations: positions of `a` in order, then the
/// positions of `b` not already present (exact componentwise match), with
/// per-configuration mass vectors padded by zeros.
pub(crate) fn union_lattice(
    a: &MassConfiguration,
    b: &MassConfiguration,
) -> (Vec<nalgebra::Vector3<f64>>, Vec<f64>, Vec<f64>) {
    let mut positions: Vec<nalgebra::Vector3<f64>> = a.positions();
    let mut mass_a: Vec<f64> = a.masses();
    let mut mass_b: Vec<f64> = alloc::vec![0.0; a.len()];
    for cell in b.cells() {
        if let Some(k) = positions.iter().position(|p| p == &cell.position_m) {
            mass_b[k] = cell.mass_kg;
        } else {
            positions.push(cell.position_m);
            mass_a.push(0.0);
            mass_b.push(cell.mass_kg);
        }
    }
    (positions, mass_a, mass_b)
}

/// Closed-form coherence decay rate between two mass configurations,
/// `(1/2ħ)·Δmᵀ K Δm` with Δm the cell-mass difference on the union lattice
/// and K the regularized Newtonian kernel.
pub fn cat_decay_rate(
    a: &MassConfiguration,
    b: &MassConfiguration,
    sigma_reg_m: f64,
) -> Result<f64> {
    require_positive("sigma_reg", sigma_reg_m)?;
    let (positions, mass_a, mass_b) = union_lattice(a, b);
    let k = newton_kernel_from_positions(&positions, sigma_reg_m)?;
    let delta: Vec<f64> = mass_a
        .iter()
        .zip(&mass_b)
        .map(|(&ma, &mb)| ma - mb)
        .collect();
    let mut quad = 0.0;
    for i in 0..delta.len() {
        for j in 0..delta.len() {
            quad += k[(i, j)] * delta[i] * delta[j];
        }
    }
    let hbar = PhysConstants::codata2018().hbar;
    Ok((quad / (2.0 * hbar)).max(0.0))
}

/// Two-branch superposition of mass configurations as an open system:
/// Hilbert space {|a⟩, |b⟩}, cell-mass couplings `Q_i = diag(m_i^a, m_i^b)`
/// on the union lattice, Newtonian kernel, zero Hamiltonian. Returns the
/// system together with the equal-amplitude cat state.
pub fn two_branch_system(
    a: &MassConfiguration,
    b: &MassConfiguration,
    sigma_reg_m: f64,
) -> Result<(OpenSystem, DensityMatrix)> {
    require_positive("sigma_reg", sigma_reg_m)?;
    let (positions, mass_a, mass_b) = union_lattice(a, b);
    let matrix = newton_kernel_from_positions(&positions, sigma_reg_m)?;
    let kernel = Kernel::from_matrix(matrix, KernelKind::Newton, Some(sigma_reg_m))?;
    let couplings: Vec<HermitianOperator> = mass_a
        .iter()
        .zip(&mass_b)
        .map(|(&ma, &mb)| HermitianOperator::from_diagonal(&[ma, mb], UnitTag::Kilogram))
        .collect();
    let sys = OpenSystem::new(
        HermitianOperator::zero(2, UnitTag::Joule),
        couplings,
        kernel,
        PrefactorConvention::MassDensity,
    )?;
    let cat = projector(&StateVector::equal_pair(2, 0, 1)?);
    Ok((sys, cat))
}

/// Fitted ⟨H⟩ slope together with the instantaneous dissipator formula
/// `-p Σ_ij K_ij tr(H [Q_i, [Q_j, ρ]])` along the trajectory.
#[derive(Debug, Clone, PartialEq)]
pub struct HeatingRate {
    /// Least-squares slope of ⟨H⟩(t), W.
    pub fitted_w: f64,
    /// Instantaneous rate at every recorded state, W.
    pub instantaneous_w: Vec<f64>,
    /// Trapezoidal time average of the instantaneous rate, W.
    pub time_average_w: f64,
}

pub fn heating_rate(sys: &OpenSystem, result: &EvolutionResult) -> Result<HeatingRate> {
    let n = result.times_s.len();
    if n < 10 {
        return Err(Error::TooFewSamples { got: n, need: 10 });
    }
    let energies = result.mean_energies_j();
    let fitted_w = least_squares_slope(&result.times_s, &energies);

    let instantaneous_w: Vec<f64> = result
        .states
        .iter()
        .map(|rho| {
            let d = sys.dissipator_raw(rho.matrix());
            (sys.hamiltonian.matrix() * d).diagonal().sum().re
        })
        .collect();

    let span = result.times_s[n - 1] - result.times_s[0];
    let mut integral = 0.0;
    for k in 1..n {
        let h = result.times_s[k] - result.times_s[k - 1];
        integral += 0.5 * h * (instantaneous_w[k] + instantaneous_w[k - 1]);
    }
    let time_average_w = if span > 0.0 {
        integral / span
    } else {
        instantaneous_w[0]
    };

    Ok(HeatingRate {
        fitted_w,
        instantaneous_w,
        time_average_w,
    })
}

fn least_squares_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let mut num = 0.0;
    let mut den = 0.0;
    for (&x, &y) in xs.iter().zip(ys) {
        num += (x - mx) * (y - my);
        den += (x - mx) * (x - mx);
    }
    num / den
}

/// Log-linear least-squares decay rate of |ρ_kl|(t), restricted to the
/// window where the magnitude sits in `FIT_WINDOW` relative to its initial
/// value.
pub fn fit_decay_rate(times_s: &[f64], magnitudes: &[f64]) -> Result<f64> {
    if times_s.len() != magnitudes.len() {
        return Err(Error::DimensionMismatch {
            expected: times_s.len(),
            got: magnitudes.len(),
        });
    }
    if magnitudes.is_empty() || !(magnitudes[0] > 0.0) || !magnitudes[0].is_finite() {
        return Err(Error::Invalid(
            "decay fit needs a positive initial magnitude",
        ));
    }
    let initial = magnitudes[0];
    let (lo, hi) = (FIT_WINDOW.0 * initial, FIT_WINDOW.1 * initial);
    let mut ts = Vec::new();
    let mut logs = Vec::new();
    for (&t, &m) in times_s.iter().zip(magnitudes) {
        if m >= lo && m <= hi && m > 0.0 {
            ts.push(t);
            logs.push(libm::log(m));
        }
    }
    if ts.len() < 2 {
        return Err(Error::TooFewSamples {
            got: ts.len(),
            need: 2,
        });
    }
    Ok(-least_squares_slope(&ts, &logs))
}
