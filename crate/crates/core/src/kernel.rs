//! Mass configurations, positive symmetric kernels and correlated noise.
//!
//! The Newtonian kernel regularizes 1/|x−y| by Gaussian smearing of each
//! cell with width σ: `K_ij = G·erf(d_ij/2σ)/d_ij`, `K_ii = G/(σ√π)`.
//! This is the mutual Coulomb energy of smeared unit densities, so the
//! matrix is positive definite for pairwise distinct cells and the cutoff
//! is the single extra parameter the construction needs.
//!
//! White-in-time noise is discretized in the Itô convention: one
//! independent Gaussian increment per step with covariance `ħ·K·dt`
//! (or `K·dt` without the ħ scaling).

use alloc::vec::Vec;

use nalgebra::{DMatrix, DVector, Vector3};
use rand_chacha::ChaCha8Rng;

use crate::constants::PhysConstants;
use crate::error::{require_positive, Error, Result};
use crate::linalg::psd_sqrt;
use crate::seeding::{standard_normal, substream};

/// Relative tolerance for kernel symmetry.
pub const SYMMETRY_TOL: f64 = 1e-12;
/// PSD floor, relative to the spectral radius: SI kernels span many orders
/// of magnitude, so the tolerance must scale with the matrix.
pub const PSD_TOL: f64 = 1e-10;

/// One lattice cell of a discretized mass density.
#[derive(Debug, Clone, PartialEq)]
pub struct MassCell {
    pub position_m: Vector3<f64>,
    pub mass_kg: f64,
}

/// Lattice of point cells representing a mass density.
#[derive(Debug, Clone, PartialEq)]
pub struct MassConfiguration {
    cells: Vec<MassCell>,
    label: alloc::string::String,
}

impl MassConfiguration {
    pub fn try_new(
        cells: Vec<MassCell>,
        label: impl Into<alloc::string::String>,
    ) -> Result<Self> {
        if cells.is_empty() {
            return Err(Error::Invalid("mass configuration needs at least one cell"));
        }
        for cell in &cells {
            require_positive("cell mass", cell.mass_kg)?;
            if !cell.position_m.iter().all(|x| x.is_finite()) {
                return Err(Error::Invalid("cell positions must be finite"));
            }
        }
        Ok(Self {
            cells,
            label: label.into(),
        })
    }

    pub fn cells(&self) -> &[MassCell] {
        &self.cells
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn positions(&self) -> Vec<Vector3<f64>> {
        self.cells.iter().map(|c| c.position_m).collect()
    }

    pub fn masses(&self) -> Vec<f64> {
        self.cells.iter().map(|c| c.mass_kg).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KernelKind {
    Newton,
    Custom,
}

/// Symmetric positive-semidefinite coupling matrix between cells.
#[derive(Debug, Clone, PartialEq)]
pub struct Kernel {
    matrix: DMatrix<f64>,
    kind: KernelKind,
    sigma_reg_m: Option<f64>,
}

impl Kernel {
    /// Validates symmetry (relative 1e-12) and positive semidefiniteness
    /// (min eigenvalue ≥ −1e-10 × spectral radius), naming the offending
    /// eigenvalue on rejection.
    pub fn from_matrix(
        matrix: DMatrix<f64>,
        kind: KernelKind,
        sigma_reg_m: Option<f64>,
    ) -> Result<Self> {
        if matrix.nrows() != matrix.ncols() || matrix.is_empty() {
            return Err(Error::DimensionMismatch {
                expected: matrix.nrows(),
                got: matrix.ncols(),
            });
        }
        if matrix.iter().any(|x| !x.is_finite()) {
            return Err(Error::Invalid("kernel entries must be finite"));
        }
        let scale = matrix.iter().fold(0.0_f64, |acc, &x| acc.max(x.abs()));
        let mut asym = 0.0_f64;
        for i in 0..matrix.nrows() {
            for j in (i + 1)..matrix.ncols() {
                asym = asym.max((matrix[(i, j)] - matrix[(j, i)]).abs());
            }
        }
        if !(asym <= SYMMETRY_TOL * scale.max(f64::MIN_POSITIVE)) {
            return Err(Error::NotHermitian {
                max_asymmetry: asym,
                tol: SYMMETRY_TOL * scale,
            });
        }
        let eigs = crate::linalg::sym_eigenvalues(&matrix);
        let min_eig = eigs.min();
        let max_eig = eigs.max();
        let floor = -PSD_TOL * max_eig.max(0.0);
        if !(min_eig >= floor) {
            return Err(Error::NotPositiveSemidefinite {
                min_eigenvalue: min_eig,
                floor,
            });
        }
        Ok(Self {
            matrix,
            kind,
            sigma_reg_m,
        })
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn kind(&self) -> KernelKind {
        self.kind
    }

    pub fn sigma_reg_m(&self) -> Option<f64> {
        self.sigma_reg_m
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    /// `L·√(scale·dt)` with `LLᵀ = K`; rows of noise are `L_scaled·z`.
    pub(crate) fn noise_factor(&self, scale: f64, dt_s: f64) -> DMatrix<f64> {
        psd_sqrt(&self.matrix) * libm::sqrt(scale * dt_s)
    }
}

/// Radial profile h(r) for generic kernels; h(r) = h(−r) holds by
/// construction since only distances enter.
#[derive(Debug, Clone, PartialEq)]
pub enum RadialProfile {
    /// `amplitude · exp(-r²/2ℓ²)`.
    GaussianBump { amplitude: f64, length_m: f64 },
    Constant(f64),
    /// Piecewise-linear table over radius, clamped at both ends.
    Tabulated { radii_m: Vec<f64>, values: Vec<f64> },
}

impl RadialProfile {
    fn validate(&self) -> Result<()> {
        match self {
            RadialProfile::GaussianBump { amplitude, length_m } => {
                if !amplitude.is_finite() {
                    return Err(Error::Invalid("profile amplitude must be finite"));
                }
                require_positive("profile length", *length_m)?;
            }
            RadialProfile::Constant(c) => {
                if !c.is_finite() {
                    return Err(Error::Invalid("profile constant must be finite"));
                }
            }
            RadialProfile::Tabulated { radii_m, values } => {
                if radii_m.len() != values.len() || radii_m.len() < 2 {
                    return Err(Error::Invalid("profile table needs ≥ 2 matching points"));
                }
                if radii_m.windows(2).any(|w| !(w[1] > w[0])) {
                    return Err(Error::Invalid("profile radii must be strictly increasing"));
                }
                if radii_m.iter().chain(values.iter()).any(|x| !x.is_finite()) {
                    return Err(Error::Invalid("profile table must be finite"));
                }
            }
        }
        Ok(())
    }

    pub fn eval(&self, r_m: f64) -> f64 {
        let r = r_m.abs();
        match self {
            RadialProfile::GaussianBump { amplitude, length_m } => {
                let x = r / length_m;
                amplitude * libm::exp(-0.5 * x * x)
            }
            RadialProfile::Constant(c) => *c,
            RadialProfile::Tabulated { radii_m, values } => {
                if r <= radii_m[0] {
                    return values[0];
                }
                if r >= radii_m[radii_m.len() - 1] {
                    return values[values.len() - 1];
                }
                let k = radii_m.partition_point(|&x| x < r);
                let (r0, r1) = (radii_m[k - 1], radii_m[k]);
                let w = (r - r0) / (r1 - r0);
                values[k - 1] * (1.0 - w) + values[k] * w
            }
        }
    }
}

pub(crate) fn newton_kernel_from_positions(
    positions: &[Vector3<f64>],
    sigma_reg_m: f64,
) -> Result<DMatrix<f64>> {
    let sigma = require_positive("sigma_reg", sigma_reg_m)?;
    let g = PhysConstants::codata2018().g;
    let n = positions.len();
    let diagonal = g / (sigma * libm::sqrt(core::f64::consts::PI));
    let mut k = DMatrix::zeros(n, n);
    for i in 0..n {
        k[(i, i)] = diagonal;
        for j in (i + 1)..n {
            let d = (positions[i] - positions[j]).norm();
            if d == 0.0 {
                return Err(Error::DegenerateConfiguration { i, j });
            }
            let v = g * libm::erf(d / (2.0 * sigma)) / d;
            k[(i, j)] = v;
            k[(j, i)] = v;
        }
    }
    Ok(k)
}

/// Regularized Newtonian kernel `G·erf(d/2σ)/d` over the cells of a mass
/// configuration.
pub fn build_newton_kernel(config: &MassConfiguration, sigma_reg_m: f64) -> Result<Kernel> {
    let matrix = newton_kernel_from_positions(&config.positions(), sigma_reg_m)?;
    Kernel::from_matrix(matrix, KernelKind::Newton, Some(sigma_reg_m))
}

/// Generic kernel `K_ij = h(|x_i − x_j|)`; rejected unless positive
/// semidefinite.
pub fn build_custom_kernel(positions: &[Vector3<f64>], h: &RadialProfile) -> Result<Kernel> {
    if positions.is_empty() {
        return Err(Error::Invalid("custom kernel needs at least one position"));
    }
    h.validate()?;
    let n = positions.len();
    let mut k = DMatrix::zeros(n, n);
    for i in 0..n {
        k[(i, i)] = h.eval(0.0);
        for j in (i + 1)..n {
            let v = h.eval((positions[i] - positions[j]).norm());
            k[(i, j)] = v;
            k[(j, i)] = v;
        }
    }
    Kernel::from_matrix(k, KernelKind::Custom, None)
}

/// Time series of potential impulses `W_i = ∫φ_i dt` over each step.
#[derive(Debug, Clone, PartialEq)]
pub struct NoiseTrajectory {
    dt_s: f64,
    /// steps × N matrix; row s is the increment vector of step s.
    increments: DMatrix<f64>,
    seed: u64,
}

impl NoiseTrajectory {
    pub fn dt_s(&self) -> f64 {
        self.dt_s
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn n_steps(&self) -> usize {
        self.increments.nrows()
    }

    pub fn n_cells(&self) -> usize {
        self.increments.ncols()
    }

    pub fn increments(&self) -> &DMatrix<f64> {
        &self.increments
    }

    pub fn step(&self, s: usize) -> DVector<f64> {
        self.increments.row(s).transpose()
    }
}

pub(crate) fn noise_rows(
    l_scaled: &DMatrix<f64>,
    steps: usize,
    rng: &mut ChaCha8Rng,
) -> DMatrix<f64> {
    let n = l_scaled.nrows();
    let mut rows = DMatrix::zeros(steps, n);
    for s in 0..steps {
        let z = DVector::from_iterator(n, (0..n).map(|_| standard_normal(rng)));
        let w = l_scaled * z;
        for (i, &v) in w.iter().enumerate() {
            rows[(s, i)] = v;
        }
    }
    rows
}

/// Zero-mean Gaussian increments, independent across steps, with per-step
/// covariance `ħ·K·dt` when `hbar_scaling` is set (`K·dt` otherwise).
/// Identical `(seed, substream)` reproduce the trajectory bit for bit.
pub fn sample_noise_substream(
    kernel: &Kernel,
    hbar_scaling: bool,
    dt_s: f64,
    steps: usize,
    seed: u64,
    stream: u64,
) -> Result<NoiseTrajectory> {
    require_positive("dt", dt_s)?;
    if steps == 0 {
        return Err(Error::TooFewSamples { got: 0, need: 1 });
    }
    let scale = if hbar_scaling {
        PhysConstants::codata2018().hbar
    } else {
        1.0
    };
    let l = kernel.noise_factor(scale, dt_s);
    let mut rng = substream(seed, stream);
    let increments = noise_rows(&l, steps, &mut rng);
    Ok(NoiseTrajectory {
        dt_s,
        increments,
        seed,
    })
}

/// [`sample_noise_substream`] on substream 0.
pub fn sample_noise(
    kernel: &Kernel,
    hbar_scaling: bool,
    dt_s: f64,
    steps: usize,
    seed: u64,
) -> Result<NoiseTrajectory> {
    sample_noise_substream(kernel, hbar_scaling, dt_s, steps, seed, 0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seeding::unit_uniform;

    fn consts() -> PhysConstants {
        PhysConstants::codata2018()
    }

    fn pair_config(d: f64) -> MassConfiguration {
        MassConfiguration::try_new(
            vec![
                MassCell {
                    position_m: Vector3::new(0.0, 0.0, 0.0),
                    mass_kg: 1e-17,
                },
                MassCell {
                    position_m: Vector3::new(d, 0.0, 0.0),
                    mass_kg: 1e-17,
                },
            ],
            "pair",
        )
        .unwrap()
    }

    #[test]
    fn newton_kernel_far_field_is_bare_newton() {
        let sigma = 1e-9;
        let d = 1e-3;
        let k = build_newton_kernel(&pair_config(d), sigma).unwrap();
        let bare = consts().g / d;
        assert!((k.matrix()[(0, 1)] - bare).abs() / bare < 1e-6);
    }

    #[test]
    fn newton_kernel_diagonal_is_coincidence_limit() {
        let sigma = 3e-8;
        let k = build_newton_kernel(&pair_config(1e-7), sigma).unwrap();
        let expected = consts().g / (sigma * libm::sqrt(core::f64::consts::PI));
        assert_eq!(k.matrix()[(0, 0)], expected);
        assert_eq!(k.matrix()[(1, 1)], expected);
    }

    #[test]
    fn newton_kernel_decreases_with_distance() {
        let sigma = 2e-8;
        let mut last = f64::INFINITY;
        for k in 1..60 {
            let d = 1e-8 * k as f64;
            let kernel = build_newton_kernel(&pair_config(d), sigma).unwrap();
            let v = kernel.matrix()[(0, 1)];
            assert!(v < last);
            last = v;
        }
    }

    #[test]
    fn newton_kernel_rejects_bad_inputs() {
        let cfg = pair_config(1e-7);
        assert!(matches!(
            build_newton_kernel(&cfg, 0.0),
            Err(Error::Domain { .. })
        ));
        let coincident = MassConfiguration::try_new(
            vec![
                MassCell {
                    position_m: Vector3::new(1.0, 2.0, 3.0),
                    mass_kg: 1.0,
                },
                MassCell {
                    position_m: Vector3::new(1.0, 2.0, 3.0),
                    mass_kg: 2.0,
                },
            ],
            "degenerate",
        )
        .unwrap();
        assert!(matches!(
            build_newton_kernel(&coincident, 1e-8),
            Err(Error::DegenerateConfiguration { i: 0, j: 1 })
        ));
    }

    #[test]
    fn random_configurations_give_psd_kernels() {
        // Coulomb energy of Gaussian-smeared densities is positive definite;
        // the eigenvalue check in the constructor enforces it numerically.
        for seed in 0..100 {
            let mut rng = substream(seed, 0);
            let cells: Vec<MassCell> = (0..10)
                .map(|_| MassCell {
                    position_m: Vector3::new(
                        1e-6 * unit_uniform(&mut rng),
                        1e-6 * unit_uniform(&mut rng),
                        1e-6 * unit_uniform(&mut rng),
                    ),
                    mass_kg: 1e-18 * (0.5 + unit_uniform(&mut rng)),
                })
                .collect();
            let config = MassConfiguration::try_new(cells, "random").unwrap();
            let sigma = 1e-8 * (0.5 + 4.0 * unit_uniform(&mut rng));
            let kernel = build_newton_kernel(&config, sigma).unwrap();
            let eigs = crate::linalg::sym_eigenvalues(kernel.matrix());
            assert!(eigs.min() >= -PSD_TOL * eigs.max());
        }
    }

    #[test]
    fn custom_kernel_accepts_zero_and_gaussian_profiles() {
        let positions = [
            Vector3::new(0.0, 0.0, 0.0),
            Vector3::new(1e-7, 0.0, 0.0),
            Vector3::new(0.0, 2e-7, 0.0),
        ];
        let zero = build_custom_kernel(&positions, &RadialProfile::Constant(0.0)).unwrap();
        assert!(zero.matrix().iter().all(|&x| x == 0.0));

        let bump = RadialProfile::GaussianBump {
            amplitude: 3.0,
            length_m: 1.5e-7,
        };
        let k = build_custom_kernel(&positions, &bump).unwrap();
        assert_eq!(k.matrix()[(0, 0)], 3.0);
        assert_eq!(k.kind(), KernelKind::Custom);
    }

    #[test]
    fn custom_kernel_rejects_negative_definite_profile() {
        let positions = [Vector3::new(0.0, 0.0, 0.0), Vector3::new(1e-7, 0.0, 0.0)];
        let err = build_custom_kernel(&positions, &RadialProfile::Constant(-1.0)).unwrap_err();
        match err {
            Error::NotPositiveSemidefinite { min_eigenvalue, .. } => {
                assert!(min_eigenvalue < -0.5);
            }
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn tabulated_profile_interpolates_and_clamps() {
        let table = RadialProfile::Tabulated {
            radii_m: vec![0.0, 1.0, 2.0],
            values: vec![4.0, 2.0, 1.0],
        };
        assert_eq!(table.eval(0.0), 4.0);
        assert_eq!(table.eval(0.5), 3.0);
        assert_eq!(table.eval(5.0), 1.0);
        assert_eq!(table.eval(-0.5), table.eval(0.5));
    }

    #[test]
    fn factorization_reproduces_kernel() {
        let kernel = build_newton_kernel(&pair_config(5e-8), 2e-8).unwrap();
        let l = kernel.noise_factor(1.0, 1.0);
        let err = (&l * l.transpose() - kernel.matrix()).norm();
        assert!(err <= 1e-10 * kernel.matrix().norm());
    }

    #[test]
    fn large_sigma_flattens_the_kernel() {
        let d = 1e-7;
        let cfg = pair_config(d);
        let k = build_newton_kernel(&cfg, 1e-3).unwrap();
        let m = k.matrix();
        let spread = (m[(0, 0)] - m[(0, 1)]).abs() / m[(0, 0)];
        assert!(spread < 1e-6);
    }

    #[test]
    fn noise_is_deterministic_per_seed() {
        let kernel = build_newton_kernel(&pair_config(6e-8), 2e-8).unwrap();
        let a = sample_noise(&kernel, true, 0.5, 32, 42).unwrap();
        let b = sample_noise(&kernel, true, 0.5, 32, 42).unwrap();
        let c = sample_noise(&kernel, true, 0.5, 32, 43).unwrap();
        assert_eq!(a.increments(), b.increments());
        assert_ne!(a.increments(), c.increments());
    }

    #[test]
    fn noise_mean_and_covariance_match_specification() {
        let sigma = 2e-8;
        let d = 4e-8; // comparable to sigma so all entries share an order of magnitude
        let positions_cfg = MassConfiguration::try_new(
            vec![
                MassCell {
                    position_m: Vector3::new(0.0, 0.0, 0.0),
                    mass_kg: 1e-17,
                },
                MassCell {
                    position_m: Vector3::new(d, 0.0, 0.0),
                    mass_kg: 1e-17,
                },
                MassCell {
                    position_m: Vector3::new(0.0, d, 0.0),
                    mass_kg: 1e-17,
                },
            ],
            "triangle",
        )
        .unwrap();
        let kernel = build_newton_kernel(&positions_cfg, sigma).unwrap();
        let dt = 0.25;
        let steps = 100_000;
        let traj = sample_noise(&kernel, true, dt, steps, 7).unwrap();
        let hbar = consts().hbar;
        let n = kernel.dim();

        // Zero mean within 4 σ_i/√steps per component.
        for i in 0..n {
            let mean: f64 =
                (0..steps).map(|s| traj.increments()[(s, i)]).sum::<f64>() / steps as f64;
            let std_i = libm::sqrt(hbar * kernel.matrix()[(i, i)] * dt);
            assert!(mean.abs() < 4.0 * std_i / libm::sqrt(steps as f64));
        }

        // Entrywise covariance within 5 % of ħ·K·dt.
        for i in 0..n {
            for j in 0..n {
                let est: f64 = (0..steps)
                    .map(|s| traj.increments()[(s, i)] * traj.increments()[(s, j)])
                    .sum::<f64>()
                    / steps as f64;
                let expected = hbar * kernel.matrix()[(i, j)] * dt;
                assert!(
                    (est - expected).abs() <= 0.05 * expected.abs(),
                    "entry ({i},{j}): {est} vs {expected}"
                );
            }
        }
    }

    #[test]
    fn noise_without_hbar_scaling_drops_the_prefactor() {
        let kernel = build_newton_kernel(&pair_config(5e-8), 2e-8).unwrap();
        let dt = 0.1;
        let steps = 50_000;
        let traj = sample_noise(&kernel, false, dt, steps, 3).unwrap();
        let est: f64 = (0..steps)
            .map(|s| traj.increments()[(s, 0)] * traj.increments()[(s, 0)])
            .sum::<f64>()
            / steps as f64;
        let expected = kernel.matrix()[(0, 0)] * dt;
        assert!((est - expected).abs() <= 0.05 * expected);
    }

    #[test]
    fn noise_rejects_bad_arguments() {
        let kernel = build_newton_kernel(&pair_config(5e-8), 2e-8).unwrap();
        assert!(sample_noise(&kernel, true, 0.0, 10, 1).is_err());
        assert!(sample_noise(&kernel, true, 0.1, 0, 1).is_err());
    }
}
