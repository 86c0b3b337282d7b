//! Finite-dimensional quantum-state containers.
//!
//! Dense complex matrices only; the models in this crate are few-level
//! pointer bases and small lattices, so there is no sparse representation.
//! Invariant tolerances are module constants, overridable per call when a
//! long integration needs its drift measured rather than rejected.

use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix, CVector, C64};

/// Entrywise tolerance for Hermiticity checks.
pub const HERMITICITY_TOL: f64 = 1e-10;
/// Tolerance on Σ|c_n|² − 1 and on tr ρ − 1.
pub const NORM_TOL: f64 = 1e-10;
/// Lowest admissible density-matrix eigenvalue.
pub const POSITIVITY_FLOOR: f64 = -1e-8;

/// Declared physical unit of an operator's entries.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UnitTag {
    /// Energies (Hamiltonians).
    Joule,
    /// Cell-mass operators coupling to the Newton potential.
    Kilogram,
    /// Generic dimensionless couplings.
    Dimensionless,
}

impl core::fmt::Display for UnitTag {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        let s = match self {
            UnitTag::Joule => "J",
            UnitTag::Kilogram => "kg",
            UnitTag::Dimensionless => "1",
        };
        f.write_str(s)
    }
}

/// Tolerances for density-matrix validation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MatrixTolerances {
    pub hermiticity: f64,
    pub trace: f64,
    pub positivity_floor: f64,
}

impl Default for MatrixTolerances {
    fn default() -> Self {
        Self {
            hermiticity: HERMITICITY_TOL,
            trace: NORM_TOL,
            positivity_floor: POSITIVITY_FLOOR,
        }
    }
}

/// Normalized pure state, Σ|c_n|² = 1.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    amplitudes: CVector,
}

impl StateVector {
    pub fn try_new(amplitudes: CVector) -> Result<Self> {
        Self::with_tolerance(amplitudes, NORM_TOL)
    }

    pub fn with_tolerance(amplitudes: CVector, tol: f64) -> Result<Self> {
        if amplitudes.is_empty() {
            return Err(Error::Invalid("state vector needs at least one amplitude"));
        }
        let norm_sq: f64 = amplitudes.iter().map(|c| c.norm_sqr()).sum();
        if !((norm_sq - 1.0).abs() <= tol) {
            return Err(Error::NotNormalized { norm_sq, tol });
        }
        Ok(Self { amplitudes })
    }

    /// Construction path for routines that preserve the norm exactly
    /// (unit-modulus phases, unitary steps).
    pub(crate) fn unchecked(amplitudes: CVector) -> Self {
        Self { amplitudes }
    }

    /// Basis vector e_k.
    pub fn basis_state(dim: usize, k: usize) -> Result<Self> {
        if k >= dim || dim == 0 {
            return Err(Error::DimensionMismatch {
                expected: dim,
                got: k,
            });
        }
        let mut v = CVector::zeros(dim);
        v[k] = linalg::ONE;
        Ok(Self { amplitudes: v })
    }

    /// (e_i + e_j)/√2.
    pub fn equal_pair(dim: usize, i: usize, j: usize) -> Result<Self> {
        if i >= dim || j >= dim || i == j {
            return Err(Error::Invalid("pair superposition needs two distinct indices"));
        }
        let mut v = CVector::zeros(dim);
        let amp = linalg::cscale(1.0 / libm::sqrt(2.0));
        v[i] = amp;
        v[j] = amp;
        Ok(Self { amplitudes: v })
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &CVector {
        &self.amplitudes
    }

    pub fn norm_sq(&self) -> f64 {
        self.amplitudes.iter().map(|c| c.norm_sqr()).sum()
    }
}

/// Hermitian, unit-trace, positive-semidefinite matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    entries: CMatrix,
}

impl DensityMatrix {
    pub fn try_new(entries: CMatrix) -> Result<Self> {
        Self::with_tolerances(entries, &MatrixTolerances::default())
    }

    pub fn with_tolerances(entries: CMatrix, tol: &MatrixTolerances) -> Result<Self> {
        if entries.nrows() != entries.ncols() || entries.is_empty() {
            return Err(Error::DimensionMismatch {
                expected: entries.nrows(),
                got: entries.ncols(),
            });
        }
        let defect = linalg::hermiticity_defect(&entries);
        if !(defect <= tol.hermiticity) {
            return Err(Error::NotHermitian {
                max_asymmetry: defect,
                tol: tol.hermiticity,
            });
        }
        let tr = linalg::trace(&entries);
        if !((tr.re - 1.0).abs() <= tol.trace && tr.im.abs() <= tol.trace) {
            return Err(Error::TraceNotOne {
                trace: tr.re,
                tol: tol.trace,
            });
        }
        let min_eig = linalg::min_eigenvalue(&entries);
        if !(min_eig >= tol.positivity_floor) {
            return Err(Error::NotPositiveSemidefinite {
                min_eigenvalue: min_eig,
                floor: tol.positivity_floor,
            });
        }
        Ok(Self { entries })
    }

    /// Construction path for generators that preserve the invariants by
    /// structure (projectors, averages of projectors, integrator steps whose
    /// drift is recorded separately).
    pub(crate) fn unchecked(entries: CMatrix) -> Self {
        Self { entries }
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.entries
    }

    pub fn into_matrix(self) -> CMatrix {
        self.entries
    }

    pub fn entry(&self, m: usize, n: usize) -> C64 {
        self.entries[(m, n)]
    }
}

/// Hermitian operator with a declared unit.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianOperator {
    entries: CMatrix,
    unit: UnitTag,
}

impl HermitianOperator {
    pub fn try_new(entries: CMatrix, unit: UnitTag) -> Result<Self> {
        Self::with_tolerance(entries, unit, HERMITICITY_TOL)
    }

    pub fn with_tolerance(entries: CMatrix, unit: UnitTag, tol: f64) -> Result<Self> {
        if entries.nrows() != entries.ncols() || entries.is_empty() {
            return Err(Error::DimensionMismatch {
                expected: entries.nrows(),
                got: entries.ncols(),
            });
        }
        let defect = linalg::hermiticity_defect(&entries);
        if !(defect <= tol) {
            return Err(Error::NotHermitian {
                max_asymmetry: defect,
                tol,
            });
        }
        Ok(Self { entries, unit })
    }

    pub fn zero(dim: usize, unit: UnitTag) -> Self {
        Self {
            entries: CMatrix::zeros(dim, dim),
            unit,
        }
    }

    /// Real diagonal operator.
    pub fn from_diagonal(diag: &[f64], unit: UnitTag) -> Self {
        let v = CVector::from_iterator(diag.len(), diag.iter().map(|&d| linalg::cscale(d)));
        Self {
            entries: CMatrix::from_diagonal(&v),
            unit,
        }
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.entries
    }

    pub fn unit(&self) -> UnitTag {
        self.unit
    }
}

/// |state⟩⟨state|.
pub fn projector(state: &StateVector) -> DensityMatrix {
    let a = state.amplitudes();
    let n = a.len();
    let mut m = CMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            m[(i, j)] = a[i] * a[j].conj();
        }
    }
    // Hermitian, rank one and unit trace by construction.
    DensityMatrix::unchecked(m)
}

/// tr(ρ²); for Hermitian ρ this equals the squared Frobenius norm.
pub fn purity(rho: &DensityMatrix) -> f64 {
    rho.matrix().iter().map(|c| c.norm_sqr()).sum()
}

/// Purity of a raw Hermitian matrix (integrator diagnostics).
pub(crate) fn purity_raw(m: &CMatrix) -> f64 {
    m.iter().map(|c| c.norm_sqr()).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seeding::{standard_normal, substream};
    use nalgebra::{Complex, Normed};

    pub fn random_state(dim: usize, seed: u64) -> StateVector {
        let mut rng = substream(seed, 0);
        let mut v = CVector::from_iterator(
            dim,
            (0..dim).map(|_| Complex::new(standard_normal(&mut rng), standard_normal(&mut rng))),
        );
        let norm: f64 = libm::sqrt(v.iter().map(|c| c.norm_sqr()).sum());
        v /= linalg::cscale(norm);
        StateVector::try_new(v).unwrap()
    }

    fn random_hermitian(dim: usize, seed: u64) -> CMatrix {
        let mut rng = substream(seed, 1);
        let raw = CMatrix::from_fn(dim, dim, |_, _| {
            Complex::new(standard_normal(&mut rng), standard_normal(&mut rng))
        });
        linalg::hermitian_part(&raw)
    }

    #[test]
    fn projector_of_basis_state() {
        let s = StateVector::basis_state(3, 0).unwrap();
        let p = projector(&s);
        assert_eq!(p.entry(0, 0), Complex::new(1.0, 0.0));
        for (i, j) in [(0, 1), (1, 1), (2, 2), (1, 2)] {
            assert_eq!(p.entry(i, j), Complex::new(0.0, 0.0));
        }
    }

    #[test]
    fn projector_of_equal_superposition() {
        let s = StateVector::equal_pair(2, 0, 1).unwrap();
        let p = projector(&s);
        for i in 0..2 {
            for j in 0..2 {
                assert!((p.entry(i, j) - Complex::new(0.5, 0.0)).norm() < 1e-15);
            }
        }
    }

    #[test]
    fn projectors_are_pure_and_idempotent_on_their_state() {
        for seed in 0..6 {
            let s = random_state(4, seed);
            let p = projector(&s);
            assert!((purity(&p) - 1.0).abs() < 1e-12);
            // ρ|s⟩ = |s⟩ and applying ρ twice changes nothing.
            let once = p.matrix() * s.amplitudes();
            let twice = p.matrix() * &once;
            assert!((&once - s.amplitudes()).iter().map(|c| c.norm()).fold(0.0, f64::max) < 1e-12);
            assert!((&twice - &once).iter().map(|c| c.norm()).fold(0.0, f64::max) < 1e-12);
        }
    }

    #[test]
    fn purity_examples() {
        let mixed = DensityMatrix::try_new(
            CMatrix::identity(2, 2) * linalg::cscale(0.5),
        )
        .unwrap();
        assert!((purity(&mixed) - 0.5).abs() < 1e-15);

        let diag = DensityMatrix::try_new(CMatrix::from_diagonal(&CVector::from_iterator(
            2,
            [0.8, 0.2].iter().map(|&p| linalg::cscale(p)),
        )))
        .unwrap();
        assert!((purity(&diag) - 0.68).abs() < 1e-15);
    }

    #[test]
    fn purity_is_invariant_under_unitary_conjugation() {
        for seed in 0..5 {
            let rho = {
                // Mixture of two random projectors.
                let p1 = projector(&random_state(4, 10 + seed));
                let p2 = projector(&random_state(4, 20 + seed));
                DensityMatrix::try_new(
                    p1.matrix() * linalg::cscale(0.6) + p2.matrix() * linalg::cscale(0.4),
                )
                .unwrap()
            };
            let u = linalg::phase_exponential(&random_hermitian(4, 30 + seed));
            let rotated = DensityMatrix::try_new(&u * rho.matrix() * u.adjoint()).unwrap();
            assert!((purity(&rotated) - purity(&rho)).abs() < 1e-12);
        }
    }

    #[test]
    fn invariants_are_enforced() {
        // Non-normalized state.
        let v = CVector::from_iterator(2, [Complex::new(0.9, 0.0), Complex::new(0.0, 0.0)]);
        assert!(matches!(
            StateVector::try_new(v),
            Err(Error::NotNormalized { .. })
        ));

        // Non-Hermitian density matrix.
        let mut m = CMatrix::identity(2, 2) * linalg::cscale(0.5);
        m[(0, 1)] = Complex::new(0.3, 0.0);
        assert!(matches!(
            DensityMatrix::try_new(m),
            Err(Error::NotHermitian { .. })
        ));

        // Wrong trace.
        let m = CMatrix::identity(2, 2);
        assert!(matches!(
            DensityMatrix::try_new(m),
            Err(Error::TraceNotOne { .. })
        ));

        // Negative eigenvalue.
        let m = CMatrix::from_diagonal(&CVector::from_iterator(
            2,
            [1.2, -0.2].iter().map(|&p| linalg::cscale(p)),
        ));
        assert!(matches!(
            DensityMatrix::try_new(m),
            Err(Error::NotPositiveSemidefinite { .. })
        ));

        // Per-call override accepts what the default rejects.
        let m = CMatrix::from_diagonal(&CVector::from_iterator(
            2,
            [1.2, -0.2].iter().map(|&p| linalg::cscale(p)),
        ));
        let relaxed = MatrixTolerances {
            positivity_floor: -0.3,
            ..Default::default()
        };
        assert!(DensityMatrix::with_tolerances(m, &relaxed).is_ok());

        // Non-Hermitian operator.
        let mut m = CMatrix::zeros(2, 2);
        m[(0, 1)] = Complex::new(0.0, 1.0);
        m[(1, 0)] = Complex::new(0.0, 1.0);
        assert!(HermitianOperator::try_new(m, UnitTag::Joule).is_err());
    }
}
