//! Dense complex linear algebra shared by the quantum-state modules.
//!
//! Thin helpers over `nalgebra`; systems here are small (N ≲ 200), so dense
//! storage and full eigendecompositions are the right tool.

use nalgebra::{Complex, DMatrix, DVector};
pub use nalgebra::Normed;

pub type C64 = Complex<f64>;
pub type CMatrix = DMatrix<C64>;
pub type CVector = DVector<C64>;

pub const ONE: C64 = Complex::new(1.0, 0.0);
pub const I: C64 = Complex::new(0.0, 1.0);

/// `e^{iθ}` built from `libm` so it is available without `std`.
#[inline]
pub fn phase(theta: f64) -> C64 {
    Complex::new(libm::cos(theta), libm::sin(theta))
}

#[inline]
pub fn cscale(re: f64) -> C64 {
    Complex::new(re, 0.0)
}

/// `[a, b] = ab - ba`.
pub fn commutator(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a * b - b * a
}

pub fn trace(m: &CMatrix) -> C64 {
    m.diagonal().sum()
}

/// Largest entrywise magnitude of `A - A†`.
pub fn hermiticity_defect(m: &CMatrix) -> f64 {
    let n = m.nrows();
    let mut worst = 0.0_f64;
    for i in 0..n {
        for j in 0..n {
            let d = (m[(i, j)] - m[(j, i)].conj()).norm();
            if d > worst {
                worst = d;
            }
        }
    }
    worst
}

/// `(M + M†)/2`.
pub fn hermitian_part(m: &CMatrix) -> CMatrix {
    let mut out = m.clone();
    let n = m.nrows();
    for i in 0..n {
        for j in 0..n {
            out[(i, j)] = (m[(i, j)] + m[(j, i)].conj()) * cscale(0.5);
        }
    }
    out
}

pub fn max_abs(m: &CMatrix) -> f64 {
    m.iter().map(|c| c.norm()).fold(0.0, f64::max)
}

pub struct HermitianEigen {
    /// Real eigenvalues, unsorted.
    pub values: DVector<f64>,
    /// Matching orthonormal eigenvectors as columns.
    pub vectors: CMatrix,
}

pub fn hermitian_eigen(m: &CMatrix) -> HermitianEigen {
    let se = m.clone().symmetric_eigen();
    HermitianEigen {
        values: se.eigenvalues,
        vectors: se.eigenvectors,
    }
}

pub fn min_eigenvalue(m: &CMatrix) -> f64 {
    hermitian_eigen(m).values.min()
}

/// `exp(-iA)` for Hermitian `A`, via eigendecomposition. Unitary to
/// machine precision, which keeps trajectory purities honest.
pub fn phase_exponential(a: &CMatrix) -> CMatrix {
    let eig = hermitian_eigen(a);
    let d = CVector::from_iterator(eig.values.len(), eig.values.iter().map(|&l| phase(-l)));
    &eig.vectors * CMatrix::from_diagonal(&d) * eig.vectors.adjoint()
}

pub fn sym_eigenvalues(k: &DMatrix<f64>) -> DVector<f64> {
    k.clone().symmetric_eigen().eigenvalues
}

/// Symmetric square root `L` of a real PSD matrix, `LLᵀ = K`; eigenvalues
/// pushed below zero by rounding are clipped.
pub fn psd_sqrt(k: &DMatrix<f64>) -> DMatrix<f64> {
    let se = k.clone().symmetric_eigen();
    let vals = se
        .eigenvalues
        .map(|l| if l > 0.0 { libm::sqrt(l) } else { 0.0 });
    &se.eigenvectors * DMatrix::from_diagonal(&vals) * se.eigenvectors.transpose()
}

/// `A ⊗ B` for the Choi construction.
pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.kronecker(b)
}
