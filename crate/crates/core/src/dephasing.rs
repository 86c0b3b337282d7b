//! Dephasing from a randomized time flow.
//!
//! A state expanded over energy eigenstates picks up phases
//! `exp(-(i/ħ) E_n (1+δ) t)` where δ is a small random rescaling of the
//! time flow, drawn once per trajectory. Averaging over δ damps the
//! off-diagonal matrix elements by the characteristic function of δ while
//! leaving the diagonal exactly `|c_n|²`: the ensemble looks like a
//! gradually completed, non-selective energy measurement.

use alloc::vec::Vec;

use crate::constants::PhysConstants;
use crate::error::{require_non_negative, Error, Result};
use crate::linalg::{self, CMatrix, CVector, C64};
use crate::qstate::{DensityMatrix, StateVector};
use crate::seeding::{standard_normal, substream, unit_uniform};

const SQRT_3: f64 = 1.732_050_807_568_877_2;

/// Energy eigenvalues with the expansion amplitudes of the initial state.
#[derive(Debug, Clone, PartialEq)]
pub struct EnergySpectrum {
    energies_j: Vec<f64>,
    amplitudes: CVector,
}

impl EnergySpectrum {
    pub fn try_new(energies_j: Vec<f64>, amplitudes: CVector) -> Result<Self> {
        if energies_j.len() != amplitudes.len() {
            return Err(Error::DimensionMismatch {
                expected: energies_j.len(),
                got: amplitudes.len(),
            });
        }
        if energies_j.iter().any(|e| !e.is_finite()) {
            return Err(Error::Invalid("spectrum energies must be finite"));
        }
        let amplitudes = StateVector::try_new(amplitudes)?;
        Ok(Self {
            energies_j,
            amplitudes: amplitudes.amplitudes().clone(),
        })
    }

    pub fn dim(&self) -> usize {
        self.energies_j.len()
    }

    pub fn energies_j(&self) -> &[f64] {
        &self.energies_j
    }

    pub fn amplitudes(&self) -> &CVector {
        &self.amplitudes
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DeltaKind {
    Gaussian,
    Uniform,
}

/// Distribution of the time-flow randomness δ.
///
/// Both kinds share the variance σ²: the uniform variant is supported on
/// [-σ√3, σ√3], so cross-checks between the two are like for like.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DeltaDistribution {
    kind: DeltaKind,
    sigma: f64,
}

impl DeltaDistribution {
    pub fn gaussian(sigma: f64) -> Result<Self> {
        Ok(Self {
            kind: DeltaKind::Gaussian,
            sigma: require_non_negative("sigma", sigma)?,
        })
    }

    pub fn uniform(sigma: f64) -> Result<Self> {
        Ok(Self {
            kind: DeltaKind::Uniform,
            sigma: require_non_negative("sigma", sigma)?,
        })
    }

    pub fn kind(&self) -> DeltaKind {
        self.kind
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn sample(&self, rng: &mut rand_chacha::ChaCha8Rng) -> f64 {
        match self.kind {
            DeltaKind::Gaussian => self.sigma * standard_normal(rng),
            DeltaKind::Uniform => self.sigma * SQRT_3 * (2.0 * unit_uniform(rng) - 1.0),
        }
    }

    /// E[exp(-i u δ)]; real because δ is symmetric.
    pub fn characteristic(&self, u: f64) -> f64 {
        match self.kind {
            DeltaKind::Gaussian => libm::exp(-0.5 * self.sigma * self.sigma * u * u),
            DeltaKind::Uniform => sinc(self.sigma * SQRT_3 * u),
        }
    }
}

fn sinc(x: f64) -> f64 {
    if x.abs() < 1e-8 {
        1.0 - x * x / 6.0
    } else {
        libm::sin(x) / x
    }
}

/// One trajectory: component n becomes `c_n · exp(-(i/ħ) E_n (1+δ) t)`.
pub fn phase_evolve(spec: &EnergySpectrum, delta: f64, t_s: f64) -> StateVector {
    let hbar = PhysConstants::codata2018().hbar;
    let amps = CVector::from_iterator(
        spec.dim(),
        spec.amplitudes()
            .iter()
            .zip(spec.energies_j())
            .map(|(&c, &e)| c * linalg::phase(-e * (1.0 + delta) * t_s / hbar)),
    );
    // Unit-modulus phases preserve the norm.
    StateVector::unchecked(amps)
}

/// Seeded ensemble average of `projector(phase_evolve(...))` over `samples`
/// draws of δ, trajectory k on substream `(seed, k)`.
///
/// Entry (m, n) factorizes as `c_m c̄_n · mean_k exp(-i ω_mn (1+δ_k) t)`, and
/// the average is accumulated in that form, in ascending trajectory order:
/// the diagonal stays exactly `|c_n|²` for every t, distribution and seed.
pub fn ensemble_density(
    spec: &EnergySpectrum,
    dist: &DeltaDistribution,
    t_s: f64,
    samples: usize,
    seed: u64,
) -> Result<DensityMatrix> {
    if samples == 0 {
        return Err(Error::TooFewSamples { got: 0, need: 1 });
    }
    let hbar = PhysConstants::codata2018().hbar;
    let n = spec.dim();
    let deltas: Vec<f64> = (0..samples)
        .map(|k| dist.sample(&mut substream(seed, k as u64)))
        .collect();

    let mut rho = CMatrix::zeros(n, n);
    let amps = spec.amplitudes();
    for m in 0..n {
        rho[(m, m)] = amps[m] * amps[m].conj();
        for j in (m + 1)..n {
            let omega = (spec.energies_j()[m] - spec.energies_j()[j]) / hbar;
            let mut acc = C64::new(0.0, 0.0);
            for &d in &deltas {
                acc += linalg::phase(-omega * (1.0 + d) * t_s);
            }
            let mean = acc * linalg::cscale(1.0 / samples as f64);
            let entry = amps[m] * amps[j].conj() * mean;
            rho[(m, j)] = entry;
            rho[(j, m)] = entry.conj();
        }
    }
    // Hermitian by construction; an average of projectors keeps unit trace
    // and positivity.
    Ok(DensityMatrix::unchecked(rho))
}

/// Closed form of the δ-average: entry (m, n) is
/// `c_m c̄_n · exp(-i ω_mn t) · χ(ω_mn t)` with χ the characteristic
/// function of the δ distribution and ω_mn = (E_m − E_n)/ħ.
pub fn analytic_averaged_density(
    spec: &EnergySpectrum,
    dist: &DeltaDistribution,
    t_s: f64,
) -> DensityMatrix {
    let hbar = PhysConstants::codata2018().hbar;
    let n = spec.dim();
    let amps = spec.amplitudes();
    let mut rho = CMatrix::zeros(n, n);
    for m in 0..n {
        rho[(m, m)] = amps[m] * amps[m].conj();
        for j in (m + 1)..n {
            let omega = (spec.energies_j()[m] - spec.energies_j()[j]) / hbar;
            let damping = dist.characteristic(omega * t_s);
            let entry = amps[m] * amps[j].conj() * linalg::phase(-omega * t_s) * linalg::cscale(damping);
            rho[(m, j)] = entry;
            rho[(j, m)] = entry.conj();
        }
    }
    DensityMatrix::unchecked(rho)
}
