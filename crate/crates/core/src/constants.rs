//! Physical constants in SI units and Planck-regime arithmetic.
//!
//! Values are CODATA 2018. `h`, `c` and `k_B` are exact in the 2019 SI;
//! `ħ` is stored as `h/2π` at full f64 precision so the two stay tied to
//! machine accuracy, and the Planck length is derived as `√(ħG/c³)`.

use crate::error::{require_non_negative, require_positive, Result};

/// Immutable bundle of SI constants. Safe to share freely.
#[derive(Debug, Clone, PartialEq)]
pub struct PhysConstants {
    /// Newtonian gravitational constant, m³ kg⁻¹ s⁻².
    pub g: f64,
    /// Reduced Planck constant, J s.
    pub hbar: f64,
    /// Planck constant, J s.
    pub h: f64,
    /// Speed of light, m s⁻¹.
    pub c: f64,
    /// Boltzmann constant, J K⁻¹.
    pub k_b: f64,
    /// Planck length √(ħG/c³), m.
    pub l_planck: f64,
}

/// Black-hole surface entropy and de Broglie comparison report.
#[derive(Debug, Clone, PartialEq)]
pub struct PlanckRegimeReport {
    /// de Broglie wavelength 2πħ/(mv), m.
    pub lambda_m: f64,
    /// The same quantity multiplied by 2π; some sources quote this value
    /// for the identical printed formula, so both readings are reported.
    pub lambda_paper_reading_m: f64,
    /// Planck length, m.
    pub l_planck_m: f64,
    /// lambda_m / l_planck_m.
    pub ratio: f64,
    /// True iff ratio < 1.
    pub sub_planckian: bool,
}

impl PhysConstants {
    /// CODATA 2018 recommended values.
    pub fn codata2018() -> Self {
        let h = 6.626_070_15e-34; // exact
        let hbar = h / core::f64::consts::TAU;
        let g = 6.674_30e-11;
        let c = 299_792_458.0; // exact
        let k_b = 1.380_649e-23; // exact
        let l_planck = libm::sqrt(hbar * g / (c * c * c));
        Self {
            g,
            hbar,
            h,
            c,
            k_b,
            l_planck,
        }
    }

    /// Entropy k_B·A/(4 ℓ_Pl²) of a horizon of area `area_m2`.
    pub fn bekenstein_entropy(&self, area_m2: f64) -> Result<f64> {
        let area = require_non_negative("area", area_m2)?;
        // Grouped so that area = 4 ℓ² returns exactly k_B.
        Ok(self.k_b * (area / (4.0 * self.l_planck * self.l_planck)))
    }

    /// de Broglie wavelength 2πħ/(mv), m.
    pub fn de_broglie_wavelength(&self, mass_kg: f64, speed_mps: f64) -> Result<f64> {
        let m = require_positive("mass", mass_kg)?;
        let v = require_positive("speed", speed_mps)?;
        Ok(core::f64::consts::TAU * self.hbar / (m * v))
    }

    /// Compares the de Broglie wavelength of a moving mass against the
    /// Planck length, under both readings of the wavelength convention.
    pub fn planck_regime_report(&self, mass_kg: f64, speed_mps: f64) -> Result<PlanckRegimeReport> {
        let lambda_m = self.de_broglie_wavelength(mass_kg, speed_mps)?;
        let ratio = lambda_m / self.l_planck;
        Ok(PlanckRegimeReport {
            lambda_m,
            lambda_paper_reading_m: core::f64::consts::TAU * lambda_m,
            l_planck_m: self.l_planck,
            ratio,
            sub_planckian: ratio < 1.0,
        })
    }
}
