//! File formats: JSON schemas for states, spectra, mass configurations,
//! kernels and whole systems, plus the CSV writers for time series.
//!
//! Complex matrices serialize as `{"n": N, "re": [[...]], "im": [[...]]}`.
//! All writers emit LF endings and shortest round-trip decimals.

use serde::{Deserialize, Serialize};

use gravirrev_core::dephasing::EnergySpectrum;
use gravirrev_core::kernel::{Kernel, KernelKind, MassCell, MassConfiguration};
use gravirrev_core::master_eq::{
    EvolutionResult, OpenSystem, PrefactorConvention, SuperscatteringMap,
};
use gravirrev_core::qstate::{projector, DensityMatrix, HermitianOperator, StateVector, UnitTag};
use gravirrev_core::sn_solver::SolitonSolution;
use gravirrev_core::{CMatrix, CVector, Complex, DMatrix, Vector3};

use crate::error::CliError;

fn bad(msg: impl Into<String>) -> CliError {
    CliError::Validation(msg.into())
}

// ---------------------------------------------------------------------
// Complex containers
// ---------------------------------------------------------------------

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ComplexMatrixDto {
    pub n: usize,
    pub re: Vec<Vec<f64>>,
    pub im: Vec<Vec<f64>>,
}

impl ComplexMatrixDto {
    pub fn from_matrix(m: &CMatrix) -> Self {
        let n = m.nrows();
        let grab = |part: fn(&Complex<f64>) -> f64| -> Vec<Vec<f64>> {
            (0..n)
                .map(|i| (0..n).map(|j| part(&m[(i, j)])).collect())
                .collect()
        };
        Self {
            n,
            re: grab(|c| c.re),
            im: grab(|c| c.im),
        }
    }

    pub fn to_matrix(&self) -> Result<CMatrix, CliError> {
        let check = |rows: &Vec<Vec<f64>>, name: &str| -> Result<(), CliError> {
            if rows.len() != self.n || rows.iter().any(|r| r.len() != self.n) {
                return Err(bad(format!("matrix `{name}` part is not {0}×{0}", self.n)));
            }
            Ok(())
        };
        check(&self.re, "re")?;
        check(&self.im, "im")?;
        Ok(CMatrix::from_fn(self.n, self.n, |i, j| {
            Complex::new(self.re[i][j], self.im[i][j])
        }))
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ComplexVectorDto {
    pub re: Vec<f64>,
    pub im: Vec<f64>,
}

impl ComplexVectorDto {
    pub fn from_vector(v: &CVector) -> Self {
        Self {
            re: v.iter().map(|c| c.re).collect(),
            im: v.iter().map(|c| c.im).collect(),
        }
    }

    pub fn to_vector(&self) -> Result<CVector, CliError> {
        if self.re.len() != self.im.len() {
            return Err(bad("amplitude re/im lengths differ"));
        }
        Ok(CVector::from_iterator(
            self.re.len(),
            self.re.iter().zip(&self.im).map(|(&r, &i)| Complex::new(r, i)),
        ))
    }
}

// ---------------------------------------------------------------------
// Spectrum
// ---------------------------------------------------------------------

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SpectrumDto {
    #[serde(rename = "energies_J")]
    pub energies_j: Vec<f64>,
    pub amplitudes: ComplexVectorDto,
}

impl SpectrumDto {
    pub fn to_spectrum(&self) -> Result<EnergySpectrum, CliError> {
        Ok(EnergySpectrum::try_new(
            self.energies_j.clone(),
            self.amplitudes.to_vector()?,
        )?)
    }

    pub fn from_spectrum(spec: &EnergySpectrum) -> Self {
        Self {
            energies_j: spec.energies_j().to_vec(),
            amplitudes: ComplexVectorDto::from_vector(spec.amplitudes()),
        }
    }
}

// ---------------------------------------------------------------------
// Mass configurations and kernels
// ---------------------------------------------------------------------

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CellDto {
    pub x_m: f64,
    pub y_m: f64,
    pub z_m: f64,
    pub mass_kg: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MassConfigDto {
    pub label: String,
    pub cells: Vec<CellDto>,
}

impl MassConfigDto {
    pub fn to_config(&self) -> Result<MassConfiguration, CliError> {
        let cells = self
            .cells
            .iter()
            .map(|c| MassCell {
                position_m: Vector3::new(c.x_m, c.y_m, c.z_m),
                mass_kg: c.mass_kg,
            })
            .collect();
        Ok(MassConfiguration::try_new(cells, self.label.clone())?)
    }

    pub fn from_config(config: &MassConfiguration) -> Self {
        Self {
            label: config.label().to_string(),
            cells: config
                .cells()
                .iter()
                .map(|c| CellDto {
                    x_m: c.position_m.x,
                    y_m: c.position_m.y,
                    z_m: c.position_m.z,
                    mass_kg: c.mass_kg,
                })
                .collect(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct KernelDto {
    pub kind: String,
    pub sigma_reg_m: Option<f64>,
    pub matrix: Vec<Vec<f64>>,
}

impl KernelDto {
    pub fn to_kernel(&self) -> Result<Kernel, CliError> {
        let kind = match self.kind.as_str() {
            "newton" => KernelKind::Newton,
            "custom" => KernelKind::Custom,
            other => return Err(bad(format!("unknown kernel kind {other:?}"))),
        };
        let n = self.matrix.len();
        if self.matrix.iter().any(|r| r.len() != n) {
            return Err(bad("kernel matrix is not square"));
        }
        let m = DMatrix::from_fn(n, n, |i, j| self.matrix[i][j]);
        Ok(Kernel::from_matrix(m, kind, self.sigma_reg_m)?)
    }

    pub fn from_kernel(kernel: &Kernel) -> Self {
        let n = kernel.dim();
        Self {
            kind: match kernel.kind() {
                KernelKind::Newton => "newton".into(),
                KernelKind::Custom => "custom".into(),
            },
            sigma_reg_m: kernel.sigma_reg_m(),
            matrix: (0..n)
                .map(|i| (0..n).map(|j| kernel.matrix()[(i, j)]).collect())
                .collect(),
        }
    }
}

// ---------------------------------------------------------------------
// Open systems
// ---------------------------------------------------------------------

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct OperatorDto {
    pub matrix: ComplexMatrixDto,
    /// "J", "kg" or "1".
    pub unit: String,
}

impl OperatorDto {
    pub fn to_operator(&self) -> Result<HermitianOperator, CliError> {
        let unit = match self.unit.as_str() {
            "J" => UnitTag::Joule,
            "kg" => UnitTag::Kilogram,
            "1" => UnitTag::Dimensionless,
            other => return Err(bad(format!("unknown unit tag {other:?}"))),
        };
        Ok(HermitianOperator::try_new(self.matrix.to_matrix()?, unit)?)
    }

    pub fn from_operator(op: &HermitianOperator) -> Self {
        Self {
            matrix: ComplexMatrixDto::from_matrix(op.matrix()),
            unit: match op.unit() {
                UnitTag::Joule => "J".into(),
                UnitTag::Kilogram => "kg".into(),
                UnitTag::Dimensionless => "1".into(),
            },
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum InitialStateDto {
    Pure { amplitudes: ComplexVectorDto },
    Density { density: ComplexMatrixDto },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SystemDto {
    /// "generic" (1/2ħ² prefactor) or "mass_density" (1/2ħ, G in the kernel).
    pub prefactor_convention: String,
    pub hamiltonian: OperatorDto,
    pub couplings: Vec<OperatorDto>,
    pub kernel: KernelDto,
    pub initial_state: InitialStateDto,
}

/// A loaded system: the generator, the initial density matrix, and the
/// initial pure state when the file provided one (trajectory unravelings
/// need it).
pub struct LoadedSystem {
    pub system: OpenSystem,
    pub rho0: DensityMatrix,
    pub psi0: Option<StateVector>,
}

impl SystemDto {
    pub fn load(&self) -> Result<LoadedSystem, CliError> {
        let convention = match self.prefactor_convention.as_str() {
            "generic" => PrefactorConvention::Generic,
            "mass_density" => PrefactorConvention::MassDensity,
            other => return Err(bad(format!("unknown prefactor convention {other:?}"))),
        };
        let hamiltonian = self.hamiltonian.to_operator()?;
        let couplings = self
            .couplings
            .iter()
            .map(|c| c.to_operator())
            .collect::<Result<Vec<_>, _>>()?;
        let kernel = self.kernel.to_kernel()?;
        let system = OpenSystem::new(hamiltonian, couplings, kernel, convention)?;
        let (rho0, psi0) = match &self.initial_state {
            InitialStateDto::Pure { amplitudes } => {
                let psi = StateVector::try_new(amplitudes.to_vector()?)?;
                (projector(&psi), Some(psi))
            }
            InitialStateDto::Density { density } => {
                (DensityMatrix::try_new(density.to_matrix()?)?, None)
            }
        };
        if rho0.dim() != system.dim() {
            return Err(bad(format!(
                "initial state dimension {} does not match the system dimension {}",
                rho0.dim(),
                system.dim()
            )));
        }
        Ok(LoadedSystem { system, rho0, psi0 })
    }

    pub fn from_parts(sys: &OpenSystem, psi0: &StateVector) -> Self {
        Self {
            prefactor_convention: match sys.convention() {
                PrefactorConvention::Generic => "generic".into(),
                PrefactorConvention::MassDensity => "mass_density".into(),
            },
            hamiltonian: OperatorDto::from_operator(sys.hamiltonian()),
            couplings: sys.couplings().iter().map(OperatorDto::from_operator).collect(),
            kernel: KernelDto::from_kernel(sys.kernel()),
            initial_state: InitialStateDto::Pure {
                amplitudes: ComplexVectorDto::from_vector(psi0.amplitudes()),
            },
        }
    }
}

// ---------------------------------------------------------------------
// Report DTOs
// ---------------------------------------------------------------------

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PlanckReportDto {
    pub lambda_m: f64,
    pub lambda_paper_reading_m: f64,
    pub l_planck_m: f64,
    pub ratio: f64,
    pub sub_planckian: bool,
}

impl From<&gravirrev_core::constants::PlanckRegimeReport> for PlanckReportDto {
    fn from(r: &gravirrev_core::constants::PlanckRegimeReport) -> Self {
        Self {
            lambda_m: r.lambda_m,
            lambda_paper_reading_m: r.lambda_paper_reading_m,
            l_planck_m: r.l_planck_m,
            ratio: r.ratio,
            sub_planckian: r.sub_planckian,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BekensteinDto {
    pub area_m2: f64,
    #[serde(rename = "entropy_J_per_K")]
    pub entropy_j_per_k: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CatDecayDto {
    pub closed_form_rate_hz: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fitted_rate_hz: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub relative_gap: Option<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct NoiseCheckDto {
    pub cells: usize,
    pub dt_s: f64,
    pub steps_per_trajectory: usize,
    pub trajectories: usize,
    pub increments: usize,
    pub seed: u64,
    /// max |estimate − ħ·K·dt| over entries.
    pub max_abs_error: f64,
    /// max relative error over entries.
    pub max_rel_error: f64,
    pub mean_rel_error: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct UnravelDto {
    pub dim: usize,
    pub trajectories: usize,
    pub steps: usize,
    pub dt_s: f64,
    pub seed: u64,
    pub max_abs_deviation: f64,
    /// Largest entrywise 3× Monte-Carlo standard error.
    pub max_allowed_3se: f64,
    /// max over entries of deviation / (3·SE).
    pub deviation_over_3se: f64,
    pub within_3se: bool,
    pub max_purity_defect: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SolitonSummaryDto {
    pub mass_kg: f64,
    #[serde(rename = "energy_eigenvalue_J")]
    pub energy_eigenvalue_j: f64,
    #[serde(rename = "binding_energy_J")]
    pub binding_energy_j: f64,
    pub iterations: usize,
    pub residual: f64,
    pub dimensionless_eigenvalue: f64,
}

// ---------------------------------------------------------------------
// Writers
// ---------------------------------------------------------------------

pub fn to_json_line<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report DTOs serialize");
    s.push('\n');
    s
}

/// CSV of an evolution run: diagnostics plus requested matrix entries.
pub fn evolution_csv(result: &EvolutionResult, observables: &[(usize, usize)]) -> String {
    let mut header = String::from("t_s,trace,purity,min_eig,energy_J");
    for (m, n) in observables {
        header.push_str(&format!(",rho_{m}_{n}_re,rho_{m}_{n}_im"));
    }
    let mut out = header;
    out.push('\n');
    for (k, state) in result.states.iter().enumerate() {
        let d = &result.diagnostics[k];
        let trace: f64 = (0..state.dim()).map(|i| state.entry(i, i).re).sum();
        out.push_str(&format!(
            "{},{},{},{},{}",
            result.times_s[k], trace, d.purity, d.min_eigenvalue, d.mean_energy_j
        ));
        for &(m, n) in observables {
            let e = state.entry(m, n);
            out.push_str(&format!(",{},{}", e.re, e.im));
        }
        out.push('\n');
    }
    out
}

/// Long-format CSV of selected density-matrix entries over time.
pub fn entry_series_csv(rows: &[(f64, usize, usize, Complex<f64>)]) -> String {
    let mut out = String::from("t_s,entry_m,entry_n,re,im,abs\n");
    for &(t, m, n, c) in rows {
        let abs = (c.re * c.re + c.im * c.im).sqrt();
        out.push_str(&format!("{},{},{},{},{},{}\n", t, m, n, c.re, c.im, abs));
    }
    out
}

/// CSV of a soliton solution: radius, reduced wavefunction, potential.
pub fn soliton_csv(sol: &SolitonSolution) -> String {
    let mut out = String::from("r_m,u,phi_J\n");
    for (k, &r) in sol.grid.points_m().iter().enumerate() {
        out.push_str(&format!("{},{},{}\n", r, sol.u[k], sol.potential_j[k]));
    }
    out
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SuperscatteringDto {
    pub dim: usize,
    pub t_s: f64,
    /// Input and output indices are row-major: (m, n) ↦ m·N + n.
    pub basis_ordering: String,
    pub matrix: ComplexMatrixDto,
}

pub fn superscattering_to_dto(map: &SuperscatteringMap) -> SuperscatteringDto {
    SuperscatteringDto {
        dim: map.dim(),
        t_s: map.t_s(),
        basis_ordering: "row-major: (m,n) -> m*N+n".into(),
        matrix: ComplexMatrixDto::from_matrix(map.matrix()),
    }
}

/// Parses an entry list like "0,1;1,2".
pub fn parse_entry_list(raw: &str, dim: usize) -> Result<Vec<(usize, usize)>, CliError> {
    let mut out = Vec::new();
    for part in raw.split(';').filter(|p| !p.trim().is_empty()) {
        let mut it = part.split(',');
        let (m, n) = (it.next(), it.next());
        if it.next().is_some() {
            return Err(bad(format!("bad entry {part:?}: expected m,n")));
        }
        let parse = |s: Option<&str>| -> Result<usize, CliError> {
            s.map(str::trim)
                .filter(|s| !s.is_empty())
                .ok_or_else(|| bad(format!("bad entry {part:?}: expected m,n")))?
                .parse()
                .map_err(|_| bad(format!("bad entry {part:?}: expected integers")))
        };
        let (m, n) = (parse(m)?, parse(n)?);
        if m >= dim || n >= dim {
            return Err(bad(format!(
                "entry ({m},{n}) is outside a dimension-{dim} system"
            )));
        }
        out.push((m, n));
    }
    if out.is_empty() {
        return Err(bad("empty entry list"));
    }
    Ok(out)
}
