//! Argument grammar.

use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(
    name = "gravirrev",
    version,
    about = "Numerical experiments on gravity-related irreversibility: dephasing ensembles, double-commutator master equations with Newtonian noise, stochastic unraveling, and Schrödinger–Newton ground states"
)]
pub struct Cli {
    /// Write outputs plus a run manifest into this directory.
    #[arg(long, global = true, value_name = "DIR")]
    pub output_dir: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum DistKind {
    Gaussian,
    Uniform,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Compare the de Broglie wavelength of a moving mass with the Planck length.
    Planck {
        #[arg(long)]
        mass_kg: f64,
        #[arg(long)]
        speed_mps: f64,
    },
    /// Horizon-area entropy k_B·A/(4ℓ²).
    Bekenstein {
        #[arg(long)]
        area_m2: f64,
    },
    /// Time series of the random-time dephasing ensemble of a spectrum.
    Dephase {
        /// Spectrum JSON: {"energies_J": [...], "amplitudes": {"re": [...], "im": [...]}}.
        #[arg(long)]
        spectrum: PathBuf,
        /// Spread of the time-flow randomness δ.
        #[arg(long)]
        sigma: f64,
        #[arg(long, value_enum)]
        dist: DistKind,
        #[arg(long)]
        t_max: f64,
        /// Number of report times t_max/t_steps … t_max.
        #[arg(long)]
        t_steps: usize,
        /// Trajectories per ensemble (required unless --analytic).
        #[arg(long)]
        samples: Option<usize>,
        /// Ensemble seed (required unless --analytic).
        #[arg(long)]
        seed: Option<u64>,
        /// Evaluate the closed-form average instead of sampling.
        #[arg(long)]
        analytic: bool,
        /// Density-matrix entries to report, e.g. "0,1;1,2" (default: upper triangle).
        #[arg(long)]
        entries: Option<String>,
    },
    /// Integrate the double-commutator master equation of a system file.
    Evolve {
        #[arg(long)]
        system: PathBuf,
        #[arg(long)]
        t_final: f64,
        #[arg(long)]
        dt: f64,
        /// Extra matrix entries for the CSV, e.g. "0,0;0,1".
        #[arg(long)]
        observables: Option<String>,
    },
    /// Coherence decay rate between two mass configurations.
    CatDecay {
        #[arg(long)]
        config_a: PathBuf,
        #[arg(long)]
        config_b: PathBuf,
        /// Gaussian regularization width of the Newtonian kernel, m.
        #[arg(long)]
        sigma_reg: f64,
        /// Also fit the rate from an integrated two-branch run.
        #[arg(long)]
        oracle: bool,
        /// Oracle horizon (default 3.5 / closed-form rate).
        #[arg(long)]
        t_final: Option<f64>,
        /// Oracle step (default 0.004 / closed-form rate).
        #[arg(long)]
        dt: Option<f64>,
    },
    /// Sample correlated noise and report its covariance error.
    NoiseCheck {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        sigma_reg: f64,
        #[arg(long)]
        dt: f64,
        /// Steps per trajectory.
        #[arg(long)]
        steps: usize,
        /// Number of trajectories.
        #[arg(long)]
        samples: usize,
        #[arg(long)]
        seed: u64,
    },
    /// Average stochastic-potential trajectories and compare against the
    /// deterministic integration.
    Unravel {
        #[arg(long)]
        system: PathBuf,
        #[arg(long)]
        dt: f64,
        #[arg(long)]
        steps: usize,
        #[arg(long)]
        trajectories: usize,
        #[arg(long)]
        seed: u64,
    },
    /// Self-bound Schrödinger–Newton ground state.
    SnSoliton {
        #[arg(long)]
        mass_kg: f64,
        #[arg(long)]
        n_points: usize,
        /// Grid extent in units of the expected width ħ²/(Gm³).
        #[arg(long)]
        r_max_dimensionless: f64,
        /// Relative eigenvalue tolerance, in (0, 1e-4].
        #[arg(long)]
        tol: f64,
        /// Self-consistency iteration cap.
        #[arg(long, default_value_t = 400)]
        max_iter: usize,
    },
}
