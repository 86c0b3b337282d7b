//! Command-line front door for the gravirrev experiments.
//!
//! Every subcommand is deterministic: stochastic ones take a mandatory
//! seed, outputs are JSON (summaries) and CSV (series) with LF endings and
//! shortest round-trip decimals, and when `--output-dir` is given a run
//! manifest records all parameters and input content hashes alongside the
//! artifacts.

pub mod cli;
pub mod commands;
pub mod error;
pub mod formats;
pub mod manifest;

pub use error::CliError;

use cli::{Cli, Command};
use manifest::RunContext;

pub fn run(args: Cli) -> Result<(), CliError> {
    let output_dir = args.output_dir;
    match args.command {
        Command::Planck { mass_kg, speed_mps } => {
            let mut ctx = RunContext::new("planck", output_dir);
            commands::planck::run(&mut ctx, mass_kg, speed_mps)?;
            ctx.finish()
        }
        Command::Bekenstein { area_m2 } => {
            let mut ctx = RunContext::new("bekenstein", output_dir);
            commands::bekenstein::run(&mut ctx, area_m2)?;
            ctx.finish()
        }
        Command::Dephase {
            spectrum,
            sigma,
            dist,
            t_max,
            t_steps,
            samples,
            seed,
            analytic,
            entries,
        } => {
            let mut ctx = RunContext::new("dephase", output_dir);
            commands::dephase::run(
                &mut ctx,
                &spectrum,
                sigma,
                dist,
                t_max,
                t_steps,
                samples,
                seed,
                analytic,
                entries.as_deref(),
            )?;
            ctx.finish()
        }
        Command::Evolve {
            system,
            t_final,
            dt,
            observables,
        } => {
            let mut ctx = RunContext::new("evolve", output_dir);
            commands::evolve::run(&mut ctx, &system, t_final, dt, observables.as_deref())?;
            ctx.finish()
        }
        Command::CatDecay {
            config_a,
            config_b,
            sigma_reg,
            oracle,
            t_final,
            dt,
        } => {
            let mut ctx = RunContext::new("cat-decay", output_dir);
            commands::cat_decay::run(&mut ctx, &config_a, &config_b, sigma_reg, oracle, t_final, dt)?;
            ctx.finish()
        }
        Command::NoiseCheck {
            config,
            sigma_reg,
            dt,
            steps,
            samples,
            seed,
        } => {
            let mut ctx = RunContext::new("noise-check", output_dir);
            commands::noise_check::run(&mut ctx, &config, sigma_reg, dt, steps, samples, seed)?;
            ctx.finish()
        }
        Command::Unravel {
            system,
            dt,
            steps,
            trajectories,
            seed,
        } => {
            let mut ctx = RunContext::new("unravel", output_dir);
            commands::unravel::run(&mut ctx, &system, dt, steps, trajectories, seed)?;
            ctx.finish()
        }
        Command::SnSoliton {
            mass_kg,
            n_points,
            r_max_dimensionless,
            tol,
            max_iter,
        } => {
            let mut ctx = RunContext::new("sn-soliton", output_dir);
            commands::sn_soliton::run(&mut ctx, mass_kg, n_points, r_max_dimensionless, tol, max_iter)?;
            ctx.finish()
        }
    }
}

/// Worker-count cap from the environment; the default is machine
/// parallelism.
pub fn init_thread_pool() -> Result<(), CliError> {
    if let Ok(raw) = std::env::var("GRAVIRREV_THREADS") {
        let n: usize = raw
            .parse()
            .map_err(|_| CliError::Validation(format!("GRAVIRREV_THREADS must be a positive integer, got {raw:?}")))?;
        if n == 0 {
            return Err(CliError::Validation(
                "GRAVIRREV_THREADS must be ≥ 1".into(),
            ));
        }
        // A second initialization in the same process keeps the first pool.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    Ok(())
}
