use std::path::Path;

use rayon::prelude::*;

use gravirrev_core::linalg::Normed;
use gravirrev_core::master_eq::{evolve, unraveled_trajectory, UnravelingAccumulator};

use crate::error::CliError;
use crate::formats::{self, SystemDto, UnravelDto};
use crate::manifest::RunContext;

/// Trajectories run in parallel on deterministic substreams; the ordered
/// Welford reduction makes the result bit-identical to a serial run.
pub fn run(
    ctx: &mut RunContext,
    system_path: &Path,
    dt: f64,
    steps: usize,
    trajectories: usize,
    seed: u64,
) -> Result<(), CliError> {
    ctx.param("dt", dt);
    ctx.param("steps", steps as u64);
    ctx.param("trajectories", trajectories as u64);
    ctx.seed(seed);
    if trajectories < 2 {
        return Err(CliError::Validation("trajectories must be ≥ 2".into()));
    }

    let dto: SystemDto = super::load_json(ctx, system_path)?;
    let loaded = dto.load()?;
    let psi0 = loaded.psi0.ok_or_else(|| {
        CliError::Validation("unravel needs a pure initial state in the system file".into())
    })?;
    let sys = loaded.system;

    let finished: Vec<_> = (0..trajectories)
        .into_par_iter()
        .map(|k| unraveled_trajectory(&psi0, &sys, dt, steps, seed, k as u64))
        .collect::<Result<Vec<_>, _>>()?;
    let mut acc = UnravelingAccumulator::new(sys.dim());
    for psi in &finished {
        acc.push(psi);
    }
    let stats = acc.finish()?;

    let t_final = dt * steps as f64;
    let det = evolve(&loaded.rho0, &sys, t_final, dt)?;
    let fin = det.final_state();

    let n = sys.dim();
    let mut max_dev = 0.0_f64;
    let mut max_3se = 0.0_f64;
    let mut worst_ratio = 0.0_f64;
    for i in 0..n {
        for j in 0..n {
            let dev = (stats.mean.entry(i, j) - fin.entry(i, j)).norm();
            let allowed = 3.0 * stats.standard_error[(i, j)];
            max_dev = max_dev.max(dev);
            max_3se = max_3se.max(allowed);
            worst_ratio = worst_ratio.max(dev / allowed.max(1e-15));
        }
    }

    let json = formats::to_json_line(&UnravelDto {
        dim: n,
        trajectories,
        steps,
        dt_s: dt,
        seed,
        max_abs_deviation: max_dev,
        max_allowed_3se: max_3se,
        deviation_over_3se: worst_ratio,
        within_3se: worst_ratio <= 1.0,
        max_purity_defect: stats.max_purity_defect,
    });
    print!("{json}");
    ctx.write_output("unravel.json", &json)
}
