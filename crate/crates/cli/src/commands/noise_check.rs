use std::path::Path;

use gravirrev_core::constants::PhysConstants;
use gravirrev_core::kernel::{build_newton_kernel, sample_noise_substream};

use crate::error::CliError;
use crate::formats::{self, MassConfigDto, NoiseCheckDto};
use crate::manifest::RunContext;

/// Samples `samples` independent trajectories of `steps` increments each and
/// compares the pooled second moment against the specified ħ·K·dt.
pub fn run(
    ctx: &mut RunContext,
    config_path: &Path,
    sigma_reg: f64,
    dt: f64,
    steps: usize,
    samples: usize,
    seed: u64,
) -> Result<(), CliError> {
    ctx.param("sigma_reg", sigma_reg);
    ctx.param("dt", dt);
    ctx.param("steps", steps as u64);
    ctx.param("samples", samples as u64);
    ctx.seed(seed);
    if samples == 0 {
        return Err(CliError::Validation("samples must be ≥ 1".into()));
    }

    let config = super::load_json::<MassConfigDto>(ctx, config_path)?.to_config()?;
    let kernel = build_newton_kernel(&config, sigma_reg)?;
    let n = kernel.dim();
    let hbar = PhysConstants::codata2018().hbar;

    let mut second = vec![vec![0.0_f64; n]; n];
    for traj in 0..samples {
        let noise = sample_noise_substream(&kernel, true, dt, steps, seed, traj as u64)?;
        for s in 0..steps {
            for i in 0..n {
                let wi = noise.increments()[(s, i)];
                for j in 0..n {
                    second[i][j] += wi * noise.increments()[(s, j)];
                }
            }
        }
    }
    let count = (samples * steps) as f64;

    let mut max_abs = 0.0_f64;
    let mut max_rel = 0.0_f64;
    let mut sum_rel = 0.0_f64;
    for i in 0..n {
        for j in 0..n {
            let est = second[i][j] / count;
            let expected = hbar * kernel.matrix()[(i, j)] * dt;
            let abs = (est - expected).abs();
            let rel = abs / expected.abs().max(f64::MIN_POSITIVE);
            max_abs = max_abs.max(abs);
            max_rel = max_rel.max(rel);
            sum_rel += rel;
        }
    }

    let json = formats::to_json_line(&NoiseCheckDto {
        cells: n,
        dt_s: dt,
        steps_per_trajectory: steps,
        trajectories: samples,
        increments: samples * steps,
        seed,
        max_abs_error: max_abs,
        max_rel_error: max_rel,
        mean_rel_error: sum_rel / (n * n) as f64,
    });
    print!("{json}");
    ctx.write_output("noise_check.json", &json)
}
