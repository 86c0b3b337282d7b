use std::path::Path;

use gravirrev_core::dephasing::{
    analytic_averaged_density, ensemble_density, DeltaDistribution,
};
use gravirrev_core::Complex;

use crate::cli::DistKind;
use crate::error::CliError;
use crate::formats::{self, SpectrumDto};
use crate::manifest::RunContext;

#[allow(clippy::too_many_arguments)]
pub fn run(
    ctx: &mut RunContext,
    spectrum_path: &Path,
    sigma: f64,
    dist: DistKind,
    t_max: f64,
    t_steps: usize,
    samples: Option<usize>,
    seed: Option<u64>,
    analytic: bool,
    entries: Option<&str>,
) -> Result<(), CliError> {
    ctx.param("sigma", sigma);
    ctx.param("dist", match dist {
        DistKind::Gaussian => "gaussian",
        DistKind::Uniform => "uniform",
    });
    ctx.param("t_max", t_max);
    ctx.param("t_steps", t_steps as u64);
    ctx.param("analytic", analytic);

    let spec = load_spectrum(ctx, spectrum_path)?;
    let delta = match dist {
        DistKind::Gaussian => DeltaDistribution::gaussian(sigma)?,
        DistKind::Uniform => DeltaDistribution::uniform(sigma)?,
    };
    if !(t_max > 0.0 && t_max.is_finite()) {
        return Err(CliError::Validation(format!(
            "t-max must be finite and > 0, got {t_max}"
        )));
    }
    if t_steps == 0 {
        return Err(CliError::Validation("t-steps must be ≥ 1".into()));
    }

    let pairs = match entries {
        Some(raw) => {
            ctx.param("entries", raw);
            formats::parse_entry_list(raw, spec.dim())?
        }
        None => upper_triangle(spec.dim()),
    };

    let (samples, seed) = if analytic {
        (0, 0)
    } else {
        let samples = samples.ok_or_else(|| {
            CliError::Validation("--samples is required unless --analytic is set".into())
        })?;
        let seed = seed.ok_or_else(|| {
            CliError::Validation("--seed is required unless --analytic is set".into())
        })?;
        ctx.param("samples", samples as u64);
        ctx.seed(seed);
        (samples, seed)
    };

    let mut rows = Vec::with_capacity(t_steps * pairs.len());
    for j in 1..=t_steps {
        let t = t_max * j as f64 / t_steps as f64;
        let rho = if analytic {
            analytic_averaged_density(&spec, &delta, t)
        } else {
            ensemble_density(&spec, &delta, t, samples, seed)?
        };
        for &(m, n) in &pairs {
            let c: Complex<f64> = rho.entry(m, n);
            rows.push((t, m, n, c));
        }
    }

    let csv = formats::entry_series_csv(&rows);
    if ctx.has_output_dir() {
        ctx.write_output("dephase.csv", &csv)?;
    } else {
        print!("{csv}");
    }
    Ok(())
}

fn load_spectrum(
    ctx: &mut RunContext,
    path: &Path,
) -> Result<gravirrev_core::dephasing::EnergySpectrum, CliError> {
    let dto: SpectrumDto = super::load_json(ctx, path)?;
    dto.to_spectrum()
}

fn upper_triangle(dim: usize) -> Vec<(usize, usize)> {
    let mut pairs = Vec::new();
    for m in 0..dim {
        for n in m..dim {
            pairs.push((m, n));
        }
    }
    pairs
}
