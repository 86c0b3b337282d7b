use std::path::Path;

use gravirrev_core::master_eq::evolve;

use crate::error::CliError;
use crate::formats::{self, SystemDto};
use crate::manifest::RunContext;

pub fn run(
    ctx: &mut RunContext,
    system_path: &Path,
    t_final: f64,
    dt: f64,
    observables: Option<&str>,
) -> Result<(), CliError> {
    ctx.param("t_final", t_final);
    ctx.param("dt", dt);

    let dto: SystemDto = super::load_json(ctx, system_path)?;
    let loaded = dto.load()?;

    let pairs = match observables {
        Some(raw) => {
            ctx.param("observables", raw);
            formats::parse_entry_list(raw, loaded.system.dim())?
        }
        None => Vec::new(),
    };

    let result = evolve(&loaded.rho0, &loaded.system, t_final, dt)?;
    let csv = formats::evolution_csv(&result, &pairs);
    if ctx.has_output_dir() {
        ctx.write_output("evolution.csv", &csv)?;
    } else {
        print!("{csv}");
    }
    Ok(())
}
