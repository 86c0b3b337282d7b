use std::path::Path;

use gravirrev_core::master_eq::{cat_decay_rate, evolve, fit_decay_rate, two_branch_system};

use crate::error::CliError;
use crate::formats::{self, CatDecayDto, MassConfigDto};
use crate::manifest::RunContext;

pub fn run(
    ctx: &mut RunContext,
    config_a: &Path,
    config_b: &Path,
    sigma_reg: f64,
    oracle: bool,
    t_final: Option<f64>,
    dt: Option<f64>,
) -> Result<(), CliError> {
    ctx.param("sigma_reg", sigma_reg);
    ctx.param("oracle", oracle);

    let a = super::load_json::<MassConfigDto>(ctx, config_a)?.to_config()?;
    let b = super::load_json::<MassConfigDto>(ctx, config_b)?.to_config()?;
    let closed = cat_decay_rate(&a, &b, sigma_reg)?;

    let mut report = CatDecayDto {
        closed_form_rate_hz: closed,
        fitted_rate_hz: None,
        relative_gap: None,
    };

    if oracle {
        if closed <= 0.0 {
            return Err(CliError::Validation(
                "oracle mode needs distinct configurations (closed-form rate is 0)".into(),
            ));
        }
        // Defaults span the fit window [0.05, 0.8]·initial comfortably.
        let t_final = t_final.unwrap_or(3.5 / closed);
        let dt = dt.unwrap_or(0.004 / closed);
        ctx.param("t_final", t_final);
        ctx.param("dt", dt);
        let (sys, cat) = two_branch_system(&a, &b, sigma_reg)?;
        let run = evolve(&cat, &sys, t_final, dt)?;
        let fitted = fit_decay_rate(&run.times_s, &run.abs_entry_series(0, 1))?;
        report.fitted_rate_hz = Some(fitted);
        report.relative_gap = Some((fitted - closed).abs() / closed);
    }

    let json = formats::to_json_line(&report);
    print!("{json}");
    ctx.write_output("cat_decay.json", &json)
}
