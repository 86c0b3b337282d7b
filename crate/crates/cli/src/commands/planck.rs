use gravirrev_core::constants::PhysConstants;

use crate::error::CliError;
use crate::formats::{self, PlanckReportDto};
use crate::manifest::RunContext;

pub fn run(ctx: &mut RunContext, mass_kg: f64, speed_mps: f64) -> Result<(), CliError> {
    ctx.param("mass_kg", mass_kg);
    ctx.param("speed_mps", speed_mps);
    let report = PhysConstants::codata2018().planck_regime_report(mass_kg, speed_mps)?;
    let json = formats::to_json_line(&PlanckReportDto::from(&report));
    print!("{json}");
    ctx.write_output("planck.json", &json)
}
