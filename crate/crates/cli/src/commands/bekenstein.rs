use gravirrev_core::constants::PhysConstants;

use crate::error::CliError;
use crate::formats::{self, BekensteinDto};
use crate::manifest::RunContext;

pub fn run(ctx: &mut RunContext, area_m2: f64) -> Result<(), CliError> {
    ctx.param("area_m2", area_m2);
    let entropy = PhysConstants::codata2018().bekenstein_entropy(area_m2)?;
    let json = formats::to_json_line(&BekensteinDto {
        area_m2,
        entropy_j_per_k: entropy,
    });
    print!("{json}");
    ctx.write_output("bekenstein.json", &json)
}
