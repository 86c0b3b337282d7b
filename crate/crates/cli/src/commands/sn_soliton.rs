use gravirrev_core::constants::PhysConstants;
use gravirrev_core::sn_solver::{solve_ground_state, RadialGrid};

use crate::error::CliError;
use crate::formats::{self, SolitonSummaryDto};
use crate::manifest::RunContext;

pub fn run(
    ctx: &mut RunContext,
    mass_kg: f64,
    n_points: usize,
    r_max_dimensionless: f64,
    tol: f64,
    max_iter: usize,
) -> Result<(), CliError> {
    ctx.param("mass_kg", mass_kg);
    ctx.param("n_points", n_points as u64);
    ctx.param("r_max_dimensionless", r_max_dimensionless);
    ctx.param("tol", tol);
    ctx.param("max_iter", max_iter as u64);
    if !(mass_kg > 0.0 && mass_kg.is_finite()) {
        return Err(CliError::Validation(format!(
            "mass-kg must be finite and > 0, got {mass_kg}"
        )));
    }
    if !(r_max_dimensionless > 0.0 && r_max_dimensionless.is_finite()) {
        return Err(CliError::Validation(format!(
            "r-max-dimensionless must be finite and > 0, got {r_max_dimensionless}"
        )));
    }

    let c = PhysConstants::codata2018();
    let length_unit = c.hbar * c.hbar / (c.g * mass_kg.powi(3));
    let grid = RadialGrid::uniform(r_max_dimensionless * length_unit, n_points)?;
    let sol = solve_ground_state(mass_kg, &grid, tol, max_iter)?;
    if sol.coarse_grid {
        eprintln!(
            "warning: grid does not resolve the soliton (width needs ≥ 50 points and the tail must drop below 1e-6 of the peak); increase n-points or adjust r-max-dimensionless"
        );
    }

    let json = formats::to_json_line(&SolitonSummaryDto {
        mass_kg,
        energy_eigenvalue_j: sol.energy_eigenvalue_j,
        binding_energy_j: sol.binding_energy_j,
        iterations: sol.iterations,
        residual: sol.residual,
        dimensionless_eigenvalue: sol.dimensionless_eigenvalue,
    });
    print!("{json}");
    ctx.write_output("soliton.json", &json)?;

    let csv = formats::soliton_csv(&sol);
    if ctx.has_output_dir() {
        ctx.write_output("soliton.csv", &csv)?;
    }
    Ok(())
}
