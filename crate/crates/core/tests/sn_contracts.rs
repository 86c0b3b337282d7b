//! The self-consistent grid solver against the independent shooting route.

use gravirrev_core::constants::PhysConstants;
use gravirrev_core::oracles::sn_shooting_ground_state;
use gravirrev_core::sn_solver::{solve_ground_state, RadialGrid};

fn length_unit(mass: f64) -> f64 {
    let c = PhysConstants::codata2018();
    c.hbar * c.hbar / (c.g * mass * mass * mass)
}

#[test]
fn scf_eigenvalue_matches_the_shooting_oracle() {
    let shot = sn_shooting_ground_state(1e-3, 30.0);
    let mass = 1e-17;
    let grid = RadialGrid::uniform(40.0 * length_unit(mass), 2000).unwrap();
    let sol = solve_ground_state(mass, &grid, 1e-8, 400).unwrap();
    let rel = (sol.dimensionless_eigenvalue - shot.eigenvalue).abs() / shot.eigenvalue.abs();
    assert!(
        rel < 1e-4,
        "scf {} vs shooting {} (rel {rel})",
        sol.dimensionless_eigenvalue,
        shot.eigenvalue
    );
    assert!(!sol.coarse_grid);
}

#[test]
fn mass_scaling_is_exact_on_matched_grids() {
    let m1 = 1e-17;
    let m2 = 2e-17;
    let n = 2000;
    let sol1 = solve_ground_state(
        m1,
        &RadialGrid::uniform(40.0 * length_unit(m1), n).unwrap(),
        1e-8,
        400,
    )
    .unwrap();
    let sol2 = solve_ground_state(
        m2,
        &RadialGrid::uniform(40.0 * length_unit(m2), n).unwrap(),
        1e-8,
        400,
    )
    .unwrap();
    let ratio = sol2.energy_eigenvalue_j / sol1.energy_eigenvalue_j;
    assert!((ratio - 32.0).abs() / 32.0 < 0.01, "energy ratio {ratio}");
    // Matched rescaled grids solve the identical dimensionless problem.
    assert!(
        (sol1.dimensionless_eigenvalue - sol2.dimensionless_eigenvalue).abs()
            < 1e-12 * sol1.dimensionless_eigenvalue.abs()
    );
}
