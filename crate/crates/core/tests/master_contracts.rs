//! Cross-checks of the master-equation stack against independent routes:
//! exact diagonalization, pointer-basis closed forms, and the stochastic
//! unraveling.

use gravirrev_core::constants::PhysConstants;
use gravirrev_core::kernel::{MassCell, MassConfiguration};
use gravirrev_core::linalg::{self, Normed};
use gravirrev_core::master_eq::{
    cat_decay_rate, evolve, fit_decay_rate, heating_rate, superscattering_map, two_branch_system,
    unraveled_stats, TRACE_BUDGET,
};
use gravirrev_core::oracles::{
    hopping_chain_system, pointer_decay_rate, random_open_system, random_pointer_system,
    random_unitary_system, unitary_conjugation,
};
use gravirrev_core::qstate::{projector, purity, StateVector};
use gravirrev_core::Vector3;

fn hbar() -> f64 {
    PhysConstants::codata2018().hbar
}

fn cat_fixture() -> (MassConfiguration, MassConfiguration, f64) {
    let mass = 1e-17;
    let a = MassConfiguration::try_new(
        vec![MassCell {
            position_m: Vector3::new(0.0, 0.0, 0.0),
            mass_kg: mass,
        }],
        "left",
    )
    .unwrap();
    let b = MassConfiguration::try_new(
        vec![MassCell {
            position_m: Vector3::new(1e-7, 0.0, 0.0),
            mass_kg: mass,
        }],
        "right",
    )
    .unwrap();
    (a, b, 2e-8)
}

#[test]
fn zero_kernel_evolution_matches_the_diagonalization_oracle() {
    for seed in 0..20 {
        let (sys, rho0) = random_unitary_system(seed, 1.0);
        // Horizon chosen so the total Hamiltonian action stays ≤ 10.
        let t = 10.0 * sys.hbar() / sys.hamiltonian().matrix().norm();
        let dt = t / 2000.0;
        let run = evolve(&rho0, &sys, t, dt).unwrap();
        let exact = unitary_conjugation(sys.hamiltonian(), &rho0, t);
        let dev = linalg::max_abs(&(run.final_state().matrix() - &exact));
        assert!(dev < 1e-8, "seed {seed}: deviation {dev}");
    }
}

#[test]
fn randomized_systems_keep_trace_and_positivity() {
    for seed in 0..20 {
        let (sys, rho0) = random_open_system(seed, 1.0, 1.0);
        let run = evolve(&rho0, &sys, 2.0, 0.002).unwrap();
        for d in &run.diagnostics {
            assert!(d.trace_drift <= TRACE_BUDGET, "seed {seed}");
            assert!(d.min_eigenvalue >= -1e-8, "seed {seed}: {}", d.min_eigenvalue);
        }
    }
}

#[test]
fn pointer_basis_sweep_matches_the_closed_form_within_a_tenth_percent() {
    for seed in 0..20 {
        let (sys, rho0, k, l) = random_pointer_system(seed);
        let lambda = pointer_decay_rate(&sys, k, l);
        assert!((lambda - 1.0).abs() < 1e-10, "fixture normalizes Λ to 1");
        let run = evolve(&rho0, &sys, 3.5, 0.004).unwrap();
        let fitted = fit_decay_rate(&run.times_s, &run.abs_entry_series(k, l)).unwrap();
        assert!(
            (fitted - lambda).abs() / lambda < 1e-3,
            "seed {seed}: fitted {fitted} vs {lambda}"
        );
    }
}

#[test]
fn cat_decay_closed_form_matches_the_integrated_rate() {
    let (a, b, sigma) = cat_fixture();
    let closed = cat_decay_rate(&a, &b, sigma).unwrap();
    let (sys, cat) = two_branch_system(&a, &b, sigma).unwrap();
    let run = evolve(&cat, &sys, 3.5 / closed, 0.004 / closed).unwrap();
    let fitted = fit_decay_rate(&run.times_s, &run.abs_entry_series(0, 1)).unwrap();
    assert!(
        (fitted - closed).abs() / closed < 1e-3,
        "fitted {fitted} vs closed form {closed}"
    );
}

#[test]
fn unraveling_matches_deterministic_evolution_within_monte_carlo_error() {
    let (a, b, sigma) = cat_fixture();
    let (sys, cat) = two_branch_system(&a, &b, sigma).unwrap();
    let rate = cat_decay_rate(&a, &b, sigma).unwrap();
    let psi0 = StateVector::equal_pair(2, 0, 1).unwrap();
    let steps = 100;
    let dt = 0.01 / rate;
    let stats = unraveled_stats(&psi0, &sys, dt, steps, 1000, 20260810).unwrap();
    assert!(stats.max_purity_defect < 1e-10);

    let t_final = dt * steps as f64;
    let det = evolve(&cat, &sys, t_final, dt).unwrap();
    let fin = det.final_state();
    let mut max_se = 0.0_f64;
    for i in 0..2 {
        for j in 0..2 {
            let dev = (stats.mean.entry(i, j) - fin.entry(i, j)).norm();
            let se = stats.standard_error[(i, j)];
            max_se = max_se.max(se);
            assert!(dev <= 3.0 * se + 1e-12, "entry ({i},{j}): dev {dev}, se {se}");
        }
    }

    // The deterministic answer must sit firmly below the statistical floor:
    // halving dt may move it by at most 10 % of 3·SE.
    let det_half = evolve(&cat, &sys, t_final, dt / 2.0).unwrap();
    let shift = linalg::max_abs(&(det.final_state().matrix() - det_half.final_state().matrix()));
    assert!(
        shift <= 0.1 * 3.0 * max_se,
        "dt sensitivity {shift} vs floor {}",
        3.0 * max_se
    );
}

#[test]
fn heating_rate_matches_its_instantaneous_formula_on_the_chain() {
    let (sys, rho0) = hopping_chain_system(4, 1e-7, 1e-16, 3e-8, hbar() * 1.0, &[0.0; 4]);
    let run = evolve(&rho0, &sys, 2.0, 0.001).unwrap();
    let heat = heating_rate(&sys, &run).unwrap();
    assert!(heat.fitted_w > 0.0);
    assert!(
        (heat.fitted_w - heat.time_average_w).abs() / heat.time_average_w < 0.01,
        "fitted {} vs averaged {}",
        heat.fitted_w,
        heat.time_average_w
    );
}

#[test]
fn commuting_couplings_conserve_energy_to_rounding() {
    let onsite = [0.3 * hbar(), -0.1 * hbar(), 0.2 * hbar(), 0.05 * hbar()];
    let (sys, _) = hopping_chain_system(4, 1e-7, 1e-16, 3e-8, 0.0, &onsite);
    // Uniform superposition: the dissipator is active on the coherences
    // while [H, Q_i] = 0 keeps ⟨H⟩ exactly flat.
    let amps = gravirrev_core::CVector::from_element(4, linalg::cscale(0.5));
    let rho0 = projector(&StateVector::try_new(amps).unwrap());
    let t_final = 20.0;
    let run = evolve(&rho0, &sys, t_final, 0.01).unwrap();
    let heat = heating_rate(&sys, &run).unwrap();
    let scale = run.diagnostics[0].mean_energy_j.abs() / t_final;
    assert!(
        heat.fitted_w.abs() <= 1e-12 * scale,
        "slope {} vs scale {}",
        heat.fitted_w,
        scale
    );
}

#[test]
fn superscattering_contract_on_the_four_site_chain() {
    let (sys, _) = hopping_chain_system(4, 1e-7, 1e-16, 3e-8, 0.0, &[0.0; 4]);
    let lambda = pointer_decay_rate(&sys, 0, 1);
    assert!(lambda > 0.0);
    let t = 1.0 / lambda;
    let map = superscattering_map(&sys, t).unwrap();

    assert!(map.max_trace_defect() < 1e-9);
    assert!(map.choi_min_eigenvalue() >= -1e-8);

    // Additive composition in t.
    let m1 = superscattering_map(&sys, 0.4 * t).unwrap();
    let m2 = superscattering_map(&sys, 0.6 * t).unwrap();
    let composed = m1.compose(&m2).unwrap();
    let dev = linalg::max_abs(&(composed.matrix() - map.matrix()));
    assert!(dev < 1e-7, "composition deviation {dev}");

    // Strict purity loss on a two-site cat inside the four-site space.
    let cat = projector(&StateVector::equal_pair(4, 0, 1).unwrap());
    let out = map.apply(&cat).unwrap();
    let out_purity: f64 = out.iter().map(|c| c.norm_sqr()).sum();
    assert!(out_purity < purity(&cat) - 0.1);
    let expected = 0.5 + 0.5 * (-2.0_f64).exp();
    assert!((out_purity - expected).abs() < 0.01);
}
