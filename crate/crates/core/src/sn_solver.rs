//! Ground state of the radial Schrödinger–Newton problem.
//!
//! For the reduced radial wavefunction u(r) = r·R(r), normalized as
//! ∫u²dr = 1, the coupled pair is
//!
//! ```text
//! -(ħ²/2m) u'' + Φ(r) u = E u
//! Φ(r) = -G m² [ (1/r) ∫₀^r u² dr' + ∫_r^∞ u²/r' dr' ]
//! ```
//!
//! The solver works internally in dimensionless units ħ = G = m = 1
//! (length unit ħ²/Gm³, energy unit G²m⁵/ħ²), so a single numerical
//! problem serves every mass and the scale-covariance law is exact. The
//! discretized Hamiltonian is a second-order finite-difference tridiagonal
//! with Dirichlet ends (ghost zeros at the origin and at r_max); its lowest
//! eigenpair comes from Sturm-sequence bisection plus inverse iteration,
//! alternated with potential rebuilds under linear mixing.

use alloc::vec::Vec;

use crate::constants::PhysConstants;
use crate::error::{require_positive, Error, Result};

/// Minimum number of radial points.
pub const MIN_POINTS: usize = 200;
/// Relative tolerance for grid uniformity.
pub const UNIFORMITY_TOL: f64 = 1e-12;
/// Default linear-mixing weight of the freshly rebuilt potential.
pub const DEFAULT_MIXING: f64 = 0.5;
/// The expected soliton width must be resolved by at least this many points.
pub const WIDTH_POINTS: f64 = 50.0;
/// Tail adequacy threshold on |u| near r_max, relative to max |u|.
pub const TAIL_FRACTION: f64 = 1e-6;

/// Uniform radial grid r_k = k·h, k = 1..n, with r_n = r_max.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialGrid {
    r_m: Vec<f64>,
    spacing_m: f64,
}

impl RadialGrid {
    pub fn uniform(r_max_m: f64, n_points: usize) -> Result<Self> {
        require_positive("r_max", r_max_m)?;
        if n_points < MIN_POINTS {
            return Err(Error::Domain {
                name: "n_points",
                requirement: "≥ 200",
                value: n_points as f64,
            });
        }
        let h = r_max_m / n_points as f64;
        let r_m = (1..=n_points).map(|k| k as f64 * h).collect();
        Ok(Self { r_m, spacing_m: h })
    }

    /// Validates an externally supplied grid: strictly increasing, uniform
    /// within 1e-12 relative, first point at one spacing from the origin.
    pub fn from_points(r_m: Vec<f64>) -> Result<Self> {
        if r_m.len() < MIN_POINTS {
            return Err(Error::Domain {
                name: "n_points",
                requirement: "≥ 200",
                value: r_m.len() as f64,
            });
        }
        if !(r_m[0] > 0.0) || r_m.iter().any(|x| !x.is_finite()) {
            return Err(Error::Invalid("radii must be finite and start above 0"));
        }
        let h = r_m[0];
        for w in r_m.windows(2) {
            let step = w[1] - w[0];
            if !(step > 0.0) || (step - h).abs() > UNIFORMITY_TOL * h {
                return Err(Error::Invalid(
                    "grid must be strictly increasing and uniform, starting at one spacing",
                ));
            }
        }
        Ok(Self { r_m, spacing_m: h })
    }

    pub fn points_m(&self) -> &[f64] {
        &self.r_m
    }

    pub fn spacing_m(&self) -> f64 {
        self.spacing_m
    }

    pub fn r_max_m(&self) -> f64 {
        *self.r_m.last().expect("grid is non-empty")
    }

    pub fn len(&self) -> usize {
        self.r_m.len()
    }

    pub fn is_empty(&self) -> bool {
        self.r_m.is_empty()
    }
}

/// Converged ground state. `u` carries m^(-1/2) units and is trapezoidally
/// normalized on the grid; the last point is the pinned Dirichlet zero.
#[derive(Debug, Clone, PartialEq)]
pub struct SolitonSolution {
    pub grid: RadialGrid,
    pub u: Vec<f64>,
    /// Mean-field potential energy profile m·φ(r), J.
    pub potential_j: Vec<f64>,
    pub energy_eigenvalue_j: f64,
    /// ⟨T⟩ + ½⟨Φ⟩, the double-counting-corrected total energy, J.
    pub binding_energy_j: f64,
    /// Eigenvalue in units G²m⁵/ħ².
    pub dimensionless_eigenvalue: f64,
    pub iterations: usize,
    /// ‖Hu − εu‖₂ √h / |ε| at the converged state.
    pub residual: f64,
    /// Set when the grid cannot resolve the expected width ħ²/(Gm³) with
    /// ≥ 50 points, or the tail has not dropped below 1e-6·max|u| at r_max.
    pub coarse_grid: bool,
}

/// Trapezoidal ∫u²dr with the implicit u(0) = 0 half-cell; with the last
/// point pinned to zero this equals h·Σu_k².
fn norm_sq(u: &[f64], h: f64) -> f64 {
    let n = u.len();
    let mut s = 0.5 * u[0] * u[0]; // [0, r1] half-cell against u(0) = 0
    for k in 0..n - 1 {
        s += 0.5 * (u[k] * u[k] + u[k + 1] * u[k + 1]);
    }
    s * h
}

/// The bracket (1/r)∫₀^r u² + ∫_r^rmax u²/r', one value per grid point.
/// Works for any consistent unit system (SI or dimensionless).
fn mean_field_bracket(u: &[f64], r: &[f64], h: f64) -> Vec<f64> {
    let n = u.len();
    let mut inner = Vec::with_capacity(n);
    let mut acc = 0.5 * h * u[0] * u[0]; // trapezoid from the origin, u(0) = 0
    inner.push(acc);
    for k in 1..n {
        acc += 0.5 * h * (u[k - 1] * u[k - 1] + u[k] * u[k]);
        inner.push(acc);
    }
    let mut outer = alloc::vec![0.0; n];
    for k in (0..n - 1).rev() {
        outer[k] = outer[k + 1]
            + 0.5 * h * (u[k] * u[k] / r[k] + u[k + 1] * u[k + 1] / r[k + 1]);
    }
    (0..n).map(|k| inner[k] / r[k] + outer[k]).collect()
}

/// Mean-field potential energy profile Φ(r) = −G·m²·bracket, J.
pub fn sn_potential(u: &[f64], grid: &RadialGrid, mass_kg: f64) -> Result<Vec<f64>> {
    let m = require_positive("mass", mass_kg)?;
    if u.len() != grid.len() {
        return Err(Error::DimensionMismatch {
            expected: grid.len(),
            got: u.len(),
        });
    }
    let nsq = norm_sq(u, grid.spacing_m());
    if !((nsq - 1.0).abs() <= 1e-8) {
        return Err(Error::NotNormalized {
            norm_sq: nsq,
            tol: 1e-8,
        });
    }
    let g = PhysConstants::codata2018().g;
    let bracket = mean_field_bracket(u, grid.points_m(), grid.spacing_m());
    Ok(bracket.iter().map(|&b| -g * m * m * b).collect())
}

/// Eigenvalue count below `lambda` for the symmetric tridiagonal matrix
/// with the given diagonal and constant off-diagonal (Sturm sequence).
fn sturm_count(diag: &[f64], off: f64, lambda: f64) -> usize {
    let off_sq = off * off;
    // Pivot floor scaled so off²/pivmin stays finite (LAPACK dstebz style).
    let pivmin = f64::MIN_POSITIVE * off_sq.max(1.0);
    let mut count = 0;
    let mut d = 1.0;
    for (k, &dk) in diag.iter().enumerate() {
        d = if k == 0 {
            dk - lambda
        } else {
            (dk - lambda) - off_sq / d
        };
        // Substitute before counting: an exact zero pivot counts as negative.
        if d.abs() < pivmin {
            d = -pivmin;
        }
        if d < 0.0 {
            count += 1;
        }
    }
    count
}

/// Tridiagonal solve of (T − shift)x = rhs with partial pivoting.
fn solve_tridiag_shifted(diag: &[f64], off: f64, shift: f64, rhs: &mut [f64]) {
    let n = diag.len();
    // Scaled pivot floor; a near-singular shift then amplifies instead of
    // overflowing, which is what inverse iteration wants.
    let pivmin = 1.5e-154 * off.abs().max(1.0);
    let mut d: Vec<f64> = diag.iter().map(|&x| x - shift).collect();
    if n == 1 {
        let piv = if d[0].abs() < pivmin { pivmin } else { d[0] };
        rhs[0] /= piv;
        return;
    }
    let mut sub = alloc::vec![off; n - 1];
    let mut sup = alloc::vec![off; n - 1];
    let mut sup2 = alloc::vec![0.0; n.saturating_sub(2)];

    for i in 0..n - 1 {
        if d[i].abs() < sub[i].abs() {
            // Swap rows i and i+1.
            core::mem::swap(&mut d[i], &mut sub[i]);
            let old_sup = sup[i];
            sup[i] = d[i + 1];
            d[i + 1] = old_sup;
            if i + 1 < n - 1 {
                let old_sup2 = sup2[i];
                sup2[i] = sup[i + 1];
                sup[i + 1] = old_sup2;
            }
            rhs.swap(i, i + 1);
        }
        if d[i].abs() < pivmin {
            d[i] = pivmin.copysign(d[i]);
        }
        let f = sub[i] / d[i];
        d[i + 1] -= f * sup[i];
        if i + 1 < n - 1 {
            sup[i + 1] -= f * sup2[i];
        }
        rhs[i + 1] -= f * rhs[i];
    }

    if d[n - 1].abs() < pivmin {
        d[n - 1] = pivmin.copysign(d[n - 1]);
    }
    rhs[n - 1] /= d[n - 1];
    rhs[n - 2] = (rhs[n - 2] - sup[n - 2] * rhs[n - 1]) / d[n - 2];
    for i in (0..n.saturating_sub(2)).rev() {
        rhs[i] = (rhs[i] - sup[i] * rhs[i + 1] - sup2[i] * rhs[i + 2]) / d[i];
    }
}

fn tridiag_apply(diag: &[f64], off: f64, v: &[f64]) -> Vec<f64> {
    let n = v.len();
    (0..n)
        .map(|k| {
            let mut s = diag[k] * v[k];
            if k > 0 {
                s += off * v[k - 1];
            }
            if k + 1 < n {
                s += off * v[k + 1];
            }
            s
        })
        .collect()
}

/// Lowest eigenpair by bisection on the Sturm count plus inverse iteration,
/// finished with a Rayleigh quotient.
fn lowest_eigenpair(diag: &[f64], off: f64) -> (f64, Vec<f64>) {
    let mut lo = diag.iter().fold(f64::INFINITY, |a, &b| a.min(b)) - 2.0 * off.abs();
    let mut hi = diag.iter().fold(f64::NEG_INFINITY, |a, &b| a.max(b)) + 2.0 * off.abs();
    let scale = lo.abs().max(hi.abs()).max(1.0);
    for _ in 0..200 {
        if hi - lo <= 1e-13 * scale {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if sturm_count(diag, off, mid) >= 1 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    let lambda = 0.5 * (lo + hi);

    let n = diag.len();
    let mut v = alloc::vec![1.0; n];
    let mut shift = lambda;
    for attempt in 0..6 {
        let mut w = v.clone();
        solve_tridiag_shifted(diag, off, shift, &mut w);
        let norm = libm::sqrt(w.iter().map(|x| x * x).sum::<f64>());
        if norm.is_finite() && norm > 0.0 {
            for x in w.iter_mut() {
                *x /= norm;
            }
            v = w;
            if attempt >= 1 {
                break;
            }
        } else {
            // Shift sat exactly on the eigenvalue; nudge and retry.
            shift -= 1e-10 * scale;
        }
    }
    let hv = tridiag_apply(diag, off, &v);
    let rayleigh: f64 = v.iter().zip(&hv).map(|(a, b)| a * b).sum();
    (rayleigh, v)
}

fn count_interior_sign_changes(u: &[f64]) -> usize {
    let peak = u.iter().fold(0.0_f64, |a, &b| a.max(b.abs()));
    let floor = 1e-10 * peak;
    let mut changes = 0;
    let mut last = 0.0_f64;
    for &x in u {
        if x.abs() <= floor {
            continue;
        }
        if last != 0.0 && x.signum() != last.signum() {
            changes += 1;
        }
        last = x;
    }
    changes
}

struct DimensionlessGroundState {
    eigenvalue: f64,
    /// Values at the n−1 unknown nodes x_1..x_{n-1}.
    u: Vec<f64>,
    /// Self-consistent potential of the final state at all n nodes.
    potential: Vec<f64>,
    kinetic: f64,
    potential_expectation: f64,
    iterations: usize,
    residual: f64,
}

/// Self-consistent-field loop in ħ = G = m = 1 units on the grid
/// x_k = k·h, k = 1..n, with ghost zeros at x = 0 and x = x_max.
fn solve_dimensionless(
    n: usize,
    h: f64,
    tol: f64,
    max_iter: usize,
    mixing: f64,
) -> Result<DimensionlessGroundState> {
    let m = n - 1; // unknowns x_1..x_{n-1}; u(x_n) = 0 is pinned
    let x: Vec<f64> = (1..=n).map(|k| k as f64 * h).collect();
    let off = -0.5 / (h * h);
    let kin = 1.0 / (h * h);

    // Nodeless start with the right near-origin behavior.
    let mut u: Vec<f64> = x[..m].iter().map(|&xk| xk * libm::exp(-xk)).collect();
    normalize(&mut u, h);

    let rebuild = |u: &[f64]| -> Vec<f64> {
        let mut full = u.to_vec();
        full.push(0.0);
        let b = mean_field_bracket(&full, &x, h);
        b[..m].iter().map(|&v| -v).collect()
    };

    let mut phi = rebuild(&u);
    let mut eps_prev = f64::INFINITY;
    let mut history: Vec<f64> = Vec::new();
    let mut converged_at = None;

    for iter in 1..=max_iter {
        let diag: Vec<f64> = (0..m).map(|k| kin + phi[k]).collect();
        let (eps, mut v) = lowest_eigenpair(&diag, off);

        if count_interior_sign_changes(&v) > 0 {
            // The lowest eigenvector of this operator is one-signed; sign
            // structure here is inverse-iteration noise. Restart from the
            // positive projection.
            for val in v.iter_mut() {
                *val = val.abs();
            }
        }
        let peak_idx = v
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.abs().total_cmp(&b.1.abs()))
            .map(|(i, _)| i)
            .unwrap_or(0);
        if v[peak_idx] < 0.0 {
            for val in v.iter_mut() {
                *val = -*val;
            }
        }
        normalize(&mut v, h);
        u = v;

        let change = if eps_prev.is_finite() {
            (eps - eps_prev).abs() / eps.abs().max(f64::MIN_POSITIVE)
        } else {
            f64::INFINITY
        };
        history.push(change);
        eps_prev = eps;
        if change < tol {
            converged_at = Some(iter);
            break;
        }

        let fresh = rebuild(&u);
        for k in 0..m {
            phi[k] = (1.0 - mixing) * phi[k] + mixing * fresh[k];
        }
    }

    let iterations = match converged_at {
        Some(it) => it,
        None => {
            let last_change = history.last().copied().unwrap_or(f64::INFINITY);
            return Err(Error::NonConvergence {
                iterations: max_iter,
                last_change,
                residual_history: history,
            });
        }
    };

    // Polish: rebuild the potential from the converged state and solve once
    // more so the reported pair is self-consistent to rounding.
    let phi_final = rebuild(&u);
    let diag: Vec<f64> = (0..m).map(|k| kin + phi_final[k]).collect();
    let (eps, mut v) = lowest_eigenpair(&diag, off);
    let peak = v.iter().fold(0.0_f64, |a, &b| a.max(b.abs()));
    if v.iter().sum::<f64>() < 0.0 {
        for val in v.iter_mut() {
            *val = -*val;
        }
    }
    normalize(&mut v, h);
    if count_interior_sign_changes(&v) > 0 {
        return Err(Error::Invalid("converged state is not nodeless"));
    }
    let _ = peak;
    u = v;

    // Report the potential of the final state itself, at every node
    // including the pinned one.
    let mut full = u.clone();
    full.push(0.0);
    let potential: Vec<f64> = mean_field_bracket(&full, &x, h)
        .iter()
        .map(|&b| -b)
        .collect();

    let kinetic_diag = alloc::vec![kin; m];
    let tu = tridiag_apply(&kinetic_diag, off, &u);
    let kinetic: f64 = u.iter().zip(&tu).map(|(a, b)| a * b).sum::<f64>() * h;
    let potential_expectation: f64 = u
        .iter()
        .zip(&potential)
        .map(|(&uk, &pk)| pk * uk * uk)
        .sum::<f64>()
        * h;

    let hu = tridiag_apply(&diag, off, &u);
    let res_sq: f64 = u
        .iter()
        .zip(&hu)
        .map(|(&uk, &hk)| (hk - eps * uk) * (hk - eps * uk))
        .sum();
    let residual = libm::sqrt(res_sq * h) / eps.abs().max(f64::MIN_POSITIVE);

    Ok(DimensionlessGroundState {
        eigenvalue: eps,
        u,
        potential,
        kinetic,
        potential_expectation,
        iterations,
        residual,
    })
}

fn normalize(u: &mut [f64], h: f64) {
    let nsq: f64 = u.iter().map(|x| x * x).sum::<f64>() * h;
    let inv = 1.0 / libm::sqrt(nsq);
    for x in u.iter_mut() {
        *x *= inv;
    }
}

/// Self-consistent ground state at mass `mass_kg` on an SI grid.
pub fn solve_ground_state(
    mass_kg: f64,
    grid: &RadialGrid,
    tol: f64,
    max_iter: usize,
) -> Result<SolitonSolution> {
    solve_ground_state_mixed(mass_kg, grid, tol, max_iter, DEFAULT_MIXING)
}

/// [`solve_ground_state`] with an explicit linear-mixing weight in (0, 1].
pub fn solve_ground_state_mixed(
    mass_kg: f64,
    grid: &RadialGrid,
    tol: f64,
    max_iter: usize,
    mixing: f64,
) -> Result<SolitonSolution> {
    let mass = require_positive("mass", mass_kg)?;
    if !(tol > 0.0 && tol <= 1e-4) {
        return Err(Error::Domain {
            name: "tol",
            requirement: "in (0, 1e-4]",
            value: tol,
        });
    }
    if max_iter == 0 {
        return Err(Error::Domain {
            name: "max_iter",
            requirement: "≥ 1",
            value: 0.0,
        });
    }
    if !(mixing > 0.0 && mixing <= 1.0) {
        return Err(Error::Domain {
            name: "mixing",
            requirement: "in (0, 1]",
            value: mixing,
        });
    }

    let c = PhysConstants::codata2018();
    let length_unit = c.hbar * c.hbar / (c.g * mass * mass * mass);
    let energy_unit = c.g * c.g * libm::pow(mass, 5.0) / (c.hbar * c.hbar);

    let n = grid.len();
    let h = grid.spacing_m() / length_unit;
    let mut coarse_grid = 1.0 / h < WIDTH_POINTS;

    let state = solve_dimensionless(n, h, tol, max_iter, mixing)?;

    // Back to SI: u(r) = ũ(r/ℓ)/√ℓ keeps ∫u²dr = 1.
    let sqrt_len = libm::sqrt(length_unit);
    let mut u: Vec<f64> = state.u.iter().map(|&v| v / sqrt_len).collect();
    u.push(0.0); // pinned Dirichlet value at r_max
    let potential_j: Vec<f64> = state.potential.iter().map(|&p| p * energy_unit).collect();

    let peak = u.iter().fold(0.0_f64, |a, &b| a.max(b.abs()));
    if u[n - 2].abs() > TAIL_FRACTION * peak {
        coarse_grid = true;
    }

    Ok(SolitonSolution {
        grid: grid.clone(),
        u,
        potential_j,
        energy_eigenvalue_j: state.eigenvalue * energy_unit,
        binding_energy_j: (state.kinetic + 0.5 * state.potential_expectation) * energy_unit,
        dimensionless_eigenvalue: state.eigenvalue,
        iterations: state.iterations,
        residual: state.residual,
        coarse_grid,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn l0(mass: f64) -> f64 {
        let c = PhysConstants::codata2018();
        c.hbar * c.hbar / (c.g * mass * mass * mass)
    }

    #[test]
    fn grid_construction_and_validation() {
        let g = RadialGrid::uniform(10.0, 500).unwrap();
        assert_eq!(g.len(), 500);
        assert_eq!(g.spacing_m(), 0.02);
        assert_eq!(g.points_m()[0], 0.02);
        assert_eq!(g.r_max_m(), 10.0);
        assert!(RadialGrid::uniform(10.0, 100).is_err());
        assert!(RadialGrid::uniform(-1.0, 500).is_err());

        let pts: Vec<f64> = (1..=300).map(|k| 0.1 * k as f64).collect();
        assert!(RadialGrid::from_points(pts).is_ok());
        let mut bad: Vec<f64> = (1..=300).map(|k| 0.1 * k as f64).collect();
        bad[150] += 0.05;
        assert!(RadialGrid::from_points(bad).is_err());
    }

    #[test]
    fn tridiagonal_eigensolver_matches_the_free_particle() {
        // -½u'' with Dirichlet ends has eigenvalues 2 sin²(kπh/2L)/h².
        let m = 400;
        let h = 1.0 / (m as f64 + 1.0);
        let diag = vec![1.0 / (h * h); m];
        let off = -0.5 / (h * h);
        let (eps, u) = lowest_eigenpair(&diag, off);
        let s = libm::sin(core::f64::consts::PI * h / 2.0);
        let expected = 2.0 * s * s / (h * h);
        assert!((eps - expected).abs() < 1e-10 * expected);
        assert_eq!(count_interior_sign_changes(&u), 0);

        // Residual of the returned pair.
        let hu = tridiag_apply(&diag, off, &u);
        let res: f64 = u
            .iter()
            .zip(&hu)
            .map(|(&a, &b)| (b - eps * a) * (b - eps * a))
            .sum::<f64>();
        assert!(libm::sqrt(res) < 1e-8 * eps);
    }

    #[test]
    fn potential_reaches_the_point_mass_limit() {
        // Density concentrated in the innermost cells.
        let mass = 1e-17;
        let grid = RadialGrid::uniform(10.0 * l0(mass), 1000).unwrap();
        let h = grid.spacing_m();
        let mut u = vec![0.0; 1000];
        for (k, v) in u.iter_mut().enumerate().take(3) {
            *v = (k + 1) as f64;
        }
        let nsq = norm_sq(&u, h);
        for v in u.iter_mut() {
            *v /= libm::sqrt(nsq);
        }
        let phi = sn_potential(&u, &grid, mass).unwrap();
        let c = PhysConstants::codata2018();
        let expected = -c.g * mass * mass / grid.r_max_m();
        assert!((phi[999] - expected).abs() / expected.abs() < 0.005);

        // Monotone non-decreasing everywhere.
        for w in phi.windows(2) {
            assert!(w[1] >= w[0] - 1e-30);
        }

        // m → 2m multiplies the potential by 4 on the same grid.
        let phi2 = sn_potential(&u, &grid, 2.0 * mass).unwrap();
        for (a, b) in phi.iter().zip(&phi2) {
            assert!((b - 4.0 * a).abs() <= 1e-12 * b.abs());
        }

        // Non-normalized input is rejected.
        let bad = vec![1.0; 1000];
        assert!(matches!(
            sn_potential(&bad, &grid, mass),
            Err(Error::NotNormalized { .. })
        ));
    }

    #[test]
    fn ground_state_converges_and_keeps_its_invariants() {
        let mass = 1e-17;
        let grid = RadialGrid::uniform(40.0 * l0(mass), 2400).unwrap();
        let tol = 1e-8;
        let sol = solve_ground_state(mass, &grid, tol, 300).unwrap();

        assert!(!sol.coarse_grid);
        assert!(sol.dimensionless_eigenvalue < 0.0);
        assert!((norm_sq(&sol.u, grid.spacing_m()) - 1.0).abs() < 1e-8);
        assert_eq!(count_interior_sign_changes(&sol.u), 0);
        assert_eq!(*sol.u.last().unwrap(), 0.0);
        let peak = sol.u.iter().fold(0.0_f64, |a, &b| a.max(b.abs()));
        assert!(sol.u[grid.len() - 2].abs() <= TAIL_FRACTION * peak);
        // First point carries the u ~ r slope, small against the peak.
        assert!(sol.u[0].abs() < 0.05 * peak);

        // Virial-style consistency: ε = ⟨T⟩ + ⟨Φ⟩ within 10·tol.
        let c = PhysConstants::codata2018();
        let energy_unit = c.g * c.g * libm::pow(mass, 5.0) / (c.hbar * c.hbar);
        let eps = sol.energy_eigenvalue_j / energy_unit;
        let t_plus_phi = (sol.binding_energy_j / energy_unit) * 2.0 - eps;
        // binding = T + Φ/2 and ε = T + Φ ⇒ 2·binding − ε = T, so instead
        // reconstruct: Φ = 2(ε − binding), T = 2 binding − ε.
        let t = 2.0 * (sol.binding_energy_j / energy_unit) - eps;
        let phi = 2.0 * (eps - sol.binding_energy_j / energy_unit);
        assert!((t + phi - eps).abs() <= 10.0 * tol * eps.abs());
        assert!(t > 0.0 && phi < 0.0 && sol.binding_energy_j < 0.0);
        let _ = t_plus_phi;

        // The reported potential profile matches the public operation.
        let direct = sn_potential(&sol.u, &sol.grid, mass).unwrap();
        for (a, b) in direct.iter().zip(&sol.potential_j) {
            assert!((a - b).abs() <= 1e-9 * a.abs().max(1e-300));
        }
    }

    #[test]
    fn eigenvalue_converges_under_grid_refinement() {
        let mass = 1e-17;
        let r_max = 35.0 * l0(mass);
        let run = |n: usize| {
            solve_ground_state(mass, &RadialGrid::uniform(r_max, n).unwrap(), 1e-9, 400)
                .unwrap()
                .dimensionless_eigenvalue
        };
        let e1 = run(500);
        let e2 = run(1000);
        let e3 = run(2000);
        // Second-order convergence: error shrinks ~4× per halving.
        let d12 = (e1 - e2).abs();
        let d23 = (e2 - e3).abs();
        assert!(d23 < d12 / 2.5, "d12 {d12}, d23 {d23}");
    }

    #[test]
    fn mass_scaling_law_on_matched_grids() {
        let m1 = 1e-17;
        let m2 = 2e-17;
        let n = 900;
        let sol1 =
            solve_ground_state(m1, &RadialGrid::uniform(38.0 * l0(m1), n).unwrap(), 1e-8, 300)
                .unwrap();
        let sol2 =
            solve_ground_state(m2, &RadialGrid::uniform(38.0 * l0(m2), n).unwrap(), 1e-8, 300)
                .unwrap();
        // Lengths ∝ m⁻³, energies ∝ m⁵.
        let ratio_e = sol2.energy_eigenvalue_j / sol1.energy_eigenvalue_j;
        assert!((ratio_e - 32.0).abs() / 32.0 < 0.01);
        let peak1 = sol1
            .u
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.abs().total_cmp(&b.1.abs()))
            .unwrap()
            .0;
        let peak2 = sol2
            .u
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.abs().total_cmp(&b.1.abs()))
            .unwrap()
            .0;
        let r_peak1 = sol1.grid.points_m()[peak1];
        let r_peak2 = sol2.grid.points_m()[peak2];
        assert!((r_peak1 / r_peak2 - 8.0).abs() / 8.0 < 0.01);
    }

    #[test]
    fn solver_flags_and_errors() {
        let mass = 1e-17;
        // Too coarse to resolve the width: spacing > ℓ₀/50.
        let coarse = RadialGrid::uniform(300.0 * l0(mass), 300).unwrap();
        let sol = solve_ground_state(mass, &coarse, 1e-6, 300).unwrap();
        assert!(sol.coarse_grid);

        // Non-convergence carries the residual history.
        let grid = RadialGrid::uniform(38.0 * l0(mass), 600).unwrap();
        match solve_ground_state(mass, &grid, 1e-14, 3) {
            Err(Error::NonConvergence {
                iterations,
                residual_history,
                ..
            }) => {
                assert_eq!(iterations, 3);
                assert_eq!(residual_history.len(), 3);
            }
            other => panic!("expected non-convergence, got {other:?}"),
        }

        assert!(solve_ground_state(mass, &grid, 1e-3, 100).is_err()); // tol too large
        assert!(solve_ground_state(-1.0, &grid, 1e-8, 100).is_err());
        assert!(solve_ground_state_mixed(mass, &grid, 1e-8, 100, 0.0).is_err());
    }
}
