//! Numerical models of gravity-related irreversibility at desk scale.
//!
//! The crate collects a family of small, exactly specified models that share
//! one theme: open-system dynamics whose noise is tied to the Newton
//! potential or to an unsharp time flow.
//!
//! - [`constants`] — CODATA 2018 SI constants, Bekenstein entropy,
//!   de Broglie / Planck-length comparisons.
//! - [`qstate`] — finite-dimensional state vectors, density matrices and
//!   Hermitian operators with enforced invariants.
//! - [`dephasing`] — phase evolution under a randomized time flow,
//!   `exp(-(i/ħ) E_n (1+δ) t)`, its seeded ensembles and the closed-form
//!   ensemble average.
//! - [`kernel`] — mass configurations, the regularized Newtonian kernel
//!   `G·erf(d/2σ)/d`, generic positive symmetric kernels, and spatially
//!   correlated white-noise sampling.
//! - [`master_eq`] — the double-commutator master equation
//!   `dρ/dt = -(i/ħ)[H,ρ] - p Σ_ij K_ij [Q_i,[Q_j,ρ]]`, its propagator map,
//!   a stochastic-potential unraveling, cat-state decay and heating rates.
//! - [`sn_solver`] — the self-bound ground state of the radial
//!   Schrödinger–Newton equation.
//! - [`oracles`] — independent reference computations (diagonalization,
//!   shooting) used by the test suites to cross-check the production paths.
//!
//! All stochastic routines take explicit seeds and draw from per-trajectory
//! counter-based substreams, so every ensemble is bit-reproducible and
//! independent of evaluation order.
//!
//! The crate is `no_std` (with `alloc`); everything that touches files or
//! the command line lives in the companion CLI crate.

#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod constants;
pub mod dephasing;
pub mod error;
pub mod kernel;
pub mod linalg;
pub mod master_eq;
pub mod oracles;
pub mod qstate;
pub mod seeding;
pub mod sn_solver;

pub use error::{Error, Result};
pub use linalg::{C64, CMatrix, CVector};
pub use nalgebra::{self, Complex, DMatrix, DVector, Vector3};
