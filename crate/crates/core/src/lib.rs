//! Solvers for the rank-regularized least-squares problem
//! `min F(X) = ‖Y − DX‖²_F + λ·rank(X)`.
//!
//! The rank penalty has a closed-form proximal mapping: singular value hard
//! thresholding. Three first-order schemes are provided on top of it —
//! plain proximal gradient descent ([`solve_pgd`]), a non-monotone
//! accelerated variant with support projection ([`solve_apg_nonmonotone`]),
//! and a monotone accelerated variant ([`solve_apg_monotone`]) — together
//! with independent oracles ([`oracle`]) and Monte Carlo checks
//! ([`theory`]) for the properties the solvers are supposed to satisfy:
//! support shrinkage, sufficient decrease, convergence-rate bounds, and the
//! probabilistic step-size guarantee for Gaussian designs.
//!
//! The crate is `no_std`-compatible (`alloc` required): disable the default
//! `std` feature and enable `libm` instead.

#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

#[cfg(all(not(feature = "std"), not(feature = "libm")))]
compile_error!("rankprox-core requires either the `std` or the `libm` feature");

mod float;

pub mod error;
pub mod matrix;
pub mod objective;
pub mod oracle;
pub mod rng;
pub mod solver;
pub mod spectral;
pub mod svd;
pub mod theory;

pub use error::Error;
pub use matrix::Matrix;
pub use objective::{
    default_x0, f_value, g_grad, g_value, grad_bound, lipschitz_bound, step_size_auto,
    step_size_manual, GradEstimator, Problem, SmoothLoss, SquaredLoss, StepMode, StepSizePlan,
};
pub use oracle::{
    check_monotonicity, check_sufficient_decrease, check_support_shrinkage, grad_fd_check,
    prox_rank_bruteforce, segment_trace, weyl_verify, DecreaseReport, ShrinkageReport,
    SupportSegment,
};
pub use solver::{
    alpha_next, default_tol, fixpoint_residual, pgd_step, solve, solve_apg_monotone,
    solve_apg_nonmonotone, solve_pgd, Algorithm, IterRecord, IterateLog, SolverConfig,
    Termination, Trace, ZRecord, DEFAULT_MAX_ITERS,
};
pub use spectral::{hard_threshold, spectral_norm, support_project, FactoredIterate};
pub use svd::{singular_values, svd, SvdFactors};
pub use theory::{
    davidson_szarek_check, laurent_massart_check, rate_bound_apg, rate_bound_apg_monotone,
    rate_bound_pgd, theorem1_montecarlo, theorem1_required_n, theorem1_trial, BoundDirection,
    MonteCarloReport, RateBoundReport, SpectrumTailReport,
};
