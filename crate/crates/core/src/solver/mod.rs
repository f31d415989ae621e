//! ADMM reconstruction for the weighted-analysis + anisotropic-TV model
//!
//! `min ½‖Sx − b‖² + Σ_ℓ λ_ℓ‖W_ℓ Φ_ℓᵀ x‖₁ + β(‖D_x x‖₁ + ‖D_y x‖₁)`
//!
//! with the splitting `u_ℓ = Φ_ℓᵀ x`, `r = x`, `v = D x`.

mod admm;
mod multiscale;
mod params;
mod steps;
mod trace;

pub use admm::{AdmmSolver, Problem, Reconstruction, SolverState};
pub use params::SolverParams;
pub use steps::{dual_update, objective, r_step, shrink, soft_threshold, u_step, v_step, x_step};
pub use trace::{ConvergenceTrace, IterationRecord};
