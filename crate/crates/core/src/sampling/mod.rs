//! Sampling-pattern construction.
//!
//! Deterministic patterns (lattice, thresholded gradient) carry their mask indicator as
//! probabilities; Bernoulli patterns keep the probability field they were drawn from.
//! Budget allocation solves for `p_j = min(τ a_j, 1)` with mean ξ, which minimizes the
//! variance of the inverse-probability estimate of the mean weight.

mod allocation;
mod pattern;
mod pca;
mod strategy;
mod two_stage;

pub use allocation::{
    allocate_probs, estimator_variance, mean_estimate, optimal_probs, solve_tau, SaliencyField,
};
pub use pattern::{
    draw_pattern, edge_magnitude, gradient_magnitude, greedy_pattern, grid_pattern, grid_stride, uniform_pattern, uniform_probs,
    SamplingPattern,
};
pub use pca::{pca_saliency, symmetric_eigen, PCA_COMPONENTS, PCA_PATCH_SIDE};
pub use strategy::{design, Design, Strategy, GREEDY_ALPHA};
pub use two_stage::{two_stage_pattern, PilotSampling, Refinement, TwoStageConfig, TwoStageOutcome};
