use crate::error::Result;
use crate::raster::{DisparityMap, Grid, Mask, Observation};
use crate::sampling::{
    allocate_probs, draw_pattern, gradient_magnitude, pca_saliency, uniform_probs, SaliencyField,
    SamplingPattern, PCA_COMPONENTS, PCA_PATCH_SIDE,
};
use crate::sampling::pattern::check_ratio;
use crate::seed::derive;
use crate::solver::AdmmSolver;
use crate::Scalar;

/// How the first half of the budget is placed.
#[derive(Clone, Debug, PartialEq)]
pub enum PilotSampling {
    /// Bernoulli with `p_j = ξ/2`.
    Uniform,
    /// Optimal probabilities from the PCA saliency of a guide image (e.g. the colour view).
    Pca(Grid<f64>),
}

/// Saliency used to place the second half of the budget from the pilot estimate.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Refinement {
    Gradient,
    Pca,
}

#[derive(Clone, Debug, PartialEq)]
pub struct TwoStageConfig {
    pub pilot: PilotSampling,
    pub refinement: Refinement,
    pub patch_side: usize,
    pub d_prime: usize,
}

impl Default for TwoStageConfig {
    fn default() -> Self {
        Self { pilot: PilotSampling::Uniform, refinement: Refinement::Gradient, patch_side: PCA_PATCH_SIDE, d_prime: PCA_COMPONENTS }
    }
}

impl TwoStageConfig {
    pub fn with_refinement(mut self, refinement: Refinement) -> Self {
        self.refinement = refinement;
        self
    }

    pub fn with_pilot(mut self, pilot: PilotSampling) -> Self {
        self.pilot = pilot;
        self
    }
}

/// Result of [`two_stage_pattern`].
#[derive(Clone, Debug)]
pub struct TwoStageOutcome<T> {
    /// Union of both stages.
    pub pattern: SamplingPattern,
    /// Measurements on the union.
    pub observation: Observation<T>,
    /// Reconstruction from the first-stage samples.
    pub pilot: DisparityMap<T>,
    pub stage1: Mask,
    pub stage2: Mask,
}

/// Pilot-then-refine sampling with budget ξ/2 per stage.
///
/// `measure` returns ground-truth values for a requested mask (entries off the mask are
/// ignored). The pilot is reconstructed with `solver`; the second stage draws from
/// optimal probabilities on the pilot saliency, zeroed on the first-stage support so the
/// two masks are disjoint. Flat saliency falls back to uniform allocation over the
/// unsampled pixels, and the returned pattern is flagged degenerate.
pub fn two_stage_pattern<T, F>(
    mut measure: F,
    shape: (usize, usize),
    xi: f64,
    seed: u64,
    config: &TwoStageConfig,
    solver: &AdmmSolver<T>,
) -> Result<TwoStageOutcome<T>>
where
    T: Scalar,
    F: FnMut(&Mask) -> Result<Grid<T>>,
{
    check_ratio(xi, false)?;
    let half = xi / 2.0;
    let (rows, cols) = shape;

    let (p1, mut degenerate) = match &config.pilot {
        PilotSampling::Uniform => (uniform_probs(shape, half)?, false),
        PilotSampling::Pca(img) => {
            img.check_shape(shape)?;
            let a = pca_saliency(img, config.patch_side, config.d_prime)?;
            allocate_probs(&a, half, None)?
        }
    };
    let stage1 = draw_pattern(&p1, derive(seed, 1))?.into_mask();
    let obs1 = observe(&mut measure, &stage1)?;
    let pilot = solver.solve(&obs1)?.map;

    let saliency = match config.refinement {
        Refinement::Gradient => gradient_magnitude(&pilot),
        Refinement::Pca => pca_saliency(pilot.grid(), config.patch_side, config.d_prime)?,
    };
    let a: SaliencyField = saliency.masked_out(&stage1);
    let eligible = stage1.map(|m| !m);
    let (p2, fallback) = allocate_probs(&a, half, Some(&eligible))?;
    degenerate |= fallback && a.is_degenerate();
    let stage2 = draw_pattern(&p2, derive(seed, 2))?.into_mask();
    let obs2 = observe(&mut measure, &stage2)?;

    let observation = obs1.merge(&obs2)?;
    // Stage-2 probabilities are conditional on stage 1; their sum with p1 is an approximate marginal.
    let probs = Grid::from_fn(rows, cols, |i, j| (p1.get(i, j) + p2.get(i, j)).min(1.0));
    let mut pattern = SamplingPattern::from_parts(observation.mask().clone(), probs, xi, Some(seed))?;
    if degenerate {
        pattern = pattern.flag_degenerate();
    }
    Ok(TwoStageOutcome { pattern, observation, pilot, stage1, stage2 })
}

fn observe<T: Scalar, F: FnMut(&Mask) -> Result<Grid<T>>>(measure: &mut F, mask: &Mask) -> Result<Observation<T>> {
    let values = measure(mask)?;
    Observation::sample(&values, mask)
}
