use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::raster::{DisparityMap, Observation};
use crate::sampling::{
    allocate_probs, draw_pattern, edge_magnitude, greedy_pattern, grid_pattern, two_stage_pattern,
    uniform_pattern, Refinement, SamplingPattern, TwoStageConfig,
};
use crate::solver::AdmmSolver;
use crate::Scalar;

/// Gradient threshold of the greedy pattern, relative to the peak gradient.
pub const GREEDY_ALPHA: f64 = 0.1;

/// Named sampling strategies for experiments against a known ground truth.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Strategy {
    /// Bernoulli with constant probability.
    Uniform,
    /// Regular lattice.
    Grid,
    /// Thresholded ground-truth gradient (ignores ξ).
    Greedy,
    /// Optimal probabilities from the two-sided edge strength of the ground truth.
    Oracle,
    /// Uniform pilot, gradient refinement.
    TwoStage,
    /// Uniform pilot, PCA refinement.
    TwoStagePca,
}

impl Strategy {
    pub const ALL: [Strategy; 6] =
        [Strategy::Uniform, Strategy::Grid, Strategy::Greedy, Strategy::Oracle, Strategy::TwoStage, Strategy::TwoStagePca];

    pub fn name(self) -> &'static str {
        match self {
            Strategy::Uniform => "uniform",
            Strategy::Grid => "grid",
            Strategy::Greedy => "greedy",
            Strategy::Oracle => "oracle",
            Strategy::TwoStage => "two-stage",
            Strategy::TwoStagePca => "two-stage-pca",
        }
    }

    /// Whether the pattern depends on the seed.
    pub fn is_random(self) -> bool {
        !matches!(self, Strategy::Grid | Strategy::Greedy)
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Strategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let key = s.trim().to_ascii_lowercase().replace('_', "-");
        Strategy::ALL
            .into_iter()
            .find(|st| st.name() == key)
            .ok_or_else(|| Error::Parameter(format!("unknown sampling strategy '{s}'")))
    }
}

/// A pattern with its measurements.
#[derive(Clone, Debug)]
pub struct Design<T> {
    pub pattern: SamplingPattern,
    pub observation: Observation<T>,
    /// Pilot estimate for two-stage strategies.
    pub pilot: Option<DisparityMap<T>>,
}

/// Builds the pattern of `strategy` at ratio `xi` and measures `truth` on it.
///
/// `solver` is used for the pilot reconstruction of two-stage strategies.
pub fn design<T: Scalar>(
    strategy: Strategy,
    truth: &DisparityMap<T>,
    xi: f64,
    seed: u64,
    solver: &AdmmSolver<T>,
) -> Result<Design<T>> {
    let shape = truth.shape();
    let single = |pattern: SamplingPattern| -> Result<Design<T>> {
        let observation = pattern.observe(truth.grid())?;
        Ok(Design { pattern, observation, pilot: None })
    };
    match strategy {
        Strategy::Uniform => single(uniform_pattern(shape, xi, seed)?),
        Strategy::Grid => single(grid_pattern(shape, xi)?),
        Strategy::Greedy => single(greedy_pattern(truth, GREEDY_ALPHA)?),
        Strategy::Oracle => {
            let (probs, _) = allocate_probs(&edge_magnitude(truth), xi, None)?;
            single(draw_pattern(&probs, seed)?)
        }
        Strategy::TwoStage | Strategy::TwoStagePca => {
            let refinement = if strategy == Strategy::TwoStage { Refinement::Gradient } else { Refinement::Pca };
            let config = TwoStageConfig::default().with_refinement(refinement);
            let out = two_stage_pattern(|_| Ok(truth.grid().clone()), shape, xi, seed, &config, solver)?;
            Ok(Design { pattern: out.pattern, observation: out.observation, pilot: Some(out.pilot) })
        }
    }
}
