//! Dense disparity reconstruction from sparse samples.
//!
//! The crate is organised around five subsystems:
//!
//! * [`raster`]: grids, disparity maps, sampling masks, image I/O and synthetic scenes.
//! * [`frames`]: FFT helpers, periodic finite differences, and two Parseval tight
//!   frames (an orthonormal Daubechies-2 wavelet and a frequency-domain contourlet).
//! * [`solver`]: the ADMM reconstructor for the sparse-analysis + total-variation model,
//!   plus a coarse-to-fine multiscale driver.
//! * [`sampling`]: deterministic and Bernoulli sampling patterns, optimal
//!   probability allocation, PCA saliency and the two-stage adaptive scheme.
//! * [`metrics`]: MSE, PSNR and bad-pixel rates.
//!
//! All numerical code is generic over a [`Scalar`] (`f32` or `f64`); the aliases at
//! the crate root fix the precision for typical use.

pub mod error;
pub mod frames;
pub mod metrics;
pub mod raster;
pub mod sampling;
mod scalar;
pub mod seed;
pub mod solver;

pub use error::{Error, Result};
pub use scalar::Scalar;

pub use frames::{
    CoeffLayout, CoefficientSet, Contourlet, ContourletConfig, DiffOperator, Dictionary,
    DictionaryKind, Orientation, TightFrame, Wavelet,
};
pub use raster::{DisparityMap, Grid, ImageFormat, Mask, Observation, SceneKind};
pub use sampling::{SaliencyField, SamplingPattern, Strategy};
pub use metrics::EvalReport;
pub use solver::{AdmmSolver, ConvergenceTrace, Problem, Reconstruction, SolverParams, SolverState};



/// Double-precision grid.
pub type Grid64 = Grid<f64>;
/// Single-precision grid.
pub type Grid32 = Grid<f32>;
/// Double-precision disparity map.
pub type DisparityMap64 = DisparityMap<f64>;
/// Single-precision disparity map.
pub type DisparityMap32 = DisparityMap<f32>;
/// Double-precision observation.
pub type Observation64 = Observation<f64>;
/// Double-precision solver parameters.
pub type SolverParams64 = SolverParams<f64>;
/// Double-precision ADMM solver.
pub type AdmmSolver64 = AdmmSolver<f64>;
/// Single-precision ADMM solver.
pub type AdmmSolver32 = AdmmSolver<f32>;
