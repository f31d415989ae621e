use std::time::Instant;

use crate::error::{Error, Result};
use crate::raster::Observation;
use crate::solver::admm::finish;
use crate::solver::{AdmmSolver, ConvergenceTrace, Reconstruction, SolverState};
use crate::Scalar;

/// Smallest image side allowed at the coarsest pyramid level.
const MIN_COARSE_SIDE: usize = 8;

impl<T: Scalar> AdmmSolver<T> {
    /// Coarse-to-fine solve over `levels` pyramid levels.
    ///
    /// Level `q` observes every other row and column of level `q − 1`. Each solution is
    /// upsampled by 2x2 replication to initialize the next finer level, together with the
    /// pixel-domain duals `w` and `z`; splitting variables are recomputed from the
    /// upsampled estimate and coefficient-domain duals restart at zero, since subband
    /// layouts differ between levels. `levels == 1` is exactly [`solve`](Self::solve).
    pub fn solve_multiscale(&self, obs: &Observation<T>, levels: usize) -> Result<Reconstruction<T>> {
        if levels == 0 {
            return Err(Error::Parameter("multiscale solve needs at least one level".into()));
        }
        if levels == 1 {
            return self.solve(obs);
        }
        let (rows, cols) = obs.shape();
        if rows.min(cols) >> (levels - 1) < MIN_COARSE_SIDE {
            return Err(Error::Parameter(format!(
                "{levels} pyramid levels are too many for a {cols}x{rows} image"
            )));
        }
        let mut problems = vec![self.problem(obs, levels)?];
        for q in 1..levels {
            let next = problems[q - 1].coarsen()?;
            problems.push(next);
        }
        let start = Instant::now();
        let mut trace = ConvergenceTrace::default();
        let mut state = SolverState::initial(&problems[levels - 1]);
        for q in (1..levels).rev() {
            let (s, _) = self.run(&problems[q], state, q, &mut trace, start);
            state = SolverState::warm(
                &problems[q - 1],
                s.x.replicate2(),
                s.w.replicate2(),
                s.zx.replicate2(),
                s.zy.replicate2(),
            );
        }
        let (s, converged) = self.run(&problems[0], state, 0, &mut trace, start);
        finish(&problems[0], s, trace, converged)
    }
}
