use std::time::Instant;

use crate::error::{Error, Result};
use crate::frames::{
    dictionary::WAVELET_LEVELS, CoefficientSet, ContourletConfig, DiffOperator, Dictionary, DictionaryKind, Fft2,
    TightFrame,
};
use crate::raster::{DisparityMap, Grid, Mask, Observation};
use crate::solver::steps::{objective_parts, r_step, u_step, v_step, x_step};
use crate::solver::{dual_update, ConvergenceTrace, IterationRecord, SolverParams};
use crate::Scalar;

/// Operators and data of one (padded) reconstruction problem.
#[derive(Clone, Debug)]
pub struct Problem<T: Scalar> {
    original: (usize, usize),
    b: Grid<T>,
    s: Grid<T>,
    mask: Mask,
    kinds: Vec<DictionaryKind>,
    contourlet: ContourletConfig,
    dicts: Vec<Dictionary<T>>,
    diff: DiffOperator<T>,
    fft: Fft2<T>,
}

fn round_up(v: usize, m: usize) -> usize {
    v.div_ceil(m) * m
}

/// Padded shape accommodating every dictionary on `levels` pyramid levels.
pub(crate) fn padded_shape(
    rows: usize,
    cols: usize,
    kinds: &[DictionaryKind],
    contourlet: &ContourletConfig,
    levels: usize,
) -> (usize, usize) {
    let mut mult = 1usize;
    for q in 0..levels.max(1) {
        for kind in kinds {
            let m = match kind {
                DictionaryKind::Wavelet => 1 << WAVELET_LEVELS,
                DictionaryKind::Contourlet => contourlet.coarsened(q as u32).required_multiple(),
            };
            mult = mult.max(m << q);
        }
    }
    if kinds.contains(&DictionaryKind::Contourlet) {
        let side = round_up(rows.max(cols), mult);
        (side, side)
    } else {
        (round_up(rows, mult), round_up(cols, mult))
    }
}

impl<T: Scalar> Problem<T> {
    /// Zero-pads the observation (padded pixels unobserved) and builds the operators.
    pub fn new(obs: &Observation<T>, kinds: &[DictionaryKind], contourlet: &ContourletConfig, levels: usize) -> Result<Self> {
        if kinds.is_empty() {
            return Err(Error::Parameter("at least one dictionary is required".into()));
        }
        let (rows, cols) = obs.shape();
        let (pr, pc) = padded_shape(rows, cols, kinds, contourlet, levels);
        let b = obs.values().pad(pr, pc, T::zero());
        let mask = obs.mask().pad(pr, pc, false);
        Self::assemble((rows, cols), b, mask, kinds, contourlet.clone())
    }

    fn assemble(
        original: (usize, usize),
        b: Grid<T>,
        mask: Mask,
        kinds: &[DictionaryKind],
        contourlet: ContourletConfig,
    ) -> Result<Self> {
        let (r, c) = b.shape();
        let dicts = kinds
            .iter()
            .map(|&k| Dictionary::build(k, r, c, &contourlet))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            original,
            s: mask.indicator(),
            b,
            mask,
            kinds: kinds.to_vec(),
            contourlet,
            dicts,
            diff: DiffOperator::new(r, c),
            fft: Fft2::new(r, c),
        })
    }

    /// Next pyramid level: every other row and column of `b` and `S`.
    pub fn coarsen(&self) -> Result<Self> {
        let original = (self.original.0.div_ceil(2), self.original.1.div_ceil(2));
        Self::assemble(original, self.b.decimate2(), self.mask.decimate2(), &self.kinds, self.contourlet.coarsened(1))
    }

    pub fn shape(&self) -> (usize, usize) {
        self.b.shape()
    }

    /// Unpadded shape.
    pub fn original_shape(&self) -> (usize, usize) {
        self.original
    }

    pub fn observed(&self) -> &Grid<T> {
        &self.b
    }

    /// 0/1 sampling indicator.
    pub fn indicator(&self) -> &Grid<T> {
        &self.s
    }

    pub fn mask(&self) -> &Mask {
        &self.mask
    }

    pub fn dictionaries(&self) -> &[Dictionary<T>] {
        &self.dicts
    }

    pub fn diff(&self) -> &DiffOperator<T> {
        &self.diff
    }

    pub fn fft(&self) -> &Fft2<T> {
        &self.fft
    }
}

/// Primal and dual ADMM variables on the padded grid.
#[derive(Clone, Debug, PartialEq)]
pub struct SolverState<T> {
    pub x: Grid<T>,
    pub u: Vec<CoefficientSet<T>>,
    pub r: Grid<T>,
    pub vx: Grid<T>,
    pub vy: Grid<T>,
    pub y: Vec<CoefficientSet<T>>,
    pub w: Grid<T>,
    pub zx: Grid<T>,
    pub zy: Grid<T>,
    pub iter: usize,
    pub rel_change: T,
}

impl<T: Scalar> SolverState<T> {
    /// `x = b`, splitting variables consistent with `x`, zero duals.
    pub fn initial(problem: &Problem<T>) -> Self {
        let (r, c) = problem.shape();
        Self::warm(problem, problem.observed().clone(), Grid::zeros(r, c), Grid::zeros(r, c), Grid::zeros(r, c))
    }

    /// Splitting variables derived from `x`; pixel-domain duals supplied, coefficient duals zero.
    pub fn warm(problem: &Problem<T>, x: Grid<T>, w: Grid<T>, zx: Grid<T>, zy: Grid<T>) -> Self {
        let u: Vec<CoefficientSet<T>> = problem.dictionaries().iter().map(|d| d.analysis(&x)).collect();
        let y = u.iter().map(|c| CoefficientSet::zeros(c.layout().clone())).collect();
        let (vx, vy) = problem.diff().apply(&x);
        Self { r: x.clone(), x, u, vx, vy, y, w, zx, zy, iter: 0, rel_change: T::infinity() }
    }

    fn check(&self, problem: &Problem<T>) -> Result<()> {
        let shape = problem.shape();
        for g in [&self.x, &self.r, &self.vx, &self.vy, &self.w, &self.zx, &self.zy] {
            g.check_shape(shape)?;
        }
        let ok = self.u.len() == problem.dictionaries().len()
            && self.y.len() == self.u.len()
            && problem
                .dictionaries()
                .iter()
                .zip(self.u.iter().zip(&self.y))
                .all(|(d, (u, y))| u.len() == d.coeff_count() && y.len() == d.coeff_count());
        if ok {
            Ok(())
        } else {
            Err(Error::Parameter("initial state does not match the dictionaries".into()))
        }
    }
}

/// Output of a solve.
#[derive(Clone, Debug)]
pub struct Reconstruction<T> {
    /// Cropped and clamped estimate.
    pub map: DisparityMap<T>,
    pub trace: ConvergenceTrace,
    /// Final state on the padded grid (before clamping).
    pub state: SolverState<T>,
    pub converged: bool,
}

impl<T> Reconstruction<T> {
    /// Iterations summed over all pyramid levels.
    pub fn iterations(&self) -> usize {
        self.trace.records.len()
    }
}

/// ADMM reconstructor for a fixed dictionary list and parameter set.
#[derive(Clone, Debug)]
pub struct AdmmSolver<T> {
    kinds: Vec<DictionaryKind>,
    params: SolverParams<T>,
    contourlet: Option<ContourletConfig>,
}

impl<T: Scalar> AdmmSolver<T> {
    pub fn new(kinds: &[DictionaryKind], params: SolverParams<T>) -> Result<Self> {
        if kinds.is_empty() {
            return Err(Error::Parameter("at least one dictionary is required".into()));
        }
        params.validate(kinds.len())?;
        Ok(Self { kinds: kinds.to_vec(), params, contourlet: None })
    }

    /// Solver with typical parameters for `kinds`.
    pub fn typical(kinds: &[DictionaryKind]) -> Self {
        Self::new(kinds, SolverParams::typical(kinds)).expect("typical parameters are valid")
    }

    /// Fixes the contourlet partition (otherwise chosen from the image size).
    pub fn with_contourlet(mut self, config: ContourletConfig) -> Self {
        self.contourlet = Some(config);
        self
    }

    pub fn params(&self) -> &SolverParams<T> {
        &self.params
    }

    pub fn dictionaries(&self) -> &[DictionaryKind] {
        &self.kinds
    }

    pub(crate) fn contourlet_for(&self, shape: (usize, usize)) -> ContourletConfig {
        self.contourlet.clone().unwrap_or_else(|| ContourletConfig::for_size(shape.0.max(shape.1)))
    }

    pub fn problem(&self, obs: &Observation<T>, levels: usize) -> Result<Problem<T>> {
        Problem::new(obs, &self.kinds, &self.contourlet_for(obs.shape()), levels)
    }

    pub fn solve(&self, obs: &Observation<T>) -> Result<Reconstruction<T>> {
        self.solve_from(obs, None)
    }

    /// Solves starting from `init` (padded-grid state) or the default initialization.
    pub fn solve_from(&self, obs: &Observation<T>, init: Option<SolverState<T>>) -> Result<Reconstruction<T>> {
        let problem = self.problem(obs, 1)?;
        let state = match init {
            Some(s) => {
                s.check(&problem)?;
                s
            }
            None => SolverState::initial(&problem),
        };
        let mut trace = ConvergenceTrace::default();
        let (state, converged) = self.run(&problem, state, 0, &mut trace, Instant::now());
        finish(&problem, state, trace, converged)
    }

    /// Iterates until the relative change drops below `tol` or `max_iter` is reached.
    pub(crate) fn run(
        &self,
        problem: &Problem<T>,
        mut state: SolverState<T>,
        level: usize,
        trace: &mut ConvergenceTrace,
        start: Instant,
    ) -> (SolverState<T>, bool) {
        let p = &self.params;
        for _ in 0..p.max_iter {
            let x = x_step(&state, p, problem);
            let alpha: Vec<CoefficientSet<T>> = problem.dictionaries().iter().map(|d| d.analysis(&x)).collect();
            for (l, (a, dict)) in alpha.iter().zip(problem.dictionaries()).enumerate() {
                state.u[l] = u_step(a, &state.y[l], p.lambda[l], p.rho[l], dict.weight_mask());
            }
            state.r = r_step(&x, &state.w, problem.indicator(), problem.observed(), p.mu);
            let (dx, dy) = problem.diff().apply(&x);
            (state.vx, state.vy) = v_step(&dx, &dy, &state.zx, &state.zy, p.beta, p.gamma);

            let prev = state.x.norm();
            let change = x.sub(&state.x).norm();
            state.x = x;
            let record = IterationRecord {
                level,
                iter: state.iter + 1,
                objective: objective_parts(&state.x, problem, p, &alpha, &dx, &dy).to_f64_lossy(),
                rel_change: 0.0,
                res_r: state.r.sub(&state.x).norm().to_f64_lossy(),
                res_u: state.u.iter().zip(&alpha).map(|(u, a)| residual(u.as_slice(), a.as_slice())).collect(),
                res_v: (residual(state.vx.as_slice(), dx.as_slice()).powi(2)
                    + residual(state.vy.as_slice(), dy.as_slice()).powi(2))
                .sqrt(),
                wall_ms: 0.0,
            };
            dual_update(&mut state, p, &alpha, &dx, &dy);
            state.iter += 1;

            // A zero previous iterate only counts as converged if the iterate stays zero.
            // The first x-update reproduces a consistently initialized x exactly, so the
            // test starts at the second iteration.
            let first = state.iter == 1;
            let (rel, done) = if prev > T::zero() {
                let rel = change / prev;
                (rel, rel < p.tol && !first)
            } else if change == T::zero() {
                (T::zero(), !first)
            } else {
                (T::infinity(), false)
            };
            state.rel_change = rel;
            trace.records.push(IterationRecord {
                rel_change: rel.to_f64_lossy(),
                wall_ms: start.elapsed().as_secs_f64() * 1e3,
                ..record
            });
            if done {
                return (state, true);
            }
        }
        (state, false)
    }
}

fn residual<T: Scalar>(a: &[T], b: &[T]) -> f64 {
    a.iter().zip(b).map(|(&p, &q)| (p - q) * (p - q)).sum::<T>().sqrt().to_f64_lossy()
}

pub(crate) fn finish<T: Scalar>(
    problem: &Problem<T>,
    state: SolverState<T>,
    trace: ConvergenceTrace,
    converged: bool,
) -> Result<Reconstruction<T>> {
    let (r, c) = problem.original_shape();
    let map = DisparityMap::from_grid_clamped(state.x.crop(r, c))?;
    Ok(Reconstruction { map, trace, state, converged })
}
