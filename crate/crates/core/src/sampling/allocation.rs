use crate::error::{Error, Result};
use crate::raster::{Grid, Mask};
use crate::sampling::pattern::check_ratio;

/// Non-negative per-pixel importance weights `a_j`.
#[derive(Clone, Debug, PartialEq)]
pub struct SaliencyField {
    a: Grid<f64>,
}

impl SaliencyField {
    /// Validates that every weight is finite and non-negative.
    pub fn new(a: Grid<f64>) -> Result<Self> {
        match a.as_slice().iter().find(|v| !(v.is_finite() && **v >= 0.0)) {
            Some(v) => Err(Error::Range(format!("saliency weight {v} is not finite and non-negative"))),
            None => Ok(Self { a }),
        }
    }

    pub(crate) fn from_grid_unchecked(a: Grid<f64>) -> Self {
        debug_assert!(a.as_slice().iter().all(|v| *v >= 0.0));
        Self { a }
    }

    pub fn grid(&self) -> &Grid<f64> {
        &self.a
    }

    pub fn into_grid(self) -> Grid<f64> {
        self.a
    }

    pub fn shape(&self) -> (usize, usize) {
        self.a.shape()
    }

    pub fn max(&self) -> f64 {
        self.a.as_slice().iter().fold(0.0, |m, &v| m.max(v))
    }

    /// Number of strictly positive weights.
    pub fn support(&self) -> usize {
        self.a.as_slice().iter().filter(|v| **v > 0.0).count()
    }

    /// True when every weight is zero.
    pub fn is_degenerate(&self) -> bool {
        self.support() == 0
    }

    /// Copy with the weights on `mask` set to zero.
    pub fn masked_out(&self, mask: &Mask) -> Self {
        Self { a: self.a.zip_map(mask, |v, m| if m { 0.0 } else { v }) }
    }
}

/// Neumaier-compensated running sum.
#[derive(Default, Clone, Copy)]
struct Neumaier {
    sum: f64,
    comp: f64,
}

impl Neumaier {
    fn add(&mut self, v: f64) {
        let t = self.sum + v;
        if self.sum.abs() >= v.abs() {
            self.comp += (self.sum - t) + v;
        } else {
            self.comp += (v - t) + self.sum;
        }
        self.sum = t;
    }

    fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

/// Root of `g(τ) = Σ min(τ a_j, 1) − ξN`.
///
/// `g` is piecewise linear with breakpoints `1/a_j`; sorting the weights in decreasing
/// order, the root lies in the first segment where the largest unsaturated weight
/// satisfies `τ a ≤ 1`, and is closed-form there.
pub fn solve_tau(a: &SaliencyField, xi: f64) -> Result<f64> {
    check_ratio(xi, true)?;
    let n = a.grid().len();
    let budget = xi * n as f64;
    let mut sorted: Vec<f64> = a.grid().as_slice().iter().copied().filter(|v| *v > 0.0).collect();
    if (sorted.len() as f64) < budget * (1.0 - 1e-12) {
        return Err(Error::InfeasibleBudget(format!(
            "{} nonzero weights cannot carry an expected {budget} samples",
            sorted.len()
        )));
    }
    sorted.sort_unstable_by(|x, y| y.total_cmp(x));
    let k_max = sorted.len();
    // suffix[k] = Σ_{i ≥ k} sorted[i], accumulated from the smallest entries upward.
    let mut suffix = vec![0.0; k_max + 1];
    let mut acc = Neumaier::default();
    for k in (0..k_max).rev() {
        acc.add(sorted[k]);
        suffix[k] = acc.value();
    }
    for (k, &ak) in sorted.iter().enumerate() {
        let remaining = budget - k as f64;
        if remaining <= 0.0 {
            break;
        }
        let tau = remaining / suffix[k];
        if tau * ak <= 1.0 {
            return Ok(tau);
        }
    }
    Ok(1.0 / sorted[k_max - 1])
}

/// Variance-optimal probabilities `p_j = min(τ a_j, 1)` with mean ξ.
pub fn optimal_probs(a: &SaliencyField, xi: f64) -> Result<Grid<f64>> {
    let tau = solve_tau(a, xi)?;
    Ok(a.grid().map(|v| (tau * v).min(1.0)))
}

/// [`optimal_probs`] with a fallback for infeasible or degenerate weights.
///
/// When too few weights are positive, every positive-weight pixel gets `p = 1` and the
/// leftover budget is spread evenly over the remaining pixels allowed by `eligible`
/// (all pixels when `None`). The second value reports whether the fallback was used.
pub fn allocate_probs(a: &SaliencyField, xi: f64, eligible: Option<&Mask>) -> Result<(Grid<f64>, bool)> {
    match optimal_probs(a, xi) {
        Ok(p) => return Ok((p, false)),
        Err(Error::InfeasibleBudget(_)) => {}
        Err(e) => return Err(e),
    }
    let grid = a.grid();
    let (rows, cols) = grid.shape();
    let allowed = |i: usize, j: usize| eligible.is_none_or(|m| m.get(i, j));
    let support = a.support();
    let pool = (0..rows)
        .flat_map(|i| (0..cols).map(move |j| (i, j)))
        .filter(|&(i, j)| grid.get(i, j) == 0.0 && allowed(i, j))
        .count();
    let leftover = xi * grid.len() as f64 - support as f64;
    if pool == 0 || leftover > pool as f64 * (1.0 + 1e-12) {
        return Err(Error::InfeasibleBudget(format!(
            "only {} pixels are eligible for an expected {} samples",
            support + pool,
            xi * grid.len() as f64
        )));
    }
    let fill = (leftover / pool as f64).min(1.0);
    let p = Grid::from_fn(rows, cols, |i, j| {
        if grid.get(i, j) > 0.0 {
            1.0
        } else if allowed(i, j) {
            fill
        } else {
            0.0
        }
    });
    Ok((p, true))
}

/// Inverse-probability estimate `Y = (1/N) Σ a_j I_j / p_j` of the mean weight.
pub fn mean_estimate(a: &SaliencyField, mask: &Mask, probs: &Grid<f64>) -> f64 {
    let n = a.grid().len() as f64;
    let mut acc = Neumaier::default();
    for ((&aj, &m), &p) in a.grid().as_slice().iter().zip(mask.as_slice()).zip(probs.as_slice()) {
        if m && aj > 0.0 {
            acc.add(aj / p);
        }
    }
    acc.value() / n
}

/// Variance of [`mean_estimate`] scaled by `N`: `(1/N) Σ a_j² (1 − p_j) / p_j`.
///
/// Infinite when a positive weight has zero probability.
pub fn estimator_variance(a: &SaliencyField, probs: &Grid<f64>) -> f64 {
    let n = a.grid().len() as f64;
    let mut acc = Neumaier::default();
    for (&aj, &p) in a.grid().as_slice().iter().zip(probs.as_slice()) {
        if aj > 0.0 {
            if p <= 0.0 {
                return f64::INFINITY;
            }
            acc.add(aj * aj * (1.0 - p) / p);
        }
    }
    acc.value() / n
}
