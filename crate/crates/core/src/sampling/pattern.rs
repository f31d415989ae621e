use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;

use crate::error::{Error, Result};
use crate::raster::{DisparityMap, Grid, Mask, Observation};
use crate::sampling::SaliencyField;
use crate::Scalar;

/// A binary sampling mask together with the probabilities that generated it.
///
/// Deterministic patterns carry the mask indicator as their probabilities and no seed.
#[derive(Clone, Debug, PartialEq)]
pub struct SamplingPattern {
    mask: Mask,
    probs: Grid<f64>,
    target_ratio: f64,
    seed: Option<u64>,
    degenerate: bool,
}

impl SamplingPattern {
    /// Wraps a fixed mask.
    pub fn deterministic(mask: Mask, target_ratio: f64) -> Self {
        let probs = mask.indicator();
        Self { mask, probs, target_ratio, seed: None, degenerate: false }
    }

    /// Assembles a pattern from precomputed parts; `probs` must lie in `[0, 1]`.
    pub fn from_parts(mask: Mask, probs: Grid<f64>, target_ratio: f64, seed: Option<u64>) -> Result<Self> {
        probs.check_shape(mask.shape())?;
        check_probs(&probs)?;
        Ok(Self { mask, probs, target_ratio, seed, degenerate: false })
    }

    pub(crate) fn flag_degenerate(mut self) -> Self {
        self.degenerate = true;
        self
    }

    pub fn mask(&self) -> &Mask {
        &self.mask
    }

    pub fn probs(&self) -> &Grid<f64> {
        &self.probs
    }

    pub fn shape(&self) -> (usize, usize) {
        self.mask.shape()
    }

    /// Requested ratio ξ.
    pub fn target_ratio(&self) -> f64 {
        self.target_ratio
    }

    /// Fraction of pixels actually sampled.
    pub fn realized_ratio(&self) -> f64 {
        self.mask.ratio()
    }

    pub fn sample_count(&self) -> usize {
        self.mask.count()
    }

    pub fn seed(&self) -> Option<u64> {
        self.seed
    }

    pub fn is_probabilistic(&self) -> bool {
        self.seed.is_some()
    }

    /// Set when the construction had no usable saliency (e.g. a flat image).
    pub fn is_degenerate(&self) -> bool {
        self.degenerate
    }

    /// Samples `truth` on this mask.
    pub fn observe<T: Scalar>(&self, truth: &Grid<T>) -> Result<Observation<T>> {
        Observation::sample(truth, &self.mask)
    }

    pub fn into_mask(self) -> Mask {
        self.mask
    }
}

pub(crate) fn check_ratio(xi: f64, allow_one: bool) -> Result<()> {
    let ok = xi.is_finite() && xi > 0.0 && (xi < 1.0 || (allow_one && xi == 1.0));
    if ok {
        Ok(())
    } else {
        let hi = if allow_one { "]" } else { ")" };
        Err(Error::Parameter(format!("sampling ratio {xi} outside (0, 1{hi}")))
    }
}

fn check_probs(probs: &Grid<f64>) -> Result<()> {
    match probs.as_slice().iter().find(|p| !(0.0..=1.0).contains(*p)) {
        Some(p) => Err(Error::Range(format!("sampling probability {p} outside [0, 1]"))),
        None => Ok(()),
    }
}

/// Constant probability ξ on every pixel.
pub fn uniform_probs(shape: (usize, usize), xi: f64) -> Result<Grid<f64>> {
    check_ratio(xi, false)?;
    Ok(Grid::filled(shape.0, shape.1, xi))
}

/// Bernoulli pattern with `p_j = ξ`.
pub fn uniform_pattern(shape: (usize, usize), xi: f64, seed: u64) -> Result<SamplingPattern> {
    draw_pattern(&uniform_probs(shape, xi)?, seed)
}

/// Regular lattice with stride `round(1/√ξ)` in both directions, anchored at `(0, 0)`.
pub fn grid_pattern(shape: (usize, usize), xi: f64) -> Result<SamplingPattern> {
    check_ratio(xi, true)?;
    let stride = grid_stride(xi);
    let mask = Grid::from_fn(shape.0, shape.1, |i, j| i % stride == 0 && j % stride == 0);
    Ok(SamplingPattern::deterministic(mask, xi))
}

/// Lattice stride used by [`grid_pattern`].
pub fn grid_stride(xi: f64) -> usize {
    ((1.0 / xi.sqrt()).round() as usize).max(1)
}

/// Independent Bernoulli draws `mask_j ~ B(p_j)`, reproducible per seed.
pub fn draw_pattern(probs: &Grid<f64>, seed: u64) -> Result<SamplingPattern> {
    check_probs(probs)?;
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let mask = probs.map(|p| rng.random::<f64>() < p);
    let target = probs.as_slice().iter().sum::<f64>() / probs.len().max(1) as f64;
    Ok(SamplingPattern { mask, probs: probs.clone(), target_ratio: target, seed: Some(seed), degenerate: false })
}

/// Per-pixel `√((D_x x)² + (D_y x)²)` with periodic forward differences.
pub fn gradient_magnitude<T: Scalar>(x: &DisparityMap<T>) -> SaliencyField {
    let g = x.grid();
    let (r, c) = g.shape();
    let field = Grid::from_fn(r, c, |i, j| {
        let v = g.get(i, j).to_f64_lossy();
        let dx = g.get(i, (j + 1) % c).to_f64_lossy() - v;
        let dy = g.get((i + 1) % r, j).to_f64_lossy() - v;
        dx.hypot(dy)
    });
    SaliencyField::from_grid_unchecked(field)
}

/// Two-sided edge strength `√(½ Σ d²)` over the four periodic differences incident on
/// each pixel (forward and backward, both axes).
///
/// Unlike [`gradient_magnitude`], a jump between two pixels is credited to both of them;
/// on a linear ramp the two agree.
pub fn edge_magnitude<T: Scalar>(x: &DisparityMap<T>) -> SaliencyField {
    let g = x.grid();
    let (r, c) = g.shape();
    let at = |i: usize, j: usize| g.get(i, j).to_f64_lossy();
    let field = Grid::from_fn(r, c, |i, j| {
        let v = at(i, j);
        let d = [
            at(i, (j + 1) % c) - v,
            v - at(i, (j + c - 1) % c),
            at((i + 1) % r, j) - v,
            v - at((i + r - 1) % r, j),
        ];
        (0.5 * d.iter().map(|e| e * e).sum::<f64>()).sqrt()
    });
    SaliencyField::from_grid_unchecked(field)
}

/// Deterministic mask `{ j : ∇x_j > α‖∇x‖_∞ }`.
///
/// A flat map yields an empty mask flagged as degenerate.
pub fn greedy_pattern<T: Scalar>(x: &DisparityMap<T>, alpha: f64) -> Result<SamplingPattern> {
    if !(0.0..1.0).contains(&alpha) {
        return Err(Error::Parameter(format!("greedy threshold {alpha} outside [0, 1)")));
    }
    let grad = gradient_magnitude(x);
    let peak = grad.max();
    let mask = grad.grid().map(|a| peak > 0.0 && a > alpha * peak);
    let ratio = mask.ratio();
    let pattern = SamplingPattern::deterministic(mask, ratio);
    Ok(if peak > 0.0 { pattern } else { pattern.flag_degenerate() })
}
