//! Interpolation baseline.

use sparsedepth::raster::Grid;
use sparsedepth::sampling::grid_stride;
use sparsedepth::{DisparityMap, Observation};

use crate::error::{BenchError, BenchResult};

/// Bilinear interpolation of lattice samples at stride `round(1/√ξ)` anchored at `(0, 0)`.
///
/// Pixels beyond the last lattice row or column take the value of the nearest lattice line.
pub fn bilinear_from_grid(obs: &Observation<f64>, ratio: f64) -> BenchResult<DisparityMap<f64>> {
    let stride = grid_stride(ratio);
    let (rows, cols) = obs.shape();
    let v = obs.values();
    let mask = obs.mask();
    for i in (0..rows).step_by(stride) {
        for j in (0..cols).step_by(stride) {
            if !mask.get(i, j) {
                return Err(BenchError::config("method", "bilinear interpolation needs every lattice point sampled"));
            }
        }
    }
    let last_r = (rows - 1) / stride * stride;
    let last_c = (cols - 1) / stride * stride;
    let bracket = |k: usize, last: usize| -> (usize, usize, f64) {
        let k0 = (k / stride * stride).min(last);
        let k1 = (k0 + stride).min(last);
        let t = if k1 > k0 { (k - k0) as f64 / (k1 - k0) as f64 } else { 0.0 };
        (k0, k1, t.min(1.0))
    };
    let out = Grid::from_fn(rows, cols, |i, j| {
        let (i0, i1, s) = bracket(i, last_r);
        let (j0, j1, t) = bracket(j, last_c);
        let top = (1.0 - t) * v.get(i0, j0) + t * v.get(i0, j1);
        let bottom = (1.0 - t) * v.get(i1, j0) + t * v.get(i1, j1);
        (1.0 - s) * top + s * bottom
    });
    Ok(DisparityMap::from_grid_clamped(out)?)
}
