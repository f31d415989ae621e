use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use rand_distr::{Distribution, Normal};

use crate::error::{Error, Result};
use crate::raster::{DisparityMap, Grid};
use crate::Scalar;

/// I.i.d. `N(0, sigma^2)` field, reproducible per seed.
pub fn gaussian_field<T: Scalar>(rows: usize, cols: usize, sigma: f64, seed: u64) -> Result<Grid<T>> {
    if !(sigma >= 0.0 && sigma.is_finite()) {
        return Err(Error::Parameter(format!("noise sigma must be non-negative, got {sigma}")));
    }
    if sigma == 0.0 {
        return Ok(Grid::zeros(rows, cols));
    }
    let normal = Normal::new(0.0, sigma).map_err(|e| Error::Parameter(e.to_string()))?;
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    Ok(Grid::from_fn(rows, cols, |_, _| T::lit(normal.sample(&mut rng))))
}

/// Adds i.i.d. Gaussian noise and clamps the result to `[0, 1]`.
pub fn add_gaussian_noise<T: Scalar>(map: &DisparityMap<T>, sigma: f64, seed: u64) -> Result<DisparityMap<T>> {
    let (rows, cols) = map.shape();
    let noise = gaussian_field::<T>(rows, cols, sigma, seed)?;
    DisparityMap::from_grid_clamped(map.grid().add(&noise))
}
