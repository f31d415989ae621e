use crate::error::{Error, Result};
use crate::raster::{Grid, Mask};
use crate::Scalar;

/// Disparity map normalized to `[0, 1]`, at least 2x2.
#[derive(Clone, Debug, PartialEq)]
pub struct DisparityMap<T> {
    grid: Grid<T>,
}

impl<T: Scalar> DisparityMap<T> {
    /// Builds a map from row-major data, rejecting values outside `[0, 1]`.
    pub fn new(width: usize, height: usize, data: Vec<T>) -> Result<Self> {
        Self::from_grid(Grid::new(height, width, data)?)
    }

    pub fn from_grid(grid: Grid<T>) -> Result<Self> {
        if grid.rows() < 2 || grid.cols() < 2 {
            return Err(Error::Parameter(format!(
                "disparity map must be at least 2x2, got {}x{}",
                grid.cols(),
                grid.rows()
            )));
        }
        if let Some(v) = grid.as_slice().iter().find(|v| !(**v >= T::zero() && **v <= T::one())) {
            return Err(Error::Range(format!("disparity value {v} outside [0, 1]")));
        }
        Ok(Self { grid })
    }

    /// Clamps into `[0, 1]` (NaN becomes 0).
    pub fn from_grid_clamped(grid: Grid<T>) -> Result<Self> {
        Self::from_grid(grid.map(|v| if v.is_nan() { T::zero() } else { v.max(T::zero()).min(T::one()) }))
    }

    pub fn constant(width: usize, height: usize, value: T) -> Result<Self> {
        Self::from_grid(Grid::filled(height, width, value))
    }

    #[inline]
    pub fn width(&self) -> usize {
        self.grid.cols()
    }

    #[inline]
    pub fn height(&self) -> usize {
        self.grid.rows()
    }

    #[inline]
    pub fn shape(&self) -> (usize, usize) {
        self.grid.shape()
    }

    #[inline]
    pub fn grid(&self) -> &Grid<T> {
        &self.grid
    }

    #[inline]
    pub fn as_slice(&self) -> &[T] {
        self.grid.as_slice()
    }

    pub fn into_grid(self) -> Grid<T> {
        self.grid
    }

    pub fn cast<U: Scalar>(&self) -> DisparityMap<U> {
        DisparityMap { grid: self.grid.cast::<U>().clamp01() }
    }
}

/// Sparse observation `b = S x`: sampled values, zero elsewhere.
#[derive(Clone, Debug, PartialEq)]
pub struct Observation<T> {
    values: Grid<T>,
    mask: Mask,
}

impl<T: Scalar> Observation<T> {
    /// Validates that unsampled entries are zero.
    pub fn new(values: Grid<T>, mask: Mask) -> Result<Self> {
        values.check_shape(mask.shape())?;
        let stray = values.as_slice().iter().zip(mask.as_slice()).any(|(&v, &m)| !m && v != T::zero());
        if stray {
            return Err(Error::Parameter("observation has nonzero values outside the mask".into()));
        }
        Ok(Self { values, mask })
    }

    /// Samples `truth` on `mask`.
    pub fn sample(truth: &Grid<T>, mask: &Mask) -> Result<Self> {
        truth.check_shape(mask.shape())?;
        let values = truth.zip_map(mask, |v, m| if m { v } else { T::zero() });
        Ok(Self { values, mask: mask.clone() })
    }

    #[inline]
    pub fn values(&self) -> &Grid<T> {
        &self.values
    }

    #[inline]
    pub fn mask(&self) -> &Mask {
        &self.mask
    }

    #[inline]
    pub fn shape(&self) -> (usize, usize) {
        self.values.shape()
    }

    /// Merges two observations with disjoint masks.
    pub fn merge(&self, other: &Self) -> Result<Self> {
        other.values.check_shape(self.shape())?;
        if !self.mask.is_disjoint(&other.mask) {
            return Err(Error::Parameter("merged observations overlap".into()));
        }
        Ok(Self { values: self.values.add(&other.values), mask: self.mask.union(&other.mask) })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_out_of_range() {
        assert!(DisparityMap::new(2, 2, vec![0.0, 0.5, 1.0, 1.2f64]).is_err());
        assert!(DisparityMap::new(2, 2, vec![0.0, 0.5, 1.0, f64::NAN]).is_err());
        assert!(DisparityMap::new(1, 4, vec![0.0f64; 4]).is_err());
        assert!(DisparityMap::new(2, 2, vec![0.0, 0.5, 1.0, 0.25f64]).is_ok());
    }

    #[test]
    fn observation_zero_off_mask() {
        let truth = Grid::filled(2, 2, 0.7f64);
        let mask = Grid::new(2, 2, vec![true, false, false, true]).unwrap();
        let obs = Observation::sample(&truth, &mask).unwrap();
        assert_eq!(obs.values().as_slice(), &[0.7, 0.0, 0.0, 0.7]);
        assert!(Observation::new(truth, mask).is_err());
    }
}
