//! Reconstruction quality: MSE, PSNR and bad-pixel percentages.

use crate::error::{Error, Result};
use crate::raster::Grid;
use crate::Scalar;

/// PSNR reported for an exact reconstruction.
pub const PSNR_CAP_DB: f64 = 300.0;
/// Integer disparity range that maps onto `[0, 1]` by default.
pub const DEFAULT_DISPARITY_LEVELS: f64 = 255.0;
/// Bad-pixel thresholds (in disparity levels) reported by [`EvalReport`].
pub const BAD_PIXEL_THRESHOLDS: [f64; 3] = [1.0, 2.0, 3.0];

fn check<T: Scalar>(estimate: &Grid<T>, truth: &Grid<T>) -> Result<()> {
    if estimate.shape() != truth.shape() {
        return Err(Error::Shape { expected: truth.shape(), actual: estimate.shape() });
    }
    if truth.is_empty() {
        return Err(Error::Parameter("metrics of an empty grid".into()));
    }
    Ok(())
}

/// `(1/N) Σ (x̂_j − x_j)²`, accumulated in `f64`.
pub fn mse<T: Scalar>(estimate: &Grid<T>, truth: &Grid<T>) -> Result<f64> {
    check(estimate, truth)?;
    let sum: f64 = estimate
        .as_slice()
        .iter()
        .zip(truth.as_slice())
        .map(|(&a, &b)| {
            let d = a.to_f64_lossy() - b.to_f64_lossy();
            d * d
        })
        .sum();
    Ok(sum / truth.len() as f64)
}

/// `10 log10(peak² / mse)`, or [`PSNR_CAP_DB`] when the MSE vanishes.
pub fn psnr_from_mse(mse: f64, peak: f64) -> f64 {
    if mse <= 0.0 {
        PSNR_CAP_DB
    } else {
        (10.0 * (peak * peak / mse).log10()).min(PSNR_CAP_DB)
    }
}

pub fn psnr<T: Scalar>(estimate: &Grid<T>, truth: &Grid<T>, peak: f64) -> Result<f64> {
    Ok(psnr_from_mse(mse(estimate, truth)?, peak))
}

/// Percentage of pixels with `|x̂_j − x_j| · levels > tau`.
pub fn bad_pixel_pct<T: Scalar>(estimate: &Grid<T>, truth: &Grid<T>, tau: f64, levels: f64) -> Result<f64> {
    check(estimate, truth)?;
    if !(tau > 0.0 && levels > 0.0) {
        return Err(Error::Parameter(format!("bad-pixel threshold {tau} at {levels} levels")));
    }
    let bad = estimate
        .as_slice()
        .iter()
        .zip(truth.as_slice())
        .filter(|(&a, &b)| (a.to_f64_lossy() - b.to_f64_lossy()).abs() * levels > tau)
        .count();
    Ok(100.0 * bad as f64 / truth.len() as f64)
}

/// Summary of one reconstruction.
#[derive(Clone, Debug, PartialEq)]
pub struct EvalReport {
    pub mse: f64,
    pub psnr_db: f64,
    /// `(tau, percentage)` pairs.
    pub bad_pixel_pct: Vec<(f64, f64)>,
}

impl EvalReport {
    /// Evaluates with unit peak and the given disparity scale at [`BAD_PIXEL_THRESHOLDS`].
    pub fn evaluate<T: Scalar>(estimate: &Grid<T>, truth: &Grid<T>, levels: f64) -> Result<Self> {
        let mse = mse(estimate, truth)?;
        let bad_pixel_pct = BAD_PIXEL_THRESHOLDS
            .iter()
            .map(|&t| bad_pixel_pct(estimate, truth, t, levels).map(|p| (t, p)))
            .collect::<Result<_>>()?;
        Ok(Self { mse, psnr_db: psnr_from_mse(mse, 1.0), bad_pixel_pct })
    }

    /// Percentage at threshold `tau`, if reported.
    pub fn bad_at(&self, tau: f64) -> Option<f64> {
        self.bad_pixel_pct.iter().find(|(t, _)| *t == tau).map(|(_, p)| *p)
    }

    /// Column names matching [`csv_row`](Self::csv_row).
    pub fn csv_header() -> String {
        let mut cols = vec!["mse".to_string(), "psnr_db".to_string()];
        cols.extend(BAD_PIXEL_THRESHOLDS.iter().map(|t| format!("bad_{t}")));
        cols.join(",")
    }

    pub fn csv_row(&self) -> String {
        let mut cols = vec![format!("{:.6e}", self.mse), format!("{:.4}", self.psnr_db)];
        cols.extend(self.bad_pixel_pct.iter().map(|(_, p)| format!("{p:.4}")));
        cols.join(",")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn closed_forms() {
        let t = Grid::filled(4, 4, 0.0f64);
        let e = Grid::filled(4, 4, 0.5f64);
        assert_eq!(mse(&e, &t).unwrap(), 0.25);
        assert_eq!(psnr(&t, &t, 1.0).unwrap(), PSNR_CAP_DB);
        assert!((psnr_from_mse(0.01, 1.0) - 20.0).abs() < 1e-12);
        assert!((psnr_from_mse(1e-5, 1.0) - 50.0).abs() < 1e-9);
    }

    #[test]
    fn shape_mismatch() {
        let a = Grid::filled(2, 3, 0.0f64);
        let b = Grid::filled(3, 2, 0.0f64);
        assert!(matches!(mse(&a, &b), Err(Error::Shape { .. })));
    }
}
