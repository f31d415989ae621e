use num_complex::Complex;

use crate::frames::Fft2;
use crate::raster::Grid;
use crate::Scalar;

/// Periodic forward differences `D = [D_x; D_y]` with the spectrum of `DᵀD`.
#[derive(Clone, Debug)]
pub struct DiffOperator<T: Scalar> {
    rows: usize,
    cols: usize,
    spectrum: Grid<T>,
}

impl<T: Scalar> DiffOperator<T> {
    pub fn new(rows: usize, cols: usize) -> Self {
        let two = T::lit(2.0);
        let tau = T::TAU();
        let spectrum = Grid::from_fn(rows, cols, |ky, kx| {
            let wx = tau * T::from_usize_lossy(kx) / T::from_usize_lossy(cols);
            let wy = tau * T::from_usize_lossy(ky) / T::from_usize_lossy(rows);
            (two - two * wx.cos()) + (two - two * wy.cos())
        });
        Self { rows, cols, spectrum }
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    /// Eigenvalues of `DᵀD` on the 2-D DFT grid (`|F(D)|²`).
    pub fn spectrum(&self) -> &Grid<T> {
        &self.spectrum
    }

    /// `(D_x x, D_y x)` with wrap-around.
    pub fn apply(&self, x: &Grid<T>) -> (Grid<T>, Grid<T>) {
        let (r, c) = (self.rows, self.cols);
        assert_eq!(x.shape(), (r, c));
        let dx = Grid::from_fn(r, c, |i, j| x.get(i, (j + 1) % c) - x.get(i, j));
        let dy = Grid::from_fn(r, c, |i, j| x.get((i + 1) % r, j) - x.get(i, j));
        (dx, dy)
    }

    /// `D_xᵀ px + D_yᵀ py`.
    pub fn adjoint(&self, px: &Grid<T>, py: &Grid<T>) -> Grid<T> {
        let (r, c) = (self.rows, self.cols);
        assert_eq!(px.shape(), (r, c));
        assert_eq!(py.shape(), (r, c));
        Grid::from_fn(r, c, |i, j| {
            px.get(i, (j + c - 1) % c) - px.get(i, j) + py.get((i + r - 1) % r, j) - py.get(i, j)
        })
    }

    /// `DᵀD v` evaluated through the spectrum.
    pub fn gram_fft(&self, v: &Grid<T>, fft: &Fft2<T>) -> Grid<T> {
        let mut s = fft.forward_real(v.as_slice());
        for (z, &l) in s.iter_mut().zip(self.spectrum.as_slice()) {
            *z = *z * Complex::new(l, T::zero());
        }
        Grid::new(self.rows, self.cols, fft.inverse_real(s)).expect("shape preserved")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_map_has_zero_gradient() {
        let d = DiffOperator::<f64>::new(5, 6);
        let (dx, dy) = d.apply(&Grid::filled(5, 6, 0.4));
        assert_eq!(dx.max_abs(), 0.0);
        assert_eq!(dy.max_abs(), 0.0);
    }

    #[test]
    fn vertical_step_hits_two_columns() {
        let d = DiffOperator::<f64>::new(8, 8);
        let x = Grid::from_fn(8, 8, |_, j| if j < 3 { 0.0 } else { 1.0 });
        let (dx, dy) = d.apply(&x);
        let cols: Vec<usize> = (0..8).filter(|&j| dx.get(0, j) != 0.0).collect();
        assert_eq!(cols, vec![2, 7]);
        assert_eq!(dy.max_abs(), 0.0);
    }

    #[test]
    fn spectrum_nonnegative_with_zero_dc() {
        let d = DiffOperator::<f64>::new(7, 9);
        assert_eq!(d.spectrum().get(0, 0), 0.0);
        assert!(d.spectrum().as_slice().iter().all(|&v| v >= 0.0));
    }
}
