use std::sync::Arc;

use num_complex::Complex;
use rustfft::{Fft, FftPlanner};

use crate::raster::Grid;
use crate::Scalar;

/// Planned 2-D FFT for a fixed shape (mixed radix, any size).
#[derive(Clone)]
pub struct Fft2<T: Scalar> {
    rows: usize,
    cols: usize,
    row_fwd: Arc<dyn Fft<T>>,
    row_inv: Arc<dyn Fft<T>>,
    col_fwd: Arc<dyn Fft<T>>,
    col_inv: Arc<dyn Fft<T>>,
}

impl<T: Scalar> std::fmt::Debug for Fft2<T> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "Fft2({}x{})", self.rows, self.cols)
    }
}

impl<T: Scalar> Fft2<T> {
    pub fn new(rows: usize, cols: usize) -> Self {
        let mut planner = FftPlanner::new();
        Self {
            rows,
            cols,
            row_fwd: planner.plan_fft_forward(cols),
            row_inv: planner.plan_fft_inverse(cols),
            col_fwd: planner.plan_fft_forward(rows),
            col_inv: planner.plan_fft_inverse(rows),
        }
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    /// Unnormalized forward transform in place (row-major buffer).
    pub fn forward(&self, buf: &mut [Complex<T>]) {
        self.run(buf, &self.row_fwd, &self.col_fwd);
    }

    /// Inverse transform in place, scaled by `1/N`.
    pub fn inverse(&self, buf: &mut [Complex<T>]) {
        self.run(buf, &self.row_inv, &self.col_inv);
        let s = T::one() / T::from_usize_lossy(self.rows * self.cols);
        for v in buf.iter_mut() {
            *v = *v * s;
        }
    }

    fn run(&self, buf: &mut [Complex<T>], row: &Arc<dyn Fft<T>>, col: &Arc<dyn Fft<T>>) {
        let (r, c) = (self.rows, self.cols);
        assert_eq!(buf.len(), r * c, "FFT buffer does not match plan shape");
        if c > 1 {
            row.process(buf);
        }
        if r > 1 {
            let mut t = vec![Complex::default(); r * c];
            transpose(buf, &mut t, r, c);
            col.process(&mut t);
            transpose(&t, buf, c, r);
        }
    }

    /// Spectrum of a real grid.
    pub fn forward_real(&self, x: &[T]) -> Vec<Complex<T>> {
        let mut buf: Vec<Complex<T>> = x.iter().map(|&v| Complex::new(v, T::zero())).collect();
        self.forward(&mut buf);
        buf
    }

    /// Real part of the inverse transform.
    pub fn inverse_real(&self, mut spec: Vec<Complex<T>>) -> Vec<T> {
        self.inverse(&mut spec);
        spec.into_iter().map(|v| v.re).collect()
    }
}

fn transpose<T: Copy>(src: &[T], dst: &mut [T], rows: usize, cols: usize) {
    const B: usize = 16;
    for i0 in (0..rows).step_by(B) {
        for j0 in (0..cols).step_by(B) {
            for i in i0..(i0 + B).min(rows) {
                for j in j0..(j0 + B).min(cols) {
                    dst[j * rows + i] = src[i * cols + j];
                }
            }
        }
    }
}

/// Forward 2-D DFT of a real grid.
pub fn fft2<T: Scalar>(x: &Grid<T>) -> Grid<Complex<T>> {
    let (r, c) = x.shape();
    let data = Fft2::new(r, c).forward_real(x.as_slice());
    Grid::new(r, c, data).expect("shape preserved")
}

/// Inverse 2-D DFT (normalized).
pub fn ifft2<T: Scalar>(x: &Grid<Complex<T>>) -> Grid<Complex<T>> {
    let (r, c) = x.shape();
    let mut data = x.as_slice().to_vec();
    Fft2::new(r, c).inverse(&mut data);
    Grid::new(r, c, data).expect("shape preserved")
}

/// Real part of the inverse 2-D DFT.
pub fn ifft2_real<T: Scalar>(x: &Grid<Complex<T>>) -> Grid<T> {
    ifft2(x).map(|v| v.re)
}
