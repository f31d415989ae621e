use std::sync::Arc;

use crate::error::{Error, Result};
use crate::frames::{CoeffLayout, CoefficientSet, Orientation};
use crate::raster::Grid;
use crate::Scalar;

/// Orthonormal separable Daubechies-2 wavelet transform with periodic extension.
#[derive(Clone, Debug)]
pub struct Wavelet<T: Scalar> {
    rows: usize,
    cols: usize,
    levels: u32,
    lo: [T; 4],
    hi: [T; 4],
    layout: Arc<CoeffLayout>,
}

/// Daubechies-2 scaling filter.
pub(crate) fn db2_lowpass() -> [f64; 4] {
    let s3 = 3f64.sqrt();
    let d = 4.0 * 2f64.sqrt();
    [(1.0 + s3) / d, (3.0 + s3) / d, (3.0 - s3) / d, (1.0 - s3) / d]
}

impl<T: Scalar> Wavelet<T> {
    pub fn new(rows: usize, cols: usize, levels: u32) -> Result<Self> {
        let m = 1usize << levels;
        for size in [rows, cols] {
            if size == 0 || size % m != 0 {
                return Err(Error::Dimension { size, multiple: m });
            }
        }
        let h = db2_lowpass();
        let lo = h.map(T::lit);
        // Quadrature mirror: g[k] = (-1)^k h[3 - k].
        let hi = [T::lit(h[3]), T::lit(-h[2]), T::lit(h[1]), T::lit(-h[0])];
        let mut entries = vec![(levels, Orientation::Lowpass, rows >> levels, cols >> levels)];
        for level in (1..=levels).rev() {
            let (r, c) = (rows >> level, cols >> level);
            for o in [Orientation::Horizontal, Orientation::Vertical, Orientation::Diagonal] {
                entries.push((level, o, r, c));
            }
        }
        Ok(Self { rows, cols, levels, lo, hi, layout: Arc::new(CoeffLayout::new(entries)) })
    }

    pub fn levels(&self) -> u32 {
        self.levels
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn layout(&self) -> &Arc<CoeffLayout> {
        &self.layout
    }

    pub fn analysis(&self, x: &Grid<T>) -> CoefficientSet<T> {
        assert_eq!(x.shape(), (self.rows, self.cols), "wavelet input shape");
        // Mallat layout in a scratch copy.
        let mut buf = x.as_slice().to_vec();
        let stride = self.cols;
        let mut line = Vec::new();
        let mut out = Vec::new();
        for level in 0..self.levels {
            let (r, c) = (self.rows >> level, self.cols >> level);
            for i in 0..r {
                line.clear();
                line.extend_from_slice(&buf[i * stride..i * stride + c]);
                self.split(&line, &mut out);
                buf[i * stride..i * stride + c].copy_from_slice(&out);
            }
            for j in 0..c {
                line.clear();
                line.extend((0..r).map(|i| buf[i * stride + j]));
                self.split(&line, &mut out);
                for (i, &v) in out.iter().enumerate() {
                    buf[i * stride + j] = v;
                }
            }
        }
        let mut set = CoefficientSet::zeros(self.layout.clone());
        for (k, band) in self.layout.bands().iter().enumerate() {
            let (r0, c0) = self.band_origin(band.level, band.orientation, band.rows, band.cols);
            let dst = set.band_mut(k);
            for i in 0..band.rows {
                dst[i * band.cols..(i + 1) * band.cols]
                    .copy_from_slice(&buf[(r0 + i) * stride + c0..(r0 + i) * stride + c0 + band.cols]);
            }
        }
        set
    }

    pub fn synthesis(&self, coeffs: &CoefficientSet<T>) -> Grid<T> {
        assert_eq!(coeffs.len(), self.layout.total(), "wavelet coefficient count");
        let stride = self.cols;
        let mut buf = vec![T::zero(); self.rows * self.cols];
        for (k, band) in self.layout.bands().iter().enumerate() {
            let (r0, c0) = self.band_origin(band.level, band.orientation, band.rows, band.cols);
            let src = coeffs.band(k);
            for i in 0..band.rows {
                buf[(r0 + i) * stride + c0..(r0 + i) * stride + c0 + band.cols]
                    .copy_from_slice(&src[i * band.cols..(i + 1) * band.cols]);
            }
        }
        let mut line = Vec::new();
        let mut out = Vec::new();
        for level in (0..self.levels).rev() {
            let (r, c) = (self.rows >> level, self.cols >> level);
            for j in 0..c {
                line.clear();
                line.extend((0..r).map(|i| buf[i * stride + j]));
                self.merge(&line, &mut out);
                for (i, &v) in out.iter().enumerate() {
                    buf[i * stride + j] = v;
                }
            }
            for i in 0..r {
                line.clear();
                line.extend_from_slice(&buf[i * stride..i * stride + c]);
                self.merge(&line, &mut out);
                buf[i * stride..i * stride + c].copy_from_slice(&out);
            }
        }
        Grid::new(self.rows, self.cols, buf).expect("shape preserved")
    }

    fn band_origin(&self, level: u32, o: Orientation, r: usize, c: usize) -> (usize, usize) {
        debug_assert!(level >= 1);
        match o {
            Orientation::Lowpass => (0, 0),
            Orientation::Horizontal => (r, 0),
            Orientation::Vertical => (0, c),
            _ => (r, c),
        }
    }

    /// One periodic analysis step: `[approx | detail]`.
    fn split(&self, x: &[T], out: &mut Vec<T>) {
        let n = x.len();
        let half = n / 2;
        out.clear();
        out.resize(n, T::zero());
        for k in 0..half {
            let (mut a, mut d) = (T::zero(), T::zero());
            for m in 0..4 {
                let v = x[(2 * k + m) % n];
                a = a + self.lo[m] * v;
                d = d + self.hi[m] * v;
            }
            out[k] = a;
            out[half + k] = d;
        }
    }

    /// Transpose of [`split`](Self::split).
    fn merge(&self, x: &[T], out: &mut Vec<T>) {
        let n = x.len();
        let half = n / 2;
        out.clear();
        out.resize(n, T::zero());
        for k in 0..half {
            let (a, d) = (x[k], x[half + k]);
            for m in 0..4 {
                let idx = (2 * k + m) % n;
                out[idx] = out[idx] + self.lo[m] * a + self.hi[m] * d;
            }
        }
    }
}
