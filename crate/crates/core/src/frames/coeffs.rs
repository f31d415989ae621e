use std::sync::Arc;

use crate::error::{Error, Result};
use crate::Scalar;

/// Subband orientation label.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Orientation {
    /// Coarsest approximation band (excluded from the sparsity penalty).
    Lowpass,
    /// Wavelet detail, highpass across rows (responds to horizontal edges).
    Horizontal,
    /// Wavelet detail, highpass across columns (responds to vertical edges).
    Vertical,
    /// Wavelet detail, highpass in both directions.
    Diagonal,
    /// Undivided pyramid bandpass (directional depth 0).
    Bandpass,
    /// Directional band `index` of `count` (`count` is a power of two >= 2).
    Directional { index: u32, count: u32 },
}

impl Orientation {
    /// Edge-angle bracket in degrees (counter-clockwise from the x axis, y pointing up)
    /// covered by a directional band.
    ///
    /// Bands `0..count/2` cover `[45, 135]`, bands `count/2..count` cover `[-45, 45]`.
    pub fn bracket_degrees(&self) -> Option<(f64, f64)> {
        let Orientation::Directional { index, count } = *self else {
            return None;
        };
        let half = (count / 2) as f64;
        let k = (index % (count / 2)) as f64;
        let lo = (-1.0 + 2.0 * k / half).atan().to_degrees();
        let hi = (-1.0 + 2.0 * (k + 1.0) / half).atan().to_degrees();
        Some(if index < count / 2 { (90.0 - hi, 90.0 - lo) } else { (lo, hi) })
    }

    /// True if `deg` (taken modulo 180) lies in the band's bracket.
    pub fn contains_angle(&self, deg: f64) -> bool {
        let Some((lo, hi)) = self.bracket_degrees() else {
            return false;
        };
        [-180.0, 0.0, 180.0].iter().any(|s| {
            let d = deg + s;
            d >= lo - 1e-9 && d <= hi + 1e-9
        })
    }

    fn code(&self) -> u32 {
        match *self {
            Orientation::Lowpass => 0,
            Orientation::Horizontal => 1,
            Orientation::Vertical => 2,
            Orientation::Diagonal => 3,
            Orientation::Bandpass => 4,
            Orientation::Directional { index, count } => 0x8000_0000 | (count.trailing_zeros() << 16) | index,
        }
    }

    fn from_code(code: u32) -> Result<Self> {
        Ok(match code {
            0 => Orientation::Lowpass,
            1 => Orientation::Horizontal,
            2 => Orientation::Vertical,
            3 => Orientation::Diagonal,
            4 => Orientation::Bandpass,
            c if c & 0x8000_0000 != 0 => {
                Orientation::Directional { index: c & 0xFFFF, count: 1 << ((c >> 16) & 0x7FFF) }
            }
            c => return Err(Error::Format(format!("unknown orientation code {c}"))),
        })
    }
}

/// One subband: scale index (1 = finest), orientation and storage window.
#[derive(Clone, Debug, PartialEq)]
pub struct Band {
    pub level: u32,
    pub orientation: Orientation,
    pub rows: usize,
    pub cols: usize,
    pub offset: usize,
}

impl Band {
    pub fn len(&self) -> usize {
        self.rows * self.cols
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn is_lowpass(&self) -> bool {
        self.orientation == Orientation::Lowpass
    }
}

/// Ordered subband table of a dictionary together with its weight mask.
#[derive(Clone, Debug, PartialEq)]
pub struct CoeffLayout {
    bands: Vec<Band>,
    total: usize,
    weights: Vec<bool>,
}

impl CoeffLayout {
    /// Builds a layout from `(level, orientation, rows, cols)` entries in storage order.
    pub fn new(entries: impl IntoIterator<Item = (u32, Orientation, usize, usize)>) -> Self {
        let mut bands = Vec::new();
        let mut offset = 0;
        for (level, orientation, rows, cols) in entries {
            bands.push(Band { level, orientation, rows, cols, offset });
            offset += rows * cols;
        }
        let mut weights = vec![true; offset];
        for b in bands.iter().filter(|b| b.is_lowpass()) {
            weights[b.offset..b.offset + b.len()].fill(false);
        }
        Self { bands, total: offset, weights }
    }

    pub fn bands(&self) -> &[Band] {
        &self.bands
    }

    /// Total coefficient count `M`.
    pub fn total(&self) -> usize {
        self.total
    }

    /// `false` on lowpass coefficients, `true` elsewhere.
    pub fn weight_mask(&self) -> &[bool] {
        &self.weights
    }
}

/// Flat coefficient vector tagged with its layout.
#[derive(Clone, Debug, PartialEq)]
pub struct CoefficientSet<T> {
    layout: Arc<CoeffLayout>,
    data: Vec<T>,
}

impl<T: Scalar> CoefficientSet<T> {
    pub fn zeros(layout: Arc<CoeffLayout>) -> Self {
        let data = vec![T::zero(); layout.total()];
        Self { layout, data }
    }

    pub fn from_vec(layout: Arc<CoeffLayout>, data: Vec<T>) -> Result<Self> {
        if data.len() != layout.total() {
            return Err(Error::Parameter(format!(
                "{} coefficients for a layout of {}",
                data.len(),
                layout.total()
            )));
        }
        Ok(Self { layout, data })
    }

    pub fn layout(&self) -> &Arc<CoeffLayout> {
        &self.layout
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn as_slice(&self) -> &[T] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [T] {
        &mut self.data
    }

    pub fn into_vec(self) -> Vec<T> {
        self.data
    }

    pub fn band(&self, k: usize) -> &[T] {
        let b = &self.layout.bands()[k];
        &self.data[b.offset..b.offset + b.len()]
    }

    pub fn band_mut(&mut self, k: usize) -> &mut [T] {
        let b = &self.layout.bands()[k];
        let (o, n) = (b.offset, b.len());
        &mut self.data[o..o + n]
    }

    pub fn dot(&self, other: &Self) -> T {
        self.data.iter().zip(&other.data).map(|(&a, &b)| a * b).sum()
    }

    pub fn norm(&self) -> T {
        self.dot(self).sqrt()
    }

    /// Sum of squares per band.
    pub fn band_energies(&self) -> Vec<T> {
        (0..self.layout.bands().len())
            .map(|k| self.band(k).iter().map(|&v| v * v).sum())
            .collect()
    }

    /// Debug blob: magic `CSET`, band count, then per band
    /// `level, orientation, rows, cols` (u32 LE) and row-major f64 LE samples.
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = b"CSET".to_vec();
        out.extend_from_slice(&(self.layout.bands().len() as u32).to_le_bytes());
        for (k, b) in self.layout.bands().iter().enumerate() {
            for v in [b.level, b.orientation.code(), b.rows as u32, b.cols as u32] {
                out.extend_from_slice(&v.to_le_bytes());
            }
            for &v in self.band(k) {
                out.extend_from_slice(&v.to_f64_lossy().to_le_bytes());
            }
        }
        out
    }

    /// Parses a blob produced by [`to_bytes`](Self::to_bytes).
    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        let mut pos = 0usize;
        let mut take = |n: usize| -> Result<&[u8]> {
            let s = bytes.get(pos..pos + n).ok_or_else(|| Error::Format("truncated coefficient blob".into()))?;
            pos += n;
            Ok(s)
        };
        if take(4)? != b"CSET" {
            return Err(Error::Format("bad coefficient blob magic".into()));
        }
        let u32_at = |s: &[u8]| u32::from_le_bytes([s[0], s[1], s[2], s[3]]);
        let count = u32_at(take(4)?) as usize;
        let mut entries = Vec::with_capacity(count);
        let mut data = Vec::new();
        for _ in 0..count {
            let level = u32_at(take(4)?);
            let orientation = Orientation::from_code(u32_at(take(4)?))?;
            let rows = u32_at(take(4)?) as usize;
            let cols = u32_at(take(4)?) as usize;
            for chunk in take(8 * rows * cols)?.chunks_exact(8) {
                data.push(T::lit(f64::from_le_bytes(chunk.try_into().expect("8 bytes"))));
            }
            entries.push((level, orientation, rows, cols));
        }
        Self::from_vec(Arc::new(CoeffLayout::new(entries)), data)
    }
}
