use std::str::FromStr;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::frames::{CoeffLayout, CoefficientSet, Contourlet, ContourletConfig, Wavelet};
use crate::raster::Grid;
use crate::Scalar;

/// Dictionary family.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum DictionaryKind {
    Wavelet,
    Contourlet,
}

impl DictionaryKind {
    pub fn name(self) -> &'static str {
        match self {
            DictionaryKind::Wavelet => "wavelet",
            DictionaryKind::Contourlet => "contourlet",
        }
    }
}

impl FromStr for DictionaryKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "wavelet" | "db2" => Ok(DictionaryKind::Wavelet),
            "contourlet" => Ok(DictionaryKind::Contourlet),
            other => Err(Error::Parameter(format!("unknown dictionary '{other}'"))),
        }
    }
}

/// Parseval tight frame: `synthesis ∘ analysis = I` and synthesis is the adjoint of analysis.
pub trait TightFrame<T: Scalar>: Send + Sync {
    fn kind(&self) -> DictionaryKind;
    fn shape(&self) -> (usize, usize);
    fn layout(&self) -> &Arc<CoeffLayout>;
    /// `Φᵀ x`.
    fn analysis(&self, x: &Grid<T>) -> CoefficientSet<T>;
    /// `Φ c`.
    fn synthesis(&self, c: &CoefficientSet<T>) -> Grid<T>;

    /// Binary passband weights (`false` on the approximation band).
    fn weight_mask(&self) -> &[bool] {
        self.layout().weight_mask()
    }

    /// Number of coefficients `M`.
    fn coeff_count(&self) -> usize {
        self.layout().total()
    }
}

/// Runtime-selected dictionary.
#[derive(Clone, Debug)]
pub enum Dictionary<T: Scalar> {
    Wavelet(Wavelet<T>),
    Contourlet(Contourlet<T>),
}

/// Wavelet decomposition depth used throughout.
pub const WAVELET_LEVELS: u32 = 2;

impl<T: Scalar> Dictionary<T> {
    pub fn build(kind: DictionaryKind, rows: usize, cols: usize, contourlet: &ContourletConfig) -> Result<Self> {
        Ok(match kind {
            DictionaryKind::Wavelet => Dictionary::Wavelet(Wavelet::new(rows, cols, WAVELET_LEVELS)?),
            DictionaryKind::Contourlet => Dictionary::Contourlet(Contourlet::new(rows, cols, contourlet.clone())?),
        })
    }
}

impl<T: Scalar> TightFrame<T> for Dictionary<T> {
    fn kind(&self) -> DictionaryKind {
        match self {
            Dictionary::Wavelet(_) => DictionaryKind::Wavelet,
            Dictionary::Contourlet(_) => DictionaryKind::Contourlet,
        }
    }

    fn shape(&self) -> (usize, usize) {
        match self {
            Dictionary::Wavelet(w) => w.shape(),
            Dictionary::Contourlet(c) => c.shape(),
        }
    }

    fn layout(&self) -> &Arc<CoeffLayout> {
        match self {
            Dictionary::Wavelet(w) => w.layout(),
            Dictionary::Contourlet(c) => c.layout(),
        }
    }

    fn analysis(&self, x: &Grid<T>) -> CoefficientSet<T> {
        match self {
            Dictionary::Wavelet(w) => w.analysis(x),
            Dictionary::Contourlet(c) => c.analysis(x),
        }
    }

    fn synthesis(&self, coeffs: &CoefficientSet<T>) -> Grid<T> {
        match self {
            Dictionary::Wavelet(w) => w.synthesis(coeffs),
            Dictionary::Contourlet(c) => c.synthesis(coeffs),
        }
    }
}
