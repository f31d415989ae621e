//! Linear operators of the reconstruction objective.

mod coeffs;
mod contourlet;
pub(crate) mod dictionary;
mod diff;
mod fft;
mod wavelet;

pub use coeffs::{Band, CoeffLayout, CoefficientSet, Orientation};
pub use contourlet::{Contourlet, ContourletConfig};
pub use dictionary::{Dictionary, DictionaryKind, TightFrame};
pub use diff::DiffOperator;
pub use fft::{fft2, ifft2, ifft2_real, Fft2};
pub use wavelet::Wavelet;
