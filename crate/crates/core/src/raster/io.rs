use std::fs;
use std::io::Write;
use std::path::Path;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::raster::{DisparityMap, Grid, Mask};
use crate::Scalar;

/// Largest accepted pixel count (2^28).
const MAX_PIXELS: usize = 1 << 28;

/// Supported on-disk formats.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ImageFormat {
    /// Binary PGM (`P5`), maxval 255.
    Pgm8,
    /// Binary PGM (`P5`), maxval 65535, big-endian samples.
    Pgm16,
    /// Little-endian grayscale PFM (`Pf`).
    Pfm,
}

impl ImageFormat {
    pub fn max_value(self) -> f64 {
        match self {
            ImageFormat::Pgm8 => 255.0,
            ImageFormat::Pgm16 => 65535.0,
            ImageFormat::Pfm => 1.0,
        }
    }

    /// Guesses a format from a file extension (`.pgm` -> 16-bit, `.pfm`).
    pub fn from_extension(path: &Path) -> Option<Self> {
        match path.extension()?.to_str()?.to_ascii_lowercase().as_str() {
            "pgm" => Some(ImageFormat::Pgm16),
            "pfm" => Some(ImageFormat::Pfm),
            _ => None,
        }
    }
}

impl FromStr for ImageFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "pgm-8" | "pgm8" => Ok(ImageFormat::Pgm8),
            "pgm-16" | "pgm16" => Ok(ImageFormat::Pgm16),
            "pfm" | "pfm-float" => Ok(ImageFormat::Pfm),
            other => Err(Error::Parameter(format!("unknown image format '{other}'"))),
        }
    }
}

pub fn load_image<T: Scalar>(path: impl AsRef<Path>, format: ImageFormat) -> Result<DisparityMap<T>> {
    read_image(&fs::read(path)?, format)
}

pub fn save_image<T: Scalar>(map: &DisparityMap<T>, path: impl AsRef<Path>, format: ImageFormat) -> Result<()> {
    let bytes = write_image(map, format);
    fs::File::create(path)?.write_all(&bytes)?;
    Ok(())
}

/// Writes a mask as an 8-bit PGM (0 / 255).
pub fn save_mask(mask: &Mask, path: impl AsRef<Path>) -> Result<()> {
    let map = DisparityMap::from_grid(mask.indicator::<f64>())?;
    save_image(&map, path, ImageFormat::Pgm8)
}

/// Decodes an in-memory image.
pub fn read_image<T: Scalar>(bytes: &[u8], format: ImageFormat) -> Result<DisparityMap<T>> {
    let mut cur = Header { bytes, pos: 0 };
    let magic = cur.token()?;
    let grid = match format {
        ImageFormat::Pgm8 | ImageFormat::Pgm16 => {
            if magic != "P5" {
                return Err(Error::Format(format!("expected P5 magic, found '{magic}'")));
            }
            let width = cur.number("width")?;
            let height = cur.number("height")?;
            let maxval = cur.number("maxval")?;
            check_capacity(width, height)?;
            let expected = format.max_value() as usize;
            if maxval != expected {
                return Err(Error::Format(format!("maxval {maxval} does not match {format:?}")));
            }
            cur.single_whitespace()?;
            let body = cur.rest();
            let depth = if format == ImageFormat::Pgm8 { 1 } else { 2 };
            if body.len() < width * height * depth {
                return Err(Error::Format("truncated pixel data".into()));
            }
            let scale = T::lit(1.0 / maxval as f64);
            let data = (0..width * height)
                .map(|k| {
                    let raw = if depth == 1 {
                        body[k] as usize
                    } else {
                        u16::from_be_bytes([body[2 * k], body[2 * k + 1]]) as usize
                    };
                    if raw > maxval {
                        Err(Error::Format(format!("sample {raw} exceeds maxval")))
                    } else {
                        Ok(T::from_usize_lossy(raw) * scale)
                    }
                })
                .collect::<Result<Vec<T>>>()?;
            Grid::new(height, width, data)?
        }
        ImageFormat::Pfm => {
            if magic != "Pf" {
                return Err(Error::Format(format!("expected grayscale Pf magic, found '{magic}'")));
            }
            let width = cur.number("width")?;
            let height = cur.number("height")?;
            let scale_tok = cur.token()?;
            let scale: f64 = scale_tok
                .parse()
                .map_err(|_| Error::Format(format!("bad PFM scale '{scale_tok}'")))?;
            if scale == 0.0 || !scale.is_finite() {
                return Err(Error::Format("PFM scale must be finite and nonzero".into()));
            }
            check_capacity(width, height)?;
            cur.single_whitespace()?;
            let body = cur.rest();
            if body.len() < 4 * width * height {
                return Err(Error::Format("truncated pixel data".into()));
            }
            let little = scale < 0.0;
            let mut data = vec![T::zero(); width * height];
            // Rows are stored bottom to top.
            for (k, chunk) in body.chunks_exact(4).take(width * height).enumerate() {
                let raw = [chunk[0], chunk[1], chunk[2], chunk[3]];
                let v = if little { f32::from_le_bytes(raw) } else { f32::from_be_bytes(raw) };
                if !v.is_finite() {
                    return Err(Error::Format("non-finite PFM sample".into()));
                }
                let (r, c) = (height - 1 - k / width, k % width);
                data[r * width + c] = T::lit(v as f64);
            }
            Grid::new(height, width, data)?
        }
    };
    DisparityMap::from_grid(grid)
}

/// Encodes an image; values are rounded to the nearest representable level.
pub fn write_image<T: Scalar>(map: &DisparityMap<T>, format: ImageFormat) -> Vec<u8> {
    let (h, w) = map.shape();
    let mut out = Vec::new();
    match format {
        ImageFormat::Pgm8 | ImageFormat::Pgm16 => {
            let maxval = format.max_value();
            out.extend_from_slice(format!("P5\n{w} {h}\n{}\n", maxval as usize).as_bytes());
            for &v in map.as_slice() {
                let q = (v.to_f64_lossy() * maxval).round().clamp(0.0, maxval) as u16;
                if format == ImageFormat::Pgm8 {
                    out.push(q as u8);
                } else {
                    out.extend_from_slice(&q.to_be_bytes());
                }
            }
        }
        ImageFormat::Pfm => {
            out.extend_from_slice(format!("Pf\n{w} {h}\n-1.0\n").as_bytes());
            for r in (0..h).rev() {
                for &v in map.grid().row(r) {
                    out.extend_from_slice(&(v.to_f64_lossy() as f32).to_le_bytes());
                }
            }
        }
    }
    out
}

fn check_capacity(width: usize, height: usize) -> Result<()> {
    match width.checked_mul(height) {
        Some(n) if n <= MAX_PIXELS => Ok(()),
        _ => Err(Error::Capacity { width, height }),
    }
}

/// Whitespace/comment-aware header tokenizer shared by PGM and PFM.
struct Header<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Header<'a> {
    fn skip_space(&mut self) {
        while self.pos < self.bytes.len() {
            let b = self.bytes[self.pos];
            if b == b'#' {
                while self.pos < self.bytes.len() && self.bytes[self.pos] != b'\n' {
                    self.pos += 1;
                }
            } else if b.is_ascii_whitespace() {
                self.pos += 1;
            } else {
                break;
            }
        }
    }

    fn token(&mut self) -> Result<&'a str> {
        self.skip_space();
        let start = self.pos;
        while self.pos < self.bytes.len() && !self.bytes[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(Error::Format("unexpected end of header".into()));
        }
        std::str::from_utf8(&self.bytes[start..self.pos]).map_err(|_| Error::Format("non-ASCII header".into()))
    }

    fn number(&mut self, what: &str) -> Result<usize> {
        let tok = self.token()?;
        match tok.parse::<usize>() {
            Ok(v) if v > 0 => Ok(v),
            Ok(_) => Err(Error::Format(format!("{what} must be positive"))),
            Err(e) if *e.kind() == std::num::IntErrorKind::PosOverflow => {
                Err(Error::Capacity { width: usize::MAX, height: usize::MAX })
            }
            Err(_) => Err(Error::Format(format!("bad {what} '{tok}'"))),
        }
    }

    fn single_whitespace(&mut self) -> Result<()> {
        match self.bytes.get(self.pos) {
            Some(b) if b.is_ascii_whitespace() => {
                self.pos += 1;
                Ok(())
            }
            _ => Err(Error::Format("missing separator before pixel data".into())),
        }
    }

    fn rest(&self) -> &'a [u8] {
        &self.bytes[self.pos..]
    }
}
