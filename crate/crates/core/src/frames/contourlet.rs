//! Tight contourlet frame built in the DFT domain.
//!
//! A Laplacian pyramid with an orthonormal lowpass (`L Lᵀ = I`) splits each scale into a
//! coarse image and a bandpass residual; the residual is split by a two-channel tree of
//! paraunitary directional filters (quincunx fan split at the root, then wedge splits on
//! rectangular lattices). Every stage is a Parseval frame, so synthesis is the exact
//! adjoint and inverse of analysis. Filters are smooth raised-cosine responses; all
//! decimation is performed on spectra, so a transform costs one FFT plus one small
//! inverse FFT per subband.

use std::str::FromStr;
use std::sync::Arc;

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::frames::{CoeffLayout, CoefficientSet, Fft2, Orientation};
use crate::raster::Grid;
use crate::Scalar;

/// Directional depths per pyramid level (coarse to fine) and filter transition widths.
#[derive(Clone, Debug, PartialEq)]
pub struct ContourletConfig {
    /// Depth `l` yields `2^l` directional bands at that scale (`0` keeps the bandpass whole).
    pub levels: Vec<u32>,
    /// Transition half-width of the pyramid lowpass (in units of `cos ω`).
    pub lp_transition: f64,
    /// Transition half-width of the directional splits.
    pub dfb_transition: f64,
}

impl Default for ContourletConfig {
    fn default() -> Self {
        Self { levels: vec![3, 4], lp_transition: 1.0, dfb_transition: 1.0 }
    }
}

impl ContourletConfig {
    pub fn with_levels(levels: Vec<u32>) -> Self {
        Self { levels, ..Self::default() }
    }

    /// Partition used for large images (`[5, 6]`, 32 and 64 directions).
    pub fn large() -> Self {
        Self::with_levels(vec![5, 6])
    }

    /// Default partition for an image side: `[3, 4]` below 512, `[5, 6]` otherwise.
    pub fn for_size(side: usize) -> Self {
        if side >= 512 {
            Self::large()
        } else {
            Self::default()
        }
    }

    /// Required divisor of the (square) image side.
    pub fn required_multiple(&self) -> usize {
        let depth = self.levels.iter().copied().max().unwrap_or(0) as usize;
        1 << (self.levels.len() + depth)
    }

    /// Same partition with every directional depth reduced by `by` (minimum 1).
    pub fn coarsened(&self, by: u32) -> Self {
        Self {
            levels: self.levels.iter().map(|&l| l.saturating_sub(by).max(1.min(l))).collect(),
            ..self.clone()
        }
    }
}

impl FromStr for ContourletConfig {
    type Err = Error;

    /// Parses a partition such as `3,4` or `[5 6]`.
    fn from_str(s: &str) -> Result<Self> {
        let levels = s
            .trim_matches(|c: char| c == '[' || c == ']' || c.is_whitespace())
            .split(|c: char| c == ',' || c.is_whitespace())
            .filter(|t| !t.is_empty())
            .map(|t| t.parse::<u32>().map_err(|_| Error::Parameter(format!("bad contourlet level '{t}'"))))
            .collect::<Result<Vec<_>>>()?;
        if levels.is_empty() || levels.iter().any(|&l| l > 10) {
            return Err(Error::Parameter(format!("invalid contourlet partition '{s}'")));
        }
        Ok(Self::with_levels(levels))
    }
}

/// Smooth odd saturating map onto `[-1, 1]`.
fn sat(f: f64, width: f64) -> f64 {
    (std::f64::consts::FRAC_PI_2 * (f / width).clamp(-1.0, 1.0)).sin()
}

/// Power-complementary pair `(G(f), G(-f))` with `G² + G(-f)² = 2`.
fn pair(f: f64, width: f64) -> (f64, f64) {
    let t = std::f64::consts::FRAC_PI_4 * sat(f, width);
    let s = std::f64::consts::SQRT_2;
    (s * (std::f64::consts::FRAC_PI_4 - t).cos(), s * (std::f64::consts::FRAC_PI_4 + t).cos())
}

/// Signed angular frequency of DFT index `k` on a length-`n` axis.
fn omega(k: usize, n: usize) -> f64 {
    let k = if 2 * k > n { k as f64 - n as f64 } else { k as f64 };
    std::f64::consts::TAU * k / n as f64
}

type Spec<T> = Vec<Complex<T>>;

/// Two-channel node: channel filters sampled on the node's DFT grid.
#[derive(Clone, Debug)]
struct Node<T> {
    g0: Vec<T>,
    g1: Vec<Complex<T>>,
}

impl<T: Scalar> Node<T> {
    /// `f` must change sign under the node's aliasing shift; `delay` is the coset phase of channel 1.
    fn build(rows: usize, cols: usize, width: f64, f: impl Fn(f64, f64) -> f64, delay: impl Fn(f64, f64) -> f64) -> Self {
        let mut g0 = Vec::with_capacity(rows * cols);
        let mut g1 = Vec::with_capacity(rows * cols);
        for a in 0..rows {
            let wa = omega(a, rows);
            for b in 0..cols {
                let wb = omega(b, cols);
                let (p, q) = pair(f(wa, wb), width);
                let ph = -delay(wa, wb);
                g0.push(T::lit(p));
                g1.push(Complex::new(T::lit(q * ph.cos()), T::lit(q * ph.sin())));
            }
        }
        Self { g0, g1 }
    }

    fn analyze(&self, x: &[Complex<T>]) -> (Spec<T>, Spec<T>) {
        let y0 = x.iter().zip(&self.g0).map(|(&v, &g)| v * g).collect();
        let y1 = x.iter().zip(&self.g1).map(|(&v, g)| v * g.conj()).collect();
        (y0, y1)
    }

    fn synthesize(&self, y0: &[Complex<T>], y1: &[Complex<T>]) -> Spec<T> {
        y0.iter()
            .zip(y1)
            .zip(self.g0.iter().zip(&self.g1))
            .map(|((&a, &b), (&g0, &g1))| a * g0 + b * g1)
            .collect()
    }
}

/// Spectrum of `x[2a, b]` from the spectrum of `x` (`rows x cols`).
fn row_down<T: Scalar>(x: &[Complex<T>], rows: usize, cols: usize) -> Spec<T> {
    let h = rows / 2;
    let half = T::lit(0.5);
    (0..h * cols).map(|k| (x[k] + x[k + h * cols]) * half).collect()
}

/// Spectrum of the zero-interleaved signal (rows doubled).
fn row_up<T: Scalar>(y: &[Complex<T>], rows: usize, cols: usize) -> Spec<T> {
    let mut out = Vec::with_capacity(2 * rows * cols);
    out.extend_from_slice(y);
    out.extend_from_slice(y);
    out
}

fn col_down<T: Scalar>(x: &[Complex<T>], rows: usize, cols: usize) -> Spec<T> {
    let h = cols / 2;
    let half = T::lit(0.5);
    let mut out = Vec::with_capacity(rows * h);
    for a in 0..rows {
        let r = &x[a * cols..(a + 1) * cols];
        out.extend((0..h).map(|b| (r[b] + r[b + h]) * half));
    }
    out
}

fn col_up<T: Scalar>(y: &[Complex<T>], rows: usize, cols: usize) -> Spec<T> {
    let mut out = Vec::with_capacity(rows * 2 * cols);
    for a in 0..rows {
        let r = &y[a * cols..(a + 1) * cols];
        out.extend_from_slice(r);
        out.extend_from_slice(r);
    }
    out
}

/// Directional filter bank of depth >= 1 on an `m x m` bandpass image.
#[derive(Clone, Debug)]
struct Dfb<T: Scalar> {
    m: usize,
    depth: u32,
    root: Node<T>,
    /// `h_tree[t][j]`: row-splitting node at depth `t` on an `(m / 2^t) x (m / 2)` array.
    h_tree: Vec<Vec<Node<T>>>,
    /// `v_tree[t][j]`: column-splitting node on an `(m / 2) x (m / 2^t)` array.
    v_tree: Vec<Vec<Node<T>>>,
    h_fft: Fft2<T>,
    v_fft: Fft2<T>,
}

impl<T: Scalar> Dfb<T> {
    fn new(m: usize, depth: u32, width: f64) -> Self {
        // Root: quincunx split into the horizontal fan (|ωy| < |ωx|) and the vertical fan.
        let root = Node::build(m, m, width, |wy, wx| wy.cos() - wx.cos(), |_, wx| wx);
        let mut h_tree = Vec::new();
        let mut v_tree = Vec::new();
        for t in 0..depth - 1 {
            let count = 1usize << t;
            let (r, c) = (m >> t, m / 2);
            h_tree.push(
                (0..count)
                    .map(|j| {
                        let j = j as f64;
                        Node::build(r, c, width, |na, nb| (na - j * nb).cos() - (na - (j + 1.0) * nb).cos(), |na, _| na)
                    })
                    .collect(),
            );
            v_tree.push(
                (0..count)
                    .map(|j| {
                        let j = j as f64;
                        Node::build(c, r, width, |nc, nd| (nd - j * nc).cos() - (nd - (j + 1.0) * nc).cos(), |_, nd| nd)
                    })
                    .collect(),
            );
        }
        let k = 1usize << (depth - 1);
        Self { m, depth, root, h_tree, v_tree, h_fft: Fft2::new(m / k, m / 2), v_fft: Fft2::new(m / 2, m / k) }
    }

    fn leaves_per_fan(&self) -> usize {
        1 << (self.depth - 1)
    }

    fn leaf_shapes(&self) -> ((usize, usize), (usize, usize)) {
        let k = self.leaves_per_fan();
        ((self.m / k, self.m / 2), (self.m / 2, self.m / k))
    }

    /// Bandpass spectrum -> leaf spectra (horizontal-fan leaves first).
    fn analyze(&self, x: &[Complex<T>]) -> Vec<Spec<T>> {
        let m = self.m;
        let h = m / 2;
        let (z0, z1) = self.root.analyze(x);
        let half = T::lit(0.5);
        // Quincunx samples rearranged: H[a, b] = z0[a, a + 2b], V[c, d] = z1[2c + d, d].
        let mut hs = Vec::with_capacity(m * h);
        for ka in 0..m {
            for kb in 0..h {
                let kx = kb;
                let p = z0[((ka + m - kx) % m) * m + kx];
                let q = z0[((ka + m - kx + m - h) % m) * m + kx + h];
                hs.push((p + q) * half);
            }
        }
        let mut vs = Vec::with_capacity(h * m);
        for kc in 0..h {
            for kd in 0..m {
                let p = z1[kc * m + (kd + m - kc) % m];
                let q = z1[(kc + h) * m + (kd + m - kc + m - h) % m];
                vs.push((p + q) * half);
            }
        }
        let mut hl = vec![hs];
        let mut vl = vec![vs];
        for t in 0..self.depth as usize - 1 {
            let (r, c) = (m >> t, h);
            let mut nh = Vec::with_capacity(2 * hl.len());
            for (node, s) in self.h_tree[t].iter().zip(&hl) {
                let (a, b) = node.analyze(s);
                nh.push(row_down(&a, r, c));
                nh.push(row_down(&b, r, c));
            }
            let mut nv = Vec::with_capacity(2 * vl.len());
            for (node, s) in self.v_tree[t].iter().zip(&vl) {
                let (a, b) = node.analyze(s);
                nv.push(col_down(&a, c, r));
                nv.push(col_down(&b, c, r));
            }
            hl = nh;
            vl = nv;
        }
        hl.extend(vl);
        hl
    }

    fn synthesize(&self, mut leaves: Vec<Spec<T>>) -> Spec<T> {
        let m = self.m;
        let h = m / 2;
        let mut vl = leaves.split_off(self.leaves_per_fan());
        let mut hl = leaves;
        for t in (0..self.depth as usize - 1).rev() {
            let (r, c) = (m >> t, h);
            hl = self.h_tree[t]
                .iter()
                .zip(hl.chunks(2))
                .map(|(node, ch)| node.synthesize(&row_up(&ch[0], r / 2, c), &row_up(&ch[1], r / 2, c)))
                .collect();
            vl = self.v_tree[t]
                .iter()
                .zip(vl.chunks(2))
                .map(|(node, ch)| node.synthesize(&col_up(&ch[0], c, r / 2), &col_up(&ch[1], c, r / 2)))
                .collect();
        }
        let (hs, vs) = (&hl[0], &vl[0]);
        let mut z0 = Vec::with_capacity(m * m);
        let mut z1 = Vec::with_capacity(m * m);
        for ky in 0..m {
            for kx in 0..m {
                z0.push(hs[((ky + kx) % m) * h + kx % h]);
                z1.push(vs[(ky % h) * m + (ky + kx) % m]);
            }
        }
        self.root.synthesize(&z0, &z1)
    }
}

/// One pyramid scale: separable lowpass response and optional directional bank.
#[derive(Clone, Debug)]
struct Scale<T: Scalar> {
    m: usize,
    lowpass: Vec<T>,
    dfb: Option<Dfb<T>>,
    band_fft: Fft2<T>,
}

impl<T: Scalar> Scale<T> {
    fn new(m: usize, depth: u32, config: &ContourletConfig) -> Self {
        let resp: Vec<f64> = (0..m).map(|k| pair(omega(k, m).cos(), config.lp_transition).0).collect();
        let lowpass = (0..m * m).map(|k| T::lit(resp[k / m] * resp[k % m])).collect();
        let dfb = (depth > 0).then(|| Dfb::new(m, depth, config.dfb_transition));
        Self { m, lowpass, dfb, band_fft: Fft2::new(m, m) }
    }

    /// Spectrum of `L x` (decimated by 2 in both directions).
    fn reduce(&self, x: &[Complex<T>]) -> Spec<T> {
        let m = self.m;
        let h = m / 2;
        let q = T::lit(0.25);
        let mut out = Vec::with_capacity(h * h);
        for a in 0..h {
            for b in 0..h {
                let s = [(a, b), (a + h, b), (a, b + h), (a + h, b + h)]
                    .iter()
                    .map(|&(i, j)| x[i * m + j] * self.lowpass[i * m + j])
                    .fold(Complex::default(), |acc, v| acc + v);
                out.push(s * q);
            }
        }
        out
    }

    /// Spectrum of `Lᵀ c`.
    fn expand(&self, c: &[Complex<T>]) -> Spec<T> {
        let m = self.m;
        let h = m / 2;
        (0..m * m).map(|k| c[((k / m) % h) * h + (k % m) % h] * self.lowpass[k]).collect()
    }
}

/// Tight contourlet frame on square `n x n` images.
#[derive(Clone, Debug)]
pub struct Contourlet<T: Scalar> {
    n: usize,
    config: ContourletConfig,
    /// Finest scale first.
    scales: Vec<Scale<T>>,
    image_fft: Fft2<T>,
    coarse_fft: Fft2<T>,
    layout: Arc<CoeffLayout>,
}

impl<T: Scalar> Contourlet<T> {
    pub fn new(rows: usize, cols: usize, config: ContourletConfig) -> Result<Self> {
        if rows != cols {
            return Err(Error::Parameter(format!("contourlet needs a square grid, got {rows}x{cols}")));
        }
        if config.levels.is_empty() {
            return Err(Error::Parameter("contourlet needs at least one pyramid level".into()));
        }
        let n = rows;
        let multiple = config.required_multiple();
        if n == 0 || !n.is_multiple_of(multiple) {
            return Err(Error::Dimension { size: n, multiple });
        }
        let pyramid = config.levels.len();
        let scales: Vec<Scale<T>> = config
            .levels
            .iter()
            .rev()
            .enumerate()
            .map(|(p, &depth)| Scale::new(n >> p, depth, &config))
            .collect();
        let coarse = n >> pyramid;
        let mut entries = vec![(pyramid as u32, Orientation::Lowpass, coarse, coarse)];
        for (p, scale) in scales.iter().enumerate().rev() {
            let level = p as u32 + 1;
            match &scale.dfb {
                None => entries.push((level, Orientation::Bandpass, scale.m, scale.m)),
                Some(dfb) => {
                    let count = 2 * dfb.leaves_per_fan() as u32;
                    let ((hr, hc), (vr, vc)) = dfb.leaf_shapes();
                    for index in 0..count {
                        let (r, c) = if index < count / 2 { (hr, hc) } else { (vr, vc) };
                        entries.push((level, Orientation::Directional { index, count }, r, c));
                    }
                }
            }
        }
        Ok(Self {
            n,
            config,
            scales,
            image_fft: Fft2::new(n, n),
            coarse_fft: Fft2::new(coarse, coarse),
            layout: Arc::new(CoeffLayout::new(entries)),
        })
    }

    pub fn config(&self) -> &ContourletConfig {
        &self.config
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.n, self.n)
    }

    pub fn layout(&self) -> &Arc<CoeffLayout> {
        &self.layout
    }

    pub fn analysis(&self, x: &Grid<T>) -> CoefficientSet<T> {
        assert_eq!(x.shape(), (self.n, self.n), "contourlet input shape");
        let mut spec = self.image_fft.forward_real(x.as_slice());
        // Per scale (finest first): leaf spectra and their FFT plans.
        let mut per_scale: Vec<Vec<Spec<T>>> = Vec::with_capacity(self.scales.len());
        for scale in &self.scales {
            let coarse = scale.reduce(&spec);
            let up = scale.expand(&coarse);
            let band: Spec<T> = spec.iter().zip(&up).map(|(&a, &b)| a - b).collect();
            per_scale.push(match &scale.dfb {
                None => vec![band],
                Some(dfb) => dfb.analyze(&band),
            });
            spec = coarse;
        }
        let mut out = Vec::with_capacity(self.layout.total());
        out.extend(self.coarse_fft.inverse_real(spec));
        for (scale, leaves) in self.scales.iter().zip(per_scale).rev() {
            let half = leaves.len() / 2;
            for (i, leaf) in leaves.into_iter().enumerate() {
                let fft = match &scale.dfb {
                    None => &scale.band_fft,
                    Some(d) if i < half => &d.h_fft,
                    Some(d) => &d.v_fft,
                };
                out.extend(fft.inverse_real(leaf));
            }
        }
        CoefficientSet::from_vec(self.layout.clone(), out).expect("layout size")
    }

    pub fn synthesis(&self, coeffs: &CoefficientSet<T>) -> Grid<T> {
        assert_eq!(coeffs.len(), self.layout.total(), "contourlet coefficient count");
        let bands = self.layout.bands();
        let mut spec = self.coarse_fft.forward_real(coeffs.band(0));
        let mut next = 1;
        for scale in self.scales.iter().rev() {
            let band = match &scale.dfb {
                None => {
                    next += 1;
                    scale.band_fft.forward_real(coeffs.band(next - 1))
                }
                Some(dfb) => {
                    let count = 2 * dfb.leaves_per_fan();
                    let leaves = (0..count)
                        .map(|i| {
                            let fft = if i < count / 2 { &dfb.h_fft } else { &dfb.v_fft };
                            debug_assert_eq!(bands[next + i].len(), fft.shape().0 * fft.shape().1);
                            fft.forward_real(coeffs.band(next + i))
                        })
                        .collect();
                    next += count;
                    dfb.synthesize(leaves)
                }
            };
            // x = Lᵀ c + (I - LᵀL) d = d + Lᵀ (c - L d)
            let ld = scale.reduce(&band);
            let diff: Spec<T> = spec.iter().zip(&ld).map(|(&a, &b)| a - b).collect();
            spec = band.iter().zip(scale.expand(&diff)).map(|(&a, b)| a + b).collect();
        }
        Grid::new(self.n, self.n, self.image_fft.inverse_real(spec)).expect("shape preserved")
    }
}
