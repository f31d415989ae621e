//! Flat `key = value` experiment configuration.
//!
//! Blank lines and `#` comments are ignored. Every key is optional; unknown keys are
//! errors. Recognized keys:
//!
//! | key | meaning | default |
//! |---|---|---|
//! | `input` | `synth:<scene>[:<size>[:<scene seed>]]` or an image path (`.pgm`, `.pfm`) | `synth:piecewise-planar:128` |
//! | `strategy` | `uniform`, `grid`, `greedy`, `oracle`, `two-stage`, `two-stage-pca` | `uniform` |
//! | `ratio` | sampling ratio ξ | `0.1` |
//! | `method` | `admm` or `bilinear` (bilinear needs `strategy = grid`) | `admm` |
//! | `dictionaries` | comma list of `wavelet`, `contourlet` | `wavelet,contourlet` |
//! | `lambda1`, `lambda2`, `rho1`, `rho2` | per-dictionary weights and penalties | typical |
//! | `beta`, `mu`, `gamma`, `tol`, `max_iter` | solver parameters | typical |
//! | `contourlet` | contourlet directional depths, e.g. `3,4` | by image size |
//! | `levels` | multiscale pyramid levels Q | `1` |
//! | `trials` | Monte-Carlo trials | `1` |
//! | `seed` | base seed | `0` |
//! | `noise` | Gaussian noise sigma added to the measurements | `0` |
//! | `disparity_levels` | integer disparity range for bad-pixel thresholds | `255` |
//! | `output` | output directory | `out` |

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use sparsedepth::raster::{load_image, synth_scene, ImageFormat, SceneKind};
use sparsedepth::solver::SolverParams;
use sparsedepth::{AdmmSolver, ContourletConfig, DictionaryKind, DisparityMap, Strategy};

use crate::error::{BenchError, BenchResult};

/// Reconstruction method.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Method {
    Admm,
    /// Bilinear interpolation of lattice samples.
    Bilinear,
}

impl FromStr for Method {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s.trim().to_ascii_lowercase().as_str() {
            "admm" => Ok(Method::Admm),
            "bilinear" => Ok(Method::Bilinear),
            other => Err(format!("unknown method '{other}'")),
        }
    }
}

/// Source of the ground-truth map.
#[derive(Clone, Debug, PartialEq)]
pub enum Input {
    Synthetic { kind: SceneKind, size: usize, seed: u64 },
    File(PathBuf),
}

impl Input {
    /// Loads or synthesizes the ground truth.
    pub fn load(&self) -> BenchResult<DisparityMap<f64>> {
        match self {
            Input::Synthetic { kind, size, seed } => Ok(synth_scene(*kind, *size, *size, *seed)?),
            Input::File(path) => {
                let format = ImageFormat::from_extension(path)
                    .ok_or_else(|| BenchError::config("input", format!("unknown image extension: {}", path.display())))?;
                Ok(load_image(path, format)?)
            }
        }
    }
}

impl fmt::Display for Input {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Input::Synthetic { kind, size, seed } => write!(f, "synth:{}:{size}:{seed}", kind.name()),
            Input::File(p) => write!(f, "{}", p.display()),
        }
    }
}

impl FromStr for Input {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let s = s.trim();
        let Some(spec) = s.strip_prefix("synth:") else {
            let path = PathBuf::from(s);
            if !path.is_file() {
                return Err(format!("input file '{s}' does not exist"));
            }
            return Ok(Input::File(path));
        };
        let mut parts = spec.split(':');
        let kind = parts.next().unwrap_or_default().parse::<SceneKind>().map_err(|e| e.to_string())?;
        let size = match parts.next() {
            Some(v) => v.parse().map_err(|_| format!("bad scene size '{v}'"))?,
            None => 128,
        };
        let seed = match parts.next() {
            Some(v) => v.parse().map_err(|_| format!("bad scene seed '{v}'"))?,
            None => 0,
        };
        if parts.next().is_some() {
            return Err(format!("too many fields in '{s}'"));
        }
        Ok(Input::Synthetic { kind, size, seed })
    }
}

/// One experiment: a fixture, a sampling strategy and a solver configuration.
#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    pub input: Input,
    pub strategy: Strategy,
    pub ratio: f64,
    pub method: Method,
    pub dictionaries: Vec<DictionaryKind>,
    /// Solver parameters (typical values for `dictionaries` unless overridden).
    pub params: SolverParams<f64>,
    pub contourlet: Option<ContourletConfig>,
    pub levels: usize,
    pub trials: usize,
    pub seed: u64,
    pub noise: f64,
    pub disparity_levels: f64,
    pub output: PathBuf,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        let dictionaries = vec![DictionaryKind::Wavelet, DictionaryKind::Contourlet];
        Self {
            input: Input::Synthetic { kind: SceneKind::PiecewisePlanar, size: 128, seed: 0 },
            strategy: Strategy::Uniform,
            ratio: 0.1,
            method: Method::Admm,
            params: SolverParams::typical(&dictionaries),
            dictionaries,
            contourlet: None,
            levels: 1,
            trials: 1,
            seed: 0,
            noise: 0.0,
            disparity_levels: 255.0,
            output: PathBuf::from("out"),
        }
    }
}

/// Keys accepted by [`ExperimentConfig::set`].
pub const KEYS: [&str; 21] = [
    "input",
    "strategy",
    "ratio",
    "method",
    "dictionaries",
    "lambda1",
    "lambda2",
    "rho1",
    "rho2",
    "beta",
    "mu",
    "gamma",
    "tol",
    "max_iter",
    "contourlet",
    "levels",
    "trials",
    "seed",
    "noise",
    "disparity_levels",
    "output",
];

fn parse<T: FromStr>(key: &str, value: &str) -> BenchResult<T> {
    value.trim().parse().map_err(|_| BenchError::config(key, format!("cannot parse '{value}'")))
}

fn with<T, E: fmt::Display>(key: &str, r: Result<T, E>) -> BenchResult<T> {
    r.map_err(|e| BenchError::config(key, e.to_string()))
}

impl ExperimentConfig {
    /// Parses a config file body; later keys override earlier ones.
    pub fn parse(text: &str) -> BenchResult<Self> {
        let mut cfg = Self::default();
        cfg.apply(&parse_pairs(text)?)?;
        Ok(cfg)
    }

    pub fn load(path: impl AsRef<Path>) -> BenchResult<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)
            .map_err(|e| BenchError::config("config", format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }

    /// Applies `key = value` pairs in order, then validates.
    ///
    /// `dictionaries` is applied first so that per-dictionary overrides index the final list.
    pub fn apply(&mut self, pairs: &[(String, String)]) -> BenchResult<()> {
        if let Some((_, v)) = pairs.iter().rev().find(|(k, _)| k == "dictionaries") {
            self.set("dictionaries", v)?;
        }
        for (k, v) in pairs.iter().filter(|(k, _)| k != "dictionaries") {
            self.set(k, v)?;
        }
        self.validate()
    }

    /// Sets a single key without validating the whole config.
    pub fn set(&mut self, key: &str, value: &str) -> BenchResult<()> {
        let per_dict = |cfg: &mut Self, idx: usize, lambda: bool| -> BenchResult<()> {
            let v: f64 = parse(key, value)?;
            let list = if lambda { &mut cfg.params.lambda } else { &mut cfg.params.rho };
            let slot = list
                .get_mut(idx)
                .ok_or_else(|| BenchError::config(key, format!("only {} dictionaries configured", cfg.dictionaries.len())))?;
            *slot = v;
            Ok(())
        };
        match key {
            "input" => self.input = with(key, value.parse())?,
            "strategy" => self.strategy = with(key, value.parse())?,
            "ratio" => self.ratio = parse(key, value)?,
            "method" => self.method = with(key, value.parse())?,
            "dictionaries" => {
                let kinds = value
                    .split(',')
                    .map(|s| with(key, s.parse::<DictionaryKind>()))
                    .collect::<BenchResult<Vec<_>>>()?;
                if kinds != self.dictionaries {
                    let old = std::mem::replace(&mut self.params, SolverParams::typical(&kinds));
                    (self.params.beta, self.params.mu, self.params.gamma) = (old.beta, old.mu, old.gamma);
                    (self.params.tol, self.params.max_iter) = (old.tol, old.max_iter);
                    self.dictionaries = kinds;
                }
            }
            "lambda1" => per_dict(self, 0, true)?,
            "lambda2" => per_dict(self, 1, true)?,
            "rho1" => per_dict(self, 0, false)?,
            "rho2" => per_dict(self, 1, false)?,
            "beta" => self.params.beta = parse(key, value)?,
            "mu" => self.params.mu = parse(key, value)?,
            "gamma" => self.params.gamma = parse(key, value)?,
            "tol" => self.params.tol = parse(key, value)?,
            "max_iter" => self.params.max_iter = parse(key, value)?,
            "contourlet" => self.contourlet = Some(with(key, value.parse())?),
            "levels" => self.levels = parse(key, value)?,
            "trials" => self.trials = parse(key, value)?,
            "seed" => self.seed = parse(key, value)?,
            "noise" => self.noise = parse(key, value)?,
            "disparity_levels" => self.disparity_levels = parse(key, value)?,
            "output" => self.output = PathBuf::from(value.trim()),
            other => return Err(BenchError::config(other, "unknown key")),
        }
        Ok(())
    }

    /// Checks ranges and cross-key consistency.
    pub fn validate(&self) -> BenchResult<()> {
        if self.trials == 0 {
            return Err(BenchError::config("trials", "must be at least 1"));
        }
        if self.levels == 0 {
            return Err(BenchError::config("levels", "must be at least 1"));
        }
        let full_ok = matches!(self.strategy, Strategy::Grid);
        if !(self.ratio > 0.0 && (self.ratio < 1.0 || (full_ok && self.ratio == 1.0))) {
            return Err(BenchError::config("ratio", format!("{} outside (0, 1)", self.ratio)));
        }
        if !(self.noise >= 0.0 && self.noise.is_finite()) {
            return Err(BenchError::config("noise", "must be a non-negative number"));
        }
        if !(self.disparity_levels > 0.0) {
            return Err(BenchError::config("disparity_levels", "must be positive"));
        }
        if self.method == Method::Bilinear && self.strategy != Strategy::Grid {
            return Err(BenchError::config("method", "bilinear interpolation needs strategy = grid"));
        }
        if let Input::File(p) = &self.input {
            if !p.is_file() {
                return Err(BenchError::config("input", format!("'{}' does not exist", p.display())));
            }
        }
        with("dictionaries", self.params.validate(self.dictionaries.len()))?;
        with("dictionaries", AdmmSolver::new(&self.dictionaries, self.params.clone()).map(|_| ()))
    }

    pub fn solver(&self) -> BenchResult<AdmmSolver<f64>> {
        let solver = AdmmSolver::new(&self.dictionaries, self.params.clone())?;
        Ok(match &self.contourlet {
            Some(c) => solver.with_contourlet(c.clone()),
            None => solver,
        })
    }
}

/// Splits config text into ordered `(key, value)` pairs.
pub fn parse_pairs(text: &str) -> BenchResult<Vec<(String, String)>> {
    let mut out = Vec::new();
    for (n, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| BenchError::config(format!("line {}", n + 1), format!("expected key = value, got '{line}'")))?;
        let key = k.trim().to_ascii_lowercase();
        if !KEYS.contains(&key.as_str()) {
            return Err(BenchError::config(key, "unknown key"));
        }
        out.push((key, v.trim().to_string()));
    }
    Ok(out)
}

/// Swept parameter.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SweepParam {
    Lambda1,
    Lambda2,
    Beta,
    Rho1,
    Rho2,
    Mu,
    Gamma,
}

impl SweepParam {
    pub const ALL: [SweepParam; 7] =
        [SweepParam::Lambda1, SweepParam::Lambda2, SweepParam::Beta, SweepParam::Rho1, SweepParam::Rho2, SweepParam::Mu, SweepParam::Gamma];

    /// Config key of the parameter.
    pub fn key(self) -> &'static str {
        match self {
            SweepParam::Lambda1 => "lambda1",
            SweepParam::Lambda2 => "lambda2",
            SweepParam::Beta => "beta",
            SweepParam::Rho1 => "rho1",
            SweepParam::Rho2 => "rho2",
            SweepParam::Mu => "mu",
            SweepParam::Gamma => "gamma",
        }
    }

    /// Whether the parameter only affects convergence speed, not the minimizer.
    pub fn is_internal(self) -> bool {
        matches!(self, SweepParam::Rho1 | SweepParam::Rho2 | SweepParam::Mu | SweepParam::Gamma)
    }

    /// Current value in `params`.
    pub fn get(self, params: &SolverParams<f64>) -> Option<f64> {
        match self {
            SweepParam::Lambda1 => params.lambda.first().copied(),
            SweepParam::Lambda2 => params.lambda.get(1).copied(),
            SweepParam::Rho1 => params.rho.first().copied(),
            SweepParam::Rho2 => params.rho.get(1).copied(),
            SweepParam::Beta => Some(params.beta),
            SweepParam::Mu => Some(params.mu),
            SweepParam::Gamma => Some(params.gamma),
        }
    }
}

impl FromStr for SweepParam {
    type Err = BenchError;

    fn from_str(s: &str) -> BenchResult<Self> {
        let key = s.trim().to_ascii_lowercase();
        SweepParam::ALL
            .into_iter()
            .find(|p| p.key() == key)
            .ok_or_else(|| BenchError::config("param", format!("cannot sweep '{s}'")))
    }
}

/// Log-spaced grid over one parameter.
#[derive(Clone, Debug, PartialEq)]
pub struct SweepSpec {
    pub param: SweepParam,
    pub min: f64,
    pub max: f64,
    pub points: usize,
}

impl SweepSpec {
    pub fn new(param: SweepParam, min: f64, max: f64, points: usize) -> BenchResult<Self> {
        if !(min > 0.0 && max >= min && max.is_finite()) {
            return Err(BenchError::config("sweep", format!("bounds [{min}, {max}] must be positive and ordered")));
        }
        if points == 0 || (points == 1 && min != max) {
            return Err(BenchError::config("points", "a sweep needs at least two points (or one with min = max)"));
        }
        Ok(Self { param, min, max, points })
    }

    /// `min · (max/min)^(k/(points−1))`, exact at both ends.
    pub fn values(&self) -> Vec<f64> {
        if self.points == 1 {
            return vec![self.min];
        }
        let (lo, hi) = (self.min.ln(), self.max.ln());
        (0..self.points)
            .map(|k| match k {
                0 => self.min,
                k if k + 1 == self.points => self.max,
                k => (lo + (hi - lo) * k as f64 / (self.points - 1) as f64).exp(),
            })
            .collect()
    }
}
