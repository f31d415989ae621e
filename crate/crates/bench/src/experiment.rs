//! Monte-Carlo experiments, parameter sweeps and convergence traces.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;

use sparsedepth::metrics::EvalReport;
use sparsedepth::raster::add_gaussian_noise;
use sparsedepth::sampling::{design, Design};
use sparsedepth::seed::{derive, trial_seed};
use sparsedepth::{AdmmSolver, ConvergenceTrace, DisparityMap};

use crate::baseline::bilinear_from_grid;
use crate::config::{ExperimentConfig, Method, SweepSpec};
use crate::error::{BenchError, BenchResult};

/// Seed stream used for measurement noise.
const NOISE_STREAM: u64 = 0x6e6f697365;

/// Outcome of one trial.
#[derive(Clone, Debug, PartialEq)]
pub struct TrialRow {
    pub trial: usize,
    pub seed: u64,
    pub realized_ratio: f64,
    pub report: EvalReport,
    /// ADMM iterations summed over pyramid levels (0 for interpolation).
    pub iterations: usize,
    pub converged: bool,
    /// Wall time of sampling design plus reconstruction.
    pub wall_ms: f64,
}

/// Mean and sample standard deviation.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Stat {
    pub mean: f64,
    pub std: f64,
}

impl Stat {
    pub fn of(values: impl IntoIterator<Item = f64>) -> Self {
        let v: Vec<f64> = values.into_iter().collect();
        let n = v.len() as f64;
        if v.is_empty() {
            return Self { mean: f64::NAN, std: f64::NAN };
        }
        let mean = v.iter().sum::<f64>() / n;
        let std = if v.len() > 1 { (v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt() } else { 0.0 };
        Self { mean, std }
    }
}

/// Aggregates over trials.
#[derive(Clone, Debug, PartialEq)]
pub struct Summary {
    pub realized_ratio: Stat,
    pub psnr_db: Stat,
    pub mse: Stat,
    /// One entry per bad-pixel threshold.
    pub bad_pixel_pct: Vec<Stat>,
    pub iterations: Stat,
}

impl Summary {
    pub fn of(rows: &[TrialRow]) -> Self {
        let thresholds = rows.first().map_or(0, |r| r.report.bad_pixel_pct.len());
        Self {
            realized_ratio: Stat::of(rows.iter().map(|r| r.realized_ratio)),
            psnr_db: Stat::of(rows.iter().map(|r| r.report.psnr_db)),
            mse: Stat::of(rows.iter().map(|r| r.report.mse)),
            bad_pixel_pct: (0..thresholds).map(|k| Stat::of(rows.iter().map(|r| r.report.bad_pixel_pct[k].1))).collect(),
            iterations: Stat::of(rows.iter().map(|r| r.iterations as f64)),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentResult {
    pub rows: Vec<TrialRow>,
    pub summary: Summary,
}

pub const RESULTS_HEADER: [&str; 10] =
    ["trial", "seed", "realized_ratio", "psnr_db", "mse", "bad_1", "bad_2", "bad_3", "iterations", "converged"];

impl ExperimentResult {
    /// Deterministic per-trial table followed by `mean` and `std` rows.
    pub fn results_csv(&self) -> BenchResult<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(RESULTS_HEADER)?;
        for r in &self.rows {
            let mut rec = vec![r.trial.to_string(), r.seed.to_string(), r.realized_ratio.to_string()];
            rec.push(r.report.psnr_db.to_string());
            rec.push(r.report.mse.to_string());
            rec.extend(r.report.bad_pixel_pct.iter().map(|(_, p)| p.to_string()));
            rec.push(r.iterations.to_string());
            rec.push(u8::from(r.converged).to_string());
            w.write_record(&rec)?;
        }
        let s = &self.summary;
        for (label, pick) in [("mean", true), ("std", false)] {
            let f = |st: &Stat| if pick { st.mean } else { st.std }.to_string();
            let mut rec = vec![label.to_string(), String::new(), f(&s.realized_ratio), f(&s.psnr_db), f(&s.mse)];
            rec.extend(s.bad_pixel_pct.iter().map(f));
            rec.push(f(&s.iterations));
            let conv = self.rows.iter().filter(|r| r.converged).count() as f64 / self.rows.len() as f64;
            rec.push(if pick { conv.to_string() } else { String::new() });
            w.write_record(&rec)?;
        }
        finish_csv(w)
    }

    /// Per-trial wall times (not reproducible, hence kept apart from the results).
    pub fn timing_csv(&self) -> BenchResult<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["trial", "wall_ms"])?;
        for r in &self.rows {
            w.write_record([r.trial.to_string(), format!("{:.3}", r.wall_ms)])?;
        }
        finish_csv(w)
    }

    /// Writes `results.csv` and `timing.csv` into `dir`.
    pub fn write(&self, dir: &Path) -> BenchResult<(PathBuf, PathBuf)> {
        fs::create_dir_all(dir)?;
        let (res, tim) = (dir.join("results.csv"), dir.join("timing.csv"));
        fs::write(&res, self.results_csv()?)?;
        fs::write(&tim, self.timing_csv()?)?;
        Ok((res, tim))
    }
}

fn finish_csv(w: csv::Writer<Vec<u8>>) -> BenchResult<String> {
    let bytes = w.into_inner().map_err(|e| BenchError::Io(e.into_error()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

/// A reconstructed trial together with its sampling design.
#[derive(Clone, Debug)]
pub struct TrialOutcome {
    pub row: TrialRow,
    pub design: Design<f64>,
    pub map: DisparityMap<f64>,
    pub trace: ConvergenceTrace,
}

/// Samples (with optional noise), reconstructs and evaluates one trial.
pub fn run_trial(
    cfg: &ExperimentConfig,
    truth: &DisparityMap<f64>,
    solver: &AdmmSolver<f64>,
    trial: usize,
) -> BenchResult<TrialOutcome> {
    let seed = trial_seed(cfg.seed, trial as u64);
    let start = Instant::now();
    let measured = if cfg.noise > 0.0 { add_gaussian_noise(truth, cfg.noise, derive(seed, NOISE_STREAM))? } else { truth.clone() };
    let design = design(cfg.strategy, &measured, cfg.ratio, seed, solver)?;
    let (map, trace, converged) = match cfg.method {
        Method::Admm => {
            let rec = solver.solve_multiscale(&design.observation, cfg.levels)?;
            (rec.map, rec.trace, rec.converged)
        }
        Method::Bilinear => (bilinear_from_grid(&design.observation, cfg.ratio)?, ConvergenceTrace::default(), true),
    };
    let wall_ms = start.elapsed().as_secs_f64() * 1e3;
    let report = EvalReport::evaluate(map.grid(), truth.grid(), cfg.disparity_levels)?;
    let row = TrialRow {
        trial,
        seed,
        realized_ratio: design.pattern.realized_ratio(),
        report,
        iterations: trace.len(),
        converged,
        wall_ms,
    };
    Ok(TrialOutcome { row, design, map, trace })
}

/// Runs `cfg.trials` independent trials in parallel; rows are ordered by trial index.
pub fn run_experiment(cfg: &ExperimentConfig) -> BenchResult<ExperimentResult> {
    cfg.validate()?;
    let truth = cfg.input.load()?;
    let solver = cfg.solver()?;
    let rows = (0..cfg.trials)
        .into_par_iter()
        .map(|t| run_trial(cfg, &truth, &solver, t).map(|o| o.row))
        .collect::<BenchResult<Vec<_>>>()?;
    let summary = Summary::of(&rows);
    Ok(ExperimentResult { rows, summary })
}

/// One grid point of a sweep.
#[derive(Clone, Debug, PartialEq)]
pub struct SweepRow {
    pub value: f64,
    pub mean_mse: f64,
    pub mean_psnr_db: f64,
    /// Mean iterations to tolerance (or to the cap when not converged).
    pub mean_iterations: f64,
    pub converged_fraction: f64,
}

/// Runs the experiment at every grid value of `spec`, other parameters fixed.
pub fn run_sweep(spec: &SweepSpec, cfg: &ExperimentConfig) -> BenchResult<Vec<SweepRow>> {
    cfg.validate()?;
    if spec.param.get(&cfg.params).is_none() {
        return Err(BenchError::config("param", format!("{} needs a second dictionary", spec.param.key())));
    }
    spec.values()
        .into_iter()
        .map(|value| {
            let mut point = cfg.clone();
            point.set(spec.param.key(), &value.to_string())?;
            let res = run_experiment(&point)?;
            let conv = res.rows.iter().filter(|r| r.converged).count() as f64 / res.rows.len() as f64;
            Ok(SweepRow {
                value,
                mean_mse: res.summary.mse.mean,
                mean_psnr_db: res.summary.psnr_db.mean,
                mean_iterations: res.summary.iterations.mean,
                converged_fraction: conv,
            })
        })
        .collect()
}

pub fn sweep_csv(spec: &SweepSpec, rows: &[SweepRow]) -> BenchResult<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record([spec.param.key(), "mean_mse", "mean_psnr_db", "mean_iterations", "converged_fraction"])?;
    for r in rows {
        w.write_record([
            r.value.to_string(),
            r.mean_mse.to_string(),
            r.mean_psnr_db.to_string(),
            r.mean_iterations.to_string(),
            r.converged_fraction.to_string(),
        ])?;
    }
    finish_csv(w)
}

/// Iteration span of one pyramid level in a trace.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LevelSpan {
    pub level: usize,
    /// 1-based, inclusive.
    pub first_iter: usize,
    pub last_iter: usize,
    /// Wall time at the end of the level.
    pub wall_ms: f64,
}

/// Splits a trace into contiguous per-level spans.
pub fn level_spans(trace: &ConvergenceTrace) -> Vec<LevelSpan> {
    let mut spans: Vec<LevelSpan> = Vec::new();
    for (k, r) in trace.records.iter().enumerate() {
        match spans.last_mut() {
            Some(s) if s.level == r.level => {
                s.last_iter = k + 1;
                s.wall_ms = r.wall_ms;
            }
            _ => spans.push(LevelSpan { level: r.level, first_iter: k + 1, last_iter: k + 1, wall_ms: r.wall_ms }),
        }
    }
    spans
}

pub fn levels_csv(spans: &[LevelSpan]) -> BenchResult<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["level", "first_iter", "last_iter", "wall_ms"])?;
    for s in spans {
        w.write_record([s.level.to_string(), s.first_iter.to_string(), s.last_iter.to_string(), format!("{:.3}", s.wall_ms)])?;
    }
    finish_csv(w)
}

/// Single-trial run with its per-iteration trace (trial 0 of the equivalent experiment).
pub fn emit_convergence(cfg: &ExperimentConfig) -> BenchResult<TrialOutcome> {
    cfg.validate()?;
    if cfg.trials != 1 {
        return Err(BenchError::config("trials", "convergence traces need trials = 1"));
    }
    if cfg.method != Method::Admm {
        return Err(BenchError::config("method", "convergence traces need method = admm"));
    }
    let truth = cfg.input.load()?;
    run_trial(cfg, &truth, &cfg.solver()?, 0)
}

/// Writes `trace.csv`, plus `levels.csv` for multiscale runs.
pub fn write_trace(outcome: &TrialOutcome, dir: &Path) -> BenchResult<Vec<PathBuf>> {
    fs::create_dir_all(dir)?;
    let mut written = vec![dir.join("trace.csv")];
    fs::write(&written[0], outcome.trace.to_csv())?;
    let spans = level_spans(&outcome.trace);
    if spans.len() > 1 {
        let p = dir.join("levels.csv");
        fs::write(&p, levels_csv(&spans)?)?;
        written.push(p);
    }
    Ok(written)
}
