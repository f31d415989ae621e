use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use sparsedepth::raster::{save_image, save_mask, ImageFormat};
use sparsedepth::DisparityMap;
use sparsedepth_bench::experiment::{levels_csv, sweep_csv, write_trace};
use sparsedepth_bench::{
    emit_convergence, level_spans, run_experiment, run_sweep, run_trial, BenchError, BenchResult, ExperimentConfig,
    SweepSpec,
};

/// Sparse-sample disparity reconstruction and sampling experiments.
#[derive(Parser)]
#[command(name = "sparsedepth", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Reconstruct one map; writes recon.pfm, mask.pgm and trace.csv.
    Reconstruct(Common),
    /// Build a sampling pattern only; writes mask.pgm and probs.pfm.
    Sample(Common),
    /// Monte-Carlo experiment; writes results.csv and timing.csv.
    Bench(Common),
    /// Log-spaced parameter sweep; writes sweep.csv.
    Sweep {
        #[command(flatten)]
        common: Common,
        /// lambda1, lambda2, beta, rho1, rho2, mu or gamma.
        #[arg(long)]
        param: String,
        #[arg(long, default_value_t = 1e-6)]
        min: f64,
        #[arg(long, default_value_t = 1.0)]
        max: f64,
        #[arg(long, default_value_t = 7)]
        points: usize,
    },
    /// Per-iteration convergence trace; writes trace.csv (and levels.csv when levels > 1).
    Trace(Common),
}

/// Config file plus per-key overrides (see the `config` module for the key list).
#[derive(Args, Clone, Default)]
struct Common {
    /// Key = value config file; flags override its entries.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    input: Option<String>,
    #[arg(long)]
    strategy: Option<String>,
    #[arg(long)]
    ratio: Option<String>,
    #[arg(long)]
    method: Option<String>,
    #[arg(long)]
    dictionaries: Option<String>,
    #[arg(long)]
    lambda1: Option<String>,
    #[arg(long)]
    lambda2: Option<String>,
    #[arg(long)]
    rho1: Option<String>,
    #[arg(long)]
    rho2: Option<String>,
    #[arg(long)]
    beta: Option<String>,
    #[arg(long)]
    mu: Option<String>,
    #[arg(long)]
    gamma: Option<String>,
    #[arg(long)]
    tol: Option<String>,
    #[arg(long)]
    max_iter: Option<String>,
    #[arg(long)]
    contourlet: Option<String>,
    #[arg(long)]
    levels: Option<String>,
    #[arg(long)]
    trials: Option<String>,
    #[arg(long)]
    seed: Option<String>,
    #[arg(long)]
    noise: Option<String>,
    #[arg(long)]
    disparity_levels: Option<String>,
    #[arg(long)]
    output: Option<String>,
}

impl Common {
    fn resolve(&self) -> BenchResult<ExperimentConfig> {
        let mut pairs = match &self.config {
            Some(path) => {
                let text = std::fs::read_to_string(path)
                    .map_err(|e| BenchError::config("config", format!("{}: {e}", path.display())))?;
                sparsedepth_bench::config::parse_pairs(&text)?
            }
            None => Vec::new(),
        };
        let flags = [
            ("input", &self.input),
            ("strategy", &self.strategy),
            ("ratio", &self.ratio),
            ("method", &self.method),
            ("dictionaries", &self.dictionaries),
            ("lambda1", &self.lambda1),
            ("lambda2", &self.lambda2),
            ("rho1", &self.rho1),
            ("rho2", &self.rho2),
            ("beta", &self.beta),
            ("mu", &self.mu),
            ("gamma", &self.gamma),
            ("tol", &self.tol),
            ("max_iter", &self.max_iter),
            ("contourlet", &self.contourlet),
            ("levels", &self.levels),
            ("trials", &self.trials),
            ("seed", &self.seed),
            ("noise", &self.noise),
            ("disparity_levels", &self.disparity_levels),
            ("output", &self.output),
        ];
        for (key, value) in flags {
            if let Some(value) = value {
                pairs.retain(|(k, _)| k != key);
                pairs.push((key.to_string(), value.clone()));
            }
        }
        let mut cfg = ExperimentConfig::default();
        cfg.apply(&pairs)?;
        Ok(cfg)
    }
}

fn run(cli: Cli) -> BenchResult<()> {
    match cli.command {
        Command::Reconstruct(c) => {
            let cfg = c.resolve()?;
            let truth = cfg.input.load()?;
            let out = run_trial(&cfg, &truth, &cfg.solver()?, 0)?;
            std::fs::create_dir_all(&cfg.output)?;
            save_image(&out.map, cfg.output.join("recon.pfm"), ImageFormat::Pfm)?;
            save_mask(out.design.pattern.mask(), cfg.output.join("mask.pgm"))?;
            write_trace(&out, &cfg.output)?;
            let r = &out.row;
            println!(
                "psnr_db={:.4} mse={:.6e} ratio={:.4} iterations={} converged={}",
                r.report.psnr_db, r.report.mse, r.realized_ratio, r.iterations, r.converged
            );
        }
        Command::Sample(c) => {
            let cfg = c.resolve()?;
            let truth = cfg.input.load()?;
            let seed = sparsedepth::seed::trial_seed(cfg.seed, 0);
            let d = sparsedepth::sampling::design(cfg.strategy, &truth, cfg.ratio, seed, &cfg.solver()?)?;
            std::fs::create_dir_all(&cfg.output)?;
            save_mask(d.pattern.mask(), cfg.output.join("mask.pgm"))?;
            let probs = DisparityMap::from_grid(d.pattern.probs().clone())?;
            save_image(&probs, cfg.output.join("probs.pfm"), ImageFormat::Pfm)?;
            println!("samples={} ratio={:.6} target={:.6}", d.pattern.sample_count(), d.pattern.realized_ratio(), d.pattern.target_ratio());
        }
        Command::Bench(c) => {
            let cfg = c.resolve()?;
            let res = run_experiment(&cfg)?;
            let (path, _) = res.write(&cfg.output)?;
            let s = &res.summary;
            println!(
                "trials={} psnr_db={:.4}±{:.4} mse={:.6e} iterations={:.1} -> {}",
                res.rows.len(),
                s.psnr_db.mean,
                s.psnr_db.std,
                s.mse.mean,
                s.iterations.mean,
                path.display()
            );
        }
        Command::Sweep { common, param, min, max, points } => {
            let cfg = common.resolve()?;
            let spec = SweepSpec::new(param.parse()?, min, max, points)?;
            let rows = run_sweep(&spec, &cfg)?;
            std::fs::create_dir_all(&cfg.output)?;
            let path = cfg.output.join("sweep.csv");
            std::fs::write(&path, sweep_csv(&spec, &rows)?)?;
            print!("{}", sweep_csv(&spec, &rows)?);
        }
        Command::Trace(c) => {
            let cfg = c.resolve()?;
            let out = emit_convergence(&cfg)?;
            let files = write_trace(&out, &cfg.output)?;
            let spans = level_spans(&out.trace);
            if spans.len() > 1 {
                print!("{}", levels_csv(&spans)?);
            }
            println!("iterations={} converged={} -> {}", out.row.iterations, out.row.converged, files[0].display());
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
