use sparsedepth::raster::Grid;
use sparsedepth::sampling::grid_pattern;
use sparsedepth::seed::trial_seed;
use sparsedepth::{DisparityMap, Observation};
use sparsedepth_bench::baseline::bilinear_from_grid;
use sparsedepth_bench::{
    emit_convergence, level_spans, run_experiment, run_sweep, ExperimentConfig, Stat, SweepParam, SweepSpec,
};

fn config(text: &str) -> ExperimentConfig {
    ExperimentConfig::parse(text).unwrap()
}

const SMALL: &str = "input = synth:piecewise-planar:64:1\nstrategy = uniform\nratio = 0.2\ntrials = 3\nseed = 5\n";

#[test]
fn full_sampling_single_row() {
    let res = run_experiment(&config("input = synth:piecewise-planar:64\nstrategy = grid\nratio = 1\nlambda1 = 1e-6\nlambda2 = 1e-6\nbeta = 1e-6\n")).unwrap();
    assert_eq!(res.rows.len(), 1);
    assert_eq!(res.rows[0].realized_ratio, 1.0);
    assert!(res.rows[0].report.psnr_db >= 60.0, "{}", res.rows[0].report.psnr_db);
}

#[test]
fn rerun_is_byte_identical_and_seeds_follow_the_splitter() {
    let cfg = config(SMALL);
    let a = run_experiment(&cfg).unwrap();
    let b = run_experiment(&cfg).unwrap();
    assert_eq!(a.results_csv().unwrap(), b.results_csv().unwrap());
    for (t, row) in a.rows.iter().enumerate() {
        assert_eq!(row.trial, t);
        assert_eq!(row.seed, trial_seed(5, t as u64));
    }
    // Existing trials are unaffected by adding more.
    let mut more = cfg.clone();
    more.trials = 4;
    let c = run_experiment(&more).unwrap();
    let head = |csv: String| csv.lines().take(4).map(str::to_owned).collect::<Vec<_>>();
    assert_eq!(head(c.results_csv().unwrap()), head(a.results_csv().unwrap()));
}

#[test]
fn aggregates_match_the_per_trial_rows() {
    let res = run_experiment(&config(SMALL)).unwrap();
    let csv = res.results_csv().unwrap();
    let mut reader = csv::Reader::from_reader(csv.as_bytes());
    let records: Vec<csv::StringRecord> = reader.records().map(|r| r.unwrap()).collect();
    assert_eq!(records.len(), 3 + 2);
    let column = |k: usize| -> Vec<f64> { records[..3].iter().map(|r| r[k].parse().unwrap()).collect() };
    for k in 2..9 {
        let v = column(k);
        let mean = v.iter().sum::<f64>() / 3.0;
        let std = (v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / 2.0).sqrt();
        let got_mean: f64 = records[3][k].parse().unwrap();
        let got_std: f64 = records[4][k].parse().unwrap();
        assert!((got_mean - mean).abs() <= 1e-12 * mean.abs().max(1.0), "column {k}");
        assert!((got_std - std).abs() <= 1e-12 * std.abs().max(1.0), "column {k}");
    }
    assert_eq!(&records[3][0], "mean");
    assert_eq!(&records[4][0], "std");
    let s = Stat::of([1.0, 2.0, 3.0]);
    assert_eq!((s.mean, s.std), (2.0, 1.0));
}

#[test]
fn noise_is_seeded() {
    let mut cfg = config(SMALL);
    cfg.trials = 1;
    let clean = run_experiment(&cfg).unwrap();
    cfg.noise = 0.02;
    let a = run_experiment(&cfg).unwrap();
    let b = run_experiment(&cfg).unwrap();
    assert_eq!(a.results_csv().unwrap(), b.results_csv().unwrap());
    assert!(a.rows[0].report.mse > clean.rows[0].report.mse);
}

#[test]
fn single_point_sweep_equals_the_experiment() {
    let mut cfg = config(SMALL);
    cfg.trials = 2;
    cfg.params.beta = 5e-3;
    let spec = SweepSpec::new(SweepParam::Beta, 5e-3, 5e-3, 1).unwrap();
    let rows = run_sweep(&spec, &cfg).unwrap();
    let res = run_experiment(&cfg).unwrap();
    assert_eq!(rows.len(), 1);
    assert_eq!(rows[0].mean_mse, res.summary.mse.mean);
    assert_eq!(rows[0].mean_psnr_db, res.summary.psnr_db.mean);
    assert_eq!(rows[0].mean_iterations, res.summary.iterations.mean);
}

#[test]
fn internal_sweep_records_iterations() {
    let mut cfg = config(SMALL);
    cfg.trials = 1;
    let spec = SweepSpec::new(SweepParam::Gamma, 1e-2, 1.0, 3).unwrap();
    let rows = run_sweep(&spec, &cfg).unwrap();
    assert_eq!(rows.iter().map(|r| r.value).collect::<Vec<_>>(), spec.values());
    assert!(rows.iter().all(|r| r.mean_iterations >= 1.0 && r.mean_mse > 0.0));
    let wavelet_only = config("dictionaries = wavelet");
    assert!(run_sweep(&SweepSpec::new(SweepParam::Lambda2, 1e-4, 1e-3, 2).unwrap(), &wavelet_only).is_err());
}

#[test]
fn convergence_trace_is_consistent() {
    let mut cfg = config(SMALL);
    cfg.trials = 1;
    let out = emit_convergence(&cfg).unwrap();
    assert!(out.row.converged);
    assert_eq!(out.trace.len(), out.row.iterations);
    assert!(out.trace.records.last().unwrap().rel_change < cfg.params.tol);
    assert_eq!(level_spans(&out.trace).len(), 1);

    cfg.levels = 2;
    let out = emit_convergence(&cfg).unwrap();
    let spans = level_spans(&out.trace);
    assert_eq!(spans.iter().map(|s| s.level).collect::<Vec<_>>(), vec![1, 0]);
    assert_eq!(spans[0].first_iter, 1);
    assert_eq!(spans[1].first_iter, spans[0].last_iter + 1);
    assert_eq!(spans[1].last_iter, out.row.iterations);

    let dir = tempfile::tempdir().unwrap();
    let files = sparsedepth_bench::experiment::write_trace(&out, dir.path()).unwrap();
    assert_eq!(files.len(), 2);
    let trace = std::fs::read_to_string(&files[0]).unwrap();
    assert_eq!(trace.lines().count(), out.row.iterations + 1);

    cfg.trials = 2;
    assert!(emit_convergence(&cfg).is_err());
}

#[test]
fn bilinear_baseline_reproduces_planes() {
    let plane = Grid::from_fn(31, 29, |i, j| 0.1 + 0.01 * i as f64 + 0.02 * j as f64);
    let pattern = grid_pattern((31, 29), 0.1).unwrap();
    let obs = Observation::sample(&plane, pattern.mask()).unwrap();
    let rec = bilinear_from_grid(&obs, 0.1).unwrap();
    // Stride 3: the last lattice lines are row 30 and column 27.
    for i in 0..31 {
        for j in 0..28 {
            assert!((rec.grid().get(i, j) - plane.get(i, j)).abs() < 1e-12, "({i}, {j})");
        }
        assert_eq!(rec.grid().get(i, 28), rec.grid().get(i, 27));
    }
    let missing = Observation::sample(&plane, &Grid::filled(31, 29, false)).unwrap();
    assert!(bilinear_from_grid(&missing, 0.1).is_err());
    let _: DisparityMap<f64> = rec;
}

#[test]
fn bilinear_method_runs_without_iterations() {
    let res = run_experiment(&config("input = synth:ellipse:64\nstrategy = grid\nmethod = bilinear\nratio = 0.25\n")).unwrap();
    assert_eq!(res.rows[0].iterations, 0);
    assert!(res.rows[0].report.psnr_db > 15.0);
}
