use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;

use sparsedepth::frames::TightFrame;
use sparsedepth::metrics::psnr;
use sparsedepth::raster::{synth_scene, SceneKind};
use sparsedepth::sampling::{grid_pattern, uniform_pattern};
use sparsedepth::solver::*;
use sparsedepth::{
    CoefficientSet, ContourletConfig, DictionaryKind, DisparityMap, Grid, Mask, Observation,
};

const BOTH: [DictionaryKind; 2] = [DictionaryKind::Wavelet, DictionaryKind::Contourlet];

/// Row-major dense matrix with `cols` columns.
struct Dense {
    rows: usize,
    cols: usize,
    a: Vec<f64>,
}

impl Dense {
    fn from_columns(rows: usize, columns: Vec<Vec<f64>>) -> Self {
        let cols = columns.len();
        let mut a = vec![0.0; rows * cols];
        for (j, c) in columns.iter().enumerate() {
            for i in 0..rows {
                a[i * cols + j] = c[i];
            }
        }
        Self { rows, cols, a }
    }

    fn mul(&self, x: &[f64]) -> Vec<f64> {
        (0..self.rows).map(|i| (0..self.cols).map(|j| self.a[i * self.cols + j] * x[j]).sum()).collect()
    }

    fn tmul(&self, x: &[f64]) -> Vec<f64> {
        (0..self.cols).map(|j| (0..self.rows).map(|i| self.a[i * self.cols + j] * x[i]).sum()).collect()
    }

    /// `self · selfᵀ`.
    fn gram_outer(&self) -> Vec<f64> {
        let n = self.rows;
        let mut g = vec![0.0; n * n];
        for i in 0..n {
            for k in 0..n {
                g[i * n + k] = (0..self.cols).map(|j| self.a[i * self.cols + j] * self.a[k * self.cols + j]).sum();
            }
        }
        g
    }

    /// `selfᵀ · self`.
    fn gram_inner(&self) -> Vec<f64> {
        let n = self.cols;
        let mut g = vec![0.0; n * n];
        for i in 0..n {
            for k in 0..n {
                g[i * n + k] = (0..self.rows).map(|j| self.a[j * self.cols + i] * self.a[j * self.cols + k]).sum();
            }
        }
        g
    }
}

fn unit(n: usize, k: usize) -> Vec<f64> {
    let mut e = vec![0.0; n];
    e[k] = 1.0;
    e
}

/// Gaussian elimination with partial pivoting.
fn solve_dense(mut a: Vec<f64>, mut b: Vec<f64>) -> Vec<f64> {
    let n = b.len();
    for col in 0..n {
        let piv = (col..n).max_by(|&i, &j| a[i * n + col].abs().total_cmp(&a[j * n + col].abs())).unwrap();
        for k in 0..n {
            a.swap(col * n + k, piv * n + k);
        }
        b.swap(col, piv);
        for i in col + 1..n {
            let f = a[i * n + col] / a[col * n + col];
            for k in col..n {
                a[i * n + k] -= f * a[col * n + k];
            }
            b[i] -= f * b[col];
        }
    }
    let mut x = vec![0.0; n];
    for i in (0..n).rev() {
        let s: f64 = (i + 1..n).map(|k| a[i * n + k] * x[k]).sum();
        x[i] = (b[i] - s) / a[i * n + i];
    }
    x
}

/// Dense synthesis matrices of the problem's dictionaries and the two difference matrices.
struct DenseOps {
    phi: Vec<Dense>,
    dx: Dense,
    dy: Dense,
}

fn dense_ops(problem: &Problem<f64>) -> DenseOps {
    let (r, c) = problem.shape();
    let n = r * c;
    let phi = problem
        .dictionaries()
        .iter()
        .map(|d| {
            let layout = d.layout().clone();
            let m = layout.total();
            let columns = (0..m)
                .map(|k| d.synthesis(&CoefficientSet::from_vec(layout.clone(), unit(m, k)).unwrap()).into_vec())
                .collect();
            Dense::from_columns(n, columns)
        })
        .collect();
    let (mut cx, mut cy) = (Vec::new(), Vec::new());
    for k in 0..n {
        let (gx, gy) = problem.diff().apply(&Grid::new(r, c, unit(n, k)).unwrap());
        cx.push(gx.into_vec());
        cy.push(gy.into_vec());
    }
    DenseOps { phi, dx: Dense::from_columns(n, cx), dy: Dense::from_columns(n, cy) }
}

fn random_grid(rng: &mut ChaCha20Rng, r: usize, c: usize) -> Grid<f64> {
    Grid::from_fn(r, c, |_, _| rng.random::<f64>() - 0.5)
}

fn random_observation(rng: &mut ChaCha20Rng, r: usize, c: usize, ratio: f64) -> Observation<f64> {
    let truth = Grid::from_fn(r, c, |_, _| rng.random::<f64>());
    let mask: Mask = Grid::from_fn(r, c, |_, _| rng.random::<f64>() < ratio);
    Observation::sample(&truth, &mask).unwrap()
}

/// A state with every variable randomized.
fn random_state(rng: &mut ChaCha20Rng, problem: &Problem<f64>) -> SolverState<f64> {
    let mut s = SolverState::initial(problem);
    let (r, c) = problem.shape();
    for g in [&mut s.x, &mut s.r, &mut s.vx, &mut s.vy, &mut s.w, &mut s.zx, &mut s.zy] {
        *g = random_grid(rng, r, c);
    }
    for set in s.u.iter_mut().chain(s.y.iter_mut()) {
        set.as_mut_slice().iter_mut().for_each(|v| *v = rng.random::<f64>() - 0.5);
    }
    s
}

fn small_contourlet() -> ContourletConfig {
    ContourletConfig::with_levels(vec![1, 2])
}

fn solver_both() -> AdmmSolver<f64> {
    AdmmSolver::typical(&BOTH).with_contourlet(small_contourlet())
}

fn randomized_params(rng: &mut ChaCha20Rng) -> SolverParams<f64> {
    let mut p = SolverParams::typical(&BOTH);
    p.rho = vec![0.5 + rng.random::<f64>(), 0.2 + rng.random::<f64>()];
    p.mu = 0.3 + rng.random::<f64>();
    p.gamma = 0.1 + rng.random::<f64>();
    p
}

#[test]
fn x_step_matches_dense_normal_equations() {
    let mut rng = ChaCha20Rng::seed_from_u64(1);
    let obs = random_observation(&mut rng, 16, 16, 0.3);
    let solver = solver_both();
    let problem = solver.problem(&obs, 1).unwrap();
    let ops = dense_ops(&problem);
    let params = randomized_params(&mut rng);
    let state = random_state(&mut rng, &problem);
    let n = 256;

    let mut a = vec![0.0; n * n];
    let mut rhs: Vec<f64> = state.r.as_slice().iter().zip(state.w.as_slice()).map(|(r, w)| params.mu * r - w).collect();
    for (l, phi) in ops.phi.iter().enumerate() {
        let g = phi.gram_outer();
        for (dst, v) in a.iter_mut().zip(&g) {
            *dst += params.rho[l] * v;
        }
        let coeff: Vec<f64> = state.u[l].as_slice().iter().zip(state.y[l].as_slice()).map(|(u, y)| params.rho[l] * u - y).collect();
        for (dst, v) in rhs.iter_mut().zip(phi.mul(&coeff)) {
            *dst += v;
        }
    }
    for (d, v, z) in [(&ops.dx, &state.vx, &state.zx), (&ops.dy, &state.vy, &state.zy)] {
        let g = d.gram_inner();
        for (dst, val) in a.iter_mut().zip(&g) {
            *dst += params.gamma * val;
        }
        let p: Vec<f64> = v.as_slice().iter().zip(z.as_slice()).map(|(v, z)| params.gamma * v - z).collect();
        for (dst, val) in rhs.iter_mut().zip(d.tmul(&p)) {
            *dst += val;
        }
    }
    for i in 0..n {
        a[i * n + i] += params.mu;
    }
    let want = solve_dense(a, rhs);
    let got = x_step(&state, &params, &problem);
    let err = got.as_slice().iter().zip(&want).map(|(g, w)| (g - w).abs()).fold(0.0, f64::max);
    assert!(err <= 1e-8, "x-step deviates from dense solve by {err}");
}

fn golden_section(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = hi - g * (hi - lo);
    let mut d = lo + g * (hi - lo);
    while hi - lo > 1e-10 {
        if f(c) < f(d) {
            hi = d;
        } else {
            lo = c;
        }
        c = hi - g * (hi - lo);
        d = lo + g * (hi - lo);
    }
    0.5 * (lo + hi)
}

#[test]
fn shrinkage_steps_match_scalar_minimization() {
    let mut rng = ChaCha20Rng::seed_from_u64(2);
    let solver = solver_both();
    let obs = random_observation(&mut rng, 16, 16, 0.3);
    let problem = solver.problem(&obs, 1).unwrap();
    let state = random_state(&mut rng, &problem);
    let dict = &problem.dictionaries()[1];
    let alpha = dict.analysis(&state.x);
    let (lambda, rho) = (0.07, 0.4);
    let u = u_step(&alpha, &state.y[1], lambda, rho, dict.weight_mask());
    for k in (0..alpha.len()).step_by(7) {
        let (a, y) = (alpha.as_slice()[k], state.y[1].as_slice()[k]);
        let weight = if dict.weight_mask()[k] { lambda } else { 0.0 };
        let f = |t: f64| weight * t.abs() - y * (t - a) + 0.5 * rho * (t - a) * (t - a);
        let want = golden_section(f, -10.0, 10.0);
        assert!((u.as_slice()[k] - want).abs() <= 1e-6, "u[{k}]");
    }

    let (beta, gamma) = (0.05, 0.3);
    let (dx, dy) = problem.diff().apply(&state.x);
    let (vx, vy) = v_step(&dx, &dy, &state.zx, &state.zy, beta, gamma);
    for (v, d, z) in [(&vx, &dx, &state.zx), (&vy, &dy, &state.zy)] {
        for k in (0..d.len()).step_by(5) {
            let (dk, zk) = (d.as_slice()[k], z.as_slice()[k]);
            let f = |t: f64| beta * t.abs() - zk * (t - dk) + 0.5 * gamma * (t - dk) * (t - dk);
            let want = golden_section(f, -10.0, 10.0);
            assert!((v.as_slice()[k] - want).abs() <= 1e-6);
        }
    }
}

#[test]
fn r_step_matches_dense_solve() {
    let mut rng = ChaCha20Rng::seed_from_u64(3);
    let (r, c) = (8, 8);
    let n = r * c;
    let x = random_grid(&mut rng, r, c);
    let w = random_grid(&mut rng, r, c);
    let s: Grid<f64> = Grid::from_fn(r, c, |_, _| if rng.random::<f64>() < 0.4 { 1.0 } else { 0.0 });
    let b = Grid::from_fn(r, c, |i, j| s.get(i, j) * rng.random::<f64>());
    let mu = 0.37;
    let mut a = vec![0.0; n * n];
    let mut rhs = vec![0.0; n];
    for k in 0..n {
        a[k * n + k] = s.as_slice()[k] + mu;
        rhs[k] = s.as_slice()[k] * b.as_slice()[k] + w.as_slice()[k] + mu * x.as_slice()[k];
    }
    let want = solve_dense(a, rhs);
    let got = r_step(&x, &w, &s, &b, mu);
    for (g, w) in got.as_slice().iter().zip(&want) {
        assert!((g - w).abs() <= 1e-14);
    }
}

#[test]
fn objective_matches_dense_evaluation() {
    let mut rng = ChaCha20Rng::seed_from_u64(4);
    let obs = random_observation(&mut rng, 16, 16, 0.4);
    let solver = solver_both();
    let problem = solver.problem(&obs, 1).unwrap();
    let ops = dense_ops(&problem);
    let params = solver.params();
    let x = random_grid(&mut rng, 16, 16);
    let xs = x.as_slice();
    let mut want = 0.0;
    for ((&xv, &m), &b) in xs.iter().zip(obs.mask().as_slice()).zip(obs.values().as_slice()) {
        let e = if m { xv } else { 0.0 } - b;
        want += 0.5 * e * e;
    }
    for ((phi, dict), &lambda) in ops.phi.iter().zip(problem.dictionaries()).zip(&params.lambda) {
        let alpha = phi.tmul(xs);
        want += lambda * alpha.iter().zip(dict.weight_mask()).filter(|(_, &w)| w).map(|(a, _)| a.abs()).sum::<f64>();
    }
    for d in [&ops.dx, &ops.dy] {
        want += params.beta * d.mul(xs).iter().map(|v| v.abs()).sum::<f64>();
    }
    let got = objective(&x, &problem, params);
    assert!((got - want).abs() <= 1e-12 * want.abs().max(1.0), "{got} vs {want}");
}

#[test]
fn dual_update_is_linear_ascent() {
    let mut rng = ChaCha20Rng::seed_from_u64(5);
    let obs = random_observation(&mut rng, 16, 16, 0.4);
    let solver = solver_both();
    let problem = solver.problem(&obs, 1).unwrap();
    let params = randomized_params(&mut rng);
    let state = random_state(&mut rng, &problem);
    let alpha: Vec<_> = problem.dictionaries().iter().map(|d| d.analysis(&state.x)).collect();
    let (dx, dy) = problem.diff().apply(&state.x);
    let mut next = state.clone();
    dual_update(&mut next, &params, &alpha, &dx, &dy);
    for l in 0..2 {
        for k in 0..alpha[l].len() {
            let want = state.y[l].as_slice()[k] - params.rho[l] * (state.u[l].as_slice()[k] - alpha[l].as_slice()[k]);
            assert!((next.y[l].as_slice()[k] - want).abs() <= 1e-15);
        }
    }
    for k in 0..256 {
        let want_w = state.w.as_slice()[k] - params.mu * (state.r.as_slice()[k] - state.x.as_slice()[k]);
        let want_zx = state.zx.as_slice()[k] - params.gamma * (state.vx.as_slice()[k] - dx.as_slice()[k]);
        let want_zy = state.zy.as_slice()[k] - params.gamma * (state.vy.as_slice()[k] - dy.as_slice()[k]);
        assert!((next.w.as_slice()[k] - want_w).abs() <= 1e-15);
        assert!((next.zx.as_slice()[k] - want_zx).abs() <= 1e-15);
        assert!((next.zy.as_slice()[k] - want_zy).abs() <= 1e-15);
    }
    // consistent splits leave the duals unchanged
    let mut fixed = state.clone();
    fixed.u = alpha.clone();
    fixed.r = state.x.clone();
    (fixed.vx, fixed.vy) = (dx.clone(), dy.clone());
    let mut after = fixed.clone();
    dual_update(&mut after, &params, &alpha, &dx, &dy);
    assert_eq!(after.y, fixed.y);
    assert_eq!(after.w, fixed.w);
}

/// Augmented Lagrangian with the solver's sign convention (`y −= ρ(u − Φᵀx)`).
fn lagrangian(problem: &Problem<f64>, p: &SolverParams<f64>, s: &SolverState<f64>) -> f64 {
    let mut total = 0.0;
    for ((&r, &m), &b) in s.r.as_slice().iter().zip(problem.mask().as_slice()).zip(problem.observed().as_slice()) {
        let e = if m { r } else { 0.0 } - b;
        total += 0.5 * e * e;
    }
    for (l, dict) in problem.dictionaries().iter().enumerate() {
        let alpha = dict.analysis(&s.x);
        for (((&u, &a), &y), &w) in s.u[l].as_slice().iter().zip(alpha.as_slice()).zip(s.y[l].as_slice()).zip(dict.weight_mask()) {
            if w {
                total += p.lambda[l] * u.abs();
            }
            total += -y * (u - a) + 0.5 * p.rho[l] * (u - a) * (u - a);
        }
    }
    for k in 0..s.x.len() {
        let (r, x, w) = (s.r.as_slice()[k], s.x.as_slice()[k], s.w.as_slice()[k]);
        total += -w * (r - x) + 0.5 * p.mu * (r - x) * (r - x);
    }
    let (dx, dy) = problem.diff().apply(&s.x);
    for (v, d, z) in [(&s.vx, &dx, &s.zx), (&s.vy, &dy, &s.zy)] {
        for k in 0..d.len() {
            let (vk, dk, zk) = (v.as_slice()[k], d.as_slice()[k], z.as_slice()[k]);
            total += p.beta * vk.abs() - zk * (vk - dk) + 0.5 * p.gamma * (vk - dk) * (vk - dk);
        }
    }
    total
}

#[test]
fn each_primal_block_decreases_the_lagrangian() {
    let mut rng = ChaCha20Rng::seed_from_u64(6);
    let obs = random_observation(&mut rng, 16, 16, 0.3);
    let solver = solver_both();
    let problem = solver.problem(&obs, 1).unwrap();
    let p = randomized_params(&mut rng);
    let mut s = random_state(&mut rng, &problem);
    for _ in 0..5 {
        let l0 = lagrangian(&problem, &p, &s);
        s.x = x_step(&s, &p, &problem);
        let l1 = lagrangian(&problem, &p, &s);
        let alpha: Vec<_> = problem.dictionaries().iter().map(|d| d.analysis(&s.x)).collect();
        for (l, d) in problem.dictionaries().iter().enumerate() {
            s.u[l] = u_step(&alpha[l], &s.y[l], p.lambda[l], p.rho[l], d.weight_mask());
        }
        let l2 = lagrangian(&problem, &p, &s);
        s.r = r_step(&s.x, &s.w, problem.indicator(), problem.observed(), p.mu);
        let l3 = lagrangian(&problem, &p, &s);
        let (dx, dy) = problem.diff().apply(&s.x);
        (s.vx, s.vy) = v_step(&dx, &dy, &s.zx, &s.zy, p.beta, p.gamma);
        let l4 = lagrangian(&problem, &p, &s);
        let slack = 1e-10 * l0.abs().max(1.0);
        assert!(l1 <= l0 + slack && l2 <= l1 + slack && l3 <= l2 + slack && l4 <= l3 + slack, "{l0} {l1} {l2} {l3} {l4}");
        dual_update(&mut s, &p, &alpha, &dx, &dy);
    }
}

#[test]
fn full_sampling_reproduces_the_map() {
    let truth: DisparityMap<f64> = synth_scene(SceneKind::PiecewisePlanar, 64, 64, 1).unwrap();
    let obs = grid_pattern((64, 64), 1.0).unwrap().observe(truth.grid()).unwrap();
    let mut params = SolverParams::typical(&BOTH);
    params.lambda = vec![1e-9, 1e-9];
    params.beta = 1e-9;
    let solver = AdmmSolver::new(&BOTH, params).unwrap();
    let rec = solver.solve(&obs).unwrap();
    let db = psnr(rec.map.grid(), truth.grid(), 1.0).unwrap();
    assert!(db >= 60.0, "full-sampling PSNR {db}");
}

#[test]
fn reconstruction_is_deterministic_and_single_level_multiscale_is_identical() {
    let truth: DisparityMap<f64> = synth_scene(SceneKind::Ellipse, 64, 64, 2).unwrap();
    let obs = uniform_pattern((64, 64), 0.2, 7).unwrap().observe(truth.grid()).unwrap();
    let solver = AdmmSolver::typical(&BOTH);
    let a = solver.solve(&obs).unwrap();
    let b = solver.solve(&obs).unwrap();
    let c = solver.solve_multiscale(&obs, 1).unwrap();
    assert_eq!(a.map, b.map);
    assert_eq!(a.map, c.map);
    assert_eq!(a.iterations(), c.iterations());
    assert!(a.converged);
    let trace = a.trace.to_csv();
    assert!(trace.starts_with("iter,objective,rel_change,res_r,res_u1,res_u2,res_v,wall_ms"));
    assert_eq!(trace.lines().count(), a.iterations() + 1);
}

#[test]
fn reconstruction_improves_on_observation() {
    let truth: DisparityMap<f64> = synth_scene(SceneKind::Ellipse, 64, 64, 3).unwrap();
    let obs = uniform_pattern((64, 64), 0.2, 1).unwrap().observe(truth.grid()).unwrap();
    let rec = AdmmSolver::typical(&BOTH).solve(&obs).unwrap();
    let raw = psnr(obs.values(), truth.grid(), 1.0).unwrap();
    let out = psnr(rec.map.grid(), truth.grid(), 1.0).unwrap();
    assert!(out > raw + 10.0, "{out} vs {raw}");
    let objs: Vec<f64> = rec.trace.records.iter().map(|r| r.objective).collect();
    assert!(objs.last().unwrap() < &objs[0]);
}

#[test]
fn odd_shapes_are_padded_and_cropped() {
    let truth: DisparityMap<f64> = synth_scene(SceneKind::Ellipse, 70, 45, 4).unwrap();
    let obs = uniform_pattern((45, 70), 0.3, 2).unwrap().observe(truth.grid()).unwrap();
    for kinds in [&[DictionaryKind::Wavelet][..], &BOTH[..]] {
        let mut params = SolverParams::typical(kinds);
        params.max_iter = 30;
        let rec = AdmmSolver::new(kinds, params).unwrap().solve(&obs).unwrap();
        assert_eq!(rec.map.shape(), (45, 70));
        assert!(rec.map.as_slice().iter().all(|v| (0.0..=1.0).contains(v)));
    }
}

#[test]
fn multiscale_levels_validate() {
    let truth: DisparityMap<f64> = synth_scene(SceneKind::Ellipse, 64, 64, 5).unwrap();
    let obs = uniform_pattern((64, 64), 0.3, 3).unwrap().observe(truth.grid()).unwrap();
    let solver = AdmmSolver::typical(&[DictionaryKind::Wavelet]);
    assert!(solver.solve_multiscale(&obs, 0).is_err());
    assert!(solver.solve_multiscale(&obs, 5).is_err());
    let rec = solver.solve_multiscale(&obs, 2).unwrap();
    assert_eq!(rec.map.shape(), (64, 64));
    let levels: Vec<usize> = rec.trace.records.iter().map(|r| r.level).collect();
    assert_eq!(levels.first(), Some(&1));
    assert_eq!(levels.last(), Some(&0));
    assert!(psnr(rec.map.grid(), truth.grid(), 1.0).unwrap() > 25.0);
}

#[test]
fn single_precision_solves() {
    let truth: DisparityMap<f32> = synth_scene(SceneKind::Ellipse, 64, 64, 6).unwrap();
    let obs = uniform_pattern((64, 64), 0.2, 4).unwrap().observe(truth.grid()).unwrap();
    let rec = AdmmSolver::<f32>::typical(&BOTH).solve(&obs).unwrap();
    assert!(psnr(rec.map.grid(), truth.grid(), 1.0).unwrap() > 25.0);
}

#[test]
fn parameter_validation() {
    let kinds = [DictionaryKind::Wavelet];
    let mut p = SolverParams::<f64>::typical(&kinds);
    p.beta = -1.0;
    assert!(AdmmSolver::new(&kinds, p).is_err());
    assert!(AdmmSolver::new(&BOTH, SolverParams::<f64>::typical(&kinds)).is_err());
    assert!(AdmmSolver::<f64>::new(&[], SolverParams::typical(&[])).is_err());
    let mut p = SolverParams::<f64>::typical(&kinds);
    p.max_iter = 0;
    assert!(p.validate(1).is_err());
}

#[test]
fn mismatched_initial_state_is_rejected() {
    let truth: DisparityMap<f64> = synth_scene(SceneKind::Ellipse, 64, 64, 7).unwrap();
    let obs = uniform_pattern((64, 64), 0.2, 4).unwrap().observe(truth.grid()).unwrap();
    let wavelet = AdmmSolver::typical(&[DictionaryKind::Wavelet]);
    let both = AdmmSolver::typical(&BOTH);
    let state = SolverState::initial(&wavelet.problem(&obs, 1).unwrap());
    assert!(both.solve_from(&obs, Some(state.clone())).is_err());
    let rec = wavelet.solve_from(&obs, Some(state)).unwrap();
    assert_eq!(rec.map, wavelet.solve(&obs).unwrap().map);
}
