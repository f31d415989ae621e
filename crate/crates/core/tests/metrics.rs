use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;

use sparsedepth::metrics::*;
use sparsedepth::Grid;

fn random(seed: u64) -> Grid<f64> {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    Grid::from_fn(13, 17, |_, _| rng.random::<f64>())
}

#[test]
fn mse_matches_direct_loop_and_is_symmetric() {
    let (a, b) = (random(1), random(2));
    let mut want = 0.0;
    for i in 0..13 {
        for j in 0..17 {
            let d = a.get(i, j) - b.get(i, j);
            want += d * d;
        }
    }
    want /= 221.0;
    assert!((mse(&a, &b).unwrap() - want).abs() <= 1e-15);
    assert_eq!(mse(&a, &b).unwrap(), mse(&b, &a).unwrap());
    assert_eq!(mse(&a, &a).unwrap(), 0.0);
}

#[test]
fn psnr_decreases_with_error() {
    let truth = random(3);
    let noise = random(4).map(|v| v - 0.5);
    let mut last = f64::INFINITY;
    for k in 1..=20 {
        let est = truth.zip_map(&noise, |t, n| t + 0.01 * k as f64 * n);
        let db = psnr(&est, &truth, 1.0).unwrap();
        assert!(db < last);
        last = db;
    }
    assert_eq!(psnr(&truth, &truth, 1.0).unwrap(), PSNR_CAP_DB);
}

#[test]
fn bad_pixel_examples() {
    let truth = Grid::filled(4, 4, 0.5f64);
    let tau = 3.0;
    let off = 2.0 * tau / DEFAULT_DISPARITY_LEVELS;
    let est = Grid::from_fn(4, 4, |i, _| if i < 2 { 0.5 + off } else { 0.5 });
    assert_eq!(bad_pixel_pct(&truth, &truth, tau, DEFAULT_DISPARITY_LEVELS).unwrap(), 0.0);
    assert_eq!(bad_pixel_pct(&est, &truth, tau, DEFAULT_DISPARITY_LEVELS).unwrap(), 50.0);
    assert!(bad_pixel_pct(&est, &truth, 0.0, DEFAULT_DISPARITY_LEVELS).is_err());
}

#[test]
fn bad_pixels_nonincreasing_in_threshold() {
    let (a, b) = (random(5), random(6));
    let mut last = 100.0;
    for k in 1..200 {
        let p = bad_pixel_pct(&a, &b, k as f64, 255.0).unwrap();
        assert!(p <= last && (0.0..=100.0).contains(&p));
        last = p;
    }
}

#[test]
fn report_row_matches_header() {
    let r = EvalReport::evaluate(&random(7), &random(8), 255.0).unwrap();
    assert_eq!(EvalReport::csv_header().split(',').count(), r.csv_row().split(',').count());
    assert_eq!(r.bad_at(3.0), Some(bad_pixel_pct(&random(7), &random(8), 3.0, 255.0).unwrap()));
    assert!(r.mse >= 0.0);
}
