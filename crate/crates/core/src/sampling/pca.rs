use nalgebra::{DMatrix, SymmetricEigen};

use crate::error::{Error, Result};
use crate::raster::Grid;
use crate::sampling::SaliencyField;
use crate::Scalar;

/// Default patch side (49-dimensional patches).
pub const PCA_PATCH_SIDE: usize = 7;
/// Default number of leading eigenvectors kept, including the discarded first one.
pub const PCA_COMPONENTS: usize = 16;

/// Symmetric eigendecomposition.
///
/// `m` is a row-major `d × d` symmetric matrix. Returns eigenvalues in descending
/// order (ties keep the solver's order) and the matching unit eigenvectors as rows,
/// each with its first nonzero component positive.
pub fn symmetric_eigen(m: &[f64], d: usize) -> (Vec<f64>, Vec<Vec<f64>>) {
    assert_eq!(m.len(), d * d);
    let eig = SymmetricEigen::new(DMatrix::from_row_slice(d, d, m));
    let mut order: Vec<usize> = (0..d).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[j].total_cmp(&eig.eigenvalues[i]).then(i.cmp(&j)));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = order
        .iter()
        .map(|&i| {
            let mut u: Vec<f64> = eig.eigenvectors.column(i).iter().copied().collect();
            if let Some(first) = u.iter().find(|x| x.abs() > 1e-12) {
                if *first < 0.0 {
                    u.iter_mut().for_each(|x| *x = -*x);
                }
            }
            u
        })
        .collect();
    (values, vectors)
}

/// Half-sample symmetric reflection of `k` into `0..n`.
fn reflect(k: isize, n: usize) -> usize {
    let n = n as isize;
    let period = 2 * n;
    let mut k = k.rem_euclid(period);
    if k >= n {
        k = period - 1 - k;
    }
    k as usize
}

/// Patch-PCA saliency `a_j = Σ_{i=2}^{d'} |⟨u_i, y_j⟩|`.
///
/// `y_j` is the `patch_side²` patch centred on pixel `j` (symmetric border extension),
/// and `u_i` are eigenvectors of the uncentred scatter matrix `Σ_j y_j y_jᵀ` in
/// descending eigenvalue order. Flat images give an all-zero field.
pub fn pca_saliency<T: Scalar>(img: &Grid<T>, patch_side: usize, d_prime: usize) -> Result<SaliencyField> {
    let d = patch_side * patch_side;
    if patch_side.is_multiple_of(2) {
        return Err(Error::Parameter(format!("patch side {patch_side} must be odd")));
    }
    if d_prime == 0 || d_prime >= d {
        return Err(Error::Parameter(format!("{d_prime} components for {d}-dimensional patches")));
    }
    let (rows, cols) = img.shape();
    if rows == 0 || cols == 0 {
        return Err(Error::Parameter("empty image".into()));
    }
    let h = (patch_side / 2) as isize;
    let src: Vec<f64> = img.as_slice().iter().map(|v| v.to_f64_lossy()).collect();
    let patch = |i: usize, j: usize, out: &mut [f64]| {
        let mut k = 0;
        for di in -h..=h {
            let r = reflect(i as isize + di, rows);
            for dj in -h..=h {
                out[k] = src[r * cols + reflect(j as isize + dj, cols)];
                k += 1;
            }
        }
    };

    let mut scatter = vec![0.0; d * d];
    let mut y = vec![0.0; d];
    for i in 0..rows {
        for j in 0..cols {
            patch(i, j, &mut y);
            for p in 0..d {
                let yp = y[p];
                if yp == 0.0 {
                    continue;
                }
                let row = &mut scatter[p * d..p * d + d];
                for q in p..d {
                    row[q] += yp * y[q];
                }
            }
        }
    }
    for p in 0..d {
        for q in 0..p {
            scatter[p * d + q] = scatter[q * d + p];
        }
    }
    let (_, vectors) = symmetric_eigen(&scatter, d);
    let filters = &vectors[1..d_prime];

    let peak = src.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let floor = 1e-10 * peak * patch_side as f64;
    let mut a = Grid::filled(rows, cols, 0.0);
    for i in 0..rows {
        for j in 0..cols {
            patch(i, j, &mut y);
            let s: f64 = filters
                .iter()
                .map(|u| u.iter().zip(&y).map(|(a, b)| a * b).sum::<f64>().abs())
                .sum();
            a.set(i, j, if s > floor { s } else { 0.0 });
        }
    }
    SaliencyField::new(a)
}
