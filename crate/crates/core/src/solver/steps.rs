//! Closed-form ADMM subproblem solutions.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::frames::{CoefficientSet, TightFrame};
use crate::raster::Grid;
use crate::solver::{Problem, SolverParams, SolverState};
use crate::Scalar;

/// `max(|q| − t, 0)·sign(q)` for a single value.
#[inline]
pub fn shrink<T: Scalar>(q: T, t: T) -> T {
    let m = q.abs() - t;
    if m > T::zero() {
        m.copysign(q)
    } else {
        T::zero()
    }
}

/// Elementwise soft thresholding; `t` holds one threshold or one per entry.
pub fn soft_threshold<T: Scalar>(q: &[T], t: &[T]) -> Result<Vec<T>> {
    if t.len() != 1 && t.len() != q.len() {
        return Err(Error::Parameter(format!("{} thresholds for {} values", t.len(), q.len())));
    }
    if let Some(bad) = t.iter().find(|v| !(**v >= T::zero())) {
        return Err(Error::Parameter(format!("negative threshold {bad}")));
    }
    Ok(if t.len() == 1 {
        q.iter().map(|&v| if t[0] == T::zero() { v } else { shrink(v, t[0]) }).collect()
    } else {
        q.iter().zip(t).map(|(&v, &s)| if s == T::zero() { v } else { shrink(v, s) }).collect()
    })
}

/// Solves `((Σρ_ℓ + μ) I + γ DᵀD) x = Σ_ℓ Φ_ℓ(ρ_ℓ u_ℓ − y_ℓ) + (μ r − w) + Dᵀ(γ v − z)`.
pub fn x_step<T: Scalar>(state: &SolverState<T>, params: &SolverParams<T>, problem: &Problem<T>) -> Grid<T> {
    let mut rhs = state.r.scale(params.mu).sub(&state.w);
    for (l, dict) in problem.dictionaries().iter().enumerate() {
        let (rho, u, y) = (params.rho[l], &state.u[l], &state.y[l]);
        let data = u.as_slice().iter().zip(y.as_slice()).map(|(&a, &b)| rho * a - b).collect();
        let c = CoefficientSet::from_vec(u.layout().clone(), data).expect("layout");
        rhs.axpy(T::one(), &dict.synthesis(&c));
    }
    let px = state.vx.scale(params.gamma).sub(&state.zx);
    let py = state.vy.scale(params.gamma).sub(&state.zy);
    rhs.axpy(T::one(), &problem.diff().adjoint(&px, &py));

    let base = params.rho.iter().copied().sum::<T>() + params.mu;
    let fft = problem.fft();
    let mut spec = fft.forward_real(rhs.as_slice());
    for (z, &l) in spec.iter_mut().zip(problem.diff().spectrum().as_slice()) {
        *z = *z / Complex::new(base + params.gamma * l, T::zero());
    }
    let (r, c) = rhs.shape();
    Grid::new(r, c, fft.inverse_real(spec)).expect("shape")
}

/// `u_ℓ = soft(α_ℓ + y_ℓ/ρ_ℓ, λ_ℓ W̃_ℓ/ρ_ℓ)`; lowpass entries pass through unchanged.
pub fn u_step<T: Scalar>(
    alpha: &CoefficientSet<T>,
    y: &CoefficientSet<T>,
    lambda: T,
    rho: T,
    weights: &[bool],
) -> CoefficientSet<T> {
    let t = lambda / rho;
    let data = alpha
        .as_slice()
        .iter()
        .zip(y.as_slice())
        .zip(weights)
        .map(|((&a, &d), &w)| {
            let q = a + d / rho;
            if w {
                shrink(q, t)
            } else {
                q
            }
        })
        .collect();
    CoefficientSet::from_vec(alpha.layout().clone(), data).expect("layout")
}

/// `r = (S b + w + μ x) / (S + μ)` elementwise (`s` is the 0/1 sampling indicator).
pub fn r_step<T: Scalar>(x: &Grid<T>, w: &Grid<T>, s: &Grid<T>, b: &Grid<T>, mu: T) -> Grid<T> {
    let data = x
        .as_slice()
        .iter()
        .zip(w.as_slice())
        .zip(s.as_slice().iter().zip(b.as_slice()))
        .map(|((&x, &w), (&s, &b))| (s * b + w + mu * x) / (s + mu))
        .collect();
    Grid::new(x.rows(), x.cols(), data).expect("shape")
}

/// `v = soft(D x + z/γ, β/γ)` for each component.
pub fn v_step<T: Scalar>(dx: &Grid<T>, dy: &Grid<T>, zx: &Grid<T>, zy: &Grid<T>, beta: T, gamma: T) -> (Grid<T>, Grid<T>) {
    let t = beta / gamma;
    (dx.zip_map(zx, |d, z| shrink(d + z / gamma, t)), dy.zip_map(zy, |d, z| shrink(d + z / gamma, t)))
}

/// Dual ascent given fresh `α_ℓ = Φ_ℓᵀ x` and `(D_x x, D_y x)`.
pub fn dual_update<T: Scalar>(
    state: &mut SolverState<T>,
    params: &SolverParams<T>,
    alpha: &[CoefficientSet<T>],
    dx: &Grid<T>,
    dy: &Grid<T>,
) {
    for (l, a) in alpha.iter().enumerate() {
        let rho = params.rho[l];
        let u = state.u[l].as_slice();
        for ((y, &uu), &aa) in state.y[l].as_mut_slice().iter_mut().zip(u).zip(a.as_slice()) {
            *y = *y - rho * (uu - aa);
        }
    }
    let upd = |d: &mut Grid<T>, p: &Grid<T>, q: &Grid<T>, pen: T| {
        for ((d, &p), &q) in d.as_mut_slice().iter_mut().zip(p.as_slice()).zip(q.as_slice()) {
            *d = *d - pen * (p - q);
        }
    };
    upd(&mut state.w, &state.r, &state.x, params.mu);
    upd(&mut state.zx, &state.vx, dx, params.gamma);
    upd(&mut state.zy, &state.vy, dy, params.gamma);
}

/// Objective value of `x` on the (padded) problem.
pub fn objective<T: Scalar>(x: &Grid<T>, problem: &Problem<T>, params: &SolverParams<T>) -> T {
    let alpha: Vec<CoefficientSet<T>> = problem.dictionaries().iter().map(|d| d.analysis(x)).collect();
    let (dx, dy) = problem.diff().apply(x);
    objective_parts(x, problem, params, &alpha, &dx, &dy)
}

pub(crate) fn objective_parts<T: Scalar>(
    x: &Grid<T>,
    problem: &Problem<T>,
    params: &SolverParams<T>,
    alpha: &[CoefficientSet<T>],
    dx: &Grid<T>,
    dy: &Grid<T>,
) -> T {
    let half = T::lit(0.5);
    let fit: T = x
        .as_slice()
        .iter()
        .zip(problem.indicator().as_slice())
        .zip(problem.observed().as_slice())
        .map(|((&x, &s), &b)| {
            let e = s * x - b;
            e * e
        })
        .sum();
    let mut total = half * fit;
    for ((a, dict), &lambda) in alpha.iter().zip(problem.dictionaries()).zip(&params.lambda) {
        let l1: T = a.as_slice().iter().zip(dict.weight_mask()).filter(|(_, &w)| w).map(|(&v, _)| v.abs()).sum();
        total = total + lambda * l1;
    }
    let tv: T = dx.as_slice().iter().chain(dy.as_slice()).map(|v| v.abs()).sum();
    total + params.beta * tv
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shrink_examples() {
        assert_eq!(shrink(5.0, 2.0), 3.0);
        assert_eq!(shrink(-1.0, 2.0), 0.0);
        assert_eq!(shrink(-5.0, 2.0), -3.0);
        assert_eq!(soft_threshold(&[0.3, -0.7], &[0.0]).unwrap(), vec![0.3, -0.7]);
        assert!(soft_threshold(&[1.0], &[-0.1]).is_err());
        assert!(soft_threshold(&[1.0, 2.0, 3.0], &[0.1, 0.2]).is_err());
    }
}
