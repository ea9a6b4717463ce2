//! Independent reference computations used by the self-test suite.
//!
//! Nothing here shares code paths with the optimizer or the wedge-based norm of the core
//! crate: the area norm is recomputed by projection (or the Lagrange identity), and gap
//! intervals are recomputed by grid search over raw (non-orthonormalized) basis coefficients.

use hyp2_core::hahn_banach::{ExtensionTrace, PartialFunctional};
use hyp2_core::{Hyperbolic, Idempotent, Real2Norm};

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(u, v)| u * v).sum()
}

/// `sqrt(|x|^2 |y|^2 - <x, y>^2)`, clamped at zero. Loses accuracy for nearly parallel
/// vectors of large norm; [`projection_area`] does not.
pub fn lagrange_area(x: &[f64], y: &[f64]) -> f64 {
    (dot(x, x) * dot(y, y) - dot(x, y).powi(2)).max(0.0).sqrt()
}

/// `|y| |x - proj_y x|`, with one re-orthogonalization pass.
pub fn projection_area(x: &[f64], y: &[f64]) -> f64 {
    let yy = dot(y, y);
    if yy == 0.0 {
        return 0.0;
    }
    let mut r = x.to_vec();
    for _ in 0..2 {
        let s = dot(&r, y) / yy;
        for (ri, yi) in r.iter_mut().zip(y) {
            *ri -= s * yi;
        }
    }
    yy.sqrt() * dot(&r, &r).sqrt()
}

/// The squared area `||x, y||^2`: symmetric and zero on dependent pairs, but it is not
/// homogeneous of degree one and breaks the triangle inequality.
#[derive(Clone, Copy, Debug, Default)]
pub struct SquaredArea;

impl Real2Norm for SquaredArea {
    fn eval(&self, x: &[f64], y: &[f64]) -> f64 {
        lagrange_area(x, y).powi(2)
    }
}

/// Grid resolution per axis.
const GRID_POINTS: usize = 41;
/// Cells kept on each side of the best grid point when zooming in.
const ZOOM_CELLS: f64 = 3.0;
/// Half-width of the initial search box in coefficient space.
pub const GRID_RADIUS: f64 = 1e6;

/// Minimizes a function of `k <= 2` coefficients by coarse-to-fine grid search over
/// `[-GRID_RADIUS, GRID_RADIUS]^k`. Returns `None` for `k > 2`.
pub fn grid_minimize(k: usize, f: impl Fn(&[f64]) -> f64) -> Option<f64> {
    match k {
        0 => Some(f(&[])),
        1 | 2 => {
            let mut center = vec![0.0; k];
            let mut half = GRID_RADIUS;
            let mut best = f64::INFINITY;
            let step_of = |half: f64| 2.0 * half / (GRID_POINTS - 1) as f64;
            while half > 1e-9 {
                let h = step_of(half);
                let mut best_point = center.clone();
                let mut t = vec![0.0; k];
                let total = GRID_POINTS.pow(k as u32);
                for idx in 0..total {
                    let (i, j) = (idx % GRID_POINTS, idx / GRID_POINTS);
                    t[0] = center[0] - half + i as f64 * h;
                    if k == 2 {
                        t[1] = center[1] - half + j as f64 * h;
                    }
                    let v = f(&t);
                    if v < best {
                        best = v;
                        best_point.clone_from(&t);
                    }
                }
                center = best_point;
                half = ZOOM_CELLS * h;
            }
            Some(best)
        }
        _ => None,
    }
}

/// Grid-search estimate of `(m0_l, m_l)` for adjoining `x'_l` to the domain of `g`.
pub fn grid_gap(g: &PartialFunctional, l: Idempotent, c: f64, x_prime: &[f64]) -> Option<(f64, f64)> {
    let basis = g.domain().basis(l);
    let w = g.form(l);
    let z = g.z().component(l);
    let point = |t: &[f64]| {
        let mut x = x_prime.to_vec();
        for (b, &ti) in basis.iter().zip(t) {
            for (xi, bi) in x.iter_mut().zip(b) {
                *xi += ti * bi;
            }
        }
        x
    };
    let fx = |t: &[f64]| -> f64 {
        basis.iter().zip(t).map(|(b, &ti)| ti * b.iter().zip(w).map(|(u, v)| u * v).sum::<f64>()).sum()
    };
    let m = grid_minimize(basis.len(), |t| c * projection_area(&point(t), &z) - fx(t))?;
    let m0 = -grid_minimize(basis.len(), |t| c * projection_area(&point(t), &z) + fx(t))?;
    Some((m0, m))
}

/// Largest discrepancy between recorded brackets and the grid oracle, over every step
/// component whose starting domain has dimension at most 2. Also returns how many
/// component brackets were compared.
pub fn audit_brackets_against_grid(trace: &ExtensionTrace) -> (f64, usize) {
    let mut worst: f64 = 0.0;
    let mut compared = 0;
    let mut prev = &trace.initial;
    for step in &trace.steps {
        for l in Idempotent::ALL {
            if let Some((m0, m)) = grid_gap(prev, l, trace.norm_f.component(l), &step.x_prime.component(l)) {
                let scale = 1.0 + step.m.component(l).abs().max(step.m0.component(l).abs());
                worst = worst
                    .max((m - step.m.component(l)).abs() / scale)
                    .max((m0 - step.m0.component(l)).abs() / scale);
                compared += 1;
            }
        }
        prev = &step.g;
    }
    (worst, compared)
}

/// `|a - b|_k` componentwise maximum, relative to `1 + max(|a|, |b|)`.
pub fn relative_gap(a: Hyperbolic, b: Hyperbolic) -> f64 {
    (a - b).max_abs() / (1.0 + a.max_abs().max(b.max_abs()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lagrange_area_matches_parallelogram() {
        assert!((lagrange_area(&[2.0, 0.0, 0.0], &[1.0, 3.0, 0.0]) - 6.0).abs() < 1e-12);
        assert_eq!(lagrange_area(&[1.0, 2.0], &[2.0, 4.0]), 0.0);
        assert!((projection_area(&[2.0, 0.0, 0.0], &[1.0, 3.0, 0.0]) - 6.0).abs() < 1e-12);
        assert_eq!(projection_area(&[1.0, 1.0], &[0.0, 0.0]), 0.0);
    }

    #[test]
    fn projection_area_survives_near_parallel_vectors() {
        let z = [1.8, 0.97, -0.3];
        let b = [0.17, -0.06, 0.4];
        let x: Vec<f64> = z.iter().zip(&b).map(|(zi, bi)| 1e6 * zi + 1e-3 * bi).collect();
        let exact = 1e-3 * projection_area(&b, &z);
        assert!((projection_area(&x, &z) - exact).abs() < 1e-8 * (1.0 + exact));
    }

    #[test]
    fn grid_finds_smooth_and_asymptotic_minima() {
        let v = grid_minimize(2, |t| (t[0] - 3.0).powi(2) + (t[1] + 1.0).abs()).unwrap();
        assert!(v < 1e-8, "{v}");
        let v = grid_minimize(1, |t| (t[0] * t[0] + 1.0).sqrt() - t[0]).unwrap();
        assert!(v < 1e-5, "{v}");
        assert!(grid_minimize(3, |_| 0.0).is_none());
    }
}
