//! Unconstrained minimization of convex functions of a few variables.
//!
//! The gap objectives of the extension engine are norms of affine maps plus linear
//! terms. Their infimum is frequently approached only along a ray, so the solver pairs
//! multi-start subgradient descent (robust at kinks) with a conjugate-gradient polish
//! whose line search keeps doubling its step while the value decreases, up to a radius cap.

use alloc::vec;
use alloc::vec::Vec;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::linalg;

/// A convex function on `R^k` with a subgradient oracle.
pub trait ConvexObjective {
    fn dim(&self) -> usize;
    fn value(&self, t: &[f64]) -> f64;
    fn subgradient(&self, t: &[f64]) -> Vec<f64>;
}

#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SolverConfig {
    /// Independent starting points (the origin is always one of them).
    pub starts: usize,
    /// Subgradient iterations per start.
    pub iterations: usize,
    /// Initial subgradient step length; steps shrink as `step / sqrt(i + 1)`.
    pub step: f64,
    /// Conjugate-gradient polishing iterations applied to the best start.
    pub polish_iterations: usize,
    /// Iterates are kept inside this radius around the origin.
    pub max_radius: f64,
    pub seed: u64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            starts: 16,
            iterations: 500,
            step: 1.0,
            polish_iterations: 200,
            max_radius: 1e6,
            seed: 0x5eed,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Minimum {
    pub value: f64,
    pub point: Vec<f64>,
    pub evaluations: usize,
}

struct Tracker<'a, O: ConvexObjective + ?Sized> {
    objective: &'a O,
    best: Minimum,
    max_radius: f64,
}

impl<O: ConvexObjective + ?Sized> Tracker<'_, O> {
    fn eval(&mut self, t: &[f64]) -> f64 {
        let v = self.objective.value(t);
        self.best.evaluations += 1;
        if v < self.best.value {
            self.best.value = v;
            self.best.point = t.to_vec();
        }
        v
    }

    fn clamp(&self, t: &mut [f64]) {
        let r = linalg::norm(t);
        if r > self.max_radius {
            for v in t.iter_mut() {
                *v *= self.max_radius / r;
            }
        }
    }
}

fn subgradient_run<O: ConvexObjective + ?Sized>(tracker: &mut Tracker<'_, O>, start: Vec<f64>, cfg: &SolverConfig) {
    let mut t = start;
    tracker.eval(&t);
    for i in 0..cfg.iterations {
        let g = tracker.objective.subgradient(&t);
        let gn = linalg::norm(&g);
        if !(gn.is_finite() && gn > 0.0) {
            break;
        }
        let step = cfg.step / libm::sqrt((i + 1) as f64);
        linalg::axpy(-step / gn, &g, &mut t);
        tracker.clamp(&mut t);
        tracker.eval(&t);
    }
}

/// Minimizes `phi(alpha) = f(t + alpha d)` over `alpha >= 0` for unit `d`, by step
/// doubling (bracketing) followed by golden-section search. Returns the accepted step.
fn line_search<O: ConvexObjective + ?Sized>(tracker: &mut Tracker<'_, O>, t: &[f64], d: &[f64], f0: f64) -> f64 {
    let at = |alpha: f64| {
        let mut p = t.to_vec();
        linalg::axpy(alpha, d, &mut p);
        p
    };
    let reach = tracker.max_radius + linalg::norm(t);
    let mut h = 1e-3 * (1.0 + linalg::norm(t));
    let mut fh = tracker.eval(&at(h));
    let mut shrinks = 0;
    while fh >= f0 {
        h *= 0.25;
        shrinks += 1;
        if shrinks > 60 {
            return 0.0;
        }
        fh = tracker.eval(&at(h));
    }
    // expand while improving
    let (mut lo, mut mid, mut fmid) = (0.0, h, fh);
    let mut hi = 2.0 * mid;
    let mut fhi = tracker.eval(&at(hi));
    while fhi < fmid && hi < reach {
        lo = mid;
        mid = hi;
        fmid = fhi;
        hi = (2.0 * hi).min(reach);
        fhi = tracker.eval(&at(hi));
    }
    if fhi < fmid {
        return hi;
    }
    // golden section on [lo, hi] around mid
    const INV_PHI: f64 = 0.618_033_988_749_894_9;
    let (mut a, mut b) = (lo, hi);
    let mut c = b - INV_PHI * (b - a);
    let mut e = a + INV_PHI * (b - a);
    let mut fc = tracker.eval(&at(c));
    let mut fe = tracker.eval(&at(e));
    for _ in 0..80 {
        if (b - a) <= 1e-13 * (1.0 + b.abs()) {
            break;
        }
        if fc < fe {
            b = e;
            e = c;
            fe = fc;
            c = b - INV_PHI * (b - a);
            fc = tracker.eval(&at(c));
        } else {
            a = c;
            c = e;
            fc = fe;
            e = a + INV_PHI * (b - a);
            fe = tracker.eval(&at(e));
        }
    }
    [(mid, fmid), (c, fc), (e, fe)]
        .into_iter()
        .fold((0.0, f0), |acc, (x, f)| if f < acc.1 { (x, f) } else { acc })
        .0
}

fn polish<O: ConvexObjective + ?Sized>(tracker: &mut Tracker<'_, O>, cfg: &SolverConfig) {
    let k = tracker.objective.dim();
    let mut t = tracker.best.point.clone();
    let mut f = tracker.objective.value(&t);
    let mut g = tracker.objective.subgradient(&t);
    let mut d: Vec<f64> = g.iter().map(|v| -v).collect();
    let mut stalls = 0;
    for iter in 0..cfg.polish_iterations {
        let dn = linalg::norm(&d);
        if !(dn.is_finite() && dn > 0.0) {
            break;
        }
        let unit = linalg::scale(&d, 1.0 / dn);
        let alpha = line_search(tracker, &t, &unit, f);
        if alpha == 0.0 {
            // restart along steepest descent before giving up
            if linalg::dot(&d, &g) + linalg::dot(&g, &g) != 0.0 && iter > 0 {
                d = g.iter().map(|v| -v).collect();
                stalls += 1;
                if stalls > 2 {
                    break;
                }
                continue;
            }
            break;
        }
        linalg::axpy(alpha, &unit, &mut t);
        let f_next = tracker.objective.value(&t);
        let g_next = tracker.objective.subgradient(&t);
        if (f - f_next).abs() <= 1e-16 * (1.0 + f.abs()) {
            stalls += 1;
            if stalls > 2 {
                break;
            }
        } else {
            stalls = 0;
        }
        // Polak-Ribiere+, restarted every k iterations
        let gg = linalg::dot(&g, &g);
        let beta = if gg > 0.0 && (iter + 1) % k.max(1) != 0 {
            (linalg::dot(&g_next, &linalg::sub(&g_next, &g)) / gg).max(0.0)
        } else {
            0.0
        };
        d = g_next.iter().zip(&d).map(|(gn, di)| -gn + beta * di).collect();
        if linalg::dot(&d, &g_next) >= 0.0 {
            d = g_next.iter().map(|v| -v).collect();
        }
        f = f_next;
        g = g_next;
    }
}

/// Multi-start subgradient descent followed by a conjugate-gradient polish of the best
/// point found. The returned value is the smallest objective value actually evaluated.
pub fn minimize<O: ConvexObjective + ?Sized>(objective: &O, cfg: &SolverConfig) -> Minimum {
    let k = objective.dim();
    let origin = vec![0.0; k];
    let mut tracker = Tracker {
        objective,
        best: Minimum { value: f64::INFINITY, point: origin.clone(), evaluations: 0 },
        max_radius: cfg.max_radius,
    };
    if k == 0 {
        tracker.eval(&origin);
        return tracker.best;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    for s in 0..cfg.starts.max(1) {
        let start = if s == 0 {
            origin.clone()
        } else {
            (0..k).map(|_| {
                let g: f64 = StandardNormal.sample(&mut rng);
                cfg.step * g
            }).collect::<Vec<f64>>()
        };
        subgradient_run(&mut tracker, start, cfg);
    }
    polish(&mut tracker, cfg);
    tracker.best
}

#[cfg(test)]
mod tests {
    use super::*;

    struct Quadratic;
    impl ConvexObjective for Quadratic {
        fn dim(&self) -> usize {
            2
        }
        fn value(&self, t: &[f64]) -> f64 {
            (t[0] - 1.0).powi(2) + 10.0 * (t[1] + 2.0).powi(2)
        }
        fn subgradient(&self, t: &[f64]) -> Vec<f64> {
            vec![2.0 * (t[0] - 1.0), 20.0 * (t[1] + 2.0)]
        }
    }

    /// `|t - a|_1`, nonsmooth with a kink at the minimizer.
    struct L1;
    impl ConvexObjective for L1 {
        fn dim(&self) -> usize {
            2
        }
        fn value(&self, t: &[f64]) -> f64 {
            (t[0] - 0.3).abs() + (t[1] + 0.7).abs()
        }
        fn subgradient(&self, t: &[f64]) -> Vec<f64> {
            vec![(t[0] - 0.3).signum(), (t[1] + 0.7).signum()]
        }
    }

    /// `sqrt(t^2 + 1) - t`: infimum 0, approached only as `t -> infinity`.
    struct Asymptotic;
    impl ConvexObjective for Asymptotic {
        fn dim(&self) -> usize {
            1
        }
        fn value(&self, t: &[f64]) -> f64 {
            libm::sqrt(t[0] * t[0] + 1.0) - t[0]
        }
        fn subgradient(&self, t: &[f64]) -> Vec<f64> {
            vec![t[0] / libm::sqrt(t[0] * t[0] + 1.0) - 1.0]
        }
    }

    #[test]
    fn smooth_minimum() {
        let m = minimize(&Quadratic, &SolverConfig::default());
        assert!(m.value < 1e-12, "{m:?}");
        assert!((m.point[0] - 1.0).abs() < 1e-6 && (m.point[1] + 2.0).abs() < 1e-6);
    }

    #[test]
    fn kinked_minimum() {
        let m = minimize(&L1, &SolverConfig::default());
        assert!(m.value < 1e-6, "{m:?}");
    }

    #[test]
    fn asymptotic_infimum() {
        let m = minimize(&Asymptotic, &SolverConfig::default());
        assert!(m.value >= 0.0 || m.value > -1e-9);
        assert!(m.value < 1e-5, "{m:?}");
    }

    #[test]
    fn zero_dimensional_problem() {
        struct Constant;
        impl ConvexObjective for Constant {
            fn dim(&self) -> usize {
                0
            }
            fn value(&self, _: &[f64]) -> f64 {
                4.0
            }
            fn subgradient(&self, _: &[f64]) -> Vec<f64> {
                Vec::new()
            }
        }
        assert_eq!(minimize(&Constant, &SolverConfig::default()).value, 4.0);
    }
}
