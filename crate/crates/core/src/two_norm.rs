//! Real 2-norms, the D-valued 2-norm lifted from a pair of them, its recovery from a
//! black-box D-valued 2-norm, sampled axiom checks and sequence convergence.

use alloc::sync::Arc;
use alloc::vec::Vec;

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::dmodule::{check_pair, linear_dependent, DVector};
use crate::error::{Error, Result};
use crate::hyperbolic::{Hyperbolic, Idempotent, EPS};
use crate::linalg;

/// Identifies the concrete real 2-norm, so that analytic shortcuts can be gated.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NormKind {
    GramDet,
    Custom,
}

/// A real 2-norm `||x, y||` on `R^n`.
pub trait Real2Norm: Send + Sync {
    fn eval(&self, x: &[f64], y: &[f64]) -> f64;

    /// A subgradient of `x -> ||x, y||`. The default uses central differences.
    fn grad_first(&self, x: &[f64], y: &[f64]) -> Vec<f64> {
        let h = 1e-7 * linalg::norm(x).max(1.0);
        (0..x.len())
            .map(|i| {
                let mut plus = x.to_vec();
                let mut minus = x.to_vec();
                plus[i] += h;
                minus[i] -= h;
                (self.eval(&plus, y) - self.eval(&minus, y)) / (2.0 * h)
            })
            .collect()
    }

    fn kind(&self) -> NormKind {
        NormKind::Custom
    }
}

/// The Gram-determinant (area) 2-norm `sqrt(|x|^2 |y|^2 - <x, y>^2)`, evaluated as the
/// Euclidean norm of the wedge `x ∧ y` so that proportional pairs give exactly zero.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct GramDet;

impl GramDet {
    fn wedge_sq(x: &[f64], y: &[f64]) -> f64 {
        let n = x.len();
        let mut s = 0.0;
        for i in 0..n {
            for j in (i + 1)..n {
                let w = x[i] * y[j] - x[j] * y[i];
                s += w * w;
            }
        }
        s
    }
}

impl Real2Norm for GramDet {
    fn eval(&self, x: &[f64], y: &[f64]) -> f64 {
        libm::sqrt(GramDet::wedge_sq(x, y))
    }

    fn grad_first(&self, x: &[f64], y: &[f64]) -> Vec<f64> {
        let value = self.eval(x, y);
        let n = x.len();
        if value == 0.0 {
            return alloc::vec![0.0; n];
        }
        (0..n)
            .map(|k| (0..n).map(|j| (x[k] * y[j] - x[j] * y[k]) * y[j]).sum::<f64>() / value)
            .collect()
    }

    fn kind(&self) -> NormKind {
        NormKind::GramDet
    }
}

/// Anything that evaluates a D-valued 2-norm on `D^n`.
pub trait DTwoNorm: Sync {
    fn eval_d(&self, x: &DVector, y: &DVector) -> Result<Hyperbolic>;
}

impl<F> DTwoNorm for F
where
    F: Fn(&DVector, &DVector) -> Hyperbolic + Sync,
{
    fn eval_d(&self, x: &DVector, y: &DVector) -> Result<Hyperbolic> {
        check_pair(x, y)?;
        Ok(self(x, y))
    }
}

/// `||x, y||_D = e1 ||x1, y1||_1 + e2 ||x2, y2||_2`.
#[derive(Clone)]
pub struct D2Norm {
    norm1: Arc<dyn Real2Norm>,
    norm2: Arc<dyn Real2Norm>,
}

impl core::fmt::Debug for D2Norm {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.debug_struct("D2Norm")
            .field("norm1", &self.norm1.kind())
            .field("norm2", &self.norm2.kind())
            .finish()
    }
}

impl Default for D2Norm {
    fn default() -> Self {
        D2Norm::gram_det()
    }
}

impl D2Norm {
    pub fn new(norm1: Arc<dyn Real2Norm>, norm2: Arc<dyn Real2Norm>) -> Self {
        D2Norm { norm1, norm2 }
    }

    /// Gram-determinant norms in both components.
    pub fn gram_det() -> Self {
        D2Norm { norm1: Arc::new(GramDet), norm2: Arc::new(GramDet) }
    }

    pub fn component(&self, l: Idempotent) -> &dyn Real2Norm {
        match l {
            Idempotent::E1 => &*self.norm1,
            Idempotent::E2 => &*self.norm2,
        }
    }

    pub fn is_gram_det(&self) -> bool {
        self.norm1.kind() == NormKind::GramDet && self.norm2.kind() == NormKind::GramDet
    }

    /// Evaluates the lifted norm; the result lies in `D+`.
    pub fn eval(&self, x: &DVector, y: &DVector) -> Result<Hyperbolic> {
        check_pair(x, y)?;
        let (x1, x2) = x.split();
        let (y1, y2) = y.split();
        Ok(Hyperbolic::new(self.norm1.eval(&x1, &y1), self.norm2.eval(&x2, &y2)))
    }
}

impl DTwoNorm for D2Norm {
    fn eval_d(&self, x: &DVector, y: &DVector) -> Result<Hyperbolic> {
        self.eval(x, y)
    }
}

/// Real 2-norm induced on `e_l X` by a D-valued 2-norm: `(x, y) -> [||e_l x, e_l y||_D]_l`.
pub struct InducedNorm<'a> {
    inner: &'a dyn DTwoNorm,
    component: Idempotent,
}

impl InducedNorm<'_> {
    pub fn component(&self) -> Idempotent {
        self.component
    }
}

impl Real2Norm for InducedNorm<'_> {
    fn eval(&self, x: &[f64], y: &[f64]) -> f64 {
        let xl = DVector::from_component(self.component, x);
        let yl = DVector::from_component(self.component, y);
        self.inner
            .eval_d(&xl, &yl)
            .map(|v| v.component(self.component))
            .unwrap_or(f64::NAN)
    }
}

/// The pair `(Phi, Psi)` of real 2-norms on `e1 X` and `e2 X`.
pub struct Decomposition<'a> {
    pub phi: InducedNorm<'a>,
    pub psi: InducedNorm<'a>,
}

impl Decomposition<'_> {
    /// `e1 Phi(e1 x, e1 y) + e2 Psi(e2 x, e2 y)`.
    pub fn reconstruct(&self, x: &DVector, y: &DVector) -> Hyperbolic {
        let (x1, x2) = x.split();
        let (y1, y2) = y.split();
        Hyperbolic::new(self.phi.eval(&x1, &y1), self.psi.eval(&x2, &y2))
    }
}

/// Tolerance applied to the spot-checks made by [`decompose`].
pub const DECOMPOSE_TOL: f64 = 1e-9;

/// Splits a D-valued 2-norm on `D^n` into its real component norms, after spot-checking
/// the 2-norm axioms and the vanishing of the opposite component on `e_l X`.
pub fn decompose<'a, R: Rng + ?Sized>(
    norm: &'a dyn DTwoNorm,
    n: usize,
    probes: usize,
    rng: &mut R,
) -> Result<Decomposition<'a>> {
    let report = axiom_check(norm, n, probes, rng)?;
    if let Some((axiom, violation)) = report.first_failure(DECOMPOSE_TOL) {
        return Err(Error::AxiomViolation { axiom: axiom.into(), violation });
    }
    for _ in 0..probes.max(1) {
        let x = random_dvector(n, rng);
        let y = random_dvector(n, rng);
        for l in Idempotent::ALL {
            let value = norm.eval_d(&x.project(l), &y.project(l))?;
            let leak = value.component(l.other()).abs();
            if leak > DECOMPOSE_TOL * (1.0 + value.max_abs()) {
                return Err(Error::AxiomViolation { axiom: "idempotent support".into(), violation: leak });
            }
        }
    }
    Ok(Decomposition {
        phi: InducedNorm { inner: norm, component: Idempotent::E1 },
        psi: InducedNorm { inner: norm, component: Idempotent::E2 },
    })
}

/// Worst observed violation of each 2-norm axiom over a sampled run.
#[derive(Clone, Debug, Default, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct AxiomReport {
    pub samples: usize,
    /// (i) vanishing exactly on dependent pairs.
    pub dependence: f64,
    /// (ii) symmetry.
    pub symmetry: f64,
    /// (iii) `||alpha x, y|| = |alpha|_k ||x, y||`.
    pub homogeneity: f64,
    /// (iv) triangle inequality in the first slot.
    pub triangle: f64,
    /// Values outside `D+`.
    pub nonnegativity: f64,
    /// `||x, y + alpha x|| = ||x, y||`.
    pub shear_invariance: f64,
}

impl AxiomReport {
    pub fn entries(&self) -> [(&'static str, f64); 6] {
        [
            ("i", self.dependence),
            ("ii", self.symmetry),
            ("iii", self.homogeneity),
            ("iv", self.triangle),
            ("nonnegativity", self.nonnegativity),
            ("shear_invariance", self.shear_invariance),
        ]
    }

    pub fn worst(&self) -> f64 {
        self.entries().iter().fold(0.0_f64, |m, (_, v)| m.max(*v))
    }

    pub fn first_failure(&self, tol: f64) -> Option<(&'static str, f64)> {
        self.entries().into_iter().find(|(_, v)| v.is_nan() || *v > tol)
    }

    pub fn passes(&self, tol: f64) -> bool {
        self.first_failure(tol).is_none()
    }

    fn merge(&mut self, other: &AxiomReport) {
        self.samples += other.samples;
        self.dependence = self.dependence.max(other.dependence);
        self.symmetry = self.symmetry.max(other.symmetry);
        self.homogeneity = self.homogeneity.max(other.homogeneity);
        self.triangle = self.triangle.max(other.triangle);
        self.nonnegativity = self.nonnegativity.max(other.nonnegativity);
        self.shear_invariance = self.shear_invariance.max(other.shear_invariance);
    }
}

pub fn random_vector<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Vec<f64> {
    (0..n).map(|_| StandardNormal.sample(rng)).collect()
}

pub fn random_dvector<R: Rng + ?Sized>(n: usize, rng: &mut R) -> DVector {
    DVector::join(&random_vector(n, rng), &random_vector(n, rng)).expect("equal lengths")
}

/// A random scalar drawn from a mix of generic values and the corner cases that matter
/// for the axioms: zero divisors, `k`, reals and zero.
pub fn random_scalar<R: Rng + ?Sized>(rng: &mut R) -> Hyperbolic {
    let a: f64 = StandardNormal.sample(rng);
    let b: f64 = StandardNormal.sample(rng);
    match rng.random_range(0..8u8) {
        0 => Hyperbolic::new(a, 0.0),
        1 => Hyperbolic::new(0.0, b),
        2 => Hyperbolic::K.scale(a),
        3 => Hyperbolic::real(a),
        4 => Hyperbolic::ZERO,
        _ => Hyperbolic::new(a, b),
    }
}

fn positive_excess(lhs: Hyperbolic, rhs: Hyperbolic) -> f64 {
    (lhs.p - rhs.p).max(lhs.q - rhs.q).max(0.0)
}

fn check_sample<R: Rng + ?Sized>(norm: &dyn DTwoNorm, n: usize, rng: &mut R) -> Result<AxiomReport> {
    let x = random_dvector(n, rng);
    let y = random_dvector(n, rng);
    let z = random_dvector(n, rng);
    let alpha = random_scalar(rng);
    let mut r = AxiomReport { samples: 1, ..AxiomReport::default() };

    let nxy = norm.eval_d(&x, &y)?;
    let scale = 1.0 + nxy.max_abs();
    r.nonnegativity = (-nxy.p).max(-nxy.q).max(0.0);
    r.symmetry = (nxy - norm.eval_d(&y, &x)?).max_abs() / scale;

    // (i): dependent pairs vanish, independent component pairs do not.
    let dependent = [x.scale(alpha), DVector::zeros(n), x.clone()];
    for d in &dependent {
        let v = norm.eval_d(&x, d)?;
        r.dependence = r.dependence.max(v.max_abs() / (1.0 + x.max_abs() * d.max_abs()));
    }
    for l in Idempotent::ALL {
        let independent = linalg::rank(&[x.component(l), y.component(l)]) == 2;
        if independent && nxy.component(l).abs() <= EPS {
            r.dependence = r.dependence.max(1.0);
        }
    }
    if linear_dependent(&x, &y) && !nxy.is_zero() {
        r.dependence = r.dependence.max(nxy.max_abs() / scale);
    }

    let lhs = norm.eval_d(&x.scale(alpha), &y)?;
    let rhs = alpha.modulus_k() * nxy;
    r.homogeneity = (lhs - rhs).max_abs() / (1.0 + alpha.max_abs() * nxy.max_abs());

    let sum = norm.eval_d(&(&x + &y), &z)?;
    let bound = norm.eval_d(&x, &z)? + norm.eval_d(&y, &z)?;
    r.triangle = positive_excess(sum, bound) / (1.0 + bound.max_abs());

    let sheared = norm.eval_d(&x, &(&y + &x.scale(alpha)))?;
    r.shear_invariance = (sheared - nxy).max_abs() / (1.0 + alpha.max_abs() * scale);
    Ok(r)
}

/// Samples the 2-norm axioms on random triples in `D^n` with random scalars (including
/// zero divisors and `k`), plus dependent pairs, and reports the worst violations.
pub fn axiom_check<R: Rng + ?Sized>(
    norm: &dyn DTwoNorm,
    n: usize,
    samples: usize,
    rng: &mut R,
) -> Result<AxiomReport> {
    let mut report = AxiomReport::default();
    for _ in 0..samples {
        report.merge(&check_sample(norm, n, rng)?);
    }
    Ok(report)
}

/// Number of trailing terms inspected by the convergence tests: the last quarter, at least one.
pub fn tail_len(len: usize) -> usize {
    (len / 4).max(1).min(len)
}

/// Convergence of `seq` to `x0` in the D-valued 2-norm: on the tail window, both
/// idempotent coordinates of `||x_n - x0, y||_D` stay below `tol` for every probe `y`.
pub fn sequence_converges(
    norm: &D2Norm,
    seq: &[DVector],
    x0: &DVector,
    probes: &[DVector],
    tol: f64,
) -> Result<bool> {
    if probes.is_empty() {
        return Err(Error::InvalidArgument("at least one probe is required".into()));
    }
    if seq.is_empty() {
        return Ok(false);
    }
    let start = seq.len() - tail_len(seq.len());
    for xn in &seq[start..] {
        let diff = xn - x0;
        for y in probes {
            let v = norm.eval(&diff, y)?;
            if !(v.p < tol && v.q < tol) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// The real counterpart of [`sequence_converges`] for one component space.
pub fn real_sequence_converges(
    norm: &dyn Real2Norm,
    seq: &[Vec<f64>],
    x0: &[f64],
    probes: &[Vec<f64>],
    tol: f64,
) -> bool {
    if seq.is_empty() || probes.is_empty() {
        return false;
    }
    let start = seq.len() - tail_len(seq.len());
    seq[start..].iter().all(|xn| {
        let diff = linalg::sub(xn, x0);
        probes.iter().all(|y| norm.eval(&diff, y) < tol)
    })
}
