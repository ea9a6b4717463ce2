//! D-linear 2-functionals on `D^n x D^n`, held as a pair of real antisymmetric matrices:
//! `f(x, y) = e1 (x1^T C1 y1) + e2 (x2^T C2 y2)`.
//!
//! Two independent routes compute the D-valued norm: the analytic one takes the largest
//! singular value of each component matrix, the sampled one searches the supremum of
//! `|f(x, y)|_k / ||x, y||_D` directly.

use alloc::vec::Vec;

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::dmodule::{check_pair, DVector};
use crate::error::{Error, Result};
use crate::hyperbolic::{Hyperbolic, Idempotent, EPS};
use crate::linalg::{self, Mat};
use crate::two_norm::{random_vector, D2Norm, Real2Norm};

/// Largest tolerated entry of the symmetric part of a component matrix.
pub const ANTISYMMETRY_TOL: f64 = 1e-12;

/// A real bilinear 2-functional `x^T C y` on `R^n`.
#[derive(Clone, Debug, PartialEq)]
pub struct Real2Functional {
    matrix: Mat,
}

impl Real2Functional {
    pub fn new(matrix: Mat) -> Self {
        Real2Functional { matrix }
    }

    pub fn matrix(&self) -> &Mat {
        &self.matrix
    }

    pub fn eval(&self, x: &[f64], y: &[f64]) -> f64 {
        self.matrix.antisymmetric_bilinear(x, y)
    }

    /// Norm with respect to the Gram-determinant 2-norm: the largest singular value.
    pub fn spectral_norm(&self) -> f64 {
        linalg::top_singular(&self.matrix).0
    }
}

/// A D-linear 2-functional on `D^n x D^n`.
#[derive(Clone, Debug, PartialEq)]
pub struct DBilinear2Functional {
    c1: Mat,
    c2: Mat,
}

fn antisymmetrize(c: &Mat, component: usize, n: usize) -> Result<Mat> {
    if !c.is_square() || c.rows() != n {
        return Err(Error::DimensionMismatch { expected: n, found: c.rows().max(c.cols()) });
    }
    let max_symmetric = c.max_symmetric_part();
    if max_symmetric.is_nan() || max_symmetric > ANTISYMMETRY_TOL {
        return Err(Error::NotAntisymmetric { component, max_symmetric });
    }
    Ok(c.plus(&c.transpose().scaled(-1.0)).scaled(0.5))
}

impl DBilinear2Functional {
    /// Validates antisymmetry of both components and drops the (tolerated) symmetric residue.
    pub fn new(c1: Mat, c2: Mat) -> Result<Self> {
        let n = c1.rows();
        Ok(DBilinear2Functional { c1: antisymmetrize(&c1, 1, n)?, c2: antisymmetrize(&c2, 2, n)? })
    }

    pub fn zero(n: usize) -> Self {
        DBilinear2Functional { c1: Mat::zeros(n, n), c2: Mat::zeros(n, n) }
    }

    pub fn n(&self) -> usize {
        self.c1.rows()
    }

    pub fn component(&self, l: Idempotent) -> &Mat {
        match l {
            Idempotent::E1 => &self.c1,
            Idempotent::E2 => &self.c2,
        }
    }

    pub fn eval(&self, x: &DVector, y: &DVector) -> Result<Hyperbolic> {
        check_pair(x, y)?;
        if x.dim() != self.n() {
            return Err(Error::DimensionMismatch { expected: self.n(), found: x.dim() });
        }
        let (x1, x2) = x.split();
        let (y1, y2) = y.split();
        Ok(Hyperbolic::new(self.c1.antisymmetric_bilinear(&x1, &y1), self.c2.antisymmetric_bilinear(&x2, &y2)))
    }

    /// `alpha f`, for a hyperbolic scalar `alpha`.
    pub fn scale(&self, alpha: Hyperbolic) -> Self {
        DBilinear2Functional { c1: self.c1.scaled(alpha.p), c2: self.c2.scaled(alpha.q) }
    }

    /// The real components `(f1, f2)` with `f = e1 f1 + e2 f2`.
    pub fn component_split(&self) -> (Real2Functional, Real2Functional) {
        (Real2Functional::new(self.c1.clone()), Real2Functional::new(self.c2.clone()))
    }

    /// Reassembles `e1 f1 + e2 f2`.
    pub fn from_split(f1: &Real2Functional, f2: &Real2Functional) -> Result<Self> {
        DBilinear2Functional::new(f1.matrix().clone(), f2.matrix().clone())
    }

    /// The real-valued pair `(phi, psi)` with `f = phi + k psi`.
    pub fn k_decompose(&self) -> KDecomposition {
        KDecomposition {
            phi: RealValued2Functional { a: self.c1.scaled(0.5), b: self.c2.scaled(0.5) },
            psi: RealValued2Functional { a: self.c1.scaled(0.5), b: self.c2.scaled(-0.5) },
        }
    }
}

/// A real-valued 2-functional on D-vectors, `x1^T A y1 + x2^T B y2`.
#[derive(Clone, Debug, PartialEq)]
pub struct RealValued2Functional {
    a: Mat,
    b: Mat,
}

impl RealValued2Functional {
    pub fn eval(&self, x: &DVector, y: &DVector) -> f64 {
        let (x1, x2) = x.split();
        let (y1, y2) = y.split();
        self.a.antisymmetric_bilinear(&x1, &y1) + self.b.antisymmetric_bilinear(&x2, &y2)
    }
}

/// `f = phi + k psi` with `phi = (f1 + f2)/2` and `psi = (f1 - f2)/2`.
#[derive(Clone, Debug, PartialEq)]
pub struct KDecomposition {
    pub phi: RealValued2Functional,
    pub psi: RealValued2Functional,
}

impl KDecomposition {
    /// `phi(x, y) + k psi(x, y)`.
    pub fn recombine(&self, x: &DVector, y: &DVector) -> Hyperbolic {
        Hyperbolic::from_cartesian(self.phi.eval(x, y), self.psi.eval(x, y))
    }

    /// `phi(x, y) + k phi(k x, y)`.
    pub fn via_phi_left(&self, x: &DVector, y: &DVector) -> Hyperbolic {
        Hyperbolic::from_cartesian(self.phi.eval(x, y), self.phi.eval(&x.scale(Hyperbolic::K), y))
    }

    /// `phi(x, y) + k phi(x, k y)`.
    pub fn via_phi_right(&self, x: &DVector, y: &DVector) -> Hyperbolic {
        Hyperbolic::from_cartesian(self.phi.eval(x, y), self.phi.eval(x, &y.scale(Hyperbolic::K)))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum NormMethod {
    Spectral,
    BruteForce,
    UnitSphere,
}

/// A norm value with a witness pair that (nearly) attains it.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct NormCertificate {
    pub value: Hyperbolic,
    pub witness: (DVector, DVector),
    pub method: NormMethod,
}

impl NormCertificate {
    /// Checks `|f(witness)|_k <=' value ||witness||_D + tol`.
    pub fn verify(&self, f: &DBilinear2Functional, norm: &D2Norm, tol: f64) -> Result<bool> {
        let (x, y) = &self.witness;
        let lhs = f.eval(x, y)?.modulus_k();
        let rhs = self.value * norm.eval(x, y)?;
        Ok(lhs.leq_tol(rhs, tol))
    }

    /// `|f(witness)|_k / ||witness||_D`, componentwise; zero where the norm vanishes.
    pub fn witness_ratio(&self, f: &DBilinear2Functional, norm: &D2Norm) -> Result<Hyperbolic> {
        let (x, y) = &self.witness;
        let num = f.eval(x, y)?.modulus_k();
        let den = norm.eval(x, y)?;
        Ok(num.zip_with(den, |a, b| if b > EPS { a / b } else { 0.0 }))
    }
}

/// A pair `(x, y)` with `||x, y|| = 1` and `x^T C y = sigma_max(C)`.
fn spectral_witness(c: &Mat) -> (f64, Vec<f64>, Vec<f64>) {
    let n = c.rows();
    let (sigma, u) = linalg::top_singular(c);
    if sigma <= EPS || n < 2 {
        return (sigma.max(0.0), linalg::unit(n, 0), linalg::unit(n, 1.min(n - 1)));
    }
    // For antisymmetric C, Cu is orthogonal to u, so the pair has unit area.
    let x = linalg::scale(&c.mul_vec(&u), 1.0 / sigma);
    (sigma, x, u)
}

/// Analytic norm: `e1 sigma_max(C1) + e2 sigma_max(C2)`, with witnesses from the top
/// singular pair of each component. Requires Gram-determinant component norms.
pub fn norm_spectral(f: &DBilinear2Functional, norm: &D2Norm) -> Result<NormCertificate> {
    if !norm.is_gram_det() {
        return Err(Error::UnsupportedNorm);
    }
    let (s1, x1, y1) = spectral_witness(&f.c1);
    let (s2, x2, y2) = spectral_witness(&f.c2);
    Ok(NormCertificate {
        value: Hyperbolic::new(s1, s2),
        witness: (DVector::join(&x1, &x2)?, DVector::join(&y1, &y2)?),
        method: NormMethod::Spectral,
    })
}

/// Budget of coordinate hill-climbing steps applied to the best sampled pair.
pub const HILL_CLIMB_STEPS: usize = 100;

fn fill_unit_random<R: Rng + ?Sized>(v: &mut [f64], rng: &mut R) {
    loop {
        for vi in v.iter_mut() {
            *vi = StandardNormal.sample(rng);
        }
        let len = linalg::norm(v);
        if len > 1e-6 {
            v.iter_mut().for_each(|vi| *vi /= len);
            return;
        }
    }
}

/// One batch of sampled pairs: `x = (x1, x2)`, `y = (y1, y2)` on the unit spheres, drawn
/// into reused buffers. Calls `visit` with the per-component pairs and norms whenever both
/// component norms are invertible.
fn sample_pairs<R: Rng + ?Sized>(
    n: usize,
    norm: &D2Norm,
    budget: usize,
    rng: &mut R,
    mut visit: impl FnMut(Idempotent, &[f64], &[f64], f64),
) {
    let mut x = [alloc::vec![0.0; n], alloc::vec![0.0; n]];
    let mut y = [alloc::vec![0.0; n], alloc::vec![0.0; n]];
    for _ in 0..budget {
        for buf in x.iter_mut().chain(y.iter_mut()) {
            fill_unit_random(buf, rng);
        }
        let den = Idempotent::ALL.map(|l| norm.component(l).eval(&x[l.index()], &y[l.index()]));
        if den.iter().any(|d| *d <= EPS) {
            continue;
        }
        for l in Idempotent::ALL {
            visit(l, &x[l.index()], &y[l.index()], den[l.index()]);
        }
    }
}

/// Best sampled quotient `|x^T C y| / ||x, y||` for one component.
struct ComponentSearch {
    best: f64,
    x: Vec<f64>,
    y: Vec<f64>,
}

/// Pairs closer to dependent than this (relative area) are skipped: rounding in the
/// numerator would dominate the quotient.
const MIN_RELATIVE_AREA: f64 = 1e-6;

fn quotient(c: &Mat, n2: &dyn Real2Norm, x: &[f64], y: &[f64]) -> Option<f64> {
    let den = n2.eval(x, y);
    let floor = MIN_RELATIVE_AREA * linalg::norm(x) * linalg::norm(y);
    (den > EPS && den > floor).then(|| c.antisymmetric_bilinear(x, y).abs() / den)
}

fn hill_climb(c: &Mat, n2: &dyn Real2Norm, search: &mut ComponentSearch) {
    let n = search.x.len();
    let mut step = 0.25;
    for _ in 0..HILL_CLIMB_STEPS {
        let mut improved = false;
        for slot in 0..2 {
            for i in 0..n {
                for sign in [1.0, -1.0] {
                    let (mut x, mut y) = (search.x.clone(), search.y.clone());
                    if slot == 0 {
                        x[i] += sign * step;
                    } else {
                        y[i] += sign * step;
                    }
                    if let Some(q) = quotient(c, n2, &x, &y) {
                        if q > search.best {
                            search.best = q;
                            search.x = x;
                            search.y = y;
                            improved = true;
                        }
                    }
                }
            }
        }
        if !improved {
            step *= 0.5;
        }
    }
}

/// Sampled lower estimate of the norm from the quotient form
/// `sup_D |f(x, y)|_k / ||x, y||_D` over pairs whose norm is invertible.
///
/// Pairs are drawn uniformly on the product of unit spheres in each component; the best
/// pair per component is then polished by coordinate hill climbing.
pub fn norm_bruteforce<R: Rng + ?Sized>(
    f: &DBilinear2Functional,
    norm: &D2Norm,
    budget: usize,
    rng: &mut R,
) -> Result<NormCertificate> {
    if budget == 0 {
        return Err(Error::InvalidArgument("brute-force budget must be at least 1".into()));
    }
    let n = f.n();
    let mut searches = [
        ComponentSearch { best: 0.0, x: linalg::unit(n, 0), y: linalg::unit(n, 1) },
        ComponentSearch { best: 0.0, x: linalg::unit(n, 0), y: linalg::unit(n, 1) },
    ];
    sample_pairs(n, norm, budget, rng, |l, x, y, den| {
        let ratio = f.component(l).antisymmetric_bilinear(x, y).abs() / den;
        let s = &mut searches[l.index()];
        if ratio > s.best {
            s.best = ratio;
            s.x.copy_from_slice(x);
            s.y.copy_from_slice(y);
        }
    });
    for l in Idempotent::ALL {
        hill_climb(f.component(l), norm.component(l), &mut searches[l.index()]);
    }
    let [s1, s2] = searches;
    Ok(NormCertificate {
        value: Hyperbolic::new(s1.best, s2.best),
        witness: (DVector::join(&s1.x, &s2.x)?, DVector::join(&s1.y, &s2.y)?),
        method: NormMethod::BruteForce,
    })
}

/// Sampled lower estimate from the unit form `sup_D { |f(x, y)|_k : ||x, y||_D = 1 }`:
/// each sampled pair is rescaled by the inverse of its D-valued norm before evaluation.
pub fn norm_bruteforce_unit<R: Rng + ?Sized>(
    f: &DBilinear2Functional,
    norm: &D2Norm,
    budget: usize,
    rng: &mut R,
) -> Result<NormCertificate> {
    if budget == 0 {
        return Err(Error::InvalidArgument("brute-force budget must be at least 1".into()));
    }
    let n = f.n();
    let mut best = [0.0; 2];
    let mut wx = [linalg::unit(n, 0), linalg::unit(n, 0)];
    let mut wy = [linalg::unit(n, 1), linalg::unit(n, 1)];
    sample_pairs(n, norm, budget, rng, |l, x, y, den| {
        // rescale x so that the pair has unit norm
        let value = (f.component(l).antisymmetric_bilinear(x, y) / den).abs();
        let i = l.index();
        if value > best[i] {
            best[i] = value;
            wx[i] = linalg::scale(x, 1.0 / den);
            wy[i].copy_from_slice(y);
        }
    });
    let mut searches = [0, 1].map(|i| ComponentSearch {
        best: best[i],
        x: wx[i].clone(),
        y: wy[i].clone(),
    });
    for l in Idempotent::ALL {
        hill_climb(f.component(l), norm.component(l), &mut searches[l.index()]);
    }
    let [s1, s2] = searches;
    Ok(NormCertificate {
        value: Hyperbolic::new(s1.best, s2.best),
        witness: (DVector::join(&s1.x, &s2.x)?, DVector::join(&s1.y, &s2.y)?),
        method: NormMethod::UnitSphere,
    })
}

/// Result of testing `|f(x, y)|_k <=' delta ||x, y||_D` on samples.
#[derive(Clone, Debug, PartialEq)]
pub struct BoundCheck {
    pub holds: bool,
    /// Largest componentwise excess `|f|_k - delta ||x, y||_D` seen.
    pub worst_excess: f64,
    /// A pair violating the bound, when one was found.
    pub witness: Option<(DVector, DVector)>,
}

/// Tests D-boundedness with bound `delta` on random pairs. When the component norms are
/// Gram-determinant, the spectral witness pair is tested as well.
pub fn is_bounded_check<R: Rng + ?Sized>(
    f: &DBilinear2Functional,
    norm: &D2Norm,
    delta: Hyperbolic,
    samples: usize,
    rng: &mut R,
) -> Result<BoundCheck> {
    if !delta.is_nonneg() {
        return Err(Error::InvalidArgument("bound must lie in D+".into()));
    }
    let n = f.n();
    let mut candidates: Vec<(DVector, DVector)> = Vec::new();
    if norm.is_gram_det() {
        candidates.push(norm_spectral(f, norm)?.witness);
    }
    let mut check = BoundCheck { holds: true, worst_excess: 0.0, witness: None };
    let test = |x: DVector, y: DVector, check: &mut BoundCheck| -> Result<()> {
        let lhs = f.eval(&x, &y)?.modulus_k();
        let rhs = delta * norm.eval(&x, &y)?;
        let excess = (lhs.p - rhs.p).max(lhs.q - rhs.q);
        let tol = 1e-9 * (1.0 + rhs.max_abs());
        if excess > check.worst_excess {
            check.worst_excess = excess;
        }
        if excess > tol && check.holds {
            check.holds = false;
            check.witness = Some((x, y));
        }
        Ok(())
    };
    for (x, y) in candidates {
        test(x, y, &mut check)?;
    }
    for _ in 0..samples {
        let x = DVector::join(&random_vector(n, rng), &random_vector(n, rng))?;
        let y = DVector::join(&random_vector(n, rng), &random_vector(n, rng))?;
        test(x, y, &mut check)?;
    }
    Ok(check)
}
