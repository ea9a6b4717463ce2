//! Norm-preserving extension of a bounded D-linear 2-functional from `M x [z]` to
//! `X x [z]`, one generator at a time, with every step bracketed and audited.
//!
//! A functional on `M x [z]` is determined by the linear forms `x -> f_l(x, z_l)` on
//! each `M_l`, so it is stored as one vector per component (the minimal representative,
//! lying in `M_l`). The component problems never interact: the D-level engine pairs the
//! two real step sequences and solves each half independently.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::dmodule::{check_dims, linear_dependent, DSubmodule, DVector};
use crate::error::{Error, Result};
use crate::hyperbolic::{Hyperbolic, Idempotent, EPS};
use crate::linalg::{self, Mat};
use crate::optimize::{minimize, ConvexObjective, SolverConfig};
use crate::two_functional::DBilinear2Functional;
use crate::two_norm::{random_scalar, D2Norm, Real2Norm};

/// Relative eigenvalue cutoff used when inverting the restricted Gram matrix.
const GRAM_CUTOFF: f64 = 1e-9;

/// Order of the arguments of the functional being extended.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum DomainOrder {
    /// `f` is given on `M x [z]`.
    #[default]
    SubmoduleFirst,
    /// `f` is given on `[z] x M`; handled by swapping arguments.
    SpanFirst,
}

/// How the engine treated `z`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum Branch {
    /// `z` is invertible in every component.
    Generic,
    /// `z` vanished in one component and was completed there before extending.
    ZeroDivisor { vanishing: usize },
    /// `z = 0`: the extension is identically zero.
    Zero,
}

#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ExtendConfig {
    pub solver: SolverConfig,
    /// Relative slack allowed when `m0` comes out above `m`; within it the bracket is
    /// collapsed to its midpoint, beyond it the step fails.
    pub bracket_tol: f64,
}

impl Default for ExtendConfig {
    fn default() -> Self {
        ExtendConfig { solver: SolverConfig::default(), bracket_tol: 1e-7 }
    }
}

/// A D-linear functional on `M x [z]`, `f(x, alpha z) = alpha (w1 . x1, w2 . x2)`.
#[derive(Clone, Debug, PartialEq)]
pub struct PartialFunctional {
    domain: DSubmodule,
    z: DVector,
    forms: [Vec<f64>; 2],
}

fn component_index(l: Idempotent) -> usize {
    l.index()
}

impl PartialFunctional {
    /// The restriction of an antisymmetric functional to `M x [z]`.
    pub fn from_matrices(domain: DSubmodule, z: DVector, f: &DBilinear2Functional) -> Result<Self> {
        let n = domain.n();
        check_dims(n, &[&z])?;
        if f.n() != n {
            return Err(Error::DimensionMismatch { expected: n, found: f.n() });
        }
        let forms = Idempotent::ALL.map(|l| f.component(l).mul_vec(&z.component(l)));
        Self::from_forms(domain, z, forms)
    }

    /// `f(x, alpha z) = alpha (w1 . x1, w2 . x2)`; each `w_l` only matters on `M_l`.
    pub fn from_forms(domain: DSubmodule, z: DVector, forms: [Vec<f64>; 2]) -> Result<Self> {
        let n = domain.n();
        check_dims(n, &[&z])?;
        if let Some(w) = forms.iter().find(|w| w.len() != n) {
            return Err(Error::DimensionMismatch { expected: n, found: w.len() });
        }
        let forms = Idempotent::ALL.map(|l| {
            let q = linalg::orthonormalize(domain.basis(l));
            linalg::project(&q, &forms[component_index(l)])
        });
        Ok(PartialFunctional { domain, z, forms })
    }

    pub fn domain(&self) -> &DSubmodule {
        &self.domain
    }

    pub fn z(&self) -> &DVector {
        &self.z
    }

    /// The minimal representative `w_l`, lying in `M_l`.
    pub fn form(&self, l: Idempotent) -> &[f64] {
        &self.forms[component_index(l)]
    }

    /// `f(x, alpha z)`; `x` must lie in the domain.
    pub fn eval(&self, x: &DVector, alpha: Hyperbolic) -> Result<Hyperbolic> {
        if !self.domain.contains(x)? {
            return Err(Error::InvalidArgument(String::from("x is outside the domain of the functional")));
        }
        Ok(self.eval_unchecked(x, alpha))
    }

    fn eval_unchecked(&self, x: &DVector, alpha: Hyperbolic) -> Hyperbolic {
        let (x1, x2) = x.split();
        alpha * Hyperbolic::new(linalg::dot(&self.forms[0], &x1), linalg::dot(&self.forms[1], &x2))
    }

    /// `||f||_D` on `M x [z]` for Gram-determinant components.
    pub fn restricted_norm(&self, norm: &D2Norm) -> Result<Hyperbolic> {
        if !norm.is_gram_det() {
            return Err(Error::UnsupportedNorm);
        }
        let mut out = [0.0; 2];
        for l in Idempotent::ALL {
            out[component_index(l)] =
                restricted_norm_component(self.domain.basis(l), &self.z.component(l), self.form(l), l)?;
        }
        Ok(Hyperbolic::new(out[0], out[1]))
    }

    /// The gap interval `[m0, m]` for adjoining `x'`, with the bound `c = ||f||_D`.
    pub fn gap_interval(&self, norm: &D2Norm, c: Hyperbolic, x_prime: &DVector, cfg: &ExtendConfig) -> Result<GapInterval> {
        check_dims(self.domain.n(), &[x_prime])?;
        let mut m0 = [0.0; 2];
        let mut m = [0.0; 2];
        let mut forced = [false; 2];
        for l in Idempotent::ALL {
            let i = component_index(l);
            let g = component_gap(
                norm.component(l),
                self.domain.basis(l),
                self.form(l),
                c.component(l),
                &x_prime.component(l),
                &self.z.component(l),
                &cfg.solver,
            );
            m0[i] = g.m0;
            m[i] = g.m;
            forced[i] = g.forced;
        }
        Ok(GapInterval { m0: Hyperbolic::new(m0[0], m0[1]), m: Hyperbolic::new(m[0], m[1]), forced })
    }

    /// `g(x + beta x', alpha z) = alpha f(x, z) + alpha beta r` on `N = M + [x']`.
    pub fn extend_by(&self, x_prime: &DVector, r: Hyperbolic) -> Result<PartialFunctional> {
        let domain = self.domain.extend(x_prime)?;
        let forms = Idempotent::ALL.map(|l| {
            let i = component_index(l);
            let xl = x_prime.component(l);
            let q = linalg::orthonormalize(self.domain.basis(l));
            let w = self.forms[i].clone();
            let u = linalg::reject(&q, &xl);
            if linalg::in_span(&q, &xl) {
                return w;
            }
            let un = linalg::norm(&u);
            let coef = (r.component(l) - linalg::dot(&w, &xl)) / (un * un);
            let mut next = w;
            linalg::axpy(coef, &u, &mut next);
            next
        });
        Ok(PartialFunctional { domain, z: self.z.clone(), forms })
    }
}

fn restricted_norm_component(basis: &[Vec<f64>], z: &[f64], w: &[f64], l: Idempotent) -> Result<f64> {
    let q = linalg::orthonormalize(basis);
    let a: Vec<f64> = q.iter().map(|qi| linalg::dot(qi, w)).collect();
    let a_norm = linalg::norm(&a);
    let zn = linalg::norm(z);
    let unbounded = |leak: f64| Error::Unbounded { component: l.index() + 1, leak };
    if q.is_empty() {
        return Ok(0.0);
    }
    if zn <= EPS {
        return if a_norm <= GRAM_CUTOFF { Ok(0.0) } else { Err(unbounded(a_norm)) };
    }
    let s: Vec<f64> = q.iter().map(|qi| linalg::dot(qi, z) / zn).collect();
    let k = q.len();
    let gram = Mat::from_fn(k, k, |i, j| if i == j { 1.0 } else { 0.0 } - s[i] * s[j]);
    let (values, vectors) = linalg::symmetric_eigen(&gram);
    let mut sq = 0.0;
    let mut leak: f64 = 0.0;
    for (lambda, v) in values.iter().zip(&vectors) {
        let proj = linalg::dot(&a, v);
        if *lambda > GRAM_CUTOFF {
            sq += proj * proj / lambda;
        } else {
            leak = leak.max(proj.abs());
        }
    }
    if leak > GRAM_CUTOFF * (1.0 + a_norm) {
        return Err(unbounded(leak));
    }
    Ok(libm::sqrt(sq) / zn)
}

/// `[m0, m]` per component. `forced[l]` marks components whose value is determined
/// without optimization (`x'_l` already in `M_l`, or `x'_l = z_l`).
#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct GapInterval {
    pub m0: Hyperbolic,
    pub m: Hyperbolic,
    pub forced: [bool; 2],
}

struct ComponentGap {
    m0: f64,
    m: f64,
    forced: bool,
}

/// `t -> c ||x' + Q t, z|| + sign (w . Q t)` over orthonormal coordinates of `M_l`.
struct GapObjective<'a> {
    norm: &'a dyn Real2Norm,
    q: Vec<Vec<f64>>,
    wq: Vec<f64>,
    sign: f64,
    c: f64,
    x_prime: &'a [f64],
    z: &'a [f64],
}

impl GapObjective<'_> {
    fn point(&self, t: &[f64]) -> Vec<f64> {
        let mut x = self.x_prime.to_vec();
        for (qi, &ti) in self.q.iter().zip(t) {
            linalg::axpy(ti, qi, &mut x);
        }
        x
    }
}

impl ConvexObjective for GapObjective<'_> {
    fn dim(&self) -> usize {
        self.q.len()
    }

    fn value(&self, t: &[f64]) -> f64 {
        self.c * self.norm.eval(&self.point(t), self.z) + self.sign * linalg::dot(&self.wq, t)
    }

    fn subgradient(&self, t: &[f64]) -> Vec<f64> {
        let g = self.norm.grad_first(&self.point(t), self.z);
        self.q.iter().zip(&self.wq).map(|(qi, wi)| self.c * linalg::dot(qi, &g) + self.sign * wi).collect()
    }
}

fn component_gap(
    norm: &dyn Real2Norm,
    basis: &[Vec<f64>],
    w: &[f64],
    c: f64,
    x_prime: &[f64],
    z: &[f64],
    solver: &SolverConfig,
) -> ComponentGap {
    let q = linalg::orthonormalize(basis);
    if linalg::in_span(&q, x_prime) {
        let v = linalg::dot(w, x_prime);
        return ComponentGap { m0: v, m: v, forced: true };
    }
    if x_prime == z {
        // ||x + z, z|| = ||x, z||, so both ends of the bracket are 0
        return ComponentGap { m0: 0.0, m: 0.0, forced: true };
    }
    let wq: Vec<f64> = q.iter().map(|qi| linalg::dot(qi, w)).collect();
    let cfg = SolverConfig { step: solver.step.max(linalg::norm(x_prime)), ..*solver };
    let mut objective = GapObjective { norm, q, wq, sign: -1.0, c, x_prime, z };
    let m = minimize(&objective, &cfg).value;
    objective.sign = 1.0;
    let m0 = -minimize(&objective, &cfg).value;
    ComponentGap { m0, m, forced: false }
}

/// One extension step: the adjoined direction, its bracket, the chosen value and the
/// extended functional on `N x [z]`.
#[derive(Clone, Debug, PartialEq)]
pub struct ExtensionStep {
    pub x_prime: DVector,
    pub m0: Hyperbolic,
    pub m: Hyperbolic,
    pub r: Hyperbolic,
    pub forced: [bool; 2],
    /// `||g||_D` on `N x [z]`.
    pub norm_g: Hyperbolic,
    pub g: PartialFunctional,
}

impl ExtensionStep {
    /// `m0 <=' r <=' m` up to `tol` (relative to the bracket scale).
    pub fn bracket_holds(&self, tol: f64) -> bool {
        Idempotent::ALL.iter().all(|&l| {
            let (lo, r, hi) = (self.m0.component(l), self.r.component(l), self.m.component(l));
            let slack = tol * (1.0 + lo.abs() + hi.abs());
            lo <= r + slack && r <= hi + slack
        })
    }
}

/// Adjoins `x'` to the domain of `f`, choosing `r` at the midpoint of `[m0, m]`.
/// When `x'` already lies in `M` the step is the identity.
pub fn one_step_extend(
    f: &PartialFunctional,
    norm: &D2Norm,
    c: Hyperbolic,
    x_prime: &DVector,
    cfg: &ExtendConfig,
) -> Result<ExtensionStep> {
    if f.z().is_zero_divisor_element() {
        return Err(Error::DegenerateZ);
    }
    let gap = f.gap_interval(norm, c, x_prime, cfg)?;
    let mut m0 = [0.0; 2];
    let mut m = [0.0; 2];
    for l in Idempotent::ALL {
        let i = component_index(l);
        let (lo, hi) = (gap.m0.component(l), gap.m.component(l));
        let slack = cfg.bracket_tol * (1.0 + lo.abs() + hi.abs());
        if lo > hi + slack || !lo.is_finite() || !hi.is_finite() {
            return Err(Error::OptimizationFailure { component: i + 1, m0: lo, m: hi });
        }
        if lo > hi {
            let mid = 0.5 * (lo + hi);
            (m0[i], m[i]) = (mid, mid);
        } else {
            (m0[i], m[i]) = (lo, hi);
        }
    }
    let m0 = Hyperbolic::new(m0[0], m0[1]);
    let m = Hyperbolic::new(m[0], m[1]);
    let r = (m0 + m).scale(0.5);
    let g = if f.domain().contains(x_prime)? { f.clone() } else { f.extend_by(x_prime, r)? };
    let norm_g = if norm.is_gram_det() { g.restricted_norm(norm)? } else { c };
    Ok(ExtensionStep { x_prime: x_prime.clone(), m0, m, r, forced: gap.forced, norm_g, g })
}

/// An extension problem: a bounded functional known on `M x [z]` (or `[z] x M`),
/// given through antisymmetric component matrices.
#[derive(Clone, Debug)]
pub struct ExtensionProblem {
    pub m: DSubmodule,
    pub z: DVector,
    pub f: DBilinear2Functional,
    pub norm: D2Norm,
    pub order: DomainOrder,
}

impl ExtensionProblem {
    pub fn new(m: DSubmodule, z: DVector, f: DBilinear2Functional, norm: D2Norm) -> Result<Self> {
        let n = m.n();
        check_dims(n, &[&z])?;
        if f.n() != n {
            return Err(Error::DimensionMismatch { expected: n, found: f.n() });
        }
        Ok(ExtensionProblem { m, z, f, norm, order: DomainOrder::SubmoduleFirst })
    }

    pub fn with_order(mut self, order: DomainOrder) -> Self {
        self.order = order;
        self
    }

    pub fn n(&self) -> usize {
        self.m.n()
    }

    /// The given data `f(x, alpha z)` (or `f(alpha z, x)`) for `x` in `M`.
    pub fn given(&self, x: &DVector, alpha: Hyperbolic) -> Result<Hyperbolic> {
        let az = self.z.scale(alpha);
        match self.order {
            DomainOrder::SubmoduleFirst => self.f.eval(x, &az),
            DomainOrder::SpanFirst => self.f.eval(&az, x),
        }
    }
}

/// For `z` vanishing in exactly one component, `z'` agrees with `z` where `z` is nonzero
/// and is `|z_other| e_0` where it vanishes; `f'` is zero in that component. Then
/// `f'(x, alpha z) = f(x, alpha z)` on `M` and `z'` is not a zero divisor.
pub fn normalize_degenerate_z(problem: &ExtensionProblem) -> Result<ExtensionProblem> {
    let n = problem.n();
    let vanishing = vanishing_component(&problem.z).ok_or(Error::NotDegenerate)?;
    let other = vanishing.other();
    let zo = problem.z.component(other);
    let mut filler = vec![0.0; n];
    filler[0] = linalg::norm(&zo);
    let zero = Mat::zeros(n, n);
    let (z, f) = match vanishing {
        Idempotent::E1 => (DVector::join(&filler, &zo)?, DBilinear2Functional::new(zero, problem.f.component(other).clone())?),
        Idempotent::E2 => (DVector::join(&zo, &filler)?, DBilinear2Functional::new(problem.f.component(other).clone(), zero)?),
    };
    Ok(ExtensionProblem { z, f, ..problem.clone() })
}

/// The component in which a nonzero zero-divisor `z` vanishes.
fn vanishing_component(z: &DVector) -> Option<Idempotent> {
    let zero = |l| linalg::norm(&z.component(l)) <= EPS;
    match (zero(Idempotent::E1), zero(Idempotent::E2)) {
        (true, false) => Some(Idempotent::E1),
        (false, true) => Some(Idempotent::E2),
        _ => None,
    }
}

/// The extension `F` on `X x [z]` (or `[z] x X`).
#[derive(Clone, Debug, PartialEq)]
pub struct ExtendedFunctional {
    /// `F(x, alpha z) = alpha (w1 . x1, w2 . x2)` with `z` the (possibly normalized) vector.
    pub on_span: PartialFunctional,
    /// An antisymmetric functional on `X x X` whose restriction is `F`, in the problem's
    /// argument order, with the same norm.
    pub lift: DBilinear2Functional,
    pub order: DomainOrder,
}

impl ExtendedFunctional {
    /// `F(x, alpha z)` for any `x` in `X` (arguments swapped for [`DomainOrder::SpanFirst`]).
    pub fn eval(&self, x: &DVector, alpha: Hyperbolic) -> Result<Hyperbolic> {
        check_dims(self.lift.n(), &[x])?;
        let az = self.on_span.z().scale(alpha);
        match self.order {
            DomainOrder::SubmoduleFirst => self.lift.eval(x, &az),
            DomainOrder::SpanFirst => self.lift.eval(&az, x),
        }
    }
}

/// The full record of an extension run.
#[derive(Clone, Debug, PartialEq)]
pub struct ExtensionTrace {
    pub branch: Branch,
    /// The `z` actually used (differs from the input on the zero-divisor branch).
    pub z_used: DVector,
    /// The functional on `M x [z_used]` the steps start from.
    pub initial: PartialFunctional,
    pub steps: Vec<ExtensionStep>,
    pub extension: ExtendedFunctional,
    /// `||f||_D` on `M x [z]`.
    pub norm_f: Hyperbolic,
    /// `||F||_D` on `X x [z]`, from the final linear forms.
    pub norm_big_f: Hyperbolic,
    /// Spectral norm of the antisymmetric lift of `F`.
    pub norm_lift: Hyperbolic,
}

/// Per-component list of directions to adjoin: `z_l` first when it is outside `M_l`,
/// then the standard basis vectors outside the growing span.
fn plan_component(basis: &[Vec<f64>], z: &[f64]) -> Vec<Vec<f64>> {
    let n = z.len();
    let mut span = linalg::orthonormalize(basis);
    let mut plan = Vec::new();
    let mut push = |v: Vec<f64>, span: &mut Vec<Vec<f64>>| {
        if !linalg::in_span(span, &v) {
            let mut all = span.clone();
            all.push(v.clone());
            *span = linalg::orthonormalize(&all);
            plan.push(v);
        }
    };
    if linalg::norm(z) > EPS {
        push(z.to_vec(), &mut span);
    }
    for i in 0..n {
        push(linalg::unit(n, i), &mut span);
    }
    plan
}

fn lift_forms(n: usize, z: &DVector, forms: [&[f64]; 2]) -> Result<DBilinear2Functional> {
    let mats: Vec<Mat> = Idempotent::ALL
        .iter()
        .map(|&l| {
            let zl = z.component(l);
            let zz = linalg::dot(&zl, &zl);
            if zz <= EPS * EPS {
                return Mat::zeros(n, n);
            }
            // w restricted to z-orthogonal part: x^T (w z^T - z w^T) z / |z|^2 = w.x when w.z = 0
            let w = forms[l.index()];
            let w_perp = linalg::reject(&[linalg::scale(&zl, 1.0 / libm::sqrt(zz))], w);
            Mat::wedge(&w_perp, &zl).scaled(1.0 / zz)
        })
        .collect();
    let mut it = mats.into_iter();
    DBilinear2Functional::new(it.next().expect("two components"), it.next().expect("two components"))
}

/// Extends `f` from `M x [z]` to `X x [z]` preserving `||f||_D`.
pub fn full_extend(problem: &ExtensionProblem, cfg: &ExtendConfig) -> Result<ExtensionTrace> {
    let n = problem.n();
    if n < 2 {
        return Err(Error::InvalidArgument(String::from("the module dimension must be at least 2")));
    }
    if !problem.norm.is_gram_det() {
        return Err(Error::UnsupportedNorm);
    }
    let order = problem.order;
    // [z] x M is handled as M x [z] for f'(x, y) = f(y, x) = -f(x, y)
    let working_f = match order {
        DomainOrder::SubmoduleFirst => problem.f.clone(),
        DomainOrder::SpanFirst => problem.f.scale(Hyperbolic::real(-1.0)),
    };
    let oriented = |lift: DBilinear2Functional| match order {
        DomainOrder::SubmoduleFirst => lift,
        DomainOrder::SpanFirst => lift.scale(Hyperbolic::real(-1.0)),
    };

    if problem.z.is_zero() {
        let on_span = PartialFunctional::from_forms(DSubmodule::full(n), problem.z.clone(), [vec![0.0; n], vec![0.0; n]])?;
        let initial = PartialFunctional::from_forms(problem.m.clone(), problem.z.clone(), [vec![0.0; n], vec![0.0; n]])?;
        return Ok(ExtensionTrace {
            branch: Branch::Zero,
            z_used: problem.z.clone(),
            initial,
            steps: Vec::new(),
            extension: ExtendedFunctional { on_span, lift: DBilinear2Functional::zero(n), order },
            norm_f: Hyperbolic::ZERO,
            norm_big_f: Hyperbolic::ZERO,
            norm_lift: Hyperbolic::ZERO,
        });
    }

    let (branch, z, f) = match vanishing_component(&problem.z) {
        Some(l) => {
            let normalized = normalize_degenerate_z(&ExtensionProblem { f: working_f, ..problem.clone() })?;
            (Branch::ZeroDivisor { vanishing: l.index() + 1 }, normalized.z, normalized.f)
        }
        None => (Branch::Generic, problem.z.clone(), working_f),
    };

    let initial = PartialFunctional::from_matrices(problem.m.clone(), z.clone(), &f)?;
    let c = initial.restricted_norm(&problem.norm)?;
    let mut state = initial.clone();

    let plans = Idempotent::ALL.map(|l| plan_component(problem.m.basis(l), &z.component(l)));
    let len = plans[0].len().max(plans[1].len());
    let zeros = vec![0.0; n];
    let mut steps = Vec::with_capacity(len);
    for j in 0..len {
        let pick = |i: usize| plans[i].get(j).map(|v| v.as_slice()).unwrap_or(&zeros);
        let x_prime = DVector::join(pick(0), pick(1))?;
        let step = one_step_extend(&state, &problem.norm, c, &x_prime, cfg)?;
        state = step.g.clone();
        steps.push(step);
    }

    let norm_big_f = state.restricted_norm(&problem.norm)?;
    let lift = lift_forms(n, &z, [state.form(Idempotent::E1), state.form(Idempotent::E2)])?;
    let norm_lift = {
        let (f1, f2) = lift.component_split();
        Hyperbolic::new(f1.spectral_norm(), f2.spectral_norm())
    };
    Ok(ExtensionTrace {
        branch,
        z_used: z,
        initial,
        steps,
        extension: ExtendedFunctional { on_span: state, lift: oriented(lift), order },
        norm_f: c,
        norm_big_f,
        norm_lift,
    })
}

/// Sampled verification of an extension run.
#[derive(Clone, Debug, Default, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ExtensionAudit {
    pub samples: usize,
    /// Largest `|F - f|` on `M x [z]`, relative to `1 + |f|` per component.
    pub restriction_error: f64,
    /// `| ||F|| - ||f|| |` per component, relative when `||f||_l` is not tiny.
    pub norm_error: [f64; 2],
    /// Same comparison for the spectral norm of the lift.
    pub lift_norm_error: [f64; 2],
    /// Largest excess of `|F(x, alpha z)|_k` over `||f||_D ||x, alpha z||_D`.
    pub bound_excess: f64,
    /// Largest relative change of `||g||_D` along the steps.
    pub chain_error: f64,
    /// Every step satisfies `m0 <=' r <=' m`.
    pub brackets_hold: bool,
}

impl ExtensionAudit {
    pub fn passes(&self, restriction_tol: f64, norm_tol: f64) -> bool {
        self.restriction_error <= restriction_tol
            && self.norm_error.iter().chain(&self.lift_norm_error).all(|&e| e <= norm_tol)
            && self.chain_error <= norm_tol
            && self.bound_excess <= norm_tol
            && self.brackets_hold
    }
}

fn norm_gap(reference: f64, value: f64) -> f64 {
    let d = (reference - value).abs();
    if reference > 1e-9 {
        d / reference
    } else {
        d
    }
}

/// Checks restriction agreement, norm preservation, the pointwise bound and the brackets.
pub fn audit_extension<R: Rng + ?Sized>(
    problem: &ExtensionProblem,
    trace: &ExtensionTrace,
    samples: usize,
    bracket_tol: f64,
    rng: &mut R,
) -> Result<ExtensionAudit> {
    let n = problem.n();
    let (d1, d2) = problem.m.dims();
    let mut audit = ExtensionAudit { samples, ..ExtensionAudit::default() };
    for l in Idempotent::ALL {
        let i = l.index();
        audit.norm_error[i] = norm_gap(trace.norm_f.component(l), trace.norm_big_f.component(l));
        audit.lift_norm_error[i] = norm_gap(trace.norm_f.component(l), trace.norm_lift.component(l));
    }
    for step in &trace.steps {
        for l in Idempotent::ALL {
            audit.chain_error = audit.chain_error.max(norm_gap(trace.norm_f.component(l), step.norm_g.component(l)));
        }
    }
    audit.brackets_hold = trace.steps.iter().all(|s| s.bracket_holds(bracket_tol));

    let gauss = |rng: &mut R, k: usize| -> Vec<f64> { (0..k).map(|_| StandardNormal.sample(rng)).collect() };
    for _ in 0..samples {
        let x = problem.m.combine(&gauss(rng, d1), &gauss(rng, d2));
        let alpha = random_scalar(rng);
        let given = problem.given(&x, alpha)?;
        let got = trace.extension.eval(&x, alpha)?;
        for l in Idempotent::ALL {
            let err = (got.component(l) - given.component(l)).abs() / (1.0 + given.component(l).abs());
            audit.restriction_error = audit.restriction_error.max(err);
        }
        // pointwise bound on all of X
        let y = DVector::join(&gauss(rng, n), &gauss(rng, n))?;
        let value = trace.extension.eval(&y, alpha)?.modulus_k();
        let bound = trace.norm_f * problem.norm.eval(&y, &trace.z_used.scale(alpha))?;
        for l in Idempotent::ALL {
            let excess = (value.component(l) - bound.component(l)) / (1.0 + bound.component(l));
            audit.bound_excess = audit.bound_excess.max(excess);
        }
    }
    Ok(audit)
}

/// Result of the norming-functional construction for a pair `(x0, y0)`.
#[derive(Clone, Debug, PartialEq)]
pub struct CorollaryResult {
    /// `f0(alpha x0, beta y0) = alpha beta ||x0, y0||_D`, as an antisymmetric functional.
    pub f0: DBilinear2Functional,
    pub trace: ExtensionTrace,
    pub checks: CorollaryChecks,
}

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct CorollaryChecks {
    pub norm_x0_y0: Hyperbolic,
    pub norm_f: Hyperbolic,
    pub norm_big_f: Hyperbolic,
    /// `|F(x0, y0) - ||x0, y0||_D|`, componentwise maximum.
    pub attainment_error: f64,
    /// Worst `| |F(alpha x0, beta y0)|_k - ||alpha x0, beta y0||_D |` per zero pattern of
    /// `(alpha, beta)`: `cross_idempotent` (`alpha = e1 a`, `beta = e2 b` and mirror),
    /// `same_idempotent` (`alpha = e1 a`, `beta = e1 b` and mirror), `invertible`, `mixed`.
    pub zero_patterns: Vec<(String, f64)>,
}

/// Builds `F` with `||F||_D = 1` and `F(x0, y0) = ||x0, y0||_D`.
pub fn corollary_functional<R: Rng + ?Sized>(
    x0: &DVector,
    y0: &DVector,
    norm: &D2Norm,
    cfg: &ExtendConfig,
    rng: &mut R,
) -> Result<CorollaryResult> {
    let n = x0.dim();
    check_dims(n, &[y0])?;
    if !norm.is_gram_det() {
        return Err(Error::UnsupportedNorm);
    }
    if linear_dependent(x0, y0) {
        return Err(Error::DependentPair);
    }
    let nxy = norm.eval(x0, y0)?;
    if !nxy.is_invertible() || x0.is_zero_divisor_element() || y0.is_zero_divisor_element() {
        return Err(Error::ZeroDivisorInput);
    }
    let mats: Vec<Mat> = Idempotent::ALL
        .iter()
        .map(|&l| Mat::wedge(&x0.component(l), &y0.component(l)).scaled(1.0 / nxy.component(l)))
        .collect();
    let f0 = DBilinear2Functional::new(mats[0].clone(), mats[1].clone())?;
    let problem = ExtensionProblem::new(DSubmodule::generated_by(x0), y0.clone(), f0.clone(), norm.clone())?;
    let trace = full_extend(&problem, cfg)?;

    let attained = trace.extension.eval(x0, Hyperbolic::ONE)?;
    let attainment_error = (attained - nxy).max_abs();

    let mut patterns: Vec<(String, f64)> = ["cross_idempotent", "same_idempotent", "invertible", "mixed"]
        .iter()
        .map(|s| (String::from(*s), 0.0))
        .collect();
    let nonzero = |rng: &mut R| {
        let v: f64 = StandardNormal.sample(rng);
        if v.abs() < 0.1 { v.signum() * 0.1 + v } else { v }
    };
    for mask in 0u8..16 {
        let pick = |bit: u8, rng: &mut R| if mask & (1 << bit) != 0 { nonzero(rng) } else { 0.0 };
        let alpha = Hyperbolic::new(pick(0, rng), pick(1, rng));
        let beta = Hyperbolic::new(pick(2, rng), pick(3, rng));
        let class = match mask {
            0b1001 | 0b0110 => 0,
            0b0101 | 0b1010 => 1,
            0b1111 => 2,
            _ => 3,
        };
        let ax = x0.scale(alpha);
        let lhs = trace.extension.lift.eval(&ax, &y0.scale(beta))?.modulus_k();
        let rhs = norm.eval(&ax, &y0.scale(beta))?;
        let err = (lhs - rhs).max_abs() / (1.0 + rhs.max_abs());
        patterns[class].1 = patterns[class].1.max(err);
    }

    let checks = CorollaryChecks {
        norm_x0_y0: nxy,
        norm_f: trace.norm_f,
        norm_big_f: trace.norm_big_f,
        attainment_error,
        zero_patterns: patterns,
    };
    Ok(CorollaryResult { f0, trace, checks })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::two_norm::random_dvector;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn random_antisymmetric(n: usize, rng: &mut ChaCha8Rng) -> Mat {
        let a = Mat::from_fn(n, n, |_, _| StandardNormal.sample(rng));
        a.plus(&a.transpose().scaled(-1.0))
    }

    fn random_problem(n: usize, d1: usize, d2: usize, rng: &mut ChaCha8Rng) -> ExtensionProblem {
        let basis = |d: usize, rng: &mut ChaCha8Rng| -> Vec<Vec<f64>> {
            (0..d).map(|_| (0..n).map(|_| StandardNormal.sample(rng)).collect()).collect()
        };
        let m = DSubmodule::new(n, basis(d1, rng), basis(d2, rng)).unwrap();
        let f = DBilinear2Functional::new(random_antisymmetric(n, rng), random_antisymmetric(n, rng)).unwrap();
        ExtensionProblem::new(m, random_dvector(n, rng), f, D2Norm::gram_det()).unwrap()
    }

    /// Minimal-norm extension in the Euclidean case: `F(x, z) = u . P x` with `P` the
    /// projection orthogonal to `z` and `u` in `P M` matching `f` on `M`.
    fn hilbert_value(p: &PartialFunctional, l: Idempotent, x: &[f64]) -> f64 {
        let z = p.z().component(l);
        let zhat = [linalg::scale(&z, 1.0 / linalg::norm(&z))];
        let w = p.form(l);
        let q = linalg::orthonormalize(p.domain().basis(l));
        let pq: Vec<Vec<f64>> = q.iter().map(|v| linalg::reject(&zhat, v)).collect();
        let k = q.len();
        let gram = Mat::from_fn(k, k, |i, j| linalg::dot(&pq[i], &pq[j]));
        let a: Vec<f64> = q.iter().map(|v| linalg::dot(v, w)).collect();
        // least-squares solve through the eigen decomposition
        let (vals, vecs) = linalg::symmetric_eigen(&gram);
        let mut coef = vec![0.0; k];
        for (lam, v) in vals.iter().zip(&vecs) {
            if *lam > 1e-12 {
                let s = linalg::dot(&a, v) / lam;
                linalg::axpy(s, v, &mut coef);
            }
        }
        let mut u = vec![0.0; z.len()];
        for (c, v) in coef.iter().zip(&pq) {
            linalg::axpy(*c, v, &mut u);
        }
        linalg::dot(&u, &linalg::reject(&zhat, x))
    }

    #[test]
    fn restricted_norm_matches_spectral_on_full_domain() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..20 {
            let p = random_problem(4, 4, 4, &mut rng);
            let pf = PartialFunctional::from_matrices(p.m.clone(), p.z.clone(), &p.f).unwrap();
            let got = pf.restricted_norm(&p.norm).unwrap();
            // on all of X the norm is |P_z C z| / |z|
            for l in Idempotent::ALL {
                let z = p.z.component(l);
                let v = p.f.component(l).mul_vec(&z);
                let zhat = [linalg::scale(&z, 1.0 / linalg::norm(&z))];
                let expect = linalg::norm(&linalg::reject(&zhat, &v)) / linalg::norm(&z);
                assert!((got.component(l) - expect).abs() < 1e-10 * (1.0 + expect));
            }
        }
    }

    #[test]
    fn unbounded_form_is_rejected() {
        let z = DVector::from_real(&[1.0, 0.0, 0.0]);
        let m = DSubmodule::new(3, vec![vec![1.0, 0.0, 0.0]], vec![]).unwrap();
        let pf = PartialFunctional::from_forms(m, z, [vec![1.0, 0.0, 0.0], vec![0.0; 3]]).unwrap();
        assert!(matches!(pf.restricted_norm(&D2Norm::gram_det()), Err(Error::Unbounded { component: 1, .. })));
    }

    #[test]
    fn gap_brackets_contain_hilbert_value() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let cfg = ExtendConfig::default();
        for _ in 0..10 {
            let p = random_problem(3, 1, 2, &mut rng);
            let mut pf = PartialFunctional::from_matrices(p.m.clone(), p.z.clone(), &p.f).unwrap();
            // adjoin z first so that M contains z
            let step = one_step_extend(&pf, &p.norm, pf.restricted_norm(&p.norm).unwrap(), &p.z, &cfg).unwrap();
            assert_eq!(step.r, Hyperbolic::ZERO);
            pf = step.g;
            let c = pf.restricted_norm(&p.norm).unwrap();
            let x_prime = random_dvector(3, &mut rng);
            let gap = pf.gap_interval(&p.norm, c, &x_prime, &cfg).unwrap();
            for l in Idempotent::ALL {
                let exact = hilbert_value(&pf, l, &x_prime.component(l));
                let tol = 1e-6 * (1.0 + exact.abs());
                assert!(gap.m0.component(l) <= exact + tol && exact <= gap.m.component(l) + tol, "{gap:?} vs {exact}");
                assert!(gap.m.component(l) - gap.m0.component(l) < 1e-5);
            }
        }
    }

    #[test]
    fn full_extension_preserves_norm_and_restriction() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let cfg = ExtendConfig::default();
        for (d1, d2) in [(1, 2), (2, 0), (0, 3), (3, 3), (2, 1)] {
            let p = random_problem(4, d1, d2, &mut rng);
            let trace = full_extend(&p, &cfg).unwrap();
            assert_eq!(trace.branch, Branch::Generic);
            let audit = audit_extension(&p, &trace, 200, cfg.bracket_tol, &mut rng).unwrap();
            assert!(audit.passes(1e-10, 1e-5), "{audit:?}");
        }
    }

    #[test]
    fn gap_on_zero_submodule_is_symmetric() {
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        let p = random_problem(3, 0, 0, &mut rng);
        let pf = PartialFunctional::from_matrices(p.m.clone(), p.z.clone(), &p.f).unwrap();
        let c = Hyperbolic::new(1.5, 0.25);
        let x_prime = random_dvector(3, &mut rng);
        let gap = pf.gap_interval(&p.norm, c, &x_prime, &ExtendConfig::default()).unwrap();
        let expect = c * p.norm.eval(&x_prime, &p.z).unwrap();
        assert!((gap.m - expect).max_abs() < 1e-15);
        assert!((gap.m0 + expect).max_abs() < 1e-15);
    }

    #[test]
    fn zero_functional_extends_by_zero() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let mut p = random_problem(3, 1, 2, &mut rng);
        p.f = DBilinear2Functional::zero(3);
        let trace = full_extend(&p, &ExtendConfig::default()).unwrap();
        for step in &trace.steps {
            assert!(step.m0.leq_tol(Hyperbolic::ZERO, 1e-12) && Hyperbolic::ZERO.leq_tol(step.m, 1e-12));
            assert!(step.r.max_abs() < 1e-12);
        }
        assert!(trace.norm_big_f.max_abs() < 1e-12);
    }

    #[test]
    fn steps_follow_dimension_count() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let p = random_problem(3, 1, 1, &mut rng);
        let trace = full_extend(&p, &ExtendConfig::default()).unwrap();
        // z_l and one more basis vector per component
        assert_eq!(trace.steps.len(), 2);
        assert!(trace.steps.iter().all(|s| s.forced == [false, false] || s.x_prime == trace.z_used));
    }

    #[test]
    fn one_step_norm_and_pointwise_bound() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let cfg = ExtendConfig::default();
        for _ in 0..5 {
            let p = random_problem(3, 1, 1, &mut rng);
            let pf = PartialFunctional::from_matrices(p.m.clone(), p.z.clone(), &p.f).unwrap();
            let c = pf.restricted_norm(&p.norm).unwrap();
            let pf = one_step_extend(&pf, &p.norm, c, &p.z, &cfg).unwrap().g;
            let x_prime = random_dvector(3, &mut rng);
            let step = one_step_extend(&pf, &p.norm, c, &x_prime, &cfg).unwrap();
            for l in Idempotent::ALL {
                let (a, b) = (c.component(l), step.norm_g.component(l));
                assert!((a - b).abs() <= 1e-6 * a.max(1e-12), "{a} vs {b}");
            }
            let (d1, d2) = pf.domain().dims();
            for _ in 0..200 {
                let gauss = |k: usize, rng: &mut ChaCha8Rng| -> Vec<f64> { (0..k).map(|_| StandardNormal.sample(rng)).collect() };
                let x = pf.domain().combine(&gauss(d1, &mut rng), &gauss(d2, &mut rng));
                let y = pf.domain().combine(&gauss(d1, &mut rng), &gauss(d2, &mut rng));
                // (5.2): |f(x, z) + r|_k <=' ||f|| ||x + x', z||
                let lhs = (pf.eval(&x, Hyperbolic::ONE).unwrap() + step.r).modulus_k();
                let rhs = c * p.norm.eval(&(&x + &x_prime), &p.z).unwrap();
                assert!(lhs.leq_tol(rhs, 1e-7 * (1.0 + rhs.max_abs())));
                // (5.1): -||f|| ||y + x', z|| - f(y, z) <=' ||f|| ||x + x', z|| - f(x, z)
                let left = -(c * p.norm.eval(&(&y + &x_prime), &p.z).unwrap()) - pf.eval(&y, Hyperbolic::ONE).unwrap();
                let right = rhs - pf.eval(&x, Hyperbolic::ONE).unwrap();
                assert!(left.leq_tol(right, 1e-9 * (1.0 + right.max_abs())));
                // g agrees with f on the old domain
                let gx = step.g.eval(&x, Hyperbolic::ONE).unwrap();
                assert!((gx - pf.eval(&x, Hyperbolic::ONE).unwrap()).max_abs() < 1e-10);
            }
        }
    }

    #[test]
    fn normalized_z_example() {
        let mut p = random_problem(2, 1, 0, &mut ChaCha8Rng::seed_from_u64(14));
        p.z = DVector::from_component(Idempotent::E1, &[1.0, 0.0]);
        let normalized = normalize_degenerate_z(&p).unwrap();
        assert_eq!(normalized.z, DVector::from_real(&[1.0, 0.0]));
        assert_eq!(normalized.f.component(Idempotent::E2), &Mat::zeros(2, 2));
    }

    #[test]
    fn full_domain_gives_no_steps() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let mut p = random_problem(3, 0, 0, &mut rng);
        p.m = DSubmodule::full(3);
        let trace = full_extend(&p, &ExtendConfig::default()).unwrap();
        assert!(trace.steps.is_empty());
        let x = random_dvector(3, &mut rng);
        let alpha = Hyperbolic::new(0.3, -2.0);
        assert!((trace.extension.eval(&x, alpha).unwrap() - p.given(&x, alpha).unwrap()).max_abs() < 1e-12);
    }

    #[test]
    fn zero_z_extends_by_zero() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let mut p = random_problem(3, 1, 1, &mut rng);
        p.z = DVector::zeros(3);
        let trace = full_extend(&p, &ExtendConfig::default()).unwrap();
        assert_eq!(trace.branch, Branch::Zero);
        assert_eq!(trace.norm_big_f, Hyperbolic::ZERO);
    }

    #[test]
    fn degenerate_z_is_normalized() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let mut p = random_problem(3, 1, 2, &mut rng);
        let z1: Vec<f64> = (0..3).map(|_| StandardNormal.sample(&mut rng)).collect();
        p.z = DVector::from_component(Idempotent::E1, &z1);
        let normalized = normalize_degenerate_z(&p).unwrap();
        assert!(!normalized.z.is_zero_divisor_element());
        assert!(normalize_degenerate_z(&normalized).is_err());
        let pf = PartialFunctional::from_matrices(p.m.clone(), normalized.z.clone(), &normalized.f).unwrap();
        assert!(matches!(
            one_step_extend(&PartialFunctional { z: p.z.clone(), ..pf }, &p.norm, Hyperbolic::ONE, &random_dvector(3, &mut rng), &ExtendConfig::default()),
            Err(Error::DegenerateZ)
        ));
        let trace = full_extend(&p, &ExtendConfig::default()).unwrap();
        assert_eq!(trace.branch, Branch::ZeroDivisor { vanishing: 2 });
        let audit = audit_extension(&p, &trace, 200, 1e-7, &mut rng).unwrap();
        assert!(audit.passes(1e-10, 1e-5), "{audit:?}");
    }

    #[test]
    fn swapped_domain_agrees_with_given_data() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let p = random_problem(3, 2, 1, &mut rng).with_order(DomainOrder::SpanFirst);
        let trace = full_extend(&p, &ExtendConfig::default()).unwrap();
        let audit = audit_extension(&p, &trace, 200, 1e-7, &mut rng).unwrap();
        assert!(audit.passes(1e-10, 1e-5), "{audit:?}");
    }

    #[test]
    fn components_decouple() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let p = random_problem(3, 1, 2, &mut rng);
        let full = full_extend(&p, &ExtendConfig::default()).unwrap();
        let b1 = p.m.basis(Idempotent::E1).to_vec();
        let c1 = p.f.component(Idempotent::E1).clone();
        let alone = ExtensionProblem::new(
            DSubmodule::new(3, b1.clone(), b1).unwrap(),
            DVector::from_real(&p.z.component(Idempotent::E1)),
            DBilinear2Functional::new(c1.clone(), c1).unwrap(),
            D2Norm::gram_det(),
        )
        .unwrap();
        let solo = full_extend(&alone, &ExtendConfig::default()).unwrap();
        assert_eq!(
            full.extension.on_span.form(Idempotent::E1),
            solo.extension.on_span.form(Idempotent::E1)
        );
    }

    #[test]
    fn corollary_norming_functional() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..5 {
            let x0 = random_dvector(3, &mut rng);
            let y0 = random_dvector(3, &mut rng);
            let res = corollary_functional(&x0, &y0, &D2Norm::gram_det(), &ExtendConfig::default(), &mut rng).unwrap();
            assert!((res.checks.norm_big_f - Hyperbolic::ONE).max_abs() < 1e-9, "{:?}", res.checks);
            assert!(res.checks.attainment_error < 1e-10);
            assert!(res.checks.zero_patterns.iter().all(|(_, e)| *e < 1e-10), "{:?}", res.checks);
        }
        let x0 = DVector::from_real(&[1.0, 0.0]);
        let err = corollary_functional(&x0, &x0.scale(Hyperbolic::real(2.0)), &D2Norm::gram_det(), &ExtendConfig::default(), &mut rng);
        assert_eq!(err.unwrap_err(), Error::DependentPair);
        let y0 = DVector::from_component(Idempotent::E1, &[0.0, 1.0]);
        let err = corollary_functional(&x0, &y0, &D2Norm::gram_det(), &ExtendConfig::default(), &mut rng);
        assert_eq!(err.unwrap_err(), Error::ZeroDivisorInput);
    }
}
