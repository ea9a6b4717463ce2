//! The ring D of hyperbolic (split-complex) numbers.
//!
//! Values are stored in the idempotent basis `e1 = (1+k)/2`, `e2 = (1-k)/2`, so a number
//! `a + k b` is held as `p e1 + q e2` with `p = a + b`, `q = a - b`. Every ring operation,
//! the `k`-modulus, the partial order and the lattice operations act componentwise on `(p, q)`.

use core::fmt;
use core::iter::Sum;
use core::ops::{Add, AddAssign, Mul, MulAssign, Neg, Sub, SubAssign};

use crate::error::{Error, Result};

/// Comparison tolerance shared by every zero, equality and order test on scalars.
pub const EPS: f64 = 1e-12;

/// Selects one of the two idempotent components.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Idempotent {
    E1,
    E2,
}

impl Idempotent {
    pub const ALL: [Idempotent; 2] = [Idempotent::E1, Idempotent::E2];

    /// Zero-based index: 0 for `e1`, 1 for `e2`.
    pub fn index(self) -> usize {
        match self {
            Idempotent::E1 => 0,
            Idempotent::E2 => 1,
        }
    }

    pub fn other(self) -> Idempotent {
        match self {
            Idempotent::E1 => Idempotent::E2,
            Idempotent::E2 => Idempotent::E1,
        }
    }
}

/// A hyperbolic number `p e1 + q e2`.
#[derive(Clone, Copy, Debug, PartialEq, Default)]
#[cfg_attr(
    feature = "serde",
    derive(serde::Serialize, serde::Deserialize),
    serde(from = "wire::HyperbolicRepr")
)]
pub struct Hyperbolic {
    /// Coefficient of `e1`.
    pub p: f64,
    /// Coefficient of `e2`.
    pub q: f64,
}

/// Outcome of comparing two hyperbolic numbers under the partial order `<='`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum OrderResult {
    LessEq,
    GreaterEq,
    Equal,
    Incomparable,
}

impl Hyperbolic {
    pub const ZERO: Hyperbolic = Hyperbolic { p: 0.0, q: 0.0 };
    pub const ONE: Hyperbolic = Hyperbolic { p: 1.0, q: 1.0 };
    /// The hyperbolic unit `k`, with `k^2 = 1`.
    pub const K: Hyperbolic = Hyperbolic { p: 1.0, q: -1.0 };
    pub const E1: Hyperbolic = Hyperbolic { p: 1.0, q: 0.0 };
    pub const E2: Hyperbolic = Hyperbolic { p: 0.0, q: 1.0 };

    /// Builds a number from its idempotent coordinates.
    pub const fn new(p: f64, q: f64) -> Self {
        Hyperbolic { p, q }
    }

    /// Builds `a + k b`.
    pub fn from_cartesian(a: f64, b: f64) -> Self {
        Hyperbolic { p: a + b, q: a - b }
    }

    /// The real number `x`, i.e. `x e1 + x e2`.
    pub const fn real(x: f64) -> Self {
        Hyperbolic { p: x, q: x }
    }

    /// Cartesian view `(a, b)` of `a + k b`.
    pub fn cartesian(self) -> (f64, f64) {
        ((self.p + self.q) / 2.0, (self.p - self.q) / 2.0)
    }

    pub fn component(self, l: Idempotent) -> f64 {
        match l {
            Idempotent::E1 => self.p,
            Idempotent::E2 => self.q,
        }
    }

    /// Number whose component `l` is `value` and whose other component is zero.
    pub fn from_component(l: Idempotent, value: f64) -> Self {
        match l {
            Idempotent::E1 => Hyperbolic::new(value, 0.0),
            Idempotent::E2 => Hyperbolic::new(0.0, value),
        }
    }

    pub fn is_zero(self) -> bool {
        self.p.abs() <= EPS && self.q.abs() <= EPS
    }

    /// Exactly one idempotent coordinate vanishes.
    pub fn is_zero_divisor(self) -> bool {
        (self.p.abs() <= EPS) != (self.q.abs() <= EPS)
    }

    pub fn is_invertible(self) -> bool {
        self.p.abs() > EPS && self.q.abs() > EPS
    }

    /// Membership in the non-negative cone `D+`.
    pub fn is_nonneg(self) -> bool {
        self.p >= -EPS && self.q >= -EPS
    }

    pub fn is_real(self) -> bool {
        (self.p - self.q).abs() <= EPS * (1.0 + self.p.abs().max(self.q.abs()))
    }

    /// The `†`-conjugate `a - k b`; swaps the idempotent coordinates.
    pub fn conj_dagger(self) -> Self {
        Hyperbolic { p: self.q, q: self.p }
    }

    pub fn inverse(self) -> Result<Self> {
        if !self.is_invertible() {
            return Err(Error::NotInvertible);
        }
        Ok(Hyperbolic { p: 1.0 / self.p, q: 1.0 / self.q })
    }

    /// The hyperbolic-valued modulus `|z|_k = e1 |p| + e2 |q|`.
    pub fn modulus_k(self) -> Self {
        Hyperbolic { p: self.p.abs(), q: self.q.abs() }
    }

    pub fn scale(self, s: f64) -> Self {
        Hyperbolic { p: self.p * s, q: self.q * s }
    }

    pub fn map(self, mut f: impl FnMut(f64) -> f64) -> Self {
        Hyperbolic { p: f(self.p), q: f(self.q) }
    }

    pub fn zip_with(self, other: Self, mut f: impl FnMut(f64, f64) -> f64) -> Self {
        Hyperbolic { p: f(self.p, other.p), q: f(self.q, other.q) }
    }

    /// Componentwise comparison with an absolute tolerance.
    pub fn approx_eq(self, other: Self, tol: f64) -> bool {
        (self.p - other.p).abs() <= tol && (self.q - other.q).abs() <= tol
    }

    /// Largest absolute coordinate.
    pub fn max_abs(self) -> f64 {
        self.p.abs().max(self.q.abs())
    }

    /// `self <=' other` with the shared tolerance.
    pub fn leq(self, other: Self) -> bool {
        (other - self).is_nonneg()
    }

    /// `self <=' other + tol` componentwise.
    pub fn leq_tol(self, other: Self, tol: f64) -> bool {
        self.p <= other.p + tol && self.q <= other.q + tol
    }
}

/// Compares `z` and `u` under `z <=' u  iff  u - z ∈ D+`.
pub fn leq_prime(z: Hyperbolic, u: Hyperbolic) -> OrderResult {
    match (z.leq(u), u.leq(z)) {
        (true, true) => OrderResult::Equal,
        (true, false) => OrderResult::LessEq,
        (false, true) => OrderResult::GreaterEq,
        (false, false) => OrderResult::Incomparable,
    }
}

fn fold_components<I>(values: I, pick: fn(f64, f64) -> f64) -> Result<Hyperbolic>
where
    I: IntoIterator<Item = Hyperbolic>,
{
    let mut iter = values.into_iter();
    let first = iter.next().ok_or(Error::EmptyCollection)?;
    Ok(iter.fold(first, |acc, z| acc.zip_with(z, pick)))
}

/// The D-supremum of a finite, non-empty collection: componentwise maximum.
pub fn sup_d<I: IntoIterator<Item = Hyperbolic>>(values: I) -> Result<Hyperbolic> {
    fold_components(values, f64::max)
}

/// The D-infimum of a finite, non-empty collection: componentwise minimum.
pub fn inf_d<I: IntoIterator<Item = Hyperbolic>>(values: I) -> Result<Hyperbolic> {
    fold_components(values, f64::min)
}

impl Add for Hyperbolic {
    type Output = Hyperbolic;
    fn add(self, rhs: Self) -> Self {
        Hyperbolic { p: self.p + rhs.p, q: self.q + rhs.q }
    }
}

impl Sub for Hyperbolic {
    type Output = Hyperbolic;
    fn sub(self, rhs: Self) -> Self {
        Hyperbolic { p: self.p - rhs.p, q: self.q - rhs.q }
    }
}

impl Mul for Hyperbolic {
    type Output = Hyperbolic;
    fn mul(self, rhs: Self) -> Self {
        Hyperbolic { p: self.p * rhs.p, q: self.q * rhs.q }
    }
}

impl Mul<f64> for Hyperbolic {
    type Output = Hyperbolic;
    fn mul(self, rhs: f64) -> Self {
        self.scale(rhs)
    }
}

impl Neg for Hyperbolic {
    type Output = Hyperbolic;
    fn neg(self) -> Self {
        Hyperbolic { p: -self.p, q: -self.q }
    }
}

impl AddAssign for Hyperbolic {
    fn add_assign(&mut self, rhs: Self) {
        *self = *self + rhs;
    }
}

impl SubAssign for Hyperbolic {
    fn sub_assign(&mut self, rhs: Self) {
        *self = *self - rhs;
    }
}

impl MulAssign for Hyperbolic {
    fn mul_assign(&mut self, rhs: Self) {
        *self = *self * rhs;
    }
}

impl Sum for Hyperbolic {
    fn sum<I: Iterator<Item = Self>>(iter: I) -> Self {
        iter.fold(Hyperbolic::ZERO, Add::add)
    }
}

impl From<f64> for Hyperbolic {
    fn from(x: f64) -> Self {
        Hyperbolic::real(x)
    }
}

impl fmt::Display for Hyperbolic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} e1 + {} e2", self.p, self.q)
    }
}

#[cfg(feature = "serde")]
mod wire {
    use super::Hyperbolic;

    /// Accepts either the idempotent `{p, q}` or the cartesian `{a, b}` encoding.
    #[derive(serde::Deserialize)]
    #[serde(untagged)]
    pub(super) enum HyperbolicRepr {
        Idempotent { p: f64, q: f64 },
        Cartesian { a: f64, b: f64 },
    }

    impl From<HyperbolicRepr> for Hyperbolic {
        fn from(r: HyperbolicRepr) -> Self {
            match r {
                HyperbolicRepr::Idempotent { p, q } => Hyperbolic::new(p, q),
                HyperbolicRepr::Cartesian { a, b } => Hyperbolic::from_cartesian(a, b),
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn h(p: f64, q: f64) -> Hyperbolic {
        Hyperbolic::new(p, q)
    }

    /// Cartesian product `(a + k b)(c + k d) = (ac + bd) + k(ad + bc)`.
    fn cartesian_mul(x: (f64, f64), y: (f64, f64)) -> (f64, f64) {
        (x.0 * y.0 + x.1 * y.1, x.0 * y.1 + x.1 * y.0)
    }

    #[test]
    fn from_cartesian_examples() {
        assert_eq!(Hyperbolic::from_cartesian(1.0, 0.0), Hyperbolic::ONE);
        let e1 = Hyperbolic::from_cartesian(0.5, 0.5);
        assert_eq!(e1, h(1.0, 0.0));
        assert!(e1.is_zero_divisor());
        assert_eq!(Hyperbolic::from_cartesian(3.0, 1.0), h(4.0, 2.0));
        assert_eq!(h(4.0, 2.0).cartesian(), (3.0, 1.0));
    }

    #[test]
    fn mul_examples() {
        assert_eq!(Hyperbolic::E1 * Hyperbolic::E2, Hyperbolic::ZERO);
        let x = h(-1.5, 7.25);
        assert_eq!(x * Hyperbolic::ONE, x);
        let prod = h(4.0, 2.0) * h(2.0, 6.0);
        assert_eq!(prod, h(8.0, 12.0));
        let (a, b) = cartesian_mul(h(4.0, 2.0).cartesian(), h(2.0, 6.0).cartesian());
        assert_eq!(Hyperbolic::from_cartesian(a, b), prod);
        assert_eq!(Hyperbolic::K * Hyperbolic::K, Hyperbolic::ONE);
    }

    #[test]
    fn conjugation_examples() {
        assert_eq!(Hyperbolic::E1.conj_dagger(), Hyperbolic::E2);
        assert_eq!(Hyperbolic::real(3.5).conj_dagger(), Hyperbolic::real(3.5));
        let z = h(4.0, 2.0);
        assert_eq!(z.conj_dagger(), h(2.0, 4.0));
        assert!((z * z.conj_dagger()).is_real());
    }

    #[test]
    fn inverse_examples() {
        assert_eq!(Hyperbolic::ONE.inverse().unwrap(), Hyperbolic::ONE);
        let z = Hyperbolic::from_cartesian(3.0, 1.0);
        let inv = z.inverse().unwrap();
        assert_eq!(inv, h(0.25, 0.5));
        assert!((z * inv).approx_eq(Hyperbolic::ONE, EPS));
        // agrees with z† / (z z†)
        let (a, b) = z.cartesian();
        let norm = a * a - b * b;
        let expect = Hyperbolic::from_cartesian(a / norm, -b / norm);
        assert!(inv.approx_eq(expect, EPS));
        assert_eq!(Hyperbolic::E1.inverse(), Err(Error::NotInvertible));
        assert_eq!(Hyperbolic::ZERO.inverse(), Err(Error::NotInvertible));
    }

    #[test]
    fn modulus_examples() {
        assert_eq!(h(-2.0, 5.0).modulus_k(), h(2.0, 5.0));
        let z = h(0.5, 3.0);
        assert_eq!(z.modulus_k(), z);
        assert!(h(-3.0, -4.0).modulus_k().is_nonneg());
    }

    #[test]
    fn order_examples() {
        assert_eq!(leq_prime(Hyperbolic::ZERO, Hyperbolic::E1), OrderResult::LessEq);
        assert_eq!(leq_prime(h(1.0, 4.0), h(3.0, 2.0)), OrderResult::Incomparable);
        assert_eq!(leq_prime(Hyperbolic::real(2.0), Hyperbolic::real(5.0)), OrderResult::LessEq);
        assert_eq!(leq_prime(Hyperbolic::real(5.0), Hyperbolic::real(2.0)), OrderResult::GreaterEq);
        assert_eq!(leq_prime(h(1.0, 2.0), h(1.0, 2.0)), OrderResult::Equal);
    }

    #[test]
    fn lattice_examples() {
        let z = h(-1.0, 2.0);
        assert_eq!(sup_d([z]).unwrap(), z);
        assert_eq!(sup_d([h(1.0, 4.0), h(3.0, 2.0)]).unwrap(), h(3.0, 4.0));
        assert_eq!(inf_d([h(1.0, 4.0), h(3.0, 2.0)]).unwrap(), h(1.0, 2.0));
        assert_eq!(sup_d(core::iter::empty()), Err(Error::EmptyCollection));
        assert_eq!(inf_d(core::iter::empty()), Err(Error::EmptyCollection));
    }

    #[test]
    fn zero_divisor_classification() {
        assert!(!Hyperbolic::ZERO.is_zero_divisor());
        assert!(Hyperbolic::E2.is_zero_divisor());
        assert!(!Hyperbolic::ONE.is_zero_divisor());
        // a^2 - b^2 = 0 with a, b nonzero
        assert!(Hyperbolic::from_cartesian(2.0, -2.0).is_zero_divisor());
    }
}
