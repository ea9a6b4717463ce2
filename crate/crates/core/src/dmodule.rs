//! The free D-module `D^n`, its idempotent splitting `x = e1 x1 + e2 x2`, and
//! submodules `M = e1 M1 + e2 M2` given by a pair of real subspaces.

use alloc::vec::Vec;
use core::ops::{Add, Neg, Sub};

use crate::error::{Error, Result};
use crate::hyperbolic::{Hyperbolic, Idempotent, EPS};
use crate::linalg;

/// An element of `D^n`.
#[derive(Clone, Debug, PartialEq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize), serde(transparent))]
pub struct DVector {
    coords: Vec<Hyperbolic>,
}

impl DVector {
    pub fn new(coords: Vec<Hyperbolic>) -> Self {
        DVector { coords }
    }

    pub fn zeros(n: usize) -> Self {
        DVector { coords: alloc::vec![Hyperbolic::ZERO; n] }
    }

    /// `e1 x1 + e2 x2`.
    pub fn join(x1: &[f64], x2: &[f64]) -> Result<Self> {
        if x1.len() != x2.len() {
            return Err(Error::DimensionMismatch { expected: x1.len(), found: x2.len() });
        }
        Ok(DVector { coords: x1.iter().zip(x2).map(|(&p, &q)| Hyperbolic::new(p, q)).collect() })
    }

    /// A real vector, fixed by `†`-conjugation: both components equal `x`.
    pub fn from_real(x: &[f64]) -> Self {
        DVector { coords: x.iter().map(|&v| Hyperbolic::real(v)).collect() }
    }

    /// `e_l x`, the vector whose component `l` is `x` and whose other component is zero.
    pub fn from_component(l: Idempotent, x: &[f64]) -> Self {
        DVector { coords: x.iter().map(|&v| Hyperbolic::from_component(l, v)).collect() }
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn coords(&self) -> &[Hyperbolic] {
        &self.coords
    }

    /// Real component `x_l`.
    pub fn component(&self, l: Idempotent) -> Vec<f64> {
        self.coords.iter().map(|z| z.component(l)).collect()
    }

    /// The unique pair `(x1, x2)` with `x = e1 x1 + e2 x2`.
    pub fn split(&self) -> (Vec<f64>, Vec<f64>) {
        (self.component(Idempotent::E1), self.component(Idempotent::E2))
    }

    /// Scalar action `alpha x`.
    pub fn scale(&self, alpha: Hyperbolic) -> Self {
        DVector { coords: self.coords.iter().map(|&z| alpha * z).collect() }
    }

    /// Projection onto the ideal `e_l X`.
    pub fn project(&self, l: Idempotent) -> Self {
        self.scale(match l {
            Idempotent::E1 => Hyperbolic::E1,
            Idempotent::E2 => Hyperbolic::E2,
        })
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(|z| z.is_zero())
    }

    /// Membership in `NC_X`: nonzero with one vanishing idempotent component.
    pub fn is_zero_divisor_element(&self) -> bool {
        let (x1, x2) = self.split();
        let z1 = linalg::is_zero_vec(&x1, EPS);
        let z2 = linalg::is_zero_vec(&x2, EPS);
        z1 != z2
    }

    pub fn max_abs(&self) -> f64 {
        self.coords.iter().fold(0.0_f64, |m, z| m.max(z.max_abs()))
    }

    fn check_dim(&self, other: &DVector) -> Result<()> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), found: other.dim() });
        }
        Ok(())
    }
}

impl Add for &DVector {
    type Output = DVector;
    fn add(self, rhs: &DVector) -> DVector {
        DVector { coords: self.coords.iter().zip(&rhs.coords).map(|(&a, &b)| a + b).collect() }
    }
}

impl Sub for &DVector {
    type Output = DVector;
    fn sub(self, rhs: &DVector) -> DVector {
        DVector { coords: self.coords.iter().zip(&rhs.coords).map(|(&a, &b)| a - b).collect() }
    }
}

impl Neg for &DVector {
    type Output = DVector;
    fn neg(self) -> DVector {
        DVector { coords: self.coords.iter().map(|&a| -a).collect() }
    }
}

impl From<Vec<Hyperbolic>> for DVector {
    fn from(coords: Vec<Hyperbolic>) -> Self {
        DVector::new(coords)
    }
}

/// Linear dependence over D, read componentwise: both `(x1, y1)` and `(x2, y2)` are
/// dependent over the reals.
pub fn linear_dependent(x: &DVector, y: &DVector) -> bool {
    Idempotent::ALL.iter().all(|&l| linalg::rank(&[x.component(l), y.component(l)]) <= 1)
}

/// A submodule `M = e1 M1 + e2 M2` of `D^n`.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(
    feature = "serde",
    derive(serde::Serialize, serde::Deserialize),
    serde(try_from = "wire::SubmoduleRepr")
)]
pub struct DSubmodule {
    n: usize,
    basis1: Vec<Vec<f64>>,
    basis2: Vec<Vec<f64>>,
}

impl DSubmodule {
    /// Validates dimensions and linear independence of each basis list.
    pub fn new(n: usize, basis1: Vec<Vec<f64>>, basis2: Vec<Vec<f64>>) -> Result<Self> {
        for (component, basis) in [(1, &basis1), (2, &basis2)] {
            if let Some(bad) = basis.iter().find(|v| v.len() != n) {
                return Err(Error::DimensionMismatch { expected: n, found: bad.len() });
            }
            if linalg::rank(basis) != basis.len() {
                return Err(Error::DependentBasis { component });
            }
        }
        Ok(DSubmodule { n, basis1, basis2 })
    }

    /// The zero submodule.
    pub fn zero(n: usize) -> Self {
        DSubmodule { n, basis1: Vec::new(), basis2: Vec::new() }
    }

    /// The whole module `D^n`, spanned by the standard basis in both components.
    pub fn full(n: usize) -> Self {
        let basis: Vec<Vec<f64>> = (0..n).map(|i| linalg::unit(n, i)).collect();
        DSubmodule { n, basis1: basis.clone(), basis2: basis }
    }

    /// The submodule `[x]` generated by one element.
    pub fn generated_by(x: &DVector) -> Self {
        let n = x.dim();
        let pick = |l| {
            let v = x.component(l);
            if linalg::rank(core::slice::from_ref(&v)) == 1 {
                alloc::vec![v]
            } else {
                Vec::new()
            }
        };
        DSubmodule { n, basis1: pick(Idempotent::E1), basis2: pick(Idempotent::E2) }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn basis(&self, l: Idempotent) -> &[Vec<f64>] {
        match l {
            Idempotent::E1 => &self.basis1,
            Idempotent::E2 => &self.basis2,
        }
    }

    /// Real dimensions `(dim M1, dim M2)`.
    pub fn dims(&self) -> (usize, usize) {
        (self.basis1.len(), self.basis2.len())
    }

    pub fn is_full(&self) -> bool {
        self.basis1.len() == self.n && self.basis2.len() == self.n
    }

    pub fn component_contains(&self, l: Idempotent, v: &[f64]) -> bool {
        linalg::in_span(&linalg::orthonormalize(self.basis(l)), v)
    }

    pub fn contains(&self, x: &DVector) -> Result<bool> {
        if x.dim() != self.n {
            return Err(Error::DimensionMismatch { expected: self.n, found: x.dim() });
        }
        Ok(Idempotent::ALL.iter().all(|&l| self.component_contains(l, &x.component(l))))
    }

    /// `N = M + {beta x'}`: each component basis grows by `x'_l` when `x'_l` is outside `M_l`.
    pub fn extend(&self, x_prime: &DVector) -> Result<DSubmodule> {
        if self.contains(x_prime)? {
            return Err(Error::AlreadyContained);
        }
        let mut next = self.clone();
        for l in Idempotent::ALL {
            let v = x_prime.component(l);
            if !self.component_contains(l, &v) {
                match l {
                    Idempotent::E1 => next.basis1.push(v),
                    Idempotent::E2 => next.basis2.push(v),
                }
            }
        }
        Ok(next)
    }

    /// Element `e1 (B1 t1) + e2 (B2 t2)` from basis coefficients.
    pub fn combine(&self, t1: &[f64], t2: &[f64]) -> DVector {
        let build = |basis: &[Vec<f64>], t: &[f64]| {
            let mut out = alloc::vec![0.0; self.n];
            for (b, &c) in basis.iter().zip(t) {
                linalg::axpy(c, b, &mut out);
            }
            out
        };
        let x1 = build(&self.basis1, t1);
        let x2 = build(&self.basis2, t2);
        DVector::join(&x1, &x2).expect("component lengths agree")
    }
}

/// Checks that every vector of `xs` has dimension `n`.
pub(crate) fn check_dims(n: usize, xs: &[&DVector]) -> Result<()> {
    for x in xs {
        if x.dim() != n {
            return Err(Error::DimensionMismatch { expected: n, found: x.dim() });
        }
    }
    Ok(())
}

pub(crate) fn check_pair(x: &DVector, y: &DVector) -> Result<()> {
    x.check_dim(y)
}

#[cfg(feature = "serde")]
mod wire {
    use super::{DSubmodule, Error, Vec};

    #[derive(serde::Deserialize)]
    pub(super) struct SubmoduleRepr {
        n: usize,
        #[serde(default)]
        basis1: Vec<Vec<f64>>,
        #[serde(default)]
        basis2: Vec<Vec<f64>>,
    }

    impl TryFrom<SubmoduleRepr> for DSubmodule {
        type Error = Error;
        fn try_from(r: SubmoduleRepr) -> Result<Self, Error> {
            DSubmodule::new(r.n, r.basis1, r.basis2)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn dv(x1: &[f64], x2: &[f64]) -> DVector {
        DVector::join(x1, x2).unwrap()
    }

    #[test]
    fn split_examples() {
        let x = DVector::from_real(&[1.0, -2.0, 3.0]);
        let (x1, x2) = x.split();
        assert_eq!(x1, x2);
        let x = DVector::from_component(Idempotent::E1, &[1.0, 0.0]);
        assert_eq!(x.split(), (vec![1.0, 0.0], vec![0.0, 0.0]));
        let y = dv(&[0.5, -1.0], &[2.0, 7.0]);
        let (a, b) = y.split();
        assert_eq!(DVector::join(&a, &b).unwrap(), y);
    }

    #[test]
    fn zero_divisor_elements() {
        assert!(!DVector::zeros(2).is_zero_divisor_element());
        assert!(DVector::from_component(Idempotent::E2, &[0.0, 1.0]).is_zero_divisor_element());
        assert!(!dv(&[1.0, 0.0], &[0.0, 1.0]).is_zero_divisor_element());
    }

    #[test]
    fn linear_dependence_examples() {
        let x = dv(&[1.0, 2.0], &[-1.0, 0.5]);
        let alpha = Hyperbolic::new(3.0, -0.25);
        assert!(linear_dependent(&x, &x.scale(alpha)));
        let x = dv(&[1.0, 0.0], &[0.0, 1.0]);
        let y = dv(&[2.0, 0.0], &[1.0, 0.0]);
        assert!(!linear_dependent(&x, &y));
        assert!(linear_dependent(&DVector::zeros(2), &y));
        assert!(linear_dependent(&y, &DVector::zeros(2)));
    }

    #[test]
    fn submodule_membership() {
        let m = DSubmodule::new(3, vec![vec![1.0, 1.0, 0.0]], vec![vec![0.0, 0.0, 1.0], vec![0.0, 1.0, 0.0]]).unwrap();
        assert!(m.contains(&DVector::from_component(Idempotent::E1, &[1.0, 1.0, 0.0])).unwrap());
        assert!(m.contains(&DVector::from_component(Idempotent::E2, &[0.0, 1.0, 0.0])).unwrap());
        assert!(m.contains(&DVector::zeros(3)).unwrap());
        // orthogonal to M1 in component 1 and to M2 in component 2
        let outside = dv(&[1.0, -1.0, 0.0], &[1.0, 0.0, 0.0]);
        assert!(!m.contains(&outside).unwrap());
        assert_eq!(m.contains(&DVector::zeros(2)), Err(Error::DimensionMismatch { expected: 3, found: 2 }));
    }

    #[test]
    fn submodule_rejects_dependent_basis() {
        let err = DSubmodule::new(2, vec![vec![1.0, 2.0], vec![2.0, 4.0]], vec![]).unwrap_err();
        assert_eq!(err, Error::DependentBasis { component: 1 });
    }

    #[test]
    fn submodule_extend_examples() {
        let x = dv(&[1.0, 2.0, 0.0], &[0.0, 1.0, 1.0]);
        let n = DSubmodule::zero(3).extend(&x).unwrap();
        assert_eq!(n.basis(Idempotent::E1), &[vec![1.0, 2.0, 0.0]]);
        assert_eq!(n.basis(Idempotent::E2), &[vec![0.0, 1.0, 1.0]]);

        let m = DSubmodule::new(3, vec![vec![1.0, 0.0, 0.0]], vec![vec![1.0, 0.0, 0.0]]).unwrap();
        let x = dv(&[2.0, 0.0, 0.0], &[0.0, 1.0, 0.0]);
        let n = m.extend(&x).unwrap();
        assert_eq!(n.dims(), (1, 2));
        assert!(n.contains(&x).unwrap());

        let inside = dv(&[3.0, 0.0, 0.0], &[-1.0, 0.0, 0.0]);
        assert_eq!(m.extend(&inside), Err(Error::AlreadyContained));
    }
}
