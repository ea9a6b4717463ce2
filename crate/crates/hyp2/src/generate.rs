//! Deterministic random instances.

use hyp2_core::linalg::{self, Mat};
use hyp2_core::{DBilinear2Functional, DSubmodule, DVector, Idempotent};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::formats::{FormatError, FunctionalJson, InstanceFile, NormJson};

pub const MIN_N: usize = 2;
pub const MAX_N: usize = 8;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct GenSpec {
    pub seed: u64,
    pub n: usize,
    /// Real dimensions of `M1` and `M2`.
    pub dims: (usize, usize),
    pub degenerate_z: bool,
}

pub fn gaussian_vector<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Vec<f64> {
    (0..n).map(|_| StandardNormal.sample(rng)).collect()
}

pub fn random_antisymmetric<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Mat {
    let a = Mat::from_fn(n, n, |_, _| StandardNormal.sample(rng));
    a.plus(&a.transpose().scaled(-1.0)).scaled(0.5)
}

/// `d` Gaussian vectors, redrawn until independent.
pub fn random_basis<R: Rng + ?Sized>(n: usize, d: usize, rng: &mut R) -> Vec<Vec<f64>> {
    loop {
        let basis: Vec<Vec<f64>> = (0..d).map(|_| gaussian_vector(n, rng)).collect();
        if linalg::rank(&basis) == d {
            return basis;
        }
    }
}

/// A vector that is zero in exactly one (randomly chosen) component.
pub fn random_zero_divisor<R: Rng + ?Sized>(n: usize, rng: &mut R) -> DVector {
    let l = if rng.random_bool(0.5) { Idempotent::E1 } else { Idempotent::E2 };
    DVector::from_component(l, &gaussian_vector(n, rng))
}

pub fn generate(spec: GenSpec) -> Result<InstanceFile, FormatError> {
    let GenSpec { seed, n, dims: (d1, d2), degenerate_z } = spec;
    if !(MIN_N..=MAX_N).contains(&n) {
        return Err(FormatError::BadDims(format!("n = {n} is outside {MIN_N}..={MAX_N}")));
    }
    if d1 > n || d2 > n {
        return Err(FormatError::BadDims(format!("component dimensions ({d1}, {d2}) exceed n = {n}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let m = DSubmodule::new(n, random_basis(n, d1, &mut rng), random_basis(n, d2, &mut rng))?;
    let f = DBilinear2Functional::new(random_antisymmetric(n, &mut rng), random_antisymmetric(n, &mut rng))?;
    let z = if degenerate_z {
        random_zero_divisor(n, &mut rng)
    } else {
        DVector::join(&gaussian_vector(n, &mut rng), &gaussian_vector(n, &mut rng))?
    };
    Ok(InstanceFile {
        n,
        m,
        z,
        functional: FunctionalJson::from_functional(&f),
        norm: NormJson::gram_det(),
        seed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use hyp2_core::two_functional::is_bounded_check;
    use hyp2_core::{norm_spectral, D2Norm};

    #[test]
    fn deterministic_and_valid() {
        let spec = GenSpec { seed: 42, n: 4, dims: (2, 1), degenerate_z: false };
        let a = serde_json::to_string(&generate(spec).unwrap()).unwrap();
        let b = serde_json::to_string(&generate(spec).unwrap()).unwrap();
        assert_eq!(a, b);
        let inst = generate(spec).unwrap().validate().unwrap();
        assert_eq!(inst.m.dims(), (2, 1));
        assert!(!inst.z.is_zero_divisor_element());
    }

    #[test]
    fn degenerate_flag_gives_zero_divisor() {
        for seed in 0..10 {
            let inst = generate(GenSpec { seed, n: 3, dims: (1, 1), degenerate_z: true }).unwrap();
            assert!(inst.z.is_zero_divisor_element() && !inst.z.is_zero());
        }
    }

    #[test]
    fn bad_dims_rejected() {
        assert!(generate(GenSpec { seed: 0, n: 1, dims: (0, 0), degenerate_z: false }).is_err());
        assert!(generate(GenSpec { seed: 0, n: 9, dims: (0, 0), degenerate_z: false }).is_err());
        assert!(generate(GenSpec { seed: 0, n: 3, dims: (4, 0), degenerate_z: false }).is_err());
    }

    #[test]
    fn generated_functional_is_bounded_by_its_spectral_norm() {
        let inst = generate(GenSpec { seed: 5, n: 5, dims: (2, 2), degenerate_z: false }).unwrap().validate().unwrap();
        let delta = norm_spectral(&inst.f, &D2Norm::gram_det()).unwrap().value;
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        assert!(is_bounded_check(&inst.f, &inst.norm, delta, 2000, &mut rng).unwrap().holds);
    }
}
