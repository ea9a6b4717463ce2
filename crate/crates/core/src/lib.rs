//! Hyperbolic-valued 2-normed modules over the split-complex ring D.
//!
//! The crate is `no_std` (it needs `alloc`). It provides
//!
//! * exact componentwise arithmetic, order and lattice operations on D ([`hyperbolic`]);
//! * the free module `D^n`, idempotent splitting and submodules ([`dmodule`]);
//! * real and D-valued 2-norms with sampled axiom checks ([`two_norm`]);
//! * D-linear 2-functionals as antisymmetric matrix pairs with spectral and sampled
//!   norms ([`two_functional`]);
//! * a constructive, audited norm-preserving extension engine for 2-functionals
//!   on `M x [z]` ([`hahn_banach`]), driven by a small convex minimizer ([`optimize`]).
//!
//! ```
//! use hyp2_core::{full_extend, linalg::Mat, D2Norm, DBilinear2Functional, DSubmodule, DVector};
//! use hyp2_core::hahn_banach::{ExtendConfig, ExtensionProblem};
//!
//! let c = Mat::from_rows(&[vec![0.0, 2.0, 0.0], vec![-2.0, 0.0, 1.0], vec![0.0, -1.0, 0.0]]).unwrap();
//! let f = DBilinear2Functional::new(c.clone(), c.scaled(-0.5)).unwrap();
//! let m = DSubmodule::new(3, vec![vec![1.0, 0.0, 0.0]], vec![]).unwrap();
//! let z = DVector::join(&[0.0, 1.0, 1.0], &[1.0, 0.0, 0.0]).unwrap();
//! let problem = ExtensionProblem::new(m, z, f, D2Norm::gram_det()).unwrap();
//! let trace = full_extend(&problem, &ExtendConfig::default()).unwrap();
//! assert!((trace.norm_big_f - trace.norm_f).max_abs() < 1e-9);
//! ```
#![no_std]

extern crate alloc;

pub mod dmodule;
pub mod error;
pub mod hahn_banach;
pub mod hyperbolic;
pub mod linalg;
pub mod optimize;
pub mod two_functional;
pub mod two_norm;

pub use dmodule::{linear_dependent, DSubmodule, DVector};
pub use error::{Error, Result};
pub use hahn_banach::{
    corollary_functional, full_extend, normalize_degenerate_z, one_step_extend, ExtendConfig, ExtensionProblem,
    ExtensionTrace,
};
pub use hyperbolic::{inf_d, leq_prime, sup_d, Hyperbolic, Idempotent, OrderResult, EPS};
pub use two_functional::{norm_bruteforce, norm_spectral, DBilinear2Functional};
pub use two_norm::{D2Norm, DTwoNorm, GramDet, Real2Norm};
