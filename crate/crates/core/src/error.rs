use alloc::string::String;

/// Errors raised by the core library.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("hyperbolic number is not invertible (zero or zero divisor)")]
    NotInvertible,
    #[error("empty collection has no D-supremum or D-infimum")]
    EmptyCollection,
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("basis of component {component} is linearly dependent")]
    DependentBasis { component: usize },
    #[error("vector already lies in the submodule")]
    AlreadyContained,
    #[error("matrix of component {component} is not antisymmetric (max |symmetric part| = {max_symmetric:e})")]
    NotAntisymmetric { component: usize, max_symmetric: f64 },
    #[error("2-norm axiom ({axiom}) violated by {violation:e}")]
    AxiomViolation { axiom: String, violation: f64 },
    #[error("operation requires Gram-determinant component norms")]
    UnsupportedNorm,
    #[error("z is zero or a zero divisor; route it through the degenerate branch")]
    DegenerateZ,
    #[error("z is not a zero divisor")]
    NotDegenerate,
    #[error("gap bracket failed in component {component}: m0 = {m0}, m = {m}")]
    OptimizationFailure { component: usize, m0: f64, m: f64 },
    #[error("x0 and y0 are linearly dependent")]
    DependentPair,
    #[error("x0 or y0 is a zero divisor")]
    ZeroDivisorInput,
    #[error("functional is not bounded on its domain (leak {leak:e} in component {component})")]
    Unbounded { component: usize, leak: f64 },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = core::result::Result<T, Error>;
