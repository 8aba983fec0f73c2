//! Numerical toolkit for stochastic generators of positive-definite
//! exponents: Ito quadruple arithmetic, conditional positive-definiteness
//! tests, pseudo-Hilbert dilations of form-generators, coherent-vector
//! exponent kernels, and Poisson-type generator checks.

pub mod birth;
pub mod coherent;
pub mod cpd;
pub mod dilation;
pub mod germ;
pub mod ito;
pub mod json;
pub mod linalg;
pub mod poisson;
pub mod selftest;
pub mod semigroup;

use thiserror::Error as ThisError;

#[derive(Debug, ThisError)]
pub enum Error {
    #[error("mode count mismatch: {0} vs {1}")]
    ModeMismatch(usize, usize),
    #[error("element does not belong to the semigroup: {0}")]
    ElementMismatch(String),
    #[error("ball element exceeds unit operator norm: {0}")]
    NormExceeded(f64),
    #[error("empty sample")]
    EmptySample,
    #[error("element not covered by the model table")]
    OutsideTable,
    #[error("sample closure exceeded the cap of {0} elements")]
    ClosureCapExceeded(usize),
    #[error("Gram matrix is not positive semidefinite: min eigenvalue {0}")]
    GramNotPsd(f64),
    #[error("model failed the conditional positivity test: min eigenvalue {0}")]
    NotCpd(f64),
    #[error("dilation residual {name} = {value} exceeds the construction bound")]
    ResidualExceeded { name: &'static str, value: f64 },
    #[error("semigroup has no zero element")]
    NoZeroElement,
    #[error("operation not supported for this generator form: {0}")]
    UnsupportedForm(&'static str),
    #[error("input matrix is not Hermitian: residual {0}")]
    NonHermitian(f64),
    #[error("invalid input: {0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, Error>;
