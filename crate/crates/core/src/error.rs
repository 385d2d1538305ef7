use num_complex::Complex64;
use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid lattice: {0}")]
    InvalidLattice(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("constant polynomial has no roots")]
    ConstantPolynomial,

    #[error("non-finite value encountered: {0}")]
    NonFinite(String),

    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },

    #[error("{what} did not converge after {iterations} iterations")]
    NoConvergence { what: &'static str, iterations: usize },

    #[error("step size underflow at t = {t}")]
    StepUnderflow { t: f64 },

    #[error("transfer matrix is not unimodular (det = {det})")]
    NotUnimodular { det: Complex64 },

    #[error(
        "edge candidates disagree between Q eigenvalues and S21 roots \
         (max deviation {deviation:e}): eig(Q) = {from_q:?}, roots(S21) = {from_s21:?}"
    )]
    RouteMismatch {
        deviation: f64,
        from_q: Vec<Complex64>,
        from_s21: Vec<Complex64>,
    },

    #[error("family is already in the broken phase at lambda = 0 (max |Im E| = {max_abs_imag:e})")]
    BrokenAtZero { max_abs_imag: f64 },

    #[error("record is not an edge state")]
    NotEdgeState,
}
