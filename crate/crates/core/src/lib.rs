//! ℓp→ℓq operator norms, mixed norms, and diagonal factorizations of finite
//! nonnegative matrices, with a verification harness for the associated
//! mixed-norm inequalities at constant M = 1.
//!
//! The pieces:
//!
//! - [`exponent`]: exponents in (0, ∞] stored by reciprocal, conjugates, and
//!   the derived indices 1/r = 1/q − 1/p, 1/s = 1/(2r) + 1/4.
//! - [`matrix`] / [`norms`]: validated nonnegative matrices, ℓp vector norms,
//!   and mixed ℓ_outer(ℓ_inner) norms.
//! - [`opnorm`]: ‖A‖_{p,q} via closed forms, multistart power iteration, a
//!   certifying grid oracle, and the duality route through the adjoint.
//! - [`factorize`]: A = diag(d)·B factorizations and minimization of
//!   ‖d‖_r·‖B‖_{p,p}.
//! - [`verify`]: per-matrix inequality checks and the randomized suite.
//! - [`io`]: CSV/JSON matrix parsing shared with the command-line tool.
//!
//! Everything is deterministic given the seeds in the options structs. With
//! the default `parallel` feature, multistarts, restarts, oracle scans, and
//! suite instances fan out over rayon; results are identical either way.

pub mod error;
pub mod exponent;
pub mod factorize;
pub mod io;
pub mod matrix;
pub mod norms;
pub mod opnorm;
mod par;
pub mod verify;

pub use error::{Error, Result};
pub use exponent::{Exponent, ExponentPair};
pub use factorize::{
    default_seed_d, objective, optimize, optimize_from, optimize_logged, verify_factorization,
    Factorization, FactorizationCheck, FactorizationViolation, FactorizeOptions,
};
pub use io::{parse_matrix_file, parse_matrix_str, MatrixFormat};
pub use matrix::{basis_vector, PositiveMatrix};
pub use norms::{entrywise_norm, mixed_norm_cols, mixed_norm_rows, vector_norm};
pub use opnorm::{
    exact_norm, grid_oracle, norm_from_l1, norm_to_linf, norm_via_duality, operator_norm,
    power_iteration, power_iteration_logged, Method, NormEstimate, NormOptions,
};
pub use verify::{
    check_duality_identity, check_improvement_dominance, check_theorem1, check_theorem2,
    random_positive_matrix, run_suite, InequalityRecord, MatrixDistribution, SuiteConfig, Theorem,
    TheoremSummary, VerificationReport,
};
