//! Decides, as far as decidable, whether a finite symmetric matrix can be
//! the non-centered covariance, semivariogram, or q-th spatial moment of a
//! random field valued in a given codomain, and builds realizable models
//! from closed-form recipes with Monte Carlo validation.
//!
//! The workhorse quantities are the gamma and eta gaps of a test matrix over
//! the codomain ([`gap`]); the verdict engine ([`realizability`]) turns gap
//! inequalities into certificates, the cone tests ([`cones`]) cover the
//! special codomains that reduce to membership problems, and
//! [`constructors`] / [`montecarlo`] provide realizable models and seeded
//! sampling checks.

pub mod codomain;
pub mod cones;
pub mod constructors;
pub mod gap;
pub mod matrix;
pub mod montecarlo;
pub mod realizability;
pub mod tolerances;

pub use codomain::{Codomain, CodomainError};
pub use gap::{
    eta_gap, gamma_gap, gamma_gap_integer, gamma_gap_interval, gamma_gap_tensor, hermite_bound,
    zeta_gap, ExtReal, GapError, GapMethod, GapResult, IntegerGapReading, TensorArray,
};
pub use matrix::{MatrixError, MatrixKind, SymmetricMatrix};
pub use tolerances::Tolerances;
