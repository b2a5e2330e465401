//! Gap quantities of matrices and arrays over a codomain.
//!
//! The central object is `gamma_gap`, the infimum of the quadratic form
//! `z L z^T` over `z` in `E^n`. Finite codomains are enumerated exactly;
//! unbounded ones collapse to analytic dichotomies (positive semidefiniteness
//! or copositivity decide between 0 and minus infinity); integer codomains
//! without zero reduce to lattice enumeration. `eta_gap` is the supremum of
//! the weighted squared-increment form and equals `-gamma(L - D, E)` where
//! `D` holds the row sums.

mod enumerate;
pub mod interval;
pub mod lattice;
pub mod tensor;
pub mod zeta;

pub use interval::gamma_gap_interval;
pub use lattice::{gamma_gap_integer, hermite_bound, HermiteBound};
pub use tensor::{gamma_gap_tensor, TensorArray, TensorError};
pub use zeta::{zeta_gap, ZetaGap};

pub(crate) use enumerate::minimize_quadratic;

use crate::codomain::Codomain;
use crate::cones;
use crate::matrix::{diagonal, SymmetricMatrix};
use crate::tolerances::Tolerances;
use serde::{Deserialize, Serialize};
use std::fmt;
use thiserror::Error;

/// Hard ceiling on `|E|^n` for exact enumeration of matrix gaps.
pub const ENUM_BUDGET: u128 = 1 << 24;

/// Extended real value; infinities are first-class and never encoded as
/// float sentinels.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ExtReal {
    NegInf,
    Finite(f64),
    PosInf,
}

impl ExtReal {
    pub fn finite(self) -> Option<f64> {
        match self {
            ExtReal::Finite(v) => Some(v),
            _ => None,
        }
    }

    pub fn is_finite(self) -> bool {
        matches!(self, ExtReal::Finite(_))
    }

    pub fn neg(self) -> ExtReal {
        match self {
            ExtReal::NegInf => ExtReal::PosInf,
            ExtReal::PosInf => ExtReal::NegInf,
            ExtReal::Finite(v) => ExtReal::Finite(-v),
        }
    }

    /// Numeric comparison with infinities below/above every finite value.
    pub fn as_ordering_key(self) -> f64 {
        match self {
            ExtReal::NegInf => f64::NEG_INFINITY,
            ExtReal::Finite(v) => v,
            ExtReal::PosInf => f64::INFINITY,
        }
    }
}

impl fmt::Display for ExtReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtReal::NegInf => f.write_str("-inf"),
            ExtReal::PosInf => f.write_str("inf"),
            ExtReal::Finite(v) => write!(f, "{v}"),
        }
    }
}

impl Serialize for ExtReal {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            ExtReal::Finite(v) => s.serialize_f64(*v),
            ExtReal::NegInf => s.serialize_str("-inf"),
            ExtReal::PosInf => s.serialize_str("inf"),
        }
    }
}

impl<'de> Deserialize<'de> for ExtReal {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        use serde::de::Error;
        let v = serde_json::Value::deserialize(d)?;
        match v {
            serde_json::Value::Number(n) => Ok(ExtReal::Finite(
                n.as_f64().ok_or_else(|| D::Error::custom("bad number"))?,
            )),
            serde_json::Value::String(s) if s == "-inf" => Ok(ExtReal::NegInf),
            serde_json::Value::String(s) if s == "inf" => Ok(ExtReal::PosInf),
            other => Err(D::Error::custom(format!("bad extended real: {other}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum GapMethod {
    Enumeration,
    VertexSearch,
    LatticeEnum,
    Analytic,
    HeuristicBound,
}

/// How to read the codomain `Z \ {0}` raised to the n-th power.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum IntegerGapReading {
    /// Every coordinate must be a nonzero integer (the literal power set).
    ComponentwiseNonzero,
    /// Only the all-zero vector is excluded (the shortest-vector problem).
    LatticeNonzero,
}

/// A computed gap value with an optional attaining vector.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GapResult {
    pub value: ExtReal,
    /// Vector attaining the value when the method produced one; among ties
    /// the lexicographically greatest, so certificates are reproducible.
    pub minimizer: Option<Vec<f64>>,
    pub method: GapMethod,
    /// True only for enumeration, lattice enumeration, analytic dichotomies,
    /// and zero-diagonal vertex search.
    pub exact: bool,
}

#[derive(Debug, Error)]
pub enum GapError {
    #[error("{what} needs {needed} candidates, budget is {budget}")]
    BudgetExceeded {
        what: &'static str,
        needed: u128,
        budget: u128,
    },
    #[error("unsupported combination: {what}")]
    UnsupportedCombination { what: String },
    #[error("NOT_POSITIVE_DEFINITE: minimum eigenvalue {min_eig:.3e} is within tolerance of zero")]
    NotPositiveDefinite { min_eig: f64 },
    #[error("invalid interval [{lo}, {hi}]")]
    InvalidInterval { lo: f64, hi: f64 },
    #[error("empty input")]
    EmptyInput,
}

/// The gamma gap `inf { z L z^T : z in E^n }`.
///
/// Dispatch: finite sets are enumerated exactly; the real line and the
/// integers give 0 or -infinity by the sign of the spectrum; half-lines and
/// the naturals give 0 or -infinity by copositivity; closed intervals go to
/// [`gamma_gap_interval`]; nonzero integers go to [`gamma_gap_integer`] in
/// the componentwise reading. A positive semidefinite matrix over a codomain
/// containing zero short-circuits to 0.
pub fn gamma_gap(
    lambda: &SymmetricMatrix,
    codomain: &Codomain,
    tol: &Tolerances,
) -> Result<GapResult, GapError> {
    let n = lambda.order();

    if codomain.contains_zero() && lambda.min_eigenvalue() >= -tol.psd_tol {
        return Ok(GapResult {
            value: ExtReal::Finite(0.0),
            minimizer: Some(vec![0.0; n]),
            method: GapMethod::Analytic,
            exact: true,
        });
    }

    let scale = lambda.max_abs().max(1.0);
    let off_diag_zero = (0..n).all(|k| {
        (0..n).all(|l| k == l || lambda.entry(k, l).abs() <= tol.sym_tol * scale)
    });
    if off_diag_zero {
        if let Some(result) = diagonal_gap(lambda, codomain) {
            return Ok(result);
        }
    }

    match codomain {
        Codomain::TwoPoint(..) | Codomain::FiniteSet(..) => {
            let values = codomain.enumerable_values().unwrap();
            let count = (values.len() as u128)
                .checked_pow(n as u32)
                .unwrap_or(u128::MAX);
            if count > ENUM_BUDGET {
                return Err(GapError::BudgetExceeded {
                    what: "finite codomain enumeration",
                    needed: count,
                    budget: ENUM_BUDGET,
                });
            }
            let best = minimize_quadratic(lambda.as_matrix(), &values);
            Ok(GapResult {
                value: ExtReal::Finite(best.value),
                minimizer: Some(best.z),
                method: GapMethod::Enumeration,
                exact: true,
            })
        }
        Codomain::AllReals | Codomain::Integers => {
            // 0 or -infinity; the PSD-with-zero case was handled above.
            Ok(GapResult {
                value: ExtReal::NegInf,
                minimizer: None,
                method: GapMethod::Analytic,
                exact: true,
            })
        }
        Codomain::NonNegReals | Codomain::NonPosReals | Codomain::Naturals => {
            // gamma is 0 exactly when the matrix is copositive (the negative
            // half-line reflects onto the nonnegative one). Entrywise
            // nonnegative matrices are copositive at any order.
            if lambda.as_matrix().iter().all(|&v| v >= 0.0) {
                return Ok(GapResult {
                    value: ExtReal::Finite(0.0),
                    minimizer: Some(vec![0.0; n]),
                    method: GapMethod::Analytic,
                    exact: true,
                });
            }
            let verdict = cones::is_copositive(lambda, tol).map_err(|e| match e {
                cones::ConeError::FaceBudget { n } => GapError::BudgetExceeded {
                    what: "copositivity face enumeration",
                    needed: 1u128 << n,
                    budget: 1 << cones::COPOSITIVE_MAX_N,
                },
                other => GapError::UnsupportedCombination {
                    what: other.to_string(),
                },
            })?;
            if verdict.member {
                Ok(GapResult {
                    value: ExtReal::Finite(0.0),
                    minimizer: Some(vec![0.0; n]),
                    method: GapMethod::Analytic,
                    exact: true,
                })
            } else {
                Ok(GapResult {
                    value: ExtReal::NegInf,
                    minimizer: None,
                    method: GapMethod::Analytic,
                    exact: true,
                })
            }
        }
        Codomain::ClosedInterval(lo, hi) => gamma_gap_interval(lambda, *lo, *hi, tol),
        Codomain::NonzeroIntegers => {
            gamma_gap_integer(lambda, IntegerGapReading::ComponentwiseNonzero, tol)
        }
    }
}

/// Separable exact gap for matrices with zero off-diagonal entries:
/// `gamma = sum_k min_{z in E} (lambda_kk z^2)`.
fn diagonal_gap(lambda: &SymmetricMatrix, codomain: &Codomain) -> Option<GapResult> {
    let n = lambda.order();
    let mut total = 0.0;
    let mut minimizer = vec![0.0; n];
    for k in 0..n {
        let c = lambda.entry(k, k);
        let (term, z) = min_scaled_square(c, codomain)?;
        match term {
            ExtReal::NegInf => {
                return Some(GapResult {
                    value: ExtReal::NegInf,
                    minimizer: None,
                    method: GapMethod::Analytic,
                    exact: true,
                })
            }
            ExtReal::Finite(v) => {
                total += v;
                minimizer[k] = z;
            }
            ExtReal::PosInf => unreachable!("squares are bounded below"),
        }
    }
    Some(GapResult {
        value: ExtReal::Finite(total),
        minimizer: Some(minimizer),
        method: GapMethod::Analytic,
        exact: true,
    })
}

/// Minimum of `c * z^2` over a codomain, with an attaining point (preferring
/// the greater one among ties).
fn min_scaled_square(c: f64, codomain: &Codomain) -> Option<(ExtReal, f64)> {
    use Codomain::*;
    let squared_range: (f64, Option<f64>, f64, f64) = match codomain {
        AllReals | NonNegReals | NonPosReals | Integers | Naturals => (0.0, None, 0.0, f64::NAN),
        NonzeroIntegers => (1.0, None, 1.0, f64::NAN),
        ClosedInterval(lo, hi) => {
            let (min_sq, min_at) = if *lo <= 0.0 && 0.0 <= *hi {
                (0.0, 0.0)
            } else if lo.abs() <= hi.abs() {
                (lo * lo, *lo)
            } else {
                (hi * hi, *hi)
            };
            let (max_sq, max_at) = if lo.abs() > hi.abs() {
                (lo * lo, *lo)
            } else {
                (hi * hi, *hi)
            };
            (min_sq, Some(max_sq), min_at, max_at)
        }
        TwoPoint(..) | FiniteSet(..) => {
            let values = codomain.enumerable_values().unwrap();
            let mut min_sq = f64::INFINITY;
            let mut min_at = 0.0;
            let mut max_sq = f64::NEG_INFINITY;
            let mut max_at = 0.0;
            for &v in &values {
                let s = v * v;
                if s < min_sq || (s == min_sq && v > min_at) {
                    min_sq = s;
                    min_at = v;
                }
                if s > max_sq || (s == max_sq && v > max_at) {
                    max_sq = s;
                    max_at = v;
                }
            }
            (min_sq, Some(max_sq), min_at, max_at)
        }
    };
    let (min_sq, max_sq, min_at, max_at) = squared_range;
    if c >= 0.0 {
        let at = if min_sq == 0.0 && matches!(codomain, AllReals | NonNegReals | NonPosReals | Integers | Naturals)
        {
            0.0
        } else if matches!(codomain, NonzeroIntegers) {
            1.0
        } else {
            min_at
        };
        Some((ExtReal::Finite(c * min_sq), at))
    } else {
        match max_sq {
            None => Some((ExtReal::NegInf, f64::NAN)),
            Some(m) => Some((ExtReal::Finite(c * m), max_at)),
        }
    }
}

/// The eta gap `sup { (1/2) sum_kl lambda_kl (z_k - z_l)^2 : z in E^n }`,
/// computed as `-gamma(L - D, E)` with `D = diag(row sums of L)`. The
/// attaining vector of the inner gamma gap is returned as certificate.
pub fn eta_gap(
    lambda: &SymmetricMatrix,
    codomain: &Codomain,
    tol: &Tolerances,
) -> Result<GapResult, GapError> {
    let shifted = eta_shift(lambda);
    let inner = gamma_gap(&shifted, codomain, tol)?;
    Ok(GapResult {
        value: inner.value.neg(),
        minimizer: inner.minimizer,
        method: inner.method,
        exact: inner.exact,
    })
}

/// `L - D` with `D = diag(row sums of L)`; the quadratic form of the result
/// is the negated half-increment form.
pub fn eta_shift(lambda: &SymmetricMatrix) -> SymmetricMatrix {
    let n = lambda.order();
    let row_sums: Vec<f64> = (0..n)
        .map(|k| (0..n).map(|l| lambda.entry(k, l)).sum())
        .collect();
    let shifted = lambda.as_matrix() - diagonal(&row_sums);
    SymmetricMatrix::new(shifted, crate::matrix::MatrixKind::Test)
        .expect("shifting the diagonal preserves symmetry")
}
