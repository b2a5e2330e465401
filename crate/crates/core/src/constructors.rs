//! Closed-form recipes that produce provably realizable covariances,
//! semivariograms and moments.
//!
//! The arcsine and arccosine recipes implement the constant-correlation
//! specializations of the underlying integral representations; families
//! with non-constant correlation are out of scope.

use crate::gap::{TensorArray, TensorError};
use crate::matrix::{MatrixKind, SymmetricMatrix};
use crate::tolerances::Tolerances;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConstructError {
    #[error("input must be a correlation matrix: {0}")]
    NotCorrelation(String),
    #[error("input must be positive semidefinite (min eigenvalue {0:.3e})")]
    NotPsd(f64),
    #[error("parameter {name} = {value} outside allowed range {range}")]
    BadParameter {
        name: &'static str,
        value: f64,
        range: String,
    },
    #[error("off-diagonal entry ({k},{l}) = {value} exceeds 1 in absolute value")]
    EntryOutOfRange { k: usize, l: usize, value: f64 },
    #[error("hafnian requires an even order, got {0}")]
    OddOrder(usize),
    #[error("budget: {0}")]
    Budget(String),
    #[error(transparent)]
    Matrix(#[from] crate::matrix::MatrixError),
    #[error(transparent)]
    Tensor(#[from] TensorError),
}

/// Which recipe to apply; serialized into CLI construction requests.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "recipe", rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Recipe {
    Arcsin { a: f64 },
    UnitDiagLift,
    IntegerBump { epsilon: f64 },
    Lognormal,
    GaussianMoment { q: usize },
    UnitVariogram,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConstructionSpec {
    #[serde(flatten)]
    pub recipe: Recipe,
}

fn require_correlation(c: &SymmetricMatrix, tol: &Tolerances) -> Result<(), ConstructError> {
    let n = c.order();
    for k in 0..n {
        if (c.entry(k, k) - 1.0).abs() > tol.psd_tol {
            return Err(ConstructError::NotCorrelation(format!(
                "diagonal entry ({k},{k}) = {} is not 1",
                c.entry(k, k)
            )));
        }
        for l in 0..n {
            if c.entry(k, l).abs() > 1.0 + 1e-12 {
                return Err(ConstructError::NotCorrelation(format!(
                    "entry ({k},{l}) = {} outside [-1,1]",
                    c.entry(k, l)
                )));
            }
        }
    }
    let min_eig = c.min_eigenvalue();
    if min_eig < -tol.psd_tol {
        return Err(ConstructError::NotPsd(min_eig));
    }
    Ok(())
}

/// Clamp floating drift just past the ends of [-1,1]; anything further out
/// was already rejected by validation.
fn clamp_unit(x: f64) -> f64 {
    x.clamp(-1.0, 1.0)
}

/// Entrywise `(2/pi) asin(a C)`: the non-centered covariance of a
/// `[-1,1]`-valued field built from a Gaussian field with correlation `C`.
/// At `a = 1` it is the covariance of the sign of the field; at `a = 1/2`,
/// of its `[-1,1]`-uniform transform.
pub fn arcsin_covariance(
    c: &SymmetricMatrix,
    a: f64,
    tol: &Tolerances,
) -> Result<SymmetricMatrix, ConstructError> {
    if !(0.0..=1.0).contains(&a) {
        return Err(ConstructError::BadParameter {
            name: "a",
            value: a,
            range: "[0,1]".into(),
        });
    }
    require_correlation(c, tol)?;
    let n = c.order();
    let out = SymmetricMatrix::from_fn_symmetric(n, MatrixKind::Covariance, |k, l| {
        2.0 / PI * clamp_unit(a * c.entry(k, l)).asin()
    })?;
    Ok(out)
}

/// Overwrites the diagonal with ones. Applied to the covariance of a
/// `[-1,1]`-valued field this yields the covariance of a `{-1,1}`-valued
/// one.
pub fn unit_diag_lift(r: &SymmetricMatrix) -> Result<SymmetricMatrix, ConstructError> {
    let n = r.order();
    for k in 0..n {
        for l in 0..n {
            if k != l && r.entry(k, l).abs() > 1.0 + 1e-12 {
                return Err(ConstructError::EntryOutOfRange {
                    k,
                    l,
                    value: r.entry(k, l),
                });
            }
        }
    }
    let out = SymmetricMatrix::from_fn_symmetric(n, MatrixKind::Covariance, |k, l| {
        if k == l {
            1.0
        } else {
            clamp_unit(r.entry(k, l))
        }
    })?;
    Ok(out)
}

/// `R + epsilon I`, a covariance realizable by a field of nonzero integers.
/// Requires `epsilon >= 1`, relaxed to `epsilon >= 2/3` when every diagonal
/// entry is at least 1/3.
pub fn integer_bump(
    r: &SymmetricMatrix,
    epsilon: f64,
    tol: &Tolerances,
) -> Result<SymmetricMatrix, ConstructError> {
    let min_eig = r.min_eigenvalue();
    if min_eig < -tol.psd_tol {
        return Err(ConstructError::NotPsd(min_eig));
    }
    let n = r.order();
    let min_diag = (0..n).map(|k| r.entry(k, k)).fold(f64::INFINITY, f64::min);
    let threshold = if min_diag >= 1.0 / 3.0 - 1e-12 {
        2.0 / 3.0
    } else {
        1.0
    };
    if epsilon + 1e-12 < threshold {
        return Err(ConstructError::BadParameter {
            name: "epsilon",
            value: epsilon,
            range: format!(">= {threshold} (diagonal minimum {min_diag})"),
        });
    }
    let out = SymmetricMatrix::from_fn_symmetric(n, MatrixKind::Covariance, |k, l| {
        r.entry(k, l) + if k == l { epsilon } else { 0.0 }
    })?;
    Ok(out)
}

/// Entrywise `exp(C)`: the non-centered covariance of the lognormal field
/// `exp(Z - C(x,x)/2)` driven by a Gaussian field with covariance `C`.
pub fn lognormal_cov(
    c: &SymmetricMatrix,
    tol: &Tolerances,
) -> Result<SymmetricMatrix, ConstructError> {
    let min_eig = c.min_eigenvalue();
    if min_eig < -tol.psd_tol {
        return Err(ConstructError::NotPsd(min_eig));
    }
    let n = c.order();
    let out = SymmetricMatrix::from_fn_symmetric(n, MatrixKind::Covariance, |k, l| {
        c.entry(k, l).exp()
    })?;
    Ok(out)
}

/// Entrywise `(2/pi) arccos(C)` with an exactly zero diagonal: the
/// semivariogram of the sign of a Gaussian field with correlation `C`
/// (thresholding at the median).
pub fn unit_variogram_from_gaussian(
    c: &SymmetricMatrix,
    tol: &Tolerances,
) -> Result<SymmetricMatrix, ConstructError> {
    require_correlation(c, tol)?;
    let n = c.order();
    let out = SymmetricMatrix::from_fn_symmetric(n, MatrixKind::Variogram, |k, l| {
        if k == l {
            0.0
        } else {
            2.0 / PI * clamp_unit(c.entry(k, l)).acos()
        }
    })?;
    Ok(out)
}

pub const HAFNIAN_MAX_ORDER: usize = 12;

/// Hafnian by recursive pairing: the sum over perfect matchings of the index
/// set of the products of matched entries; (q-1)!! terms.
pub fn hafnian(s: &SymmetricMatrix) -> Result<f64, ConstructError> {
    let q = s.order();
    if q % 2 != 0 {
        return Err(ConstructError::OddOrder(q));
    }
    if q > HAFNIAN_MAX_ORDER {
        return Err(ConstructError::Budget(format!(
            "hafnian order {q} exceeds {HAFNIAN_MAX_ORDER}"
        )));
    }
    let indices: Vec<usize> = (0..q).collect();
    Ok(hafnian_rec(s.as_matrix(), &indices))
}

fn hafnian_rec(m: &nalgebra::DMatrix<f64>, remaining: &[usize]) -> f64 {
    if remaining.is_empty() {
        return 1.0;
    }
    let first = remaining[0];
    let mut total = 0.0;
    for j in 1..remaining.len() {
        let partner = remaining[j];
        let rest: Vec<usize> = remaining[1..]
            .iter()
            .copied()
            .filter(|&k| k != partner)
            .collect();
        total += m[(first, partner)] * hafnian_rec(m, &rest);
    }
    total
}

pub const MOMENT_MAX_Q: usize = 8;
pub const MOMENT_MAX_N: usize = 8;

/// The q-th spatial moment of a zero-mean Gaussian field with covariance
/// `R`: entry `(k_1..k_q)` is the hafnian of the q x q minor of `R` at those
/// points. Symmetric under index permutations by construction.
pub fn gaussian_moment(
    q: usize,
    r: &SymmetricMatrix,
    tol: &Tolerances,
) -> Result<TensorArray, ConstructError> {
    if q < 2 || q % 2 != 0 || q > MOMENT_MAX_Q {
        return Err(ConstructError::BadParameter {
            name: "q",
            value: q as f64,
            range: format!("even, 2..={MOMENT_MAX_Q}"),
        });
    }
    let n = r.order();
    if n > MOMENT_MAX_N {
        return Err(ConstructError::Budget(format!(
            "moment tensor size {n}^{q} exceeds the {MOMENT_MAX_N}^{MOMENT_MAX_Q} budget"
        )));
    }
    let min_eig = r.min_eigenvalue();
    if min_eig < -tol.psd_tol {
        return Err(ConstructError::NotPsd(min_eig));
    }

    let total = n.pow(q as u32);
    let lead = n.pow((q - 1) as u32);
    let mut entries = vec![0.0; total];
    entries
        .par_chunks_mut(lead)
        .enumerate()
        .for_each(|(k1, chunk)| {
            let mut idx = vec![0usize; q];
            idx[0] = k1;
            for (offset, slot) in chunk.iter_mut().enumerate() {
                let mut rem = offset;
                for d in (1..q).rev() {
                    idx[d] = rem % n;
                    rem /= n;
                }
                *slot = hafnian_of_minor(r, &idx);
            }
        });
    Ok(TensorArray::new(q, n, entries)?)
}

fn hafnian_of_minor(r: &SymmetricMatrix, idx: &[usize]) -> f64 {
    let q = idx.len();
    let minor = nalgebra::DMatrix::from_fn(q, q, |a, b| r.entry(idx[a], idx[b]));
    let positions: Vec<usize> = (0..q).collect();
    hafnian_rec(&minor, &positions)
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::DMatrix;

    fn corr(rows: &[Vec<f64>]) -> SymmetricMatrix {
        SymmetricMatrix::from_rows(rows, MatrixKind::Covariance).unwrap()
    }

    #[test]
    fn arcsin_edge_values() {
        let tol = Tolerances::default();
        let c = corr(&[vec![1.0, 0.8], vec![0.8, 1.0]]);
        let zero = arcsin_covariance(&c, 0.0, &tol).unwrap();
        assert_eq!(zero.entry(0, 1), 0.0);
        let unit = arcsin_covariance(&c, 1.0, &tol).unwrap();
        assert!((unit.entry(0, 0) - 1.0).abs() < 1e-15);
        let half = arcsin_covariance(&c, 0.5, &tol).unwrap();
        assert!((half.entry(0, 1) - 2.0 / PI * 0.4f64.asin()).abs() < 1e-15);
        assert!((half.entry(0, 1) - 0.26197).abs() < 1e-5);
    }

    #[test]
    fn arcsin_rejects_bad_inputs() {
        let tol = Tolerances::default();
        let c = corr(&[vec![1.0, 0.8], vec![0.8, 1.0]]);
        assert!(arcsin_covariance(&c, 1.5, &tol).is_err());
        let not_corr =
            SymmetricMatrix::from_rows(&[vec![2.0, 0.0], vec![0.0, 2.0]], MatrixKind::Covariance)
                .unwrap();
        assert!(arcsin_covariance(&not_corr, 0.5, &tol).is_err());
    }

    #[test]
    fn lift_overwrites_diagonal_and_is_idempotent() {
        let r = corr(&[vec![0.5, 0.2], vec![0.2, 0.5]]);
        let lifted = unit_diag_lift(&r).unwrap();
        assert_eq!(lifted.entry(0, 0), 1.0);
        assert_eq!(lifted.entry(0, 1), 0.2);
        let again = unit_diag_lift(&lifted).unwrap();
        assert_eq!(again.as_matrix(), lifted.as_matrix());
    }

    #[test]
    fn bump_thresholds() {
        let tol = Tolerances::default();
        let zero = SymmetricMatrix::new(DMatrix::zeros(2, 2), MatrixKind::Covariance).unwrap();
        let bumped = integer_bump(&zero, 1.0, &tol).unwrap();
        assert_eq!(bumped.as_matrix(), &DMatrix::identity(2, 2));
        assert!(integer_bump(&zero, 0.9, &tol).is_err());

        let ones = corr(&[vec![1.0, 1.0], vec![1.0, 1.0]]);
        let bumped = integer_bump(&ones, 1.0, &tol).unwrap();
        assert_eq!(bumped.entry(0, 0), 2.0);
        assert_eq!(bumped.entry(0, 1), 1.0);
        // diagonal >= 1/3 relaxes the threshold to 2/3
        assert!(integer_bump(&ones, 0.7, &tol).is_ok());
        assert!(integer_bump(&ones, 0.6, &tol).is_err());
    }

    #[test]
    fn lognormal_values() {
        let tol = Tolerances::default();
        let zero = SymmetricMatrix::new(DMatrix::zeros(2, 2), MatrixKind::Covariance).unwrap();
        let out = lognormal_cov(&zero, &tol).unwrap();
        assert_eq!(out.entry(0, 0), 1.0);
        assert_eq!(out.entry(0, 1), 1.0);

        let diag = corr(&[vec![1.0, 0.0], vec![0.0, 1.0]]);
        let out = lognormal_cov(&diag, &tol).unwrap();
        assert!((out.entry(0, 0) - std::f64::consts::E).abs() < 1e-15);
        assert_eq!(out.entry(0, 1), 1.0);
        // positivity: every entry at least exp(-max|C|)
        for k in 0..2 {
            for l in 0..2 {
                assert!(out.entry(k, l) >= (-1.0f64).exp());
            }
        }
    }

    #[test]
    fn unit_variogram_values() {
        let tol = Tolerances::default();
        let c = corr(&[
            vec![1.0, 1.0, 0.0],
            vec![1.0, 1.0, 0.0],
            vec![0.0, 0.0, 1.0],
        ]);
        let g = unit_variogram_from_gaussian(&c, &tol).unwrap();
        assert_eq!(g.entry(0, 1), 0.0); // arccos(1) = 0
        assert_eq!(g.entry(0, 2), 1.0); // arccos(0) = pi/2
        assert_eq!(g.entry(0, 0), 0.0);

        let anti = corr(&[vec![1.0, -1.0], vec![-1.0, 1.0]]);
        let g = unit_variogram_from_gaussian(&anti, &tol).unwrap();
        assert!((g.entry(0, 1) - 2.0).abs() < 1e-15); // arccos(-1) = pi, range [0,2]
    }

    #[test]
    fn unit_process_identity_rho_equals_one_minus_g() {
        use rand::prelude::*;
        let tol = Tolerances::default();
        let mut rng = rand_chacha::ChaCha12Rng::seed_from_u64(53);
        for _ in 0..10 {
            let n = rng.random_range(2..=5usize);
            let w = DMatrix::from_fn(n, n + 2, |_, _| rng.random_range(-1.0..1.0));
            let gram = &w * w.transpose();
            let c = SymmetricMatrix::from_fn_symmetric(n, MatrixKind::Covariance, |k, l| {
                let denom: f64 = gram[(k, k)] * gram[(l, l)];
                gram[(k, l)] / denom.sqrt()
            })
            .unwrap();
            let rho = arcsin_covariance(&c, 1.0, &tol).unwrap();
            let g = unit_variogram_from_gaussian(&c, &tol).unwrap();
            for k in 0..n {
                for l in 0..n {
                    assert!((rho.entry(k, l) - (1.0 - g.entry(k, l))).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn hafnian_small_orders() {
        let m = SymmetricMatrix::from_rows(&[vec![3.0, 7.0], vec![7.0, 5.0]], MatrixKind::Test)
            .unwrap();
        assert_eq!(hafnian(&m).unwrap(), 7.0);

        // q = 4: r12 r34 + r13 r24 + r14 r23.
        let mut rows = vec![vec![0.0; 4]; 4];
        let vals = [
            ((0, 1), 2.0),
            ((0, 2), 3.0),
            ((0, 3), 5.0),
            ((1, 2), 7.0),
            ((1, 3), 11.0),
            ((2, 3), 13.0),
        ];
        for ((k, l), v) in vals {
            rows[k][l] = v;
            rows[l][k] = v;
        }
        let m = SymmetricMatrix::from_rows(&rows, MatrixKind::Test).unwrap();
        assert_eq!(hafnian(&m).unwrap(), 2.0 * 13.0 + 3.0 * 11.0 + 5.0 * 7.0);

        let ones =
            SymmetricMatrix::new(DMatrix::from_element(4, 4, 1.0), MatrixKind::Test).unwrap();
        assert_eq!(hafnian(&ones).unwrap(), 3.0);

        let odd = SymmetricMatrix::new(DMatrix::zeros(3, 3), MatrixKind::Test).unwrap();
        assert!(hafnian(&odd).is_err());
    }

    #[test]
    fn hafnian_block_multiplicativity() {
        use rand::prelude::*;
        let mut rng = rand_chacha::ChaCha12Rng::seed_from_u64(59);
        for _ in 0..20 {
            let a = 2 * rng.random_range(1..=2usize);
            let b = 2 * rng.random_range(1..=2usize);
            let n = a + b;
            let mut rows = vec![vec![0.0; n]; n];
            for k in 0..n {
                for l in k..n {
                    let same_block = (k < a) == (l < a);
                    if same_block {
                        let v = rng.random_range(-2.0..2.0);
                        rows[k][l] = v;
                        rows[l][k] = v;
                    }
                }
            }
            let full = SymmetricMatrix::from_rows(&rows, MatrixKind::Test).unwrap();
            let block_a =
                SymmetricMatrix::from_fn_symmetric(a, MatrixKind::Test, |k, l| rows[k][l])
                    .unwrap();
            let block_b =
                SymmetricMatrix::from_fn_symmetric(b, MatrixKind::Test, |k, l| rows[a + k][a + l])
                    .unwrap();
            let lhs = hafnian(&full).unwrap();
            let rhs = hafnian(&block_a).unwrap() * hafnian(&block_b).unwrap();
            assert!((lhs - rhs).abs() <= 1e-12 * rhs.abs().max(1.0));
        }
    }

    #[test]
    fn gaussian_moment_reduces_to_known_cases() {
        let tol = Tolerances::default();
        let r = corr(&[vec![1.0, 0.3], vec![0.3, 1.0]]);
        // q = 2 reproduces R itself.
        let t = gaussian_moment(2, &r, &tol).unwrap();
        for k in 0..2 {
            for l in 0..2 {
                assert_eq!(t.get(&[k, l]), r.entry(k, l));
            }
        }
        // q = 4 with all indices equal: 3 sigma^4.
        let t = gaussian_moment(4, &r, &tol).unwrap();
        assert_eq!(t.get(&[0, 0, 0, 0]), 3.0);
        assert!(t.is_permutation_symmetric(1e-12));
    }
}
