//! Validated real symmetric matrices with optional point labels.
//!
//! Every checker and gap routine in this crate consumes a [`SymmetricMatrix`].
//! Construction symmetrizes inputs that are asymmetric within tolerance and
//! rejects anything worse, so downstream code can rely on exact symmetry.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};
use std::fmt;
use std::path::Path;
use thiserror::Error;

/// What the matrix is supposed to represent.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum MatrixKind {
    /// Candidate non-centered covariance matrix.
    Covariance,
    /// Candidate semivariogram matrix; must have a zero diagonal.
    Variogram,
    /// Test matrix appearing on the left side of a gap inequality.
    Test,
    Generic,
}

impl fmt::Display for MatrixKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            MatrixKind::Covariance => "COVARIANCE",
            MatrixKind::Variogram => "VARIOGRAM",
            MatrixKind::Test => "TEST",
            MatrixKind::Generic => "GENERIC",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Error)]
pub enum MatrixError {
    #[error("matrix must be square and nonempty, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },
    #[error("entry ({row},{col}) is not finite")]
    NonFinite { row: usize, col: usize },
    #[error("ASYMMETRIC: max |a_kl - a_lk| = {max_dev:.3e} exceeds tolerance {tol:.3e}")]
    Asymmetric { max_dev: f64, tol: f64 },
    #[error("NONZERO_DIAGONAL: variogram entry ({index},{index}) = {value:.3e}")]
    NonzeroDiagonal { index: usize, value: f64 },
    #[error("label count {labels} does not match order {order}")]
    LabelMismatch { labels: usize, order: usize },
    #[error("parse error: {0}")]
    Parse(String),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

/// A validated real symmetric matrix of order `n` with optional labels for
/// the supporting points.
#[derive(Debug, Clone, PartialEq)]
pub struct SymmetricMatrix {
    kind: MatrixKind,
    mat: DMatrix<f64>,
    labels: Option<Vec<String>>,
}

/// JSON schema for matrix files: `{"labels": [...], "entries": [[...]]}`.
#[derive(Serialize, Deserialize)]
struct MatrixFile {
    #[serde(skip_serializing_if = "Option::is_none")]
    labels: Option<Vec<String>>,
    entries: Vec<Vec<f64>>,
}

impl SymmetricMatrix {
    /// Validates and symmetrizes a raw square array.
    ///
    /// Asymmetry within `sym_tol * max|entry|` is silently repaired by
    /// replacing the matrix with `(A + A^T) / 2`; anything beyond that is a
    /// hard error. `Variogram` inputs additionally require a zero diagonal
    /// within the same absolute tolerance.
    pub fn with_tolerance(
        raw: DMatrix<f64>,
        kind: MatrixKind,
        sym_tol: f64,
    ) -> Result<Self, MatrixError> {
        let (rows, cols) = raw.shape();
        if rows == 0 || rows != cols {
            return Err(MatrixError::NotSquare { rows, cols });
        }
        let mut max_abs: f64 = 0.0;
        for col in 0..cols {
            for row in 0..rows {
                let v = raw[(row, col)];
                if !v.is_finite() {
                    return Err(MatrixError::NonFinite { row, col });
                }
                max_abs = max_abs.max(v.abs());
            }
        }
        let tol = sym_tol * max_abs.max(1.0);
        let mut max_dev: f64 = 0.0;
        for k in 0..rows {
            for l in (k + 1)..rows {
                max_dev = max_dev.max((raw[(k, l)] - raw[(l, k)]).abs());
            }
        }
        if max_dev > tol {
            return Err(MatrixError::Asymmetric { max_dev, tol });
        }
        let mat = (&raw + raw.transpose()) * 0.5;
        if kind == MatrixKind::Variogram {
            for k in 0..rows {
                let v = mat[(k, k)];
                if v.abs() > tol {
                    return Err(MatrixError::NonzeroDiagonal { index: k, value: v });
                }
            }
        }
        Ok(Self {
            kind,
            mat,
            labels: None,
        })
    }

    /// Validates with the default symmetry tolerance of `1e-12 * max|entry|`.
    pub fn new(raw: DMatrix<f64>, kind: MatrixKind) -> Result<Self, MatrixError> {
        Self::with_tolerance(raw, kind, 1e-12)
    }

    pub fn from_rows(rows: &[Vec<f64>], kind: MatrixKind) -> Result<Self, MatrixError> {
        let n = rows.len();
        if n == 0 || rows.iter().any(|r| r.len() != n) {
            return Err(MatrixError::NotSquare {
                rows: n,
                cols: rows.first().map_or(0, |r| r.len()),
            });
        }
        let mat = DMatrix::from_fn(n, n, |k, l| rows[k][l]);
        Self::new(mat, kind)
    }

    /// Builds a matrix that is symmetric by construction (no tolerance
    /// check); `f` is only consulted for the upper triangle.
    pub fn from_fn_symmetric<F: FnMut(usize, usize) -> f64>(
        n: usize,
        kind: MatrixKind,
        mut f: F,
    ) -> Result<Self, MatrixError> {
        let mut mat = DMatrix::zeros(n, n);
        for k in 0..n {
            for l in k..n {
                let v = f(k, l);
                mat[(k, l)] = v;
                mat[(l, k)] = v;
            }
        }
        Self::new(mat, kind)
    }

    pub fn order(&self) -> usize {
        self.mat.nrows()
    }

    pub fn kind(&self) -> MatrixKind {
        self.kind
    }

    pub fn entry(&self, k: usize, l: usize) -> f64 {
        self.mat[(k, l)]
    }

    pub fn as_matrix(&self) -> &DMatrix<f64> {
        &self.mat
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    pub fn set_labels(&mut self, labels: Vec<String>) -> Result<(), MatrixError> {
        if labels.len() != self.order() {
            return Err(MatrixError::LabelMismatch {
                labels: labels.len(),
                order: self.order(),
            });
        }
        self.labels = Some(labels);
        Ok(())
    }

    /// Reinterprets the same entries under a different kind (re-validating).
    pub fn rekind(&self, kind: MatrixKind) -> Result<Self, MatrixError> {
        let mut m = Self::new(self.mat.clone(), kind)?;
        if let Some(labels) = &self.labels {
            m.set_labels(labels.clone())?;
        }
        Ok(m)
    }

    pub fn max_abs(&self) -> f64 {
        self.mat.iter().fold(0.0f64, |a, v| a.max(v.abs()))
    }

    /// Trace inner product `<A, B> = sum_kl a_kl b_kl`.
    pub fn inner(&self, other: &DMatrix<f64>) -> f64 {
        frobenius_inner(&self.mat, other)
    }

    /// Quadratic form `z A z^T` for a row vector `z`.
    pub fn quadratic_form(&self, z: &[f64]) -> f64 {
        quadratic_form(&self.mat, z)
    }

    /// Real eigenvalues in ascending order.
    ///
    /// Backed by a symmetric eigendecomposition; the reconstruction residual
    /// `||V D V^T - S||` stays below `1e-10 * ||S||` for validated inputs.
    pub fn eigen_spectrum(&self) -> Vec<f64> {
        let eig = self.mat.clone().symmetric_eigen();
        let mut vals: Vec<f64> = eig.eigenvalues.iter().copied().collect();
        vals.sort_by(|a, b| a.partial_cmp(b).unwrap());
        vals
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigen_spectrum()[0]
    }

    /// Smallest eigenvalue together with a corresponding unit eigenvector.
    pub fn min_eigenpair(&self) -> (f64, Vec<f64>) {
        let eig = self.mat.clone().symmetric_eigen();
        let mut idx = 0;
        for (i, v) in eig.eigenvalues.iter().enumerate() {
            if *v < eig.eigenvalues[idx] {
                idx = i;
            }
        }
        let vec: Vec<f64> = eig.eigenvectors.column(idx).iter().copied().collect();
        (eig.eigenvalues[idx], vec)
    }

    // ---- file formats -----------------------------------------------------

    /// Parses the JSON form `{"labels": [...], "entries": [[...]]}`.
    pub fn from_json_str(s: &str, kind: MatrixKind) -> Result<Self, MatrixError> {
        let file: MatrixFile =
            serde_json::from_str(s).map_err(|e| MatrixError::Parse(e.to_string()))?;
        let mut m = Self::from_rows(&file.entries, kind)?;
        if let Some(labels) = file.labels {
            m.set_labels(labels)?;
        }
        Ok(m)
    }

    pub fn to_json_string(&self) -> String {
        let file = MatrixFile {
            labels: self.labels.clone(),
            entries: self.to_rows(),
        };
        serde_json::to_string_pretty(&file).expect("matrix serialization cannot fail")
    }

    /// Parses a plain `n x n` comma-separated numeric grid.
    pub fn from_csv_str(s: &str, kind: MatrixKind) -> Result<Self, MatrixError> {
        let mut rows: Vec<Vec<f64>> = Vec::new();
        for (lineno, line) in s.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let row: Result<Vec<f64>, _> = line
                .split(',')
                .map(|tok| tok.trim().parse::<f64>())
                .collect();
            let row = row.map_err(|e| {
                MatrixError::Parse(format!("line {}: {}", lineno + 1, e))
            })?;
            rows.push(row);
        }
        Self::from_rows(&rows, kind)
    }

    /// Renders as CSV. Rust's float formatting emits the shortest string that
    /// round-trips, so write/read is bit-exact.
    pub fn to_csv_string(&self) -> String {
        let n = self.order();
        let mut out = String::new();
        for k in 0..n {
            let row: Vec<String> = (0..n).map(|l| format!("{}", self.mat[(k, l)])).collect();
            out.push_str(&row.join(","));
            out.push('\n');
        }
        out
    }

    /// Loads from a path, dispatching on the `.json` / `.csv` extension.
    pub fn read_path(path: &Path, kind: MatrixKind) -> Result<Self, MatrixError> {
        let text = std::fs::read_to_string(path)?;
        match path.extension().and_then(|e| e.to_str()) {
            Some("json") => Self::from_json_str(&text, kind),
            Some("csv") => Self::from_csv_str(&text, kind),
            other => Err(MatrixError::Parse(format!(
                "unsupported matrix file extension {:?} (want .json or .csv)",
                other
            ))),
        }
    }

    pub fn write_path(&self, path: &Path) -> Result<(), MatrixError> {
        let text = match path.extension().and_then(|e| e.to_str()) {
            Some("csv") => self.to_csv_string(),
            _ => self.to_json_string(),
        };
        std::fs::write(path, text)?;
        Ok(())
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        let n = self.order();
        (0..n)
            .map(|k| (0..n).map(|l| self.mat[(k, l)]).collect())
            .collect()
    }
}

/// Trace inner product of two equally sized matrices.
pub fn frobenius_inner(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| x * y).sum()
}

/// Quadratic form `z A z^T` for a row vector `z`.
pub fn quadratic_form(a: &DMatrix<f64>, z: &[f64]) -> f64 {
    let n = a.nrows();
    debug_assert_eq!(z.len(), n);
    let mut total = 0.0;
    for k in 0..n {
        let mut row = 0.0;
        for l in 0..n {
            row += a[(k, l)] * z[l];
        }
        total += z[k] * row;
    }
    total
}

/// Outer product `v^T v` as a dense matrix.
pub fn rank_one(v: &[f64]) -> DMatrix<f64> {
    let n = v.len();
    DMatrix::from_fn(n, n, |k, l| v[k] * v[l])
}

/// `n x n` matrix with ones at (k,l) and (l,k), zero elsewhere (k != l).
pub fn elementary_symmetric(n: usize, k: usize, l: usize) -> DMatrix<f64> {
    let mut m = DMatrix::zeros(n, n);
    m[(k, l)] = 1.0;
    m[(l, k)] = 1.0;
    m
}

/// Diagonal matrix from a vector.
pub fn diagonal(values: &[f64]) -> DMatrix<f64> {
    DMatrix::from_diagonal(&DVector::from_row_slice(values))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn accepts_exactly_symmetric() {
        let m = SymmetricMatrix::from_rows(
            &[vec![1.0, 0.5], vec![0.5, 1.0]],
            MatrixKind::Covariance,
        )
        .unwrap();
        assert_eq!(m.order(), 2);
        assert_eq!(m.entry(0, 1), 0.5);
    }

    #[test]
    fn rejects_asymmetric() {
        let err = SymmetricMatrix::from_rows(&[vec![0.0, 1.0], vec![2.0, 0.0]], MatrixKind::Test)
            .unwrap_err();
        assert!(matches!(err, MatrixError::Asymmetric { .. }));
    }

    #[test]
    fn rejects_variogram_with_nonzero_diagonal() {
        let err = SymmetricMatrix::from_rows(
            &[vec![0.1, 1.0], vec![1.0, 0.0]],
            MatrixKind::Variogram,
        )
        .unwrap_err();
        assert!(matches!(err, MatrixError::NonzeroDiagonal { index: 0, .. }));
    }

    #[test]
    fn symmetrizes_within_tolerance() {
        let raw = DMatrix::from_row_slice(2, 2, &[1.0, 0.5 + 1e-14, 0.5, 1.0]);
        let m = SymmetricMatrix::new(raw, MatrixKind::Generic).unwrap();
        assert_eq!(m.entry(0, 1), m.entry(1, 0));
    }

    #[test]
    fn validation_is_idempotent() {
        let m = SymmetricMatrix::from_rows(
            &[vec![2.0, -1.0], vec![-1.0, 3.0]],
            MatrixKind::Covariance,
        )
        .unwrap();
        let again = SymmetricMatrix::new(m.as_matrix().clone(), MatrixKind::Covariance).unwrap();
        assert_eq!(m.as_matrix(), again.as_matrix());
    }

    #[test]
    fn known_spectra() {
        let diag = SymmetricMatrix::from_rows(&[vec![2.0, 0.0], vec![0.0, 3.0]], MatrixKind::Test)
            .unwrap();
        let s = diag.eigen_spectrum();
        assert!((s[0] - 2.0).abs() < 1e-12 && (s[1] - 3.0).abs() < 1e-12);

        let offdiag =
            SymmetricMatrix::from_rows(&[vec![0.0, 1.0], vec![1.0, 0.0]], MatrixKind::Test)
                .unwrap();
        let s = offdiag.eigen_spectrum();
        assert!((s[0] + 1.0).abs() < 1e-12 && (s[1] - 1.0).abs() < 1e-12);

        let rank1 = SymmetricMatrix::from_rows(&[vec![1.0, 1.0], vec![1.0, 1.0]], MatrixKind::Test)
            .unwrap();
        let s = rank1.eigen_spectrum();
        assert!(s[0].abs() < 1e-12 && (s[1] - 2.0).abs() < 1e-12);
    }

    #[test]
    fn spectrum_invariant_under_permutation() {
        use rand::prelude::*;
        let mut rng = rand_chacha::ChaCha12Rng::seed_from_u64(7);
        for _ in 0..20 {
            let n = 5;
            let raw = DMatrix::from_fn(n, n, |_, _| rng.random_range(-2.0..2.0));
            let m = SymmetricMatrix::new((&raw + raw.transpose()) * 0.5, MatrixKind::Test).unwrap();
            let mut perm: Vec<usize> = (0..n).collect();
            perm.shuffle(&mut rng);
            let permuted = DMatrix::from_fn(n, n, |k, l| m.entry(perm[k], perm[l]));
            let p = SymmetricMatrix::new(permuted, MatrixKind::Test).unwrap();
            let (a, b) = (m.eigen_spectrum(), p.eigen_spectrum());
            for (x, y) in a.iter().zip(b.iter()) {
                assert!((x - y).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn json_round_trip_is_bit_exact() {
        let m = SymmetricMatrix::from_rows(
            &[
                vec![1.0, 0.123456789012345678],
                vec![0.123456789012345678, 2.0 / 3.0],
            ],
            MatrixKind::Covariance,
        )
        .unwrap();
        let back = SymmetricMatrix::from_json_str(&m.to_json_string(), MatrixKind::Covariance)
            .unwrap();
        assert_eq!(m.as_matrix(), back.as_matrix());
    }

    #[test]
    fn csv_round_trip_is_bit_exact() {
        let m = SymmetricMatrix::from_rows(
            &[vec![1.0, -1.0 / 3.0], vec![-1.0 / 3.0, 5e-17]],
            MatrixKind::Generic,
        )
        .unwrap();
        let back = SymmetricMatrix::from_csv_str(&m.to_csv_string(), MatrixKind::Generic).unwrap();
        assert_eq!(m.as_matrix(), back.as_matrix());
    }
}
