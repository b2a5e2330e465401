//! Exact integer-vector minimization of positive definite quadratic forms.
//!
//! Enumeration follows the Fincke-Pohst scheme: a Cholesky factor turns the
//! form into a sum of squares, which yields per-level interval bounds on the
//! integer coordinates. The search radius is the form value at the all-ones
//! vector, and the declared candidate budget is the axis-aligned box
//! `||z||^2 <= B0 / lambda_min` implied by that radius.

use super::enumerate::{better, EnumBest};
use super::{GapError, GapMethod, GapResult, IntegerGapReading};
use crate::matrix::{quadratic_form, SymmetricMatrix};
use crate::tolerances::Tolerances;
use crate::ExtReal;
use nalgebra::DMatrix;

pub const LATTICE_MAX_N: usize = 12;
pub const LATTICE_BOX_BUDGET: u128 = 100_000_000;

/// Exact gap over integer vectors excluding zero.
///
/// `LatticeNonzero` excludes only the zero vector; `ComponentwiseNonzero`
/// excludes every vector with a zero coordinate, which is the literal reading
/// of the codomain power `(Z \ {0})^n`.
pub fn gamma_gap_integer(
    lambda: &SymmetricMatrix,
    reading: IntegerGapReading,
    tol: &Tolerances,
) -> Result<GapResult, GapError> {
    let n = lambda.order();
    if n > LATTICE_MAX_N {
        return Err(GapError::BudgetExceeded {
            what: "integer enumeration dimension",
            needed: n as u128,
            budget: LATTICE_MAX_N as u128,
        });
    }
    let min_eig = lambda.min_eigenvalue();
    if min_eig < -tol.psd_tol {
        // A negative eigenvalue sends the form to -infinity along a scaled
        // rational direction with nonzero coordinates.
        return Ok(GapResult {
            value: ExtReal::NegInf,
            minimizer: None,
            method: GapMethod::Analytic,
            exact: true,
        });
    }
    if min_eig <= tol.psd_tol {
        return Err(GapError::NotPositiveDefinite { min_eig });
    }

    let ones = vec![1.0; n];
    let radius = lambda.quadratic_form(&ones);
    let box_half = (radius / min_eig).sqrt().floor() as u128;
    let candidates = (2 * box_half + 1).checked_pow(n as u32).unwrap_or(u128::MAX);
    if candidates > LATTICE_BOX_BUDGET {
        return Err(GapError::BudgetExceeded {
            what: "integer enumeration box",
            needed: candidates,
            budget: LATTICE_BOX_BUDGET,
        });
    }

    // Cholesky L with A = L L^T; the form is ||L^T x||^2 = sum_i (U x)_i^2
    // with U = L^T upper triangular.
    let chol = lambda
        .as_matrix()
        .clone()
        .cholesky()
        .ok_or(GapError::NotPositiveDefinite { min_eig })?;
    let u = chol.l().transpose();

    let slack = 1e-9f64.max(radius.abs() * 1e-12);
    let mut search = Search {
        lambda: lambda.as_matrix(),
        u: &u,
        n,
        reading,
        bound: radius + slack,
        box_half: box_half as i64,
        x: vec![0i64; n],
        best: None,
    };
    // Seed with the all-ones vector so the radius is always attained.
    search.offer(&ones);
    search.descend(n, 0.0);

    let best = search.best.expect("all-ones candidate is always feasible");
    Ok(GapResult {
        value: ExtReal::Finite(best.value),
        minimizer: Some(best.z),
        method: GapMethod::LatticeEnum,
        exact: true,
    })
}

struct Search<'a> {
    lambda: &'a DMatrix<f64>,
    u: &'a DMatrix<f64>,
    n: usize,
    reading: IntegerGapReading,
    bound: f64,
    box_half: i64,
    x: Vec<i64>,
    best: Option<EnumBest>,
}

impl<'a> Search<'a> {
    fn offer(&mut self, z: &[f64]) {
        // Exact form evaluation at the candidate; the accumulated sum of
        // squares is only used for pruning.
        let value = quadratic_form(self.lambda, z);
        let cand = EnumBest {
            value,
            z: z.to_vec(),
        };
        if self.best.as_ref().map_or(true, |b| better(&cand, b)) {
            self.best = Some(cand);
        }
    }

    /// Levels are processed bottom-up: `level` is the index of the next
    /// coordinate to fix, starting at n and moving toward 1.
    fn descend(&mut self, level: usize, acc: f64) {
        if level == 0 {
            match self.reading {
                IntegerGapReading::LatticeNonzero => {
                    if self.x.iter().all(|&v| v == 0) {
                        return;
                    }
                }
                IntegerGapReading::ComponentwiseNonzero => {}
            }
            let z: Vec<f64> = self.x.iter().map(|&v| v as f64).collect();
            self.offer(&z);
            return;
        }
        let i = level - 1;
        let mut center = 0.0;
        for j in level..self.n {
            center += self.u[(i, j)] * self.x[j] as f64;
        }
        let remaining = self.bound - acc;
        if remaining < 0.0 {
            return;
        }
        let width = remaining.sqrt();
        let uii = self.u[(i, i)];
        let lo = (((-width - center) / uii).ceil() as i64).max(-self.box_half);
        let hi = ((width - center) / uii).floor() as i64;
        let hi = hi.min(self.box_half);
        for v in lo..=hi {
            if v == 0 && matches!(self.reading, IntegerGapReading::ComponentwiseNonzero) {
                continue;
            }
            let term = uii * v as f64 + center;
            let next = acc + term * term;
            if next > self.bound {
                continue;
            }
            self.x[i] = v;
            self.descend(level - 1, next);
        }
        self.x[i] = 0;
    }
}

/// Hermite-constant bound `gamma_n * det^(1/n)`.
#[derive(Debug, Clone, Copy)]
pub struct HermiteBound {
    pub value: f64,
    /// True when the constant comes from the exactly known table
    /// (n in 1..=8 or 24); otherwise an upper bound is used.
    pub exact: bool,
}

/// Known Hermite constants for ranks 1..=8 and 24; other ranks fall back to
/// the upper bound `(2/pi) * Gamma(2 + n/2)^(2/n)`.
pub fn hermite_bound(n: usize, det: f64) -> HermiteBound {
    assert!(n >= 1, "rank must be at least 1");
    let table = |v: f64| Some(v);
    let constant = match n {
        1 => table(1.0),
        2 => table((4.0f64 / 3.0).sqrt()),
        3 => table(2.0f64.powf(1.0 / 3.0)),
        4 => table(2.0f64.sqrt()),
        5 => table(8.0f64.powf(1.0 / 5.0)),
        6 => table((64.0f64 / 3.0).powf(1.0 / 6.0)),
        7 => table(64.0f64.powf(1.0 / 7.0)),
        8 => table(2.0),
        24 => table(4.0),
        _ => None,
    };
    match constant {
        Some(c) => HermiteBound {
            value: c * det.powf(1.0 / n as f64),
            exact: true,
        },
        None => {
            let gamma_n = 2.0 / std::f64::consts::PI
                * (2.0 / n as f64 * ln_gamma_half_integer(n + 4)).exp();
            HermiteBound {
                value: gamma_n * det.powf(1.0 / n as f64),
                exact: false,
            }
        }
    }
}

/// `ln Gamma(m/2)` for a positive integer `m`, by the recurrence from
/// Gamma(1/2) = sqrt(pi) and Gamma(1) = 1.
fn ln_gamma_half_integer(twice_arg: usize) -> f64 {
    let mut acc: f64 = if twice_arg % 2 == 0 {
        0.0 // ln Gamma(1)
    } else {
        0.5 * std::f64::consts::PI.ln() // ln Gamma(1/2)
    };
    let mut m = if twice_arg % 2 == 0 { 2 } else { 1 };
    while m + 2 <= twice_arg {
        acc += (m as f64 / 2.0).ln();
        m += 2;
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::MatrixKind;

    fn sym(rows: &[Vec<f64>]) -> SymmetricMatrix {
        SymmetricMatrix::from_rows(rows, MatrixKind::Test).unwrap()
    }

    /// Brute-force oracle over the declared box.
    fn brute(lambda: &SymmetricMatrix, reading: IntegerGapReading) -> f64 {
        let n = lambda.order();
        let ones = vec![1.0; n];
        let b0 = lambda.quadratic_form(&ones);
        let m = (b0 / lambda.min_eigenvalue()).sqrt().floor() as i64;
        let mut best = f64::INFINITY;
        let width = (2 * m + 1) as usize;
        for code in 0..width.pow(n as u32) {
            let mut c = code;
            let mut z = vec![0.0; n];
            for slot in z.iter_mut() {
                *slot = (c % width) as i64 as f64 - m as f64;
                c /= width;
            }
            let excluded = match reading {
                IntegerGapReading::LatticeNonzero => z.iter().all(|&v| v == 0.0),
                IntegerGapReading::ComponentwiseNonzero => z.iter().any(|&v| v == 0.0),
            };
            if excluded {
                continue;
            }
            let val = lambda.quadratic_form(&z);
            if val <= b0 {
                best = best.min(val);
            }
        }
        best.min(b0)
    }

    #[test]
    fn diagonal_examples() {
        let lam = sym(&[vec![2.0, 0.0], vec![0.0, 3.0]]);
        let tol = Tolerances::default();
        let r = gamma_gap_integer(&lam, IntegerGapReading::LatticeNonzero, &tol).unwrap();
        assert_eq!(r.value, ExtReal::Finite(2.0));
        assert_eq!(r.minimizer.unwrap(), vec![1.0, 0.0]);

        let r = gamma_gap_integer(&lam, IntegerGapReading::ComponentwiseNonzero, &tol).unwrap();
        assert_eq!(r.value, ExtReal::Finite(5.0));
        assert_eq!(r.minimizer.unwrap(), vec![1.0, 1.0]);
    }

    #[test]
    fn hexagonal_gram_attains_hermite_bound() {
        let lam = sym(&[vec![2.0, 1.0], vec![1.0, 2.0]]);
        let tol = Tolerances::default();
        let r = gamma_gap_integer(&lam, IntegerGapReading::LatticeNonzero, &tol).unwrap();
        assert_eq!(r.value, ExtReal::Finite(2.0));
        let det = 3.0;
        let bound = hermite_bound(2, det);
        assert!(bound.exact);
        assert!((bound.value - 2.0).abs() < 1e-12);
    }

    #[test]
    fn negative_eigenvalue_is_minus_infinity() {
        let lam = sym(&[vec![1.0, 0.0], vec![0.0, -1.0]]);
        let tol = Tolerances::default();
        let r = gamma_gap_integer(&lam, IntegerGapReading::LatticeNonzero, &tol).unwrap();
        assert_eq!(r.value, ExtReal::NegInf);
        assert!(r.exact);
    }

    #[test]
    fn matches_box_oracle_on_random_pd() {
        use rand::prelude::*;
        let mut rng = rand_chacha::ChaCha12Rng::seed_from_u64(5);
        let tol = Tolerances::default();
        for _ in 0..30 {
            let n = rng.random_range(2..=4usize);
            let w = DMatrix::from_fn(n, n, |_, _| rng.random_range(-2i64..=2) as f64);
            let mat = &w * w.transpose() + DMatrix::identity(n, n) * (n as f64);
            let lam = SymmetricMatrix::new(mat, MatrixKind::Test).unwrap();
            for reading in [
                IntegerGapReading::LatticeNonzero,
                IntegerGapReading::ComponentwiseNonzero,
            ] {
                let fast = gamma_gap_integer(&lam, reading, &tol).unwrap();
                let slow = brute(&lam, reading);
                assert_eq!(fast.value, ExtReal::Finite(slow));
            }
        }
    }

    #[test]
    fn hermite_table_values() {
        assert!((hermite_bound(2, 1.0).value - (4.0f64 / 3.0).sqrt()).abs() < 1e-12);
        assert_eq!(hermite_bound(1, 5.0).value, 5.0);
        assert_eq!(hermite_bound(8, 1.0).value, 2.0);
        assert!(hermite_bound(8, 1.0).exact);
        // Non-tabulated ranks use the upper bound and are flagged inexact.
        let b = hermite_bound(9, 1.0);
        assert!(!b.exact);
        // gamma_9 is known to lie in (2, 2.131); the upper bound must exceed it.
        assert!(b.value > 2.0 && b.value < 4.0);
    }
}
