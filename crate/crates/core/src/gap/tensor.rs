//! Multilinear-form gaps of q-dimensional arrays over finite codomains.

use super::enumerate::{better, EnumBest};
use super::{GapError, GapMethod, GapResult};
use crate::codomain::Codomain;
use crate::matrix::SymmetricMatrix;
use crate::ExtReal;
use thiserror::Error;

pub const TENSOR_ENUM_BUDGET: u128 = 1 << 20;
/// Guard on total contraction work `|E|^n * n^q`.
const TENSOR_WORK_BUDGET: u128 = 1 << 34;

#[derive(Debug, Error)]
pub enum TensorError {
    #[error("tensor order q must be at least 2, got {0}")]
    OrderTooSmall(usize),
    #[error("tensor size n must be at least 1, got {0}")]
    SizeTooSmall(usize),
    #[error("entry count {got} does not equal n^q = {want}")]
    WrongLength { got: usize, want: usize },
    #[error("entry at flat index {0} is not finite")]
    NonFinite(usize),
}

/// Dense real array with `q` axes of length `n`, stored row-major (the first
/// index varies slowest).
#[derive(Debug, Clone, PartialEq)]
pub struct TensorArray {
    q: usize,
    n: usize,
    entries: Vec<f64>,
}

impl TensorArray {
    pub fn new(q: usize, n: usize, entries: Vec<f64>) -> Result<Self, TensorError> {
        if q < 2 {
            return Err(TensorError::OrderTooSmall(q));
        }
        if n < 1 {
            return Err(TensorError::SizeTooSmall(n));
        }
        let want = n.checked_pow(q as u32).ok_or(TensorError::WrongLength {
            got: entries.len(),
            want: usize::MAX,
        })?;
        if entries.len() != want {
            return Err(TensorError::WrongLength {
                got: entries.len(),
                want,
            });
        }
        if let Some(bad) = entries.iter().position(|v| !v.is_finite()) {
            return Err(TensorError::NonFinite(bad));
        }
        Ok(Self { q, n, entries })
    }

    pub fn from_fn<F: Fn(&[usize]) -> f64>(q: usize, n: usize, f: F) -> Result<Self, TensorError> {
        if q < 2 {
            return Err(TensorError::OrderTooSmall(q));
        }
        if n < 1 {
            return Err(TensorError::SizeTooSmall(n));
        }
        let total = n.pow(q as u32);
        let mut idx = vec![0usize; q];
        let mut entries = Vec::with_capacity(total);
        for _ in 0..total {
            entries.push(f(&idx));
            for d in (0..q).rev() {
                idx[d] += 1;
                if idx[d] < n {
                    break;
                }
                idx[d] = 0;
            }
        }
        Self::new(q, n, entries)
    }

    /// Embeds a symmetric matrix as an order-2 tensor.
    pub fn from_matrix(m: &SymmetricMatrix) -> Self {
        let n = m.order();
        let mut entries = Vec::with_capacity(n * n);
        for k in 0..n {
            for l in 0..n {
                entries.push(m.entry(k, l));
            }
        }
        Self { q: 2, n, entries }
    }

    pub fn order(&self) -> usize {
        self.q
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    pub fn flat_index(&self, idx: &[usize]) -> usize {
        debug_assert_eq!(idx.len(), self.q);
        idx.iter().fold(0, |acc, &k| acc * self.n + k)
    }

    pub fn get(&self, idx: &[usize]) -> f64 {
        self.entries[self.flat_index(idx)]
    }

    /// Whether every entry is invariant under permutations of its index
    /// tuple: checked by comparing against the sorted-index representative.
    pub fn is_permutation_symmetric(&self, tol: f64) -> bool {
        let scale = self
            .entries
            .iter()
            .fold(0.0f64, |a, v| a.max(v.abs()))
            .max(1.0);
        let mut idx = vec![0usize; self.q];
        for flat in 0..self.entries.len() {
            let mut sorted = idx.clone();
            sorted.sort_unstable();
            let rep = self.flat_index(&sorted);
            if (self.entries[flat] - self.entries[rep]).abs() > tol * scale {
                return false;
            }
            for d in (0..self.q).rev() {
                idx[d] += 1;
                if idx[d] < self.n {
                    break;
                }
                idx[d] = 0;
            }
        }
        true
    }

    /// Multilinear form `sum lambda[k1..kq] z[k1] ... z[kq]` evaluated by
    /// repeated contraction over the last axis.
    pub fn multilinear_form(&self, z: &[f64]) -> f64 {
        debug_assert_eq!(z.len(), self.n);
        let mut current: Vec<f64> = self.entries.clone();
        while current.len() > 1 {
            let next: Vec<f64> = current
                .chunks(self.n)
                .map(|chunk| chunk.iter().zip(z).map(|(a, b)| a * b).sum())
                .collect();
            current = next;
        }
        current[0]
    }
}

/// Exact gap of a multilinear form over a finite codomain.
pub fn gamma_gap_tensor(
    tensor: &TensorArray,
    codomain: &Codomain,
) -> Result<GapResult, GapError> {
    let values = codomain
        .enumerable_values()
        .ok_or_else(|| GapError::UnsupportedCombination {
            what: format!(
                "tensor gaps require a finite codomain, got {}",
                codomain.render()
            ),
        })?;
    let n = tensor.size();
    let q = tensor.order();
    let count = (values.len() as u128)
        .checked_pow(n as u32)
        .unwrap_or(u128::MAX);
    if count > TENSOR_ENUM_BUDGET {
        return Err(GapError::BudgetExceeded {
            what: "tensor enumeration",
            needed: count,
            budget: TENSOR_ENUM_BUDGET,
        });
    }
    let work = count.saturating_mul((n as u128).saturating_pow(q as u32));
    if work > TENSOR_WORK_BUDGET {
        return Err(GapError::BudgetExceeded {
            what: "tensor contraction work",
            needed: work,
            budget: TENSOR_WORK_BUDGET,
        });
    }

    let mut best: Option<EnumBest> = None;
    let mut z = vec![values[0]; n];
    let mut digits = vec![0usize; n];
    loop {
        let value = tensor.multilinear_form(&z);
        let cand = EnumBest {
            value,
            z: z.clone(),
        };
        if best.as_ref().map_or(true, |b| better(&cand, b)) {
            best = Some(cand);
        }
        let mut d = n;
        loop {
            if d == 0 {
                break;
            }
            d -= 1;
            digits[d] += 1;
            if digits[d] < values.len() {
                z[d] = values[digits[d]];
                break;
            }
            digits[d] = 0;
            z[d] = values[0];
            if d == 0 {
                d = usize::MAX;
                break;
            }
        }
        if d == usize::MAX {
            break;
        }
    }
    let best = best.expect("nonempty enumeration");
    Ok(GapResult {
        value: ExtReal::Finite(best.value),
        minimizer: Some(best.z),
        method: GapMethod::Enumeration,
        exact: true,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::MatrixKind;
    use crate::tolerances::Tolerances;

    #[test]
    fn order_two_matches_matrix_gap() {
        use rand::prelude::*;
        let mut rng = rand_chacha::ChaCha12Rng::seed_from_u64(23);
        let tol = Tolerances::default();
        for _ in 0..20 {
            let n = rng.random_range(1..=4usize);
            let mut rows = vec![vec![0.0; n]; n];
            for k in 0..n {
                for l in k..n {
                    let v = rng.random_range(-3i64..=3) as f64;
                    rows[k][l] = v;
                    rows[l][k] = v;
                }
            }
            let m = SymmetricMatrix::from_rows(&rows, MatrixKind::Test).unwrap();
            let t = TensorArray::from_matrix(&m);
            let e = Codomain::TwoPoint(-1.0, 1.0);
            let a = gamma_gap_tensor(&t, &e).unwrap();
            let b = super::super::gamma_gap(&m, &e, &tol).unwrap();
            assert_eq!(a.value, b.value);
        }
    }

    #[test]
    fn cubic_all_ones_tensor() {
        // Form is (z1 + z2)^3, minimized at (-1,-1) with value -8.
        let t = TensorArray::new(3, 2, vec![1.0; 8]).unwrap();
        let r = gamma_gap_tensor(&t, &Codomain::TwoPoint(-1.0, 1.0)).unwrap();
        assert_eq!(r.value, ExtReal::Finite(-8.0));
        assert_eq!(r.minimizer.unwrap(), vec![-1.0, -1.0]);
    }

    #[test]
    fn quartic_rank_one_with_zero_available() {
        // e (x) e (x) e (x) e with e = (1,0): form is z1^4, zero at z1 = 0.
        let t = TensorArray::from_fn(4, 2, |idx| {
            if idx.iter().all(|&k| k == 0) {
                1.0
            } else {
                0.0
            }
        })
        .unwrap();
        let r = gamma_gap_tensor(&t, &Codomain::two_point(0.0, 1.0).unwrap()).unwrap();
        assert_eq!(r.value, ExtReal::Finite(0.0));
        // Lexicographically greatest minimizer: (0, 1).
        assert_eq!(r.minimizer.unwrap(), vec![0.0, 1.0]);
    }

    #[test]
    fn permutation_symmetry_detection() {
        let sym = TensorArray::from_fn(3, 2, |idx| idx.iter().sum::<usize>() as f64).unwrap();
        assert!(sym.is_permutation_symmetric(1e-12));
        let mut entries = sym.entries().to_vec();
        entries[1] += 0.5; // breaks (0,0,1) vs (0,1,0)
        let asym = TensorArray::new(3, 2, entries).unwrap();
        assert!(!asym.is_permutation_symmetric(1e-12));
    }

    #[test]
    fn budget_is_enforced() {
        let t = TensorArray::new(2, 2, vec![0.0; 4]).unwrap();
        let vals: Vec<f64> = (0..2048).map(|k| k as f64).collect();
        let e = Codomain::finite_set(vals).unwrap();
        assert!(matches!(
            gamma_gap_tensor(&t, &e),
            Err(GapError::BudgetExceeded { .. })
        ));
    }
}
