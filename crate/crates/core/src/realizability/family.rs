//! Declared families of test matrices for gap-inequality searches.

use crate::matrix::{rank_one, SymmetricMatrix};
use nalgebra::DMatrix;
use rand::prelude::*;
use rand_chacha::ChaCha12Rng;

pub const HADAMARD_MAX_N: usize = 16;

/// One Hadamard-transform test: a sign-pattern matrix together with the
/// closed-form value of its two-point gap.
#[derive(Debug, Clone)]
pub struct HadamardTest {
    pub u: usize,
    pub v: usize,
    /// Symmetrized sign-pattern matrix (entries in {-1, 0, 1}); the
    /// antisymmetric part of the raw pattern never contributes to forms or
    /// inner products against symmetric matrices.
    pub lambda: DMatrix<f64>,
    /// Exact two-point gap: parity(n - q) - q^2.
    pub bound: i64,
}

/// The full family over `u, v` in `1..=n`.
///
/// With `m = 1 + floor(log2 n)` bits, the raw pattern is
/// `lambda_kl(u, v) = (-1)^(popcount(k & u) + popcount(l & v))` and its gap
/// over sign vectors is `parity(n - q) - q^2`, where `q` counts the indices
/// `i <= n` with `popcount((u ^ v) & i)` odd.
pub fn hadamard_test_family(n: usize) -> Vec<HadamardTest> {
    assert!(
        (1..=HADAMARD_MAX_N).contains(&n),
        "hadamard family defined for 1 <= n <= {HADAMARD_MAX_N}"
    );
    let sign = |a: usize, b: usize| -> f64 {
        if (a & b).count_ones() % 2 == 0 {
            1.0
        } else {
            -1.0
        }
    };
    let mut out = Vec::with_capacity(n * n);
    for u in 1..=n {
        for v in 1..=n {
            let su: Vec<f64> = (1..=n).map(|k| sign(k, u)).collect();
            let sv: Vec<f64> = (1..=n).map(|l| sign(l, v)).collect();
            let lambda =
                DMatrix::from_fn(n, n, |k, l| 0.5 * (su[k] * sv[l] + su[l] * sv[k]));
            let q = (1..=n)
                .filter(|&i| ((u ^ v) & i).count_ones() % 2 == 1)
                .count();
            let bound = ((n - q) % 2) as i64 - (q * q) as i64;
            out.push(HadamardTest {
                u,
                v,
                lambda,
                bound,
            });
        }
    }
    out
}

/// Canonical sparse sign vectors: all `{-1,0,1}` vectors with support size
/// between 1 and `max_support` whose first nonzero entry is +1 (the other
/// half duplicates the rank-one matrices). Ordered by support size, then
/// support positions, then sign pattern.
pub fn sparse_sign_vectors(n: usize, max_support: usize) -> Vec<Vec<f64>> {
    let mut out = Vec::new();
    let max_support = max_support.min(n);
    for support_size in 1..=max_support {
        let mut support: Vec<usize> = (0..support_size).collect();
        loop {
            // 2^(s-1) sign patterns with the first support entry fixed to +1.
            for pattern in 0..(1u32 << (support_size - 1)) {
                let mut v = vec![0.0; n];
                v[support[0]] = 1.0;
                for (bit, &pos) in support[1..].iter().enumerate() {
                    v[pos] = if pattern >> bit & 1 == 1 { -1.0 } else { 1.0 };
                }
                out.push(v);
            }
            // next combination
            let mut i = support_size;
            loop {
                if i == 0 {
                    break;
                }
                i -= 1;
                if support[i] != i + n - support_size {
                    support[i] += 1;
                    for j in (i + 1)..support_size {
                        support[j] = support[j - 1] + 1;
                    }
                    break;
                }
                if i == 0 {
                    i = usize::MAX;
                    break;
                }
            }
            if i == usize::MAX {
                break;
            }
        }
    }
    out
}

/// Variant restricted to odd support sizes (vectors with odd entry sum),
/// used by the unit-process variogram battery.
pub fn odd_sparse_sign_vectors(n: usize, max_support: usize) -> Vec<Vec<f64>> {
    sparse_sign_vectors(n, max_support)
        .into_iter()
        .filter(|v| v.iter().filter(|&&x| x != 0.0).count() % 2 == 1)
        .collect()
}

/// Rank-one matrices of the sparse sign vectors.
pub fn rank_one_family(n: usize, max_support: usize) -> Vec<(Vec<f64>, DMatrix<f64>)> {
    sparse_sign_vectors(n, max_support)
        .into_iter()
        .map(|v| {
            let m = rank_one(&v);
            (v, m)
        })
        .collect()
}

/// Seeded random symmetric matrices with integer entries in [-3, 3].
pub fn random_integer_symmetric(n: usize, count: usize, seed: u64) -> Vec<DMatrix<f64>> {
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let mut m = DMatrix::zeros(n, n);
            for k in 0..n {
                for l in k..n {
                    let v = rng.random_range(-3i64..=3) as f64;
                    m[(k, l)] = v;
                    m[(l, k)] = v;
                }
            }
            m
        })
        .collect()
}

/// Same, but with a zero diagonal (variogram test matrices).
pub fn random_integer_zero_diag(n: usize, count: usize, seed: u64) -> Vec<DMatrix<f64>> {
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let mut m = DMatrix::zeros(n, n);
            for k in 0..n {
                for l in (k + 1)..n {
                    let v = rng.random_range(-3i64..=3) as f64;
                    m[(k, l)] = v;
                    m[(l, k)] = v;
                }
            }
            m
        })
        .collect()
}

/// Shifts the diagonal by the smallest integer making the matrix positive
/// definite with margin 1 (still an admissible test matrix, now usable for
/// exact integer-lattice gaps).
pub fn make_positive_definite(m: &DMatrix<f64>) -> DMatrix<f64> {
    let sym = SymmetricMatrix::new(m.clone(), crate::matrix::MatrixKind::Test)
        .expect("family matrices are symmetric");
    let min_eig = sym.min_eigenvalue();
    if min_eig > 1.0 {
        return m.clone();
    }
    let shift = (1.0 - min_eig).ceil();
    m + DMatrix::identity(m.nrows(), m.ncols()) * shift
}

/// Zeroes the diagonal (for interval batteries, where only zero-diagonal
/// test matrices admit exact vertex gaps).
pub fn strip_diagonal(m: &DMatrix<f64>) -> DMatrix<f64> {
    let mut out = m.clone();
    for k in 0..m.nrows() {
        out[(k, k)] = 0.0;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::codomain::Codomain;
    use crate::gap;
    use crate::matrix::MatrixKind;
    use crate::tolerances::Tolerances;

    #[test]
    fn hadamard_diagonal_pairs_have_parity_bound() {
        for n in 1..=8 {
            for t in hadamard_test_family(n) {
                if t.u == t.v {
                    assert_eq!(t.bound, (n % 2) as i64, "n = {n}, u = v = {}", t.u);
                }
            }
        }
    }

    #[test]
    fn hadamard_bounds_match_enumeration_small() {
        let tol = Tolerances::default();
        for n in 1..=5usize {
            for t in hadamard_test_family(n) {
                let m = SymmetricMatrix::new(t.lambda.clone(), MatrixKind::Test).unwrap();
                let g = gap::gamma_gap(&m, &Codomain::TwoPoint(-1.0, 1.0), &tol).unwrap();
                assert_eq!(
                    g.value,
                    gap::ExtReal::Finite(t.bound as f64),
                    "n = {n}, (u,v) = ({},{})",
                    t.u,
                    t.v
                );
            }
        }
    }

    #[test]
    fn sparse_sign_vectors_counts() {
        // n = 4, support <= 2: C(4,1)*1 + C(4,2)*2 = 4 + 12 = 16.
        assert_eq!(sparse_sign_vectors(4, 2).len(), 16);
        for v in sparse_sign_vectors(4, 2) {
            let first = v.iter().find(|&&x| x != 0.0).copied().unwrap();
            assert_eq!(first, 1.0, "canonical vectors start with +1");
        }
        // Odd-support subset for n = 4, support <= 3: C(4,1) + C(4,3)*4 = 20.
        assert_eq!(odd_sparse_sign_vectors(4, 3).len(), 20);
    }

    #[test]
    fn pd_shift_is_positive_definite() {
        for m in random_integer_symmetric(5, 20, 7) {
            let pd = make_positive_definite(&m);
            let sym = SymmetricMatrix::new(pd, MatrixKind::Test).unwrap();
            assert!(sym.min_eigenvalue() > 0.5);
        }
    }
}
