//! Membership tests for the matrix cones the characterizations reduce to,
//! each returning a certificate that can be re-validated independently.

use crate::gap;
use crate::matrix::{frobenius_inner, quadratic_form, SymmetricMatrix};
use crate::tolerances::Tolerances;
use nalgebra::{DMatrix, DVector};
use rand::prelude::*;
use rand_chacha::ChaCha12Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Largest order for exact copositivity face enumeration.
pub const COPOSITIVE_MAX_N: usize = 10;

#[derive(Debug, Error)]
pub enum ConeError {
    #[error("FACE_BUDGET: exact copositivity enumerates 2^{n} - 1 faces; order {n} exceeds the limit")]
    FaceBudget { n: usize },
    #[error(transparent)]
    Gap(#[from] gap::GapError),
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub enum ConeCertificate {
    /// A direction or point violating (or witnessing) the defining inequality.
    Vector(Vec<f64>),
    /// A matrix witness, e.g. a copositive matrix with negative inner product.
    Matrix(Vec<Vec<f64>>),
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ConeVerdict {
    pub member: bool,
    pub certificate: Option<ConeCertificate>,
    pub exact: bool,
}

/// Positive semidefiniteness by the spectrum; on failure the certificate is
/// the eigenvector of the most negative eigenvalue.
pub fn is_psd(s: &SymmetricMatrix, tol: f64) -> ConeVerdict {
    let (min_eig, vec) = s.min_eigenpair();
    if min_eig >= -tol {
        ConeVerdict {
            member: true,
            certificate: None,
            exact: true,
        }
    } else {
        ConeVerdict {
            member: false,
            certificate: Some(ConeCertificate::Vector(vec)),
            exact: true,
        }
    }
}

/// Conditional negative semidefiniteness: `lambda G lambda^T <= 0` for every
/// zero-sum `lambda`. Tested as positive semidefiniteness of `P (-G) P` with
/// `P = I - (1/n) 1 1^T`; the certificate is a zero-sum violating vector.
pub fn is_cnd(g: &SymmetricMatrix, tol: f64) -> ConeVerdict {
    let n = g.order();
    let p = DMatrix::identity(n, n) - DMatrix::from_element(n, n, 1.0 / n as f64);
    let projected = &p * (-g.as_matrix()) * &p;
    let projected = (&projected + projected.transpose()) * 0.5;
    let eig = projected.symmetric_eigen();
    let mut idx = 0;
    for (i, v) in eig.eigenvalues.iter().enumerate() {
        if *v < eig.eigenvalues[idx] {
            idx = i;
        }
    }
    let min_eig = eig.eigenvalues[idx];
    if min_eig >= -tol {
        return ConeVerdict {
            member: true,
            certificate: None,
            exact: true,
        };
    }
    // Project the offending eigenvector back to the zero-sum hyperplane.
    let v = eig.eigenvectors.column(idx).clone_owned();
    let mut lambda: Vec<f64> = (&p * v).iter().copied().collect();
    let mean: f64 = lambda.iter().sum::<f64>() / n as f64;
    for x in lambda.iter_mut() {
        *x -= mean;
    }
    ConeVerdict {
        member: false,
        certificate: Some(ConeCertificate::Vector(lambda)),
        exact: true,
    }
}

/// Exact copositivity for orders up to [`COPOSITIVE_MAX_N`] by enumerating
/// every support face of the standard simplex. On each face the interior
/// stationary point solves `L_F z = nu 1, sum z = 1`; singular face systems
/// are skipped because any face minimum they could hide is also attained on
/// a sub-face with a nonsingular system or at a vertex.
pub fn is_copositive(s: &SymmetricMatrix, tol: &Tolerances) -> Result<ConeVerdict, ConeError> {
    let n = s.order();
    if n > COPOSITIVE_MAX_N {
        return Err(ConeError::FaceBudget { n });
    }
    let a = s.as_matrix();

    let mut best_val = f64::INFINITY;
    let mut best_z: Vec<f64> = Vec::new();

    for mask in 1u32..(1u32 << n) {
        let support: Vec<usize> = (0..n).filter(|k| mask >> k & 1 == 1).collect();
        let m = support.len();
        let (val, z_face) = if m == 1 {
            (a[(support[0], support[0])], vec![1.0])
        } else {
            // KKT system [L_F, -1; 1^T, 0] [z; nu] = [0; 1].
            let mut sys = DMatrix::zeros(m + 1, m + 1);
            for (i, &ki) in support.iter().enumerate() {
                for (j, &kj) in support.iter().enumerate() {
                    sys[(i, j)] = a[(ki, kj)];
                }
                sys[(i, m)] = -1.0;
                sys[(m, i)] = 1.0;
            }
            let mut rhs = DVector::zeros(m + 1);
            rhs[m] = 1.0;
            let lu = sys.lu();
            match lu.solve(&rhs) {
                None => continue,
                Some(sol) => {
                    let z: Vec<f64> = sol.iter().take(m).copied().collect();
                    if z.iter().any(|&v| v <= 1e-10) {
                        continue; // not in the relative interior of this face
                    }
                    let mut sub = DMatrix::zeros(m, m);
                    for (i, &ki) in support.iter().enumerate() {
                        for (j, &kj) in support.iter().enumerate() {
                            sub[(i, j)] = a[(ki, kj)];
                        }
                    }
                    (quadratic_form(&sub, &z), z)
                }
            }
        };
        if val < best_val {
            best_val = val;
            let mut z_full = vec![0.0; n];
            for (i, &k) in support.iter().enumerate() {
                z_full[k] = z_face[i];
            }
            best_z = z_full;
        }
    }

    if best_val >= -tol.psd_tol {
        Ok(ConeVerdict {
            member: true,
            certificate: None,
            exact: true,
        })
    } else {
        Ok(ConeVerdict {
            member: false,
            certificate: Some(ConeCertificate::Vector(best_z)),
            exact: true,
        })
    }
}

/// Corner positivity: nonnegativity of the two-point gap. Delegates to the
/// exact sign-vector enumeration.
pub fn is_corner_positive(
    s: &SymmetricMatrix,
    tol: &Tolerances,
) -> Result<ConeVerdict, ConeError> {
    let result = gap::gamma_gap(s, &crate::Codomain::TwoPoint(-1.0, 1.0), tol)?;
    let value = result
        .value
        .finite()
        .expect("two-point gaps are always finite");
    if value >= -tol.gap_tol {
        Ok(ConeVerdict {
            member: true,
            certificate: None,
            exact: result.exact,
        })
    } else {
        Ok(ConeVerdict {
            member: false,
            certificate: result.minimizer.map(ConeCertificate::Vector),
            exact: result.exact,
        })
    }
}

// ---------------------------------------------------------------------------
// Complete positivity
// ---------------------------------------------------------------------------

/// Multistart configuration for the nonnegative factorization search.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CpConfig {
    /// Columns of the factor; defaults to `n (n + 1) / 2`.
    pub max_rank: Option<usize>,
    pub starts: usize,
    /// Cap on alternating sweeps per start.
    pub iterations: usize,
    pub seed: u64,
}

impl Default for CpConfig {
    fn default() -> Self {
        Self {
            max_rank: None,
            starts: 20,
            iterations: 5000,
            seed: 0,
        }
    }
}

/// Why a matrix fails the doubly-nonnegative precondition. Both cases refute
/// complete positivity outright.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub enum DnnRefutation {
    NegativeEntry { row: usize, col: usize, value: f64 },
    NotPsd { eigenvector: Vec<f64> },
}

/// Outcome of the factorization search. `Inconclusive` is not a refutation:
/// deciding complete positivity is NP-hard, so a failed search proves
/// nothing.
#[derive(Debug, Clone)]
pub enum CpOutcome {
    /// Nonnegative factor `B` with `B B^T` close to the input.
    Factor(DMatrix<f64>),
    NotDnn(DnnRefutation),
    Inconclusive,
}

/// Searches for a nonnegative factor `B` with `||B B^T - R||_inf <= 1e-6 max|R|`
/// by alternating nonnegative least squares with a coupling penalty,
/// restarted from seeded random initials.
pub fn cp_factorize(r: &SymmetricMatrix, cfg: &CpConfig, tol: &Tolerances) -> CpOutcome {
    let n = r.order();
    let scale = r.max_abs().max(1.0);
    for k in 0..n {
        for l in 0..n {
            let v = r.entry(k, l);
            if v < -tol.sym_tol * scale {
                return CpOutcome::NotDnn(DnnRefutation::NegativeEntry {
                    row: k,
                    col: l,
                    value: v,
                });
            }
        }
    }
    let (min_eig, vec) = r.min_eigenpair();
    if min_eig < -tol.psd_tol {
        return CpOutcome::NotDnn(DnnRefutation::NotPsd { eigenvector: vec });
    }

    let rank = cfg.max_rank.unwrap_or(n * (n + 1) / 2).max(n);
    let target = r.as_matrix();
    let tolerance = 1e-6 * r.max_abs().max(1e-300);

    // Deterministic warm starts first (clipped Cholesky and clipped
    // spectral square root), then seeded random restarts in parallel.
    for warm in [warm_start_cholesky(target, rank), warm_start_eigen(target, rank)] {
        if let Some(b) = anls_symmetric(target, warm, cfg.iterations, tolerance) {
            return CpOutcome::Factor(b);
        }
    }
    let result = (0..cfg.starts as u64)
        .into_par_iter()
        .map(|start| {
            let mut rng = ChaCha12Rng::seed_from_u64(
                cfg.seed ^ (0x9e3779b97f4a7c15u64.wrapping_mul(start + 1)),
            );
            let scale = (target.amax() / rank as f64).sqrt().max(1e-3);
            let init = DMatrix::from_fn(n, rank, |_, _| rng.random_range(0.0..scale));
            anls_symmetric(target, init, cfg.iterations, tolerance).map(|b| (start, b))
        })
        .reduce(
            || None,
            |a, b| match (a, b) {
                (Some(x), Some(y)) => Some(if x.0 <= y.0 { x } else { y }),
                (x, None) => x,
                (None, y) => y,
            },
        );

    match result {
        Some((_, b)) => CpOutcome::Factor(b),
        None => CpOutcome::Inconclusive,
    }
}

/// Entrywise-clipped Cholesky factor of `R` (with a small jitter), padded to
/// `rank` columns.
fn warm_start_cholesky(r: &DMatrix<f64>, rank: usize) -> DMatrix<f64> {
    let n = r.nrows();
    let jitter = 1e-10 * r.amax().max(1.0);
    let mut init = DMatrix::zeros(n, rank);
    if let Some(chol) = (r + DMatrix::identity(n, n) * jitter).cholesky() {
        let l = chol.l();
        for k in 0..n {
            for j in 0..n.min(rank) {
                init[(k, j)] = l[(k, j)].max(0.0);
            }
        }
    }
    init
}

/// Clipped spectral square root `V max(D,0)^(1/2)` with negative entries
/// zeroed, padded to `rank` columns.
fn warm_start_eigen(r: &DMatrix<f64>, rank: usize) -> DMatrix<f64> {
    let n = r.nrows();
    let eig = r.clone().symmetric_eigen();
    let mut init = DMatrix::zeros(n, rank);
    for j in 0..n.min(rank) {
        let scale = eig.eigenvalues[j].max(0.0).sqrt();
        for k in 0..n {
            init[(k, j)] = (eig.eigenvectors[(k, j)] * scale).max(0.0);
        }
    }
    init
}

/// One ANLS run: alternate `B` and `C` in `||R - B C^T||^2 + mu ||B - C||^2`
/// and accept when the symmetrized factor reproduces `R` entrywise.
fn anls_symmetric(
    r: &DMatrix<f64>,
    init: DMatrix<f64>,
    max_iters: usize,
    tolerance: f64,
) -> Option<DMatrix<f64>> {
    let mut b = init;
    let mut c = b.clone();
    let mu = r.amax().max(1e-12);

    let mut stall = 0usize;
    let mut best_residual = f64::INFINITY;
    for _ in 0..max_iters {
        solve_coupled_nnls(r, &b, mu, &mut c);
        solve_coupled_nnls(r, &c, mu, &mut b);

        let avg = (&b + &c) * 0.5;
        let residual = reconstruction_residual(r, &avg);
        if residual <= tolerance {
            return Some(avg);
        }
        if residual + 1e-15 < best_residual {
            best_residual = residual;
            stall = 0;
        } else {
            stall += 1;
            if stall > 25 {
                break;
            }
        }
    }
    None
}

fn reconstruction_residual(r: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    let approx = b * b.transpose();
    r.iter()
        .zip(approx.iter())
        .fold(0.0f64, |a, (x, y)| a.max((x - y).abs()))
}

/// For fixed `B`, solve each row of `X` in `min ||R - B X^T||^2 + mu||X - B||^2`
/// subject to `X >= 0`. The normal-equation Gram matrix `B^T B + mu I` is
/// shared by every row.
fn solve_coupled_nnls(r: &DMatrix<f64>, b: &DMatrix<f64>, mu: f64, x: &mut DMatrix<f64>) {
    let n = r.nrows();
    let rank = b.ncols();
    let gram = b.transpose() * b + DMatrix::identity(rank, rank) * mu;
    for row in 0..n {
        let mut atb = DVector::zeros(rank);
        for j in 0..rank {
            let mut acc = 0.0;
            for i in 0..n {
                acc += b[(i, j)] * r[(i, row)];
            }
            atb[j] = acc + mu * b[(row, j)];
        }
        let sol = nnls_gram(&gram, &atb);
        for j in 0..rank {
            x[(row, j)] = sol[j];
        }
    }
}

/// Lawson-Hanson nonnegative least squares on the normal equations:
/// minimizes `||A x - b||` over `x >= 0` given `G = A^T A` and `h = A^T b`.
fn nnls_gram(gram: &DMatrix<f64>, atb: &DVector<f64>) -> DVector<f64> {
    let nvars = gram.nrows();
    let mut passive = vec![false; nvars];
    let mut x = DVector::zeros(nvars);
    let tol = 1e-12 * (gram.amax() + atb.amax() + 1.0);

    for _outer in 0..(3 * nvars + 30) {
        let w = atb - gram * &x;
        let mut best: Option<(usize, f64)> = None;
        for j in 0..nvars {
            if !passive[j] && w[j] > tol && best.map_or(true, |(_, bw)| w[j] > bw) {
                best = Some((j, w[j]));
            }
        }
        let Some((enter, _)) = best else { break };
        passive[enter] = true;

        for _inner in 0..(3 * nvars + 30) {
            let active: Vec<usize> = (0..nvars).filter(|&j| passive[j]).collect();
            if active.is_empty() {
                break;
            }
            let m = active.len();
            let sub = DMatrix::from_fn(m, m, |a, b| gram[(active[a], active[b])]);
            let rhs = DVector::from_fn(m, |a, _| atb[active[a]]);
            let sol = match sub.clone().lu().solve(&rhs) {
                Some(s) => s,
                None => match sub.svd(true, true).solve(&rhs, 1e-12) {
                    Ok(s) => s,
                    Err(_) => break,
                },
            };
            if sol.iter().all(|&v| v > 0.0) {
                x.fill(0.0);
                for (i, &j) in active.iter().enumerate() {
                    x[j] = sol[i];
                }
                break;
            }
            // Step toward the subproblem solution until a variable hits zero.
            let mut alpha = f64::INFINITY;
            for (i, &j) in active.iter().enumerate() {
                if sol[i] <= 0.0 {
                    let denom = x[j] - sol[i];
                    if denom > 0.0 {
                        alpha = alpha.min(x[j] / denom);
                    }
                }
            }
            if !alpha.is_finite() {
                alpha = 0.0;
            }
            for (i, &j) in active.iter().enumerate() {
                x[j] += alpha * (sol[i] - x[j]);
                if x[j] <= 1e-14 {
                    x[j] = 0.0;
                    passive[j] = false;
                }
            }
        }
    }
    x
}

// ---------------------------------------------------------------------------
// Copositive refutation
// ---------------------------------------------------------------------------

/// A copositive matrix with negative inner product against the candidate,
/// refuting its complete positivity.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CopositiveWitness {
    pub matrix: Vec<Vec<f64>>,
    pub inner_product: f64,
}

/// Searches a family of copositive witnesses: rank-one squares of negative
/// eigenvectors, elementary nonnegative matrices at negative entries, and
/// (for order 5) the extreme copositive circulants of Horn type. Every
/// witness is re-verified copositive by exact face enumeration before use.
pub fn cp_refute(r: &SymmetricMatrix, tol: &Tolerances) -> Option<CopositiveWitness> {
    let n = r.order();
    let target = r.as_matrix();
    let mut candidates: Vec<DMatrix<f64>> = Vec::new();

    let (min_eig, vec) = r.min_eigenpair();
    if min_eig < -tol.psd_tol {
        candidates.push(crate::matrix::rank_one(&vec));
    }
    for k in 0..n {
        for l in k..n {
            if r.entry(k, l) < -tol.gap_tol {
                candidates.push(crate::matrix::elementary_symmetric(n, k, l));
            }
        }
    }
    if n == 5 {
        candidates.extend(horn_family());
    }

    for cand in candidates {
        let inner = frobenius_inner(&cand, target);
        if inner >= -tol.gap_tol {
            continue;
        }
        let sym = SymmetricMatrix::new(cand.clone(), crate::matrix::MatrixKind::Test)
            .expect("witness candidates are symmetric");
        if n <= COPOSITIVE_MAX_N {
            match is_copositive(&sym, tol) {
                Ok(v) if v.member => {}
                _ => continue,
            }
        } else if is_psd(&sym, tol.psd_tol).member
            || cand.iter().all(|&v| v >= 0.0)
        {
            // Outside the exact range only the two trivially copositive
            // families are trusted.
        } else {
            continue;
        }
        let rows = (0..n)
            .map(|k| (0..n).map(|l| cand[(k, l)]).collect())
            .collect();
        return Some(CopositiveWitness {
            matrix: rows,
            inner_product: inner,
        });
    }
    None
}

/// The distinct permutation conjugates of the extreme copositive matrix with
/// unit diagonal and off-diagonal pattern following the pentagon (entries
/// -1 on the cycle, +1 on the diagonals of the cycle).
pub fn horn_family() -> Vec<DMatrix<f64>> {
    let base = DMatrix::from_row_slice(
        5,
        5,
        &[
            1.0, -1.0, 1.0, 1.0, -1.0, //
            -1.0, 1.0, -1.0, 1.0, 1.0, //
            1.0, -1.0, 1.0, -1.0, 1.0, //
            1.0, 1.0, -1.0, 1.0, -1.0, //
            -1.0, 1.0, 1.0, -1.0, 1.0,
        ],
    );
    let mut seen: Vec<DMatrix<f64>> = Vec::new();
    let mut perm = [0usize, 1, 2, 3, 4];
    permute_all(&mut perm, 0, &mut |p| {
        let conj = DMatrix::from_fn(5, 5, |k, l| base[(p[k], p[l])]);
        if !seen.iter().any(|m| m == &conj) {
            seen.push(conj);
        }
    });
    seen
}

fn permute_all(perm: &mut [usize; 5], k: usize, visit: &mut impl FnMut(&[usize; 5])) {
    if k == perm.len() {
        visit(perm);
        return;
    }
    for i in k..perm.len() {
        perm.swap(k, i);
        permute_all(perm, k + 1, visit);
        perm.swap(k, i);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::MatrixKind;

    fn sym(rows: &[Vec<f64>]) -> SymmetricMatrix {
        SymmetricMatrix::from_rows(rows, MatrixKind::Test).unwrap()
    }

    #[test]
    fn psd_examples() {
        assert!(is_psd(&sym(&[vec![1.0, 1.0], vec![1.0, 1.0]]), 1e-9).member);
        assert!(is_psd(&sym(&[vec![2.0, 1.0], vec![1.0, 2.0]]), 1e-9).member);
        let v = is_psd(&sym(&[vec![0.0, 1.0], vec![1.0, 0.0]]), 1e-9);
        assert!(!v.member);
        match v.certificate.unwrap() {
            ConeCertificate::Vector(dir) => {
                let m = sym(&[vec![0.0, 1.0], vec![1.0, 0.0]]);
                assert!(m.quadratic_form(&dir) < -0.5);
            }
            _ => panic!("expected vector certificate"),
        }
    }

    #[test]
    fn cnd_examples() {
        // g = |x - y| on {0, 1}.
        let g = SymmetricMatrix::from_rows(
            &[vec![0.0, 1.0], vec![1.0, 0.0]],
            MatrixKind::Variogram,
        )
        .unwrap();
        assert!(is_cnd(&g, 1e-9).member);

        // g = (x - y)^2 on {0, 2, 4}: boundary CND.
        let g = SymmetricMatrix::from_rows(
            &[
                vec![0.0, 4.0, 16.0],
                vec![4.0, 0.0, 4.0],
                vec![16.0, 4.0, 0.0],
            ],
            MatrixKind::Variogram,
        )
        .unwrap();
        assert!(is_cnd(&g, 1e-9).member);

        let bad = sym(&[vec![0.0, -1.0], vec![-1.0, 0.0]]);
        let v = is_cnd(&bad, 1e-9);
        assert!(!v.member);
        match v.certificate.unwrap() {
            ConeCertificate::Vector(lambda) => {
                let total: f64 = lambda.iter().sum();
                assert!(total.abs() < 1e-9, "certificate must be zero-sum");
                assert!(bad.quadratic_form(&lambda) > 1e-9);
            }
            _ => panic!("expected vector certificate"),
        }
    }

    #[test]
    fn copositive_examples() {
        let tol = Tolerances::default();
        assert!(is_copositive(&sym(&[vec![1.0, 0.0], vec![0.0, 1.0]]), &tol)
            .unwrap()
            .member);
        assert!(is_copositive(&sym(&[vec![0.0, 1.0], vec![1.0, 0.0]]), &tol)
            .unwrap()
            .member);
        let v = is_copositive(&sym(&[vec![1.0, -3.0], vec![-3.0, 1.0]]), &tol).unwrap();
        assert!(!v.member);
        match v.certificate.unwrap() {
            ConeCertificate::Vector(z) => {
                assert!(z.iter().all(|&v| v >= 0.0));
                let m = sym(&[vec![1.0, -3.0], vec![-3.0, 1.0]]);
                let val = m.quadratic_form(&z);
                assert!((val - (-1.0)).abs() < 1e-9, "simplex minimum is -1, got {val}");
            }
            _ => panic!("expected vector certificate"),
        }
    }

    #[test]
    fn copositive_matches_simplex_grid_oracle() {
        use rand::prelude::*;
        let tol = Tolerances::default();
        let mut rng = ChaCha12Rng::seed_from_u64(41);
        for trial in 0..200 {
            let n = if trial % 2 == 0 { 3 } else { 4 };
            let mut rows = vec![vec![0.0; n]; n];
            for k in 0..n {
                for l in k..n {
                    let v = rng.random_range(-1.5..1.5);
                    rows[k][l] = v;
                    rows[l][k] = v;
                }
            }
            let m = sym(&rows);
            let verdict = is_copositive(&m, &tol).unwrap();
            let grid_min = simplex_grid_min(&m, 40);
            if grid_min < -1e-6 {
                assert!(!verdict.member, "grid found {grid_min} but verdict is member");
            }
            if verdict.member {
                assert!(grid_min >= -1e-6);
            }
        }
    }

    fn simplex_grid_min(m: &SymmetricMatrix, steps: usize) -> f64 {
        let n = m.order();
        let mut best = f64::INFINITY;
        let mut comp = vec![0usize; n];
        fn rec(
            m: &SymmetricMatrix,
            comp: &mut Vec<usize>,
            k: usize,
            left: usize,
            steps: usize,
            best: &mut f64,
        ) {
            let n = comp.len();
            if k == n - 1 {
                comp[k] = left;
                let z: Vec<f64> = comp.iter().map(|&c| c as f64 / steps as f64).collect();
                *best = best.min(m.quadratic_form(&z));
                return;
            }
            for c in 0..=left {
                comp[k] = c;
                rec(m, comp, k + 1, left - c, steps, best);
            }
        }
        rec(m, &mut comp, 0, steps, steps, &mut best);
        best
    }

    #[test]
    fn psd_and_nonnegative_imply_copositive() {
        use rand::prelude::*;
        let tol = Tolerances::default();
        let mut rng = ChaCha12Rng::seed_from_u64(43);
        for _ in 0..50 {
            let n = rng.random_range(2..=5usize);
            // PSD: Gram matrix.
            let w = DMatrix::from_fn(n, n, |_, _| rng.random_range(-1.0..1.0));
            let gram = SymmetricMatrix::new(&w * w.transpose(), MatrixKind::Test).unwrap();
            assert!(is_copositive(&gram, &tol).unwrap().member);
            // Entrywise nonnegative.
            let mut rows = vec![vec![0.0; n]; n];
            for k in 0..n {
                for l in k..n {
                    let v = rng.random_range(0.0..2.0);
                    rows[k][l] = v;
                    rows[l][k] = v;
                }
            }
            assert!(is_copositive(&sym(&rows), &tol).unwrap().member);
        }
    }

    #[test]
    fn corner_positive_examples() {
        let tol = Tolerances::default();
        let ones = sym(&[vec![1.0, 1.0], vec![1.0, 1.0]]);
        assert!(is_corner_positive(&ones, &tol).unwrap().member);
        let off = sym(&[vec![0.0, 1.0], vec![1.0, 0.0]]);
        let v = is_corner_positive(&off, &tol).unwrap();
        assert!(!v.member);
    }

    #[test]
    fn corner_positive_after_gap_shift() {
        use rand::prelude::*;
        let tol = Tolerances::default();
        let mut rng = ChaCha12Rng::seed_from_u64(47);
        for _ in 0..20 {
            let n = rng.random_range(2..=5usize);
            let mut rows = vec![vec![0.0; n]; n];
            for k in 0..n {
                for l in k..n {
                    let v = rng.random_range(-2i64..=2) as f64;
                    rows[k][l] = v;
                    rows[l][k] = v;
                }
            }
            let m = sym(&rows);
            let g = gap::gamma_gap(&m, &crate::Codomain::TwoPoint(-1.0, 1.0), &tol)
                .unwrap()
                .value
                .finite()
                .unwrap();
            // Adding -gamma at the (1,1) corner makes the matrix corner positive.
            let mut shifted = rows.clone();
            shifted[0][0] -= g;
            assert!(is_corner_positive(&sym(&shifted), &tol).unwrap().member);
        }
    }

    #[test]
    fn nnls_solves_small_systems() {
        let a = DMatrix::from_row_slice(3, 2, &[1.0, 0.0, 0.0, 1.0, 1.0, 1.0]);
        let b = DVector::from_row_slice(&[1.0, -0.5, 0.5]);
        let x = nnls_gram(&(a.transpose() * &a), &(a.transpose() * &b));
        assert!(x.iter().all(|&v| v >= 0.0));
        // Unconstrained optimum has x2 < 0; NNLS must clamp it to 0.
        assert_eq!(x[1], 0.0);
        assert!((x[0] - 0.75).abs() < 1e-10);
    }

    #[test]
    fn cp_factorize_examples() {
        let tol = Tolerances::default();
        let cfg = CpConfig::default();
        let r = sym(&[vec![2.0, 1.0], vec![1.0, 2.0]]);
        match cp_factorize(&r, &cfg, &tol) {
            CpOutcome::Factor(b) => {
                assert!(b.iter().all(|&v| v >= 0.0));
                let res = reconstruction_residual(r.as_matrix(), &b);
                assert!(res <= 1e-6 * 2.0, "residual {res}");
            }
            other => panic!("expected factor, got {other:?}"),
        }

        let d = sym(&[vec![4.0, 0.0], vec![0.0, 9.0]]);
        match cp_factorize(&d, &cfg, &tol) {
            CpOutcome::Factor(b) => {
                let res = reconstruction_residual(d.as_matrix(), &b);
                assert!(res <= 1e-6 * 9.0);
            }
            other => panic!("expected factor, got {other:?}"),
        }

        let neg = sym(&[vec![1.0, -0.5], vec![-0.5, 1.0]]);
        assert!(matches!(
            cp_factorize(&neg, &cfg, &tol),
            CpOutcome::NotDnn(DnnRefutation::NegativeEntry { .. })
        ));
    }

    #[test]
    fn cp_refute_basic_witnesses() {
        let tol = Tolerances::default();
        // Not PSD: rank-one witness from the negative eigenvector.
        let m = sym(&[vec![1.0, 2.0], vec![2.0, 1.0]]);
        let w = cp_refute(&m, &tol).unwrap();
        assert!(w.inner_product < -1e-9);
        // Negative entry: elementary witness.
        let m = sym(&[vec![1.0, -0.2], vec![-0.2, 1.0]]);
        let w = cp_refute(&m, &tol).unwrap();
        assert!(w.inner_product < -1e-9);
    }

    #[test]
    fn horn_family_is_copositive_but_not_psd_plus_nonneg() {
        let tol = Tolerances::default();
        let family = horn_family();
        assert_eq!(family.len(), 12);
        for h in &family {
            let m = SymmetricMatrix::new(h.clone(), MatrixKind::Test).unwrap();
            assert!(is_copositive(&m, &tol).unwrap().member);
            assert!(!is_psd(&m, tol.psd_tol).member);
        }
    }
}
