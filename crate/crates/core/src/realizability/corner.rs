//! Exact membership test for the two-point realizable set at fixed order.
//!
//! A matrix is the non-centered covariance of a `{-1,1}`-valued vector
//! exactly when it lies in the convex hull of the outer products `z z^T`
//! over sign vectors `z`. This module projects onto that polytope with
//! away-step Frank-Wolfe; the linear subproblem in each iteration is an
//! exact two-point gap enumeration. Convergence to the hull yields an
//! explicit convex combination; a residual gradient whose gap inequality is
//! violated yields a separating certificate. Near-boundary inputs that do
//! neither within the iteration budget stay inconclusive.

use super::{Certificate, CertificateKind, CheckConfig, CheckError, TestForm};
use crate::codomain::Codomain;
use crate::gap;
use crate::matrix::{frobenius_inner, MatrixKind, SymmetricMatrix};
use nalgebra::DMatrix;

pub const CORNER_CONFIRM_MAX_N: usize = 16;
/// Sup-norm residual below which the convex combination counts as exact
/// membership.
pub const MEMBER_TOL: f64 = 1e-7;

#[derive(Debug, Clone)]
pub enum CornerOutcome {
    /// Explicit distribution over sign vectors reproducing the matrix.
    Member {
        atoms: Vec<(Vec<f64>, f64)>,
        residual_inf: f64,
    },
    Separated {
        certificate: Certificate,
    },
    Inconclusive,
}

struct Atom {
    z: Vec<f64>,
    weight: f64,
}

pub fn corner_confirm(
    r: &SymmetricMatrix,
    cfg: &CheckConfig,
) -> Result<CornerOutcome, CheckError> {
    let n = r.order();
    if n > CORNER_CONFIRM_MAX_N || (1u128 << n) > cfg.budget as u128 {
        return Ok(CornerOutcome::Inconclusive);
    }
    let tol = &cfg.tolerances;
    let target = r.as_matrix();
    let two_point = Codomain::TwoPoint(-1.0, 1.0);

    // Initial atom: the best vertex seen from the target direction.
    let seed_gap = gap::gamma_gap(&as_test(-target.clone())?, &two_point, tol)?;
    let mut atoms = vec![Atom {
        z: canonical(seed_gap.minimizer.expect("finite enumeration has a minimizer")),
        weight: 1.0,
    }];
    let mut x = reconstruct(&atoms, n);

    for iter in 0..cfg.confirm_iterations {
        if iter % 64 == 63 {
            x = reconstruct(&atoms, n);
        }
        let grad = &x - target;
        let grad_sym = as_test(grad.clone())?;
        let gap_result = gap::gamma_gap(&grad_sym, &two_point, tol)?;
        let gamma = gap_result
            .value
            .finite()
            .expect("two-point gaps are finite");
        let inner_r = frobenius_inner(&grad, target);

        // Separation: the gradient itself is a test matrix whose gap
        // inequality the target violates.
        if inner_r < gamma - tol.gap_tol {
            let lambda_rows = (0..n)
                .map(|k| (0..n).map(|l| grad[(k, l)]).collect())
                .collect();
            return Ok(CornerOutcome::Separated {
                certificate: Certificate {
                    kind: CertificateKind::CovarianceGap,
                    lambda: TestForm::Matrix(lambda_rows),
                    codomain: two_point,
                    gap: gap::ExtReal::Finite(gamma),
                    inner_product: inner_r,
                },
            });
        }

        let dist_inf = (&x - target).amax();
        if dist_inf <= MEMBER_TOL {
            break;
        }

        // Frank-Wolfe vertex (from the same enumeration) and away vertex.
        let v_fw = canonical(gap_result.minimizer.expect("enumeration minimizer"));
        let inner_x = frobenius_inner(&grad, &x);
        let gain_fw = inner_x - gamma;

        let (away_idx, away_score) = atoms
            .iter()
            .enumerate()
            .map(|(i, a)| {
                let zaz = crate::matrix::quadratic_form(&grad, &a.z);
                (i, zaz)
            })
            .max_by(|a, b| a.1.partial_cmp(&b.1).unwrap())
            .expect("at least one atom");
        let gain_away = away_score - inner_x;

        let scale = target.amax().max(1.0);
        if gain_fw.max(gain_away) <= 1e-15 * scale {
            break; // at the projection; separation did not fire
        }

        if gain_fw >= gain_away {
            // direction v v^T - X, step in [0, 1]
            let v_mat = crate::matrix::rank_one(&v_fw);
            let d = &v_mat - &x;
            let denom = frobenius_inner(&d, &d);
            if denom <= 0.0 {
                break;
            }
            let step = (-frobenius_inner(&grad, &d) / denom).clamp(0.0, 1.0);
            if step <= 0.0 {
                break;
            }
            for a in atoms.iter_mut() {
                a.weight *= 1.0 - step;
            }
            if let Some(a) = atoms.iter_mut().find(|a| a.z == v_fw) {
                a.weight += step;
            } else {
                atoms.push(Atom {
                    z: v_fw,
                    weight: step,
                });
            }
            x += d * step;
        } else {
            // away direction X - u u^T, step in [0, w/(1-w)]
            let u = atoms[away_idx].z.clone();
            let w_u = atoms[away_idx].weight;
            let u_mat = crate::matrix::rank_one(&u);
            let d = &x - &u_mat;
            let denom = frobenius_inner(&d, &d);
            if denom <= 0.0 {
                break;
            }
            let max_step = if w_u < 1.0 { w_u / (1.0 - w_u) } else { 0.0 };
            let step = (-frobenius_inner(&grad, &d) / denom).clamp(0.0, max_step);
            if step <= 0.0 {
                break;
            }
            for a in atoms.iter_mut() {
                a.weight *= 1.0 + step;
            }
            atoms[away_idx].weight -= step;
            x += d * step;
        }
        atoms.retain(|a| a.weight > 1e-15);
    }

    x = reconstruct(&atoms, n);
    let residual_inf = (&x - target).amax();
    if residual_inf <= MEMBER_TOL {
        let total: f64 = atoms.iter().map(|a| a.weight).sum();
        let atoms_out = atoms
            .into_iter()
            .map(|a| (a.z, a.weight / total))
            .collect();
        Ok(CornerOutcome::Member {
            atoms: atoms_out,
            residual_inf,
        })
    } else {
        Ok(CornerOutcome::Inconclusive)
    }
}

fn as_test(m: DMatrix<f64>) -> Result<SymmetricMatrix, CheckError> {
    Ok(SymmetricMatrix::new(m, MatrixKind::Test)?)
}

/// Flips the sign so the first coordinate is +1; `z z^T` is unchanged.
fn canonical(mut z: Vec<f64>) -> Vec<f64> {
    if z.first().copied().unwrap_or(1.0) < 0.0 {
        for v in z.iter_mut() {
            *v = -*v;
        }
    }
    z
}

fn reconstruct(atoms: &[Atom], n: usize) -> DMatrix<f64> {
    let mut x = DMatrix::zeros(n, n);
    for a in atoms {
        for k in 0..n {
            for l in 0..n {
                x[(k, l)] += a.weight * a.z[k] * a.z[l];
            }
        }
    }
    x
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::realizability::CheckConfig;

    fn cov(rows: &[Vec<f64>]) -> SymmetricMatrix {
        SymmetricMatrix::from_rows(rows, MatrixKind::Covariance).unwrap()
    }

    #[test]
    fn two_by_two_correlations_are_members() {
        let cfg = CheckConfig::default();
        for c in [-1.0, -0.4, 0.0, 0.7, 1.0] {
            let r = cov(&[vec![1.0, c], vec![c, 1.0]]);
            match corner_confirm(&r, &cfg).unwrap() {
                CornerOutcome::Member { atoms, residual_inf } => {
                    assert!(residual_inf <= MEMBER_TOL);
                    let total: f64 = atoms.iter().map(|(_, w)| w).sum();
                    assert!((total - 1.0).abs() < 1e-9);
                }
                other => panic!("c = {c}: expected membership, got {other:?}"),
            }
        }
    }

    #[test]
    fn identity_is_member_at_order_five() {
        let cfg = CheckConfig::default();
        let n = 5;
        let r = SymmetricMatrix::new(DMatrix::identity(n, n), MatrixKind::Covariance).unwrap();
        assert!(matches!(
            corner_confirm(&r, &cfg).unwrap(),
            CornerOutcome::Member { .. }
        ));
    }

    #[test]
    fn smooth_cosine_correlation_is_separated() {
        // Unit-diagonal PSD matrix that is not a sign-vector covariance:
        // cos(x - y) at three nearby points (too smooth at the origin).
        let pts = [0.0f64, 0.1, 0.2];
        let r = SymmetricMatrix::from_fn_symmetric(3, MatrixKind::Covariance, |k, l| {
            (pts[k] - pts[l]).cos()
        })
        .unwrap();
        let cfg = CheckConfig::default();
        match corner_confirm(&r, &cfg).unwrap() {
            CornerOutcome::Separated { certificate } => {
                let ok = crate::realizability::revalidate_certificate(
                    &certificate,
                    &crate::realizability::CheckTarget::Covariance(&r),
                    &cfg.tolerances,
                )
                .unwrap();
                assert!(ok, "separating certificate must re-validate");
            }
            other => panic!("expected separation, got {other:?}"),
        }
    }

    #[test]
    fn rank_one_vertex_is_immediate_member() {
        let z = [1.0, -1.0, 1.0, 1.0];
        let r = SymmetricMatrix::new(crate::matrix::rank_one(&z), MatrixKind::Covariance)
            .unwrap();
        let cfg = CheckConfig::default();
        match corner_confirm(&r, &cfg).unwrap() {
            CornerOutcome::Member { atoms, .. } => {
                assert_eq!(atoms.len(), 1);
                assert_eq!(atoms[0].0, vec![1.0, -1.0, 1.0, 1.0]);
            }
            other => panic!("expected single-atom membership, got {other:?}"),
        }
    }
}
