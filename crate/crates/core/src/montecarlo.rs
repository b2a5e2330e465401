//! Seeded sampling oracle for validating constructors.
//!
//! Randomness comes from ChaCha12 streams keyed by `(seed, sample index)`:
//! each sample row draws from its own stream, so batches are bit-identical
//! for a given `(seed, spec)` regardless of how rows are scheduled across
//! threads. Estimator reductions use pairwise summation over a fixed tree,
//! keeping floating-point results reproducible as well.

use crate::constructors::{self, ConstructionSpec, Recipe};
use crate::gap::TensorArray;
use crate::matrix::SymmetricMatrix;
use crate::tolerances::Tolerances;
use nalgebra::DMatrix;
use rand::prelude::*;
use rand_chacha::ChaCha12Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum McError {
    #[error("need at least {need} samples, got {got}")]
    TooFewSamples { need: usize, got: usize },
    #[error("covariance is too indefinite: required jitter {jitter:.3e} exceeds 1e-6 * trace = {limit:.3e}")]
    TooIndefinite { jitter: f64, limit: f64 },
    #[error("Cholesky factorization failed after jitter")]
    CholeskyFailed,
    #[error("transform {transform:?} requires unit marginal variances; point {index} has variance {variance}")]
    VarianceMismatch {
        transform: TransformKind,
        index: usize,
        variance: f64,
    },
    #[error("UNSUPPORTED_RECIPE: {0} has no sampling realization")]
    UnsupportedRecipe(String),
    #[error(transparent)]
    Construct(#[from] constructors::ConstructError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum TransformKind {
    /// `z -> +1 if z > 0 else -1`.
    Sign,
    /// `z -> 2 Phi(z) - 1`, the `[-1,1]`-uniform transform.
    UniformPm1,
    /// `z -> exp(z - C_kk / 2)` per coordinate.
    Lognormal,
}

/// A matrix of realizations: `n_samples` rows over `n_points` columns.
#[derive(Debug, Clone)]
pub struct SampleBatch {
    pub n_points: usize,
    pub n_samples: usize,
    pub seed: u64,
    /// Row-major samples.
    samples: Vec<f64>,
    /// Marginal variances of the generating Gaussian (diagonal of C).
    marginal_var: Vec<f64>,
    pub transform: Option<TransformKind>,
}

impl SampleBatch {
    pub fn row(&self, s: usize) -> &[f64] {
        &self.samples[s * self.n_points..(s + 1) * self.n_points]
    }

    pub fn value(&self, s: usize, k: usize) -> f64 {
        self.samples[s * self.n_points + k]
    }

    /// CSV export, one sample per line.
    pub fn to_csv_string(&self) -> String {
        let mut out = String::new();
        for s in 0..self.n_samples {
            let row: Vec<String> = self.row(s).iter().map(|v| format!("{v}")).collect();
            out.push_str(&row.join(","));
            out.push('\n');
        }
        out
    }
}

/// Draws i.i.d. zero-mean Gaussian rows with covariance `C` via the Cholesky
/// factor of `C + jitter I`, `jitter = max(0, -lambda_min) + 1e-12`. Inputs
/// needing more jitter than `1e-6 * trace` are refused.
pub fn sample_gaussian(
    c: &SymmetricMatrix,
    n_samples: usize,
    seed: u64,
    tol: &Tolerances,
) -> Result<SampleBatch, McError> {
    let _ = tol;
    if n_samples < 2 {
        return Err(McError::TooFewSamples {
            need: 2,
            got: n_samples,
        });
    }
    let n = c.order();
    let min_eig = c.min_eigenvalue();
    let jitter = (-min_eig).max(0.0) + 1e-12;
    let trace: f64 = (0..n).map(|k| c.entry(k, k)).sum();
    let limit = 1e-6 * trace.max(1e-12);
    if jitter > limit {
        return Err(McError::TooIndefinite { jitter, limit });
    }
    let jittered = c.as_matrix() + DMatrix::identity(n, n) * jitter;
    let chol = jittered.cholesky().ok_or(McError::CholeskyFailed)?;
    let l = chol.l();

    let mut samples = vec![0.0; n_samples * n];
    samples
        .par_chunks_mut(n)
        .enumerate()
        .for_each(|(s, row)| {
            let mut rng = ChaCha12Rng::seed_from_u64(seed);
            rng.set_stream(s as u64 + 1);
            let g: Vec<f64> = (0..n).map(|_| rng.sample(StandardNormal)).collect();
            for k in 0..n {
                let mut acc = 0.0;
                for j in 0..=k {
                    acc += l[(k, j)] * g[j];
                }
                row[k] = acc;
            }
        });

    Ok(SampleBatch {
        n_points: n,
        n_samples,
        seed,
        samples,
        marginal_var: (0..n).map(|k| c.entry(k, k)).collect(),
        transform: None,
    })
}

/// Applies a memoryless transform to a Gaussian batch. `Sign` and
/// `UniformPm1` require unit marginal variances.
pub fn transform(batch: &SampleBatch, kind: TransformKind) -> Result<SampleBatch, McError> {
    if matches!(kind, TransformKind::Sign | TransformKind::UniformPm1) {
        for (k, &v) in batch.marginal_var.iter().enumerate() {
            if (v - 1.0).abs() > 1e-9 {
                return Err(McError::VarianceMismatch {
                    transform: kind,
                    index: k,
                    variance: v,
                });
            }
        }
    }
    let n = batch.n_points;
    let mut samples = batch.samples.clone();
    samples.par_chunks_mut(n).for_each(|row| {
        for (k, z) in row.iter_mut().enumerate() {
            *z = match kind {
                TransformKind::Sign => {
                    if *z > 0.0 {
                        1.0
                    } else {
                        -1.0
                    }
                }
                TransformKind::UniformPm1 => 2.0 * normal_cdf(*z) - 1.0,
                TransformKind::Lognormal => (*z - batch.marginal_var[k] / 2.0).exp(),
            };
        }
    });
    Ok(SampleBatch {
        n_points: n,
        n_samples: batch.n_samples,
        seed: batch.seed,
        samples,
        marginal_var: batch.marginal_var.clone(),
        transform: Some(kind),
    })
}

/// Pairwise (tree) summation; deterministic and far more accurate than a
/// running sum on long inputs.
pub fn pairwise_sum(xs: &[f64]) -> f64 {
    if xs.len() <= 32 {
        return xs.iter().sum();
    }
    let mid = xs.len() / 2;
    pairwise_sum(&xs[..mid]) + pairwise_sum(&xs[mid..])
}

fn mean_and_se(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = pairwise_sum(values) / n;
    let sq: Vec<f64> = values.iter().map(|v| (v - mean) * (v - mean)).collect();
    let var = pairwise_sum(&sq) / (n - 1.0);
    (mean, (var / n).sqrt())
}

/// Empirical non-centered covariance: entry (k,l) is the sample mean of
/// `Z_k Z_l`, with its standard error.
pub fn empirical_noncentered_cov(
    batch: &SampleBatch,
) -> Result<(DMatrix<f64>, DMatrix<f64>), McError> {
    if batch.n_samples < 100 {
        return Err(McError::TooFewSamples {
            need: 100,
            got: batch.n_samples,
        });
    }
    let n = batch.n_points;
    let pairs: Vec<(usize, usize)> = (0..n)
        .flat_map(|k| (k..n).map(move |l| (k, l)))
        .collect();
    let stats: Vec<(usize, usize, f64, f64)> = pairs
        .par_iter()
        .map(|&(k, l)| {
            let products: Vec<f64> = (0..batch.n_samples)
                .map(|s| batch.value(s, k) * batch.value(s, l))
                .collect();
            let (mean, se) = mean_and_se(&products);
            (k, l, mean, se)
        })
        .collect();
    let mut values = DMatrix::zeros(n, n);
    let mut ses = DMatrix::zeros(n, n);
    for (k, l, mean, se) in stats {
        values[(k, l)] = mean;
        values[(l, k)] = mean;
        ses[(k, l)] = se;
        ses[(l, k)] = se;
    }
    Ok((values, ses))
}

/// Empirical semivariogram: entry (k,l) is the sample mean of
/// `(Z_k - Z_l)^2 / 2`; the diagonal is exactly zero.
pub fn empirical_semivariogram(
    batch: &SampleBatch,
) -> Result<(DMatrix<f64>, DMatrix<f64>), McError> {
    if batch.n_samples < 100 {
        return Err(McError::TooFewSamples {
            need: 100,
            got: batch.n_samples,
        });
    }
    let n = batch.n_points;
    let pairs: Vec<(usize, usize)> = (0..n)
        .flat_map(|k| ((k + 1)..n).map(move |l| (k, l)))
        .collect();
    let stats: Vec<(usize, usize, f64, f64)> = pairs
        .par_iter()
        .map(|&(k, l)| {
            let halves: Vec<f64> = (0..batch.n_samples)
                .map(|s| {
                    let d = batch.value(s, k) - batch.value(s, l);
                    0.5 * d * d
                })
                .collect();
            let (mean, se) = mean_and_se(&halves);
            (k, l, mean, se)
        })
        .collect();
    let mut values = DMatrix::zeros(n, n);
    let mut ses = DMatrix::zeros(n, n);
    for (k, l, mean, se) in stats {
        values[(k, l)] = mean;
        values[(l, k)] = mean;
        ses[(k, l)] = se;
        ses[(l, k)] = se;
    }
    Ok((values, ses))
}

/// Empirical q-th moment tensor `mean(Z_{k1} ... Z_{kq})` with standard
/// errors, for small `n` and `q`.
pub fn empirical_moment(batch: &SampleBatch, q: usize) -> (TensorArray, TensorArray) {
    let n = batch.n_points;
    let total = n.pow(q as u32);
    let stats: Vec<(f64, f64)> = (0..total)
        .into_par_iter()
        .map(|flat| {
            let mut idx = vec![0usize; q];
            let mut rem = flat;
            for d in (0..q).rev() {
                idx[d] = rem % n;
                rem /= n;
            }
            let products: Vec<f64> = (0..batch.n_samples)
                .map(|s| idx.iter().map(|&k| batch.value(s, k)).product())
                .collect();
            mean_and_se(&products)
        })
        .collect();
    let values = TensorArray::new(q, n, stats.iter().map(|s| s.0).collect()).unwrap();
    let ses = TensorArray::new(q, n, stats.iter().map(|s| s.1).collect()).unwrap();
    (values, ses)
}

/// Standard normal CDF via a rational approximation of erfc (Cody's
/// decomposition over three ranges); absolute error below 1e-13.
pub fn normal_cdf(z: f64) -> f64 {
    0.5 * erfc(-z / std::f64::consts::SQRT_2)
}

/// Complementary error function. Coefficients follow the classical rational
/// Chebyshev fits; relative accuracy ~1e-15 on the ranges used.
pub fn erfc(x: f64) -> f64 {
    let ax = x.abs();
    let result = if ax < 0.5 {
        return 1.0 - erf_small(x);
    } else if ax <= 4.0 {
        erfc_mid(ax)
    } else {
        erfc_large(ax)
    };
    if x < 0.0 {
        2.0 - result
    } else {
        result
    }
}

fn erf_small(x: f64) -> f64 {
    // erf(x) = x * P(x^2)/Q(x^2) on |x| < 0.5.
    const P: [f64; 5] = [
        3.209377589138469472562e3,
        3.774852376853020208137e2,
        1.138641541510501556495e2,
        3.161123743870565596947e0,
        1.857777061846031526730e-1,
    ];
    const Q: [f64; 5] = [
        2.844236833439170622273e3,
        1.282616526077372275645e3,
        2.440246379344441733056e2,
        2.360129095234412093499e1,
        1.0,
    ];
    let z = x * x;
    let mut num = P[4];
    let mut den = Q[4];
    for i in (0..4).rev() {
        num = num * z + P[i];
        den = den * z + Q[i];
    }
    x * num / den
}

fn erfc_mid(x: f64) -> f64 {
    // erfc(x) = exp(-x^2) P(x)/Q(x) on 0.5 <= x <= 4.
    const P: [f64; 9] = [
        1.23033935479799725272e3,
        2.05107837782607146532e3,
        1.71204761263407058314e3,
        8.81952221241769090411e2,
        2.98635138197400131132e2,
        6.61191906371416294775e1,
        8.88314979438837594118e0,
        5.64188496988670089180e-1,
        2.15311535474403846343e-8,
    ];
    const Q: [f64; 9] = [
        1.23033935480374942043e3,
        3.43936767414372163696e3,
        4.36261909014324715820e3,
        3.29079923573345962678e3,
        1.62138957456669018874e3,
        5.37181101862009857509e2,
        1.17693950891312499305e2,
        1.57449261107098347253e1,
        1.0,
    ];
    let mut num = P[8];
    let mut den = Q[8];
    for i in (0..8).rev() {
        num = num * x + P[i];
        den = den * x + Q[i];
    }
    (-x * x).exp() * num / den
}

fn erfc_large(x: f64) -> f64 {
    // Asymptotic expansion for x > 4:
    // erfc(x) = exp(-x^2) / (x sqrt(pi)) * sum_k (-1)^k (2k-1)!! / (2x^2)^k.
    // erfc(4) is already below 1.6e-8, so ten terms keep the absolute error
    // far under 1e-13.
    if x > 26.0 {
        return 0.0;
    }
    let inv2x2 = 1.0 / (2.0 * x * x);
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 1..=10u32 {
        term *= -((2 * k - 1) as f64) * inv2x2;
        sum += term;
    }
    (-x * x).exp() / (x * std::f64::consts::PI.sqrt()) * sum
}

/// Worst-offending entry of a Monte Carlo comparison.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct WorstEntry {
    pub index: Vec<usize>,
    pub observed: f64,
    pub expected: f64,
    pub se: f64,
    pub sigmas: f64,
}

/// Result of simulating a recipe and comparing the empirical moment with the
/// closed form.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct McReport {
    pub recipe: String,
    pub n_samples: usize,
    pub seed: u64,
    pub mc_sigmas: f64,
    pub pass: bool,
    pub worst: WorstEntry,
}

/// Samples the realizing field for a recipe, estimates the empirical moment,
/// and compares it entrywise against the constructor's closed form. Passes
/// when every deviation stays within `mc_sigmas` standard errors (entries
/// with zero standard error must match to 1e-9).
pub fn verify_construction(
    spec: &ConstructionSpec,
    c: &SymmetricMatrix,
    n_samples: usize,
    seed: u64,
    tol: &Tolerances,
) -> Result<McReport, McError> {
    let recipe_name;
    let (observed, ses, expected): (Vec<f64>, Vec<f64>, Vec<f64>);
    let mut indices: Vec<Vec<usize>> = Vec::new();

    match &spec.recipe {
        Recipe::Arcsin { a } if *a == 1.0 || *a == 0.5 => {
            recipe_name = format!("ARCSIN(a={a})");
            let gauss = sample_gaussian(c, n_samples, seed, tol)?;
            let kind = if *a == 1.0 {
                TransformKind::Sign
            } else {
                TransformKind::UniformPm1
            };
            let batch = transform(&gauss, kind)?;
            let (emp, se) = empirical_noncentered_cov(&batch)?;
            let closed = constructors::arcsin_covariance(c, *a, tol)?;
            let n = c.order();
            let mut obs = Vec::new();
            let mut s = Vec::new();
            let mut exp = Vec::new();
            for k in 0..n {
                for l in k..n {
                    indices.push(vec![k, l]);
                    obs.push(emp[(k, l)]);
                    s.push(se[(k, l)]);
                    exp.push(closed.entry(k, l));
                }
            }
            (observed, ses, expected) = (obs, s, exp);
        }
        Recipe::Arcsin { a } => {
            return Err(McError::UnsupportedRecipe(format!(
                "ARCSIN with a = {a} (samplers exist for a = 1/2 and a = 1)"
            )));
        }
        Recipe::Lognormal => {
            recipe_name = "LOGNORMAL".into();
            let gauss = sample_gaussian(c, n_samples, seed, tol)?;
            let batch = transform(&gauss, TransformKind::Lognormal)?;
            let (emp, se) = empirical_noncentered_cov(&batch)?;
            let closed = constructors::lognormal_cov(c, tol)?;
            let n = c.order();
            let mut obs = Vec::new();
            let mut s = Vec::new();
            let mut exp = Vec::new();
            for k in 0..n {
                for l in k..n {
                    indices.push(vec![k, l]);
                    obs.push(emp[(k, l)]);
                    s.push(se[(k, l)]);
                    exp.push(closed.entry(k, l));
                }
            }
            (observed, ses, expected) = (obs, s, exp);
        }
        Recipe::UnitVariogram => {
            recipe_name = "UNIT_VARIOGRAM".into();
            let gauss = sample_gaussian(c, n_samples, seed, tol)?;
            let batch = transform(&gauss, TransformKind::Sign)?;
            let (emp, se) = empirical_semivariogram(&batch)?;
            let closed = constructors::unit_variogram_from_gaussian(c, tol)?;
            let n = c.order();
            let mut obs = Vec::new();
            let mut s = Vec::new();
            let mut exp = Vec::new();
            for k in 0..n {
                for l in (k + 1)..n {
                    indices.push(vec![k, l]);
                    obs.push(emp[(k, l)]);
                    s.push(se[(k, l)]);
                    exp.push(closed.entry(k, l));
                }
            }
            (observed, ses, expected) = (obs, s, exp);
        }
        Recipe::GaussianMoment { q } => {
            recipe_name = format!("GAUSSIAN_MOMENT(q={q})");
            let gauss = sample_gaussian(c, n_samples, seed, tol)?;
            let (emp, se) = empirical_moment(&gauss, *q);
            let closed = constructors::gaussian_moment(*q, c, tol)?;
            let n = c.order();
            let total = n.pow(*q as u32);
            let mut obs = Vec::new();
            let mut s = Vec::new();
            let mut exp = Vec::new();
            for flat in 0..total {
                let mut idx = vec![0usize; *q];
                let mut rem = flat;
                for d in (0..*q).rev() {
                    idx[d] = rem % n;
                    rem /= n;
                }
                obs.push(emp.entries()[flat]);
                s.push(se.entries()[flat]);
                exp.push(closed.entries()[flat]);
                indices.push(idx);
            }
            (observed, ses, expected) = (obs, s, exp);
        }
        other => {
            return Err(McError::UnsupportedRecipe(format!("{other:?}")));
        }
    }

    let mut pass = true;
    let mut worst = WorstEntry {
        index: indices.first().cloned().unwrap_or_default(),
        observed: 0.0,
        expected: 0.0,
        se: 0.0,
        sigmas: -1.0,
    };
    for (i, idx) in indices.iter().enumerate() {
        let diff = (observed[i] - expected[i]).abs();
        let (ok, sigmas) = if ses[i] > 0.0 {
            (diff <= tol.mc_sigmas * ses[i], diff / ses[i])
        } else {
            (diff <= 1e-9, if diff > 0.0 { f64::INFINITY } else { 0.0 })
        };
        if !ok {
            pass = false;
        }
        if sigmas > worst.sigmas {
            worst = WorstEntry {
                index: idx.clone(),
                observed: observed[i],
                expected: expected[i],
                se: ses[i],
                sigmas,
            };
        }
    }

    Ok(McReport {
        recipe: recipe_name,
        n_samples,
        seed,
        mc_sigmas: tol.mc_sigmas,
        pass,
        worst,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::MatrixKind;

    fn corr(rows: &[Vec<f64>]) -> SymmetricMatrix {
        SymmetricMatrix::from_rows(rows, MatrixKind::Covariance).unwrap()
    }

    #[test]
    fn normal_cdf_reference_values() {
        assert!((normal_cdf(0.0) - 0.5).abs() < 1e-15);
        assert!((normal_cdf(1.0) - 0.8413447460685429).abs() < 1e-13);
        assert!((normal_cdf(-1.0) - 0.15865525393145707).abs() < 1e-13);
        assert!((normal_cdf(1.96) - 0.9750021048517795).abs() < 1e-13);
        assert!((normal_cdf(3.0) - 0.9986501019683699).abs() < 1e-13);
        assert!((normal_cdf(-5.0) - 2.866515718791933e-7).abs() < 1e-15);
    }

    #[test]
    fn erfc_reference_values() {
        let cases = [
            (0.1, 0.8875370839817152),
            (0.3, 0.6713732405408726),
            (0.5, 0.4795001221869535),
            (0.7, 0.3221988061625817),
            (1.0, 0.15729920705028516),
            (2.0, 0.004677734981047266),
            (3.5, 7.430983723414129e-7),
            (4.0, 1.541725790028002e-8),
            (4.5, 1.9661604415428878e-10),
            (5.0, 1.5374597944280347e-12),
            (6.0, 2.1519736712498913e-17),
        ];
        for (x, want) in cases {
            let got = erfc(x);
            assert!(
                (got - want).abs() <= 1e-13 * want.max(1e-300) + 1e-16,
                "erfc({x}) = {got}, want {want}"
            );
            let neg = erfc(-x);
            assert!((neg - (2.0 - want)).abs() < 1e-13);
        }
    }

    #[test]
    fn normal_cdf_matches_quadrature() {
        // Trapezoid integration of the density as an independent oracle.
        for &z in &[-3.0, -1.5, -0.3, 0.2, 0.9, 2.4] {
            let steps = 4_000_000;
            let lo = -10.0;
            let h = (z - lo) / steps as f64;
            let density =
                |x: f64| (-x * x / 2.0).exp() / (2.0 * std::f64::consts::PI).sqrt();
            let mut acc = 0.5 * (density(lo) + density(z));
            for i in 1..steps {
                acc += density(lo + i as f64 * h);
            }
            let oracle = acc * h;
            assert!(
                (normal_cdf(z) - oracle).abs() < 1e-10,
                "z = {z}: {} vs {}",
                normal_cdf(z),
                oracle
            );
        }
    }

    #[test]
    fn batches_are_deterministic() {
        let tol = Tolerances::default();
        let c = corr(&[vec![1.0, 0.5], vec![0.5, 1.0]]);
        let a = sample_gaussian(&c, 500, 42, &tol).unwrap();
        let b = sample_gaussian(&c, 500, 42, &tol).unwrap();
        assert_eq!(a.samples, b.samples);
        let other = sample_gaussian(&c, 500, 43, &tol).unwrap();
        assert_ne!(a.samples, other.samples);
    }

    #[test]
    fn gaussian_empirical_covariance_close_to_target() {
        let tol = Tolerances::default();
        let c = corr(&[vec![1.0, 0.0], vec![0.0, 1.0]]);
        let n = 100_000;
        let batch = sample_gaussian(&c, n, 1, &tol).unwrap();
        let (emp, _) = empirical_noncentered_cov(&batch).unwrap();
        let bound = 4.0 / (n as f64).sqrt();
        for k in 0..2 {
            for l in 0..2 {
                assert!(
                    (emp[(k, l)] - c.entry(k, l)).abs() < bound,
                    "entry ({k},{l})"
                );
            }
        }
    }

    #[test]
    fn singular_covariance_gives_degenerate_samples() {
        let tol = Tolerances::default();
        let c = corr(&[vec![1.0, 1.0], vec![1.0, 1.0]]);
        let batch = sample_gaussian(&c, 200, 9, &tol).unwrap();
        for s in 0..batch.n_samples {
            assert!((batch.value(s, 0) - batch.value(s, 1)).abs() < 1e-5);
        }
    }

    #[test]
    fn rejects_too_indefinite() {
        let tol = Tolerances::default();
        let c = SymmetricMatrix::from_rows(
            &[vec![1.0, 2.0], vec![2.0, 1.0]],
            MatrixKind::Covariance,
        )
        .unwrap();
        assert!(matches!(
            sample_gaussian(&c, 100, 0, &tol),
            Err(McError::TooIndefinite { .. })
        ));
    }

    #[test]
    fn sign_transform_lands_in_two_point_set() {
        let tol = Tolerances::default();
        let c = corr(&[vec![1.0, 0.3], vec![0.3, 1.0]]);
        let batch = transform(&sample_gaussian(&c, 300, 3, &tol).unwrap(), TransformKind::Sign)
            .unwrap();
        for s in 0..batch.n_samples {
            for k in 0..batch.n_points {
                let v = batch.value(s, k);
                assert!(v == 1.0 || v == -1.0);
            }
        }
        // Diagonal of the empirical covariance is exactly 1.
        let big = transform(
            &sample_gaussian(&c, 5_000, 4, &tol).unwrap(),
            TransformKind::Sign,
        )
        .unwrap();
        let (emp, se) = empirical_noncentered_cov(&big).unwrap();
        assert_eq!(emp[(0, 0)], 1.0);
        assert_eq!(se[(0, 0)], 0.0);
    }

    #[test]
    fn uniform_transform_moments() {
        let tol = Tolerances::default();
        let c = corr(&[vec![1.0, 0.0], vec![0.0, 1.0]]);
        let n = 50_000;
        let batch = transform(
            &sample_gaussian(&c, n, 5, &tol).unwrap(),
            TransformKind::UniformPm1,
        )
        .unwrap();
        // E[Z] = 0, E[Z^2] = 1/3 for uniform on [-1,1].
        let mut sum = 0.0;
        let mut sumsq = 0.0;
        for s in 0..n {
            let v = batch.value(s, 0);
            sum += v;
            sumsq += v * v;
        }
        let mean = sum / n as f64;
        let mean_sq = sumsq / n as f64;
        assert!(mean.abs() < 4.0 * (1.0 / 3.0f64 / n as f64).sqrt());
        let se_sq = (0.2f64 - 1.0 / 9.0).sqrt() / (n as f64).sqrt(); // Var(Z^2) = E[Z^4]-E[Z^2]^2
        assert!((mean_sq - 1.0 / 3.0).abs() < 4.0 * se_sq);
    }

    #[test]
    fn lognormal_transform_has_unit_mean() {
        let tol = Tolerances::default();
        let c = corr(&[vec![1.0, 0.2], vec![0.2, 1.0]]);
        let n = 100_000;
        let batch = transform(
            &sample_gaussian(&c, n, 6, &tol).unwrap(),
            TransformKind::Lognormal,
        )
        .unwrap();
        for k in 0..2 {
            let vals: Vec<f64> = (0..n).map(|s| batch.value(s, k)).collect();
            let (mean, se) = super::mean_and_se(&vals);
            assert!((mean - 1.0).abs() < 4.0 * se, "mean {mean}, se {se}");
        }
    }

    #[test]
    fn sign_covariance_matches_arcsine_law() {
        let tol = Tolerances::default();
        let rho = 0.6;
        let c = corr(&[vec![1.0, rho], vec![rho, 1.0]]);
        let batch = transform(
            &sample_gaussian(&c, 200_000, 7, &tol).unwrap(),
            TransformKind::Sign,
        )
        .unwrap();
        let (emp, se) = empirical_noncentered_cov(&batch).unwrap();
        let expected = 2.0 / std::f64::consts::PI * rho.asin();
        assert!((emp[(0, 1)] - expected).abs() < 4.0 * se[(0, 1)]);

        // Semivariogram form: 1 - (2/pi) asin(rho) = (2/pi) arccos(rho).
        let (vario, vse) = empirical_semivariogram(&batch).unwrap();
        let expected_g = 2.0 / std::f64::consts::PI * rho.acos();
        assert!((vario[(0, 1)] - expected_g).abs() < 4.0 * vse[(0, 1)]);
        assert!((1.0 - expected - expected_g).abs() < 1e-15);
        assert_eq!(vario[(0, 0)], 0.0);
    }

    #[test]
    fn independent_pair_semivariogram_is_one() {
        let tol = Tolerances::default();
        let c = corr(&[vec![1.0, 0.0], vec![0.0, 1.0]]);
        let batch = sample_gaussian(&c, 100_000, 8, &tol).unwrap();
        let (vario, se) = empirical_semivariogram(&batch).unwrap();
        assert!((vario[(0, 1)] - 1.0).abs() < 4.0 * se[(0, 1)]);
    }

    #[test]
    fn verify_construction_passes_for_samplable_recipes() {
        let tol = Tolerances::default();
        let c = corr(&[vec![1.0, 0.45], vec![0.45, 1.0]]);
        for recipe in [
            Recipe::Arcsin { a: 1.0 },
            Recipe::Arcsin { a: 0.5 },
            Recipe::Lognormal,
            Recipe::UnitVariogram,
        ] {
            let spec = ConstructionSpec { recipe };
            let report = verify_construction(&spec, &c, 50_000, 11, &tol).unwrap();
            assert!(report.pass, "{}: worst {:?}", report.recipe, report.worst);
        }
    }

    #[test]
    fn verify_construction_covers_moment_tensors() {
        let tol = Tolerances::default();
        let c = corr(&[vec![1.0, 0.35], vec![0.35, 1.0]]);
        let spec = ConstructionSpec {
            recipe: Recipe::GaussianMoment { q: 4 },
        };
        let report = verify_construction(&spec, &c, 60_000, 13, &tol).unwrap();
        assert!(report.pass, "worst {:?}", report.worst);
        assert_eq!(report.worst.index.len(), 4);
    }

    #[test]
    fn unsupported_recipes_are_refused() {
        let tol = Tolerances::default();
        let c = corr(&[vec![1.0, 0.2], vec![0.2, 1.0]]);
        for recipe in [Recipe::UnitDiagLift, Recipe::IntegerBump { epsilon: 1.0 }] {
            let spec = ConstructionSpec { recipe };
            assert!(matches!(
                verify_construction(&spec, &c, 1000, 0, &tol),
                Err(McError::UnsupportedRecipe(_))
            ));
        }
    }
}
