//! Vector gap: the minimum of `|z . lambda|` over sign vectors.

use super::GapError;

/// Result of a vector-gap computation.
#[derive(Debug, Clone)]
pub struct ZetaGap {
    pub value: f64,
    /// Sign vector attaining the value (lexicographically greatest among ties).
    pub sign_vector: Vec<f64>,
}

pub const ZETA_MAX_N: usize = 30;

/// Minimum of `|z lambda^T|` over `z` in `{-1,1}^n`, via meet-in-the-middle
/// over half sums. Squares to the two-point gap of the rank-one matrix
/// `lambda^T lambda`.
pub fn zeta_gap(lambda: &[f64]) -> Result<ZetaGap, GapError> {
    let n = lambda.len();
    if n == 0 {
        return Err(GapError::EmptyInput);
    }
    if n > ZETA_MAX_N {
        return Err(GapError::BudgetExceeded {
            what: "sign-vector half enumeration",
            needed: 1u128 << n,
            budget: 1u128 << ZETA_MAX_N,
        });
    }
    let half = n / 2;
    let (front, back) = lambda.split_at(half);

    // All (sum, signs) pairs for the back half, keeping for each distinct sum
    // only the lexicographically greatest sign pattern.
    let mut back_sums = enumerate_half(back);
    back_sums.sort_by(|a, b| {
        a.0.partial_cmp(&b.0)
            .unwrap()
            .then_with(|| if lex_ge(&b.1, &a.1) { std::cmp::Ordering::Greater } else { std::cmp::Ordering::Less })
    });
    back_sums.dedup_by(|next, first| {
        if next.0 == first.0 {
            // keep the lex-greatest pattern for this sum
            if lex_ge(&next.1, &first.1) {
                first.1 = std::mem::take(&mut next.1);
            }
            true
        } else {
            false
        }
    });

    let mut best: Option<(f64, Vec<f64>)> = None;
    for (front_sum, front_signs) in enumerate_half(front) {
        let target = -front_sum;
        let idx = back_sums.partition_point(|(s, _)| *s < target);
        for j in [idx.wrapping_sub(1), idx] {
            if let Some((back_sum, back_signs)) = back_sums.get(j) {
                let value = (front_sum + back_sum).abs();
                let mut z = front_signs.clone();
                z.extend_from_slice(back_signs);
                let replace = match &best {
                    None => true,
                    Some((bv, bz)) => value < *bv || (value == *bv && lex_gt(&z, bz)),
                };
                if replace {
                    best = Some((value, z));
                }
            }
        }
    }
    let (value, sign_vector) = best.expect("half enumerations are nonempty");
    Ok(ZetaGap { value, sign_vector })
}

/// All sign assignments of a half, with their partial sums. An empty half
/// contributes the single pair (0, []).
fn enumerate_half(coeffs: &[f64]) -> Vec<(f64, Vec<f64>)> {
    let mut out = vec![(0.0, Vec::new())];
    for &c in coeffs {
        let mut next = Vec::with_capacity(out.len() * 2);
        for (sum, signs) in out {
            let mut plus = signs.clone();
            plus.push(1.0);
            next.push((sum + c, plus));
            let mut minus = signs;
            minus.push(-1.0);
            next.push((sum - c, minus));
        }
        out = next;
    }
    out
}

fn lex_gt(a: &[f64], b: &[f64]) -> bool {
    super::enumerate::lex_greater(a, b)
}

fn lex_ge(a: &[f64], b: &[f64]) -> bool {
    !lex_gt(b, a)
}
