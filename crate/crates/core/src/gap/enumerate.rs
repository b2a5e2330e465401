//! Exhaustive minimization of quadratic forms over finite grids `E^n`.
//!
//! The search runs depth-first with incremental partial sums, so the cost per
//! visited assignment is O(1) amortized. Parallel workers split on a prefix of
//! the coordinates; the min-reduction uses a total order on (value, vector)
//! pairs, which makes the result independent of chunking and thread count.

use nalgebra::DMatrix;
use rayon::prelude::*;

/// Best candidate found so far. Ties on the value are broken toward the
/// lexicographically greatest vector, so certificates are deterministic.
#[derive(Debug, Clone)]
pub(crate) struct EnumBest {
    pub value: f64,
    pub z: Vec<f64>,
}

pub(crate) fn better(a: &EnumBest, b: &EnumBest) -> bool {
    if a.value != b.value {
        return a.value < b.value;
    }
    lex_greater(&a.z, &b.z)
}

pub(crate) fn lex_greater(a: &[f64], b: &[f64]) -> bool {
    for (x, y) in a.iter().zip(b.iter()) {
        if x != y {
            return x > y;
        }
    }
    false
}

fn pick(a: Option<EnumBest>, b: Option<EnumBest>) -> Option<EnumBest> {
    match (a, b) {
        (Some(x), Some(y)) => Some(if better(&x, &y) { x } else { y }),
        (x, None) => x,
        (None, y) => y,
    }
}

struct DfsState<'a> {
    lambda: &'a DMatrix<f64>,
    values: &'a [f64],
    n: usize,
    z: Vec<f64>,
    /// `cross[i] = sum_{k < depth} lambda[i][k] * z[k]` for i >= depth.
    cross: Vec<f64>,
    /// Per-depth snapshots of `cross`, so backtracking restores values
    /// bit-exactly (subtracting the increment back out would leave
    /// last-ulp residue that depends on sibling visit order).
    scratch: Vec<Vec<f64>>,
    /// Quadratic form of the prefix.
    partial: f64,
    best: Option<EnumBest>,
}

impl<'a> DfsState<'a> {
    fn new(lambda: &'a DMatrix<f64>, values: &'a [f64], n: usize) -> Self {
        DfsState {
            lambda,
            values,
            n,
            z: vec![0.0; n],
            cross: vec![0.0; n],
            scratch: vec![vec![0.0; n]; n],
            partial: 0.0,
            best: None,
        }
    }

    fn descend(&mut self, depth: usize) {
        if depth == self.n {
            let cand = EnumBest {
                value: self.partial,
                z: self.z.clone(),
            };
            if self.best.as_ref().map_or(true, |b| better(&cand, b)) {
                self.best = Some(cand);
            }
            return;
        }
        let diag = self.lambda[(depth, depth)];
        for i in (depth + 1)..self.n {
            self.scratch[depth][i] = self.cross[i];
        }
        for vi in 0..self.values.len() {
            let v = self.values[vi];
            let saved_partial = self.partial;
            self.partial += v * (2.0 * self.cross[depth] + diag * v);
            self.z[depth] = v;
            for i in (depth + 1)..self.n {
                self.cross[i] = self.scratch[depth][i] + self.lambda[(i, depth)] * v;
            }
            self.descend(depth + 1);
            self.partial = saved_partial;
        }
        for i in (depth + 1)..self.n {
            self.cross[i] = self.scratch[depth][i];
        }
    }
}

/// Minimizes `z L z^T` over all `z` in `values^n`. The caller enforces the
/// enumeration budget.
pub(crate) fn minimize_quadratic(lambda: &DMatrix<f64>, values: &[f64]) -> EnumBest {
    let n = lambda.nrows();
    assert!(n >= 1 && !values.is_empty());

    // Split the first `prefix_len` coordinates across workers.
    let mut prefix_len = 0usize;
    let mut blocks = 1u64;
    let total: f64 = (values.len() as f64).powi(n as i32);
    if total >= 4096.0 {
        while prefix_len < n - 1 && blocks < 256 {
            prefix_len += 1;
            blocks *= values.len() as u64;
        }
    }

    let run_block = |block: u64| -> Option<EnumBest> {
        let mut state = DfsState::new(lambda, values, n);
        // Decode the block index into the first `prefix_len` coordinates.
        let mut rem = block;
        for depth in (0..prefix_len).rev() {
            let vi = (rem % values.len() as u64) as usize;
            rem /= values.len() as u64;
            let v = values[vi];
            state.z[depth] = v;
        }
        for depth in 0..prefix_len {
            let v = state.z[depth];
            state.partial += v * (2.0 * state.cross[depth] + lambda[(depth, depth)] * v);
            for i in (depth + 1)..n {
                state.cross[i] += lambda[(i, depth)] * v;
            }
        }
        state.descend(prefix_len);
        state.best
    };

    let best = if blocks > 1 {
        (0..blocks)
            .into_par_iter()
            .map(run_block)
            .reduce(|| None, pick)
    } else {
        run_block(0)
    };
    best.expect("nonempty search space")
}

/// Direct maximization; used by test oracles for the increment form.
#[allow(dead_code)]
pub(crate) fn maximize_quadratic(lambda: &DMatrix<f64>, values: &[f64]) -> EnumBest {
    let neg = -lambda;
    let best = minimize_quadratic(&neg, values);
    EnumBest {
        value: -best.value,
        z: best.z,
    }
}
