//! Compensated (Kahan-Babuska-Neumaier) summation.
//!
//! Cell masses of a binomial measure span many orders of magnitude when
//! alpha is small, so the 2^k-term sums of the composite rules are
//! accumulated with a running compensation term.

use std::iter::Sum;
use std::ops::AddAssign;

use rayon::prelude::*;

use crate::Result;

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct NeumaierSum {
    sum: f64,
    compensation: f64,
}

impl NeumaierSum {
    pub const fn new() -> Self {
        Self {
            sum: 0.0,
            compensation: 0.0,
        }
    }

    #[inline]
    pub fn add(&mut self, value: f64) {
        let t = self.sum + value;
        if self.sum.abs() >= value.abs() {
            self.compensation += (self.sum - t) + value;
        } else {
            self.compensation += (value - t) + self.sum;
        }
        self.sum = t;
    }

    /// Folds another partial sum into this one, keeping both compensations.
    pub fn merge(&mut self, other: &NeumaierSum) {
        self.add(other.sum);
        self.add(other.compensation);
    }

    #[inline]
    pub fn total(&self) -> f64 {
        self.sum + self.compensation
    }
}

impl AddAssign<f64> for NeumaierSum {
    fn add_assign(&mut self, rhs: f64) {
        self.add(rhs);
    }
}

impl Sum<f64> for NeumaierSum {
    fn sum<I: Iterator<Item = f64>>(iter: I) -> Self {
        let mut acc = NeumaierSum::new();
        for v in iter {
            acc.add(v);
        }
        acc
    }
}

/// Compensated sum of a slice.
pub fn compensated_sum(values: &[f64]) -> f64 {
    values.iter().copied().sum::<NeumaierSum>().total()
}

const BLOCK_BITS: u32 = 12;

/// Compensated sum of `term(j)` for `j = 0..2^k`.
///
/// Large levels are split into fixed blocks of `2^12` cells that are summed
/// in parallel and then merged in index order, so the result does not depend
/// on the number of worker threads. The first failing cell (lowest `j`)
/// determines the returned error.
pub(crate) fn blocked_cell_sum<T>(k: u32, term: T) -> Result<f64>
where
    T: Fn(u64) -> Result<f64> + Sync,
{
    blocked_cell_sum_max(k, |j| term(j).map(|v| (v, 0.0))).map(|(sum, _)| sum)
}

/// Like [`blocked_cell_sum`] for the first component of `term(j)`, while
/// also tracking the maximum of the second component.
pub(crate) fn blocked_cell_sum_max<T>(k: u32, term: T) -> Result<(f64, f64)>
where
    T: Fn(u64) -> Result<(f64, f64)> + Sync,
{
    let cells = 1u64 << k;
    let fold_range = |lo: u64, hi: u64| -> Result<(NeumaierSum, f64)> {
        let mut acc = NeumaierSum::new();
        let mut max = f64::NEG_INFINITY;
        for j in lo..hi {
            let (v, m) = term(j)?;
            acc.add(v);
            max = max.max(m);
        }
        Ok((acc, max))
    };
    let (sum, max) = if k <= BLOCK_BITS {
        fold_range(0, cells)?
    } else {
        let block = 1u64 << BLOCK_BITS;
        let partials: Vec<Result<(NeumaierSum, f64)>> = (0..cells / block)
            .into_par_iter()
            .map(|b| fold_range(b * block, (b + 1) * block))
            .collect();
        let mut total = NeumaierSum::new();
        let mut max = f64::NEG_INFINITY;
        for partial in partials {
            let (s, m) = partial?;
            total.merge(&s);
            max = max.max(m);
        }
        (total, max)
    };
    Ok((sum.total(), max))
}
