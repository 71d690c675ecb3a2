//! Segment costs and the dynamic program for globally optimal break dates.

use alloc::vec;
use alloc::vec::Vec;
use core::ops::Range;

use crate::{Error, Result};

/// Sum of squared deviations from the segment mean for every segment of a
/// series, answered in O(1) from prefix sums of the centered values.
///
/// Segments are half-open index ranges `start..end`.
#[derive(Debug, Clone)]
pub struct SegmentCosts {
    sum: Vec<f64>,
    sum_sq: Vec<f64>,
    min_len: usize,
}

impl SegmentCosts {
    pub fn new(values: &[f64], min_len: usize) -> Result<Self> {
        if min_len == 0 {
            return Err(Error::InvalidParameter("minimal segment length is zero".into()));
        }
        if values.len() < 2 * min_len {
            return Err(Error::TooShort {
                needed: 2 * min_len,
                got: values.len(),
            });
        }
        if let Some(index) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite { index });
        }
        let center = values.iter().sum::<f64>() / values.len() as f64;
        let mut sum = Vec::with_capacity(values.len() + 1);
        let mut sum_sq = Vec::with_capacity(values.len() + 1);
        let (mut s, mut s2) = (0.0, 0.0);
        sum.push(0.0);
        sum_sq.push(0.0);
        for v in values {
            let c = v - center;
            s += c;
            s2 += c * c;
            sum.push(s);
            sum_sq.push(s2);
        }
        Ok(Self {
            sum,
            sum_sq,
            min_len,
        })
    }

    pub fn len(&self) -> usize {
        self.sum.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn min_len(&self) -> usize {
        self.min_len
    }

    /// Whether `start..end` is long enough to be a regime.
    pub fn admissible(&self, start: usize, end: usize) -> bool {
        end <= self.len() && end >= start + self.min_len
    }

    pub fn cost(&self, start: usize, end: usize) -> f64 {
        debug_assert!(start < end && end <= self.len());
        let s = self.sum[end] - self.sum[start];
        let s2 = self.sum_sq[end] - self.sum_sq[start];
        (s2 - s * s / (end - start) as f64).max(0.0)
    }

    /// Best single split of `range` into two admissible pieces: the end of
    /// the first piece and the combined cost. Ties go to the earliest split.
    pub fn best_split(&self, range: Range<usize>) -> Option<(usize, f64)> {
        let (lo, hi) = (range.start + self.min_len, range.end.checked_sub(self.min_len)?);
        let mut best: Option<(usize, f64)> = None;
        for tau in lo..=hi {
            let c = self.cost(range.start, tau) + self.cost(tau, range.end);
            if best.is_none_or(|(_, b)| c < b) {
                best = Some((tau, c));
            }
        }
        best
    }
}

/// Segment-cost table for a trimming fraction `h`: minimal segment length
/// `ceil(h T)`.
pub fn segment_cost_table(values: &[f64], trimming: f64) -> Result<SegmentCosts> {
    SegmentCosts::new(values, min_segment_length(trimming, values.len()))
}

pub(crate) fn min_segment_length(trimming: f64, len: usize) -> usize {
    libm::ceil(trimming * len as f64 - 1e-9).max(0.0) as usize
}

/// Optimal partitions for every break count up to a maximum, from one pass
/// of the dynamic program.
///
/// `best[k][i]` is the least cost of cutting `i..T` into `k + 1` admissible
/// segments. Reconstruction walks forward from the first observation and
/// always takes the earliest optimal cut, which yields the lexicographically
/// smallest optimal break sequence.
#[derive(Debug, Clone)]
pub struct BreakSearch {
    costs: SegmentCosts,
    best: Vec<Vec<f64>>,
    cut: Vec<Vec<usize>>,
}

impl BreakSearch {
    pub fn new(costs: SegmentCosts, max_breaks: usize) -> Result<Self> {
        let t = costs.len();
        let l = costs.min_len();
        if (max_breaks + 1) * l > t {
            return Err(Error::Infeasible {
                breaks: max_breaks,
                min_len: l,
                len: t,
            });
        }
        let mut best = vec![vec![f64::INFINITY; t + 1]; max_breaks + 1];
        let mut cut = vec![vec![usize::MAX; t + 1]; max_breaks + 1];
        for i in 0..=(t - l) {
            best[0][i] = costs.cost(i, t);
        }
        for k in 1..=max_breaks {
            let (done, rest) = best.split_at_mut(k);
            let prev = &done[k - 1];
            let cur = &mut rest[0];
            // i..T must hold k + 1 segments
            for i in 0..=(t - (k + 1) * l) {
                let mut min = f64::INFINITY;
                let mut arg = usize::MAX;
                for b in (i + l)..=(t - k * l) {
                    let c = costs.cost(i, b) + prev[b];
                    if c < min {
                        min = c;
                        arg = b;
                    }
                }
                cur[i] = min;
                cut[k][i] = arg;
            }
        }
        Ok(Self { costs, best, cut })
    }

    pub fn costs(&self) -> &SegmentCosts {
        &self.costs
    }

    pub fn max_breaks(&self) -> usize {
        self.best.len() - 1
    }

    /// Least total cost with `m` breaks.
    pub fn optimal_cost(&self, m: usize) -> f64 {
        self.best[m][0]
    }

    /// Break indices (regime end positions, exclusive) of the optimum.
    pub fn breaks(&self, m: usize) -> Vec<usize> {
        assert!(m <= self.max_breaks());
        let mut out = Vec::with_capacity(m);
        let mut i = 0;
        for k in (1..=m).rev() {
            i = self.cut[k][i];
            out.push(i);
        }
        out
    }
}
