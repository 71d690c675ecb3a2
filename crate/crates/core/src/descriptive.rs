//! Summary statistics, percentile profiles and outlier-aware standardization.

use alloc::vec::Vec;

use crate::{Error, Result};

pub fn mean(values: &[f64]) -> f64 {
    values.iter().sum::<f64>() / values.len() as f64
}

/// Sample standard deviation (n - 1 denominator), two-pass.
pub fn sample_std(values: &[f64]) -> f64 {
    let m = mean(values);
    let ss: f64 = values.iter().map(|v| (v - m) * (v - m)).sum();
    libm::sqrt(ss / (values.len() as f64 - 1.0))
}

#[derive(Debug, Clone, PartialEq)]
pub struct SummaryStats {
    pub n: usize,
    pub mean: f64,
    pub stddev: f64,
    pub min: f64,
    pub max: f64,
    /// Autocorrelations at lags 1, 2 and 3.
    pub rho: [f64; 3],
}

/// Mean, sample standard deviation, range and lag 1..3 autocorrelations.
///
/// Autocorrelations use the full-sample mean and the full-sample sum of
/// squares in the denominator.
pub fn summary(values: &[f64]) -> Result<SummaryStats> {
    let n = values.len();
    if n < 4 {
        return Err(Error::TooShort { needed: 4, got: n });
    }
    if let Some(index) = values.iter().position(|v| !v.is_finite()) {
        return Err(Error::NonFinite { index });
    }
    let m = mean(values);
    let dev: Vec<f64> = values.iter().map(|v| v - m).collect();
    let ss: f64 = dev.iter().map(|d| d * d).sum();
    if ss == 0.0 {
        return Err(Error::ZeroVariance("autocorrelation of a constant series"));
    }
    let mut rho = [0.0; 3];
    for (k, r) in rho.iter_mut().enumerate() {
        let lag = k + 1;
        let num: f64 = dev[lag..].iter().zip(&dev[..n - lag]).map(|(a, b)| a * b).sum();
        *r = num / ss;
    }
    let min = values.iter().copied().fold(f64::INFINITY, f64::min);
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    Ok(SummaryStats {
        n,
        // rounding can push the mean of a near-constant series just outside [min, max]
        mean: m.clamp(min, max),
        stddev: libm::sqrt(ss / (n as f64 - 1.0)),
        min,
        max,
        rho,
    })
}

/// Percentile levels reported by [`percentile_profile`].
pub const PROFILE_LEVELS: [u32; 7] = [5, 10, 25, 50, 75, 90, 95];

#[derive(Debug, Clone, PartialEq)]
pub struct PercentileProfile {
    pub n: usize,
    /// Values at [`PROFILE_LEVELS`], same order.
    pub percentiles: [f64; 7],
    /// p75 - p25.
    pub normal50: f64,
    /// p95 - p5.
    pub normal90: f64,
}

impl PercentileProfile {
    pub fn at(&self, level: u32) -> Option<f64> {
        PROFILE_LEVELS
            .iter()
            .position(|&l| l == level)
            .map(|i| self.percentiles[i])
    }

    pub fn median(&self) -> f64 {
        self.percentiles[3]
    }
}

/// Quantile of already sorted data, interpolating linearly between order
/// statistics at position `h = (n - 1) q` (zero based).
pub fn quantile_sorted(sorted: &[f64], q: f64) -> f64 {
    let h = (sorted.len() - 1) as f64 * q;
    let lo = libm::floor(h) as usize;
    let hi = (lo + 1).min(sorted.len() - 1);
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

pub fn percentile_profile(values: &[f64]) -> Result<PercentileProfile> {
    if values.len() < 20 {
        return Err(Error::TooShort {
            needed: 20,
            got: values.len(),
        });
    }
    if let Some(index) = values.iter().position(|v| !v.is_finite()) {
        return Err(Error::NonFinite { index });
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let mut percentiles = [0.0; 7];
    for (p, level) in percentiles.iter_mut().zip(PROFILE_LEVELS) {
        *p = quantile_sorted(&sorted, level as f64 / 100.0);
    }
    Ok(PercentileProfile {
        n: values.len(),
        normal50: percentiles[4] - percentiles[2],
        normal90: percentiles[6] - percentiles[0],
        percentiles,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct Standardized {
    /// z-scores of the retained observations, in original order.
    pub values: Vec<f64>,
    /// Positions of the dropped observations.
    pub excluded: Vec<usize>,
}

/// Positions whose absolute value exceeds `mean + k * sd` of the full sample.
pub fn outliers(values: &[f64], k: f64) -> Result<Vec<usize>> {
    if let Some(index) = values.iter().position(|v| !v.is_finite()) {
        return Err(Error::NonFinite { index });
    }
    if k.is_nan() {
        return Err(Error::InvalidParameter("outlier multiplier is NaN".into()));
    }
    if values.len() < 2 {
        return Err(Error::TooShort { needed: 2, got: values.len() });
    }
    let s = sample_std(values);
    if s == 0.0 {
        return Err(Error::ZeroVariance("standardization of a constant series"));
    }
    let threshold = mean(values) + k * s;
    Ok(values
        .iter()
        .enumerate()
        .filter(|(_, v)| libm::fabs(**v) > threshold)
        .map(|(i, _)| i)
        .collect())
}

/// Drops [`outliers`], then standardizes the remaining observations with
/// their own mean and sample standard deviation.
pub fn standardize_excluding_outliers(values: &[f64], k: f64) -> Result<Standardized> {
    if values.len() < 10 {
        return Err(Error::TooShort {
            needed: 10,
            got: values.len(),
        });
    }
    let excluded = outliers(values, k)?;
    let mut kept = Vec::with_capacity(values.len() - excluded.len());
    let mut skip = excluded.iter().peekable();
    for (i, &v) in values.iter().enumerate() {
        if skip.peek() == Some(&&i) {
            skip.next();
        } else {
            kept.push(v);
        }
    }
    match kept.len() {
        0 => return Err(Error::AllExcluded),
        1 => return Err(Error::ZeroVariance("a single retained observation")),
        _ => {}
    }
    let m2 = mean(&kept);
    let s2 = sample_std(&kept);
    if s2 == 0.0 {
        return Err(Error::ZeroVariance("standardization after outlier exclusion"));
    }
    Ok(Standardized {
        values: kept.iter().map(|v| (v - m2) / s2).collect(),
        excluded,
    })
}
