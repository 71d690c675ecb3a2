//! Asymptotic confidence intervals for break dates.

use alloc::vec::Vec;

use super::stats::{moment_bandwidth, residuals};
use super::{BreakModel, BreakVariance};
use crate::dist::break_date_quantile;
use crate::hac::{long_run_variance, KernelSpec};
use crate::{Error, Result};

/// Interval around one break, in 1-based observation indices (a break at
/// `b` means the regime ends at observation `b`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BreakInterval {
    pub index: usize,
    pub lower90: usize,
    pub upper90: usize,
    pub lower95: usize,
    pub upper95: usize,
    /// Shift in means across the break (later minus earlier regime).
    pub shift: f64,
    /// Residual variance used for the scale.
    pub variance: f64,
}

/// Intervals `b -/+ ceil(q * sigma^2 / delta^2)` with `q` a quantile of the
/// limiting break-date distribution, clipped to `1..=T`.
///
/// `sigma^2` comes from the residuals of the two regimes adjacent to the
/// break: their kernel long-run variance, or their mean square in the
/// homoscedastic variant.
pub fn break_confidence_intervals(
    values: &[f64],
    model: &BreakModel,
    variance: &BreakVariance,
) -> Result<Vec<BreakInterval>> {
    let breaks = &model.break_indices;
    if breaks.is_empty() {
        return Err(Error::InvalidParameter("model has no breaks".into()));
    }
    if values.len() != model.len {
        return Err(Error::LengthMismatch {
            expected: model.len,
            got: values.len(),
        });
    }
    let shortest = model.regime_bounds().map(|(a, b)| b - a).min().unwrap_or(0);
    if shortest < 5 {
        return Err(Error::TooShort { needed: 5, got: shortest });
    }
    let (resid, _) = residuals(values, breaks, &model.regime_means);
    let q90 = break_date_quantile(0.95);
    let q95 = break_date_quantile(0.975);
    let t = values.len();
    let bounds: Vec<(usize, usize)> = model.regime_bounds().collect();
    let mut out = Vec::with_capacity(breaks.len());
    for (i, &b) in breaks.iter().enumerate() {
        let shift = model.regime_means[i + 1] - model.regime_means[i];
        if shift == 0.0 {
            return Err(Error::ZeroShift(i));
        }
        let local = &resid[bounds[i].0..bounds[i + 1].1];
        let sigma2 = local_variance(local, variance)?;
        let ratio = sigma2 / (shift * shift);
        let half90 = libm::ceil(q90 * ratio) as usize;
        let half95 = libm::ceil(q95 * ratio) as usize;
        let clip = |half: usize| (b.saturating_sub(half).max(1), (b + half).min(t));
        let (lower90, upper90) = clip(half90);
        let (lower95, upper95) = clip(half95);
        out.push(BreakInterval {
            index: b,
            lower90,
            upper90,
            lower95,
            upper95,
            shift,
            variance: sigma2,
        });
    }
    Ok(out)
}

fn local_variance(resid: &[f64], variance: &BreakVariance) -> Result<f64> {
    if resid.iter().all(|e| *e == 0.0) {
        return Ok(0.0);
    }
    match variance {
        BreakVariance::Homoscedastic => {
            Ok(resid.iter().map(|e| e * e).sum::<f64>() / resid.len() as f64)
        }
        BreakVariance::Robust(spec) => {
            let bw = moment_bandwidth(resid, spec)?;
            // a long-run variance can come out slightly negative under strong
            // negative autocorrelation; the interval scale is floored at zero
            Ok(long_run_variance(resid, &KernelSpec::fixed(spec.kind, bw)?)?.max(0.0))
        }
    }
}
