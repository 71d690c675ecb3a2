//! Wald-type F statistics for mean shifts and the LWZ criterion.

use alloc::vec;
use alloc::vec::Vec;

use super::segment::{BreakSearch, SegmentCosts};
use super::BreakVariance;
use crate::hac::{andrews_bandwidth, long_run_covariance, Bandwidth, KernelSpec};
use crate::linalg::{spd_inverse, Matrix};
use crate::{Error, Result};

/// LWZ penalty constants.
pub const LWZ_C0: f64 = 0.299;
pub const LWZ_DELTA0: f64 = 0.1;

/// Residual sums below this fraction of the total sum of squares count as an
/// exact fit.
const EXACT_FIT: f64 = 1e-20;

pub(crate) fn regime_means(values: &[f64], breaks: &[usize]) -> Vec<f64> {
    bounds(values.len(), breaks)
        .map(|(a, b)| values[a..b].iter().sum::<f64>() / (b - a) as f64)
        .collect()
}

pub(crate) fn bounds(len: usize, breaks: &[usize]) -> impl Iterator<Item = (usize, usize)> + '_ {
    let starts = core::iter::once(0).chain(breaks.iter().copied());
    let ends = breaks.iter().copied().chain(core::iter::once(len));
    starts.zip(ends)
}

/// Residuals from regime means, plus their sum of squares.
pub(crate) fn residuals(values: &[f64], breaks: &[usize], means: &[f64]) -> (Vec<f64>, f64) {
    let mut out = Vec::with_capacity(values.len());
    for ((a, b), m) in bounds(values.len(), breaks).zip(means) {
        out.extend(values[a..b].iter().map(|v| v - m));
    }
    let ssr = out.iter().map(|e| e * e).sum();
    (out, ssr)
}

/// Bandwidth for the regime-dummy moments: resolved on the residual series
/// (the dummy columns themselves are mostly zeros) and capped below the
/// sample length.
pub(crate) fn moment_bandwidth(resid: &[f64], spec: &KernelSpec) -> Result<f64> {
    let bw = match spec.bandwidth {
        Bandwidth::Fixed(b) => b,
        Bandwidth::Andrews => andrews_bandwidth(&Matrix::from_columns(&[resid])?, spec.kind)?,
    };
    Ok(bw.min((resid.len() - 1) as f64))
}

/// Kernel covariance of the regime means, `Var(delta_hat)`.
pub(crate) fn robust_mean_covariance(
    resid: &[f64],
    breaks: &[usize],
    spec: &KernelSpec,
) -> Result<Matrix> {
    let t = resid.len();
    let q = breaks.len() + 1;
    let mut g = Matrix::zeros(t, q);
    let mut sizes = vec![0.0; q];
    for (j, (a, b)) in bounds(t, breaks).enumerate() {
        sizes[j] = (b - a) as f64;
        for i in a..b {
            g[(i, j)] = resid[i];
        }
    }
    let bw = moment_bandwidth(resid, spec)?;
    let s = long_run_covariance(&g, &KernelSpec::fixed(spec.kind, bw)?)?.matrix;
    let mut v = Matrix::zeros(q, q);
    for a in 0..q {
        for b in 0..q {
            v[(a, b)] = t as f64 * s[(a, b)] / (sizes[a] * sizes[b]);
        }
    }
    Ok(v)
}

/// F statistic for "no change" against the mean shifts at `breaks`.
///
/// The homoscedastic form is the textbook
/// `((SSR_0 - SSR_k) / k) / (SSR_k / (T - k - 1))`; the robust form replaces
/// the variance by the kernel sandwich and scales the Wald statistic the same
/// way, so both agree when the kernel estimate reduces to `SSR_k / T`.
pub fn mean_shift_f(values: &[f64], breaks: &[usize], variance: &BreakVariance) -> Result<f64> {
    let t = values.len();
    let k = breaks.len();
    if k == 0 {
        return Err(Error::InvalidParameter("F statistic needs at least one break".into()));
    }
    if t <= k + 1 {
        return Err(Error::TooShort { needed: k + 2, got: t });
    }
    let means = regime_means(values, breaks);
    let (resid, ssr) = residuals(values, breaks, &means);
    let grand = values.iter().sum::<f64>() / t as f64;
    let ssr0: f64 = values.iter().map(|v| (v - grand) * (v - grand)).sum();
    if ssr <= EXACT_FIT * ssr0 || ssr0 == 0.0 {
        return Ok(if ssr0 == 0.0 { 0.0 } else { f64::INFINITY });
    }
    let scale = (t - k - 1) as f64 / (t as f64 * k as f64);
    let homoscedastic = || {
        let sigma2 = ssr / t as f64;
        ((ssr0 - ssr) / sigma2).max(0.0) * scale
    };
    let spec = match variance {
        BreakVariance::Homoscedastic => return Ok(homoscedastic()),
        BreakVariance::Robust(spec) => spec,
    };
    let v = robust_mean_covariance(&resid, breaks, spec)?;
    // R delta with R the adjacent-difference contrast
    let d: Vec<f64> = means.windows(2).map(|w| w[0] - w[1]).collect();
    let mut rvr = Matrix::zeros(k, k);
    for a in 0..k {
        for b in 0..k {
            rvr[(a, b)] = v[(a, b)] - v[(a, b + 1)] - v[(a + 1, b)] + v[(a + 1, b + 1)];
        }
    }
    match spd_inverse(&rvr) {
        Ok(inv) => {
            let w: f64 = inv.matvec(&d).iter().zip(&d).map(|(a, b)| a * b).sum();
            Ok(w.max(0.0) * scale)
        }
        // a regime with identically zero residuals leaves the sandwich singular
        Err(Error::RankDeficient) => Ok(homoscedastic()),
        Err(e) => Err(e),
    }
}

/// sup-F(m|0) at the global minimizer for `m` breaks.
pub(crate) fn sup_f_m(values: &[f64], search: &BreakSearch, m: usize, variance: &BreakVariance) -> Result<f64> {
    mean_shift_f(values, &search.breaks(m), variance)
}

/// F(l+1|l): the largest single-break statistic over the segments of the
/// `l`-break optimum that can hold one more admissible break.
pub(crate) fn sequential_f(
    values: &[f64],
    search: &BreakSearch,
    l: usize,
    variance: &BreakVariance,
) -> Result<Option<f64>> {
    if l == 0 {
        if search.max_breaks() < 1 {
            return Ok(None);
        }
        return sup_f_m(values, search, 1, variance).map(Some);
    }
    let costs: &SegmentCosts = search.costs();
    let breaks = search.breaks(l);
    let mut best: Option<f64> = None;
    for (a, b) in bounds(values.len(), &breaks) {
        if b - a < 2 * costs.min_len() {
            continue;
        }
        let (tau, _) = match costs.best_split(a..b) {
            Some(s) => s,
            None => continue,
        };
        let f = mean_shift_f(&values[a..b], &[tau - a], variance)?;
        if best.is_none_or(|x| f > x) {
            best = Some(f);
        }
    }
    Ok(best)
}

/// Number of estimated parameters in an `m`-break mean-shift model.
pub fn lwz_parameters(m: usize) -> usize {
    2 * m + 1
}

pub fn lwz(ssr: f64, len: usize, m: usize) -> f64 {
    let t = len as f64;
    let p = lwz_parameters(m) as f64;
    let ln_t = libm::log(t);
    libm::log(ssr / (t - p)) + p * LWZ_C0 * libm::pow(ln_t, 2.0 + LWZ_DELTA0) / t
}
