//! Augmented Dickey-Fuller unit-root test.

use alloc::vec::Vec;

use crate::dist::{CriticalValues, Stars};
use crate::linalg::{least_squares, Matrix};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum AdfVariant {
    None,
    #[default]
    Constant,
    ConstantAndTrend,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LagRule {
    Fixed(usize),
    /// Lag order in `0..=max` minimizing AIC on a common sample.
    Aic { max: usize },
}

impl Default for LagRule {
    fn default() -> Self {
        LagRule::Fixed(1)
    }
}

impl LagRule {
    fn max_lags(self) -> usize {
        match self {
            LagRule::Fixed(k) => k,
            LagRule::Aic { max } => max,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AdfResult {
    /// t-ratio on the lagged level.
    pub statistic: f64,
    pub lags: usize,
    pub variant: AdfVariant,
    pub n_used: usize,
    pub critical_values: CriticalValues,
    /// Rejection of the unit root at 10% / 5% / 1%.
    pub rejection: Stars,
}

impl AdfResult {
    pub fn rejects_at(&self, level: f64) -> bool {
        self.rejection.rejects_at(level)
    }
}

// MacKinnon (2010) response surfaces, one regressor:
// cv(T) = b0 + b1/T + b2/T^2 + b3/T^3, rows at 1%, 5%, 10%.
const SURFACE_NONE: [[f64; 4]; 3] = [
    [-2.56574, -2.2358, -3.627, 0.0],
    [-1.94100, -0.2686, -3.365, 31.223],
    [-1.61682, 0.2656, -2.714, 25.364],
];
const SURFACE_CONSTANT: [[f64; 4]; 3] = [
    [-3.43035, -6.5393, -16.786, -79.433],
    [-2.86154, -2.8903, -4.234, -40.040],
    [-2.56677, -1.5384, -2.809, 0.0],
];
const SURFACE_TREND: [[f64; 4]; 3] = [
    [-3.95877, -9.0531, -28.428, -134.155],
    [-3.41049, -4.3904, -9.036, -45.374],
    [-3.12705, -2.5856, -3.925, -22.380],
];

/// Finite-sample critical values (lower tail) for `n` usable observations.
pub fn critical_values(variant: AdfVariant, n: usize) -> CriticalValues {
    let table = match variant {
        AdfVariant::None => &SURFACE_NONE,
        AdfVariant::Constant => &SURFACE_CONSTANT,
        AdfVariant::ConstantAndTrend => &SURFACE_TREND,
    };
    let inv = 1.0 / n as f64;
    let eval = |c: &[f64; 4]| c[0] + c[1] * inv + c[2] * inv * inv + c[3] * inv * inv * inv;
    CriticalValues {
        one: eval(&table[0]),
        five: eval(&table[1]),
        ten: eval(&table[2]),
    }
}

pub fn adf_test(values: &[f64], variant: AdfVariant, lag_rule: LagRule) -> Result<AdfResult> {
    let max_lags = lag_rule.max_lags();
    let needed = 25 + max_lags;
    if values.len() < needed {
        return Err(Error::TooShort {
            needed,
            got: values.len(),
        });
    }
    if let Some(index) = values.iter().position(|v| !v.is_finite()) {
        return Err(Error::NonFinite { index });
    }
    let diffs: Vec<f64> = values.windows(2).map(|w| w[1] - w[0]).collect();
    if diffs.iter().all(|d| *d == 0.0) {
        return Err(Error::RankDeficient);
    }
    let lags = match lag_rule {
        LagRule::Fixed(k) => k,
        LagRule::Aic { max } => {
            let mut best = (f64::INFINITY, 0);
            for k in 0..=max {
                let (x, y) = design(values, &diffs, variant, k, max);
                let fit = least_squares(&x, &y)?;
                let n = y.len() as f64;
                let ssr: f64 = fit.residuals.iter().map(|r| r * r).sum();
                let aic = n * libm::log(ssr / n) + 2.0 * x.cols() as f64;
                if aic < best.0 {
                    best = (aic, k);
                }
            }
            best.1
        }
    };
    let (x, y) = design(values, &diffs, variant, lags, lags);
    let fit = least_squares(&x, &y)?;
    let n_used = y.len();
    let dof = n_used - x.cols();
    let ssr: f64 = fit.residuals.iter().map(|r| r * r).sum();
    let sigma2 = ssr / dof as f64;
    let level_col = deterministic_terms(variant);
    let se = libm::sqrt(sigma2 * fit.xtx_inverse[(level_col, level_col)]);
    let statistic = fit.coefficients[level_col] / se;
    if !statistic.is_finite() {
        return Err(Error::ZeroVariance("ADF regression residuals"));
    }
    let cv = critical_values(variant, n_used);
    // lower-tail test: flip signs to reuse the upper-tail star rule
    let rejection = Stars::from_critical(
        -statistic,
        &CriticalValues {
            ten: -cv.ten,
            five: -cv.five,
            one: -cv.one,
        },
    );
    Ok(AdfResult {
        statistic,
        lags,
        variant,
        n_used,
        critical_values: cv,
        rejection,
    })
}

fn deterministic_terms(variant: AdfVariant) -> usize {
    match variant {
        AdfVariant::None => 0,
        AdfVariant::Constant => 1,
        AdfVariant::ConstantAndTrend => 2,
    }
}

/// Regression of `dy_t` on deterministic terms, `y_{t-1}` and `k` lagged
/// differences, over `t` such that `skip` lagged differences are available.
fn design(
    levels: &[f64],
    diffs: &[f64],
    variant: AdfVariant,
    k: usize,
    skip: usize,
) -> (Matrix, Vec<f64>) {
    let det = deterministic_terms(variant);
    let cols = det + 1 + k;
    // diffs[i] = levels[i + 1] - levels[i]
    let rows: Vec<usize> = (skip..diffs.len()).collect();
    let mut x = Matrix::zeros(rows.len(), cols);
    let mut y = Vec::with_capacity(rows.len());
    for (r, &i) in rows.iter().enumerate() {
        y.push(diffs[i]);
        let mut c = 0;
        if det >= 1 {
            x[(r, c)] = 1.0;
            c += 1;
        }
        if det == 2 {
            x[(r, c)] = (i + 1) as f64;
            c += 1;
        }
        x[(r, c)] = levels[i];
        c += 1;
        for lag in 1..=k {
            x[(r, c)] = diffs[i - lag];
            c += 1;
        }
    }
    (x, y)
}
