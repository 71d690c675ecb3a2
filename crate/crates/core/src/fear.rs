//! The intertemporal "fear gauge" regression
//!
//! ```text
//! cVIX_t = a + sum_{i=-2}^{2} b_i R_{t+i} + b_abs |R_t| + e_t
//! ```
//!
//! estimated by exactly identified GMM (instruments = regressors), i.e. least
//! squares point estimates with a kernel (HAC) sandwich covariance, plus the
//! lead-lag correlation table between index changes and returns.

use alloc::string::{String, ToString};
use alloc::vec::Vec;

use chrono::NaiveDate;

use crate::dist::{normal_two_sided_p, student_t_two_sided_p, Stars};
use crate::hac::{long_run_covariance, KernelSpec};
use crate::linalg::{least_squares, Matrix};
use crate::series::{DateWindow, ReturnPanel};
use crate::{Error, Result};

pub const NUM_COEFFICIENTS: usize = 7;

/// Column labels of the design, in order.
pub const COEFFICIENT_NAMES: [&str; NUM_COEFFICIENTS] =
    ["alpha", "beta_t-2", "beta_t-1", "beta_t", "beta_t+1", "beta_t+2", "beta_abs"];

/// Lead/lag offsets of the return columns.
pub const OFFSETS: [i32; 5] = [-2, -1, 0, 1, 2];

/// Fewest observations a window may hold before trimming leads and lags.
pub const MIN_WINDOW: usize = 5;

#[derive(Debug, Clone, PartialEq)]
pub struct FearModelDesign {
    pub market_id: String,
    pub y: Vec<f64>,
    /// Columns `[1, R_{t-2}, R_{t-1}, R_t, R_{t+1}, R_{t+2}, |R_t|]`.
    pub x: Matrix,
    pub dates: Vec<NaiveDate>,
    /// Set when the columns are linearly dependent (e.g. constant returns);
    /// [`estimate`] refuses such designs.
    pub rank_deficient: bool,
}

impl FearModelDesign {
    /// Design from aligned index changes and returns; the first and last two
    /// observations only serve as leads and lags.
    pub fn from_series(
        market_id: &str,
        dates: &[NaiveDate],
        changes: &[f64],
        returns: &[f64],
    ) -> Result<Self> {
        let len = dates.len();
        for other in [changes.len(), returns.len()] {
            if other != len {
                return Err(Error::LengthMismatch { expected: len, got: other });
            }
        }
        if len < MIN_WINDOW {
            return Err(Error::TooShort {
                needed: MIN_WINDOW,
                got: len,
            });
        }
        if let Some(index) = changes.iter().chain(returns).position(|v| !v.is_finite()) {
            return Err(Error::NonFinite { index: index % len });
        }
        let n = len - 4;
        let mut x = Matrix::zeros(n, NUM_COEFFICIENTS);
        for r in 0..n {
            let t = r + 2;
            x[(r, 0)] = 1.0;
            for (c, off) in OFFSETS.iter().enumerate() {
                x[(r, c + 1)] = returns[(t as i64 + *off as i64) as usize];
            }
            x[(r, 6)] = libm::fabs(returns[t]);
        }
        let y = changes[2..len - 2].to_vec();
        let rank_deficient = matches!(least_squares(&x, &y), Err(Error::RankDeficient));
        Ok(Self {
            market_id: market_id.to_string(),
            y,
            x,
            dates: dates[2..len - 2].to_vec(),
            rank_deficient,
        })
    }

    pub fn n(&self) -> usize {
        self.y.len()
    }
}

/// Design for one market over an optional date window of a return panel.
pub fn build_design(
    panel: &ReturnPanel,
    market_id: &str,
    window: Option<&DateWindow>,
) -> Result<FearModelDesign> {
    let market = panel.market(market_id)?;
    let range = match window {
        Some(w) => panel.window_range(w),
        None => 0..panel.len(),
    };
    FearModelDesign::from_series(
        market_id,
        &panel.dates[range.clone()],
        &panel.index_changes.values[range.clone()],
        &market.values[range],
    )
}

#[derive(Debug, Clone, PartialEq)]
pub struct FearModelEstimate {
    pub market_id: String,
    /// All coefficients in design order; see [`COEFFICIENT_NAMES`].
    pub coefficients: [f64; NUM_COEFFICIENTS],
    pub se: [f64; NUM_COEFFICIENTS],
    pub tstat: [f64; NUM_COEFFICIENTS],
    /// Stars from the asymptotic normal two-sided p-value.
    pub stars: [Stars; NUM_COEFFICIENTS],
    pub beta_plus: f64,
    pub beta_minus: f64,
    pub residuals: Vec<f64>,
    pub n: usize,
    pub bandwidth: f64,
    pub start: NaiveDate,
    pub end: NaiveDate,
}

impl FearModelEstimate {
    pub fn alpha(&self) -> f64 {
        self.coefficients[0]
    }

    /// Coefficients on `R_{t-2} .. R_{t+2}`.
    pub fn beta(&self) -> [f64; 5] {
        let c = &self.coefficients;
        [c[1], c[2], c[3], c[4], c[5]]
    }

    pub fn beta_t(&self) -> f64 {
        self.coefficients[3]
    }

    pub fn beta_abs(&self) -> f64 {
        self.coefficients[6]
    }
}

pub fn estimate(design: &FearModelDesign, kernel: &KernelSpec) -> Result<FearModelEstimate> {
    if design.rank_deficient {
        return Err(Error::RankDeficient);
    }
    let n = design.n();
    let needed = 3 * NUM_COEFFICIENTS + 1;
    if n < needed {
        return Err(Error::TooShort { needed, got: n });
    }
    let fit = least_squares(&design.x, &design.y)?;
    let mut g = design.x.clone();
    for (i, e) in fit.residuals.iter().enumerate() {
        for j in 0..NUM_COEFFICIENTS {
            g[(i, j)] *= e;
        }
    }
    let lrv = long_run_covariance(&g, kernel)?;
    let mut meat = lrv.matrix;
    meat.scale(n as f64);
    let mut cov = fit.xtx_inverse.matmul(&meat).matmul(&fit.xtx_inverse);
    cov.symmetrize();

    let mut coefficients = [0.0; NUM_COEFFICIENTS];
    let mut se = [0.0; NUM_COEFFICIENTS];
    let mut tstat = [0.0; NUM_COEFFICIENTS];
    let mut stars = [Stars::None; NUM_COEFFICIENTS];
    for j in 0..NUM_COEFFICIENTS {
        coefficients[j] = fit.coefficients[j];
        se[j] = libm::sqrt(cov[(j, j)].max(0.0));
        tstat[j] = coefficients[j] / se[j];
        stars[j] = Stars::from_p_value(normal_two_sided_p(tstat[j]));
    }
    let (beta_plus, beta_minus) = signed_responses(coefficients[3], coefficients[6]);
    Ok(FearModelEstimate {
        market_id: design.market_id.clone(),
        coefficients,
        se,
        tstat,
        stars,
        beta_plus,
        beta_minus,
        residuals: fit.residuals,
        n,
        bandwidth: lrv.bandwidth_used,
        start: design.dates[0],
        end: design.dates[n - 1],
    })
}

/// Responses to positive and negative returns: `b_t + b_abs`, `b_t - b_abs`.
pub fn signed_responses(beta_t: f64, beta_abs: f64) -> (f64, f64) {
    (beta_t + beta_abs, beta_t - beta_abs)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Dominance {
    /// `|b-| > |b+|`: falling markets move the index more.
    Negative,
    Positive,
    Neither,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AsymmetrySummary {
    pub abs_beta_plus: f64,
    pub abs_beta_minus: f64,
    pub dominant: Dominance,
}

pub fn asymmetry_summary(beta_plus: f64, beta_minus: f64) -> AsymmetrySummary {
    let (p, m) = (libm::fabs(beta_plus), libm::fabs(beta_minus));
    let dominant = if m > p {
        Dominance::Negative
    } else if p > m {
        Dominance::Positive
    } else {
        Dominance::Neither
    };
    AsymmetrySummary {
        abs_beta_plus: p,
        abs_beta_minus: m,
        dominant,
    }
}

impl FearModelEstimate {
    pub fn asymmetry(&self) -> AsymmetrySummary {
        asymmetry_summary(self.beta_plus, self.beta_minus)
    }
}

/// Correlation of `cVIX_t` with `R_{t+offset}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OffsetCorrelation {
    pub offset: i32,
    pub r: f64,
    pub n: usize,
    pub p_value: f64,
    pub stars: Stars,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LeadLagCorrelation {
    pub market_id: String,
    pub by_offset: Vec<OffsetCorrelation>,
}

impl LeadLagCorrelation {
    pub fn at(&self, offset: i32) -> Option<&OffsetCorrelation> {
        self.by_offset.iter().find(|c| c.offset == offset)
    }
}

/// Minimum overlap for a correlation.
pub const MIN_OVERLAP: usize = 10;

pub fn leadlag_correlations(
    market_id: &str,
    changes: &[f64],
    returns: &[f64],
    offsets: &[i32],
) -> Result<LeadLagCorrelation> {
    if changes.len() != returns.len() {
        return Err(Error::LengthMismatch {
            expected: changes.len(),
            got: returns.len(),
        });
    }
    let len = changes.len() as i64;
    let mut by_offset = Vec::with_capacity(offsets.len());
    for &offset in offsets {
        let k = offset as i64;
        // t and t + k both inside 0..len
        let lo = (-k).max(0);
        let hi = (len - k).min(len);
        let n = (hi - lo).max(0) as usize;
        if n < MIN_OVERLAP {
            return Err(Error::TooShort {
                needed: MIN_OVERLAP,
                got: n,
            });
        }
        let a = &changes[lo as usize..hi as usize];
        let b = &returns[(lo + k) as usize..(hi + k) as usize];
        let r = pearson(a, b)?;
        let df = (n - 2) as f64;
        let t = if libm::fabs(r) >= 1.0 {
            f64::INFINITY.copysign(r)
        } else {
            r * libm::sqrt(df / (1.0 - r * r))
        };
        let p_value = student_t_two_sided_p(t, df);
        by_offset.push(OffsetCorrelation {
            offset,
            r,
            n,
            p_value,
            stars: Stars::from_p_value(p_value),
        });
    }
    Ok(LeadLagCorrelation {
        market_id: market_id.to_string(),
        by_offset,
    })
}

fn pearson(a: &[f64], b: &[f64]) -> Result<f64> {
    let n = a.len() as f64;
    let ma = a.iter().sum::<f64>() / n;
    let mb = b.iter().sum::<f64>() / n;
    let (mut sab, mut saa, mut sbb) = (0.0, 0.0, 0.0);
    for (x, y) in a.iter().zip(b) {
        let (dx, dy) = (x - ma, y - mb);
        sab += dx * dy;
        saa += dx * dx;
        sbb += dy * dy;
    }
    if saa == 0.0 || sbb == 0.0 {
        return Err(Error::ZeroVariance("correlation input"));
    }
    Ok((sab / libm::sqrt(saa * sbb)).clamp(-1.0, 1.0))
}
