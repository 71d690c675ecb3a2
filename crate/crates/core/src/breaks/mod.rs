//! Multiple structural breaks in the mean of a series (Bai-Perron).
//!
//! Break dates minimize the total sum of squared residuals globally, by
//! dynamic programming over segment costs. The number of breaks is chosen
//! by the LWZ criterion; UDmax and sequential F(l+1|l) tests are reported
//! alongside.
//!
//! A break index `b` is the 1-based position of the last observation of a
//! regime, equivalently the exclusive 0-based end of the regime.

mod critical;
mod intervals;
mod segment;
mod stats;

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::vec::Vec;

use chrono::NaiveDate;

use crate::dist::{normal_two_sided_p, CriticalValues, Stars};
use crate::hac::KernelSpec;
use crate::{Error, Result};

pub use critical::{sequential_critical_values, tabulated_trimmings, udmax_critical_values};
pub use intervals::{break_confidence_intervals, BreakInterval};
pub use segment::{segment_cost_table, BreakSearch, SegmentCosts};
pub use stats::{lwz, lwz_parameters, mean_shift_f, LWZ_C0, LWZ_DELTA0};

/// Variance used in the F statistics and break-date intervals.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BreakVariance {
    Homoscedastic,
    /// Kernel (HAC) estimate robust to serial correlation and
    /// heteroskedasticity.
    Robust(KernelSpec),
}

impl Default for BreakVariance {
    fn default() -> Self {
        BreakVariance::Robust(KernelSpec::default())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BreakConfig {
    pub trimming: f64,
    pub max_breaks: usize,
    /// Level of the sequential F tests.
    pub significance: f64,
    pub variance: BreakVariance,
}

impl Default for BreakConfig {
    fn default() -> Self {
        Self {
            trimming: 0.20,
            max_breaks: 5,
            significance: 0.05,
            variance: BreakVariance::default(),
        }
    }
}

impl BreakConfig {
    pub fn new(trimming: f64, max_breaks: usize) -> Result<Self> {
        let c = Self {
            trimming,
            max_breaks,
            ..Self::default()
        };
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.trimming > 0.0 && self.trimming < 0.5) {
            return Err(Error::InvalidParameter(format!(
                "trimming must lie in (0, 0.5), got {}",
                self.trimming
            )));
        }
        if self.max_breaks == 0 {
            return Err(Error::InvalidParameter("max_breaks must be at least 1".into()));
        }
        if ![0.10, 0.05, 0.01].iter().any(|l| libm::fabs(l - self.significance) < 1e-12) {
            return Err(Error::InvalidParameter(format!(
                "significance must be 0.10, 0.05 or 0.01, got {}",
                self.significance
            )));
        }
        Ok(())
    }

    pub fn min_segment_length(&self, len: usize) -> usize {
        segment::min_segment_length(self.trimming, len)
    }

    /// Largest break count that fits: at most `max_breaks`, `floor(1/h) - 1`
    /// and `T / ceil(hT) - 1`.
    pub fn effective_max_breaks(&self, len: usize) -> usize {
        let l = self.min_segment_length(len).max(1);
        let by_trim = (libm::floor(1.0 / self.trimming + 1e-9) as usize).saturating_sub(1);
        self.max_breaks.min(by_trim).min((len / l).saturating_sub(1))
    }
}

/// Least-squares mean-shift fit with a given set of breaks.
#[derive(Debug, Clone, PartialEq)]
pub struct BreakModel {
    pub break_indices: Vec<usize>,
    pub regime_means: Vec<f64>,
    pub ssr: f64,
    pub len: usize,
}

impl BreakModel {
    /// Fits regime means for fixed breaks; SSR is computed from residuals.
    pub fn fit(values: &[f64], break_indices: Vec<usize>) -> Result<Self> {
        let t = values.len();
        let mut prev = 0;
        for &b in &break_indices {
            if b <= prev || b >= t {
                return Err(Error::InvalidParameter(format!("break index {b} out of order or range")));
            }
            prev = b;
        }
        let regime_means = stats::regime_means(values, &break_indices);
        let (_, ssr) = stats::residuals(values, &break_indices, &regime_means);
        Ok(Self {
            break_indices,
            regime_means,
            ssr,
            len: t,
        })
    }

    pub fn num_breaks(&self) -> usize {
        self.break_indices.len()
    }

    /// Half-open 0-based index ranges of the regimes.
    pub fn regime_bounds(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        stats::bounds(self.len, &self.break_indices)
    }
}

/// Globally SSR-minimizing `m`-break model with minimal regime length
/// `ceil(h T)`.
pub fn global_minimizer(values: &[f64], m: usize, trimming: f64) -> Result<BreakModel> {
    if m == 0 {
        return Err(Error::InvalidParameter("break count must be at least 1".into()));
    }
    let search = BreakSearch::new(segment_cost_table(values, trimming)?, m)?;
    BreakModel::fit(values, search.breaks(m))
}

/// A test statistic with its critical values and stars.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TestStatistic {
    pub value: f64,
    /// `None` when no table exists for the trimming.
    pub critical_values: Option<CriticalValues>,
    pub stars: Stars,
}

impl TestStatistic {
    fn new(value: f64, critical_values: Option<CriticalValues>) -> Self {
        let stars = critical_values.map_or(Stars::None, |cv| Stars::from_critical(value, &cv));
        Self {
            value,
            critical_values,
            stars,
        }
    }
}

fn checked_search(values: &[f64], max_breaks: usize, trimming: f64) -> Result<BreakSearch> {
    let costs = segment_cost_table(values, trimming)?;
    if costs.min_len() < 2 {
        return Err(Error::InvalidParameter(format!(
            "minimal segment length {} is below 2",
            costs.min_len()
        )));
    }
    BreakSearch::new(costs, max_breaks)
}

/// F(l+1|l) with the robust variance by default.
pub fn sup_f_test(values: &[f64], l: usize, trimming: f64, variance: &BreakVariance) -> Result<TestStatistic> {
    let search = checked_search(values, l + 1, trimming)?;
    let value = stats::sequential_f(values, &search, l, variance)?.ok_or(Error::Infeasible {
        breaks: l + 1,
        min_len: search.costs().min_len(),
        len: values.len(),
    })?;
    Ok(TestStatistic::new(value, sequential_critical_values(trimming, l)))
}

#[derive(Debug, Clone, PartialEq)]
pub struct UdmaxResult {
    pub statistic: TestStatistic,
    /// sup-F(m|0) for m = 1..=M.
    pub sup_f: Vec<f64>,
}

pub fn udmax_test(values: &[f64], max_breaks: usize, trimming: f64, variance: &BreakVariance) -> Result<UdmaxResult> {
    let search = checked_search(values, max_breaks, trimming)?;
    udmax_from(values, &search, trimming, variance)
}

fn udmax_from(values: &[f64], search: &BreakSearch, trimming: f64, variance: &BreakVariance) -> Result<UdmaxResult> {
    let m_max = search.max_breaks();
    if m_max == 0 {
        return Err(Error::InvalidParameter("UDmax needs at least one break".into()));
    }
    let sup_f = (1..=m_max)
        .map(|m| stats::sup_f_m(values, search, m, variance))
        .collect::<Result<Vec<_>>>()?;
    let value = sup_f.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    Ok(UdmaxResult {
        statistic: TestStatistic::new(value, udmax_critical_values(trimming, m_max)),
        sup_f,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct LwzSelection {
    pub by_m: BTreeMap<usize, f64>,
    pub selected: usize,
}

pub fn lwz_select(values: &[f64], max_breaks: usize, trimming: f64) -> Result<LwzSelection> {
    let search = checked_search(values, max_breaks, trimming)?;
    Ok(lwz_from(&search))
}

fn lwz_from(search: &BreakSearch) -> LwzSelection {
    let t = search.costs().len();
    let mut by_m = BTreeMap::new();
    let mut selected = 0;
    let mut best = f64::INFINITY;
    for m in 0..=search.max_breaks() {
        let value = lwz(search.optimal_cost(m), t, m);
        by_m.insert(m, value);
        // strict comparison keeps the smallest m among ties
        if value < best {
            best = value;
            selected = m;
        }
    }
    LwzSelection { by_m, selected }
}

/// One regime of the selected model.
#[derive(Debug, Clone, PartialEq)]
pub struct Regime {
    /// 0-based first observation.
    pub start: usize,
    /// Exclusive end, i.e. the 1-based last observation.
    pub end: usize,
    pub start_date: NaiveDate,
    pub end_date: NaiveDate,
    pub mean: f64,
    pub std_error: f64,
    pub t_stat: f64,
    pub stars: Stars,
}

impl Regime {
    pub fn len(&self) -> usize {
        self.end - self.start
    }

    pub fn is_empty(&self) -> bool {
        self.end == self.start
    }
}

/// Break-date interval mapped to calendar dates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DatedInterval {
    pub interval: BreakInterval,
    pub date: NaiveDate,
    pub ci90: (NaiveDate, NaiveDate),
    pub ci95: (NaiveDate, NaiveDate),
}

#[derive(Debug, Clone, PartialEq)]
pub struct BreakTestReport {
    pub config: BreakConfig,
    pub len: usize,
    pub min_segment_length: usize,
    /// Largest break count actually examined.
    pub effective_max_breaks: usize,
    pub udmax: TestStatistic,
    /// sup-F(m|0) for m = 1..=effective_max_breaks.
    pub sup_f: Vec<f64>,
    /// F(l+1|l) for l = 0..max_breaks; `None` where no admissible extra
    /// break exists.
    pub seq_f: Vec<Option<TestStatistic>>,
    /// Break count from sequential testing at the configured level.
    pub sequential_m: usize,
    pub lwz_by_m: BTreeMap<usize, f64>,
    pub selected_m: usize,
    pub model: BreakModel,
    pub regimes: Vec<Regime>,
    pub intervals: Vec<DatedInterval>,
    /// Calendar dates of the break indices (regime end dates, excluding the
    /// sample end).
    pub dates: Vec<NaiveDate>,
    pub sample_end: NaiveDate,
}

pub fn run_bai_perron(values: &[f64], dates: &[NaiveDate], config: &BreakConfig) -> Result<BreakTestReport> {
    config.validate()?;
    if values.len() != dates.len() {
        return Err(Error::LengthMismatch {
            expected: values.len(),
            got: dates.len(),
        });
    }
    if let Some(index) = dates.windows(2).position(|w| w[1] <= w[0]) {
        return Err(Error::UnorderedDates { index: index + 1 });
    }
    let t = values.len();
    let m_eff = config.effective_max_breaks(t);
    if m_eff == 0 {
        return Err(Error::Infeasible {
            breaks: 1,
            min_len: config.min_segment_length(t),
            len: t,
        });
    }
    let search = checked_search(values, m_eff, config.trimming)?;
    let variance = &config.variance;

    let ud = udmax_from(values, &search, config.trimming, variance)?;
    let mut seq_f = Vec::with_capacity(config.max_breaks);
    for l in 0..config.max_breaks {
        let stat = if l < m_eff {
            stats::sequential_f(values, &search, l, variance)?
                .map(|v| TestStatistic::new(v, sequential_critical_values(config.trimming, l)))
        } else {
            None
        };
        seq_f.push(stat);
    }
    let sequential_m = seq_f
        .iter()
        .take_while(|s| s.is_some_and(|s| s.stars.rejects_at(config.significance)))
        .count();

    let lwz = lwz_from(&search);
    let model = BreakModel::fit(values, search.breaks(lwz.selected))?;
    let regimes = regimes(values, dates, &model, variance)?;
    let intervals = if model.num_breaks() > 0 {
        break_confidence_intervals(values, &model, variance)?
            .into_iter()
            .map(|iv| DatedInterval {
                interval: iv,
                date: dates[iv.index - 1],
                ci90: (dates[iv.lower90 - 1], dates[iv.upper90 - 1]),
                ci95: (dates[iv.lower95 - 1], dates[iv.upper95 - 1]),
            })
            .collect()
    } else {
        Vec::new()
    };
    Ok(BreakTestReport {
        config: *config,
        len: t,
        min_segment_length: search.costs().min_len(),
        effective_max_breaks: m_eff,
        udmax: ud.statistic,
        sup_f: ud.sup_f,
        seq_f,
        sequential_m,
        lwz_by_m: lwz.by_m,
        selected_m: lwz.selected,
        dates: model.break_indices.iter().map(|b| dates[b - 1]).collect(),
        sample_end: dates[t - 1],
        model,
        regimes,
        intervals,
    })
}

fn regimes(values: &[f64], dates: &[NaiveDate], model: &BreakModel, variance: &BreakVariance) -> Result<Vec<Regime>> {
    let (resid, ssr) = stats::residuals(values, &model.break_indices, &model.regime_means);
    let t = values.len();
    let se: Vec<f64> = if ssr == 0.0 {
        alloc::vec![0.0; model.regime_means.len()]
    } else {
        match variance {
            BreakVariance::Homoscedastic => {
                let s2 = ssr / (t - model.regime_means.len()) as f64;
                model.regime_bounds().map(|(a, b)| libm::sqrt(s2 / (b - a) as f64)).collect()
            }
            BreakVariance::Robust(spec) => {
                let v = stats::robust_mean_covariance(&resid, &model.break_indices, spec)?;
                (0..v.rows()).map(|j| libm::sqrt(v[(j, j)].max(0.0))).collect()
            }
        }
    };
    Ok(model
        .regime_bounds()
        .zip(&model.regime_means)
        .zip(se)
        .map(|(((a, b), &mean), se)| {
            let t_stat = if se > 0.0 {
                mean / se
            } else if mean == 0.0 {
                0.0
            } else {
                f64::INFINITY.copysign(mean)
            };
            Regime {
                start: a,
                end: b,
                start_date: dates[a],
                end_date: dates[b - 1],
                mean,
                std_error: se,
                t_stat,
                stars: Stars::from_p_value(normal_two_sided_p(t_stat)),
            }
        })
        .collect())
}
