//! Dated level series, calendar alignment and return construction.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use chrono::NaiveDate;

use crate::{Error, Result};

/// Inclusive calendar window.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DateWindow {
    pub start: NaiveDate,
    pub end: NaiveDate,
}

impl DateWindow {
    pub fn new(start: NaiveDate, end: NaiveDate) -> Result<Self> {
        if start >= end {
            return Err(Error::InvalidParameter(format!(
                "window start {start} is not before end {end}"
            )));
        }
        Ok(Self { start, end })
    }

    pub fn contains(&self, date: NaiveDate) -> bool {
        self.start <= date && date <= self.end
    }
}

/// Daily closing levels of one instrument.
#[derive(Debug, Clone, PartialEq)]
pub struct ObservationSeries {
    id: String,
    dates: Vec<NaiveDate>,
    values: Vec<f64>,
}

impl ObservationSeries {
    /// Builds a series from dates that must already be strictly increasing.
    pub fn new(id: impl Into<String>, dates: Vec<NaiveDate>, values: Vec<f64>) -> Result<Self> {
        if dates.len() != values.len() {
            return Err(Error::LengthMismatch {
                expected: dates.len(),
                got: values.len(),
            });
        }
        for (i, w) in dates.windows(2).enumerate() {
            if w[0] == w[1] {
                return Err(Error::DuplicateDate(w[1]));
            }
            if w[0] > w[1] {
                return Err(Error::UnorderedDates { index: i + 1 });
            }
        }
        if let Some(index) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite { index });
        }
        Ok(Self {
            id: id.into(),
            dates,
            values,
        })
    }

    /// Sorts `(date, value)` rows ascending; a repeated date is an error.
    pub fn from_rows(id: impl Into<String>, mut rows: Vec<(NaiveDate, f64)>) -> Result<Self> {
        rows.sort_by_key(|r| r.0);
        let (dates, values) = rows.into_iter().unzip();
        Self::new(id, dates, values)
    }

    /// Rejects zero or negative levels, as required for a volatility index
    /// or for log returns.
    pub fn require_positive(self) -> Result<Self> {
        if let Some(index) = self.values.iter().position(|&v| v <= 0.0) {
            return Err(Error::NonPositive {
                index,
                value: self.values[index],
            });
        }
        Ok(self)
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn dates(&self) -> &[NaiveDate] {
        &self.dates
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Observations dated inside `window`.
    pub fn restrict(&self, window: &DateWindow) -> Self {
        let (dates, values) = self
            .dates
            .iter()
            .zip(&self.values)
            .filter(|(d, _)| window.contains(**d))
            .map(|(d, v)| (*d, *v))
            .unzip();
        Self {
            id: self.id.clone(),
            dates,
            values,
        }
    }
}

/// One aligned column: values on the reference calendar and whether each was
/// filled by interpolation.
#[derive(Debug, Clone, PartialEq)]
pub struct Column {
    pub values: Vec<f64>,
    pub interpolated: Vec<bool>,
}

/// All instruments on the trading calendar of the reference series.
#[derive(Debug, Clone, PartialEq)]
pub struct AlignedPanel {
    reference_id: String,
    calendar: Vec<NaiveDate>,
    columns: BTreeMap<String, Column>,
}

impl AlignedPanel {
    pub fn reference_id(&self) -> &str {
        &self.reference_id
    }

    pub fn calendar(&self) -> &[NaiveDate] {
        &self.calendar
    }

    pub fn len(&self) -> usize {
        self.calendar.len()
    }

    pub fn is_empty(&self) -> bool {
        self.calendar.is_empty()
    }

    pub fn column(&self, id: &str) -> Result<&Column> {
        self.columns
            .get(id)
            .ok_or_else(|| Error::UnknownInstrument(id.to_string()))
    }

    pub fn ids(&self) -> impl Iterator<Item = &str> {
        self.columns.keys().map(String::as_str)
    }

    /// The column as a plain series on the calendar.
    pub fn column_series(&self, id: &str) -> Result<ObservationSeries> {
        let col = self.column(id)?;
        ObservationSeries::new(id, self.calendar.clone(), col.values.clone())
    }
}

/// Aligns every series in `others` onto the dates of `reference`.
///
/// Dates a series lacks are filled by linear interpolation in calendar days
/// between its nearest earlier and later observations. Observations on dates
/// outside the calendar are dropped.
pub fn align_panel(
    reference: &ObservationSeries,
    others: &[ObservationSeries],
) -> Result<AlignedPanel> {
    if reference.is_empty() {
        return Err(Error::Empty);
    }
    let calendar = reference.dates.clone();
    let mut columns = BTreeMap::new();
    columns.insert(
        reference.id.clone(),
        Column {
            values: reference.values.clone(),
            interpolated: alloc::vec![false; calendar.len()],
        },
    );
    for series in others {
        if columns.contains_key(&series.id) {
            return Err(Error::InvalidParameter(format!(
                "instrument `{}` appears twice",
                series.id
            )));
        }
        let column = align_column(&calendar, series)?;
        columns.insert(series.id.clone(), column);
    }
    Ok(AlignedPanel {
        reference_id: reference.id.clone(),
        calendar,
        columns,
    })
}

fn align_column(calendar: &[NaiveDate], series: &ObservationSeries) -> Result<Column> {
    let first = calendar[0];
    let last = calendar[calendar.len() - 1];
    let (Some(&src_first), Some(&src_last)) = (series.dates.first(), series.dates.last()) else {
        return Err(Error::EmptyOverlap(series.id.clone()));
    };
    if src_last < first || src_first > last {
        return Err(Error::EmptyOverlap(series.id.clone()));
    }
    if src_first > first {
        return Err(Error::ExtrapolationRequired {
            id: series.id.clone(),
            date: first,
        });
    }
    if src_last < last {
        return Err(Error::ExtrapolationRequired {
            id: series.id.clone(),
            date: last,
        });
    }

    let mut values = Vec::with_capacity(calendar.len());
    let mut interpolated = Vec::with_capacity(calendar.len());
    // `k` is the first source index with date >= the current calendar date.
    let mut k = 0;
    for &date in calendar {
        while series.dates[k] < date {
            k += 1;
        }
        if series.dates[k] == date {
            values.push(series.values[k]);
            interpolated.push(false);
        } else {
            let (d0, v0) = (series.dates[k - 1], series.values[k - 1]);
            let (d1, v1) = (series.dates[k], series.values[k]);
            let span = (d1 - d0).num_days() as f64;
            let offset = (date - d0).num_days() as f64;
            values.push(v0 + (v1 - v0) * offset / span);
            interpolated.push(true);
        }
    }
    Ok(Column {
        values,
        interpolated,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ReturnKind {
    #[default]
    LogReturn,
    SimpleReturn,
    /// `(p_t - p_{t-1}) / scale`, used for changes in the volatility index.
    ScaledDifference,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReturnSeries {
    pub instrument_id: String,
    pub kind: ReturnKind,
    pub scale: f64,
    pub values: Vec<f64>,
}

/// First differences of a level series. `scale` only divides
/// [`ReturnKind::ScaledDifference`]; it must be positive in every case.
pub fn compute_returns(
    instrument_id: &str,
    levels: &[f64],
    kind: ReturnKind,
    scale: f64,
) -> Result<ReturnSeries> {
    if levels.len() < 2 {
        return Err(Error::TooShort {
            needed: 2,
            got: levels.len(),
        });
    }
    if !(scale > 0.0 && scale.is_finite()) {
        return Err(Error::InvalidParameter(format!("scale must be positive, got {scale}")));
    }
    if let Some(index) = levels.iter().position(|v| !v.is_finite()) {
        return Err(Error::NonFinite { index });
    }
    if kind != ReturnKind::ScaledDifference {
        if let Some(index) = levels.iter().position(|&v| v <= 0.0) {
            return Err(Error::NonPositive {
                index,
                value: levels[index],
            });
        }
    }
    let values = levels
        .windows(2)
        .map(|w| match kind {
            ReturnKind::LogReturn => libm::log(w[1] / w[0]),
            ReturnKind::SimpleReturn => w[1] / w[0] - 1.0,
            ReturnKind::ScaledDifference => (w[1] - w[0]) / scale,
        })
        .collect();
    Ok(ReturnSeries {
        instrument_id: instrument_id.to_string(),
        kind,
        scale,
        values,
    })
}

/// Changes in the reference index and market returns on a common calendar.
///
/// Entry `t` of every series is dated `dates[t]` and is the move from the
/// previous trading day of the aligned panel.
#[derive(Debug, Clone, PartialEq)]
pub struct ReturnPanel {
    pub dates: Vec<NaiveDate>,
    pub index_changes: ReturnSeries,
    pub markets: BTreeMap<String, ReturnSeries>,
    /// Per market, whether a return involves an interpolated level.
    pub touches_interpolated: BTreeMap<String, Vec<bool>>,
}

impl ReturnPanel {
    /// `markets` pairs each market column with the return convention to use;
    /// the reference column becomes a scaled difference with `change_scale`.
    pub fn build(
        panel: &AlignedPanel,
        markets: &[(String, ReturnKind)],
        change_scale: f64,
    ) -> Result<Self> {
        let reference = panel.column(&panel.reference_id)?;
        let index_changes = compute_returns(
            &panel.reference_id,
            &reference.values,
            ReturnKind::ScaledDifference,
            change_scale,
        )?;
        let mut out = BTreeMap::new();
        let mut flags = BTreeMap::new();
        for (id, kind) in markets {
            let col = panel.column(id)?;
            out.insert(id.clone(), compute_returns(id, &col.values, *kind, 1.0)?);
            flags.insert(
                id.clone(),
                col.interpolated.windows(2).map(|w| w[0] || w[1]).collect(),
            );
        }
        Ok(Self {
            dates: panel.calendar[1..].to_vec(),
            index_changes,
            markets: out,
            touches_interpolated: flags,
        })
    }

    pub fn len(&self) -> usize {
        self.dates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dates.is_empty()
    }

    pub fn market(&self, id: &str) -> Result<&ReturnSeries> {
        self.markets
            .get(id)
            .ok_or_else(|| Error::UnknownInstrument(id.to_string()))
    }

    /// Index range of the entries dated inside `window`.
    pub fn window_range(&self, window: &DateWindow) -> core::ops::Range<usize> {
        let lo = self.dates.partition_point(|d| *d < window.start);
        let hi = self.dates.partition_point(|d| *d <= window.end);
        lo..hi.max(lo)
    }
}
