use alloc::string::String;
use chrono::NaiveDate;
use thiserror::Error;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("series too short: need at least {needed} observations, got {got}")]
    TooShort { needed: usize, got: usize },
    #[error("input is empty")]
    Empty,
    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("dates are not strictly increasing at position {index}")]
    UnorderedDates { index: usize },
    #[error("duplicate date {0}")]
    DuplicateDate(NaiveDate),
    #[error("non-finite value at position {index}")]
    NonFinite { index: usize },
    #[error("non-positive value {value} at position {index}")]
    NonPositive { index: usize, value: f64 },
    #[error("series `{id}` cannot cover {date} without extrapolation")]
    ExtrapolationRequired { id: String, date: NaiveDate },
    #[error("series `{0}` does not overlap the reference calendar")]
    EmptyOverlap(String),
    #[error("unknown instrument `{0}`")]
    UnknownInstrument(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("{breaks} breaks with minimal segment length {min_len} do not fit in {len} observations")]
    Infeasible { breaks: usize, min_len: usize, len: usize },
    #[error("zero variance: {0}")]
    ZeroVariance(&'static str),
    #[error("every observation was excluded as an outlier")]
    AllExcluded,
    #[error("design matrix is rank deficient")]
    RankDeficient,
    #[error("bandwidth {bandwidth} is not smaller than the sample length {len}")]
    BandwidthTooLarge { bandwidth: f64, len: usize },
    #[error("zero mean shift at break {0}; confidence interval undefined")]
    ZeroShift(usize),
}

impl Error {
    /// True for failures caused by the numbers themselves (degenerate or
    /// singular data) rather than by malformed input or settings.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::ZeroVariance(_)
                | Error::AllExcluded
                | Error::RankDeficient
                | Error::BandwidthTooLarge { .. }
                | Error::ZeroShift(_)
        )
    }
}
