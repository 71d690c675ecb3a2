//! Numerical core of `breakgauge`: structural-break detection in the mean of a
//! volatility index, HAC-robust GMM estimation of the lead/lag "fear gauge"
//! regression, unit-root testing and descriptive statistics.
//!
//! The crate is `no_std` and only needs `alloc`. File formats, configuration
//! and the command line live in the `breakgauge` crate.
#![no_std]

extern crate alloc;

pub mod breaks;
pub mod descriptive;
pub mod dist;
mod error;
pub mod fear;
pub mod hac;
pub mod linalg;
pub mod series;
pub mod unitroot;

pub use chrono::NaiveDate;
pub use error::{Error, Result};
