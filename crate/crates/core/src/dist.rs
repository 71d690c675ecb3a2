//! Reference distributions and significance stars.

use core::fmt;

/// Significance marker at the conventional 10%, 5% and 1% levels.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Default)]
pub enum Stars {
    #[default]
    None,
    Ten,
    Five,
    One,
}

impl Stars {
    /// Stars for a p-value.
    pub fn from_p_value(p: f64) -> Self {
        if p < 0.01 {
            Stars::One
        } else if p < 0.05 {
            Stars::Five
        } else if p < 0.10 {
            Stars::Ten
        } else {
            Stars::None
        }
    }

    /// Stars for an upper-tail statistic given its 10%, 5% and 1% critical values.
    pub fn from_critical(stat: f64, cv: &CriticalValues) -> Self {
        if stat > cv.one {
            Stars::One
        } else if stat > cv.five {
            Stars::Five
        } else if stat > cv.ten {
            Stars::Ten
        } else {
            Stars::None
        }
    }

    /// Whether the marker implies rejection at `level` (0.10, 0.05 or 0.01).
    pub fn rejects_at(self, level: f64) -> bool {
        let needed = if level >= 0.10 {
            Stars::Ten
        } else if level >= 0.05 {
            Stars::Five
        } else {
            Stars::One
        };
        self >= needed
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Stars::None => "",
            Stars::Ten => "*",
            Stars::Five => "**",
            Stars::One => "***",
        }
    }
}

impl fmt::Display for Stars {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Critical values of a test at the 10%, 5% and 1% levels.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CriticalValues {
    pub ten: f64,
    pub five: f64,
    pub one: f64,
}

pub fn normal_cdf(x: f64) -> f64 {
    0.5 * libm::erfc(-x / core::f64::consts::SQRT_2)
}

/// Two-sided p-value of a standard normal statistic.
pub fn normal_two_sided_p(z: f64) -> f64 {
    if z.is_nan() {
        return f64::NAN;
    }
    libm::erfc(libm::fabs(z) / core::f64::consts::SQRT_2)
}

/// Two-sided p-value of a Student t statistic with `df` degrees of freedom.
pub fn student_t_two_sided_p(t: f64, df: f64) -> f64 {
    if t.is_nan() || !(df > 0.0) {
        return f64::NAN;
    }
    if t.is_infinite() {
        return 0.0;
    }
    regularized_incomplete_beta(df / (df + t * t), 0.5 * df, 0.5)
}

/// Regularized incomplete beta function I_x(a, b).
pub fn regularized_incomplete_beta(x: f64, a: f64, b: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    if x >= 1.0 {
        return 1.0;
    }
    let ln_front = libm::lgamma(a + b) - libm::lgamma(a) - libm::lgamma(b)
        + a * libm::log(x)
        + b * libm::log1p(-x);
    let front = libm::exp(ln_front);
    // the continued fraction converges fast on this side of the mean
    if x < (a + 1.0) / (a + b + 2.0) {
        front * beta_continued_fraction(x, a, b) / a
    } else {
        1.0 - front * beta_continued_fraction(1.0 - x, b, a) / b
    }
}

// Modified Lentz evaluation.
fn beta_continued_fraction(x: f64, a: f64, b: f64) -> f64 {
    const TINY: f64 = 1e-300;
    const EPS: f64 = 1e-15;
    let qab = a + b;
    let qap = a + 1.0;
    let qam = a - 1.0;
    let mut c = 1.0;
    let mut d = 1.0 - qab * x / qap;
    if libm::fabs(d) < TINY {
        d = TINY;
    }
    d = 1.0 / d;
    let mut h = d;
    for m in 1..500 {
        let m = m as f64;
        let m2 = 2.0 * m;
        let aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if libm::fabs(d) < TINY {
            d = TINY;
        }
        c = 1.0 + aa / c;
        if libm::fabs(c) < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        h *= d * c;
        let aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if libm::fabs(d) < TINY {
            d = TINY;
        }
        c = 1.0 + aa / c;
        if libm::fabs(c) < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        let del = d * c;
        h *= del;
        if libm::fabs(del - 1.0) < EPS {
            break;
        }
    }
    h
}

/// CDF of `argmax_s { W(s) - |s| / 2 }` for a two-sided Brownian motion `W`,
/// the limit law of a mean-shift break date estimator.
pub fn break_date_cdf(x: f64) -> f64 {
    if x < 0.0 {
        return 1.0 - break_date_cdf(-x);
    }
    let r = libm::sqrt(x);
    1.0 + libm::sqrt(x / (2.0 * core::f64::consts::PI)) * libm::exp(-x / 8.0)
        - 0.5 * (x + 5.0) * normal_cdf(-r / 2.0)
        + 1.5 * libm::exp(x) * normal_cdf(-1.5 * r)
}

/// Quantile of [`break_date_cdf`] for `p` in (0.5, 1).
pub fn break_date_quantile(p: f64) -> f64 {
    let (mut lo, mut hi) = (0.0, 1.0);
    while break_date_cdf(hi) < p {
        hi *= 2.0;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if break_date_cdf(mid) < p {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}
