//! Kernel-weighted long-run covariance of moment series (HAC estimation).
//!
//! ```text
//! S = G_0 + sum_{j=1}^{floor(b)} w(j / b) (G_j + G_j')
//! G_j = (1/T) sum_{t=j}^{T-1} u_t u_{t-j}'
//! ```
//!
//! `u_t` are the demeaned moment rows, `w` a Parzen or Bartlett kernel and
//! `b` a fixed bandwidth or the AR(1) plug-in rule of Andrews (1991). The
//! result is on the average-moment scale: for i.i.d. data `S` estimates the
//! covariance of a single row.

use alloc::format;

use crate::linalg::Matrix;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum KernelKind {
    #[default]
    Parzen,
    Bartlett,
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum Bandwidth {
    Fixed(f64),
    #[default]
    Andrews,
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct KernelSpec {
    pub kind: KernelKind,
    pub bandwidth: Bandwidth,
}

impl KernelSpec {
    pub fn new(kind: KernelKind, bandwidth: Bandwidth) -> Result<Self> {
        if let Bandwidth::Fixed(b) = bandwidth {
            if !(b >= 0.0 && b.is_finite()) {
                return Err(Error::InvalidParameter(format!(
                    "bandwidth must be finite and non-negative, got {b}"
                )));
            }
        }
        Ok(Self { kind, bandwidth })
    }

    pub fn fixed(kind: KernelKind, bandwidth: f64) -> Result<Self> {
        Self::new(kind, Bandwidth::Fixed(bandwidth))
    }

    pub fn andrews(kind: KernelKind) -> Self {
        Self {
            kind,
            bandwidth: Bandwidth::Andrews,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LongRunCovariance {
    pub matrix: Matrix,
    pub bandwidth_used: f64,
    pub kind: KernelKind,
}

pub fn kernel_weight(kind: KernelKind, x: f64) -> Result<f64> {
    if !(x >= 0.0) {
        return Err(Error::InvalidParameter(format!(
            "kernel argument must be non-negative, got {x}"
        )));
    }
    Ok(weight(kind, x))
}

fn weight(kind: KernelKind, x: f64) -> f64 {
    match kind {
        KernelKind::Parzen => {
            if x <= 0.5 {
                1.0 - 6.0 * x * x + 6.0 * x * x * x
            } else if x <= 1.0 {
                let r = 1.0 - x;
                2.0 * r * r * r
            } else {
                0.0
            }
        }
        KernelKind::Bartlett => {
            if x <= 1.0 {
                1.0 - x
            } else {
                0.0
            }
        }
    }
}

/// Largest AR(1) coefficient magnitude admitted into the plug-in formula.
pub const AR1_CLAMP: f64 = 0.97;

/// Andrews (1991) automatic bandwidth from AR(1) fits to each (demeaned)
/// moment column, with equal column weights.
pub fn andrews_bandwidth(moments: &Matrix, kind: KernelKind) -> Result<f64> {
    let t = moments.rows();
    if t < 10 {
        return Err(Error::TooShort { needed: 10, got: t });
    }
    let mut num = 0.0;
    let mut den = 0.0;
    for j in 0..moments.cols() {
        let col = moments.column(j);
        let mean = col.iter().sum::<f64>() / t as f64;
        let v: alloc::vec::Vec<f64> = col.iter().map(|x| x - mean).collect();
        let sxx: f64 = v[..t - 1].iter().map(|x| x * x).sum();
        if sxx == 0.0 || v.iter().all(|x| *x == 0.0) {
            return Err(Error::ZeroVariance("moment column in bandwidth selection"));
        }
        let sxy: f64 = v[1..].iter().zip(&v[..t - 1]).map(|(a, b)| a * b).sum();
        let rho = (sxy / sxx).clamp(-AR1_CLAMP, AR1_CLAMP);
        let sigma2 = v[1..]
            .iter()
            .zip(&v[..t - 1])
            .map(|(a, b)| (a - rho * b) * (a - rho * b))
            .sum::<f64>()
            / (t - 1) as f64;
        let s4 = sigma2 * sigma2;
        let one_minus = 1.0 - rho;
        den += s4 / libm::pow(one_minus, 4.0);
        num += match kind {
            KernelKind::Parzen => 4.0 * rho * rho * s4 / libm::pow(one_minus, 8.0),
            KernelKind::Bartlett => {
                4.0 * rho * rho * s4 / (libm::pow(one_minus, 6.0) * (1.0 + rho) * (1.0 + rho))
            }
        };
    }
    if !(den > 0.0) {
        return Err(Error::ZeroVariance("moment columns in bandwidth selection"));
    }
    let alpha = num / den;
    Ok(match kind {
        KernelKind::Parzen => 2.6614 * libm::pow(alpha * t as f64, 0.2),
        KernelKind::Bartlett => 1.1447 * libm::pow(alpha * t as f64, 1.0 / 3.0),
    })
}

/// Bandwidth that [`long_run_covariance`] would use for these moments.
pub fn resolve_bandwidth(moments: &Matrix, spec: &KernelSpec) -> Result<f64> {
    match spec.bandwidth {
        Bandwidth::Fixed(b) => Ok(b),
        Bandwidth::Andrews => andrews_bandwidth(moments, spec.kind),
    }
}

pub fn long_run_covariance(moments: &Matrix, spec: &KernelSpec) -> Result<LongRunCovariance> {
    let t = moments.rows();
    if t == 0 || moments.cols() == 0 {
        return Err(Error::Empty);
    }
    let bandwidth = resolve_bandwidth(moments, spec)?;
    if !(bandwidth >= 0.0 && bandwidth.is_finite()) {
        return Err(Error::InvalidParameter(format!("bandwidth {bandwidth}")));
    }
    if bandwidth >= t as f64 {
        return Err(Error::BandwidthTooLarge { bandwidth, len: t });
    }
    Ok(LongRunCovariance {
        matrix: kernel_sum(moments, spec.kind, bandwidth),
        bandwidth_used: bandwidth,
        kind: spec.kind,
    })
}

/// Long-run variance of a single series.
pub fn long_run_variance(values: &[f64], spec: &KernelSpec) -> Result<f64> {
    let m = Matrix::from_columns(&[values])?;
    Ok(long_run_covariance(&m, spec)?.matrix[(0, 0)])
}

fn kernel_sum(moments: &Matrix, kind: KernelKind, bandwidth: f64) -> Matrix {
    let (t, q) = (moments.rows(), moments.cols());
    let mut means = alloc::vec![0.0; q];
    for i in 0..t {
        for (m, v) in means.iter_mut().zip(moments.row(i)) {
            *m += v;
        }
    }
    means.iter_mut().for_each(|m| *m /= t as f64);
    let mut u = Matrix::zeros(t, q);
    for i in 0..t {
        for j in 0..q {
            u[(i, j)] = moments[(i, j)] - means[j];
        }
    }

    let mut s = autocovariance(&u, 0);
    let max_lag = libm::floor(bandwidth) as usize;
    for lag in 1..=max_lag.min(t - 1) {
        let w = weight(kind, lag as f64 / bandwidth);
        if w == 0.0 {
            continue;
        }
        let g = autocovariance(&u, lag);
        for a in 0..q {
            for b in 0..q {
                s[(a, b)] += w * (g[(a, b)] + g[(b, a)]);
            }
        }
    }
    s.symmetrize();
    s
}

fn autocovariance(u: &Matrix, lag: usize) -> Matrix {
    let (t, q) = (u.rows(), u.cols());
    let mut g = Matrix::zeros(q, q);
    for i in lag..t {
        let now = u.row(i);
        let before = u.row(i - lag);
        for a in 0..q {
            let x = now[a];
            if x == 0.0 {
                continue;
            }
            for b in 0..q {
                g[(a, b)] += x * before[b];
            }
        }
    }
    g.scale(1.0 / t as f64);
    g
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec::Vec;

    #[test]
    fn parzen_closed_form() {
        assert_eq!(kernel_weight(KernelKind::Parzen, 0.0).unwrap(), 1.0);
        assert_eq!(kernel_weight(KernelKind::Parzen, 1.0).unwrap(), 0.0);
        assert!((kernel_weight(KernelKind::Parzen, 0.5).unwrap() - 0.25).abs() < 1e-15);
        assert_eq!(kernel_weight(KernelKind::Parzen, 1.5).unwrap(), 0.0);
        let below = weight(KernelKind::Parzen, 0.5 - 1e-13);
        let above = weight(KernelKind::Parzen, 0.5 + 1e-13);
        assert!((below - above).abs() < 1e-12);
        assert!(kernel_weight(KernelKind::Parzen, -0.1).is_err());
        assert_eq!(kernel_weight(KernelKind::Bartlett, 0.25).unwrap(), 0.75);
        assert_eq!(kernel_weight(KernelKind::Bartlett, 2.0).unwrap(), 0.0);
    }

    #[test]
    fn alternating_series_has_near_zero_long_run_variance() {
        let v: Vec<f64> = (0..100).map(|i| if i % 2 == 0 { 1.0 } else { -1.0 }).collect();
        let spec = KernelSpec::fixed(KernelKind::Bartlett, 1.0).unwrap();
        // floor(1) = 1 lag but w(1/1) = 0 for Bartlett, so only G_0 survives
        let s = long_run_variance(&v, &spec).unwrap();
        assert!((s - 1.0).abs() < 1e-12);
        // with bandwidth 2: G_0 + 2 * (1/2) * G_1, G_1 = -99/100
        let spec = KernelSpec::fixed(KernelKind::Bartlett, 2.0).unwrap();
        let s = long_run_variance(&v, &spec).unwrap();
        assert!((s - (1.0 - 0.99)).abs() < 1e-12);
    }

    #[test]
    fn errors() {
        let m = Matrix::zeros(0, 1);
        assert_eq!(
            long_run_covariance(&m, &KernelSpec::fixed(KernelKind::Parzen, 0.0).unwrap()),
            Err(Error::Empty)
        );
        let v = [1.0, 2.0, 3.0];
        assert!(matches!(
            long_run_variance(&v, &KernelSpec::fixed(KernelKind::Parzen, 3.0).unwrap()),
            Err(Error::BandwidthTooLarge { .. })
        ));
        assert!(KernelSpec::fixed(KernelKind::Parzen, -1.0).is_err());
        assert!(KernelSpec::fixed(KernelKind::Parzen, f64::NAN).is_err());
        let flat = Matrix::from_columns(&[&[2.0; 20]]).unwrap();
        assert!(matches!(
            andrews_bandwidth(&flat, KernelKind::Parzen),
            Err(Error::ZeroVariance(_))
        ));
    }

    #[test]
    fn near_unit_root_is_clamped() {
        // a deterministic trend has lag-one autocorrelation near 1
        let v: Vec<f64> = (0..200).map(|i| i as f64).collect();
        let m = Matrix::from_columns(&[&v]).unwrap();
        let b = andrews_bandwidth(&m, KernelKind::Parzen).unwrap();
        let rho = AR1_CLAMP;
        let alpha = 4.0 * rho * rho / libm::pow(1.0 - rho, 4.0);
        assert!((b - 2.6614 * libm::pow(alpha * 200.0, 0.2)).abs() < 1e-6 * b);
    }
}
