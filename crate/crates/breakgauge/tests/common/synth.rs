//! Synthetic index and market closes with planted regimes and responses.
//!
//! The index level is `mu_k + d_t` with `d_t = PHI d_{t-1} + 100 s_t` and
//! `s_t = sum_i BETA[i] R_{t+i} + BETA_ABS |R_t| + NOISE e_t`, where `R` is
//! the driver market's log return. Index changes therefore follow the
//! regression with the planted coefficients, up to the mean-reversion term
//! `(PHI - 1) d_{t-1} / 100`, which loads on the lagged returns but not on
//! `R_t` or `|R_t|` beyond `(1 - PHI) BETA[3]` in size.

#![allow(dead_code)]

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use chrono::{Datelike, Duration, NaiveDate, Weekday};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

pub const SEED: u64 = 20180201;
pub const LEN: usize = 2800;
pub const REGIME_MEANS: [f64; 5] = [18.0, 34.0, 24.0, 14.0, 22.0];
pub const PHI: f64 = 0.9;
/// Coefficients on `R_{t-2} .. R_{t+2}` of the driver market.
pub const BETA: [f64; 5] = [0.05, -0.1, -1.2, 0.08, -0.02];
pub const BETA_ABS: f64 = 0.12;
pub const RETURN_SD: f64 = 0.008;
pub const NOISE: f64 = 0.005;
/// Weight of the driver's previous-day return in the transmitted market.
pub const TRANSMISSION: f64 = 0.5;
pub const TRIMMING: f64 = 0.15;
pub const MARKET_NAMES: [&str; 5] = ["SPX", "NKY", "DAX", "FTSE", "HSI"];

/// One-based last observation of every regime except the final one.
pub fn planted_breaks(len: usize) -> Vec<usize> {
    let k = REGIME_MEANS.len();
    (1..k).map(|j| j * len / k).collect()
}

#[derive(Debug, Clone)]
pub struct Closes {
    pub id: String,
    pub dates: Vec<NaiveDate>,
    pub values: Vec<f64>,
}

#[derive(Debug, Clone)]
pub struct Fixture {
    pub vix: Closes,
    pub markets: Vec<Closes>,
}

pub fn business_days(start: NaiveDate, n: usize) -> Vec<NaiveDate> {
    let mut out = Vec::with_capacity(n);
    let mut d = start;
    while out.len() < n {
        if !matches!(d.weekday(), Weekday::Sat | Weekday::Sun) {
            out.push(d);
        }
        d += Duration::days(1);
    }
    out
}

fn normals(rng: &mut ChaCha8Rng, n: usize, sd: f64) -> Vec<f64> {
    (0..n)
        .map(|_| {
            let z: f64 = StandardNormal.sample(rng);
            sd * z
        })
        .collect()
}

fn prices(start: f64, returns: &[f64]) -> Vec<f64> {
    let mut p = start;
    std::iter::once(start)
        .chain(returns.iter().map(|r| {
            p *= r.exp();
            p
        }))
        .collect()
}

/// `markets` in `1..=5`: the driver, a market that absorbs the driver's
/// moves one day later, a contemporaneously correlated one with holiday
/// gaps, then independent markets.
pub fn generate(seed: u64, len: usize, markets: usize) -> Fixture {
    assert!((1..=MARKET_NAMES.len()).contains(&markets));
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let dates = business_days(NaiveDate::from_ymd_opt(2007, 1, 3).unwrap(), len);
    // Returns for level dates 1..len plus two leads.
    let r = normals(&mut rng, len + 2, RETURN_SD);
    let e = normals(&mut rng, len, NOISE);
    let bounds: Vec<usize> = planted_breaks(len).into_iter().chain([len]).collect();

    let mut vix = Vec::with_capacity(len);
    let mut d = 0.0;
    let mut regime = 0;
    for t in 0..len {
        if t > 0 {
            let ret = |off: i64| {
                let k = t as i64 - 1 + off;
                if k >= 0 { r[k as usize] } else { 0.0 }
            };
            let mut s = BETA_ABS * ret(0).abs() + e[t];
            for (i, b) in BETA.iter().enumerate() {
                s += b * ret(i as i64 - 2);
            }
            d = PHI * d + 100.0 * s;
        }
        while t >= bounds[regime] {
            regime += 1;
        }
        vix.push(((REGIME_MEANS[regime] + d) * 100.0).round() / 100.0);
    }

    let mut out = Vec::with_capacity(markets);
    let driver = &r[..len - 1];
    for (m, id) in MARKET_NAMES.iter().take(markets).enumerate() {
        let rets: Vec<f64> = match m {
            0 => driver.to_vec(),
            1 => {
                let u = normals(&mut rng, len - 1, 0.7 * RETURN_SD);
                (0..len - 1)
                    .map(|t| u[t] + if t > 0 { TRANSMISSION * driver[t - 1] } else { 0.0 })
                    .collect()
            }
            2 => {
                let u = normals(&mut rng, len - 1, 0.7 * RETURN_SD);
                driver.iter().zip(&u).map(|(a, b)| 0.7 * a + b).collect()
            }
            _ => normals(&mut rng, len - 1, RETURN_SD),
        };
        let levels: Vec<f64> = prices(1000.0 * (m + 1) as f64, &rets)
            .into_iter()
            .map(|p| (p * 100.0).round() / 100.0)
            .collect();
        let (mut ds, mut vs) = (dates.clone(), levels);
        if m == 2 {
            // holidays the index does not share; never the first or last day
            let keep: Vec<bool> = (0..len).map(|t| t == 0 || t + 1 == len || t % 97 != 50).collect();
            ds = ds.iter().zip(&keep).filter(|(_, k)| **k).map(|(d, _)| *d).collect();
            vs = vs.iter().zip(&keep).filter(|(_, k)| **k).map(|(v, _)| *v).collect();
        }
        out.push(Closes {
            id: id.to_string(),
            dates: ds,
            values: vs,
        });
    }
    Fixture {
        vix: Closes {
            id: "VIX".into(),
            dates,
            values: vix,
        },
        markets: out,
    }
}

pub fn to_csv(c: &Closes) -> String {
    let mut s = String::from("Date,Close\n");
    for (d, v) in c.dates.iter().zip(&c.values) {
        writeln!(s, "{},{:.2}", d.format("%Y-%m-%d"), v).unwrap();
    }
    s
}

pub fn config_toml(fixture: &Fixture, output_dir: &str) -> String {
    let mut s = format!(
        "vix_file = \"vix.csv\"\noutput_dir = \"{output_dir}\"\nstandardized_breaks = true\n\n[breaks]\ntrimming = {TRIMMING}\nmax_breaks = 5\n"
    );
    for m in &fixture.markets {
        write!(s, "\n[markets.{}]\nfile = \"{}.csv\"\n", m.id, m.id.to_lowercase()).unwrap();
    }
    s
}

/// Writes `vix.csv`, one CSV per market and `config.toml` into `dir`.
pub fn write_fixture(fixture: &Fixture, dir: &Path, output_dir: &str) -> std::io::Result<()> {
    fs::create_dir_all(dir)?;
    fs::write(dir.join("vix.csv"), to_csv(&fixture.vix))?;
    for m in &fixture.markets {
        fs::write(dir.join(format!("{}.csv", m.id.to_lowercase())), to_csv(m))?;
    }
    fs::write(dir.join("config.toml"), config_toml(fixture, output_dir))
}
