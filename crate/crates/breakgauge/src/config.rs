//! TOML pipeline configuration.
//!
//! Relative paths are resolved against the directory holding the config
//! file. Only `vix_file` is required; see the README for the schema.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use breakgauge_core::breaks::{BreakConfig, BreakVariance};
use breakgauge_core::hac::{Bandwidth, KernelKind, KernelSpec};
use breakgauge_core::series::{DateWindow, ReturnKind};
use breakgauge_core::unitroot::{AdfVariant, LagRule};
use chrono::NaiveDate;
use serde::Deserialize;

use crate::csvio::CsvOptions;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum OutputFormat {
    Csv,
    Markdown,
}

impl OutputFormat {
    pub fn extension(self) -> &'static str {
        match self {
            OutputFormat::Csv => "csv",
            OutputFormat::Markdown => "md",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(OutputFormat::Csv),
            "markdown" | "md" => Ok(OutputFormat::Markdown),
            _ => Err(Error::Config(format!("unknown output format {s:?}"))),
        }
    }
}

/// How regime boundaries for the per-regime tables are chosen.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RegimeSpec {
    /// From the break test on the index level.
    Auto,
    /// Last date of every regime but the final one, which runs to the
    /// window end.
    Explicit(Vec<NaiveDate>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct MarketSpec {
    pub file: PathBuf,
    pub return_kind: ReturnKind,
    pub csv: CsvOptions,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdfSettings {
    pub variant: AdfVariant,
    pub lags: LagRule,
}

impl Default for AdfSettings {
    fn default() -> Self {
        Self {
            variant: AdfVariant::Constant,
            lags: LagRule::Fixed(0),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PipelineConfig {
    pub vix_file: PathBuf,
    pub vix_csv: CsvOptions,
    pub markets: BTreeMap<String, MarketSpec>,
    pub window: Option<DateWindow>,
    pub cvix_scale: f64,
    pub breaks: BreakConfig,
    pub kernel: KernelSpec,
    pub adf: AdfSettings,
    pub regimes: RegimeSpec,
    pub standardized_breaks: bool,
    /// Multiplier `k` of the `mean + k sd` outlier cut for the standardized
    /// break run.
    pub outlier_k: f64,
    pub output_dir: PathBuf,
    pub output_formats: Vec<OutputFormat>,
}

impl PipelineConfig {
    /// Defaults around a single index file, with no markets.
    pub fn for_index(vix_file: impl Into<PathBuf>, output_dir: impl Into<PathBuf>) -> Self {
        Self {
            vix_file: vix_file.into(),
            vix_csv: CsvOptions::default(),
            markets: BTreeMap::new(),
            window: None,
            cvix_scale: 100.0,
            breaks: BreakConfig::default(),
            kernel: KernelSpec::default(),
            adf: AdfSettings::default(),
            regimes: RegimeSpec::Auto,
            standardized_breaks: false,
            outlier_k: 3.0,
            output_dir: output_dir.into(),
            output_formats: vec![OutputFormat::Csv, OutputFormat::Markdown],
        }
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(Error::io(path))?;
        let base = path.parent().unwrap_or(Path::new("."));
        Self::from_toml(&text, base)
    }

    pub fn from_toml(text: &str, base: &Path) -> Result<Self> {
        let raw: RawConfig = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        raw.resolve(base)
    }

    pub fn apply(&mut self, o: &Overrides) -> Result<()> {
        if let Some(p) = &o.input {
            self.vix_file = p.clone();
        }
        let start = o.window_start.or(self.window.map(|w| w.start));
        let end = o.window_end.or(self.window.map(|w| w.end));
        self.window = match (start, end) {
            (Some(s), Some(e)) => Some(window(s, e)?),
            (None, None) => None,
            _ => return Err(Error::Config("window needs both a start and an end".into())),
        };
        if let Some(h) = o.trimming {
            self.breaks.trimming = h;
        }
        if let Some(m) = o.max_breaks {
            self.breaks.max_breaks = m;
        }
        if let Some(s) = o.cvix_scale {
            self.cvix_scale = s;
        }
        if let Some(k) = o.kernel {
            self.kernel.kind = k;
            if let BreakVariance::Robust(spec) = &mut self.breaks.variance {
                spec.kind = k;
            }
        }
        if let Some(d) = &o.output_dir {
            self.output_dir = d.clone();
        }
        if o.standardized_breaks {
            self.standardized_breaks = true;
        }
        if !o.formats.is_empty() {
            self.output_formats = o.formats.clone();
        }
        self.validate()
    }

    pub fn validate(&self) -> Result<()> {
        self.breaks
            .validate()
            .map_err(|e| Error::Config(format!("breaks: {e}")))?;
        if !(self.cvix_scale > 0.0 && self.cvix_scale.is_finite()) {
            return Err(Error::Config(format!("cvix_scale must be positive, got {}", self.cvix_scale)));
        }
        if self.output_formats.is_empty() {
            return Err(Error::Config("output_formats is empty".into()));
        }
        if self.outlier_k.is_nan() {
            return Err(Error::Config("outlier_k is NaN".into()));
        }
        if let RegimeSpec::Explicit(ends) = &self.regimes {
            if ends.windows(2).any(|w| w[0] >= w[1]) {
                return Err(Error::Config("regime end dates must be strictly increasing".into()));
            }
            if let (Some(w), Some(first), Some(last)) = (self.window, ends.first(), ends.last()) {
                if *first < w.start || *last >= w.end {
                    return Err(Error::Config(format!(
                        "regime end dates must fall inside [{}, {})",
                        w.start, w.end
                    )));
                }
            }
        }
        Ok(())
    }
}

/// Command-line settings that take precedence over the file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub input: Option<PathBuf>,
    pub window_start: Option<NaiveDate>,
    pub window_end: Option<NaiveDate>,
    pub trimming: Option<f64>,
    pub max_breaks: Option<usize>,
    pub cvix_scale: Option<f64>,
    pub kernel: Option<KernelKind>,
    pub output_dir: Option<PathBuf>,
    pub standardized_breaks: bool,
    pub formats: Vec<OutputFormat>,
}

fn window(start: NaiveDate, end: NaiveDate) -> Result<DateWindow> {
    DateWindow::new(start, end).map_err(|e| Error::Config(e.to_string()))
}

pub fn parse_kernel(s: &str) -> Result<KernelKind> {
    match s.to_ascii_lowercase().as_str() {
        "parzen" => Ok(KernelKind::Parzen),
        "bartlett" | "newey-west" => Ok(KernelKind::Bartlett),
        _ => Err(Error::Config(format!("unknown kernel {s:?}"))),
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    vix_file: PathBuf,
    #[serde(default)]
    vix_csv: Option<CsvOptions>,
    #[serde(default)]
    csv: Option<CsvOptions>,
    #[serde(default)]
    markets: BTreeMap<String, RawMarket>,
    window: Option<RawWindow>,
    cvix_scale: Option<f64>,
    #[serde(default)]
    breaks: RawBreaks,
    #[serde(default)]
    kernel: RawKernel,
    #[serde(default)]
    adf: RawAdf,
    regimes: Option<toml::Value>,
    #[serde(default)]
    standardized_breaks: bool,
    outlier_k: Option<f64>,
    output_dir: Option<PathBuf>,
    output_formats: Option<Vec<String>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawWindow {
    start: toml::Value,
    end: toml::Value,
}

/// Accepts both TOML dates and quoted `YYYY-MM-DD` strings.
fn date_value(v: &toml::Value) -> Result<NaiveDate> {
    let text = match v {
        toml::Value::Datetime(d) => d.to_string(),
        toml::Value::String(s) => s.clone(),
        other => return Err(Error::Config(format!("expected a date, got {other}"))),
    };
    NaiveDate::parse_from_str(&text, "%Y-%m-%d").map_err(|e| Error::Config(format!("bad date {text:?}: {e}")))
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawMarket {
    file: PathBuf,
    #[serde(default)]
    return_kind: Option<String>,
    date_column: Option<String>,
    value_column: Option<String>,
    date_format: Option<String>,
    skip_missing: Option<bool>,
}

#[derive(Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct RawBreaks {
    trimming: Option<f64>,
    max_breaks: Option<usize>,
    significance: Option<f64>,
    variance: Option<String>,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum RawBandwidth {
    Number(f64),
    Name(String),
}

#[derive(Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct RawKernel {
    kind: Option<String>,
    bandwidth: Option<RawBandwidth>,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum RawLags {
    Fixed(usize),
    Name(String),
}

#[derive(Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct RawAdf {
    variant: Option<String>,
    lags: Option<RawLags>,
    aic_max_lags: Option<usize>,
}

impl RawConfig {
    fn resolve(self, base: &Path) -> Result<PipelineConfig> {
        let abs = |p: PathBuf| if p.is_absolute() { p } else { base.join(p) };
        let csv = self.csv.unwrap_or_default();
        let markets = self
            .markets
            .into_iter()
            .map(|(id, m)| {
                let return_kind = match m.return_kind.as_deref() {
                    None | Some("log") => ReturnKind::LogReturn,
                    Some("simple") => ReturnKind::SimpleReturn,
                    Some(other) => {
                        return Err(Error::Config(format!("market {id}: unknown return_kind {other:?}")))
                    }
                };
                let defaults = csv.clone();
                let opts = CsvOptions {
                    date_column: m.date_column.unwrap_or(defaults.date_column),
                    value_column: m.value_column.unwrap_or(defaults.value_column),
                    date_format: m.date_format.unwrap_or(defaults.date_format),
                    skip_missing: m.skip_missing.unwrap_or(defaults.skip_missing),
                };
                Ok((
                    id,
                    MarketSpec {
                        file: abs(m.file),
                        return_kind,
                        csv: opts,
                    },
                ))
            })
            .collect::<Result<BTreeMap<_, _>>>()?;

        let kind = match self.kernel.kind.as_deref() {
            Some(k) => parse_kernel(k)?,
            None => KernelKind::Parzen,
        };
        let bandwidth = match self.kernel.bandwidth {
            None => Bandwidth::Andrews,
            Some(RawBandwidth::Name(n)) if n == "andrews" => Bandwidth::Andrews,
            Some(RawBandwidth::Name(n)) => return Err(Error::Config(format!("unknown bandwidth {n:?}"))),
            Some(RawBandwidth::Number(b)) => Bandwidth::Fixed(b),
        };
        let kernel = KernelSpec::new(kind, bandwidth).map_err(|e| Error::Config(e.to_string()))?;

        let mut breaks = BreakConfig::default();
        if let Some(h) = self.breaks.trimming {
            breaks.trimming = h;
        }
        if let Some(m) = self.breaks.max_breaks {
            breaks.max_breaks = m;
        }
        if let Some(s) = self.breaks.significance {
            breaks.significance = s;
        }
        breaks.variance = match self.breaks.variance.as_deref() {
            None | Some("robust") => BreakVariance::Robust(kernel),
            Some("homoscedastic") => BreakVariance::Homoscedastic,
            Some(v) => return Err(Error::Config(format!("unknown break variance {v:?}"))),
        };

        let variant = match self.adf.variant.as_deref() {
            None | Some("constant") => AdfVariant::Constant,
            Some("none") => AdfVariant::None,
            Some("trend") | Some("constant_and_trend") => AdfVariant::ConstantAndTrend,
            Some(v) => return Err(Error::Config(format!("unknown ADF variant {v:?}"))),
        };
        let lags = match self.adf.lags {
            None => AdfSettings::default().lags,
            Some(RawLags::Fixed(k)) => LagRule::Fixed(k),
            Some(RawLags::Name(n)) if n == "aic" => LagRule::Aic {
                max: self.adf.aic_max_lags.unwrap_or(12),
            },
            Some(RawLags::Name(n)) => return Err(Error::Config(format!("unknown ADF lag rule {n:?}"))),
        };

        let regimes = match self.regimes {
            None => RegimeSpec::Auto,
            Some(toml::Value::String(s)) if s == "auto" => RegimeSpec::Auto,
            Some(toml::Value::Array(v)) => RegimeSpec::Explicit(v.iter().map(date_value).collect::<Result<_>>()?),
            Some(other) => {
                return Err(Error::Config(format!("regimes must be \"auto\" or a list of dates, got {other}")))
            }
        };
        let output_formats = match self.output_formats {
            None => vec![OutputFormat::Csv, OutputFormat::Markdown],
            Some(v) => {
                let mut f = v.iter().map(|s| OutputFormat::parse(s)).collect::<Result<Vec<_>>>()?;
                f.sort();
                f.dedup();
                f
            }
        };
        let window = match self.window {
            Some(w) => Some(window(date_value(&w.start)?, date_value(&w.end)?)?),
            None => None,
        };
        let cfg = PipelineConfig {
            vix_file: abs(self.vix_file),
            vix_csv: self.vix_csv.unwrap_or(csv),
            markets,
            window,
            cvix_scale: self.cvix_scale.unwrap_or(100.0),
            breaks,
            kernel,
            adf: AdfSettings { variant, lags },
            regimes,
            standardized_breaks: self.standardized_breaks,
            outlier_k: self.outlier_k.unwrap_or(3.0),
            output_dir: abs(self.output_dir.unwrap_or_else(|| PathBuf::from("out"))),
            output_formats,
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const BASIC: &str = r#"
vix_file = "vix.csv"
output_dir = "results"

[window]
start = 2007-01-03
end = "2018-02-01"

[markets.SPX]
file = "/data/spx.csv"
value_column = "Adj Close"

[breaks]
trimming = 0.15
"#;

    #[test]
    fn resolves_paths_and_defaults() {
        let c = PipelineConfig::from_toml(BASIC, Path::new("/cfg")).unwrap();
        assert_eq!(c.vix_file, PathBuf::from("/cfg/vix.csv"));
        assert_eq!(c.output_dir, PathBuf::from("/cfg/results"));
        let spx = &c.markets["SPX"];
        assert_eq!(spx.file, PathBuf::from("/data/spx.csv"));
        assert_eq!(spx.csv.value_column, "Adj Close");
        assert_eq!(spx.csv.date_column, "Date");
        assert_eq!(c.breaks.trimming, 0.15);
        assert_eq!(c.breaks.max_breaks, 5);
        assert_eq!(c.cvix_scale, 100.0);
        assert_eq!(c.regimes, RegimeSpec::Auto);
        assert_eq!(c.output_formats, vec![OutputFormat::Csv, OutputFormat::Markdown]);
    }

    #[test]
    fn rejects_bad_values() {
        let bad = [
            BASIC.replace("end = \"2018-02-01\"", "end = 2006-02-01"),
            BASIC.replace("trimming = 0.15", "trimming = 0.6"),
            BASIC.replace("trimming = 0.15", "trimming = 0.15\nsignificance = 0.2"),
            BASIC.replace("output_dir", "cvix_scale = 0\noutput_dir"),
            BASIC.replace("output_dir", "regimes = [2012-01-01, 2010-01-01]\noutput_dir"),
            BASIC.replace("output_dir", "regimes = [2019-01-01]\noutput_dir"),
            BASIC.replace("output_dir", "regimes = \"manual\"\noutput_dir"),
            BASIC.replace("output_dir", "output_formats = [\"pdf\"]\noutput_dir"),
            BASIC.replace("output_dir", "typo = 1\noutput_dir"),
        ];
        for text in bad {
            let e = PipelineConfig::from_toml(&text, Path::new("/")).unwrap_err();
            assert!(matches!(e, Error::Config(_)), "{e}");
        }
    }

    #[test]
    fn overrides_take_precedence() {
        let mut c = PipelineConfig::from_toml(BASIC, Path::new("/cfg")).unwrap();
        let o = Overrides {
            trimming: Some(0.2),
            window_end: Some(NaiveDate::from_ymd_opt(2010, 1, 1).unwrap()),
            kernel: Some(KernelKind::Bartlett),
            formats: vec![OutputFormat::Csv],
            ..Overrides::default()
        };
        c.apply(&o).unwrap();
        assert_eq!(c.breaks.trimming, 0.2);
        assert_eq!(c.window.unwrap().end, NaiveDate::from_ymd_opt(2010, 1, 1).unwrap());
        assert_eq!(c.kernel.kind, KernelKind::Bartlett);
        assert_eq!(c.output_formats, vec![OutputFormat::Csv]);

        let o = Overrides {
            window_start: Some(NaiveDate::from_ymd_opt(2011, 1, 1).unwrap()),
            ..Overrides::default()
        };
        assert!(c.apply(&o).is_err());
    }

    #[test]
    fn explicit_regimes_and_fixed_bandwidth() {
        let text = format!(
            "{BASIC}\n[kernel]\nkind = \"bartlett\"\nbandwidth = 4.5\n[adf]\nlags = \"aic\"\n"
        )
        .replace("output_dir", "regimes = [2008-09-12, 2012-02-15]\noutput_dir");
        let c = PipelineConfig::from_toml(&text, Path::new("/")).unwrap();
        assert_eq!(c.kernel, KernelSpec::fixed(KernelKind::Bartlett, 4.5).unwrap());
        assert_eq!(c.adf.lags, LagRule::Aic { max: 12 });
        assert!(matches!(c.regimes, RegimeSpec::Explicit(ref v) if v.len() == 2));
    }
}
