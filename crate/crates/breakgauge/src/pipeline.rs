//! End-to-end run: load, analyze, then write every table.
//!
//! All numbers are computed before the first file is touched, and files
//! written by a run that later fails are removed again.

use std::fs;
use std::ops::Range;
use std::path::{Path, PathBuf};

use breakgauge_core::breaks::{run_bai_perron, BreakTestReport};
use breakgauge_core::descriptive::{percentile_profile, standardize_excluding_outliers, summary, PercentileProfile, SummaryStats};
use breakgauge_core::fear::{build_design, estimate, leadlag_correlations, FearModelEstimate, LeadLagCorrelation, OFFSETS};
use breakgauge_core::series::{align_panel, DateWindow, ObservationSeries, ReturnPanel};
use breakgauge_core::unitroot::{adf_test, AdfResult};
use chrono::NaiveDate;
use rayon::prelude::*;

use crate::config::{PipelineConfig, RegimeSpec};
use crate::csvio::load_series;
use crate::error::{Error, Result, Stage};
use crate::report;
use crate::tables::{emit_table, Artifact};

/// Which part of the table battery to produce.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scope {
    /// Every table.
    All,
    /// Break tests and regime bands for the index alone.
    Breaks,
    /// Correlations and regression for the full sample only.
    Estimates,
}

/// A sample period: the full window or one regime.
#[derive(Debug, Clone, PartialEq)]
pub struct Period {
    pub label: String,
    pub window: DateWindow,
    /// Positions in the index level series.
    pub levels: Range<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DescriptiveRow {
    pub period: String,
    pub variable: String,
    pub stats: SummaryStats,
    pub adf: AdfResult,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MarketResult {
    pub period: String,
    pub correlation: LeadLagCorrelation,
    pub estimate: FearModelEstimate,
}

/// Break run on the standardized index with outliers removed.
#[derive(Debug, Clone, PartialEq)]
pub struct StandardizedBreaks {
    pub report: BreakTestReport,
    pub excluded: Vec<NaiveDate>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Analysis {
    /// Index levels inside the window.
    pub vix: ObservationSeries,
    pub panel: ReturnPanel,
    pub breaks: Option<BreakTestReport>,
    pub std_breaks: Option<StandardizedBreaks>,
    pub periods: Vec<Period>,
    /// One per period.
    pub percentiles: Vec<PercentileProfile>,
    pub descriptives: Vec<DescriptiveRow>,
    /// Market-major, then period order.
    pub markets: Vec<MarketResult>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EmittedArtifact {
    pub name: String,
    pub rows: usize,
    pub paths: Vec<PathBuf>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PipelineReport {
    pub artifacts: Vec<EmittedArtifact>,
    pub analysis: Analysis,
}

impl PipelineReport {
    pub fn paths(&self) -> impl Iterator<Item = &Path> {
        self.artifacts.iter().flat_map(|a| a.paths.iter().map(PathBuf::as_path))
    }
}

pub fn run_pipeline(config: &PipelineConfig) -> Result<PipelineReport> {
    run_scoped(config, Scope::All)
}

pub fn run_scoped(config: &PipelineConfig, scope: Scope) -> Result<PipelineReport> {
    config.validate()?;
    let analysis = analyze(config, scope)?;
    let artifacts = report::artifacts(&analysis, scope);
    let emitted = write_all(&artifacts, config)?;
    Ok(PipelineReport {
        artifacts: emitted,
        analysis,
    })
}

pub fn analyze(config: &PipelineConfig, scope: Scope) -> Result<Analysis> {
    let vix_name = config.vix_file.display().to_string();
    let mut vix = load_series(&config.vix_file, "VIX", &config.vix_csv)?;
    if let Some(w) = &config.window {
        vix = vix.restrict(w);
    }
    let vix = vix.require_positive().map_err(Error::stage(Stage::Ingest, &vix_name))?;
    if vix.len() < 3 {
        return Err(Error::Stage {
            stage: Stage::Ingest,
            input: vix_name,
            source: breakgauge_core::Error::TooShort { needed: 3, got: vix.len() },
        });
    }

    let markets = if scope == Scope::Breaks {
        Vec::new()
    } else {
        config
            .markets
            .iter()
            .map(|(id, spec)| load_series(&spec.file, id, &spec.csv))
            .collect::<Result<Vec<_>>>()?
    };
    let aligned = align_panel(&vix, &markets).map_err(Error::stage(Stage::Ingest, "market alignment"))?;
    let kinds: Vec<_> = config
        .markets
        .iter()
        .filter(|_| scope != Scope::Breaks)
        .map(|(id, m)| (id.clone(), m.return_kind))
        .collect();
    let panel = ReturnPanel::build(&aligned, &kinds, config.cvix_scale)
        .map_err(Error::stage(Stage::Ingest, "returns"))?;

    let breaks = if scope == Scope::Estimates {
        None
    } else {
        Some(run_bai_perron(vix.values(), vix.dates(), &config.breaks).map_err(Error::stage(Stage::Breaks, "VIX level"))?)
    };
    let std_breaks = if config.standardized_breaks && scope != Scope::Estimates {
        Some(standardized_breaks(&vix, config)?)
    } else {
        None
    };

    let mut periods = vec![Period {
        label: "Full".into(),
        window: window_of(&vix, 0..vix.len()),
        levels: 0..vix.len(),
    }];
    if scope == Scope::All {
        let bounds = match (&config.regimes, &breaks) {
            (RegimeSpec::Auto, Some(b)) => b.regimes.iter().map(|r| r.start..r.end).collect(),
            (RegimeSpec::Explicit(ends), _) => explicit_bounds(&vix, ends)?,
            (RegimeSpec::Auto, None) => Vec::new(),
        };
        for (k, r) in bounds.into_iter().enumerate() {
            periods.push(Period {
                label: format!("Regime {}", k + 1),
                window: window_of(&vix, r.clone()),
                levels: r,
            });
        }
    }

    let (percentiles, descriptives) = if scope == Scope::All {
        let percentiles = periods
            .iter()
            .map(|p| {
                percentile_profile(&vix.values()[p.levels.clone()])
                    .map_err(Error::stage(Stage::Descriptives, format!("VIX, {}", p.label)))
            })
            .collect::<Result<Vec<_>>>()?;
        let jobs: Vec<(&Period, String, &[f64])> = periods
            .iter()
            .flat_map(|p| {
                let r = panel.window_range(&p.window);
                let mut v: Vec<(&Period, String, &[f64])> = vec![
                    (p, "VIX".into(), &vix.values()[p.levels.clone()]),
                    (p, "cVIX".into(), &panel.index_changes.values[r.clone()]),
                ];
                for (id, m) in &panel.markets {
                    v.push((p, id.clone(), &m.values[r.clone()]));
                }
                v
            })
            .collect();
        let descriptives = jobs
            .par_iter()
            .map(|(p, var, values)| {
                let input = format!("{var}, {}", p.label);
                let stats = summary(values).map_err(Error::stage(Stage::Descriptives, &input))?;
                let adf = adf_test(values, config.adf.variant, config.adf.lags).map_err(Error::stage(Stage::UnitRoot, &input))?;
                Ok(DescriptiveRow {
                    period: p.label.clone(),
                    variable: var.clone(),
                    stats,
                    adf,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        (percentiles, descriptives)
    } else {
        (Vec::new(), Vec::new())
    };

    let market_results = if scope == Scope::Breaks {
        Vec::new()
    } else {
        let jobs: Vec<(&String, &Period)> = panel.markets.keys().flat_map(|id| periods.iter().map(move |p| (id, p))).collect();
        jobs.par_iter()
            .map(|(id, p)| market_period(&panel, id, p, config))
            .collect::<Result<Vec<_>>>()?
    };

    Ok(Analysis {
        vix,
        panel,
        breaks,
        std_breaks,
        periods,
        percentiles,
        descriptives,
        markets: market_results,
    })
}

fn market_period(panel: &ReturnPanel, id: &str, period: &Period, config: &PipelineConfig) -> Result<MarketResult> {
    let input = format!("{id}, {}", period.label);
    let r = panel.window_range(&period.window);
    let returns = &panel.market(id).map_err(Error::stage(Stage::Correlations, &input))?.values;
    let correlation = leadlag_correlations(id, &panel.index_changes.values[r.clone()], &returns[r], &OFFSETS)
        .map_err(Error::stage(Stage::Correlations, &input))?;
    let design = build_design(panel, id, Some(&period.window)).map_err(Error::stage(Stage::Estimation, &input))?;
    let estimate = estimate(&design, &config.kernel).map_err(Error::stage(Stage::Estimation, &input))?;
    Ok(MarketResult {
        period: period.label.clone(),
        correlation,
        estimate,
    })
}

fn standardized_breaks(vix: &ObservationSeries, config: &PipelineConfig) -> Result<StandardizedBreaks> {
    let input = "standardized VIX";
    let std = standardize_excluding_outliers(vix.values(), config.outlier_k).map_err(Error::stage(Stage::Descriptives, input))?;
    let mut skip = std.excluded.iter().peekable();
    let mut kept = Vec::with_capacity(std.values.len());
    for (i, d) in vix.dates().iter().enumerate() {
        if skip.peek() == Some(&&i) {
            skip.next();
        } else {
            kept.push(*d);
        }
    }
    let report = run_bai_perron(&std.values, &kept, &config.breaks).map_err(Error::stage(Stage::Breaks, input))?;
    Ok(StandardizedBreaks {
        report,
        excluded: std.excluded.iter().map(|&i| vix.dates()[i]).collect(),
    })
}

fn window_of(vix: &ObservationSeries, r: Range<usize>) -> DateWindow {
    DateWindow {
        start: vix.dates()[r.start],
        end: vix.dates()[r.end - 1],
    }
}

fn explicit_bounds(vix: &ObservationSeries, ends: &[NaiveDate]) -> Result<Vec<Range<usize>>> {
    let mut out = Vec::with_capacity(ends.len() + 1);
    let mut start = 0;
    for end in ends.iter().map(|e| vix.dates().partition_point(|d| d <= e)).chain([vix.len()]) {
        if end <= start {
            return Err(Error::Config(format!(
                "regime {} holds no observations",
                out.len() + 1
            )));
        }
        out.push(start..end);
        start = end;
    }
    Ok(out)
}

fn write_all(artifacts: &[Artifact], config: &PipelineConfig) -> Result<Vec<EmittedArtifact>> {
    let dir = &config.output_dir;
    fs::create_dir_all(dir).map_err(Error::io(dir))?;
    let mut written: Vec<PathBuf> = Vec::new();
    let mut emitted = Vec::with_capacity(artifacts.len());
    for a in artifacts {
        let mut paths = Vec::new();
        for &f in &config.output_formats {
            let path = dir.join(format!("{}.{}", a.name, f.extension()));
            if let Err(e) = emit_table(a, f, &path) {
                for p in &written {
                    let _ = fs::remove_file(p);
                }
                let _ = fs::remove_file(&path);
                return Err(e);
            }
            written.push(path.clone());
            paths.push(path);
        }
        emitted.push(EmittedArtifact {
            name: a.name.clone(),
            rows: a.row_count(),
            paths,
        });
    }
    Ok(emitted)
}
