use std::path::PathBuf;
use std::process::ExitCode;

use breakgauge::config::{parse_kernel, OutputFormat, Overrides, PipelineConfig};
use breakgauge::csvio::CsvOptions;
use breakgauge::pipeline::{run_scoped, Scope};
use breakgauge::{Error, Result};
use breakgauge::config::MarketSpec;
use breakgauge_core::series::ReturnKind;
use chrono::NaiveDate;
use clap::{Args, Parser, Subcommand};

#[derive(Parser)]
#[command(name = "breakgauge", version, about = "Structural breaks in a volatility index and its response to market returns")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the full table battery described by a TOML config.
    Run {
        config: PathBuf,
        #[command(flatten)]
        flags: Flags,
    },
    /// Break tests and regime bands for one index file.
    Breaks {
        csv: PathBuf,
        #[command(flatten)]
        flags: Flags,
    },
    /// Full-sample correlations and regression of index changes on one market.
    Estimate {
        vix: PathBuf,
        market: PathBuf,
        /// Use simple instead of log returns.
        #[arg(long)]
        simple_returns: bool,
        #[command(flatten)]
        flags: Flags,
    },
}

#[derive(Args)]
struct Flags {
    /// Index CSV, replacing `vix_file`.
    #[arg(long)]
    input: Option<PathBuf>,
    #[arg(long)]
    window_start: Option<NaiveDate>,
    #[arg(long)]
    window_end: Option<NaiveDate>,
    #[arg(long)]
    trimming: Option<f64>,
    #[arg(long)]
    max_breaks: Option<usize>,
    #[arg(long)]
    cvix_scale: Option<f64>,
    /// parzen or bartlett
    #[arg(long)]
    kernel: Option<String>,
    #[arg(long)]
    output_dir: Option<PathBuf>,
    /// Also test the standardized index with outliers removed.
    #[arg(long)]
    standardized_breaks: bool,
    /// csv or markdown; repeat for both.
    #[arg(long = "format")]
    formats: Vec<String>,
}

impl Flags {
    fn overrides(&self) -> Result<Overrides> {
        Ok(Overrides {
            input: self.input.clone(),
            window_start: self.window_start,
            window_end: self.window_end,
            trimming: self.trimming,
            max_breaks: self.max_breaks,
            cvix_scale: self.cvix_scale,
            kernel: self.kernel.as_deref().map(parse_kernel).transpose()?,
            output_dir: self.output_dir.clone(),
            standardized_breaks: self.standardized_breaks,
            formats: self.formats.iter().map(|f| OutputFormat::parse(f)).collect::<Result<_>>()?,
        })
    }
}

fn configure_threads() -> Result<()> {
    if let Ok(v) = std::env::var("BREAKGAUGE_THREADS") {
        let n: usize = v
            .parse()
            .ok()
            .filter(|n| *n > 0)
            .ok_or_else(|| Error::Config(format!("BREAKGAUGE_THREADS must be a positive integer, got {v:?}")))?;
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Error::Config(e.to_string()))?;
    }
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    configure_threads()?;
    let (mut config, flags, scope) = match &cli.command {
        Command::Run { config, flags } => (PipelineConfig::load(config)?, flags, Scope::All),
        Command::Breaks { csv, flags } => (PipelineConfig::for_index(csv, "."), flags, Scope::Breaks),
        Command::Estimate {
            vix,
            market,
            simple_returns,
            flags,
        } => {
            let mut c = PipelineConfig::for_index(vix, ".");
            let id = market
                .file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_else(|| "market".into());
            let return_kind = if *simple_returns {
                ReturnKind::SimpleReturn
            } else {
                ReturnKind::LogReturn
            };
            c.markets.insert(
                id,
                MarketSpec {
                    file: market.clone(),
                    return_kind,
                    csv: CsvOptions::default(),
                },
            );
            (c, flags, Scope::Estimates)
        }
    };
    config.apply(&flags.overrides()?)?;
    let report = run_scoped(&config, scope)?;
    for a in &report.artifacts {
        for p in &a.paths {
            println!("{} ({} rows)", p.display(), a.rows);
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("breakgauge: {e}");
            let mut source = std::error::Error::source(&e);
            while let Some(s) = source {
                if !e.to_string().contains(&s.to_string()) {
                    eprintln!("  caused by: {s}");
                }
                source = s.source();
            }
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
