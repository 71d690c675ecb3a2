use std::fmt;
use std::path::PathBuf;

use breakgauge_core::Error as CoreError;

/// Pipeline stage in which a failure happened.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stage {
    Config,
    Ingest,
    Descriptives,
    UnitRoot,
    Breaks,
    Correlations,
    Estimation,
    Output,
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Stage::Config => "config",
            Stage::Ingest => "ingest",
            Stage::Descriptives => "descriptives",
            Stage::UnitRoot => "unit-root",
            Stage::Breaks => "breaks",
            Stage::Correlations => "correlations",
            Stage::Estimation => "estimation",
            Stage::Output => "output",
        })
    }
}

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{}: line {line}: {message}", path.display())]
    Parse {
        path: PathBuf,
        line: u64,
        message: String,
    },
    #[error("{stage} stage failed ({input}): {source}")]
    Stage {
        stage: Stage,
        input: String,
        #[source]
        source: CoreError,
    },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn stage(stage: Stage, input: impl Into<String>) -> impl FnOnce(CoreError) -> Error {
        let input = input.into();
        move |source| Error::Stage {
            stage,
            input,
            source,
        }
    }

    pub fn io(path: impl Into<PathBuf>) -> impl FnOnce(std::io::Error) -> Error {
        let path = path.into();
        move |source| Error::Io { path, source }
    }

    /// Process exit status: 1 for invalid input or I/O, 2 for numerical
    /// failure.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Stage { source, .. } if source.is_numerical() => 2,
            _ => 1,
        }
    }
}
