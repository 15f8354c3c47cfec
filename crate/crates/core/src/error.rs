use std::path::PathBuf;

/// Errors raised anywhere in the library.
///
/// Variants are grouped by who is at fault: bad caller input (`Parameter`,
/// `Domain`, `Config`), numerical breakdown (`Numerical`), or the
/// environment (`Io`, `Csv`).
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    Parameter { name: &'static str, reason: String },

    /// A closed-form evaluator was called outside the exponent range where
    /// its derivation holds.
    #[error("{condition} (got alpha = {alpha}, required > {threshold})")]
    Domain {
        condition: &'static str,
        alpha: f64,
        threshold: f64,
    },

    #[error("series diverges: {0}")]
    Divergent(String),

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("coincident antennas at distance {distance:e} (rx {rx}, tx {tx})")]
    CoincidentAntennas { rx: usize, tx: usize, distance: f64 },

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("effective channel of size {size} exceeds the cap of {cap}; reduce n or psi")]
    MatrixCap { size: usize, cap: usize },

    #[error("config error: {0}")]
    Config(String),

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Self {
        Error::Parameter {
            name,
            reason: reason.into(),
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// True for errors caused by numerical breakdown rather than bad input.
    pub fn is_numerical(&self) -> bool {
        matches!(self, Error::Numerical(_) | Error::Divergent(_))
    }
}
