use std::path::PathBuf;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error(transparent)]
    Core(#[from] gsdca::Error),
    #[error("invalid config: {0}")]
    Config(String),
    #[error("unknown preset `{0}`")]
    UnknownPreset(String),
    #[error("tuning failed for {solver}: every grid point diverged")]
    Tuning { solver: String },
    #[error("plot: {0}")]
    Plot(String),
    #[error("{path}: {source}")]
    File {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
