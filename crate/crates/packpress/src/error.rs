use std::path::PathBuf;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    /// A diagnostic anchored at a line of the config file.
    #[error("{path}:{line}: {message}")]
    Config { path: String, line: usize, message: String },
    #[error("cannot read {path}: {source}")]
    Read { path: PathBuf, source: std::io::Error },
    #[error("cannot write {path}: {source}")]
    Output { path: PathBuf, source: std::io::Error },
    #[error(transparent)]
    Core(#[from] packpress_core::Error),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("thread pool: {0}")]
    Pool(#[from] rayon::ThreadPoolBuildError),
}

impl CliError {
    /// Every error is a bad invocation; asserted-invariant failures are not
    /// errors and exit with 1 instead.
    pub fn exit_code(&self) -> u8 {
        2
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;
