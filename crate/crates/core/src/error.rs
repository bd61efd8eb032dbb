use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("unknown parameter `{0}`")]
    UnknownKey(String),

    #[error("parameter `{key}` = {value} is outside its interval {interval}")]
    OutOfInterval { key: String, value: String, interval: String },

    #[error("parameter `{key}`: cannot parse `{value}`")]
    Parse { key: String, value: String },

    #[error("config line {line}: expected `key = value`, got `{text}`")]
    Syntax { line: usize, text: String },

    #[error("num_dwellings ({dwellings}) must exceed num_families ({families})")]
    NotEnoughDwellings { dwellings: usize, families: usize },

    #[error("invalid parameter combination: {0}")]
    Invalid(String),

    #[error("number of regions must be 1, 4 or 7, got {0}")]
    InvalidRegionCount(u32),

    #[error("point ({x}, {y}) lies outside the simulation square")]
    OutsideSquare { x: f64, y: f64 },

    #[error("cannot allocate agents: there are no families")]
    NoFamilies,

    #[error("agent {0} is a job candidate but its family has no dwelling")]
    HomelessCandidate(usize),

    #[error("region {region}: previous quality-of-life index {qli} is not positive")]
    NonPositiveQli { region: usize, qli: f64 },

    #[error("region {region}: negative treasury {treasury}")]
    NegativeTreasury { region: usize, treasury: f64 },

    #[error("statistic needs a non-empty input")]
    EmptyInput,

    #[error("unknown sweep parameter `{0}`")]
    UnknownSweepParam(String),

    #[error("sweep `{param}` row {row}: {source}")]
    SweepValue {
        param: String,
        row: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("output directory {path:?} is not writable: {source}")]
    OutputDir {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path:?}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{0}")]
    Summary(String),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io { path: path.into(), source }
    }
}
