//! Crate-wide error type with a coarse kind used for process exit codes.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Coarse classification: configuration mistakes exit 2, bad data exits 3.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    Config,
    Data,
    Internal,
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("missing file: {0}")]
    MissingFile(String),

    #[error("missing column `{0}` in {1}")]
    MissingColumn(String, String),

    #[error("unknown zone id {0}")]
    UnknownZone(u32),

    #[error("no usable orders after filtering ({0})")]
    EmptyScenario(String),

    #[error("invalid distance matrix: {0}")]
    BadMatrix(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("window ordering violated: need t_o >= t_l >= t_r > 0, got t_o={t_o} t_l={t_l} t_r={t_r}")]
    WindowOrdering { t_o: i64, t_l: i64, t_r: i64 },

    #[error("flow is inconsistent with the network: {0}")]
    InconsistentFlow(String),

    #[error("cycle detected in shareability graph")]
    CycleDetected,

    #[error("non-positive standardization horizon: t_e + t_buffer = {0} for order {1}")]
    BadStandardization(i64, u64),

    #[error("model is not trained")]
    UntrainedModel,

    #[error("model file is invalid: {0}")]
    BadModel(String),

    #[error("instance too large for exhaustive search: {orders} orders, {drivers} drivers")]
    InstanceTooLarge { orders: usize, drivers: usize },

    #[error("traces have mismatched iteration grids")]
    MismatchedTraces,

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("serialization error: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub fn kind(&self) -> ErrorKind {
        match self {
            Error::Config(_) | Error::WindowOrdering { .. } | Error::InstanceTooLarge { .. } => {
                ErrorKind::Config
            }
            Error::MissingFile(_)
            | Error::MissingColumn(_, _)
            | Error::UnknownZone(_)
            | Error::EmptyScenario(_)
            | Error::BadMatrix(_)
            | Error::BadModel(_)
            | Error::Csv(_) => ErrorKind::Data,
            _ => ErrorKind::Internal,
        }
    }
}
