use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("fields live on different grids")]
    GridMismatch,
    #[error("non-finite value in {0}")]
    NonFinite(&'static str),
    #[error("derivative order {0} exceeds the supported maximum of 4")]
    DerivativeOrder(u32),
    #[error("L^p exponent must satisfy p >= 1, got {0}")]
    InvalidExponent(f64),
    #[error("block index {j} exceeds j_max = {j_max} for this grid")]
    BlockOutOfRange { j: i32, j_max: i32 },
    #[error("invalid model parameters: {0}")]
    InvalidParams(String),
    #[error("norm of the input is zero")]
    ZeroNorm,
    #[error("kernel form requires alpha = beta = 1, got alpha = {alpha}, beta = {beta}")]
    KernelParams { alpha: f64, beta: f64 },
    #[error("time {t} outside the stored range [{start}, {end}]")]
    StageLookup { t: f64, start: f64, end: f64 },
    #[error("invalid step controller: {0}")]
    InvalidController(String),
    #[error("Picard iteration did not converge in {iterations} iterations (last distance {last:e})")]
    PicardNotConverged {
        iterations: usize,
        last: f64,
        distances: Vec<f64>,
    },
    #[error("flow map needs snapshots: {0}")]
    SnapshotStride(String),
    #[error("flow map lost monotonicity (min y_xi = {0:e})")]
    FoldedFlow(f64),
    #[error("odd symmetry broken: defect {0:e}")]
    ParityBroken(f64),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("grid does not resolve the requested data: {0}")]
    Resolution(String),
}

pub type Result<T> = std::result::Result<T, Error>;
