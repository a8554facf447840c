use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GroupError {
    #[error("index ({k},{n}) is not strictly upper triangular in B({size})")]
    IndexOutOfRange { k: usize, n: usize, size: usize },
    #[error("size mismatch: B({left}) vs B({right})")]
    SizeMismatch { left: usize, right: usize },
    #[error("cannot embed B({from}) into the smaller B({to})")]
    EmbedTooSmall { from: usize, to: usize },
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MeasureError {
    #[error("weight b_{k},{n} = {value} is not positive")]
    NonPositiveWeight { k: usize, n: usize, value: f64 },
    #[error("geometric family requires s > 1, got {0}")]
    InvalidBase(f64),
    #[error("index window {window} does not cover truncation size {size}")]
    WindowTooSmall { window: usize, size: usize },
    #[error("series index requires k < n, got ({k},{n})")]
    BadSeriesIndex { k: usize, n: usize },
    #[error(transparent)]
    Group(#[from] GroupError),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RepresentationError {
    #[error("Monte Carlo estimate needs at least 2 samples, got {0}")]
    TooFewSamples(usize),
    #[error(transparent)]
    Measure(#[from] MeasureError),
    #[error(transparent)]
    Group(#[from] GroupError),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SymbolicError {
    #[error("ladder needs N >= 3, got {0}")]
    LadderTooSmall(usize),
    #[error("symbolic size cap {cap} exceeded: N = {size}")]
    SizeCap { size: usize, cap: usize },
    #[error("bracket for x{target} at step m={step} does not reduce: {reason}")]
    NotReducible {
        target: String,
        step: usize,
        reason: String,
    },
    #[error(transparent)]
    Group(#[from] GroupError),
}
