use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("label vector is empty")]
    EmptyLabels,
    #[error("labels must be positive integers, found {0}")]
    NonPositiveLabel(i64),
    #[error("item {item} out of range for {n_items} items")]
    ItemOutOfRange { item: usize, n_items: usize },
    #[error("item {0} appears in more than one block")]
    DuplicateItem(usize),
    #[error("item {0} is already present in the partition")]
    ItemPresent(usize),
    #[error("item {0} is not present in the partition")]
    ItemAbsent(usize),
    #[error("block {0} is empty")]
    EmptyBlock(usize),
    #[error("partition does not cover every item")]
    Incomplete,
    #[error("partitions are over different item sets ({0} vs {1})")]
    MismatchedItems(usize, usize),
    #[error("invalid block id {0}")]
    InvalidBlock(usize),
    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),
    #[error("marginal totals differ: {0} vs {1}")]
    MarginalMismatch(f64, f64),
    #[error("matrix is not positive definite")]
    NotPositiveDefinite,
    #[error("dimension mismatch: expected {expected}, found {found}")]
    Dimension { expected: usize, found: usize },
    #[error("invalid model: {0}")]
    InvalidModel(String),
    #[error("invalid config: {0}")]
    Config(String),
    #[error("trajectory too short: need index {needed}, have {have}")]
    TrajectoryTooShort { needed: usize, have: usize },
    #[error("chains diverged after meeting at sweep {0}")]
    FaithfulnessViolated(u64),
    #[error("{0}")]
    Aggregation(String),
    #[error("enumeration over {0} items exceeds the size cap of {1}")]
    EnumerationTooLarge(usize, usize),
    #[error("pairing mismatch: {0}")]
    Pairing(String),
    #[error("parse error in {path}: {msg}")]
    Parse { path: PathBuf, msg: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}
