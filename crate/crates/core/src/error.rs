use alloc::string::String;

use crate::enumerate::WalkClass;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("dimension {0} is outside the supported range 2..=4")]
    UnsupportedDimension(usize),
    #[error("sites of different dimension cannot be combined")]
    DimensionMismatch,
    #[error("path is empty")]
    EmptyPath,
    #[error("site list is not a self-avoiding nearest-neighbour walk")]
    NotSelfAvoiding,
    #[error("cutoff {cutoff} exceeds the hard limit of {limit} steps")]
    CutoffUnsupported { cutoff: usize, limit: usize },
    #[error("estimated {estimated:.3e} search nodes exceeds the budget of {budget:.3e}")]
    CutoffTooLarge { estimated: f64, budget: f64 },
    #[error("beta must be positive and finite, got {0}")]
    InvalidBeta(f64),
    #[error("expected a {expected:?} table, got {found:?}")]
    WrongClass { expected: WalkClass, found: WalkClass },
    #[error("tables disagree on dimension or cutoff")]
    IncompatibleTables,
    #[error("no walk of length <= {cutoff} reaches distance {n} along the first axis")]
    ZeroWeight { n: i64, cutoff: usize },
    #[error("no bridge to distance {n} has length <= {cutoff}")]
    NoBridges { n: i64, cutoff: usize },
    #[error("irreducible table contains no bridge with positive extent")]
    EmptyTable,
    #[error("step law does not normalize: total mass {0}")]
    NormalizationFailure(f64),
    #[error("slab sum vanishes at distance {0}")]
    ZeroSlab(i64),
    #[error("transverse box radius {radius} is smaller than the step reach {reach}")]
    BoxTooSmall { radius: i64, reach: i64 },
    #[error("backward sampler reached a state of zero weight at t = {0}")]
    UnreachableState(i64),
    #[error("time {0} lies outside [0, 1]")]
    TimeOutOfRange(f64),
    #[error("time {0} is not a point of the ensemble grid")]
    TimeNotOnGrid(f64),
    #[error("covariance is identically zero")]
    DegenerateFit,
    #[error("variance must be positive, got {0}")]
    InvalidVariance(f64),
    #[error("skeleton is not the regeneration skeleton of the walk")]
    SkeletonMismatch,
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}
