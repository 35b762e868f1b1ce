//! Crate-wide error type.

use thiserror::Error;

#[derive(Error, Debug, Clone, PartialEq)]
pub enum Error {
    #[error("alphabet size must be at least 2, got {0}")]
    AlphabetTooSmall(usize),
    #[error("letter {letter} out of range for alphabet of size {size}")]
    LetterOutOfRange { letter: u8, size: usize },
    #[error("the periodic part of an infinite word must be non-empty")]
    EmptyPeriod,
    #[error("alphabet mismatch: {0} vs {1}")]
    AlphabetMismatch(usize, usize),
    #[error("weights must be positive and sum to 1")]
    InvalidWeights,
    #[error("map {0} is not a strict contraction")]
    NotContractive(usize),
    #[error("branch images overlap on a set of positive measure")]
    OverlappingBranches,
    #[error("operation requires an affine rational system, got {0}")]
    NotAffine(String),
    #[error("operation requires equal contraction ratios")]
    UnequalRatios,
    #[error("level {level} exceeds the configured cap (dimension {dim} > {cap})")]
    LevelCap { level: usize, dim: usize, cap: usize },
    #[error("operator levels do not align: {0} vs {1}")]
    LevelMismatch(usize, usize),
    #[error("word of length {word} does not fit in level {level}")]
    WordTooLong { word: usize, level: usize },
    #[error("the empty word has no operator projection (P_empty = 0 by convention)")]
    EmptyWordProjection,
    #[error("operand is not a projection")]
    NotAProjection,
    #[error("conditional probability undefined: conditioning event has weight zero")]
    ZeroDenominator,
    #[error("conditioning fiber at {0} has weight zero")]
    ZeroFiber(String),
    #[error("Stieltjes measure is not absolutely continuous: jump at {0} outside support")]
    NotAbsolutelyContinuous(String),
    #[error("sum leaves the exact scalar ring (incompatible radicands or phases)")]
    InexactSum,
    #[error("radicand too large for square-free normalization")]
    RadicandOverflow,
    #[error("|z| = {0} too close to 1 for the requested tolerance")]
    RadialBound(f64),
    #[error("truncated Herglotz function lost positivity; increase the order")]
    HerglotzPositivity,
    #[error("cdf descent did not reach a cycle or a gap (non-terminating orbit?)")]
    DescentDepth,
    #[error("unknown system name: {0}")]
    UnknownSystem(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("alpha handle is not unital (deviation {0})")]
    NonUnitalAlpha(f64),
    #[error("unsupported operation for this system: {0}")]
    Unsupported(String),
}

pub type Result<T> = std::result::Result<T, Error>;
