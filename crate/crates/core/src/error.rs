use std::fmt;

use thiserror::Error;

/// Name of a structural rule a system description can break.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Rule {
    NoBlocks,
    DuplicateId,
    BadNumber,
    NonFiniteWeight,
    EmptyBlock,
    UnknownVertex,
    NotStronglyConnected,
    AperiodicSimpleCycle,
    DegreeTooLow,
    EmptyCycle,
    PeriodZero,
    EmptyProducts,
    BandOrder,
    UnknownBlock,
    IllegalLimitBlock,
    AnchorNotCycle,
    AnchorCycleOnCycleBlock,
    ZeroOutsideCore,
}

impl Rule {
    pub fn message(self) -> &'static str {
        match self {
            Rule::NoBlocks => "system must contain at least one block",
            Rule::DuplicateId => "identifiers must be unique",
            Rule::BadNumber => "number could not be parsed",
            Rule::NonFiniteWeight => "weight log-modulus must be finite",
            Rule::EmptyBlock => "aperiodic block must have vertices",
            Rule::UnknownVertex => "edge references an unknown vertex",
            Rule::NotStronglyConnected => "aperiodic block must be strongly connected",
            Rule::AperiodicSimpleCycle => "aperiodic block must not be a simple cycle",
            Rule::DegreeTooLow => "every vertex needs in-degree and out-degree at least 1",
            Rule::EmptyCycle => "cycle block must have period at least 1",
            Rule::PeriodZero => "clopen periodic block must have period at least 1",
            Rule::EmptyProducts => "clopen periodic block needs at least one product",
            Rule::BandOrder => "modulus band must satisfy lo <= hi",
            Rule::UnknownBlock => "trajectory references an unknown block",
            Rule::IllegalLimitBlock => "illegal limit block kind",
            Rule::AnchorNotCycle => "anchor is not a simple cycle of its block",
            Rule::AnchorCycleOnCycleBlock => "anchors on cycle blocks take the whole cycle; omit the vertex list",
            Rule::ZeroOutsideCore => "zero weights are only allowed on trajectory cores",
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Rule::NoBlocks => "no-blocks",
            Rule::DuplicateId => "duplicate-id",
            Rule::BadNumber => "bad-number",
            Rule::NonFiniteWeight => "non-finite-weight",
            Rule::EmptyBlock => "empty-block",
            Rule::UnknownVertex => "unknown-vertex",
            Rule::NotStronglyConnected => "not-strongly-connected",
            Rule::AperiodicSimpleCycle => "aperiodic-simple-cycle",
            Rule::DegreeTooLow => "degree-too-low",
            Rule::EmptyCycle => "empty-cycle",
            Rule::PeriodZero => "period-zero",
            Rule::EmptyProducts => "empty-products",
            Rule::BandOrder => "band-order",
            Rule::UnknownBlock => "unknown-block",
            Rule::IllegalLimitBlock => "illegal-limit-block",
            Rule::AnchorNotCycle => "anchor-not-cycle",
            Rule::AnchorCycleOnCycleBlock => "anchor-cycle-on-cycle-block",
            Rule::ZeroOutsideCore => "zero-outside-core",
        }
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// One broken invariant, tagged with the block or trajectory it concerns.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Violation {
    pub subject: String,
    pub rule: Rule,
    pub detail: String,
}

impl Violation {
    pub fn new(subject: impl Into<String>, rule: Rule, detail: impl Into<String>) -> Self {
        Self {
            subject: subject.into(),
            rule,
            detail: detail.into(),
        }
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {} ({})", self.subject, self.rule.message(), self.rule)?;
        if !self.detail.is_empty() {
            write!(f, ": {}", self.detail)?;
        }
        Ok(())
    }
}

#[derive(Debug, Error)]
pub enum SpectraError {
    #[error("system description is invalid ({} violation(s))", .0.len())]
    Invalid(Vec<Violation>),
    #[error("malformed system file: {0}")]
    Malformed(String),
    #[error("zero weights are not supported here (trajectory {0})")]
    ZeroWeightUnsupported(String),
    #[error("lambda = 0 is handled by the classifier, not the partition solver")]
    ZeroLambda,
    #[error("system has infinite components (block or trajectory {0})")]
    NotFinite(String),
    #[error("graph too large for exhaustive enumeration: {0} vertices (limit {1})")]
    TooLarge(usize, usize),
    #[error("computation cancelled")]
    Cancelled,
    #[error("unknown trajectory {0}")]
    UnknownTrajectory(String),
}

impl SpectraError {
    /// True for errors that reject a well-formed request the model does not
    /// cover (as opposed to malformed input).
    pub fn is_unsupported(&self) -> bool {
        matches!(
            self,
            SpectraError::ZeroWeightUnsupported(_)
                | SpectraError::ZeroLambda
                | SpectraError::NotFinite(_)
                | SpectraError::TooLarge(..)
        )
    }
}

pub type Result<T> = std::result::Result<T, SpectraError>;
