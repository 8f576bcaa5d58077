//! Error types shared across the crate.

use thiserror::Error;

/// Validation failures when constructing a [`crate::frame::FrameSpec`] or a
/// load pattern.
#[derive(Debug, Error, PartialEq)]
pub enum FrameError {
    #[error("frame must have at least one storey")]
    NoStoreys,
    #[error("frame must have at least two columns")]
    TooFewColumns,
    #[error("storey {storey}: height must be positive, got {value}")]
    NonPositiveHeight { storey: usize, value: f64 },
    #[error("bay {bay}: length must be positive, got {value}")]
    NonPositiveBayLength { bay: usize, value: f64 },
    #[error("{grid} grid has wrong shape: expected {expected_rows}x{expected_cols}")]
    GridShape {
        grid: &'static str,
        expected_rows: usize,
        expected_cols: usize,
    },
    #[error("storey {storey}, bay {bay}: vertical load must be >= 0, got {value}")]
    NegativeVerticalLoad { storey: usize, bay: usize, value: f64 },
    #[error("gravity acceleration must be positive, got {value}")]
    NonPositiveGravity { value: f64 },
    #[error("section `{name}`: {field} must be positive, got {value}")]
    NonPositiveSectionProperty {
        name: String,
        field: &'static str,
        value: f64,
    },
    #[error("section `{name}`: plastic moment {direct} disagrees with W_pl*f_y = {derived}")]
    InconsistentPlasticMoment {
        name: String,
        direct: f64,
        derived: f64,
    },
    #[error("unknown section reference")]
    UnknownSection,
    #[error("lateral pattern must have at least one positive force")]
    NoLateralForce,
    #[error("lateral pattern has {got} forces, frame has {expected} floors")]
    PatternLength { got: usize, expected: usize },
    #[error("pattern total must be positive, got {value}")]
    NonPositiveTotal { value: f64 },
}

/// Failures of the linear elastic solve.
#[derive(Debug, Error, PartialEq)]
pub enum ElasticError {
    #[error("assembled stiffness matrix is singular (pivot {pivot} below tolerance at row {row})")]
    SingularStiffness { row: usize, pivot: f64 },
}

/// Failures when evaluating mechanism combinations or searching for the
/// collapse multiplier.
#[derive(Debug, Error, PartialEq)]
pub enum SearchError {
    /// The gene vector does no work against the horizontal forces, so no
    /// collapse multiplier exists for it.
    #[error("combination does no horizontal work: not a collapse mechanism")]
    NoMechanism,
    #[error("search space of {space:.3e} gene vectors exceeds the evaluation budget of {budget:.3e}")]
    BudgetExceeded { space: f64, budget: f64 },
    #[error("invalid GA configuration: {0}")]
    InvalidConfig(String),
}

/// Failures while assembling or truncating the capacity curve.
#[derive(Debug, Error, PartialEq)]
pub enum CapacityError {
    /// Softening exhausts the base shear before any displacement criterion is
    /// met; the payload carries the displacement at which resistance crosses
    /// zero.
    #[error("base shear drops to zero at u = {zero_crossing} m, before any displacement limit")]
    NonPositiveResidual { zero_crossing: f64 },
}

/// Failures of the equivalent-SDOF conversion and verification.
#[derive(Debug, Error, PartialEq)]
pub enum AssessError {
    #[error("equal-energy fit has negative discriminant (area {area} exceeds elastic bound)")]
    BilinearizationFailure { area: f64 },
    #[error("floor masses must be positive")]
    NonPositiveMass,
    #[error("expected {expected} floor masses, got {got}")]
    MassCount { expected: usize, got: usize },
    #[error("invalid spectrum: {0}")]
    InvalidSpectrum(String),
    #[error(transparent)]
    Elastic(#[from] ElasticError),
}
