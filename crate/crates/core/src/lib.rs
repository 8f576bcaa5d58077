//! Plastic limit analysis of planar regular frames.
//!
//! The crate finds the collapse load multiplier of a frame under a lateral
//! force pattern by combining elementary mechanisms (storey sway, beam,
//! joint rotation), searches the combination space with a genetic algorithm
//! or exhaustively, reconstructs an approximated bilinear capacity curve
//! with a second-order softening branch, truncates it at base-shear-drop and
//! chord-rotation limits, and verifies the resulting equivalent SDOF against
//! a four-branch design spectrum.
//!
//! Units: kN, m, s, rad; Young's modulus in kPa; spectral accelerations in
//! m/s^2 with peak ground acceleration given in g-units.
//!
//! ```
//! use limitframe::pipeline::run_pattern;
//!
//! let doc = limitframe::parse_document(r#"{
//!     "frame": {
//!         "storey_heights": [3.0],
//!         "bay_lengths": [5.0],
//!         "column_sections": [["IPE", "IPE"]],
//!         "beam_sections": [["IPE"]],
//!         "vertical_loads": [[0.0]]
//!     },
//!     "sections": {
//!         "IPE": {"moment_of_inertia": 1e-4, "elastic_modulus": 2.1e8,
//!                 "plastic_moment": 200.0}
//!     },
//!     "patterns": [{"kind": "mass_proportional", "total": 100.0}]
//! }"#).unwrap();
//! let model = doc.build(None).unwrap();
//! let run = run_pattern(&model.frame, &model.patterns[0], &model.analysis, None).unwrap();
//! // portal sway: four hinges of 200 kN*m over a 3 m storey
//! assert!((run.collapse.lambda0 - 800.0 / 300.0).abs() < 1e-9);
//! ```

pub mod assess;
pub mod capacity;
pub mod document;
pub mod elastic;
pub mod error;
pub mod frame;
mod linalg;
pub mod mechanism;
pub mod pipeline;
pub mod report;
pub mod search;

pub use assess::{
    demand_and_verify, equivalent_sdof, spectral_acceleration, AssessmentResult, EquivalentSdof,
    Regime, ShapeSource, SpectrumParams,
};
pub use capacity::{
    build_bilinear, displacement_shear_drop, hinge_capacities, shear_spans, truncate, BilinearLaw,
    CapacityCurve, Governing, HingeCapacity,
};
pub use document::{load_document, load_model, parse_document, BuiltModel, FrameDocument};
pub use elastic::{solve_elastic, ElasticSolution};
pub use error::{AssessError, CapacityError, ElasticError, FrameError, SearchError};
pub use frame::{
    enumerate_critical_sections, make_pattern, CriticalSection, FrameInput, FrameSpec,
    LateralLoadPattern, PatternKind, SectionLocation, SectionProperties,
};
pub use mechanism::{
    build_pool, ElementaryMechanism, MechanismCombination, MechanismKind, MechanismPool,
    SofteningData,
};
pub use pipeline::{run_pattern, AnalysisSettings, AssessmentSettings, PatternRun, SearchMethod};
pub use report::{write_curve_csv, ReportDocument};
pub use search::{search_exhaustive, search_ga, CollapseResult, GaConfig};
