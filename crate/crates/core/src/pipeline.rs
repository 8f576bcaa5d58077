//! End-to-end orchestration: collapse search, capacity curve, equivalent
//! SDOF and verification for one frame + pattern.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::assess::{
    demand_and_verify, equivalent_sdof, AssessmentResult, EquivalentSdof, ShapeSource,
    SpectrumParams,
};
use crate::capacity::{
    build_bilinear, displacement_shear_drop, hinge_capacities, truncate, BilinearLaw,
    CapacityCurve, HingeCapacity,
};
use crate::elastic::{solve_elastic, ElasticSolution};
use crate::error::{AssessError, CapacityError, ElasticError, SearchError};
use crate::frame::{FrameSpec, LateralLoadPattern};
use crate::mechanism::build_pool;
use crate::search::{search_exhaustive, search_ga, CollapseResult, GaConfig};

/// How the collapse combination is searched.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SearchMethod {
    Ga,
    Exhaustive,
}

/// Resolved analysis settings.
#[derive(Debug, Clone, PartialEq)]
pub struct AnalysisSettings {
    pub alpha_s: f64,
    pub c_max: u32,
    pub method: SearchMethod,
    pub exhaustive_budget: f64,
    pub ga: GaConfig,
}

impl Default for AnalysisSettings {
    fn default() -> Self {
        Self {
            alpha_s: crate::capacity::DEFAULT_ALPHA_S,
            c_max: 2,
            method: SearchMethod::Exhaustive,
            exhaustive_budget: crate::search::DEFAULT_EXHAUSTIVE_BUDGET,
            ga: GaConfig::default(),
        }
    }
}

/// Resolved assessment settings; `spectrum == None` computes the SDOF but
/// skips the demand check.
#[derive(Debug, Clone, PartialEq)]
pub struct AssessmentSettings {
    pub floor_masses: Vec<f64>,
    pub spectrum: Option<SpectrumParams>,
    pub shape: ShapeSource,
}

/// A numerical failure anywhere along the pipeline (as opposed to input
/// validation, which fails earlier).
#[derive(Debug, Error)]
pub enum PipelineError {
    #[error(transparent)]
    Elastic(#[from] ElasticError),
    #[error(transparent)]
    Search(#[from] SearchError),
    #[error(transparent)]
    Capacity(#[from] CapacityError),
    #[error(transparent)]
    Assess(#[from] AssessError),
}

/// Every product of the pipeline for one pattern.
#[derive(Debug, Clone)]
pub struct PatternRun {
    pub pattern: LateralLoadPattern,
    pub elastic: ElasticSolution,
    pub collapse: CollapseResult,
    pub law: BilinearLaw,
    pub hinges: Vec<HingeCapacity>,
    pub curve: CapacityCurve,
    pub sdof: Option<EquivalentSdof>,
    pub verification: Option<AssessmentResult>,
}

/// Runs the whole pipeline for one lateral pattern.
pub fn run_pattern(
    frame: &FrameSpec,
    pattern: &LateralLoadPattern,
    analysis: &AnalysisSettings,
    assessment: Option<&AssessmentSettings>,
) -> Result<PatternRun, PipelineError> {
    let elastic = solve_elastic(frame, pattern)?;
    let pool = build_pool(frame, pattern);
    let collapse = match analysis.method {
        SearchMethod::Exhaustive => {
            search_exhaustive(&pool, analysis.c_max, analysis.exhaustive_budget)?
        }
        SearchMethod::Ga => search_ga(&pool, &analysis.ga)?,
    };
    let law = build_bilinear(&elastic, &collapse, pattern);
    let u_s = displacement_shear_drop(&law, analysis.alpha_s);
    let hinges = hinge_capacities(frame, &collapse, &law);
    let curve = truncate(&law, u_s, &hinges)?;

    let (sdof, verification) = match assessment {
        None => (None, None),
        Some(settings) => {
            let sdof = equivalent_sdof(&curve, &elastic, &settings.floor_masses, settings.shape)?;
            let verification = settings
                .spectrum
                .as_ref()
                .map(|s| demand_and_verify(&sdof, s));
            (Some(sdof), verification)
        }
    };

    Ok(PatternRun {
        pattern: pattern.clone(),
        elastic,
        collapse,
        law,
        hinges,
        curve,
        sdof,
        verification,
    })
}
