//! JSON input documents: frame geometry, section libraries, load patterns,
//! analysis settings and the optional assessment block.
//!
//! Parsing is strict: unknown keys are rejected, and every parse error
//! reports the JSON path of the offending field.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::assess::{ShapeSource, SpectrumParams};
use crate::error::FrameError;
use crate::frame::{
    FrameInput, FrameSpec, LateralLoadPattern, PatternKind, SectionProperties, SectionRef,
};
use crate::pipeline::{AnalysisSettings, AssessmentSettings, SearchMethod};
use crate::search::GaConfig;

/// Environment variable holding a `:`-separated list of directories searched
/// for section-library files referenced by bare name.
pub const SECTION_PATH_ENV: &str = "LIMITFRAME_SECTION_PATH";

#[derive(Debug, Error)]
pub enum DocumentError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("invalid document at `{json_path}`: {message}")]
    Parse { json_path: String, message: String },
    #[error("section `{name}` is not defined in the section library")]
    UnknownSection { name: String },
    #[error("exactly one of `sections` and `sections_file` must be given")]
    SectionSource,
    #[error("section library `{name}` not found (searched next to the document and ${SECTION_PATH_ENV})")]
    SectionLibraryNotFound { name: String },
    #[error("section `{name}`: give `plastic_moment`, or `plastic_modulus` with `yield_stress`")]
    UnderspecifiedSection { name: String },
    #[error("pattern {index}: give either `kind` + `total` or explicit `forces`")]
    PatternSource { index: usize },
    #[error("duplicate pattern name `{name}`")]
    DuplicatePattern { name: String },
    #[error("no pattern named `{name}` in the document")]
    NoSuchPattern { name: String },
    #[error("assessment spectrum: give at most one of `spectrum` and `spectrum_file`")]
    SpectrumSource,
    #[error("alpha_s must lie in [0, 1), got {value}")]
    AlphaRange { value: f64 },
    #[error(transparent)]
    Frame(#[from] FrameError),
    #[error("invalid spectrum: {0}")]
    Spectrum(String),
}

/// Top-level input document.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FrameDocument {
    pub frame: FrameBlock,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sections: Option<BTreeMap<String, SectionDoc>>,
    /// Path of a section-library file (a JSON map like `sections`).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sections_file: Option<String>,
    pub patterns: Vec<PatternDoc>,
    #[serde(default)]
    pub analysis: AnalysisDoc,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub assessment: Option<AssessmentDoc>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FrameBlock {
    pub storey_heights: Vec<f64>,
    pub bay_lengths: Vec<f64>,
    /// Section names, `[storey][column]`.
    pub column_sections: Vec<Vec<String>>,
    /// Section names, `[storey][bay]`.
    pub beam_sections: Vec<Vec<String>>,
    /// kN/m, `[storey][bay]`.
    pub vertical_loads: Vec<Vec<f64>>,
    #[serde(default = "default_gravity")]
    pub gravity_accel: f64,
}

fn default_gravity() -> f64 {
    crate::frame::DEFAULT_GRAVITY
}

/// One entry of the section library. The plastic moment may be given
/// directly or derived as `plastic_modulus * yield_stress`; if both routes
/// are present they must agree.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SectionDoc {
    /// m^4
    pub moment_of_inertia: f64,
    /// kPa
    pub elastic_modulus: f64,
    /// kN*m
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub plastic_moment: Option<f64>,
    /// m^3
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub plastic_modulus: Option<f64>,
    /// kPa
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub yield_stress: Option<f64>,
}

impl SectionDoc {
    fn resolve(&self, name: &str) -> Result<SectionProperties, DocumentError> {
        let derived = match (self.plastic_modulus, self.yield_stress) {
            (Some(w), Some(fy)) => Some(w * fy),
            (None, None) => None,
            _ => return Err(DocumentError::UnderspecifiedSection { name: name.into() }),
        };
        let plastic_moment = match (self.plastic_moment, derived) {
            (Some(direct), Some(derived)) => {
                if (direct - derived).abs() > 1e-9 * direct.abs().max(derived.abs()) {
                    return Err(FrameError::InconsistentPlasticMoment {
                        name: name.into(),
                        direct,
                        derived,
                    }
                    .into());
                }
                direct
            }
            (Some(direct), None) => direct,
            (None, Some(derived)) => derived,
            (None, None) => {
                return Err(DocumentError::UnderspecifiedSection { name: name.into() })
            }
        };
        Ok(SectionProperties {
            moment_of_inertia: self.moment_of_inertia,
            plastic_moment,
            elastic_modulus: self.elastic_modulus,
        })
    }
}

/// A named lateral load pattern: a generator (`kind` + `total`) or explicit
/// per-floor forces.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PatternDoc {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kind: Option<PatternKind>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub total: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub forces: Option<Vec<f64>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct AnalysisDoc {
    pub alpha_s: f64,
    pub c_max: u32,
    pub method: SearchMethod,
    pub seed: u64,
    pub exhaustive_budget: f64,
    pub ga: GaDoc,
}

impl Default for AnalysisDoc {
    fn default() -> Self {
        Self {
            alpha_s: crate::capacity::DEFAULT_ALPHA_S,
            c_max: 2,
            method: SearchMethod::Ga,
            seed: 0,
            exhaustive_budget: crate::search::DEFAULT_EXHAUSTIVE_BUDGET,
            ga: GaDoc::default(),
        }
    }
}

/// GA knobs; unset fields fall back to the library defaults.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GaDoc {
    pub population_size: Option<usize>,
    pub generations: Option<usize>,
    pub crossover_rate: Option<f64>,
    pub mutation_rate: Option<f64>,
    pub elite_count: Option<usize>,
    pub tournament_size: Option<usize>,
    pub fitness_offset: Option<f64>,
    pub stall_limit: Option<usize>,
}

impl GaDoc {
    fn to_config(&self, c_max: u32, seed: u64) -> GaConfig {
        let d = GaConfig::default();
        GaConfig {
            population_size: self.population_size.unwrap_or(d.population_size),
            c_max,
            generations: self.generations.unwrap_or(d.generations),
            crossover_rate: self.crossover_rate.unwrap_or(d.crossover_rate),
            mutation_rate: self.mutation_rate.or(d.mutation_rate),
            elite_count: self.elite_count.unwrap_or(d.elite_count),
            tournament_size: self.tournament_size.unwrap_or(d.tournament_size),
            fitness_offset: self.fitness_offset.unwrap_or(d.fitness_offset),
            seed,
            stall_limit: self.stall_limit.unwrap_or(d.stall_limit),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AssessmentDoc {
    /// kN*s^2/m per floor; defaults to the floor gravity load over g.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub floor_masses: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub spectrum: Option<SpectrumParams>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub spectrum_file: Option<String>,
    #[serde(default)]
    pub shape: ShapeSource,
}

/// A document resolved into analysis-ready values.
#[derive(Debug, Clone)]
pub struct BuiltModel {
    pub frame: FrameSpec,
    pub patterns: Vec<LateralLoadPattern>,
    pub analysis: AnalysisSettings,
    pub assessment: Option<AssessmentSettings>,
}

impl BuiltModel {
    pub fn pattern(&self, name: &str) -> Result<&LateralLoadPattern, DocumentError> {
        self.patterns
            .iter()
            .find(|p| p.name == name)
            .ok_or_else(|| DocumentError::NoSuchPattern { name: name.into() })
    }
}

fn read_file(path: &Path) -> Result<String, DocumentError> {
    std::fs::read_to_string(path).map_err(|source| DocumentError::Io {
        path: path.to_owned(),
        source,
    })
}

fn parse_json<T: serde::de::DeserializeOwned>(text: &str) -> Result<T, DocumentError> {
    let de = &mut serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(de).map_err(|e| DocumentError::Parse {
        json_path: e.path().to_string(),
        message: e.inner().to_string(),
    })
}

/// Parses a [`FrameDocument`] from JSON text.
pub fn parse_document(text: &str) -> Result<FrameDocument, DocumentError> {
    parse_json(text)
}

/// Reads and parses a [`FrameDocument`] from a file.
pub fn load_document(path: &Path) -> Result<FrameDocument, DocumentError> {
    parse_document(&read_file(path)?)
}

/// Reads and parses a spectrum-parameters file.
pub fn load_spectrum(path: &Path) -> Result<SpectrumParams, DocumentError> {
    let spectrum: SpectrumParams = parse_json(&read_file(path)?)?;
    spectrum
        .validate()
        .map_err(|e| DocumentError::Spectrum(e.to_string()))?;
    Ok(spectrum)
}

/// Locates a section-library file: absolute paths and paths relative to the
/// document directory are tried first, then each directory in
/// [`SECTION_PATH_ENV`].
fn find_section_library(name: &str, base_dir: Option<&Path>) -> Option<PathBuf> {
    let as_path = Path::new(name);
    if as_path.is_absolute() && as_path.exists() {
        return Some(as_path.to_owned());
    }
    if let Some(dir) = base_dir {
        let candidate = dir.join(name);
        if candidate.exists() {
            return Some(candidate);
        }
    }
    if as_path.exists() {
        return Some(as_path.to_owned());
    }
    let search = std::env::var(SECTION_PATH_ENV).ok()?;
    search
        .split(':')
        .filter(|d| !d.is_empty())
        .map(|d| Path::new(d).join(name))
        .find(|c| c.exists())
}

impl FrameDocument {
    /// Resolves the document into a validated frame, patterns and settings.
    /// `base_dir` anchors relative `sections_file`/`spectrum_file`
    /// references (normally the document's directory).
    pub fn build(&self, base_dir: Option<&Path>) -> Result<BuiltModel, DocumentError> {
        let section_docs: BTreeMap<String, SectionDoc> =
            match (&self.sections, &self.sections_file) {
                (Some(map), None) => map.clone(),
                (None, Some(file)) => {
                    let path = find_section_library(file, base_dir).ok_or_else(|| {
                        DocumentError::SectionLibraryNotFound { name: file.clone() }
                    })?;
                    parse_json(&read_file(&path)?)?
                }
                _ => return Err(DocumentError::SectionSource),
            };

        let mut names = Vec::new();
        let mut props = Vec::new();
        for (name, doc) in &section_docs {
            names.push(name.clone());
            props.push(doc.resolve(name)?);
        }
        let lookup = |name: &String| -> Result<SectionRef, DocumentError> {
            names
                .iter()
                .position(|n| n == name)
                .map(SectionRef)
                .ok_or_else(|| DocumentError::UnknownSection { name: name.clone() })
        };
        let resolve_grid = |grid: &Vec<Vec<String>>| -> Result<Vec<Vec<SectionRef>>, DocumentError> {
            grid.iter()
                .map(|row| row.iter().map(lookup).collect())
                .collect()
        };

        let frame = FrameSpec::new(FrameInput {
            storey_heights: self.frame.storey_heights.clone(),
            bay_lengths: self.frame.bay_lengths.clone(),
            sections: names.iter().cloned().zip(props.iter().copied()).collect(),
            beam_sections: resolve_grid(&self.frame.beam_sections)?,
            column_sections: resolve_grid(&self.frame.column_sections)?,
            vertical_loads: self.frame.vertical_loads.clone(),
            gravity_accel: self.frame.gravity_accel,
        })?;

        let mut patterns = Vec::new();
        for (index, doc) in self.patterns.iter().enumerate() {
            let pattern = match (&doc.kind, doc.total, &doc.forces) {
                (Some(kind), Some(total), None) => {
                    crate::frame::make_pattern(&frame, *kind, total)?
                }
                (None, None, Some(forces)) => {
                    if forces.len() != frame.n_storeys() {
                        return Err(FrameError::PatternLength {
                            got: forces.len(),
                            expected: frame.n_storeys(),
                        }
                        .into());
                    }
                    LateralLoadPattern::new(format!("custom_{}", index + 1), forces.clone())?
                }
                _ => return Err(DocumentError::PatternSource { index: index + 1 }),
            };
            let named = match &doc.name {
                Some(name) => LateralLoadPattern {
                    name: name.clone(),
                    ..pattern
                },
                None => pattern,
            };
            if patterns
                .iter()
                .any(|p: &LateralLoadPattern| p.name == named.name)
            {
                return Err(DocumentError::DuplicatePattern { name: named.name });
            }
            patterns.push(named);
        }

        if !(0.0..1.0).contains(&self.analysis.alpha_s) {
            return Err(DocumentError::AlphaRange {
                value: self.analysis.alpha_s,
            });
        }
        let analysis = AnalysisSettings {
            alpha_s: self.analysis.alpha_s,
            c_max: self.analysis.c_max,
            method: self.analysis.method,
            exhaustive_budget: self.analysis.exhaustive_budget,
            ga: self
                .analysis
                .ga
                .to_config(self.analysis.c_max, self.analysis.seed),
        };

        let assessment = match &self.assessment {
            None => None,
            Some(doc) => {
                let spectrum = match (&doc.spectrum, &doc.spectrum_file) {
                    (Some(s), None) => {
                        s.validate()
                            .map_err(|e| DocumentError::Spectrum(e.to_string()))?;
                        Some(s.clone())
                    }
                    (None, Some(file)) => {
                        let path = match base_dir {
                            Some(dir) if !Path::new(file).is_absolute() => dir.join(file),
                            _ => PathBuf::from(file),
                        };
                        Some(load_spectrum(&path)?)
                    }
                    (None, None) => None,
                    (Some(_), Some(_)) => return Err(DocumentError::SpectrumSource),
                };
                Some(AssessmentSettings {
                    floor_masses: doc
                        .floor_masses
                        .clone()
                        .unwrap_or_else(|| frame.default_floor_masses()),
                    spectrum,
                    shape: doc.shape,
                })
            }
        };

        Ok(BuiltModel {
            frame,
            patterns,
            analysis,
            assessment,
        })
    }
}

/// Loads a document and resolves it against its own directory.
pub fn load_model(path: &Path) -> Result<BuiltModel, DocumentError> {
    let doc = load_document(path)?;
    doc.build(path.parent())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn minimal_doc() -> String {
        r#"{
            "frame": {
                "storey_heights": [3.0],
                "bay_lengths": [5.0],
                "column_sections": [["S", "S"]],
                "beam_sections": [["S"]],
                "vertical_loads": [[10.0]]
            },
            "sections": {
                "S": {"moment_of_inertia": 1e-4, "elastic_modulus": 2.1e8, "plastic_moment": 200.0}
            },
            "patterns": [{"kind": "mass_proportional", "total": 100.0}]
        }"#
        .to_owned()
    }

    #[test]
    fn parses_and_builds_minimal_document() {
        let doc = parse_document(&minimal_doc()).unwrap();
        let model = doc.build(None).unwrap();
        assert_eq!(model.frame.n_storeys(), 1);
        assert_eq!(model.patterns.len(), 1);
        assert_eq!(model.patterns[0].name, "mass_proportional");
        assert_eq!(model.analysis.method, SearchMethod::Ga);
        assert!(model.assessment.is_none());
    }

    #[test]
    fn unknown_key_is_rejected_with_its_path() {
        let text = minimal_doc().replace("\"storey_heights\"", "\"store_heights\"");
        let err = parse_document(&text).unwrap_err();
        match err {
            DocumentError::Parse { json_path, message } => {
                assert!(json_path.starts_with("frame"), "{json_path}");
                assert!(message.contains("store_heights"), "{message}");
            }
            other => panic!("unexpected error: {other}"),
        }
    }

    #[test]
    fn type_errors_carry_the_json_path() {
        let text = minimal_doc().replace("[3.0]", "[\"three\"]");
        let err = parse_document(&text).unwrap_err();
        match err {
            DocumentError::Parse { json_path, .. } => {
                assert_eq!(json_path, "frame.storey_heights[0]");
            }
            other => panic!("unexpected error: {other}"),
        }
    }

    #[test]
    fn missing_section_reference_is_named() {
        let text = minimal_doc().replace("[[\"S\"]]", "[[\"HE999\"]]");
        let doc = parse_document(&text).unwrap();
        match doc.build(None).unwrap_err() {
            DocumentError::UnknownSection { name } => assert_eq!(name, "HE999"),
            other => panic!("unexpected error: {other}"),
        }
    }

    #[test]
    fn plastic_moment_consistency_is_enforced() {
        let text = minimal_doc().replace(
            "\"plastic_moment\": 200.0",
            "\"plastic_moment\": 200.0, \"plastic_modulus\": 1e-3, \"yield_stress\": 235000.0",
        );
        let doc = parse_document(&text).unwrap();
        assert!(matches!(
            doc.build(None),
            Err(DocumentError::Frame(
                FrameError::InconsistentPlasticMoment { .. }
            ))
        ));
        // consistent pair passes: W_pl * f_y = 200 exactly
        let text = minimal_doc().replace(
            "\"plastic_moment\": 200.0",
            "\"plastic_moment\": 200.0, \"plastic_modulus\": 1e-3, \"yield_stress\": 200000.0",
        );
        let doc = parse_document(&text).unwrap();
        assert!(doc.build(None).is_ok());
    }

    #[test]
    fn duplicate_pattern_names_are_rejected() {
        let text = minimal_doc().replace(
            r#"[{"kind": "mass_proportional", "total": 100.0}]"#,
            r#"[{"kind": "mass_proportional", "total": 100.0},
                {"name": "mass_proportional", "forces": [50.0]}]"#,
        );
        let doc = parse_document(&text).unwrap();
        assert!(matches!(
            doc.build(None),
            Err(DocumentError::DuplicatePattern { .. })
        ));
    }

    #[test]
    fn pattern_must_have_exactly_one_source() {
        let text = minimal_doc().replace(
            r#"{"kind": "mass_proportional", "total": 100.0}"#,
            r#"{"kind": "mass_proportional", "total": 100.0, "forces": [1.0]}"#,
        );
        let doc = parse_document(&text).unwrap();
        assert!(matches!(
            doc.build(None),
            Err(DocumentError::PatternSource { index: 1 })
        ));
    }

    #[test]
    fn section_library_file_and_env_search_path() {
        let dir = std::env::temp_dir().join(format!("limitframe-doc-test-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        std::fs::write(
            dir.join("lib.json"),
            r#"{"S": {"moment_of_inertia": 1e-4, "elastic_modulus": 2.1e8, "plastic_moment": 200.0}}"#,
        )
        .unwrap();
        let text = minimal_doc().replace(
            r#""sections": {
                "S": {"moment_of_inertia": 1e-4, "elastic_modulus": 2.1e8, "plastic_moment": 200.0}
            }"#,
            r#""sections_file": "lib.json""#,
        );
        let doc = parse_document(&text).unwrap();
        // resolves relative to the document directory
        assert!(doc.build(Some(&dir)).is_ok());
        // and via the search-path environment variable
        std::env::set_var(SECTION_PATH_ENV, dir.display().to_string());
        assert!(doc.build(None).is_ok());
        std::env::remove_var(SECTION_PATH_ENV);
        std::fs::remove_dir_all(&dir).ok();
    }

    #[test]
    fn alpha_s_range_is_checked() {
        let text = minimal_doc().replace(
            r#""patterns""#,
            r#""analysis": {"alpha_s": 1.5}, "patterns""#,
        );
        let doc = parse_document(&text).unwrap();
        assert!(matches!(
            doc.build(None),
            Err(DocumentError::AlphaRange { value }) if value == 1.5
        ));
    }

    #[test]
    fn spectrum_validation_happens_at_build_time() {
        let text = minimal_doc().replace(
            r#""patterns""#,
            r#""assessment": {"spectrum": {"ag_g": 0.283, "S": 1.0, "eta": 1.0, "F0": 2.4,
                                           "TB": 0.5, "TC": 0.2, "TD": 2.0}}, "patterns""#,
        );
        let doc = parse_document(&text).unwrap();
        assert!(matches!(doc.build(None), Err(DocumentError::Spectrum(_))));
    }
}
