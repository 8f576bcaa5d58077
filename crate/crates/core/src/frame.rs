//! Domain model of a regular planar frame: geometry, sections, loads and the
//! enumeration of critical sections where plastic hinges may form.
//!
//! Conventions used throughout the crate:
//! * units are kN, m, s, rad; Young's modulus in kPa;
//! * storeys, columns and bays are numbered from 1 (storey 1 sits on the
//!   clamped bases);
//! * vertical member loads `q` are positive downward, lateral floor forces
//!   positive rightward. A single lateral direction is analysed per run;
//!   mirror the frame to analyse the other one.

use serde::{Deserialize, Serialize};

use crate::error::FrameError;

/// Flexural and plastic properties of a member cross section.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SectionProperties {
    /// Moment of inertia I, m^4.
    pub moment_of_inertia: f64,
    /// Plastic moment M_p, kN*m.
    pub plastic_moment: f64,
    /// Young's modulus E, kPa.
    pub elastic_modulus: f64,
}

impl SectionProperties {
    /// Derives the plastic moment from a plastic section modulus (m^3) and a
    /// yield stress (kPa).
    pub fn from_plastic_modulus(
        moment_of_inertia: f64,
        elastic_modulus: f64,
        plastic_modulus: f64,
        yield_stress: f64,
    ) -> Self {
        Self {
            moment_of_inertia,
            plastic_moment: plastic_modulus * yield_stress,
            elastic_modulus,
        }
    }

    /// Flexural rigidity EI, kN*m^2.
    pub fn flexural_rigidity(&self) -> f64 {
        self.elastic_modulus * self.moment_of_inertia
    }

    fn validate(&self, name: &str) -> Result<(), FrameError> {
        let checks = [
            ("moment_of_inertia", self.moment_of_inertia),
            ("plastic_moment", self.plastic_moment),
            ("elastic_modulus", self.elastic_modulus),
        ];
        for (field, value) in checks {
            if !(value > 0.0) || !value.is_finite() {
                return Err(FrameError::NonPositiveSectionProperty {
                    name: name.to_owned(),
                    field,
                    value,
                });
            }
        }
        Ok(())
    }
}

/// Handle to a section stored in the frame's section table.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SectionRef(pub(crate) usize);

/// End of a column member.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ColumnEnd {
    Bottom,
    Top,
}

/// End of a beam member.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BeamEnd {
    Left,
    Right,
}

/// Where a critical section sits in the frame.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SectionLocation {
    ColumnEnd {
        storey: usize,
        column: usize,
        end: ColumnEnd,
    },
    BeamEnd {
        storey: usize,
        bay: usize,
        end: BeamEnd,
    },
    /// Along-span sagging section at `x` metres from the beam's left end.
    BeamSpan { storey: usize, bay: usize, x: f64 },
}

impl std::fmt::Display for SectionLocation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            SectionLocation::ColumnEnd {
                storey,
                column,
                end,
            } => {
                let end = match end {
                    ColumnEnd::Bottom => "base",
                    ColumnEnd::Top => "top",
                };
                write!(f, "column {column}, storey {storey} ({end})")
            }
            SectionLocation::BeamEnd { storey, bay, end } => {
                let end = match end {
                    BeamEnd::Left => "left",
                    BeamEnd::Right => "right",
                };
                write!(f, "beam {bay}, storey {storey} ({end})")
            }
            SectionLocation::BeamSpan { storey, bay, x } => {
                write!(f, "beam {bay}, storey {storey} (span, x={x:.4} m)")
            }
        }
    }
}

/// A section where a plastic hinge may form.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CriticalSection {
    pub location: SectionLocation,
    /// Plastic moment of the member the section belongs to, kN*m.
    pub plastic_moment: f64,
    pub section_ref: SectionRef,
}

/// Concentrated horizontal floor forces, kN, positive rightward.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LateralLoadPattern {
    pub forces: Vec<f64>,
    pub name: String,
}

impl LateralLoadPattern {
    pub fn new(name: impl Into<String>, forces: Vec<f64>) -> Result<Self, FrameError> {
        if !forces.iter().any(|&f| f > 0.0) {
            return Err(FrameError::NoLateralForce);
        }
        Ok(Self {
            forces,
            name: name.into(),
        })
    }

    /// Overall base shear at unit multiplier, kN.
    pub fn total(&self) -> f64 {
        self.forces.iter().sum()
    }
}

/// Generator kinds for [`make_pattern`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PatternKind {
    /// Equal force at every floor.
    MassProportional,
    /// Forces proportional to the absolute floor heights.
    InverseTriangular,
}

/// A regular planar frame with clamped column bases.
///
/// Immutable after construction; all analysis products borrow it freely.
#[derive(Debug, Clone, PartialEq)]
pub struct FrameSpec {
    storey_heights: Vec<f64>,
    bay_lengths: Vec<f64>,
    section_names: Vec<String>,
    sections: Vec<SectionProperties>,
    /// `[storey][bay]`
    beam_sections: Vec<Vec<SectionRef>>,
    /// `[storey][column]`
    column_sections: Vec<Vec<SectionRef>>,
    /// `[storey][bay]`, kN/m downward
    vertical_loads: Vec<Vec<f64>>,
    gravity_accel: f64,
}

/// Raw inputs for [`FrameSpec::new`].
#[derive(Debug, Clone)]
pub struct FrameInput {
    pub storey_heights: Vec<f64>,
    pub bay_lengths: Vec<f64>,
    /// Named section table; grids below index into it.
    pub sections: Vec<(String, SectionProperties)>,
    pub beam_sections: Vec<Vec<SectionRef>>,
    pub column_sections: Vec<Vec<SectionRef>>,
    pub vertical_loads: Vec<Vec<f64>>,
    pub gravity_accel: f64,
}

pub const DEFAULT_GRAVITY: f64 = 9.81;

impl FrameSpec {
    pub fn new(input: FrameInput) -> Result<Self, FrameError> {
        let n_f = input.storey_heights.len();
        let n_b = input.bay_lengths.len();
        let n_c = n_b + 1;
        if n_f == 0 {
            return Err(FrameError::NoStoreys);
        }
        if n_b == 0 {
            return Err(FrameError::TooFewColumns);
        }
        for (i, &h) in input.storey_heights.iter().enumerate() {
            if !(h > 0.0) || !h.is_finite() {
                return Err(FrameError::NonPositiveHeight {
                    storey: i + 1,
                    value: h,
                });
            }
        }
        for (j, &l) in input.bay_lengths.iter().enumerate() {
            if !(l > 0.0) || !l.is_finite() {
                return Err(FrameError::NonPositiveBayLength {
                    bay: j + 1,
                    value: l,
                });
            }
        }
        let grid_shape = |grid: &Vec<Vec<SectionRef>>, cols: usize| {
            grid.len() == n_f && grid.iter().all(|row| row.len() == cols)
        };
        if !grid_shape(&input.beam_sections, n_b) {
            return Err(FrameError::GridShape {
                grid: "beam_sections",
                expected_rows: n_f,
                expected_cols: n_b,
            });
        }
        if !grid_shape(&input.column_sections, n_c) {
            return Err(FrameError::GridShape {
                grid: "column_sections",
                expected_rows: n_f,
                expected_cols: n_c,
            });
        }
        if input.vertical_loads.len() != n_f
            || input.vertical_loads.iter().any(|row| row.len() != n_b)
        {
            return Err(FrameError::GridShape {
                grid: "vertical_loads",
                expected_rows: n_f,
                expected_cols: n_b,
            });
        }
        for (i, row) in input.vertical_loads.iter().enumerate() {
            for (j, &q) in row.iter().enumerate() {
                if q < 0.0 || !q.is_finite() {
                    return Err(FrameError::NegativeVerticalLoad {
                        storey: i + 1,
                        bay: j + 1,
                        value: q,
                    });
                }
            }
        }
        if !(input.gravity_accel > 0.0) {
            return Err(FrameError::NonPositiveGravity {
                value: input.gravity_accel,
            });
        }
        let (section_names, sections): (Vec<_>, Vec<_>) = input.sections.into_iter().unzip();
        for (name, props) in section_names.iter().zip(&sections) {
            props.validate(name)?;
        }
        let in_range = |grid: &Vec<Vec<SectionRef>>| {
            grid.iter()
                .flatten()
                .all(|SectionRef(k)| *k < sections.len())
        };
        if !in_range(&input.beam_sections) || !in_range(&input.column_sections) {
            return Err(FrameError::UnknownSection);
        }
        Ok(Self {
            storey_heights: input.storey_heights,
            bay_lengths: input.bay_lengths,
            section_names,
            sections,
            beam_sections: input.beam_sections,
            column_sections: input.column_sections,
            vertical_loads: input.vertical_loads,
            gravity_accel: input.gravity_accel,
        })
    }

    pub fn n_storeys(&self) -> usize {
        self.storey_heights.len()
    }

    pub fn n_columns(&self) -> usize {
        self.bay_lengths.len() + 1
    }

    pub fn n_bays(&self) -> usize {
        self.bay_lengths.len()
    }

    /// Interstorey height H_i, 1-based.
    pub fn storey_height(&self, storey: usize) -> f64 {
        self.storey_heights[storey - 1]
    }

    /// Bay length L_j, 1-based.
    pub fn bay_length(&self, bay: usize) -> f64 {
        self.bay_lengths[bay - 1]
    }

    /// Absolute height of floor `storey` above the bases.
    pub fn floor_height(&self, storey: usize) -> f64 {
        self.storey_heights[..storey].iter().sum()
    }

    /// Distributed vertical load q_ij on beam (storey, bay), kN/m.
    pub fn vertical_load(&self, storey: usize, bay: usize) -> f64 {
        self.vertical_loads[storey - 1][bay - 1]
    }

    pub fn gravity_accel(&self) -> f64 {
        self.gravity_accel
    }

    pub fn section(&self, r: SectionRef) -> &SectionProperties {
        &self.sections[r.0]
    }

    pub fn section_name(&self, r: SectionRef) -> &str {
        &self.section_names[r.0]
    }

    pub fn beam_section(&self, storey: usize, bay: usize) -> SectionRef {
        self.beam_sections[storey - 1][bay - 1]
    }

    pub fn column_section(&self, storey: usize, column: usize) -> SectionRef {
        self.column_sections[storey - 1][column - 1]
    }

    pub fn beam_props(&self, storey: usize, bay: usize) -> &SectionProperties {
        self.section(self.beam_section(storey, bay))
    }

    pub fn column_props(&self, storey: usize, column: usize) -> &SectionProperties {
        self.section(self.column_section(storey, column))
    }

    /// Total vertical load carried by floor `storey`: sum of q_ij * L_j, kN.
    pub fn floor_gravity_load(&self, storey: usize) -> f64 {
        (1..=self.n_bays())
            .map(|j| self.vertical_load(storey, j) * self.bay_length(j))
            .sum()
    }

    /// Default floor masses for the equivalent-SDOF conversion: the floor
    /// gravity load divided by g, kN*s^2/m.
    pub fn default_floor_masses(&self) -> Vec<f64> {
        (1..=self.n_storeys())
            .map(|i| self.floor_gravity_load(i) / self.gravity_accel)
            .collect()
    }

    /// Number of members converging at joint (storey, column): adjacent
    /// beams, the column below (always present) and the column above.
    pub fn joint_degree(&self, storey: usize, column: usize) -> usize {
        let mut degree = 1; // column below
        if storey < self.n_storeys() {
            degree += 1; // column above
        }
        if column > 1 {
            degree += 1; // beam on the left
        }
        if column <= self.n_bays() {
            degree += 1; // beam on the right
        }
        degree
    }

    /// Abscissa of the along-span sagging hinge of beam (storey, bay),
    /// measured from the left end, if the vertical load is high enough for
    /// the hinge to be statically admissible (q >= 4 M_b / L^2).
    pub fn interior_hinge_x(&self, storey: usize, bay: usize) -> Option<f64> {
        let q = self.vertical_load(storey, bay);
        if q <= 0.0 {
            return None;
        }
        let l = self.bay_length(bay);
        let m_b = self.beam_props(storey, bay).plastic_moment;
        let x = l - 2.0 * (m_b / q).sqrt();
        (x > 0.0).then_some(x)
    }
}

/// Builds one of the two standard lateral force distributions, scaled so the
/// forces sum to `total`.
pub fn make_pattern(
    frame: &FrameSpec,
    kind: PatternKind,
    total: f64,
) -> Result<LateralLoadPattern, FrameError> {
    if !(total > 0.0) {
        return Err(FrameError::NonPositiveTotal { value: total });
    }
    let n_f = frame.n_storeys();
    let (name, forces) = match kind {
        PatternKind::MassProportional => {
            ("mass_proportional", vec![total / n_f as f64; n_f])
        }
        PatternKind::InverseTriangular => {
            let heights: Vec<f64> = (1..=n_f).map(|i| frame.floor_height(i)).collect();
            let sum: f64 = heights.iter().sum();
            (
                "inverse_triangular",
                heights.iter().map(|h| total * h / sum).collect(),
            )
        }
    };
    LateralLoadPattern::new(name, forces)
}

/// Enumerates all critical sections in a deterministic order: storey-major,
/// columns before beams, then column/bay index, then bottom/top or
/// left/span/right.
pub fn enumerate_critical_sections(frame: &FrameSpec) -> Vec<CriticalSection> {
    let mut sections = Vec::new();
    for i in 1..=frame.n_storeys() {
        for j in 1..=frame.n_columns() {
            let r = frame.column_section(i, j);
            let m_p = frame.section(r).plastic_moment;
            for end in [ColumnEnd::Bottom, ColumnEnd::Top] {
                sections.push(CriticalSection {
                    location: SectionLocation::ColumnEnd {
                        storey: i,
                        column: j,
                        end,
                    },
                    plastic_moment: m_p,
                    section_ref: r,
                });
            }
        }
        for j in 1..=frame.n_bays() {
            let r = frame.beam_section(i, j);
            let m_p = frame.section(r).plastic_moment;
            sections.push(CriticalSection {
                location: SectionLocation::BeamEnd {
                    storey: i,
                    bay: j,
                    end: BeamEnd::Left,
                },
                plastic_moment: m_p,
                section_ref: r,
            });
            if let Some(x) = frame.interior_hinge_x(i, j) {
                sections.push(CriticalSection {
                    location: SectionLocation::BeamSpan {
                        storey: i,
                        bay: j,
                        x,
                    },
                    plastic_moment: m_p,
                    section_ref: r,
                });
            }
            sections.push(CriticalSection {
                location: SectionLocation::BeamEnd {
                    storey: i,
                    bay: j,
                    end: BeamEnd::Right,
                },
                plastic_moment: m_p,
                section_ref: r,
            });
        }
    }
    sections
}
