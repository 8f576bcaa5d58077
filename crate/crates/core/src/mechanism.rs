//! Elementary collapse mechanisms (floor sway, beam, joint rotation), their
//! integer combinations, the collapse load multiplier and the second-order
//! softening coefficient.
//!
//! Sign bookkeeping: per-section rotation coefficients are expressed per unit
//! reference rotation of the mechanism, in a single global convention chosen
//! so that combinations cancel where the kinematics say they must. A floor
//! mechanism opens both end sections of its storey columns with coefficient
//! +1; a node mechanism in the `Plus` sense contributes -1 to every member
//! end converging at the joint (so one `Plus` gene on a swaying joint closes
//! the column hinges above and below it at once and opens the beam ends
//! instead); `Minus` is the reverse. A beam mechanism carries +1 at the left
//! end, -L/(L-x) at the along-span hinge and -x/(L-x) at the right end, so
//! that beam + `Plus` nodes at both ends reproduces the two-hinge beam
//! pattern with no rotation at the left end.

use crate::error::SearchError;
use crate::frame::{
    enumerate_critical_sections, BeamEnd, ColumnEnd, CriticalSection, FrameSpec,
    LateralLoadPattern, SectionLocation,
};

/// Rotation coefficients smaller than this are treated as zero when deciding
/// whether a section hinges (coefficients are built from ratios like
/// x/(L-x), so exact zeros are not guaranteed in floating point).
pub const ROTATION_CUTOFF: f64 = 1e-9;

/// Direction of a joint-rotation mechanism.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NodeSense {
    /// Joint follows the sway: contributes -1 to every converging section.
    Plus,
    /// Opposite rotation: contributes +1.
    Minus,
}

/// Identity of an elementary mechanism.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MechanismKind {
    /// Storey sway: hinges at both ends of every storey column.
    Floor { storey: usize },
    /// Beam with an along-span sagging hinge.
    Beam { storey: usize, bay: usize },
    /// Rotation of one joint.
    Node {
        storey: usize,
        column: usize,
        sense: NodeSense,
    },
}

impl std::fmt::Display for MechanismKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            MechanismKind::Floor { storey } => write!(f, "floor({storey})"),
            MechanismKind::Beam { storey, bay } => write!(f, "beam({storey},{bay})"),
            MechanismKind::Node {
                storey,
                column,
                sense,
            } => {
                let s = match sense {
                    NodeSense::Plus => "+",
                    NodeSense::Minus => "-",
                };
                write!(f, "node({storey},{column},{s})")
            }
        }
    }
}

/// One elementary mechanism: sparse rotation coefficients over the critical
/// sections plus its external work rates per unit reference rotation.
#[derive(Debug, Clone, PartialEq)]
pub struct ElementaryMechanism {
    pub kind: MechanismKind,
    /// (critical-section index, signed rotation coefficient).
    pub rotations: Vec<(usize, f64)>,
    /// Work of the horizontal forces at multiplier 1, kN*m per unit rotation.
    pub w_ext_h: f64,
    /// First-order work of the vertical loads, kN*m per unit rotation.
    pub w_ext_v: f64,
}

/// The mechanism pool for one frame + lateral pattern, together with the
/// critical-section table the coefficients index into.
///
/// Immutable after construction; evaluations are pure, so arbitrarily many
/// may run concurrently.
#[derive(Debug, Clone)]
pub struct MechanismPool {
    sections: Vec<CriticalSection>,
    section_moments: Vec<f64>,
    mechanisms: Vec<ElementaryMechanism>,
    /// Index into `mechanisms` of the floor mechanism of each storey.
    floor_mechanisms: Vec<usize>,
    storey_heights: Vec<f64>,
    /// sum_j q_ij * L_j per storey.
    storey_loads: Vec<f64>,
    forces: Vec<f64>,
}

/// A gene vector together with everything derived from it.
#[derive(Debug, Clone, PartialEq)]
pub struct MechanismCombination {
    pub genes: Vec<u32>,
    /// Net signed rotation coefficient per critical section.
    pub rho: Vec<f64>,
    /// Internal work sum_s M_p,s |rho_s|, kN*m per unit rotation.
    pub w_int: f64,
    pub w_ext_h: f64,
    pub w_ext_v: f64,
    /// Collapse load multiplier (W_int - W_extV) / W_extH.
    pub lambda0: f64,
    /// Net floor-mechanism gene per storey.
    pub storey_sway: Vec<u32>,
}

impl MechanismCombination {
    /// Sections that actually hinge, with their net rotation coefficients.
    pub fn hinges<'p>(&self, pool: &'p MechanismPool) -> Vec<(&'p CriticalSection, f64)> {
        self.rho
            .iter()
            .enumerate()
            .filter(|(_, r)| r.abs() > ROTATION_CUTOFF)
            .map(|(s, &r)| (&pool.sections[s], r))
            .collect()
    }
}

/// Mechanism heights and the second-order softening coefficient.
#[derive(Debug, Clone, PartialEq)]
pub struct SofteningData {
    /// h_i: lateral displacement of floor i per unit reference rotation, m.
    pub heights: Vec<f64>,
    /// Top value of `heights`, m.
    pub h_max: f64,
    /// Softening coefficient, 1/m: the multiplier decays as
    /// lambda(delta) = lambda0 - gamma * delta.
    pub gamma: f64,
    /// delta = delta_to_phi * phi: conversion from reference rotation to top
    /// displacement (equals h_max).
    pub delta_to_phi: f64,
}

/// Builds the elementary-mechanism pool: one floor mechanism per storey, one
/// beam mechanism per beam with an along-span hinge, and two joint-rotation
/// mechanisms (both senses) per joint where at least three members converge.
pub fn build_pool(frame: &FrameSpec, pattern: &LateralLoadPattern) -> MechanismPool {
    assert_eq!(
        pattern.forces.len(),
        frame.n_storeys(),
        "one lateral force per floor"
    );
    let sections = enumerate_critical_sections(frame);
    let find = |loc: &dyn Fn(&SectionLocation) -> bool| -> usize {
        sections
            .iter()
            .position(|s| loc(&s.location))
            .expect("section present by construction")
    };
    let column_end = |storey: usize, column: usize, end: ColumnEnd| {
        find(&|l| {
            matches!(l, SectionLocation::ColumnEnd { storey: s, column: c, end: e }
                if *s == storey && *c == column && *e == end)
        })
    };
    let beam_end = |storey: usize, bay: usize, end: BeamEnd| {
        find(&|l| {
            matches!(l, SectionLocation::BeamEnd { storey: s, bay: b, end: e }
                if *s == storey && *b == bay && *e == end)
        })
    };
    let beam_span = |storey: usize, bay: usize| {
        find(&|l| {
            matches!(l, SectionLocation::BeamSpan { storey: s, bay: b, .. }
                if *s == storey && *b == bay)
        })
    };

    let n_f = frame.n_storeys();
    let mut mechanisms = Vec::new();
    let mut floor_mechanisms = Vec::new();

    for i in 1..=n_f {
        let tail_force: f64 = pattern.forces[i - 1..].iter().sum();
        let rotations = (1..=frame.n_columns())
            .flat_map(|j| {
                [
                    (column_end(i, j, ColumnEnd::Bottom), 1.0),
                    (column_end(i, j, ColumnEnd::Top), 1.0),
                ]
            })
            .collect();
        floor_mechanisms.push(mechanisms.len());
        mechanisms.push(ElementaryMechanism {
            kind: MechanismKind::Floor { storey: i },
            rotations,
            w_ext_h: frame.storey_height(i) * tail_force,
            w_ext_v: 0.0,
        });
    }

    for i in 1..=n_f {
        for j in 1..=frame.n_bays() {
            let Some(x) = frame.interior_hinge_x(i, j) else {
                continue;
            };
            let l = frame.bay_length(j);
            let q = frame.vertical_load(i, j);
            mechanisms.push(ElementaryMechanism {
                kind: MechanismKind::Beam { storey: i, bay: j },
                rotations: vec![
                    (beam_end(i, j, BeamEnd::Left), 1.0),
                    (beam_span(i, j), -l / (l - x)),
                    (beam_end(i, j, BeamEnd::Right), -x / (l - x)),
                ],
                w_ext_h: 0.0,
                w_ext_v: q * l * x / 2.0,
            });
        }
    }

    for i in 1..=n_f {
        for j in 1..=frame.n_columns() {
            if frame.joint_degree(i, j) < 3 {
                continue;
            }
            let mut converging = vec![column_end(i, j, ColumnEnd::Top)];
            if i < n_f {
                converging.push(column_end(i + 1, j, ColumnEnd::Bottom));
            }
            if j > 1 {
                converging.push(beam_end(i, j - 1, BeamEnd::Right));
            }
            if j <= frame.n_bays() {
                converging.push(beam_end(i, j, BeamEnd::Left));
            }
            for sense in [NodeSense::Plus, NodeSense::Minus] {
                let c = match sense {
                    NodeSense::Plus => -1.0,
                    NodeSense::Minus => 1.0,
                };
                mechanisms.push(ElementaryMechanism {
                    kind: MechanismKind::Node {
                        storey: i,
                        column: j,
                        sense,
                    },
                    rotations: converging.iter().map(|&s| (s, c)).collect(),
                    w_ext_h: 0.0,
                    w_ext_v: 0.0,
                });
            }
        }
    }

    let section_moments = sections.iter().map(|s| s.plastic_moment).collect();
    MechanismPool {
        sections,
        section_moments,
        mechanisms,
        floor_mechanisms,
        storey_heights: (1..=n_f).map(|i| frame.storey_height(i)).collect(),
        storey_loads: (1..=n_f).map(|i| frame.floor_gravity_load(i)).collect(),
        forces: pattern.forces.clone(),
    }
}

impl MechanismPool {
    pub fn mechanisms(&self) -> &[ElementaryMechanism] {
        &self.mechanisms
    }

    /// The critical-section table (same order as
    /// [`enumerate_critical_sections`]).
    pub fn sections(&self) -> &[CriticalSection] {
        &self.sections
    }

    pub fn len(&self) -> usize {
        self.mechanisms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.mechanisms.is_empty()
    }

    pub(crate) fn section_moments(&self) -> &[f64] {
        &self.section_moments
    }

    pub fn n_storeys(&self) -> usize {
        self.storey_heights.len()
    }

    /// Net floor-mechanism gene per storey.
    pub fn storey_sway(&self, genes: &[u32]) -> Vec<u32> {
        self.floor_mechanisms.iter().map(|&k| genes[k]).collect()
    }

    /// Evaluates a gene vector: net rotations, works and the collapse load
    /// multiplier. Fails with [`SearchError::NoMechanism`] when the
    /// combination does no horizontal work (for example all-zero genes or a
    /// node/beam-only combination).
    pub fn evaluate(&self, genes: &[u32]) -> Result<MechanismCombination, SearchError> {
        assert_eq!(genes.len(), self.mechanisms.len(), "one gene per mechanism");
        let mut rho = vec![0.0; self.sections.len()];
        let mut w_ext_h = 0.0;
        let mut w_ext_v = 0.0;
        for (&g, mech) in genes.iter().zip(&self.mechanisms) {
            if g == 0 {
                continue;
            }
            let g = f64::from(g);
            for &(s, r) in &mech.rotations {
                rho[s] += g * r;
            }
            w_ext_h += g * mech.w_ext_h;
            w_ext_v += g * mech.w_ext_v;
        }
        if w_ext_h <= 0.0 {
            return Err(SearchError::NoMechanism);
        }
        let w_int: f64 = rho
            .iter()
            .zip(&self.section_moments)
            .map(|(r, m)| m * r.abs())
            .sum();
        Ok(MechanismCombination {
            genes: genes.to_vec(),
            rho,
            w_int,
            w_ext_h,
            w_ext_v,
            lambda0: (w_int - w_ext_v) / w_ext_h,
            storey_sway: self.storey_sway(genes),
        })
    }

    /// Mechanism heights and softening coefficient of a valid combination.
    ///
    /// With storey sway genes c_i the heights are h_i = sum_{k<=i} H_k c_k
    /// and the second-order descent uses g_i = sum_{k<=i} H_k c_k^2; for
    /// binary sway the two coincide and gamma reduces to
    /// sum q_ij L_j h_i / (h_max sum F_i h_i).
    pub fn softening(&self, combination: &MechanismCombination) -> SofteningData {
        let n_f = self.n_storeys();
        let mut heights = Vec::with_capacity(n_f);
        let mut quad = Vec::with_capacity(n_f);
        let mut h = 0.0;
        let mut g = 0.0;
        for i in 0..n_f {
            let c = f64::from(combination.storey_sway[i]);
            h += self.storey_heights[i] * c;
            g += self.storey_heights[i] * c * c;
            heights.push(h);
            quad.push(g);
        }
        let h_max = heights[n_f - 1];
        debug_assert!(h_max > 0.0, "valid combinations sway somewhere");
        let numerator: f64 = self
            .storey_loads
            .iter()
            .zip(&quad)
            .map(|(ql, g)| ql * g)
            .sum();
        let denominator: f64 = self
            .forces
            .iter()
            .zip(&heights)
            .map(|(f, h)| f * h)
            .sum();
        SofteningData {
            heights,
            h_max,
            gamma: numerator / (h_max * denominator),
            delta_to_phi: h_max,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frame::test_fixtures::*;
    use crate::frame::{make_pattern, LateralLoadPattern, PatternKind};
    use approx::assert_relative_eq;

    fn benchmark_pool(kind: PatternKind) -> (MechanismPool, Vec<u32>) {
        let frame = benchmark_frame();
        let pattern = make_pattern(&frame, kind, 800.0).unwrap();
        let pool = build_pool(&frame, &pattern);
        let genes = vec![0; pool.len()];
        (pool, genes)
    }

    fn gene_index(pool: &MechanismPool, kind: MechanismKind) -> usize {
        pool.mechanisms()
            .iter()
            .position(|m| m.kind == kind)
            .unwrap()
    }

    #[test]
    fn benchmark_pool_composition() {
        let (pool, _) = benchmark_pool(PatternKind::MassProportional);
        assert_eq!(pool.len(), 12);
        let count = |pred: &dyn Fn(&MechanismKind) -> bool| {
            pool.mechanisms().iter().filter(|m| pred(&m.kind)).count()
        };
        assert_eq!(count(&|k| matches!(k, MechanismKind::Floor { .. })), 2);
        assert_eq!(count(&|k| matches!(k, MechanismKind::Beam { .. })), 2);
        assert_eq!(count(&|k| matches!(k, MechanismKind::Node { .. })), 8);
    }

    #[test]
    fn no_vertical_load_means_no_beam_mechanisms() {
        let frame = portal_frame(0.0);
        let pattern = LateralLoadPattern::new("p", vec![100.0]).unwrap();
        let pool = build_pool(&frame, &pattern);
        // portal corners have two members each: floor mechanism only
        assert_eq!(pool.len(), 1);
        assert!(matches!(
            pool.mechanisms()[0].kind,
            MechanismKind::Floor { storey: 1 }
        ));
    }

    #[test]
    fn storey_two_sway_multiplier() {
        let (pool, mut genes) = benchmark_pool(PatternKind::InverseTriangular);
        genes[gene_index(&pool, MechanismKind::Floor { storey: 2 })] = 1;
        let combo = pool.evaluate(&genes).unwrap();
        let m240 = 7.446e-4 * FY;
        assert_relative_eq!(
            combo.lambda0,
            6.0 * m240 / (1600.0 / 3.0 * 3.0),
            max_relative = 1e-12
        );
        // published collapse multiplier for this load case
        assert_relative_eq!(combo.lambda0, 0.6551, max_relative = 2e-3);
        assert_eq!(combo.hinges(&pool).len(), 6);
    }

    #[test]
    fn zero_genes_is_not_a_mechanism() {
        let (pool, genes) = benchmark_pool(PatternKind::MassProportional);
        assert_eq!(pool.evaluate(&genes).unwrap_err(), SearchError::NoMechanism);
    }

    #[test]
    fn node_only_combination_is_not_a_mechanism() {
        let (pool, mut genes) = benchmark_pool(PatternKind::MassProportional);
        genes[gene_index(
            &pool,
            MechanismKind::Node {
                storey: 1,
                column: 1,
                sense: NodeSense::Plus,
            },
        )] = 1;
        assert_eq!(pool.evaluate(&genes).unwrap_err(), SearchError::NoMechanism);
    }

    #[test]
    fn plus_node_cancels_column_hinges_at_swying_joint() {
        let (pool, mut genes) = benchmark_pool(PatternKind::MassProportional);
        genes[gene_index(&pool, MechanismKind::Floor { storey: 1 })] = 1;
        genes[gene_index(&pool, MechanismKind::Floor { storey: 2 })] = 1;
        genes[gene_index(
            &pool,
            MechanismKind::Node {
                storey: 1,
                column: 1,
                sense: NodeSense::Plus,
            },
        )] = 1;
        let combo = pool.evaluate(&genes).unwrap();
        let hinged: Vec<_> = combo
            .hinges(&pool)
            .into_iter()
            .map(|(s, _)| s.location)
            .collect();
        use crate::frame::{ColumnEnd::*, SectionLocation::*};
        assert!(!hinged.iter().any(|l| matches!(
            l,
            ColumnEnd { storey: 1, column: 1, end: Top }
        )));
        assert!(!hinged.iter().any(|l| matches!(
            l,
            ColumnEnd { storey: 2, column: 1, end: Bottom }
        )));
        assert!(hinged.iter().any(|l| matches!(
            l,
            BeamEnd { storey: 1, bay: 1, end: crate::frame::BeamEnd::Left }
        )));
    }

    #[test]
    fn softening_of_reference_mechanisms() {
        // global sway under the mass-proportional forces
        let (pool, mut genes) = benchmark_pool(PatternKind::MassProportional);
        genes[gene_index(&pool, MechanismKind::Floor { storey: 1 })] = 1;
        genes[gene_index(&pool, MechanismKind::Floor { storey: 2 })] = 1;
        let combo = pool.evaluate(&genes).unwrap();
        let soft = pool.softening(&combo);
        assert_eq!(soft.heights, vec![3.0, 6.0]);
        assert_relative_eq!(soft.gamma, 3600.0 / (6.0 * 3600.0), max_relative = 1e-12);
        assert_relative_eq!(soft.gamma, 0.167, max_relative = 5e-3);

        // storey-2 sway under the inverse-triangular forces
        let (pool, mut genes) = benchmark_pool(PatternKind::InverseTriangular);
        genes[gene_index(&pool, MechanismKind::Floor { storey: 2 })] = 1;
        let combo = pool.evaluate(&genes).unwrap();
        let soft = pool.softening(&combo);
        assert_eq!(soft.heights, vec![0.0, 3.0]);
        assert_relative_eq!(soft.gamma, 1200.0 / (3.0 * 1600.0), max_relative = 1e-12);
        assert_relative_eq!(soft.gamma, 0.250, max_relative = 1e-9);
    }

    #[test]
    fn no_gravity_means_no_softening() {
        let frame = portal_frame(0.0);
        let pattern = LateralLoadPattern::new("p", vec![100.0]).unwrap();
        let pool = build_pool(&frame, &pattern);
        let combo = pool.evaluate(&[1]).unwrap();
        assert_eq!(pool.softening(&combo).gamma, 0.0);
    }

    #[test]
    fn work_balance_identity() {
        let (pool, mut genes) = benchmark_pool(PatternKind::MassProportional);
        genes[gene_index(&pool, MechanismKind::Floor { storey: 1 })] = 1;
        genes[gene_index(&pool, MechanismKind::Floor { storey: 2 })] = 2;
        genes[gene_index(&pool, MechanismKind::Beam { storey: 2, bay: 1 })] = 1;
        let combo = pool.evaluate(&genes).unwrap();
        let balance = combo.lambda0 * combo.w_ext_h + combo.w_ext_v;
        assert_relative_eq!(balance, combo.w_int, max_relative = 1e-9);
    }

    #[test]
    fn internal_work_is_subadditive() {
        let (pool, zero) = benchmark_pool(PatternKind::MassProportional);
        let mut a = zero.clone();
        let mut b = zero.clone();
        a[gene_index(&pool, MechanismKind::Floor { storey: 1 })] = 1;
        a[gene_index(&pool, MechanismKind::Floor { storey: 2 })] = 1;
        b[gene_index(
            &pool,
            MechanismKind::Node {
                storey: 1,
                column: 2,
                sense: NodeSense::Plus,
            },
        )] = 1;
        b[gene_index(&pool, MechanismKind::Floor { storey: 1 })] = 1;
        let sum: Vec<u32> = a.iter().zip(&b).map(|(x, y)| x + y).collect();
        let wa = pool.evaluate(&a).unwrap().w_int;
        let wb = pool.evaluate(&b).unwrap().w_int;
        let ws = pool.evaluate(&sum).unwrap().w_int;
        assert!(ws <= wa + wb + 1e-9);
    }

    #[test]
    fn height_recursion_matches_general_formula_for_binary_sway() {
        let (pool, mut genes) = benchmark_pool(PatternKind::MassProportional);
        genes[gene_index(&pool, MechanismKind::Floor { storey: 2 })] = 1;
        let combo = pool.evaluate(&genes).unwrap();
        let soft = pool.softening(&combo);
        // h_i = h_{i-1} + H_i alpha_i with alpha in {0, 1}
        let mut h = 0.0;
        for (i, alpha) in [0u32, 1].iter().enumerate() {
            h += 3.0 * f64::from(*alpha);
            assert_relative_eq!(soft.heights[i], h);
        }
    }
}
