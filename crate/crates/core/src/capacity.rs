//! Approximated bilinear capacity curve: elastic branch up to the collapse
//! load, linear second-order softening branch beyond, truncated at the
//! earlier of the base-shear-drop limit and the first hinge reaching its
//! ultimate chord rotation.

use serde::{Deserialize, Serialize};

use crate::error::CapacityError;
use crate::frame::{
    enumerate_critical_sections, BeamEnd, CriticalSection, FrameSpec, LateralLoadPattern,
    SectionLocation,
};
use crate::elastic::ElasticSolution;
use crate::mechanism::ROTATION_CUTOFF;
use crate::search::CollapseResult;

/// Base-shear-drop fraction used by default (Italian code value).
pub const DEFAULT_ALPHA_S: f64 = 0.15;

/// Number of sampling points on the softening branch of an exported curve.
pub const CURVE_SAMPLES: usize = 50;

/// Untruncated bilinear law of the capacity curve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BilinearLaw {
    /// Elastic stiffness, kN/m.
    pub k_e: f64,
    /// Elastic control-node displacement at multiplier 1, m.
    pub u_e: f64,
    /// Yield displacement lambda0 * u_e, m.
    pub u_y: f64,
    /// Peak base shear lambda0 * sum(F), kN.
    pub v_by: f64,
    /// Post-peak slope -gamma * sum(F), kN/m (non-positive).
    pub k_s: f64,
    pub lambda0: f64,
    pub gamma: f64,
    /// Overall base shear of the pattern at multiplier 1, kN.
    pub total_force: f64,
}

/// Which displacement limit truncates the curve.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Governing {
    ShearDrop,
    ChordRotation,
}

/// Truncated bilinear capacity curve.
#[derive(Debug, Clone, PartialEq)]
pub struct CapacityCurve {
    pub k_e: f64,
    pub u_e: f64,
    pub u_y: f64,
    pub v_by: f64,
    pub k_s: f64,
    /// Base-shear-drop displacement limit; `None` when softening is absent.
    pub u_s: Option<f64>,
    /// Chord-rotation displacement limit; `None` when no hinge is bounded.
    pub u_c: Option<f64>,
    /// Ultimate displacement min(u_s, u_c), m.
    pub u_u: f64,
    pub governing: Governing,
    /// (displacement, base shear) samples of the whole curve for export.
    pub points: Vec<(f64, f64)>,
}

impl CapacityCurve {
    /// Base shear at displacement `u` on the idealized curve.
    pub fn base_shear(&self, u: f64) -> f64 {
        if u <= self.u_y {
            self.k_e * u
        } else {
            self.v_by + self.k_s * (u - self.u_y)
        }
    }
}

/// Chord-rotation data of one critical section under the winning mechanism.
#[derive(Debug, Clone, PartialEq)]
pub struct HingeCapacity {
    pub section: CriticalSection,
    /// Shear span L_v, m.
    pub shear_span: f64,
    /// Yield chord rotation M_p L_v / (2 E I), rad.
    pub theta_y: f64,
    /// Ultimate chord rotation, 8 theta_y.
    pub theta_u: f64,
    /// |rho_s|: net rotation coefficient magnitude in the mechanism.
    pub rho: f64,
    /// Control-node displacement at which the hinge exhausts its plastic
    /// rotation 7 theta_y; `None` if the section does not rotate.
    pub u_ultimate: Option<f64>,
}

/// Assembles the untruncated bilinear law.
pub fn build_bilinear(
    elastic: &ElasticSolution,
    collapse: &CollapseResult,
    pattern: &LateralLoadPattern,
) -> BilinearLaw {
    let total = pattern.total();
    let lambda0 = collapse.lambda0;
    let gamma = collapse.softening.gamma;
    BilinearLaw {
        k_e: elastic.k_e,
        u_e: elastic.u_e,
        u_y: lambda0 * elastic.u_e,
        v_by: lambda0 * total,
        k_s: -gamma * total,
        lambda0,
        gamma,
        total_force: total,
    }
}

/// Displacement at which the base shear has dropped by the fraction
/// `alpha_s` below the peak: u_s = lambda0 (u_e + alpha_s / gamma).
/// Unbounded when there is no softening.
pub fn displacement_shear_drop(law: &BilinearLaw, alpha_s: f64) -> Option<f64> {
    assert!((0.0..1.0).contains(&alpha_s), "alpha_s must lie in [0, 1)");
    (law.gamma > 0.0).then(|| law.lambda0 * (law.u_e + alpha_s / law.gamma))
}

const SPAN_FACTOR: f64 = 2.0 - std::f64::consts::SQRT_2;

/// Shear spans of every critical section, parallel to
/// [`enumerate_critical_sections`].
///
/// Columns take half the interstorey height. A beam end takes its distance
/// to the zero-moment point of the collapse moment diagram:
/// L_vr = (2 - sqrt(2)) sqrt(M_b/q) at the right end and the complement at
/// the left. With an along-span hinge the left span becomes
/// L_j - x - L_vr, which is also the span of the along-span hinge itself
/// (the two merge continuously as q drops to the hinge threshold). For
/// lightly loaded beams the right span is capped at L/2, the value of the
/// antisymmetric sway diagram, which is also the exact q = 0 limit.
pub fn shear_spans(frame: &FrameSpec) -> Vec<f64> {
    enumerate_critical_sections(frame)
        .iter()
        .map(|section| match section.location {
            SectionLocation::ColumnEnd { storey, .. } => frame.storey_height(storey) / 2.0,
            SectionLocation::BeamEnd { storey, bay, end } => {
                let l = frame.bay_length(bay);
                let q = frame.vertical_load(storey, bay);
                if q <= 0.0 {
                    return l / 2.0;
                }
                let m_b = frame.beam_props(storey, bay).plastic_moment;
                let l_vr = (SPAN_FACTOR * (m_b / q).sqrt()).min(l / 2.0);
                match end {
                    BeamEnd::Right => l_vr,
                    BeamEnd::Left => match frame.interior_hinge_x(storey, bay) {
                        Some(x) => l - x - l_vr,
                        None => l - l_vr,
                    },
                }
            }
            SectionLocation::BeamSpan { storey, bay, x } => {
                let l = frame.bay_length(bay);
                let q = frame.vertical_load(storey, bay);
                let m_b = frame.beam_props(storey, bay).plastic_moment;
                let l_vr = SPAN_FACTOR * (m_b / q).sqrt();
                l - x - l_vr
            }
        })
        .collect()
}

/// Chord-rotation capacities of every critical section under the winning
/// combination.
pub fn hinge_capacities(
    frame: &FrameSpec,
    collapse: &CollapseResult,
    law: &BilinearLaw,
) -> Vec<HingeCapacity> {
    let sections = enumerate_critical_sections(frame);
    assert_eq!(
        sections.len(),
        collapse.combination.rho.len(),
        "collapse result belongs to this frame"
    );
    let spans = shear_spans(frame);
    let h_max = collapse.softening.h_max;
    sections
        .into_iter()
        .zip(spans)
        .zip(&collapse.combination.rho)
        .map(|((section, shear_span), rho_signed)| {
            let props = frame.section(section.section_ref);
            let theta_y =
                section.plastic_moment * shear_span / (2.0 * props.flexural_rigidity());
            let rho = rho_signed.abs();
            let u_ultimate =
                (rho > ROTATION_CUTOFF).then(|| law.u_y + 7.0 * theta_y * h_max / rho);
            HingeCapacity {
                section,
                shear_span,
                theta_y,
                theta_u: 8.0 * theta_y,
                rho,
                u_ultimate,
            }
        })
        .collect()
}

/// Truncates the bilinear law at min(u_s, u_c).
pub fn truncate(
    law: &BilinearLaw,
    u_s: Option<f64>,
    hinges: &[HingeCapacity],
) -> Result<CapacityCurve, CapacityError> {
    let u_c = hinges
        .iter()
        .filter_map(|h| h.u_ultimate)
        .min_by(f64::total_cmp);
    let (u_u, governing) = match (u_s, u_c) {
        (Some(s), Some(c)) if s < c => (s, Governing::ShearDrop),
        (_, Some(c)) => (c, Governing::ChordRotation),
        (Some(s), None) => (s, Governing::ShearDrop),
        (None, None) => {
            // cannot happen for combinations produced by the search: every
            // valid mechanism rotates some section
            return Err(CapacityError::NonPositiveResidual {
                zero_crossing: f64::INFINITY,
            });
        }
    };
    let residual = law.v_by + law.k_s * (u_u - law.u_y);
    if residual <= 0.0 {
        return Err(CapacityError::NonPositiveResidual {
            zero_crossing: law.u_y - law.v_by / law.k_s,
        });
    }

    let mut points = vec![(0.0, 0.0), (law.u_y, law.v_by)];
    if u_u > law.u_y {
        let step = (u_u - law.u_y) / CURVE_SAMPLES as f64;
        points.extend((1..=CURVE_SAMPLES).map(|k| {
            let u = law.u_y + step * k as f64;
            (u, law.v_by + law.k_s * (u - law.u_y))
        }));
    }
    Ok(CapacityCurve {
        k_e: law.k_e,
        u_e: law.u_e,
        u_y: law.u_y,
        v_by: law.v_by,
        k_s: law.k_s,
        u_s,
        u_c,
        u_u,
        governing,
        points,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frame::test_fixtures::*;
    use crate::frame::{make_pattern, ColumnEnd, LateralLoadPattern, PatternKind};
    use crate::mechanism::build_pool;
    use crate::search::{search_exhaustive, DEFAULT_EXHAUSTIVE_BUDGET};
    use crate::elastic::solve_elastic;
    use approx::assert_relative_eq;

    fn benchmark_run(kind: PatternKind) -> (FrameSpec, LateralLoadPattern, ElasticSolution, CollapseResult) {
        let frame = benchmark_frame();
        let pattern = make_pattern(&frame, kind, 800.0).unwrap();
        let elastic = solve_elastic(&frame, &pattern).unwrap();
        let pool = build_pool(&frame, &pattern);
        let collapse = search_exhaustive(&pool, 2, DEFAULT_EXHAUSTIVE_BUDGET).unwrap();
        (frame, pattern, elastic, collapse)
    }

    #[test]
    fn bilinear_parameters_match_reference() {
        let (_, pattern, elastic, collapse) = benchmark_run(PatternKind::MassProportional);
        let law = build_bilinear(&elastic, &collapse, &pattern);
        assert_relative_eq!(law.v_by, 639.68, max_relative = 5e-3);
        assert_relative_eq!(law.u_y, 0.0492, max_relative = 2e-2);

        let (_, pattern, elastic, collapse) = benchmark_run(PatternKind::InverseTriangular);
        let law = build_bilinear(&elastic, &collapse, &pattern);
        assert_relative_eq!(law.v_by, 524.11, max_relative = 1e-2);
        assert_relative_eq!(law.k_s, -0.25 * 800.0, max_relative = 1e-9);
    }

    #[test]
    fn plateau_when_no_gravity() {
        let frame = portal_frame(0.0);
        let pattern = LateralLoadPattern::new("p", vec![100.0]).unwrap();
        let elastic = solve_elastic(&frame, &pattern).unwrap();
        let pool = build_pool(&frame, &pattern);
        let collapse = search_exhaustive(&pool, 1, DEFAULT_EXHAUSTIVE_BUDGET).unwrap();
        let law = build_bilinear(&elastic, &collapse, &pattern);
        assert_eq!(law.k_s, 0.0);
        assert_eq!(displacement_shear_drop(&law, 0.15), None);
    }

    #[test]
    fn shear_drop_displacement() {
        let (_, pattern, elastic, collapse) = benchmark_run(PatternKind::MassProportional);
        let law = build_bilinear(&elastic, &collapse, &pattern);
        let u_s = displacement_shear_drop(&law, 0.15).unwrap();
        assert_relative_eq!(u_s, 0.769, max_relative = 2e-3);
        // alpha_s = 0 degenerates to the yield displacement
        let u_s0 = displacement_shear_drop(&law, 0.0).unwrap();
        assert_relative_eq!(u_s0, law.u_y, max_relative = 1e-12);

        let (_, pattern, elastic, collapse) = benchmark_run(PatternKind::InverseTriangular);
        let law = build_bilinear(&elastic, &collapse, &pattern);
        let u_s = displacement_shear_drop(&law, 0.15).unwrap();
        assert_relative_eq!(u_s, 0.441, max_relative = 3e-3);
    }

    #[test]
    fn benchmark_shear_spans() {
        let frame = benchmark_frame();
        let sections = enumerate_critical_sections(&frame);
        let spans = shear_spans(&frame);
        let at = |pred: &dyn Fn(&SectionLocation) -> bool| {
            sections
                .iter()
                .zip(&spans)
                .find(|(s, _)| pred(&s.location))
                .map(|(_, &l)| l)
                .unwrap()
        };
        // columns: half the storey height
        let col = at(&|l| matches!(l, SectionLocation::ColumnEnd { storey: 1, column: 2, end: ColumnEnd::Bottom }));
        assert_relative_eq!(col, 1.5);
        // storey-2 beam (along-span hinge present)
        let right = at(&|l| matches!(l, SectionLocation::BeamEnd { storey: 2, bay: 1, end: BeamEnd::Right }));
        assert_relative_eq!(right, 1.0958, max_relative = 1e-3);
        let left = at(&|l| matches!(l, SectionLocation::BeamEnd { storey: 2, bay: 1, end: BeamEnd::Left }));
        assert_relative_eq!(left, 2.6459, max_relative = 1e-3);
        let span = at(&|l| matches!(l, SectionLocation::BeamSpan { storey: 2, bay: 1, .. }));
        assert_relative_eq!(span, left, max_relative = 1e-12);
        // storey-1 beam (no along-span hinge)
        let right1 = at(&|l| matches!(l, SectionLocation::BeamEnd { storey: 1, bay: 1, end: BeamEnd::Right }));
        let m300 = 1.383e-3 * FY;
        assert_relative_eq!(right1, SPAN_FACTOR * (m300 / 50.0_f64).sqrt(), max_relative = 1e-12);
        let left1 = at(&|l| matches!(l, SectionLocation::BeamEnd { storey: 1, bay: 1, end: BeamEnd::Left }));
        assert_relative_eq!(left1, 4.0 - right1, max_relative = 1e-12);
    }

    #[test]
    fn shear_spans_are_continuous_at_the_hinge_threshold() {
        use crate::frame::{FrameInput, SectionProperties, SectionRef};
        let make = |q: f64| {
            let sec = SectionProperties {
                moment_of_inertia: 1e-4,
                plastic_moment: 200.0,
                elastic_modulus: E_STEEL,
            };
            FrameSpec::new(FrameInput {
                storey_heights: vec![3.0],
                bay_lengths: vec![5.0],
                sections: vec![("S".into(), sec)],
                beam_sections: vec![vec![SectionRef(0)]],
                column_sections: vec![vec![SectionRef(0), SectionRef(0)]],
                vertical_loads: vec![vec![q]],
                gravity_accel: 9.81,
            })
            .unwrap()
        };
        let q_threshold = 4.0 * 200.0 / 25.0;
        let below = shear_spans(&make(q_threshold * (1.0 - 1e-9)));
        let above = shear_spans(&make(q_threshold * (1.0 + 1e-9)));
        // below: [4 column ends, left, right]; above adds the span section
        assert_eq!(below.len(), 6);
        assert_eq!(above.len(), 7);
        assert_relative_eq!(below[4], above[4], max_relative = 1e-6); // left end
        assert_relative_eq!(below[5], above[6], max_relative = 1e-6); // right end
    }

    #[test]
    fn shear_spans_capped_for_light_vertical_load() {
        let frame = portal_frame(0.1);
        let spans = shear_spans(&frame);
        // both beam ends fall back to L/2 = 2.5
        assert_relative_eq!(spans[4], 2.5);
        assert_relative_eq!(spans[5], 2.5);
    }

    #[test]
    fn hinge_capacities_match_reference_rows() {
        let (frame, pattern, elastic, collapse) = benchmark_run(PatternKind::MassProportional);
        let law = build_bilinear(&elastic, &collapse, &pattern);
        let hinges = hinge_capacities(&frame, &collapse, &law);
        let find = |pred: &dyn Fn(&SectionLocation) -> bool| {
            hinges.iter().find(|h| pred(&h.section.location)).unwrap()
        };
        // central column base
        let h = find(&|l| matches!(l, SectionLocation::ColumnEnd { storey: 1, column: 2, end: ColumnEnd::Bottom }));
        assert_relative_eq!(h.theta_y, 5.96e-3, max_relative = 1e-3);
        assert_relative_eq!(h.u_ultimate.unwrap(), 0.2995, max_relative = 2e-3);
        assert_relative_eq!(h.theta_u, 8.0 * h.theta_y);
        // unbounded row: storey-2 beam right end never rotates
        let inf = find(&|l| matches!(l, SectionLocation::BeamEnd { storey: 2, bay: 1, end: BeamEnd::Right }));
        assert_eq!(inf.u_ultimate, None);
        assert!(inf.rho <= ROTATION_CUTOFF);

        let (frame, pattern, elastic, collapse) = benchmark_run(PatternKind::InverseTriangular);
        let law = build_bilinear(&elastic, &collapse, &pattern);
        let hinges = hinge_capacities(&frame, &collapse, &law);
        let h = hinges
            .iter()
            .find(|h| matches!(h.section.location, SectionLocation::ColumnEnd { storey: 2, column: 2, end: ColumnEnd::Top }))
            .unwrap();
        assert_relative_eq!(h.theta_y, 8.051e-3, max_relative = 1e-3);
        assert_relative_eq!(h.u_ultimate.unwrap(), 0.2171, max_relative = 1e-3);
    }

    #[test]
    fn truncation_picks_the_chord_rotation_limit_on_the_benchmark() {
        let (frame, pattern, elastic, collapse) = benchmark_run(PatternKind::MassProportional);
        let law = build_bilinear(&elastic, &collapse, &pattern);
        let u_s = displacement_shear_drop(&law, DEFAULT_ALPHA_S);
        let hinges = hinge_capacities(&frame, &collapse, &law);
        let curve = truncate(&law, u_s, &hinges).unwrap();
        assert_eq!(curve.governing, Governing::ChordRotation);
        assert_relative_eq!(curve.u_u, 0.2995, max_relative = 1e-2);
        assert!(curve.u_s.unwrap() > curve.u_c.unwrap());
        // sampled points sit exactly on the two analytic branches
        for &(u, v) in &curve.points {
            assert_relative_eq!(v, curve.base_shear(u), max_relative = 1e-9, epsilon = 1e-12);
        }
        assert_eq!(curve.points.last().unwrap().0, curve.u_u);
    }

    #[test]
    fn gravity_free_frame_is_governed_by_chord_rotation() {
        let frame = portal_frame(0.0);
        let pattern = LateralLoadPattern::new("p", vec![100.0]).unwrap();
        let elastic = solve_elastic(&frame, &pattern).unwrap();
        let pool = build_pool(&frame, &pattern);
        let collapse = search_exhaustive(&pool, 1, DEFAULT_EXHAUSTIVE_BUDGET).unwrap();
        let law = build_bilinear(&elastic, &collapse, &pattern);
        let u_s = displacement_shear_drop(&law, DEFAULT_ALPHA_S);
        assert_eq!(u_s, None);
        let hinges = hinge_capacities(&frame, &collapse, &law);
        let curve = truncate(&law, u_s, &hinges).unwrap();
        assert_eq!(curve.governing, Governing::ChordRotation);
        assert_eq!(Some(curve.u_u), curve.u_c);
        // plateau: constant shear past yield
        assert_eq!(curve.base_shear(curve.u_u), curve.v_by);
    }

    #[test]
    fn detects_resistance_exhaustion() {
        let law = BilinearLaw {
            k_e: 10_000.0,
            u_e: 0.01,
            u_y: 0.01,
            v_by: 100.0,
            k_s: -1000.0,
            lambda0: 1.0,
            gamma: 10.0,
            total_force: 100.0,
        };
        let hinge = HingeCapacity {
            section: enumerate_critical_sections(&portal_frame(0.0))[0],
            shear_span: 1.5,
            theta_y: 0.01,
            theta_u: 0.08,
            rho: 1.0,
            u_ultimate: Some(0.5), // beyond the V = 0 crossing at 0.11
        };
        let err = truncate(&law, None, &[hinge]).unwrap_err();
        match err {
            CapacityError::NonPositiveResidual { zero_crossing } => {
                assert_relative_eq!(zero_crossing, 0.11, max_relative = 1e-12);
            }
        }
    }

    #[test]
    fn chord_rotation_closure_identity() {
        // feeding u_ultimate back through the reference rotation reproduces
        // the plastic limit 7 theta_y
        let (frame, pattern, elastic, collapse) = benchmark_run(PatternKind::MassProportional);
        let law = build_bilinear(&elastic, &collapse, &pattern);
        for h in hinge_capacities(&frame, &collapse, &law) {
            let Some(u_ult) = h.u_ultimate else { continue };
            let plastic = (u_ult - law.u_y) / collapse.softening.h_max * h.rho;
            assert_relative_eq!(plastic, 7.0 * h.theta_y, max_relative = 1e-9);
        }
    }
}
