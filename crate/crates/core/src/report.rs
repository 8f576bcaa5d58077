//! Report document (JSON) and capacity-curve export (CSV).

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::capacity::{CapacityCurve, Governing};
use crate::mechanism::ROTATION_CUTOFF;
use crate::pipeline::PatternRun;

/// Full analysis report; serializable, and reparseable to the same value.
/// Timing lives in dedicated fields so reports are reproducible apart from
/// them.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReportDocument {
    pub patterns: Vec<PatternReport>,
    pub total_time_ms: f64,
}

impl ReportDocument {
    pub fn from_runs(runs: &[(PatternRun, f64)]) -> Self {
        let total_time_ms = runs.iter().map(|(_, t)| t).sum();
        Self {
            patterns: runs
                .iter()
                .map(|(run, t)| PatternReport::from_run(run, *t))
                .collect(),
            total_time_ms,
        }
    }

    /// Copy with timing fields zeroed, for byte-level comparisons.
    pub fn without_timing(&self) -> Self {
        let mut copy = self.clone();
        copy.total_time_ms = 0.0;
        for p in &mut copy.patterns {
            p.time_ms = 0.0;
        }
        copy
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PatternReport {
    pub pattern: String,
    pub forces: Vec<f64>,
    pub collapse: CollapseReport,
    pub curve: CurveReport,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sdof: Option<SdofReport>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub verification: Option<VerificationReport>,
    pub time_ms: f64,
}

impl PatternReport {
    fn from_run(run: &PatternRun, time_ms: f64) -> Self {
        let hinges = run
            .hinges
            .iter()
            .filter(|h| h.rho > ROTATION_CUTOFF)
            .map(|h| HingeReport {
                section: h.section.location.to_string(),
                rho: h.rho,
                u_ultimate: h.u_ultimate,
            })
            .collect();
        Self {
            pattern: run.pattern.name.clone(),
            forces: run.pattern.forces.clone(),
            collapse: CollapseReport {
                lambda0: run.collapse.lambda0,
                gamma: run.collapse.softening.gamma,
                heights: run.collapse.softening.heights.clone(),
                genes: run.collapse.best_genes.clone(),
                evaluations: run.collapse.evaluations,
                hinges,
            },
            curve: CurveReport::from_curve(&run.curve),
            sdof: run.sdof.as_ref().map(|s| SdofReport {
                gamma: s.gamma_part,
                m_star: s.m_star,
                k_star: s.k_star,
                f_u_star: s.f_u_star,
                d_y_star: s.d_y_star,
                d_u_star: s.d_u_star,
                t_star: s.t_star,
            }),
            verification: run.verification.as_ref().map(|v| VerificationReport {
                se_t: v.se_t,
                d_e_star: v.d_e_star,
                q_star: v.q_star,
                demand: v.demand,
                safety_factor: v.safety_factor,
                regime: v.regime,
                warnings: v.warnings.clone(),
            }),
            time_ms,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CollapseReport {
    pub lambda0: f64,
    pub gamma: f64,
    pub heights: Vec<f64>,
    pub genes: Vec<u32>,
    pub evaluations: u64,
    pub hinges: Vec<HingeReport>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HingeReport {
    pub section: String,
    pub rho: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub u_ultimate: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CurveReport {
    pub k_e: f64,
    pub u_e: f64,
    pub u_y: f64,
    pub v_by: f64,
    pub k_s: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub u_s: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub u_c: Option<f64>,
    pub u_u: f64,
    pub governing: Governing,
}

impl CurveReport {
    fn from_curve(curve: &CapacityCurve) -> Self {
        Self {
            k_e: curve.k_e,
            u_e: curve.u_e,
            u_y: curve.u_y,
            v_by: curve.v_by,
            k_s: curve.k_s,
            u_s: curve.u_s,
            u_c: curve.u_c,
            u_u: curve.u_u,
            governing: curve.governing,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SdofReport {
    pub gamma: f64,
    pub m_star: f64,
    pub k_star: f64,
    pub f_u_star: f64,
    pub d_y_star: f64,
    pub d_u_star: f64,
    pub t_star: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VerificationReport {
    pub se_t: f64,
    pub d_e_star: f64,
    pub q_star: f64,
    pub demand: f64,
    pub safety_factor: f64,
    pub regime: crate::assess::Regime,
    pub warnings: Vec<String>,
}

/// Writes the curve samples as CSV: header `displacement_m,base_shear_kN`,
/// then the origin, the yield point, the sampled softening branch and the
/// final row at the ultimate displacement.
pub fn write_curve_csv<W: Write>(mut out: W, curve: &CapacityCurve) -> std::io::Result<()> {
    writeln!(out, "displacement_m,base_shear_kN")?;
    for (u, v) in &curve.points {
        writeln!(out, "{u},{v}")?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frame::test_fixtures::benchmark_frame;
    use crate::frame::{make_pattern, PatternKind};
    use crate::pipeline::{run_pattern, AnalysisSettings};
    use approx::assert_relative_eq;

    fn benchmark_run() -> PatternRun {
        let frame = benchmark_frame();
        let pattern = make_pattern(&frame, PatternKind::MassProportional, 800.0).unwrap();
        run_pattern(&frame, &pattern, &AnalysisSettings::default(), None).unwrap()
    }

    #[test]
    fn report_round_trips_through_json() {
        let run = benchmark_run();
        let report = ReportDocument::from_runs(&[(run, 12.5)]);
        let text = serde_json::to_string_pretty(&report).unwrap();
        let back: ReportDocument = serde_json::from_str(&text).unwrap();
        assert_eq!(report, back);
    }

    #[test]
    fn reports_are_deterministic_apart_from_timing() {
        let a = ReportDocument::from_runs(&[(benchmark_run(), 1.0)]);
        let b = ReportDocument::from_runs(&[(benchmark_run(), 2.0)]);
        assert_ne!(a, b);
        let ja = serde_json::to_string(&a.without_timing()).unwrap();
        let jb = serde_json::to_string(&b.without_timing()).unwrap();
        assert_eq!(ja, jb);
    }

    #[test]
    fn curve_csv_layout() {
        let run = benchmark_run();
        let mut buf = Vec::new();
        write_curve_csv(&mut buf, &run.curve).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "displacement_m,base_shear_kN");
        assert_eq!(lines[1], "0,0");
        // 2 header-adjacent anchor rows + 50 softening samples
        assert_eq!(lines.len(), 1 + 2 + 50);
        let last: Vec<f64> = lines
            .last()
            .unwrap()
            .split(',')
            .map(|v| v.parse().unwrap())
            .collect();
        assert_relative_eq!(last[0], run.curve.u_u, max_relative = 1e-12);
        assert_relative_eq!(last[0], 0.2995, max_relative = 1e-2);
        // every sampled row satisfies the softening-branch law
        for line in &lines[2..] {
            let row: Vec<f64> = line.split(',').map(|v| v.parse().unwrap()).collect();
            assert_relative_eq!(row[1], run.curve.base_shear(row[0]), max_relative = 1e-9);
        }
    }

    #[test]
    fn report_lists_the_mechanism_hinges() {
        let run = benchmark_run();
        let report = PatternReport::from_run(&run, 0.0);
        // ten hinges in the winning global mechanism
        assert_eq!(report.collapse.hinges.len(), 10);
        assert!(report
            .collapse
            .hinges
            .iter()
            .all(|h| h.u_ultimate.is_some()));
    }
}
