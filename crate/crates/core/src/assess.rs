//! Equivalent-SDOF conversion of the truncated capacity curve and the
//! displacement-based seismic check against a four-branch elastic design
//! spectrum (N2-style procedure).

use serde::{Deserialize, Serialize};

use crate::capacity::CapacityCurve;
use crate::elastic::ElasticSolution;
use crate::error::AssessError;

/// Standard gravity used to convert spectral ordinates from g-units, m/s^2.
pub const STANDARD_GRAVITY: f64 = 9.81;

/// Elastic acceleration spectrum parameters (four branches: rise, plateau,
/// 1/T decay, 1/T^2 decay).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpectrumParams {
    /// Peak ground acceleration on rock, g-units.
    pub ag_g: f64,
    /// Soil/topography factor S.
    #[serde(rename = "S")]
    pub soil_factor: f64,
    /// Damping correction (1.0 at 5% damping).
    pub eta: f64,
    /// Plateau amplification F0.
    #[serde(rename = "F0")]
    pub f0: f64,
    #[serde(rename = "TB")]
    pub t_b: f64,
    #[serde(rename = "TC")]
    pub t_c: f64,
    #[serde(rename = "TD")]
    pub t_d: f64,
    /// Free-text provenance note carried through from config files.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl SpectrumParams {
    pub fn validate(&self) -> Result<(), AssessError> {
        let err = |m: String| Err(AssessError::InvalidSpectrum(m));
        for (name, v) in [
            ("ag_g", self.ag_g),
            ("S", self.soil_factor),
            ("eta", self.eta),
            ("F0", self.f0),
        ] {
            if !(v > 0.0) {
                return err(format!("{name} must be positive, got {v}"));
            }
        }
        if !(0.0 < self.t_b && self.t_b < self.t_c && self.t_c < self.t_d) {
            return err(format!(
                "branch periods must satisfy 0 < TB < TC < TD, got TB={}, TC={}, TD={}",
                self.t_b, self.t_c, self.t_d
            ));
        }
        Ok(())
    }
}

/// Elastic spectral acceleration at period `t`, m/s^2. Continuous at every
/// branch point; anchored at a_g*g*S for t = 0.
pub fn spectral_acceleration(spectrum: &SpectrumParams, t: f64) -> f64 {
    assert!(t >= 0.0, "period must be non-negative");
    let plateau = spectrum.ag_g
        * STANDARD_GRAVITY
        * spectrum.soil_factor
        * spectrum.eta
        * spectrum.f0;
    if t < spectrum.t_b {
        let r = t / spectrum.t_b;
        plateau * (r + (1.0 - r) / (spectrum.eta * spectrum.f0))
    } else if t < spectrum.t_c {
        plateau
    } else if t < spectrum.t_d {
        plateau * spectrum.t_c / t
    } else {
        plateau * spectrum.t_c * spectrum.t_d / (t * t)
    }
}

/// Which deflected shape weights the floor masses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ShapeSource {
    /// Fundamental mode of the condensed lateral system (default).
    #[default]
    FundamentalMode,
    /// Static floor displacements under the analysed lateral pattern.
    ElasticStatic,
}

/// Equivalent elastic-perfectly-plastic single degree of freedom.
#[derive(Debug, Clone, PartialEq)]
pub struct EquivalentSdof {
    /// Participation factor Gamma.
    pub gamma_part: f64,
    /// Equivalent mass, kN*s^2/m.
    pub m_star: f64,
    /// Initial stiffness (equals the MDOF elastic stiffness), kN/m.
    pub k_star: f64,
    /// Plateau force from the equal-energy fit, kN.
    pub f_u_star: f64,
    /// Yield displacement F_u*/k*, m.
    pub d_y_star: f64,
    /// Displacement capacity u_u / Gamma, m.
    pub d_u_star: f64,
    /// Period 2 pi sqrt(m*/k*), s.
    pub t_star: f64,
    /// Shape used for the conversion, top floor = 1.
    pub shape: Vec<f64>,
}

/// Demand regime of the N2 check.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    Elastic,
    InelasticShortPeriod,
    EqualDisplacement,
}

/// Spectral demand and verification outcome.
#[derive(Debug, Clone, PartialEq)]
pub struct AssessmentResult {
    /// Spectral acceleration at T*, m/s^2.
    pub se_t: f64,
    /// Elastic spectral displacement at T*, m.
    pub d_e_star: f64,
    /// Strength ratio Se m*/F_u*.
    pub q_star: f64,
    /// Inelastic displacement demand, m.
    pub demand: f64,
    /// Capacity over demand, d_u*/demand.
    pub safety_factor: f64,
    pub regime: Regime,
    pub warnings: Vec<String>,
}

/// Converts the truncated capacity curve into an equivalent
/// elastic-perfectly-plastic SDOF.
///
/// The MDOF curve is scaled by 1/Gamma on both axes; the fit keeps the
/// initial stiffness and matches the area under the scaled curve up to d_u*
/// (equal energy), which gives
/// F_u* = k* d_u* - sqrt((k* d_u*)^2 - 2 k* A*).
pub fn equivalent_sdof(
    curve: &CapacityCurve,
    elastic: &ElasticSolution,
    floor_masses: &[f64],
    shape_source: ShapeSource,
) -> Result<EquivalentSdof, AssessError> {
    let n_f = elastic.floor_displacements.len();
    if floor_masses.len() != n_f {
        return Err(AssessError::MassCount {
            expected: n_f,
            got: floor_masses.len(),
        });
    }
    if floor_masses.iter().any(|&m| !(m > 0.0)) {
        return Err(AssessError::NonPositiveMass);
    }
    let shape = match shape_source {
        ShapeSource::FundamentalMode => elastic.fundamental_mode(floor_masses)?,
        ShapeSource::ElasticStatic => elastic.shape.clone(),
    };
    let m_star: f64 = floor_masses.iter().zip(&shape).map(|(m, p)| m * p).sum();
    let m_phi2: f64 = floor_masses
        .iter()
        .zip(&shape)
        .map(|(m, p)| m * p * p)
        .sum();
    let gamma_part = m_star / m_phi2;

    let k_star = curve.k_e;
    let d_u_star = curve.u_u / gamma_part;
    let du_plastic = curve.u_u - curve.u_y;
    let area_mdof = 0.5 * curve.u_y * curve.v_by
        + curve.v_by * du_plastic
        + 0.5 * curve.k_s * du_plastic * du_plastic;
    let area = area_mdof / (gamma_part * gamma_part);

    let kd = k_star * d_u_star;
    let disc = kd * kd - 2.0 * k_star * area;
    if disc < 0.0 {
        return Err(AssessError::BilinearizationFailure { area });
    }
    let f_u_star = kd - disc.sqrt();
    let d_y_star = f_u_star / k_star;
    let t_star = 2.0 * std::f64::consts::PI * (m_star / k_star).sqrt();
    Ok(EquivalentSdof {
        gamma_part,
        m_star,
        k_star,
        f_u_star,
        d_y_star,
        d_u_star,
        t_star,
        shape,
    })
}

/// Computes the inelastic displacement demand at T* and the safety factor
/// d_u*/demand.
///
/// Short-period demand follows the strength-ratio amplification
/// d = (d_e/q*)(1 + (q* - 1) T_C/T*), floored at the elastic value; for
/// q* <= 1 or T* >= T_C the equal-displacement rule applies.
pub fn demand_and_verify(sdof: &EquivalentSdof, spectrum: &SpectrumParams) -> AssessmentResult {
    let se_t = spectral_acceleration(spectrum, sdof.t_star);
    let omega_inv = sdof.t_star / (2.0 * std::f64::consts::PI);
    let d_e_star = se_t * omega_inv * omega_inv;
    let q_star = se_t * sdof.m_star / sdof.f_u_star;

    let (demand, regime) = if q_star <= 1.0 {
        (d_e_star, Regime::Elastic)
    } else if sdof.t_star >= spectrum.t_c {
        (d_e_star, Regime::EqualDisplacement)
    } else {
        let amplified =
            d_e_star / q_star * (1.0 + (q_star - 1.0) * spectrum.t_c / sdof.t_star);
        (amplified.max(d_e_star), Regime::InelasticShortPeriod)
    };

    let mut warnings = Vec::new();
    if q_star > 3.0 {
        warnings.push(format!(
            "strength ratio q* = {q_star:.3} exceeds 3; the demand formula is outside its usual range"
        ));
    }
    AssessmentResult {
        se_t,
        d_e_star,
        q_star,
        demand,
        safety_factor: sdof.d_u_star / demand,
        regime,
        warnings,
    }
}
