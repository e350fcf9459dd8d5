//! Quark-sector and weak-sector consequences: the confining potential,
//! fractional charges, the quark mass estimate and the weak couplings.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use num_rational::Rational64;
use serde::Serialize;
use thiserror::Error;

use crate::quantities::{ConstantsError, ConstantsTable};
use crate::relations::{run_registry, CheckResult, RelationError};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ParticleError {
    #[error("potential parameters must be positive")]
    BadParams,
    #[error("radius must be positive")]
    NonPositiveRadius,
    #[error("length must be positive")]
    NonPositiveLength,
    #[error("charge dimensions must be 1, 2 or 3, got {0}")]
    DimsOutOfRange(i64),
    #[error("missing or zero N_nu")]
    MissingNeutrinoNumber,
    #[error(transparent)]
    Constants(#[from] ConstantsError),
    #[error(transparent)]
    Relations(#[from] RelationError),
}

/// `V(r) = −α/r + β r` in natural units where mass, inverse length and
/// energy share one unit, `mass_scale · c²` in cgs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PotentialParams {
    pub alpha: f64,
    pub beta: f64,
    /// g
    pub mass_scale: f64,
}

impl PotentialParams {
    pub fn new(alpha: f64, beta: f64, mass_scale: f64) -> Result<Self, ParticleError> {
        if alpha > 0.0 && beta > 0.0 && mass_scale > 0.0 && (alpha * beta * mass_scale).is_finite()
        {
            Ok(Self {
                alpha,
                beta,
                mass_scale,
            })
        } else {
            Err(ParticleError::BadParams)
        }
    }

    /// α = 1, β = m² with m = 1 in units of the pion mass.
    pub fn pion_defaults(table: &ConstantsTable) -> Result<Self, ParticleError> {
        Self::new(1.0, 1.0, table.magnitude("m_pi")?)
    }
}

/// Natural-unit potential.
pub fn qcd_potential(r: f64, p: &PotentialParams) -> Result<f64, ParticleError> {
    if r.is_nan() || r <= 0.0 {
        return Err(ParticleError::NonPositiveRadius);
    }
    Ok(-p.alpha / r + p.beta * r)
}

/// The potential converted to erg via `mass_scale · c²`.
pub fn qcd_potential_cgs(r: f64, p: &PotentialParams, c: f64) -> Result<f64, ParticleError> {
    Ok(qcd_potential(r, p)? * p.mass_scale * c * c)
}

/// Where the Coulomb and confining terms cancel: `√(α/β)`.
pub fn crossover_radius(p: &PotentialParams) -> f64 {
    (p.alpha / p.beta).sqrt()
}

/// `r, V_natural, V_cgs` over `points` log-spaced radii in `[r_min, r_max]`.
pub fn potential_table_csv(
    p: &PotentialParams,
    c: f64,
    r_min: f64,
    r_max: f64,
    points: usize,
) -> Result<String, ParticleError> {
    if !(r_min > 0.0 && r_max >= r_min) {
        return Err(ParticleError::NonPositiveRadius);
    }
    let mut out = String::from("r,V_natural,V_cgs\n");
    let points = points.max(2);
    let ratio = (r_max / r_min).ln();
    for k in 0..points {
        let r = if k + 1 == points {
            r_max
        } else {
            r_min * (ratio * k as f64 / (points - 1) as f64).exp()
        };
        let _ = writeln!(
            out,
            "{:e},{:e},{:e}",
            r,
            qcd_potential(r, p)?,
            qcd_potential_cgs(r, p, c)?
        );
    }
    Ok(out)
}

/// The charge seen in `dims` of the three spatial directions, as a fraction
/// of e.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ChargeFraction {
    pub dims: i64,
    #[serde(serialize_with = "ser_ratio")]
    pub fraction: Rational64,
}

fn ser_ratio<S: serde::Serializer>(r: &Rational64, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&r.to_string())
}

pub fn charge_fraction(dims: i64) -> Result<ChargeFraction, ParticleError> {
    if !(1..=3).contains(&dims) {
        return Err(ParticleError::DimsOutOfRange(dims));
    }
    Ok(ChargeFraction {
        dims,
        fraction: Rational64::new(dims, 3),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QuarkMassEstimate {
    /// g
    pub mass: f64,
    /// e²/(ħc)/9
    pub alpha_over_nine: f64,
    pub ratio_to_electron: f64,
}

pub const QUARK_TO_ELECTRON: f64 = 1e3;

/// `10³ m_e`, with the fine-structure constant over nine alongside.
pub fn quark_mass_estimate(table: &ConstantsTable) -> Result<QuarkMassEstimate, ParticleError> {
    let m_e = table.magnitude("m_e")?;
    let e = table.magnitude("e")?;
    let hbar = table.magnitude("hbar")?;
    let c = table.magnitude("c")?;
    Ok(QuarkMassEstimate {
        mass: QUARK_TO_ELECTRON * m_e,
        alpha_over_nine: e * e / (hbar * c) / 9.0,
        ratio_to_electron: QUARK_TO_ELECTRON,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WeakCouplingRecord {
    /// g2 / m_w², g⁻²
    pub fermi_coupling: f64,
    /// g² l_w² implied by the neutrino balance
    pub g2_lw2: f64,
    pub results: Vec<CheckResult>,
}

pub const WEAK_RELATIONS: [&str; 3] = ["E21", "E35", "E35b"];

/// The weak relations as the registry evaluates them.
pub fn weak_coupling_check(table: &ConstantsTable) -> Result<WeakCouplingRecord, ParticleError> {
    match table.magnitude("N_nu") {
        Ok(n) if n != 0.0 => {}
        _ => return Err(ParticleError::MissingNeutrinoNumber),
    }
    for key in ["g2", "m_w", "l_w", "m_nu"] {
        table.magnitude(key)?;
    }
    let ids: Vec<String> = WEAK_RELATIONS.iter().map(|s| s.to_string()).collect();
    let report = run_registry(table, Some(&ids), &BTreeMap::new())?;
    let value = |id: &str| {
        report
            .result(id)
            .and_then(|r| r.lhs_value)
            .map(|q| q.magnitude())
            .unwrap_or(f64::NAN)
    };
    Ok(WeakCouplingRecord {
        fermi_coupling: value("E21"),
        g2_lw2: value("E35b"),
        results: report.results,
    })
}

/// Fluctuation energy of a region of size `l`: `ħc/l`.
pub fn zpf_energy(l: f64, table: &ConstantsTable) -> Result<f64, ParticleError> {
    if l.is_nan() || l <= 0.0 {
        return Err(ParticleError::NonPositiveLength);
    }
    Ok(table.magnitude("hbar")? * table.magnitude("c")? / l)
}
