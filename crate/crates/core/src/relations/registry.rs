use std::collections::BTreeMap;
use std::fmt::{self, Write as _};
use std::sync::LazyLock;

use rayon::prelude::*;
use serde::Serialize;

use super::expr::{parse_expression, Expression};
use super::report::{Report, Summary};
use super::RelationError;
use crate::fields::{split_fields, unquote};
use crate::quantities::{magnitude_gap, ConstantsTable, Quantity};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum DimensionPolicy {
    Strict,
    Waived,
}

impl fmt::Display for DimensionPolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Strict => "strict",
            Self::Waived => "waived",
        })
    }
}

/// A declarative order-of-magnitude claim `lhs ~ rhs`.
#[derive(Debug, Clone, PartialEq)]
pub struct Relation {
    pub id: String,
    pub description: String,
    pub lhs: Expression,
    pub rhs: Expression,
    pub tolerance_decades: f64,
    pub dimension_policy: DimensionPolicy,
    pub waiver_note: String,
    pub reference: String,
}

impl Relation {
    pub fn validate(&self) -> Result<(), String> {
        if self.id.is_empty()
            || !self
                .id
                .chars()
                .all(|c| c.is_ascii_alphanumeric() || c == '_')
        {
            return Err(format!("invalid relation id `{}`", self.id));
        }
        if !(self.tolerance_decades >= 0.0 && self.tolerance_decades.is_finite()) {
            return Err(format!(
                "{}: tolerance must be a non-negative number",
                self.id
            ));
        }
        if self.dimension_policy == DimensionPolicy::Waived && self.waiver_note.trim().is_empty() {
            return Err(format!("{}: waived relation needs a note", self.id));
        }
        Ok(())
    }

    /// One line of the relation-file grammar.
    pub fn to_line(&self) -> String {
        let mut s = format!(
            "{}: {} ~ {} ; tol={} ; dim={} ; ref=\"{}\"",
            self.id,
            self.lhs,
            self.rhs,
            self.tolerance_decades,
            self.dimension_policy,
            self.reference
        );
        if !self.waiver_note.is_empty() {
            let _ = write!(s, " ; note=\"{}\"", self.waiver_note);
        }
        if !self.description.is_empty() {
            let _ = write!(s, " ; desc=\"{}\"", self.description);
        }
        s
    }
}

/// Parses `id: <lhs> ~ <rhs> ; tol=<real> ; dim=<strict|waived> ; ref="..."`,
/// with optional `note="..."` (the waiver note) and `desc="..."`.
pub fn parse_relation_line(line: &str) -> Result<Relation, String> {
    let fields = split_fields(line);
    let (id, body) = fields[0]
        .split_once(':')
        .ok_or("expected `id: lhs ~ rhs`")?;
    let (lhs, rhs) = body.split_once('~').ok_or("expected `lhs ~ rhs`")?;
    let lhs = parse_expression(lhs).map_err(|e| format!("lhs: {e}"))?;
    let rhs = parse_expression(rhs).map_err(|e| format!("rhs: {e}"))?;

    let mut tol = None;
    let mut policy = None;
    let mut reference = None;
    let mut note = String::new();
    let mut desc = String::new();
    for field in &fields[1..] {
        let (key, val) = field
            .split_once('=')
            .ok_or_else(|| format!("expected key=value, got `{}`", field.trim()))?;
        let quoted = || {
            unquote(val)
                .map(str::to_string)
                .ok_or_else(|| format!("{} must be a double-quoted string", key.trim()))
        };
        match key.trim() {
            "tol" => {
                tol = Some(
                    val.trim()
                        .parse::<f64>()
                        .map_err(|_| format!("invalid tolerance `{}`", val.trim()))?,
                )
            }
            "dim" => {
                policy = Some(match val.trim() {
                    "strict" => DimensionPolicy::Strict,
                    "waived" => DimensionPolicy::Waived,
                    other => return Err(format!("unknown dimension policy `{other}`")),
                })
            }
            "ref" => reference = Some(quoted()?),
            "note" => note = quoted()?,
            "desc" => desc = quoted()?,
            other => return Err(format!("unknown field `{other}`")),
        }
    }
    let relation = Relation {
        id: id.trim().to_string(),
        description: desc,
        lhs,
        rhs,
        tolerance_decades: tol.ok_or("missing tol")?,
        dimension_policy: policy.ok_or("missing dim")?,
        waiver_note: note,
        reference: reference.ok_or("missing ref")?,
    };
    relation.validate()?;
    Ok(relation)
}

/// Parses a whole relation file; `#` comments and blank lines are skipped.
pub fn parse_relation_file(text: &str) -> Result<Vec<Relation>, RelationError> {
    let mut out: Vec<Relation> = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let r = parse_relation_line(line).map_err(|message| RelationError::Parse {
            line: i + 1,
            message,
        })?;
        if out.iter().any(|o| o.id == r.id) {
            return Err(RelationError::Parse {
                line: i + 1,
                message: format!("duplicate relation id {}", r.id),
            });
        }
        out.push(r);
    }
    Ok(out)
}

const BUILTIN: &str = r#"
E1: R_obs ~ l_pi * sqrt(N) ; tol=1.5 ; dim=strict ; ref="random-walk radius" ; desc="R = l sqrt(N)"
E2: T_obs ~ tau_pi * sqrt(N) ; tol=1.0 ; dim=strict ; ref="age from the pion Compton time" ; desc="T = tau sqrt(N)"
E3: rho_obs * R_obs^3 ~ N * m_pi ; tol=2.5 ; dim=strict ; ref="mass of the universe" ; desc="M = N m"
E17: e^2 / (G * m_pi^2) ~ 1e40 ; tol=3.0 ; dim=strict ; ref="electromagnetic to gravitational strength" ; desc="e^2/(G m^2) ~ 1e40"
E21: g2 / m_w^2 ~ 1e-5 / m_p^2 ; tol=2.0 ; dim=waived ; ref="Fermi weak coupling" ; note="g2 taken as a pure number and the stated unit gm^-2 accepted as written" ; desc="G_w = g^2/m_w^2 ~ 1e-5/m_p^2"
E22: R_obs ~ G * N * m_pi / c^2 ; tol=1.5 ; dim=strict ; ref="gravitational energy against pion rest energy" ; desc="R = G M/c^2"
E26: H_obs ~ G * m_pi^3 * c / (2 * hbar^2) ; tol=1.5 ; dim=strict ; ref="Weinberg pion-mass formula" ; desc="H = G m^3 c/(2 hbar^2)"
E28: R_obs ~ sqrt(N) * l_pi ; tol=1.5 ; dim=strict ; ref="electrostatic fluctuation balance" ; desc="R = sqrt(N) l"
E29: sqrt(N) ~ e^2 / (G * m_pi^2) ; tol=3.0 ; dim=strict ; ref="large-number coincidence" ; desc="sqrt(N) = e^2/(G m^2)"
E30: G * m_pi / (l_pi * c^2) ~ 1 / sqrt(N) ; tol=1.5 ; dim=strict ; ref="gravitational constant from particle number" ; desc="G m/(l c^2) = 1/sqrt(N)"
E32: H_obs ~ c / (l_pi * sqrt(N)) ; tol=1.5 ; dim=strict ; ref="Hubble constant from particle number" ; desc="H = c/(l sqrt(N))"
E33: m_pi / l_pi^3 / sqrt(N) ~ rho_obs ; tol=3.0 ; dim=strict ; ref="density law" ; desc="rho = (m/l^3)/sqrt(N)"
E34: rho_planck * l_pi^3 ~ N * m_pi ; tol=2.5 ; dim=strict ; ref="Planck density coincidence" ; desc="rho_P l^3 = M"
P1: rho_planck * l_pi^3 / m_planck ~ 1e60 ; tol=1.0 ; dim=strict ; ref="Planck masses in a Compton volume" ; desc="N' = rho_P l^3/m_P ~ 1e60"
P2: tau_pi / tau_planck ~ 1e20 ; tol=1.0 ; dim=strict ; ref="Planck lifetimes per Compton time" ; desc="tau/tau_P ~ 1e20"
P3: rho_planck * l_pi^3 / m_planck * (tau_pi / tau_planck) ~ 1e80 ; tol=1.0 ; dim=strict ; ref="total particle number from Planck counting" ; desc="N' tau/tau_P ~ 1e80"
E35: g2 * sqrt(N_nu) * l_w^2 ~ m_nu * c^2 ; tol=1.5 ; dim=waived ; ref="neutrino fluctuation balance" ; note="implemented as printed; g2 l_w^2 carries cm^2 against an energy" ; desc="g^2 sqrt(N_nu) l_w^2 = m_nu c^2"
E35b: m_nu * c^2 / sqrt(N_nu) ~ 1e-59 ; tol=1.5 ; dim=waived ; ref="weak coupling implied by the neutrino balance" ; note="g2 l_w^2 as deduced from the neutrino balance, an energy compared against a bare number" ; desc="g^2 l_w^2 = m_nu c^2/sqrt(N_nu) ~ 1e-59"
Z1: (hbar * c / l_pi^4) * l_pi^3 ~ m_pi * c^2 ; tol=0.5 ; dim=strict ; ref="zero-point fluctuation energy" ; desc="(hbar c/l^4) l^3 = m c^2"
QM: 9 * hbar * c / e^2 ~ 1e3 ; tol=1.0 ; dim=strict ; ref="quark mass from charge dilution" ; desc="m_quark/m_e = 9/alpha ~ 1e3"
RCT: R_obs ~ c * T_obs ; tol=1.0 ; dim=strict ; ref="emergence of R = cT" ; desc="R = c T"
"#;

static REGISTRY: LazyLock<Vec<Relation>> =
    LazyLock::new(|| parse_relation_file(BUILTIN).expect("builtin registry parses"));

/// The fixed set of relations, in report order.
pub fn builtin_registry() -> Vec<Relation> {
    REGISTRY.clone()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckResult {
    pub id: String,
    pub description: String,
    pub lhs_value: Option<Quantity>,
    pub rhs_value: Option<Quantity>,
    pub gap_decades: Option<f64>,
    pub tolerance_decades: f64,
    pub dimension_policy: DimensionPolicy,
    pub dimension_ok: bool,
    pub passed: bool,
    pub notes: String,
}

/// Evaluates both sides and applies the policy and tolerance. Evaluation
/// errors become a failed result; nothing here aborts a run.
pub fn check_relation(r: &Relation, table: &ConstantsTable) -> CheckResult {
    let mut result = CheckResult {
        id: r.id.clone(),
        description: r.description.clone(),
        lhs_value: None,
        rhs_value: None,
        gap_decades: None,
        tolerance_decades: r.tolerance_decades,
        dimension_policy: r.dimension_policy,
        dimension_ok: false,
        passed: false,
        notes: String::new(),
    };
    let (lhs, rhs) = match (r.lhs.eval(table), r.rhs.eval(table)) {
        (Ok(l), Ok(rh)) => (l, rh),
        (Err(e), _) | (_, Err(e)) => {
            result.notes = e.to_string();
            return result;
        }
    };
    result.lhs_value = Some(lhs);
    result.rhs_value = Some(rhs);
    result.dimension_ok = lhs.dim() == rhs.dim();

    let gap = match magnitude_gap(lhs.magnitude(), rhs.magnitude()) {
        Ok(g) => g,
        Err(e) => {
            result.notes = e.to_string();
            return result;
        }
    };
    result.gap_decades = Some(gap);
    let dims_acceptable = result.dimension_ok || r.dimension_policy == DimensionPolicy::Waived;
    result.passed = dims_acceptable && gap <= r.tolerance_decades;
    result.notes = match (r.dimension_policy, result.dimension_ok) {
        (DimensionPolicy::Waived, _) => format!("waived: {}", r.waiver_note),
        (DimensionPolicy::Strict, false) => {
            format!("dimension mismatch: {} vs {}", lhs.dim(), rhs.dim())
        }
        (DimensionPolicy::Strict, true) => String::new(),
    };
    result
}

/// Runs `relations` (optionally filtered, with tolerance overrides) against
/// `table`. Results keep the input order.
pub fn run_relations(
    relations: &[Relation],
    table: &ConstantsTable,
    filter: Option<&[String]>,
    overrides: &BTreeMap<String, f64>,
) -> Result<Report, RelationError> {
    let known = |id: &str| relations.iter().any(|r| r.id == id);
    if let Some(ids) = filter {
        if let Some(bad) = ids.iter().find(|id| !known(id)) {
            return Err(RelationError::UnknownId(bad.clone()));
        }
    }
    if let Some(bad) = overrides.keys().find(|id| !known(id)) {
        return Err(RelationError::UnknownId(bad.clone()));
    }
    if let Some((id, _)) = overrides
        .iter()
        .find(|(_, t)| !(**t >= 0.0 && t.is_finite()))
    {
        return Err(RelationError::BadTolerance(id.clone()));
    }

    let selected: Vec<Relation> = relations
        .iter()
        .filter(|r| filter.is_none_or(|ids| ids.contains(&r.id)))
        .map(|r| {
            let mut r = r.clone();
            if let Some(t) = overrides.get(&r.id) {
                r.tolerance_decades = *t;
            }
            r
        })
        .collect();
    let results: Vec<CheckResult> = selected
        .par_iter()
        .map(|r| check_relation(r, table))
        .collect();
    Ok(Report {
        timestamp: chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true),
        constants_fingerprint: table.fingerprint().to_string(),
        summary: Summary::tally(&results),
        results,
    })
}

pub fn run_registry(
    table: &ConstantsTable,
    filter: Option<&[String]>,
    overrides: &BTreeMap<String, f64>,
) -> Result<Report, RelationError> {
    run_relations(&REGISTRY, table, filter, overrides)
}
