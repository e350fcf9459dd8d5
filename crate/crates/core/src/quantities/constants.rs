use std::collections::HashMap;
use std::fmt::{self, Write as _};

use num_rational::Rational64;
use serde::Serialize;
use sha2::{Digest, Sha256};
use thiserror::Error;

use super::dimension::parse_unit_expr;
use super::quantity::{magnitude_gap, Quantity};
use super::QuantityError;
use crate::fields::{is_identifier, split_fields, unquote};

/// Shipped default constants file.
pub const DEFAULT_CONSTANTS: &str = include_str!("../../data/constants.txt");

pub const REQUIRED_KEYS: [&str; 20] = [
    "hbar",
    "c",
    "G",
    "e",
    "m_pi",
    "m_e",
    "m_p",
    "m_planck",
    "l_pi",
    "tau_pi",
    "R_obs",
    "T_obs",
    "H_obs",
    "rho_obs",
    "N",
    "N_nu",
    "m_nu",
    "rho_planck",
    "l_planck",
    "tau_planck",
];

/// Stated and recomputed derived values may differ by at most this many decades.
const DERIVED_TOLERANCE_DECADES: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Provenance {
    Measured,
    #[serde(rename = "paper")]
    Asserted,
    Derived,
}

impl Provenance {
    fn parse(s: &str) -> Option<Self> {
        match s {
            "measured" => Some(Self::Measured),
            "paper" => Some(Self::Asserted),
            "derived" => Some(Self::Derived),
            _ => None,
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            Self::Measured => "measured",
            Self::Asserted => "paper",
            Self::Derived => "derived",
        }
    }
}

impl fmt::Display for Provenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConstantEntry {
    pub name: String,
    pub value: Quantity,
    pub provenance: Provenance,
    pub note: String,
    /// Names this entry was recomputed from; empty unless derived.
    pub derived_from: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConstantsError {
    #[error("line {line}: {message}")]
    Malformed { line: usize, message: String },
    #[error("line {line}: duplicate key {name}")]
    Duplicate { line: usize, name: String },
    #[error("missing required key {0}")]
    MissingKey(String),
    #[error("derived entry {0} has no derivation rule")]
    NoRule(String),
    #[error("inconsistent constants file: {name} stated {stated}, recomputed {recomputed}")]
    Inconsistent {
        name: String,
        stated: String,
        recomputed: String,
    },
    #[error("derived entry {name}: {source}")]
    Arithmetic { name: String, source: QuantityError },
    #[error("unknown constant {0}")]
    UnknownKey(String),
}

/// A derived value is `coefficient * prod(dep ^ exponent)`.
struct Rule {
    name: &'static str,
    coefficient: f64,
    factors: &'static [(&'static str, i64, i64)],
}

const RULES: &[Rule] = &[
    Rule {
        name: "l_pi",
        coefficient: 1.0,
        factors: &[("hbar", 1, 1), ("m_pi", -1, 1), ("c", -1, 1)],
    },
    Rule {
        name: "tau_pi",
        coefficient: 1.0,
        factors: &[("l_pi", 1, 1), ("c", -1, 1)],
    },
    Rule {
        name: "m_planck",
        coefficient: 1.0,
        factors: &[("hbar", 1, 2), ("c", 1, 2), ("G", -1, 2)],
    },
    Rule {
        name: "l_planck",
        coefficient: 1.0,
        factors: &[("hbar", 1, 2), ("G", 1, 2), ("c", -3, 2)],
    },
    Rule {
        name: "tau_planck",
        coefficient: 1.0,
        factors: &[("l_planck", 1, 1), ("c", -1, 1)],
    },
    Rule {
        name: "rho_planck",
        coefficient: 1.0,
        factors: &[("m_planck", 1, 1), ("l_planck", -3, 1)],
    },
    Rule {
        name: "m_nu",
        coefficient: 1e-8,
        factors: &[("m_e", 1, 1)],
    },
    Rule {
        name: "m_w",
        coefficient: 100.0,
        factors: &[("m_p", 1, 1)],
    },
    Rule {
        name: "l_w",
        coefficient: 1.0,
        factors: &[("hbar", 1, 1), ("m_w", -1, 1), ("c", -1, 1)],
    },
];

fn rule_for(name: &str) -> Option<&'static Rule> {
    RULES.iter().find(|r| r.name == name)
}

/// Named constants in file order, plus the content hash of their source.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConstantsTable {
    entries: Vec<ConstantEntry>,
    fingerprint: String,
}

impl ConstantsTable {
    /// The shipped default table.
    pub fn builtin() -> Self {
        parse_constants(DEFAULT_CONSTANTS.as_bytes()).expect("shipped constants file is valid")
    }

    pub fn entries(&self) -> &[ConstantEntry] {
        &self.entries
    }

    pub fn get(&self, name: &str) -> Option<&ConstantEntry> {
        self.entries.iter().find(|e| e.name == name)
    }

    pub fn value(&self, name: &str) -> Option<Quantity> {
        self.get(name).map(|e| e.value)
    }

    /// Magnitude of `name`, for callers that already know its dimension.
    pub fn magnitude(&self, name: &str) -> Result<f64, ConstantsError> {
        self.value(name)
            .map(|q| q.magnitude())
            .ok_or_else(|| ConstantsError::UnknownKey(name.to_string()))
    }

    /// SHA-256 of the text this table was parsed from, as lowercase hex.
    pub fn fingerprint(&self) -> &str {
        &self.fingerprint
    }

    /// A copy with one entry's value replaced. Dependent derived entries are
    /// not recomputed.
    pub fn with_value(&self, name: &str, value: Quantity) -> Result<Self, ConstantsError> {
        let mut out = self.clone();
        let entry = out
            .entries
            .iter_mut()
            .find(|e| e.name == name)
            .ok_or_else(|| ConstantsError::UnknownKey(name.to_string()))?;
        entry.value = value;
        Ok(out)
    }

    /// A copy with one entry multiplied by `factor`.
    pub fn scaled(&self, name: &str, factor: f64) -> Result<Self, ConstantsError> {
        let current = self
            .value(name)
            .ok_or_else(|| ConstantsError::UnknownKey(name.to_string()))?;
        let scaled = current
            .scale(factor)
            .map_err(|source| ConstantsError::Arithmetic {
                name: name.to_string(),
                source,
            })?;
        self.with_value(name, scaled)
    }

    /// Renders the table in the constants-file grammar.
    pub fn serialize(&self) -> String {
        let mut out = String::new();
        for e in &self.entries {
            let _ = write!(
                out,
                "{} = {:e} {} ; provenance={}",
                e.name,
                e.value.magnitude(),
                e.value.dim(),
                e.provenance
            );
            if !e.note.is_empty() {
                let _ = write!(out, " ; note=\"{}\"", e.note);
            }
            out.push('\n');
        }
        out
    }
}

pub(crate) fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes)
        .iter()
        .fold(String::with_capacity(64), |mut s, b| {
            let _ = write!(s, "{b:02x}");
            s
        })
}

struct RawEntry {
    line: usize,
    name: String,
    value: Quantity,
    provenance: Provenance,
    note: String,
}

fn parse_line(line_no: usize, line: &str) -> Result<RawEntry, ConstantsError> {
    let malformed = |message: String| ConstantsError::Malformed {
        line: line_no,
        message,
    };
    let fields = split_fields(line);
    let (name, rest) = fields[0]
        .split_once('=')
        .ok_or_else(|| malformed("expected `name = value unit`".into()))?;
    let name = name.trim();
    if !is_identifier(name) {
        return Err(malformed(format!("invalid name `{name}`")));
    }
    let rest = rest.trim();
    let (number, unit) = rest
        .split_once(char::is_whitespace)
        .ok_or_else(|| malformed("expected a value followed by a unit expression".into()))?;
    let magnitude: f64 = number
        .parse()
        .ok()
        .filter(|m: &f64| m.is_finite() && number.chars().all(|c| "0123456789+-.eE".contains(c)))
        .ok_or_else(|| malformed(format!("invalid number `{number}`")))?;
    let dim = parse_unit_expr(unit).map_err(malformed)?;
    let value = Quantity::new(magnitude, dim).map_err(|e| malformed(e.to_string()))?;

    let mut provenance = None;
    let mut note = String::new();
    for field in &fields[1..] {
        let (key, val) = field
            .split_once('=')
            .ok_or_else(|| malformed(format!("expected key=value, got `{}`", field.trim())))?;
        match key.trim() {
            "provenance" => {
                provenance = Some(
                    Provenance::parse(val.trim())
                        .ok_or_else(|| malformed(format!("unknown provenance `{}`", val.trim())))?,
                )
            }
            "note" => {
                note = unquote(val)
                    .ok_or_else(|| malformed("note must be a double-quoted string".into()))?
                    .to_string()
            }
            other => return Err(malformed(format!("unknown field `{other}`"))),
        }
    }
    Ok(RawEntry {
        line: line_no,
        name: name.to_string(),
        value,
        provenance: provenance.ok_or_else(|| malformed("missing provenance".into()))?,
        note,
    })
}

fn recompute(
    name: &str,
    raw: &HashMap<&str, &RawEntry>,
    done: &mut HashMap<String, Quantity>,
    stack: &mut Vec<String>,
) -> Result<Quantity, ConstantsError> {
    if let Some(q) = done.get(name) {
        return Ok(*q);
    }
    let entry = raw
        .get(name)
        .ok_or_else(|| ConstantsError::MissingKey(name.to_string()))?;
    if entry.provenance != Provenance::Derived {
        done.insert(name.to_string(), entry.value);
        return Ok(entry.value);
    }
    if stack.iter().any(|s| s == name) {
        return Err(ConstantsError::Malformed {
            line: entry.line,
            message: format!("derivation cycle through {name}"),
        });
    }
    let rule = rule_for(name).ok_or_else(|| ConstantsError::NoRule(name.to_string()))?;
    stack.push(name.to_string());
    let arith = |source| ConstantsError::Arithmetic {
        name: name.to_string(),
        source,
    };
    let mut acc = Quantity::dimensionless(rule.coefficient).map_err(arith)?;
    for &(dep, n, d) in rule.factors {
        let q = recompute(dep, raw, done, stack)?;
        acc = acc
            .mul(&q.pow(Rational64::new(n, d)).map_err(arith)?)
            .map_err(arith)?;
    }
    stack.pop();

    let inconsistent = || ConstantsError::Inconsistent {
        name: name.to_string(),
        stated: entry.value.to_string(),
        recomputed: acc.to_string(),
    };
    if acc.dim() != entry.value.dim() {
        return Err(inconsistent());
    }
    match magnitude_gap(acc.magnitude(), entry.value.magnitude()) {
        Ok(gap) if gap <= DERIVED_TOLERANCE_DECADES => {}
        _ => return Err(inconsistent()),
    }
    done.insert(name.to_string(), acc);
    Ok(acc)
}

/// Parses a constants file. Derived entries are replaced by their
/// recomputed values.
pub fn parse_constants(bytes: &[u8]) -> Result<ConstantsTable, ConstantsError> {
    let text = std::str::from_utf8(bytes).map_err(|e| ConstantsError::Malformed {
        line: 0,
        message: format!("not UTF-8: {e}"),
    })?;
    let mut raw: Vec<RawEntry> = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let entry = parse_line(i + 1, trimmed)?;
        if raw.iter().any(|r| r.name == entry.name) {
            return Err(ConstantsError::Duplicate {
                line: i + 1,
                name: entry.name,
            });
        }
        raw.push(entry);
    }
    if let Some(missing) = REQUIRED_KEYS
        .iter()
        .find(|k| !raw.iter().any(|r| r.name == **k))
    {
        return Err(ConstantsError::MissingKey(missing.to_string()));
    }

    let index: HashMap<&str, &RawEntry> = raw.iter().map(|r| (r.name.as_str(), r)).collect();
    let mut done = HashMap::new();
    let mut entries = Vec::with_capacity(raw.len());
    for r in &raw {
        let value = recompute(&r.name, &index, &mut done, &mut Vec::new())?;
        let derived_from = match r.provenance {
            Provenance::Derived => rule_for(&r.name)
                .map(|rule| rule.factors.iter().map(|f| f.0.to_string()).collect())
                .unwrap_or_default(),
            _ => Vec::new(),
        };
        entries.push(ConstantEntry {
            name: r.name.clone(),
            value,
            provenance: r.provenance,
            note: r.note.clone(),
            derived_from,
        });
    }
    Ok(ConstantsTable {
        entries,
        fingerprint: sha256_hex(bytes),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantities::Dimension;

    fn without(key: &str) -> String {
        DEFAULT_CONSTANTS
            .lines()
            .filter(|l| !l.starts_with(&format!("{key} =")))
            .collect::<Vec<_>>()
            .join("\n")
    }

    #[test]
    fn builtin_has_required_keys() {
        let t = ConstantsTable::builtin();
        for k in REQUIRED_KEYS {
            assert!(t.get(k).is_some(), "{k}");
        }
        assert_eq!(t.fingerprint().len(), 64);
    }

    #[test]
    fn pion_mass_is_a_mass() {
        let t = ConstantsTable::builtin();
        let m = t.value("m_pi").unwrap();
        assert_eq!(m.dim(), Dimension::MASS);
        assert!((m.magnitude() / 2.488e-25 - 1.0).abs() < 1e-3);
    }

    #[test]
    fn derived_entries_are_recomputed() {
        let t = ConstantsTable::builtin();
        let l = t.get("l_pi").unwrap();
        let expect = 1.054571817e-27 / (2.488068e-25 * 2.99792458e10);
        assert!((l.value.magnitude() / expect - 1.0).abs() < 1e-15);
        assert_eq!(l.derived_from, ["hbar", "m_pi", "c"]);
        let tau = t.value("tau_pi").unwrap();
        assert_eq!(tau.dim(), Dimension::TIME);
        assert!((tau.magnitude() / (expect / 2.99792458e10) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn missing_hbar() {
        let err = parse_constants(without("hbar").as_bytes()).unwrap_err();
        assert_eq!(err.to_string(), "missing required key hbar");
    }

    #[test]
    fn inconsistent_compton_wavelength() {
        let text = DEFAULT_CONSTANTS.replace("l_pi = 1.4138e-13 cm", "l_pi = 1.0 cm");
        let err = parse_constants(text.as_bytes()).unwrap_err();
        assert!(
            err.to_string().starts_with("inconsistent constants file"),
            "{err}"
        );
    }

    #[test]
    fn derived_unit_must_match_rule() {
        let text = DEFAULT_CONSTANTS.replace("l_pi = 1.4138e-13 cm", "l_pi = 1.4138e-13 s");
        assert!(matches!(
            parse_constants(text.as_bytes()),
            Err(ConstantsError::Inconsistent { .. })
        ));
    }

    #[test]
    fn malformed_line_reports_line_number() {
        let text = "# header\nhbar = oops g ; provenance=measured\n";
        match parse_constants(text.as_bytes()) {
            Err(ConstantsError::Malformed { line, .. }) => assert_eq!(line, 2),
            other => panic!("{other:?}"),
        }
        let text = format!("{DEFAULT_CONSTANTS}\nx = 1 cm ; provenance=guessed\n");
        assert!(matches!(
            parse_constants(text.as_bytes()),
            Err(ConstantsError::Malformed { .. })
        ));
    }

    #[test]
    fn rejects_duplicates_and_unruled_derivations() {
        let text = format!("{DEFAULT_CONSTANTS}\nc = 3e10 cm s^-1 ; provenance=measured\n");
        assert!(matches!(
            parse_constants(text.as_bytes()),
            Err(ConstantsError::Duplicate { .. })
        ));
        let text = format!("{DEFAULT_CONSTANTS}\nfoo = 1 cm ; provenance=derived\n");
        assert_eq!(
            parse_constants(text.as_bytes()).unwrap_err(),
            ConstantsError::NoRule("foo".into())
        );
    }

    #[test]
    fn locale_style_decimal_comma_is_rejected() {
        let text = DEFAULT_CONSTANTS.replace("c = 2.99792458e10", "c = 2,99792458e10");
        assert!(matches!(
            parse_constants(text.as_bytes()),
            Err(ConstantsError::Malformed { .. })
        ));
    }

    #[test]
    fn notes_may_contain_semicolons() {
        let text = DEFAULT_CONSTANTS.replace("note=\"speed of light\"", "note=\"c; exact\"");
        let t = parse_constants(text.as_bytes()).unwrap();
        assert_eq!(t.get("c").unwrap().note, "c; exact");
    }

    #[test]
    fn serialized_table_reparses_equal() {
        let t = ConstantsTable::builtin();
        let again = parse_constants(t.serialize().as_bytes()).unwrap();
        assert_eq!(t.entries(), again.entries());
    }

    #[test]
    fn scaled_copy() {
        let t = ConstantsTable::builtin();
        let s = t.scaled("N", 10.0).unwrap();
        assert_eq!(s.magnitude("N").unwrap(), 1e81);
        assert_eq!(t.magnitude("N").unwrap(), 1e80);
        assert!(t.scaled("nope", 2.0).is_err());
    }
}
