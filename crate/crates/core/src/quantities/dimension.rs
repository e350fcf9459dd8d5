use std::fmt;
use std::ops::{Div, Mul};

use num_rational::Rational64;
use num_traits::{One, Zero};
use serde::{Serialize, Serializer};

use super::QuantityError;

/// Largest exponent denominator accepted anywhere in the crate.
pub const MAX_DENOMINATOR: i64 = 12;

pub(crate) fn check_denominator(r: Rational64) -> Result<Rational64, QuantityError> {
    if *r.denom() > MAX_DENOMINATOR {
        Err(QuantityError::DenominatorTooLarge(r))
    } else {
        Ok(r)
    }
}

/// Exponents of mass, length, time and charge.
///
/// `Rational64` keeps every exponent in lowest terms, so structural equality
/// is dimensional equality.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct Dimension {
    pub mass_exp: Rational64,
    pub length_exp: Rational64,
    pub time_exp: Rational64,
    pub charge_exp: Rational64,
}

impl Dimension {
    pub const fn dimensionless() -> Self {
        Self::from_ints(0, 0, 0, 0)
    }

    pub const fn from_ints(mass: i64, length: i64, time: i64, charge: i64) -> Self {
        Self {
            mass_exp: Rational64::new_raw(mass, 1),
            length_exp: Rational64::new_raw(length, 1),
            time_exp: Rational64::new_raw(time, 1),
            charge_exp: Rational64::new_raw(charge, 1),
        }
    }

    pub const MASS: Self = Self::from_ints(1, 0, 0, 0);
    pub const LENGTH: Self = Self::from_ints(0, 1, 0, 0);
    pub const TIME: Self = Self::from_ints(0, 0, 1, 0);

    /// One statcoulomb in Gaussian units: g^1/2 cm^3/2 s^-1.
    pub fn esu() -> Self {
        Self {
            mass_exp: Rational64::new(1, 2),
            length_exp: Rational64::new(3, 2),
            time_exp: Rational64::from_integer(-1),
            charge_exp: Rational64::zero(),
        }
    }

    pub fn is_dimensionless(&self) -> bool {
        self.exponents().iter().all(|e| e.is_zero())
    }

    pub fn exponents(&self) -> [Rational64; 4] {
        [
            self.mass_exp,
            self.length_exp,
            self.time_exp,
            self.charge_exp,
        ]
    }

    pub fn pow(&self, r: Rational64) -> Result<Self, QuantityError> {
        let r = check_denominator(r)?;
        Ok(Self {
            mass_exp: check_denominator(self.mass_exp * r)?,
            length_exp: check_denominator(self.length_exp * r)?,
            time_exp: check_denominator(self.time_exp * r)?,
            charge_exp: check_denominator(self.charge_exp * r)?,
        })
    }

    pub fn inv(&self) -> Self {
        Self {
            mass_exp: -self.mass_exp,
            length_exp: -self.length_exp,
            time_exp: -self.time_exp,
            charge_exp: -self.charge_exp,
        }
    }
}

impl Mul for Dimension {
    type Output = Dimension;

    fn mul(self, rhs: Self) -> Self {
        Self {
            mass_exp: self.mass_exp + rhs.mass_exp,
            length_exp: self.length_exp + rhs.length_exp,
            time_exp: self.time_exp + rhs.time_exp,
            charge_exp: self.charge_exp + rhs.charge_exp,
        }
    }
}

impl Div for Dimension {
    type Output = Dimension;

    fn div(self, rhs: Self) -> Self {
        Dimension {
            mass_exp: self.mass_exp - rhs.mass_exp,
            length_exp: self.length_exp - rhs.length_exp,
            time_exp: self.time_exp - rhs.time_exp,
            charge_exp: self.charge_exp - rhs.charge_exp,
        }
    }
}

fn write_exp(f: &mut fmt::Formatter<'_>, unit: &str, e: Rational64) -> fmt::Result {
    if e.is_one() {
        write!(f, "{unit}")
    } else if e.is_integer() {
        write!(f, "{unit}^{}", e.numer())
    } else {
        write!(f, "{unit}^{}/{}", e.numer(), e.denom())
    }
}

/// Renders in the constants-file unit grammar, e.g. `g cm^2 s^-1`, or `1`.
impl fmt::Display for Dimension {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_dimensionless() {
            return write!(f, "1");
        }
        let parts = [
            ("g", self.mass_exp),
            ("cm", self.length_exp),
            ("s", self.time_exp),
            ("Q", self.charge_exp),
        ];
        let mut first = true;
        for (unit, e) in parts {
            if e.is_zero() {
                continue;
            }
            if !first {
                write!(f, " ")?;
            }
            first = false;
            write_exp(f, unit, e)?;
        }
        Ok(())
    }
}

impl Serialize for Dimension {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

/// Parses one unit expression: whitespace-separated `g`, `cm`, `s`, `esu`
/// tokens with optional `^<int>` or `^<int>/<int>`, or the single token `1`.
pub fn parse_unit_expr(text: &str) -> Result<Dimension, String> {
    let text = text.trim();
    if text.is_empty() {
        return Err("empty unit expression".into());
    }
    if text == "1" {
        return Ok(Dimension::dimensionless());
    }
    let mut dim = Dimension::dimensionless();
    for token in text.split_whitespace() {
        let (base, exp) = match token.split_once('^') {
            Some((b, e)) => (b, parse_rational(e)?),
            None => (token, Rational64::one()),
        };
        let unit = match base {
            "g" => Dimension::MASS,
            "cm" => Dimension::LENGTH,
            "s" => Dimension::TIME,
            "esu" => Dimension::esu(),
            other => return Err(format!("unknown unit token `{other}`")),
        };
        dim = dim * unit.pow(exp).map_err(|e| e.to_string())?;
    }
    Ok(dim)
}

/// `<int>` or `<int>/<int>`.
pub fn parse_rational(text: &str) -> Result<Rational64, String> {
    let bad = || format!("malformed exponent `{text}`");
    let parse_int = |s: &str| -> Result<i64, String> {
        if s.is_empty()
            || !s
                .trim_start_matches('-')
                .chars()
                .all(|c| c.is_ascii_digit())
        {
            return Err(bad());
        }
        s.parse::<i64>().map_err(|_| bad())
    };
    let r = match text.split_once('/') {
        Some((n, d)) => {
            let d = parse_int(d)?;
            if d <= 0 {
                return Err(bad());
            }
            Rational64::new(parse_int(n)?, d)
        }
        None => Rational64::from_integer(parse_int(text)?),
    };
    check_denominator(r).map_err(|e| e.to_string())
}

pub(crate) fn denom_is_odd(r: Rational64) -> bool {
    r.denom().abs() % 2 == 1
}

pub(crate) fn numer_is_odd(r: Rational64) -> bool {
    r.numer().abs() % 2 == 1
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_hbar_units() {
        let d = parse_unit_expr("g cm^2 s^-1").unwrap();
        assert_eq!(d, Dimension::from_ints(1, 2, -1, 0));
        assert_eq!(d.to_string(), "g cm^2 s^-1");
    }

    #[test]
    fn esu_squared_is_energy_times_length() {
        let e2 = parse_unit_expr("esu^2").unwrap();
        assert_eq!(e2, Dimension::from_ints(1, 3, -2, 0));
    }

    #[test]
    fn fractional_exponents_are_reduced() {
        let d = parse_unit_expr("cm^2/4").unwrap();
        assert_eq!(d.length_exp, Rational64::new(1, 2));
        assert_eq!(d.to_string(), "cm^1/2");
    }

    #[test]
    fn rejects_large_denominators_and_junk() {
        assert!(parse_unit_expr("cm^1/13").is_err());
        assert!(parse_unit_expr("m").is_err());
        assert!(parse_unit_expr("cm^x").is_err());
        assert!(parse_unit_expr("cm^1/0").is_err());
        assert!(parse_unit_expr("").is_err());
    }

    #[test]
    fn dimensionless_token() {
        assert!(parse_unit_expr("1").unwrap().is_dimensionless());
        assert_eq!(Dimension::dimensionless().to_string(), "1");
    }
}
