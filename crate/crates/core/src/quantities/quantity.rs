use std::fmt;

use num_rational::Rational64;
use serde::Serialize;

use super::dimension::{check_denominator, denom_is_odd, numer_is_odd, Dimension};
use super::QuantityError;

/// A finite magnitude in cgs-Gaussian units with its dimension.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Quantity {
    magnitude: f64,
    dim: Dimension,
}

impl Quantity {
    pub fn new(magnitude: f64, dim: Dimension) -> Result<Self, QuantityError> {
        if !magnitude.is_finite() {
            return Err(if magnitude.is_nan() {
                QuantityError::NotFinite
            } else {
                QuantityError::Overflow
            });
        }
        Ok(Self { magnitude, dim })
    }

    pub fn dimensionless(magnitude: f64) -> Result<Self, QuantityError> {
        Self::new(magnitude, Dimension::dimensionless())
    }

    pub fn magnitude(&self) -> f64 {
        self.magnitude
    }

    pub fn dim(&self) -> Dimension {
        self.dim
    }

    pub fn mul(&self, other: &Quantity) -> Result<Quantity, QuantityError> {
        Quantity::new(self.magnitude * other.magnitude, self.dim * other.dim)
    }

    pub fn div(&self, other: &Quantity) -> Result<Quantity, QuantityError> {
        if other.magnitude == 0.0 {
            return Err(QuantityError::DivisionByZero);
        }
        Quantity::new(self.magnitude / other.magnitude, self.dim / other.dim)
    }

    pub fn add(&self, other: &Quantity) -> Result<Quantity, QuantityError> {
        if self.dim != other.dim {
            return Err(QuantityError::DimensionMismatch {
                left: Box::new(self.dim),
                right: Box::new(other.dim),
            });
        }
        Quantity::new(self.magnitude + other.magnitude, self.dim)
    }

    pub fn sub(&self, other: &Quantity) -> Result<Quantity, QuantityError> {
        self.add(&other.scale(-1.0)?)
    }

    pub fn scale(&self, factor: f64) -> Result<Quantity, QuantityError> {
        Quantity::new(self.magnitude * factor, self.dim)
    }

    /// Raises to a rational power. A negative base needs an odd reduced
    /// denominator; the sign of the result then follows the numerator.
    pub fn pow(&self, r: Rational64) -> Result<Quantity, QuantityError> {
        let r = check_denominator(r)?;
        let dim = self.dim.pow(r)?;
        let x = self.magnitude;
        if x < 0.0 && !denom_is_odd(r) {
            return Err(QuantityError::NonReal);
        }
        if x == 0.0 && *r.numer() < 0 {
            return Err(QuantityError::DivisionByZero);
        }
        let abs = real_pow(x.abs(), r);
        let magnitude = if x < 0.0 && numer_is_odd(r) {
            -abs
        } else {
            abs
        };
        Quantity::new(magnitude, dim)
    }

    pub fn sqrt(&self) -> Result<Quantity, QuantityError> {
        self.pow(Rational64::new(1, 2))
    }
}

/// `x^r` for `x >= 0`, using the exact-when-possible std routines for the
/// common exponents.
fn real_pow(x: f64, r: Rational64) -> f64 {
    let (n, d) = (*r.numer(), *r.denom());
    let root = match d {
        1 => x,
        2 => x.sqrt(),
        3 => x.cbrt(),
        _ => return x.powf(n as f64 / d as f64),
    };
    match i32::try_from(n) {
        Ok(n) => root.powi(n),
        Err(_) => root.powf(n as f64),
    }
}

/// `|log10(|a| / |b|)|` for same-dimension, same-sign, nonzero quantities.
pub fn decade_gap(a: &Quantity, b: &Quantity) -> Result<f64, QuantityError> {
    if a.dim != b.dim {
        return Err(QuantityError::DimensionMismatch {
            left: Box::new(a.dim),
            right: Box::new(b.dim),
        });
    }
    magnitude_gap(a.magnitude, b.magnitude)
}

/// The decade gap between two bare magnitudes, ignoring dimension.
pub fn magnitude_gap(a: f64, b: f64) -> Result<f64, QuantityError> {
    if a == 0.0 || b == 0.0 || (a < 0.0) != (b < 0.0) {
        return Err(QuantityError::IncomparableSigns);
    }
    // log10 of each side separately keeps the ratio finite at extreme scales.
    Ok((a.abs().log10() - b.abs().log10()).abs())
}

impl fmt::Display for Quantity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.dim.is_dimensionless() {
            write!(f, "{:e}", self.magnitude)
        } else {
            write!(f, "{:e} {}", self.magnitude, self.dim)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantities::dimension::parse_unit_expr;

    fn q(m: f64, unit: &str) -> Quantity {
        Quantity::new(m, parse_unit_expr(unit).unwrap()).unwrap()
    }

    #[test]
    fn multiplies_lengths() {
        let a = q(3.0, "cm").mul(&q(2.0, "cm")).unwrap();
        assert_eq!(a.magnitude(), 6.0);
        assert_eq!(a.dim(), Dimension::from_ints(0, 2, 0, 0));
    }

    #[test]
    fn hbar_times_c() {
        let hc = q(1.0546e-27, "g cm^2 s^-1")
            .mul(&q(2.9979e10, "cm s^-1"))
            .unwrap();
        assert!((hc.magnitude() / 3.1615e-17 - 1.0).abs() < 1e-4);
        // erg cm
        assert_eq!(hc.dim(), Dimension::from_ints(1, 3, -2, 0));
    }

    #[test]
    fn identity_multiplication() {
        let x = q(7.5, "g s^-2");
        assert_eq!(x.mul(&Quantity::dimensionless(1.0).unwrap()).unwrap(), x);
    }

    #[test]
    fn overflow_is_an_error() {
        let big = q(1e200, "cm");
        assert_eq!(big.mul(&big), Err(QuantityError::Overflow));
        assert_eq!(QuantityError::Overflow.to_string(), "magnitude overflow");
        assert!(Quantity::new(f64::NAN, Dimension::dimensionless()).is_err());
    }

    #[test]
    fn powers() {
        let a = q(4.0, "cm^2").pow(Rational64::new(1, 2)).unwrap();
        assert_eq!(a, q(2.0, "cm"));
        let n = Quantity::dimensionless(1e80).unwrap().sqrt().unwrap();
        assert_eq!(n.magnitude(), 1e40);
        let c = q(-8.0, "cm^3").pow(Rational64::new(1, 3)).unwrap();
        assert_eq!(c, q(-2.0, "cm"));
        let sq = q(-8.0, "cm^3").pow(Rational64::new(2, 3)).unwrap();
        assert_eq!(sq.magnitude(), 4.0);
    }

    #[test]
    fn negative_base_even_root_is_non_real() {
        let err = q(-4.0, "cm^2").pow(Rational64::new(1, 2)).unwrap_err();
        assert_eq!(err, QuantityError::NonReal);
        assert_eq!(err.to_string(), "non-real result");
    }

    #[test]
    fn denominator_cap() {
        assert!(q(2.0, "cm").pow(Rational64::new(1, 12)).is_ok());
        assert!(matches!(
            q(2.0, "cm").pow(Rational64::new(1, 13)),
            Err(QuantityError::DenominatorTooLarge(_))
        ));
    }

    #[test]
    fn gaps() {
        let one = Quantity::dimensionless(1e40).unwrap();
        assert_eq!(decade_gap(&one, &one).unwrap(), 0.0);
        let g = decade_gap(&Quantity::dimensionless(5.6e37).unwrap(), &one).unwrap();
        assert!((g - 2.2518).abs() < 1e-3, "{g}");
        let g = decade_gap(&q(3.3e17, "s"), &q(4.3e17, "s")).unwrap();
        assert!((g - 0.115).abs() < 1e-3, "{g}");
    }

    #[test]
    fn gap_errors() {
        assert!(matches!(
            decade_gap(&q(1.0, "cm"), &q(1.0, "g")),
            Err(QuantityError::DimensionMismatch { .. })
        ));
        assert_eq!(
            decade_gap(&q(0.0, "cm"), &q(1.0, "cm")),
            Err(QuantityError::IncomparableSigns)
        );
        assert_eq!(
            decade_gap(&q(-1.0, "cm"), &q(1.0, "cm")),
            Err(QuantityError::IncomparableSigns)
        );
    }

    #[test]
    fn sums_need_equal_dims() {
        assert!(q(1.0, "cm").add(&q(1.0, "g")).is_err());
        assert_eq!(q(1.0, "cm").sub(&q(0.25, "cm")).unwrap(), q(0.75, "cm"));
    }
}
