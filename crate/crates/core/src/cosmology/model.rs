use serde::Serialize;

use super::CosmologyError;
use crate::quantities::ConstantsTable;

/// `dN/dt = √N / τ`.
pub fn creation_rate(n: f64, tau: f64) -> f64 {
    n.max(0.0).sqrt() / tau
}

/// Exact integral of the creation law: `(√N0 + t/(2τ))²`.
pub fn closed_form_n(t: f64, n0: f64, tau: f64) -> f64 {
    let x = t / (2.0 * tau);
    n0 + 2.0 * x * n0.sqrt() + x * x
}

/// The fixed microphysical scales the observables are built from.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Scales {
    /// Compton wavelength, cm.
    pub l: f64,
    /// Particle mass, g.
    pub m: f64,
    pub c: f64,
}

impl Scales {
    pub fn from_table(table: &ConstantsTable) -> Result<Self, CosmologyError> {
        Ok(Self {
            l: table.magnitude("l_pi")?,
            m: table.magnitude("m_pi")?,
            c: table.magnitude("c")?,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Observables {
    /// cm³ g⁻¹ s⁻²
    pub g: f64,
    /// cm
    pub r: f64,
    /// s⁻¹
    pub h: f64,
    /// g cm⁻³
    pub rho: f64,
}

/// G, R, H and ρ as functions of the particle number alone.
pub fn derived_observables(n: f64, s: &Scales) -> Observables {
    let root = n.sqrt();
    let g = s.l * s.c * s.c / (s.m * root);
    Observables {
        g,
        r: g * (n * s.m) / (s.c * s.c),
        h: s.c / (s.l * root),
        rho: s.m / s.l.powi(3) / root,
    }
}

/// One sample of the simulated universe.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CosmologyState {
    pub t: f64,
    #[serde(rename = "N")]
    pub n: f64,
    #[serde(rename = "G")]
    pub g: f64,
    #[serde(rename = "R")]
    pub r: f64,
    #[serde(rename = "H")]
    pub h: f64,
    pub rho: f64,
}

impl CosmologyState {
    pub fn at(t: f64, n: f64, s: &Scales) -> Self {
        let o = derived_observables(n, s);
        Self {
            t,
            n,
            g: o.g,
            r: o.r,
            h: o.h,
            rho: o.rho,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rates() {
        assert_eq!(creation_rate(1.0, 1.0), 1.0);
        assert_eq!(creation_rate(0.0, 1.0), 0.0);
        let r = creation_rate(1e80, 4.7e-24);
        assert!((r / 2.1277e63 - 1.0).abs() < 1e-3, "{r}");
    }

    #[test]
    fn closed_form() {
        assert_eq!(closed_form_n(0.0, 7.0, 3.0), 7.0);
        assert_eq!(closed_form_n(2.0, 1.0, 1.0), 4.0);
        let tau = 4.716e-24;
        let n = closed_form_n(2.0 * 1e40 * tau, 1.0, tau);
        assert!((n / 1e80 - 1.0).abs() < 1e-12);
    }

    #[test]
    fn observables_at_large_n() {
        let s = Scales::from_table(&ConstantsTable::builtin()).unwrap();
        let o = derived_observables(1e80, &s);
        assert!((o.g / 5.107e-8 - 1.0).abs() < 2e-3, "{}", o.g);
        assert!((o.h / 2.1204e-17 - 1.0).abs() < 1e-3, "{}", o.h);
        assert!(((o.r - s.l * 1e40) / o.r).abs() < 1e-15);
    }
}
