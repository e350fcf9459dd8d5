use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::matrix::{build_dirac_set, ComplexMatrix};
use super::AlgebraError;

/// Contravariant four-momentum in g cm s^-1, with p0 = E/c.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FourMomentum {
    pub p0: f64,
    pub p1: f64,
    pub p2: f64,
    pub p3: f64,
}

impl FourMomentum {
    pub fn new(p0: f64, p1: f64, p2: f64, p3: f64) -> Result<Self, AlgebraError> {
        if [p0, p1, p2, p3].iter().all(|x| x.is_finite()) {
            Ok(Self { p0, p1, p2, p3 })
        } else {
            Err(AlgebraError::NotFinite)
        }
    }

    /// Positive-energy on-shell momentum for spatial part `p` and mass `m`.
    pub fn on_shell(p: [f64; 3], m: f64, c: f64) -> Result<Self, AlgebraError> {
        let p0 = (p[0] * p[0] + p[1] * p[1] + p[2] * p[2] + (m * c) * (m * c)).sqrt();
        Self::new(p0, p[0], p[1], p[2])
    }

    pub fn spatial(&self) -> [f64; 3] {
        [self.p1, self.p2, self.p3]
    }

    pub fn with_spatial(&self, p: [f64; 3]) -> Self {
        Self {
            p1: p[0],
            p2: p[1],
            p3: p[2],
            ..*self
        }
    }

    /// p^μ p_μ with signature (+,-,-,-).
    pub fn minkowski_square(&self) -> f64 {
        self.p0 * self.p0 - self.p1 * self.p1 - self.p2 * self.p2 - self.p3 * self.p3
    }

    pub fn euclidean_square(&self) -> f64 {
        self.p0 * self.p0 + self.p1 * self.p1 + self.p2 * self.p2 + self.p3 * self.p3
    }
}

/// Four complex components; the upper and lower pairs are the two
/// two-spinors.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpinorVector(pub [Complex64; 4]);

impl SpinorVector {
    pub fn upper(&self) -> [Complex64; 2] {
        [self.0[0], self.0[1]]
    }

    pub fn lower(&self) -> [Complex64; 2] {
        [self.0[2], self.0[3]]
    }

    pub fn norm(&self) -> f64 {
        self.0.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }
}

/// The commutator bracket `1 + (a p / ħ)²`, computed as `(a / (ħ/p))²` so
/// that `a = ħ/p` gives exactly 2.
pub fn snyder_deformation(p: f64, a: f64, hbar: f64) -> Result<f64, AlgebraError> {
    if !(p >= 0.0 && p.is_finite()) {
        return Err(AlgebraError::Domain("momentum must be non-negative"));
    }
    if !(a > 0.0 && a.is_finite()) {
        return Err(AlgebraError::Domain("length must be positive"));
    }
    let ratio = a / (hbar / p);
    Ok(1.0 + ratio * ratio)
}

/// `γ^μ p_μ c − m c² I` in the standard Dirac representation.
pub fn dirac_operator(p: &FourMomentum, m: f64, c: f64) -> ComplexMatrix {
    let set = build_dirac_set();
    let g = set.matrices();
    let mc2 = m * c * c;
    g[0].scale_real(p.p0 * c)
        .sub(&g[1].scale_real(p.p1 * c))
        .sub(&g[2].scale_real(p.p2 * c))
        .sub(&g[3].scale_real(p.p3 * c))
        .sub(&ComplexMatrix::identity(4).scale_real(mc2))
}

pub fn onshell_determinant(p: &FourMomentum, m: f64, c: f64) -> Complex64 {
    dirac_operator(p, m, c).determinant()
}

/// `(p^μp_μ c² − m²c⁴)²`, the closed form of the determinant.
pub fn determinant_closed_form(p: &FourMomentum, m: f64, c: f64) -> f64 {
    let d = p.minkowski_square() * c * c - (m * c * c).powi(2);
    d * d
}

/// Scale used to make determinant residuals relative: `(p_E²c² + m²c⁴)²`.
pub fn determinant_scale(p: &FourMomentum, m: f64, c: f64) -> f64 {
    let s = p.euclidean_square() * c * c + (m * c * c).powi(2);
    s * s
}

/// Number of singular values of the Dirac operator below `tolerance` (erg).
pub fn nullspace_dimension(
    p: &FourMomentum,
    m: f64,
    c: f64,
    tolerance: f64,
) -> Result<usize, AlgebraError> {
    if tolerance.is_nan() || tolerance <= 0.0 {
        return Err(AlgebraError::Domain("tolerance must be positive"));
    }
    let s = dirac_operator(p, m, c).singular_values();
    Ok(s.iter().filter(|&&x| x < tolerance).count())
}

/// Orthonormal basis of the numerical nullspace.
pub fn nullspace_basis(
    p: &FourMomentum,
    m: f64,
    c: f64,
    tolerance: f64,
) -> Result<Vec<SpinorVector>, AlgebraError> {
    if tolerance.is_nan() || tolerance <= 0.0 {
        return Err(AlgebraError::Domain("tolerance must be positive"));
    }
    let svd = dirac_operator(p, m, c)
        .as_dmatrix()
        .clone()
        .svd(false, true);
    let v_t = svd.v_t.expect("requested");
    Ok(svd
        .singular_values
        .iter()
        .enumerate()
        .filter(|(_, s)| **s < tolerance)
        .map(|(k, _)| {
            let row = v_t.row(k);
            SpinorVector([row[0].conj(), row[1].conj(), row[2].conj(), row[3].conj()])
        })
        .collect())
}

/// Random spatial momentum: magnitude log-uniform over ±`decades` around
/// `scale`, direction uniform on the sphere.
pub fn random_spatial_momentum<R: Rng>(rng: &mut R, scale: f64, decades: f64) -> [f64; 3] {
    let mag = scale * 10f64.powf(rng.random_range(-decades..=decades));
    let cos_theta: f64 = rng.random_range(-1.0..=1.0);
    let sin_theta = (1.0 - cos_theta * cos_theta).sqrt();
    let phi = rng.random_range(0.0..2.0 * PI);
    [
        mag * sin_theta * phi.cos(),
        mag * sin_theta * phi.sin(),
        mag * cos_theta,
    ]
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OnshellSummary {
    pub trials: usize,
    pub seed: u64,
    pub max_relative_residual: f64,
    pub onshell_nullspace_two: usize,
    pub offshell_nullspace_zero: usize,
}

impl OnshellSummary {
    pub fn passed(&self, residual_tolerance: f64) -> bool {
        self.max_relative_residual <= residual_tolerance
            && self.onshell_nullspace_two == self.trials
            && self.offshell_nullspace_zero == self.trials
    }
}

/// For each trial draws one on-shell and one off-shell momentum around
/// `m c`, compares the determinant with its closed form, and counts the
/// nullspace dimension at tolerance `1e-8 m c²`.
pub fn onshell_trials(trials: usize, seed: u64, m: f64, c: f64) -> OnshellSummary {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let tol = 1e-8 * m * c * c;
    let mut summary = OnshellSummary {
        trials,
        seed,
        max_relative_residual: 0.0,
        onshell_nullspace_two: 0,
        offshell_nullspace_zero: 0,
    };
    for _ in 0..trials {
        let spatial = random_spatial_momentum(&mut rng, m * c, 5.0);
        let on = FourMomentum::on_shell(spatial, m, c).expect("finite");
        let shift: f64 = rng.random_range(0.01..=0.5);
        let factor = if rng.random_bool(0.5) {
            1.0 + shift
        } else {
            1.0 - shift
        };
        let sign = if rng.random_bool(0.5) { 1.0 } else { -1.0 };
        let off = FourMomentum {
            p0: sign * factor * on.p0,
            ..on
        };
        for p in [&on, &off] {
            let det = onshell_determinant(p, m, c);
            let residual =
                (det - determinant_closed_form(p, m, c)).norm() / determinant_scale(p, m, c);
            summary.max_relative_residual = summary.max_relative_residual.max(residual);
        }
        if nullspace_dimension(&on, m, c, tol) == Ok(2) {
            summary.onshell_nullspace_two += 1;
        }
        if nullspace_dimension(&off, m, c, tol) == Ok(0) {
            summary.offshell_nullspace_zero += 1;
        }
    }
    summary
}
