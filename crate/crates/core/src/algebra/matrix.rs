use std::fmt;

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::AlgebraError;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);
const I: Complex64 = Complex64::new(0.0, 1.0);

/// A square complex matrix with finite entries.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix(DMatrix<Complex64>);

impl ComplexMatrix {
    pub fn new(m: DMatrix<Complex64>) -> Result<Self, AlgebraError> {
        if !m.is_square() {
            return Err(AlgebraError::NotSquare(m.nrows(), m.ncols()));
        }
        if m.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(AlgebraError::NotFinite);
        }
        Ok(Self(m))
    }

    /// Row-major construction; panics only if `rows` is ragged.
    pub fn from_rows(rows: &[&[Complex64]]) -> Result<Self, AlgebraError> {
        let n = rows.len();
        let m = DMatrix::from_fn(n, rows.first().map_or(0, |r| r.len()), |i, j| rows[i][j]);
        Self::new(m)
    }

    pub fn identity(n: usize) -> Self {
        Self(DMatrix::identity(n, n))
    }

    pub fn zeros(n: usize) -> Self {
        Self(DMatrix::zeros(n, n))
    }

    pub fn size(&self) -> usize {
        self.0.nrows()
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.0[(i, j)]
    }

    pub fn as_dmatrix(&self) -> &DMatrix<Complex64> {
        &self.0
    }

    pub fn mul(&self, other: &Self) -> Self {
        Self(&self.0 * &other.0)
    }

    pub fn add(&self, other: &Self) -> Self {
        Self(&self.0 + &other.0)
    }

    pub fn sub(&self, other: &Self) -> Self {
        Self(&self.0 - &other.0)
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self(&self.0 * s)
    }

    pub fn scale_real(&self, s: f64) -> Self {
        self.scale(Complex64::new(s, 0.0))
    }

    /// Largest entry modulus.
    pub fn max_abs(&self) -> f64 {
        self.0.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn determinant(&self) -> Complex64 {
        self.0.clone().determinant()
    }

    /// Singular values in descending order.
    pub fn singular_values(&self) -> Vec<f64> {
        let mut s: Vec<f64> = self
            .0
            .clone()
            .svd(false, false)
            .singular_values
            .iter()
            .copied()
            .collect();
        s.sort_by(|a, b| b.total_cmp(a));
        s
    }

    /// `[[a, b], [c, d]]` from four equal-size blocks.
    pub fn block(a: &Self, b: &Self, c: &Self, d: &Self) -> Self {
        let n = a.size();
        let mut m = DMatrix::zeros(2 * n, 2 * n);
        m.view_mut((0, 0), (n, n)).copy_from(&a.0);
        m.view_mut((0, n), (n, n)).copy_from(&b.0);
        m.view_mut((n, 0), (n, n)).copy_from(&c.0);
        m.view_mut((n, n), (n, n)).copy_from(&d.0);
        Self(m)
    }
}

impl fmt::Display for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.size() {
            let row: Vec<String> = (0..self.size())
                .map(|j| format!("{}", self.get(i, j)))
                .collect();
            writeln!(f, "[{}]", row.join(", "))?;
        }
        Ok(())
    }
}

/// The Pauli matrix σ_i, i in 1..=3.
pub fn pauli(i: usize) -> Result<ComplexMatrix, AlgebraError> {
    let rows: [[Complex64; 2]; 2] = match i {
        1 => [[ZERO, ONE], [ONE, ZERO]],
        2 => [[ZERO, -I], [I, ZERO]],
        3 => [[ONE, ZERO], [ZERO, -ONE]],
        _ => return Err(AlgebraError::PauliIndex(i)),
    };
    ComplexMatrix::from_rows(&[&rows[0], &rows[1]])
}

fn sigma(i: usize) -> ComplexMatrix {
    pauli(i).expect("index in 1..=3")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub enum Sign {
    #[serde(rename = "+")]
    Plus,
    #[serde(rename = "-")]
    Minus,
    /// The square is not ±identity.
    #[serde(rename = "?")]
    Neither,
}

impl fmt::Display for Sign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Sign::Plus => "+",
            Sign::Minus => "-",
            Sign::Neither => "?",
        })
    }
}

/// Formats a signature as `(+,-,-,-)`.
pub fn signature_string(sig: &[Sign]) -> String {
    let parts: Vec<String> = sig.iter().map(Sign::to_string).collect();
    format!("({})", parts.join(","))
}

/// A labelled list of same-size matrices with one metric entry (±1) each.
#[derive(Debug, Clone, PartialEq)]
pub struct CliffordSet {
    label: String,
    matrices: Vec<ComplexMatrix>,
    metric: Vec<f64>,
}

impl CliffordSet {
    pub fn new(
        label: impl Into<String>,
        matrices: Vec<ComplexMatrix>,
        metric: Vec<f64>,
    ) -> Result<Self, AlgebraError> {
        if matrices.len() != metric.len() {
            return Err(AlgebraError::MetricLength {
                matrices: matrices.len(),
                metric: metric.len(),
            });
        }
        if let Some(&bad) = metric.iter().find(|&&m| m != 1.0 && m != -1.0) {
            return Err(AlgebraError::MetricEntry(bad));
        }
        if let Some(first) = matrices.first() {
            if let Some(m) = matrices.iter().find(|m| m.size() != first.size()) {
                return Err(AlgebraError::SizeMismatch(first.size(), m.size()));
            }
        }
        Ok(Self {
            label: label.into(),
            matrices,
            metric,
        })
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn matrices(&self) -> &[ComplexMatrix] {
        &self.matrices
    }

    pub fn metric(&self) -> &[f64] {
        &self.metric
    }
}

/// The quantized-spacetime coordinate matrices: t = diag(1,1,-1,-1),
/// x_i = offdiag(σ_i, σ_i). They close on the Euclidean signature.
pub fn build_eq9_set() -> CliffordSet {
    let i2 = ComplexMatrix::identity(2);
    let z2 = ComplexMatrix::zeros(2);
    let mut ms = vec![ComplexMatrix::block(&i2, &z2, &z2, &i2.scale_real(-1.0))];
    for i in 1..=3 {
        ms.push(ComplexMatrix::block(&z2, &sigma(i), &sigma(i), &z2));
    }
    CliffordSet::new("coordinate", ms, vec![1.0; 4]).expect("well-formed set")
}

/// Standard Dirac representation: γ⁰ = diag(1,1,-1,-1), γ^i = offdiag(σ_i, -σ_i).
pub fn build_dirac_set() -> CliffordSet {
    let i2 = ComplexMatrix::identity(2);
    let z2 = ComplexMatrix::zeros(2);
    let mut ms = vec![ComplexMatrix::block(&i2, &z2, &z2, &i2.scale_real(-1.0))];
    for i in 1..=3 {
        ms.push(ComplexMatrix::block(
            &z2,
            &sigma(i),
            &sigma(i).scale_real(-1.0),
            &z2,
        ));
    }
    CliffordSet::new("dirac", ms, vec![1.0, -1.0, -1.0, -1.0]).expect("well-formed set")
}

#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct PairDeviation {
    pub a: usize,
    pub b: usize,
    pub deviation: f64,
}

#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct CliffordRecord {
    pub label: String,
    pub pairs: Vec<PairDeviation>,
    pub max_deviation: f64,
    pub signature: Vec<Sign>,
}

impl CliffordRecord {
    pub fn exact(&self) -> bool {
        self.max_deviation == 0.0
    }

    pub fn signature_string(&self) -> String {
        signature_string(&self.signature)
    }
}

/// Checks `{Γ^a, Γ^b} = 2 η^ab I` for every pair a ≤ b against the set's
/// metric, and reads off each Γ² as ±I.
pub fn verify_clifford(s: &CliffordSet) -> CliffordRecord {
    let n = s.matrices.first().map_or(0, ComplexMatrix::size);
    let id = ComplexMatrix::identity(n);
    let mut pairs = Vec::new();
    for a in 0..s.matrices.len() {
        for b in a..s.matrices.len() {
            let (ga, gb) = (&s.matrices[a], &s.matrices[b]);
            let eta = if a == b { s.metric[a] } else { 0.0 };
            let dev = ga.mul(gb).add(&gb.mul(ga)).sub(&id.scale_real(2.0 * eta));
            pairs.push(PairDeviation {
                a,
                b,
                deviation: dev.max_abs(),
            });
        }
    }
    let signature = s
        .matrices
        .iter()
        .map(|g| {
            let sq = g.mul(g);
            if sq == id {
                Sign::Plus
            } else if sq == id.scale_real(-1.0) {
                Sign::Minus
            } else {
                Sign::Neither
            }
        })
        .collect();
    CliffordRecord {
        label: s.label.clone(),
        max_deviation: pairs.iter().map(|p| p.deviation).fold(0.0, f64::max),
        pairs,
        signature,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn pauli_basics() {
        let s3 = pauli(3).unwrap();
        assert_eq!(s3.get(0, 0), ONE);
        assert_eq!(s3.get(1, 1), -ONE);
        assert_eq!(s3.get(0, 1), ZERO);
        for i in 1..=3 {
            let s = pauli(i).unwrap();
            assert_eq!(s.mul(&s), ComplexMatrix::identity(2));
        }
        assert_eq!(
            pauli(1).unwrap().mul(&pauli(2).unwrap()),
            pauli(3).unwrap().scale(I)
        );
        assert_eq!(pauli(0), Err(AlgebraError::PauliIndex(0)));
        assert!(pauli(4).is_err());
    }

    #[test]
    fn dirac_set_by_hand() {
        let d = build_dirac_set();
        let g = d.matrices();
        // γ¹ written out entry by entry
        let z = c(0.0, 0.0);
        let g1 = ComplexMatrix::from_rows(&[
            &[z, z, z, c(1.0, 0.0)],
            &[z, z, c(1.0, 0.0), z],
            &[z, c(-1.0, 0.0), z, z],
            &[c(-1.0, 0.0), z, z, z],
        ])
        .unwrap();
        assert_eq!(g[1], g1);
        assert_eq!(g[1].mul(&g[1]), ComplexMatrix::identity(4).scale_real(-1.0));
        assert_eq!(
            g[0].mul(&g[1]).add(&g[1].mul(&g[0])),
            ComplexMatrix::zeros(4)
        );
    }

    #[test]
    fn records() {
        let d = verify_clifford(&build_dirac_set());
        assert_eq!(d.max_deviation, 0.0);
        assert_eq!(d.signature_string(), "(+,-,-,-)");
        assert_eq!(d.pairs.len(), 10);
        let e = verify_clifford(&build_eq9_set());
        assert_eq!(e.max_deviation, 0.0);
        assert_eq!(e.signature_string(), "(+,+,+,+)");
    }

    #[test]
    fn wrong_metric_shows_deviation() {
        let e = build_eq9_set();
        let forced = CliffordSet::new(
            "minkowski",
            e.matrices().to_vec(),
            vec![1.0, -1.0, -1.0, -1.0],
        )
        .unwrap();
        let r = verify_clifford(&forced);
        assert_eq!(r.max_deviation, 4.0);
        assert_eq!(r.signature_string(), "(+,+,+,+)");
    }

    #[test]
    fn identity_set() {
        let s = CliffordSet::new("id", vec![ComplexMatrix::identity(2)], vec![1.0]).unwrap();
        assert!(verify_clifford(&s).exact());
    }

    #[test]
    fn set_validation() {
        let i2 = ComplexMatrix::identity(2);
        let i4 = ComplexMatrix::identity(4);
        assert_eq!(
            CliffordSet::new("x", vec![i2.clone(), i4], vec![1.0, 1.0]),
            Err(AlgebraError::SizeMismatch(2, 4))
        );
        assert!(CliffordSet::new("x", vec![i2.clone()], vec![1.0, 1.0]).is_err());
        assert!(CliffordSet::new("x", vec![i2], vec![0.5]).is_err());
        assert!(ComplexMatrix::new(DMatrix::zeros(2, 3)).is_err());
        assert!(ComplexMatrix::new(DMatrix::from_element(2, 2, c(f64::NAN, 0.0))).is_err());
    }
}
