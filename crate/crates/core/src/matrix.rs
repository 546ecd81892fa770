//! Dense complex matrix kernel: Hermitian structure, Hilbert-Schmidt geometry,
//! numeric rank and spectral decomposition.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex;
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

pub type C64 = Complex<f64>;

/// Default relative tolerance for hermiticity, PSD and trace checks.
pub const DEFAULT_TOL: f64 = 1e-9;

/// Relative singular-value threshold used for numeric rank decisions.
pub const RANK_TOL: f64 = 1e-8;

pub(crate) const ZERO: C64 = Complex::new(0.0, 0.0);
pub(crate) const ONE: C64 = Complex::new(1.0, 0.0);
pub(crate) const I_UNIT: C64 = Complex::new(0.0, 1.0);

/// A square complex matrix with finite entries.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexMatrix {
    m: DMatrix<C64>,
}

impl ComplexMatrix {
    pub fn new(m: DMatrix<C64>) -> Result<Self> {
        if m.nrows() != m.ncols() {
            return Err(Error::NotSquare {
                rows: m.nrows(),
                cols: m.ncols(),
            });
        }
        if m.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFiniteEntry);
        }
        Ok(Self { m })
    }

    pub fn zeros(d: usize) -> Self {
        Self {
            m: DMatrix::zeros(d, d),
        }
    }

    pub fn identity(d: usize) -> Self {
        Self {
            m: DMatrix::identity(d, d),
        }
    }

    pub fn from_fn(d: usize, f: impl FnMut(usize, usize) -> C64) -> Self {
        Self {
            m: DMatrix::from_fn(d, d, f),
        }
    }

    pub fn from_diagonal(diag: &[C64]) -> Self {
        let d = diag.len();
        Self::from_fn(d, |i, j| if i == j { diag[i] } else { ZERO })
    }

    /// Row-major construction, mostly for fixtures.
    pub fn from_rows(rows: &[Vec<C64>]) -> Result<Self> {
        let d = rows.len();
        if rows.iter().any(|r| r.len() != d) {
            return Err(Error::NotSquare {
                rows: d,
                cols: rows.first().map_or(0, Vec::len),
            });
        }
        Self::new(DMatrix::from_fn(d, d, |i, j| rows[i][j]))
    }

    pub fn dim(&self) -> usize {
        self.m.nrows()
    }

    pub fn raw(&self) -> &DMatrix<C64> {
        &self.m
    }

    pub fn into_raw(self) -> DMatrix<C64> {
        self.m
    }

    pub fn entry(&self, i: usize, j: usize) -> C64 {
        self.m[(i, j)]
    }

    pub fn set_entry(&mut self, i: usize, j: usize, v: C64) {
        self.m[(i, j)] = v;
    }

    pub fn adjoint(&self) -> Self {
        Self {
            m: self.m.adjoint(),
        }
    }

    pub fn transposed(&self) -> Self {
        Self {
            m: self.m.transpose(),
        }
    }

    pub fn trace(&self) -> C64 {
        self.m.trace()
    }

    pub fn frob_norm(&self) -> f64 {
        self.m.norm()
    }

    /// Largest singular value.
    pub fn operator_norm(&self) -> f64 {
        self.singular_values().first().copied().unwrap_or(0.0)
    }

    /// Singular values in descending order.
    pub fn singular_values(&self) -> Vec<f64> {
        let mut sv: Vec<f64> = self
            .m
            .clone()
            .svd(false, false)
            .singular_values
            .iter()
            .copied()
            .collect();
        sv.sort_by(|a, b| b.partial_cmp(a).unwrap());
        sv
    }

    pub fn determinant(&self) -> C64 {
        self.m.determinant()
    }

    pub fn scaled(&self, c: C64) -> Self {
        Self {
            m: self.m.clone() * c,
        }
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermiticity_defect() <= tol * self.frob_norm().max(1.0)
    }

    /// Frobenius norm of `M - M†`.
    pub fn hermiticity_defect(&self) -> f64 {
        (&self.m - self.m.adjoint()).norm()
    }
}

impl std::ops::Add for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.dim(), rhs.dim(), "matrix dimension mismatch");
        ComplexMatrix {
            m: &self.m + &rhs.m,
        }
    }
}

impl std::ops::Sub for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.dim(), rhs.dim(), "matrix dimension mismatch");
        ComplexMatrix {
            m: &self.m - &rhs.m,
        }
    }
}

impl std::ops::Mul for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.dim(), rhs.dim(), "matrix dimension mismatch");
        ComplexMatrix {
            m: &self.m * &rhs.m,
        }
    }
}

impl std::ops::Neg for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn neg(self) -> ComplexMatrix {
        ComplexMatrix { m: -self.m.clone() }
    }
}

/// Hilbert-Schmidt inner product `tr(a† b)`, conjugate-linear in `a`.
pub fn hs_inner(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<C64> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch {
            expected: a.dim(),
            got: b.dim(),
        });
    }
    Ok(hs_dot(a, b))
}

/// `tr(a† b)` as an entrywise sum; dimensions must already match.
pub(crate) fn hs_dot(a: &ComplexMatrix, b: &ComplexMatrix) -> C64 {
    debug_assert_eq!(a.dim(), b.dim());
    a.m.iter()
        .zip(b.m.iter())
        .map(|(x, y)| x.conj() * y)
        .sum()
}

/// Count of singular values above `tol * max(sigma_max, 1)`.
pub fn numeric_rank(m: &ComplexMatrix, tol: f64) -> usize {
    let sv = m.singular_values();
    let floor = sv.first().copied().unwrap_or(0.0).max(1.0) * tol;
    sv.iter().filter(|&&s| s > floor).count()
}

/// A complex matrix that is self-adjoint within tolerance.
#[derive(Clone, Debug, PartialEq)]
pub struct HermitianOperator {
    m: ComplexMatrix,
}

impl HermitianOperator {
    pub fn new(m: ComplexMatrix) -> Result<Self> {
        Self::with_tol(m, DEFAULT_TOL)
    }

    pub fn with_tol(m: ComplexMatrix, tol: f64) -> Result<Self> {
        let defect = m.hermiticity_defect();
        let scale = m.frob_norm().max(1.0);
        if defect > tol * scale {
            return Err(Error::NotHermitian {
                defect: defect / scale,
                tol,
            });
        }
        Ok(Self { m })
    }

    /// `(m + m†)/2`, for constructions that are Hermitian up to roundoff.
    pub fn symmetrize(m: &ComplexMatrix) -> Self {
        let sym = ComplexMatrix {
            m: (m.raw() + m.raw().adjoint()) * Complex::new(0.5, 0.0),
        };
        Self { m: sym }
    }

    pub fn zero(d: usize) -> Self {
        Self {
            m: ComplexMatrix::zeros(d),
        }
    }

    pub fn identity(d: usize) -> Self {
        Self {
            m: ComplexMatrix::identity(d),
        }
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.m
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.m
    }

    pub fn dim(&self) -> usize {
        self.m.dim()
    }

    /// Eigenvalues in descending order.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let mut ev: Vec<f64> = nalgebra::SymmetricEigen::new(self.m.raw().clone())
            .eigenvalues
            .iter()
            .copied()
            .collect();
        ev.sort_by(|a, b| b.partial_cmp(a).unwrap());
        ev
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues().last().copied().unwrap_or(0.0)
    }

    pub fn is_psd(&self, tol: f64) -> bool {
        self.min_eigenvalue() >= -tol * self.m.frob_norm().max(1.0)
    }
}

/// Splits `x = H1 + i H2` into its Hermitian and anti-Hermitian parts.
pub fn split_selfadjoint(x: &ComplexMatrix) -> (HermitianOperator, HermitianOperator) {
    let adj = x.adjoint();
    let h1 = (x + &adj).scaled(Complex::new(0.5, 0.0));
    let h2 = (x - &adj).scaled(Complex::new(0.0, -0.5));
    (HermitianOperator { m: h1 }, HermitianOperator { m: h2 })
}

/// Splits a Hermitian `h = P1 - P2` into PSD parts `(‖h‖ I ± h)/2`.
pub fn split_positive(h: &HermitianOperator) -> (HermitianOperator, HermitianOperator) {
    let d = h.dim();
    let norm = h.matrix().operator_norm();
    let scaled_id = ComplexMatrix::identity(d).scaled(Complex::new(norm, 0.0));
    let p1 = (&scaled_id + h.matrix()).scaled(Complex::new(0.5, 0.0));
    let p2 = (&scaled_id - h.matrix()).scaled(Complex::new(0.5, 0.0));
    (HermitianOperator { m: p1 }, HermitianOperator { m: p2 })
}

/// Eigenpairs of a Hermitian operator, eigenvalues descending,
/// eigenvectors orthonormal.
pub fn spectral_decompose(h: &HermitianOperator) -> Vec<(f64, DVector<C64>)> {
    let eig = nalgebra::SymmetricEigen::new(h.matrix().raw().clone());
    let mut pairs: Vec<(f64, DVector<C64>)> = eig
        .eigenvalues
        .iter()
        .enumerate()
        .map(|(k, &val)| (val, eig.eigenvectors.column(k).into_owned()))
        .collect();
    pairs.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap());
    pairs
}

/// Rank-one projector `|v⟩⟨v|` for a (normalized) vector.
pub fn projector(v: &DVector<C64>) -> ComplexMatrix {
    let n = v.norm();
    let v = v / Complex::new(n, 0.0);
    ComplexMatrix {
        m: &v * v.adjoint(),
    }
}

/// A density operator: PSD, unit trace, optionally with a declared rank bound.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityState {
    op: HermitianOperator,
    declared_rank: Option<usize>,
}

impl DensityState {
    pub fn new(op: HermitianOperator) -> Result<Self> {
        Self::validate(&op, DEFAULT_TOL)?;
        Ok(Self {
            op,
            declared_rank: None,
        })
    }

    pub fn with_declared_rank(op: HermitianOperator, r: usize) -> Result<Self> {
        Self::validate(&op, DEFAULT_TOL)?;
        let rank = numeric_rank(op.matrix(), RANK_TOL);
        if rank > r {
            return Err(Error::RankExceedsDeclared { rank, declared: r });
        }
        Ok(Self {
            op,
            declared_rank: Some(r),
        })
    }

    fn validate(op: &HermitianOperator, tol: f64) -> Result<()> {
        let tr = op.matrix().trace();
        if (tr.re - 1.0).abs() > tol.max(tol * op.matrix().frob_norm()) || tr.im.abs() > tol {
            return Err(Error::TraceNotOne { trace: tr.re });
        }
        let min_ev = op.min_eigenvalue();
        if min_ev < -tol * op.matrix().frob_norm().max(1.0) {
            return Err(Error::NotPositiveSemidefinite {
                min_eigenvalue: min_ev,
            });
        }
        Ok(())
    }

    /// `|v⟩⟨v| / ‖v‖²`.
    pub fn from_pure_vector(v: &DVector<C64>) -> Result<Self> {
        let n = v.norm();
        if n <= 0.0 || !n.is_finite() {
            return Err(Error::NotNormalized { norm: n });
        }
        let op = HermitianOperator::symmetrize(&projector(v));
        Ok(Self {
            op,
            declared_rank: Some(1),
        })
    }

    pub fn maximally_mixed(d: usize) -> Self {
        let op = HermitianOperator {
            m: ComplexMatrix::identity(d).scaled(Complex::new(1.0 / d as f64, 0.0)),
        };
        Self {
            op,
            declared_rank: None,
        }
    }

    pub fn operator(&self) -> &HermitianOperator {
        &self.op
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        self.op.matrix()
    }

    pub fn dim(&self) -> usize {
        self.op.dim()
    }

    pub fn declared_rank(&self) -> Option<usize> {
        self.declared_rank
    }

    pub fn hs_distance(&self, other: &DensityState) -> f64 {
        (self.matrix() - other.matrix()).frob_norm()
    }
}

// ---------------------------------------------------------------------------
// JSON shape: {"dim": d, "entries": [[[re, im], ...], ...]} row-major.
// ---------------------------------------------------------------------------

#[derive(Serialize, Deserialize)]
struct MatrixJson {
    dim: usize,
    entries: Vec<Vec<[f64; 2]>>,
}

impl From<&ComplexMatrix> for MatrixJson {
    fn from(m: &ComplexMatrix) -> Self {
        let d = m.dim();
        let entries = (0..d)
            .map(|i| (0..d).map(|j| [m.entry(i, j).re, m.entry(i, j).im]).collect())
            .collect();
        MatrixJson { dim: d, entries }
    }
}

impl TryFrom<MatrixJson> for ComplexMatrix {
    type Error = Error;
    fn try_from(j: MatrixJson) -> Result<Self> {
        if j.entries.len() != j.dim || j.entries.iter().any(|r| r.len() != j.dim) {
            return Err(Error::NotSquare {
                rows: j.entries.len(),
                cols: j.entries.first().map_or(0, Vec::len),
            });
        }
        ComplexMatrix::new(DMatrix::from_fn(j.dim, j.dim, |i, k| {
            Complex::new(j.entries[i][k][0], j.entries[i][k][1])
        }))
    }
}

impl Serialize for ComplexMatrix {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        MatrixJson::from(self).serialize(s)
    }
}

impl<'de> Deserialize<'de> for ComplexMatrix {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let j = MatrixJson::deserialize(d)?;
        ComplexMatrix::try_from(j).map_err(D::Error::custom)
    }
}

impl Serialize for HermitianOperator {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.m.serialize(s)
    }
}

impl<'de> Deserialize<'de> for HermitianOperator {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let m = ComplexMatrix::deserialize(d)?;
        HermitianOperator::new(m).map_err(D::Error::custom)
    }
}

#[derive(Serialize, Deserialize)]
struct StateJson {
    dim: usize,
    entries: Vec<Vec<[f64; 2]>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    declared_rank: Option<usize>,
}

impl Serialize for DensityState {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let m = MatrixJson::from(self.matrix());
        StateJson {
            dim: m.dim,
            entries: m.entries,
            declared_rank: self.declared_rank,
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for DensityState {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let j = StateJson::deserialize(d)?;
        let m = ComplexMatrix::try_from(MatrixJson {
            dim: j.dim,
            entries: j.entries,
        })
        .map_err(D::Error::custom)?;
        let op = HermitianOperator::new(m).map_err(D::Error::custom)?;
        match j.declared_rank {
            Some(r) => DensityState::with_declared_rank(op, r).map_err(D::Error::custom),
            None => DensityState::new(op).map_err(D::Error::custom),
        }
    }
}

// Pauli matrices, used throughout the qubit-sized tests and examples.
pub fn pauli_x() -> ComplexMatrix {
    ComplexMatrix::from_fn(2, |i, j| if i != j { ONE } else { ZERO })
}

pub fn pauli_y() -> ComplexMatrix {
    ComplexMatrix::from_fn(2, |i, j| match (i, j) {
        (0, 1) => -I_UNIT,
        (1, 0) => I_UNIT,
        _ => ZERO,
    })
}

pub fn pauli_z() -> ComplexMatrix {
    ComplexMatrix::from_diagonal(&[ONE, -ONE])
}
