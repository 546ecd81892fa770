//! Subspaces of the d×d operator space under the Hilbert-Schmidt geometry.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::matrix::{hs_dot, ComplexMatrix, HermitianOperator, ZERO};

/// Residual threshold below which a vector counts as lying in a span.
pub const SPAN_TOL: f64 = 1e-10;

/// An HS-orthonormal basis of a complex subspace of d×d matrices,
/// together with verified structural flags.
#[derive(Clone, Debug)]
pub struct OperatorSubspace {
    dim_space: usize,
    basis: Vec<ComplexMatrix>,
    is_adjoint_closed: bool,
    contains_identity: bool,
}

impl OperatorSubspace {
    /// Orthonormalizes a spanning set, dropping dependent elements, then
    /// verifies the adjoint-closure and identity flags.
    pub fn from_spanning(dim_space: usize, mats: &[ComplexMatrix]) -> Result<Self> {
        for m in mats {
            if m.dim() != dim_space {
                return Err(Error::DimensionMismatch {
                    expected: dim_space,
                    got: m.dim(),
                });
            }
        }
        let basis = orthonormalize(mats, SPAN_TOL);
        Ok(Self::from_orthonormal(dim_space, basis))
    }

    fn from_orthonormal(dim_space: usize, basis: Vec<ComplexMatrix>) -> Self {
        let mut s = Self {
            dim_space,
            basis,
            is_adjoint_closed: false,
            contains_identity: false,
        };
        s.is_adjoint_closed = s
            .basis
            .iter()
            .all(|b| s.residual(&b.adjoint()) <= SPAN_TOL * b.frob_norm().max(1.0));
        let id = ComplexMatrix::identity(dim_space);
        s.contains_identity = s.residual(&id) <= SPAN_TOL * id.frob_norm();
        s
    }

    pub fn zero(dim_space: usize) -> Self {
        Self {
            dim_space,
            basis: Vec::new(),
            is_adjoint_closed: true,
            contains_identity: false,
        }
    }

    /// Complex dimension of the subspace.
    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    /// Dimension d of the underlying Hilbert space.
    pub fn space_dim(&self) -> usize {
        self.dim_space
    }

    pub fn basis(&self) -> &[ComplexMatrix] {
        &self.basis
    }

    pub fn is_adjoint_closed(&self) -> bool {
        self.is_adjoint_closed
    }

    pub fn contains_identity(&self) -> bool {
        self.contains_identity
    }

    /// Orthogonal projection of `m` onto the subspace.
    pub fn project(&self, m: &ComplexMatrix) -> ComplexMatrix {
        let mut out = ComplexMatrix::zeros(self.dim_space);
        for b in &self.basis {
            let c = hs_dot(b, m);
            out = &out + &b.scaled(c);
        }
        out
    }

    /// `‖m - P(m)‖_F`.
    pub fn residual(&self, m: &ComplexMatrix) -> f64 {
        (m - &self.project(m)).frob_norm()
    }

    pub fn contains(&self, m: &ComplexMatrix, tol: f64) -> bool {
        self.residual(m) <= tol * m.frob_norm().max(1.0)
    }

    /// Orthogonal complement; has dimension d² - dim(self).
    pub fn orthogonal_complement(&self) -> OperatorSubspace {
        let d = self.dim_space;
        let want = d * d - self.basis.len();
        let candidates: Vec<ComplexMatrix> = (0..d * d)
            .map(|k| {
                ComplexMatrix::from_fn(d, |i, j| {
                    if i == k / d && j == k % d {
                        Complex::new(1.0, 0.0)
                    } else {
                        ZERO
                    }
                })
            })
            .collect();
        let extension = pivoted_extend(&self.basis, candidates, want);
        Self::from_orthonormal(d, extension)
    }

    /// Mutual-projection test for span equality.
    pub fn spans_same(&self, other: &OperatorSubspace, tol: f64) -> bool {
        if self.dim_space != other.dim_space || self.dim() != other.dim() {
            return false;
        }
        self.basis.iter().all(|b| other.residual(b) <= tol)
            && other.basis.iter().all(|b| self.residual(b) <= tol)
    }

    /// A real-orthonormal basis of the self-adjoint elements. For an
    /// adjoint-closed subspace of complex dimension m this has m elements.
    pub fn hermitian_basis(&self) -> Result<Vec<HermitianOperator>> {
        if !self.is_adjoint_closed {
            return Err(Error::NotAdjointClosed);
        }
        let mut candidates = Vec::with_capacity(2 * self.basis.len());
        for b in &self.basis {
            let adj = b.adjoint();
            candidates.push((b + &adj).scaled(Complex::new(0.5, 0.0)));
            candidates.push((b - &adj).scaled(Complex::new(0.0, -0.5)));
        }
        let kept = real_orthonormalize(&candidates, SPAN_TOL);
        debug_assert_eq!(kept.len(), self.basis.len());
        Ok(kept
            .into_iter()
            .map(|m| HermitianOperator::symmetrize(&m))
            .collect())
    }
}

/// Modified Gram-Schmidt with re-orthogonalization; drops elements whose
/// residual falls below `tol` relative to their original norm.
pub(crate) fn orthonormalize(mats: &[ComplexMatrix], tol: f64) -> Vec<ComplexMatrix> {
    let mut basis: Vec<ComplexMatrix> = Vec::new();
    for m in mats {
        let orig = m.frob_norm();
        if orig <= tol {
            continue;
        }
        let mut r = m.clone();
        for _ in 0..2 {
            for b in &basis {
                let c = hs_dot(b, &r);
                r = &r - &b.scaled(c);
            }
        }
        let n = r.frob_norm();
        if n > tol * orig.max(1.0) {
            basis.push(r.scaled(Complex::new(1.0 / n, 0.0)));
        }
    }
    basis
}

/// Orthonormalization over the reals (inner product `Re⟨·,·⟩`), used to
/// extract Hermitian bases.
fn real_orthonormalize(mats: &[ComplexMatrix], tol: f64) -> Vec<ComplexMatrix> {
    let mut basis: Vec<ComplexMatrix> = Vec::new();
    for m in mats {
        let orig = m.frob_norm();
        if orig <= tol {
            continue;
        }
        let mut r = m.clone();
        for _ in 0..2 {
            for b in &basis {
                let c = hs_dot(b, &r).re;
                r = &r - &b.scaled(Complex::new(c, 0.0));
            }
        }
        let n = r.frob_norm();
        if n > tol * orig.max(1.0) {
            basis.push(r.scaled(Complex::new(1.0 / n, 0.0)));
        }
    }
    basis
}

/// Extends an orthonormal `seed` by `count` vectors drawn greedily from
/// `candidates` (largest residual first). The seed itself is not returned.
fn pivoted_extend(
    seed: &[ComplexMatrix],
    candidates: Vec<ComplexMatrix>,
    count: usize,
) -> Vec<ComplexMatrix> {
    let mut residuals: Vec<ComplexMatrix> = candidates
        .into_iter()
        .map(|mut r| {
            for b in seed {
                let c = hs_dot(b, &r);
                r = &r - &b.scaled(c);
            }
            r
        })
        .collect();
    let mut picked: Vec<ComplexMatrix> = Vec::with_capacity(count);
    for _ in 0..count {
        let (best, norm) = residuals
            .iter()
            .enumerate()
            .map(|(k, r)| (k, r.frob_norm()))
            .max_by(|a, b| a.1.partial_cmp(&b.1).unwrap())
            .expect("complement extension ran out of candidates");
        assert!(
            norm > 1e-6,
            "complement extension failed: residual {norm:.3e}"
        );
        let q = residuals[best].scaled(Complex::new(1.0 / norm, 0.0));
        for r in &mut residuals {
            let c = hs_dot(&q, r);
            *r = &*r - &q.scaled(c);
        }
        picked.push(q);
    }
    picked
}

/// The standard real-orthonormal basis of the Hermitian d×d matrices,
/// `d²` elements.
pub fn hermitian_canonical_basis(d: usize) -> Vec<HermitianOperator> {
    let mut out = Vec::with_capacity(d * d);
    let s = std::f64::consts::FRAC_1_SQRT_2;
    for i in 0..d {
        let mut m = ComplexMatrix::zeros(d);
        m.set_entry(i, i, Complex::new(1.0, 0.0));
        out.push(HermitianOperator::symmetrize(&m));
    }
    for i in 0..d {
        for j in (i + 1)..d {
            let mut m = ComplexMatrix::zeros(d);
            m.set_entry(i, j, Complex::new(s, 0.0));
            m.set_entry(j, i, Complex::new(s, 0.0));
            out.push(HermitianOperator::symmetrize(&m));
            let mut m = ComplexMatrix::zeros(d);
            m.set_entry(i, j, Complex::new(0.0, -s));
            m.set_entry(j, i, Complex::new(0.0, s));
            out.push(HermitianOperator::symmetrize(&m));
        }
    }
    out
}

/// Expansion coefficients of a Hermitian matrix in the canonical basis.
pub fn hermitian_coordinates(m: &ComplexMatrix, basis: &[HermitianOperator]) -> Vec<f64> {
    basis.iter().map(|b| hs_dot(b.matrix(), m).re).collect()
}
