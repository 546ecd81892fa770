#![allow(dead_code)]

//! Shared generators for the integration suites.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex;
use qic_core::matrix::{spectral_decompose, ComplexMatrix, HermitianOperator, C64};
use qic_core::opsys::{ObservableSet, OperatorSystem, Povm};
use qic_core::subspace::OperatorSubspace;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

pub fn gaussian_matrix(rows: usize, cols: usize, rng: &mut impl Rng) -> DMatrix<C64> {
    let normal = StandardNormal;
    DMatrix::from_fn(rows, cols, |_, _| {
        Complex::new(normal.sample(rng), normal.sample(rng))
    })
}

pub fn gaussian_vector(d: usize, rng: &mut impl Rng) -> DVector<C64> {
    let normal = StandardNormal;
    DVector::from_fn(d, |_, _| Complex::new(normal.sample(rng), normal.sample(rng)))
}

pub fn random_hermitian(d: usize, rng: &mut impl Rng) -> HermitianOperator {
    let g = gaussian_matrix(d, d, rng);
    HermitianOperator::symmetrize(&ComplexMatrix::new(g).unwrap())
}

/// Inverse square root of a positive definite Hermitian operator.
pub fn inv_sqrt(h: &HermitianOperator) -> ComplexMatrix {
    let pairs = spectral_decompose(h);
    let d = h.dim();
    let mut out = DMatrix::<C64>::zeros(d, d);
    for (val, v) in pairs {
        assert!(val > 1e-12, "operator not positive definite");
        out += (&v * v.adjoint()) * Complex::new(1.0 / val.sqrt(), 0.0);
    }
    ComplexMatrix::new(out).unwrap()
}

/// Random POVM with exactly `n` effects: Gram matrices of Gaussian blocks,
/// renormalized through the inverse square root of their sum.
pub fn random_povm(d: usize, n: usize, rng: &mut impl Rng) -> Povm {
    let blocks: Vec<ComplexMatrix> = (0..n)
        .map(|_| {
            let g = gaussian_matrix(d, d, rng);
            ComplexMatrix::new(&g * g.adjoint()).unwrap()
        })
        .collect();
    let mut total = ComplexMatrix::zeros(d);
    for b in &blocks {
        total = &total + b;
    }
    let s = inv_sqrt(&HermitianOperator::symmetrize(&total));
    let effects: Vec<HermitianOperator> = blocks
        .iter()
        .map(|b| HermitianOperator::symmetrize(&(&(&s * b) * &s)))
        .collect();
    Povm::new(effects).unwrap()
}

/// Random operator system of the given target dimension (generic for
/// `target_dim <= d²`): the span of `target_dim - 1` random Hermitian
/// matrices together with the identity.
pub fn random_operator_system(d: usize, target_dim: usize, rng: &mut impl Rng) -> OperatorSystem {
    assert!(target_dim >= 1 && target_dim <= d * d);
    let mut mats = vec![ComplexMatrix::identity(d)];
    for _ in 0..target_dim - 1 {
        mats.push(random_hermitian(d, rng).matrix().clone());
    }
    let sub = OperatorSubspace::from_spanning(d, &mats).unwrap();
    OperatorSystem::try_new(sub).unwrap()
}

pub fn random_observable_set(d: usize, n: usize, rng: &mut impl Rng) -> ObservableSet {
    ObservableSet::new((0..n).map(|_| random_hermitian(d, rng)).collect()).unwrap()
}
