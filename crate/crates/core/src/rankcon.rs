//! Construction of a traceless, adjoint-closed subspace of d×d matrices
//! whose nonzero elements all have rank at least 2r+1, and of the induced
//! 4r(d-r)-outcome POVM that is informationally complete for states of rank
//! at most r.
//!
//! Diagonals are labeled from the lower-left corner upwards: the k-th
//! diagonal holds the entries with `i - j = d - k` (1-based), so the main
//! diagonal is the d-th. For each k in `2r+1 ..= d-1` the subspace receives
//! `k - 2r` matrices supported on the k-th diagonal, filled with columns of
//! a totally nonsingular k×k matrix, plus all their transposes; the main
//! diagonal carries `d - 2r` traceless vectors built from columns of a
//! totally nonsingular d×d matrix rescaled entrywise by a vector orthogonal
//! to all of them.

use num_complex::Complex;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::matrix::{numeric_rank, ComplexMatrix, C64};
use crate::opsys::{povm_from_operator_system, OperatorSystem, Povm};
use crate::subspace::OperatorSubspace;

/// Hard dimension cap: double-precision Vandermonde nodes beyond this are
/// too ill-conditioned to trust.
pub const MAX_DIM: usize = 16;

/// Dimensions above this get a conditioning warning in construction reports.
pub const CONDITIONING_WARN_DIM: usize = 10;

/// The constructed subspace together with its raw spanning matrices.
#[derive(Clone, Debug)]
pub struct RankWitnessSubspace {
    dim_space: usize,
    rank_bound: usize,
    basis: Vec<ComplexMatrix>,
    subspace: OperatorSubspace,
}

impl RankWitnessSubspace {
    pub fn dim_space(&self) -> usize {
        self.dim_space
    }

    pub fn rank_bound(&self) -> usize {
        self.rank_bound
    }

    /// The spanning matrices as constructed, before orthonormalization.
    pub fn basis(&self) -> &[ComplexMatrix] {
        &self.basis
    }

    pub fn subspace(&self) -> &OperatorSubspace {
        &self.subspace
    }

    pub fn dim(&self) -> usize {
        self.subspace.dim()
    }
}

/// Summary emitted alongside a rank-constrained POVM.
#[derive(Clone, Debug, Serialize)]
pub struct RankConstructionReport {
    pub dim: usize,
    pub rank_bound: usize,
    pub witness_dim: usize,
    pub effect_count: usize,
    pub conditioning_warning: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sampled_min_rank: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sampled_min_singular_ratio: Option<f64>,
}

/// Vandermonde matrix `M_ij = alpha_i^(j-1)` for strictly increasing
/// positive nodes; all of its minors are nonzero.
pub fn vandermonde_tns(m: usize, alphas: &[f64]) -> Result<ComplexMatrix> {
    if alphas.len() != m || m == 0 {
        return Err(Error::InvalidArgument(format!(
            "expected {m} Vandermonde nodes, got {}",
            alphas.len()
        )));
    }
    let increasing = alphas[0] > 0.0 && alphas.windows(2).all(|w| w[0] < w[1]);
    if !increasing {
        return Err(Error::AlphasNotIncreasing);
    }
    Ok(ComplexMatrix::from_fn(m, |i, j| {
        Complex::new(alphas[i].powi(j as i32), 0.0)
    }))
}

fn integer_nodes(m: usize) -> Vec<f64> {
    (1..=m).map(|k| k as f64).collect()
}

/// Row `row` (1-based) of the inverse of the Vandermonde matrix on the given
/// nodes, via Lagrange interpolation coefficients. Row j holds the
/// coefficient of `t^(j-1)` in each Lagrange basis polynomial; this is exact
/// up to rounding in small integer products, with no ill-conditioned solve.
fn vandermonde_inverse_row(alphas: &[f64], row: usize) -> Vec<f64> {
    let d = alphas.len();
    debug_assert!(row >= 1 && row <= d);
    let mut out = Vec::with_capacity(d);
    for i in 0..d {
        // coefficients of prod_{k != i} (t - alpha_k), low to high degree
        let mut poly = vec![0.0; d];
        poly[0] = 1.0;
        let mut deg = 0;
        let mut denom = 1.0;
        for (k, &a) in alphas.iter().enumerate() {
            if k == i {
                continue;
            }
            denom *= alphas[i] - a;
            for idx in (0..=deg).rev() {
                poly[idx + 1] += poly[idx];
                poly[idx] *= -a;
            }
            deg += 1;
        }
        out.push(poly[row - 1] / denom);
    }
    out
}

/// Puts `values` on the k-th diagonal (1-based, from the lower left) of a
/// d×d matrix.
fn diagonal_stripe(d: usize, k: usize, values: &[f64]) -> ComplexMatrix {
    debug_assert!(k >= 1 && k <= d && values.len() == k);
    let mut m = ComplexMatrix::zeros(d);
    for (idx, &v) in values.iter().enumerate() {
        // 0-based: row = d - k + idx, col = idx
        m.set_entry(d - k + idx, idx, Complex::new(v, 0.0));
    }
    m
}

/// Builds the rank-witness subspace for `1 <= r < d/2`: dimension
/// `(d-2r)²`, adjoint-closed, traceless, every nonzero element of rank at
/// least `2r+1`.
pub fn build_rank_witness_subspace(d: usize, r: usize) -> Result<RankWitnessSubspace> {
    if d > MAX_DIM {
        return Err(Error::DimensionTooLarge { dim: d, max: MAX_DIM });
    }
    if r < 1 || 2 * r >= d {
        return Err(Error::RankOutOfRange { rank: r, dim: d });
    }

    let mut spanning: Vec<ComplexMatrix> = Vec::new();

    // Off-diagonal stripes and their transposes.
    for k in (2 * r + 1)..d {
        let nodes = integer_nodes(k);
        let vand = vandermonde_tns(k, &nodes)?;
        for col in 0..(k - 2 * r) {
            let values: Vec<f64> = (0..k).map(|i| vand.entry(i, col).re).collect();
            let stripe = diagonal_stripe(d, k, &values);
            spanning.push(stripe.transposed());
            spanning.push(stripe);
        }
    }

    // Traceless main-diagonal family.
    let nodes = integer_nodes(d);
    let u = pick_rescaling_vector(&nodes, d - 2 * r)?;
    for col in 0..(d - 2 * r) {
        let mut values: Vec<f64> = (0..d)
            .map(|i| u[i] * nodes[i].powi(col as i32))
            .collect();
        // u ⊥ column  =>  sum of values is zero; force it exactly
        let mean = values.iter().sum::<f64>() / d as f64;
        for v in &mut values {
            *v -= mean;
        }
        spanning.push(diagonal_stripe(d, d, &values));
    }

    let expected = (d - 2 * r) * (d - 2 * r);
    debug_assert_eq!(spanning.len(), expected);
    let subspace = OperatorSubspace::from_spanning(d, &spanning)?;
    if subspace.dim() != expected {
        return Err(Error::InvalidArgument(format!(
            "witness subspace has dimension {} instead of {expected}",
            subspace.dim()
        )));
    }
    Ok(RankWitnessSubspace {
        dim_space: d,
        rank_bound: r,
        basis: spanning,
        subspace,
    })
}

/// A row of the inverse Vandermonde matrix that is orthogonal to the first
/// `cols` columns and has no (relatively) tiny entries. The last row always
/// works for integer nodes; earlier rows are tried as a fallback.
fn pick_rescaling_vector(alphas: &[f64], cols: usize) -> Result<Vec<f64>> {
    let d = alphas.len();
    for row in (cols + 1..=d).rev() {
        let mut u = vandermonde_inverse_row(alphas, row);
        let max = u.iter().fold(0.0f64, |m, &v| m.max(v.abs()));
        if max == 0.0 {
            continue;
        }
        for v in &mut u {
            *v /= max;
        }
        if u.iter().all(|&v| v.abs() > 1e-12) {
            return Ok(u);
        }
    }
    Err(Error::InvalidArgument(
        "no inverse Vandermonde row without zero entries".into(),
    ))
}

/// The POVM spanning the orthogonal complement of the rank-witness
/// subspace; it has `4r(d-r)` outcomes and is informationally complete for
/// states of rank at most r.
pub fn rank_constrained_povm(d: usize, r: usize) -> Result<Povm> {
    let witness = build_rank_witness_subspace(d, r)?;
    povm_for_witness(&witness)
}

pub fn povm_for_witness(witness: &RankWitnessSubspace) -> Result<Povm> {
    let complement = witness.subspace().orthogonal_complement();
    let system = OperatorSystem::try_new(complement)?;
    povm_from_operator_system(&system)
}

/// POVM plus construction report; `sample` optionally runs the randomized
/// minimum-rank check with `(combinations, seed)`.
pub fn rank_constrained_povm_with_report(
    d: usize,
    r: usize,
    sample: Option<(usize, u64)>,
) -> Result<(Povm, RankConstructionReport)> {
    let witness = build_rank_witness_subspace(d, r)?;
    let povm = povm_for_witness(&witness)?;
    let mut report = RankConstructionReport {
        dim: d,
        rank_bound: r,
        witness_dim: witness.dim(),
        effect_count: povm.len(),
        conditioning_warning: d > CONDITIONING_WARN_DIM,
        sampled_min_rank: None,
        sampled_min_singular_ratio: None,
    };
    if let Some((n, seed)) = sample {
        let (min_rank, min_ratio) = sample_witness_min_rank(&witness, n, seed);
        report.sampled_min_rank = Some(min_rank);
        report.sampled_min_singular_ratio = Some(min_ratio);
    }
    Ok((povm, report))
}

/// Draws `n` random unit-norm complex combinations of the spanning matrices
/// and reports the smallest numeric rank seen along with the smallest
/// `sigma_{2r+1}/sigma_1` ratio.
pub fn sample_witness_min_rank(
    witness: &RankWitnessSubspace,
    n: usize,
    seed: u64,
) -> (usize, f64) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let normal = StandardNormal;
    let guard_index = 2 * witness.rank_bound; // sigma_{2r+1}, 0-based
    let mut min_rank = usize::MAX;
    let mut min_ratio = f64::INFINITY;
    for _ in 0..n {
        let mut combo = ComplexMatrix::zeros(witness.dim_space);
        for b in &witness.basis {
            let c: C64 = Complex::new(normal.sample(&mut rng), normal.sample(&mut rng));
            combo = &combo + &b.scaled(c);
        }
        let norm = combo.frob_norm();
        if norm == 0.0 {
            continue;
        }
        let combo = combo.scaled(Complex::new(1.0 / norm, 0.0));
        let rank = numeric_rank(&combo, crate::matrix::RANK_TOL);
        min_rank = min_rank.min(rank);
        let sv = combo.singular_values();
        if sv[0] > 0.0 && guard_index < sv.len() {
            min_ratio = min_ratio.min(sv[guard_index] / sv[0]);
        }
    }
    (min_rank, min_ratio)
}

/// Upper bound on the minimal number of informationally complete
/// observables for the rank-r premise; shares its formula with the bound
/// tables.
pub fn min_outcome_bound_rank(d: usize, r: usize) -> Result<usize> {
    crate::bounds::rank_upper(d, r)
}

/// Highest diagonal index (1..=2d-1, lower-left labeling) carrying an entry
/// above `tol` relative to the largest entry, if any.
pub fn top_nonzero_diagonal(m: &ComplexMatrix, tol: f64) -> Option<usize> {
    let d = m.dim();
    let scale = m.raw().iter().fold(0.0f64, |acc, z| acc.max(z.norm()));
    (1..=2 * d - 1).rev().find(|&k| {
        diagonal_entries(m, k)
            .iter()
            .any(|z| z.norm() > tol * scale.max(1.0))
    })
}

/// Entries of the k-th diagonal, k in 1..=2d-1 labeled from the lower left.
pub fn diagonal_entries(m: &ComplexMatrix, k: usize) -> Vec<C64> {
    let d = m.dim();
    let mut out = Vec::new();
    for j in 0..d {
        let i = (d as isize - k as isize) + j as isize;
        if i >= 0 && (i as usize) < d {
            out.push(m.entry(i as usize, j));
        }
    }
    out
}
