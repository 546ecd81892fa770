//! Informational-completeness verdicts: deterministic complement-based
//! criteria where the dimension allows them, seeded sampling experiments
//! everywhere else.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::{
    numeric_rank, spectral_decompose, ComplexMatrix, DensityState, HermitianOperator, C64,
    RANK_TOL,
};
use crate::opsys::{ObservableSet, Scheme};
use crate::subspace::OperatorSubspace;

/// Statistics-collision threshold: projections below this count as equal
/// statistics.
pub const COLLISION_TOL: f64 = 1e-10;

/// A refutation witness pair must be separated at least this far in HS norm.
pub const WITNESS_MIN_DISTANCE: f64 = 1e-6;

/// Separation threshold for sampled injectivity verdicts.
pub const SAMPLED_PASS_THRESHOLD: f64 = 1e-8;

/// Third-singular-value level below which the rank search reports failure
/// evidence (and below `COLLISION_TOL`, a certified refutation).
pub const SIGMA3_SUSPICIOUS: f64 = 1e-6;

/// Prior information about the unknown state.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub enum PremiseKind {
    BoundedRank(usize),
    Pure,
    RealPure,
    GrassmannProjections(usize),
    DepolarizedPure(DensityState),
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Premise {
    kind: PremiseKind,
    dim: usize,
}

impl Premise {
    pub fn new(kind: PremiseKind, dim: usize) -> Result<Self> {
        if dim < 2 {
            return Err(Error::InvalidPremise(format!(
                "premise needs dimension >= 2, got {dim}"
            )));
        }
        match &kind {
            PremiseKind::BoundedRank(r) => {
                if *r < 1 || *r > dim {
                    return Err(Error::InvalidPremise(format!(
                        "rank bound {r} out of 1..={dim}"
                    )));
                }
            }
            PremiseKind::GrassmannProjections(r) => {
                if *r < 1 || *r >= dim {
                    return Err(Error::InvalidPremise(format!(
                        "projection rank {r} out of 1..={}",
                        dim - 1
                    )));
                }
            }
            PremiseKind::DepolarizedPure(sigma) => {
                if sigma.dim() != dim {
                    return Err(Error::InvalidPremise(format!(
                        "depolarizing state has dimension {}, premise {dim}",
                        sigma.dim()
                    )));
                }
            }
            PremiseKind::Pure | PremiseKind::RealPure => {}
        }
        Ok(Self { kind, dim })
    }

    pub fn kind(&self) -> &PremiseKind {
        &self.kind
    }

    pub fn dim(&self) -> usize {
        self.dim
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    Certified,
    Refuted,
    SampledPass,
    SampledFail,
}

/// Two states with (near-)identical statistics under the scheme at issue.
#[derive(Clone, Debug, Serialize)]
pub struct WitnessPair {
    pub state1: DensityState,
    pub state2: DensityState,
    pub statistics_residual: f64,
}

/// Outcome of an informational-completeness check.
#[derive(Clone, Debug, Serialize)]
pub struct IcReport {
    pub verdict: Verdict,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<WitnessPair>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness_element: Option<HermitianOperator>,
    pub trials: usize,
    /// Smallest separation evidence seen: a statistics/HS-distance ratio for
    /// pair sampling, a third singular value for complement rank searches.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub min_separation_ratio: Option<f64>,
    /// For random-measurement experiments: whether the number of observables
    /// exceeds twice the premise's Minkowski dimension.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub exceeds_generic_threshold: Option<bool>,
}

impl IcReport {
    pub fn passes(&self) -> bool {
        matches!(self.verdict, Verdict::Certified | Verdict::SampledPass)
    }

    fn bare(verdict: Verdict) -> Self {
        Self {
            verdict,
            witness: None,
            witness_element: None,
            trials: 0,
            min_separation_ratio: None,
            exceeds_generic_threshold: None,
        }
    }
}

/// Orthogonal complement of the scheme's span (identity adjoined, since it
/// never adds distinguishing power).
pub fn complement_of_scheme(scheme: &Scheme) -> OperatorSubspace {
    scheme.span_with_identity().orthogonal_complement()
}

/// True iff the two states produce the same statistics under the scheme,
/// i.e. their difference projects to (numerically) zero on the scheme span.
pub fn statistics_collide(
    scheme: &Scheme,
    rho1: &DensityState,
    rho2: &DensityState,
) -> Result<bool> {
    if rho1.dim() != scheme.dim() || rho2.dim() != scheme.dim() {
        return Err(Error::DimensionMismatch {
            expected: scheme.dim(),
            got: if rho1.dim() != scheme.dim() {
                rho1.dim()
            } else {
                rho2.dim()
            },
        });
    }
    let span = scheme.span_with_identity();
    let delta = rho1.matrix() - rho2.matrix();
    Ok(span.project(&delta).frob_norm() <= COLLISION_TOL)
}

/// Splits a traceless rank-2 Hermitian operator `t = λ(P1 - P2)` into the
/// two pure states no scheme with `t` in its complement can distinguish.
pub fn indistinguishable_pair(t: &HermitianOperator) -> Result<(DensityState, DensityState)> {
    let trace = t.matrix().trace();
    if trace.norm() > 1e-10 * t.matrix().frob_norm().max(1.0) {
        return Err(Error::NotTraceless { trace: trace.re });
    }
    let rank = numeric_rank(t.matrix(), RANK_TOL);
    if rank != 2 {
        return Err(Error::UnexpectedRank { rank, expected: 2 });
    }
    let pairs = spectral_decompose(t);
    let top = &pairs[0];
    let bottom = &pairs[pairs.len() - 1];
    debug_assert!(top.0 > 0.0 && bottom.0 < 0.0);
    let s1 = DensityState::from_pure_vector(&top.1)?;
    let s2 = DensityState::from_pure_vector(&bottom.1)?;
    Ok((s1, s2))
}

/// Decides pure-state informational completeness from the scheme
/// complement: a scheme fails exactly when the complement holds a nonzero
/// selfadjoint operator of rank at most 2.
///
/// Complement dimensions 0 and 1 are decided exactly; dimension >= 2 falls
/// back to a multistart minimization of the third singular value over
/// selfadjoint unit-norm complement elements (qutrits are still decided
/// exactly through the determinant pencil).
pub fn pure_ic_rank_criterion(
    complement: &OperatorSubspace,
    search_budget: usize,
    rng_seed: u64,
) -> Result<IcReport> {
    if !complement.is_adjoint_closed() {
        return Err(Error::NotAdjointClosed);
    }
    let d = complement.space_dim();
    match complement.dim() {
        0 => Ok(IcReport::bare(Verdict::Certified)),
        1 => {
            let t = complement.hermitian_basis()?.remove(0);
            let sv = t.matrix().singular_values();
            let sigma3 = sv.get(2).copied().unwrap_or(0.0);
            if numeric_rank(t.matrix(), RANK_TOL) >= 3 {
                let mut report = IcReport::bare(Verdict::Certified);
                report.min_separation_ratio = Some(sigma3);
                Ok(report)
            } else {
                let (s1, s2) = indistinguishable_pair(&t)?;
                Ok(refutation_report(complement, t, s1, s2, 0))
            }
        }
        _ => {
            let basis = complement.hermitian_basis()?;
            if d == 3 {
                // the determinant pencil always yields a singular traceless
                // selfadjoint element in odd dimension 3
                let t = find_singular_combination(&basis[0], &basis[1])?;
                let (s1, s2) = indistinguishable_pair(&t)?;
                return Ok(refutation_report(complement, t, s1, s2, 0));
            }
            let (sigma3, best) = min_sigma3_multistart(&basis, search_budget.max(1), rng_seed);
            let trials = search_budget.max(1);
            if sigma3 <= COLLISION_TOL {
                let (s1, s2) = indistinguishable_pair(&best)?;
                return Ok(refutation_report(complement, best, s1, s2, trials));
            }
            let mut report = IcReport::bare(if sigma3 <= SIGMA3_SUSPICIOUS {
                Verdict::SampledFail
            } else {
                Verdict::SampledPass
            });
            report.trials = trials;
            report.min_separation_ratio = Some(sigma3);
            if sigma3 <= SIGMA3_SUSPICIOUS {
                report.witness_element = Some(best);
            }
            Ok(report)
        }
    }
}

fn refutation_report(
    complement: &OperatorSubspace,
    element: HermitianOperator,
    s1: DensityState,
    s2: DensityState,
    trials: usize,
) -> IcReport {
    // statistics residual bound: how far the witness difference sticks out
    // of the complement
    let delta = s1.matrix() - s2.matrix();
    let residual = complement.residual(&delta);
    debug_assert!(s1.hs_distance(&s2) >= WITNESS_MIN_DISTANCE);
    IcReport {
        verdict: Verdict::Refuted,
        witness: Some(WitnessPair {
            state1: s1,
            state2: s2,
            statistics_residual: residual,
        }),
        witness_element: Some(element),
        trials,
        min_separation_ratio: Some(0.0),
        exceeds_generic_threshold: None,
    }
}

/// Classification of qutrit POVMs by pure-state informational completeness.
#[derive(Clone, Debug)]
pub enum QutritClass {
    /// Complement is zero: informationally complete for all states.
    FullIc,
    /// Complement is spanned by a single invertible traceless selfadjoint
    /// operator: complete for pure states only.
    PureIcRankOne(HermitianOperator),
    /// A singular complement element exists; the witness pair collides.
    NotPureIc {
        singular: HermitianOperator,
        witness: (DensityState, DensityState),
    },
}

/// Sorts a qutrit POVM into one of the two complete classes or produces an
/// explicit indistinguishable pair.
pub fn qutrit_classify(a: &crate::opsys::Povm) -> Result<QutritClass> {
    if a.dim() != 3 {
        return Err(Error::QutritOnly { dim: a.dim() });
    }
    let complement = complement_of_scheme(&Scheme::Povm(a.clone()));
    match complement.dim() {
        0 => Ok(QutritClass::FullIc),
        1 => {
            let t = complement.hermitian_basis()?.remove(0);
            if numeric_rank(t.matrix(), RANK_TOL) == 3 {
                Ok(QutritClass::PureIcRankOne(t))
            } else {
                let witness = indistinguishable_pair(&t)?;
                Ok(QutritClass::NotPureIc { singular: t, witness })
            }
        }
        _ => {
            let basis = complement.hermitian_basis()?;
            let singular = find_singular_combination(&basis[0], &basis[1])?;
            let witness = indistinguishable_pair(&singular)?;
            Ok(QutritClass::NotPureIc { singular, witness })
        }
    }
}

/// Finds a unit-HS-norm singular selfadjoint element in the real pencil
/// spanned by two selfadjoint operators. In odd dimensions a sign
/// normalization always brackets a determinant root between the endpoints;
/// otherwise the pencil is scanned for a sign change.
pub fn find_singular_combination(
    x: &HermitianOperator,
    y: &HermitianOperator,
) -> Result<HermitianOperator> {
    if x.dim() != y.dim() {
        return Err(Error::DimensionMismatch {
            expected: x.dim(),
            got: y.dim(),
        });
    }
    let d = x.dim();
    let unit = |m: &ComplexMatrix| -> ComplexMatrix {
        m.scaled(Complex::new(1.0 / m.frob_norm(), 0.0))
    };
    let xm = unit(x.matrix());
    let ym = unit(y.matrix());
    let det = |m: &ComplexMatrix| -> f64 { m.determinant().re };
    let det_tol = 1e-12;

    let dx = det(&xm);
    let dy = det(&ym);
    if dx.abs() <= det_tol {
        return finish_singular(xm, d);
    }
    if dy.abs() <= det_tol {
        return finish_singular(ym, d);
    }

    // sign-normalize so det > 0 at t=1 and det < 0 at t=0 when possible
    let (mut a, mut b) = (xm.clone(), ym.clone());
    let mut da = dx;
    let mut db = dy;
    if d % 2 == 1 {
        if da < 0.0 {
            a = -&a;
            da = -da;
        }
        if db > 0.0 {
            b = -&b;
            db = -db;
        }
    }
    if da > 0.0 && db < 0.0 {
        let f = |t: f64| {
            let m = &a.scaled(Complex::new(t, 0.0)) + &b.scaled(Complex::new(1.0 - t, 0.0));
            m.determinant().re
        };
        let t0 = bisect_root(&f, 0.0, 1.0);
        let m = &a.scaled(Complex::new(t0, 0.0)) + &b.scaled(Complex::new(1.0 - t0, 0.0));
        return finish_singular(m, d);
    }

    // same-sign determinants in even dimension: scan directions in the pencil
    let g = |theta: f64| {
        let m = &xm.scaled(Complex::new(theta.cos(), 0.0))
            + &ym.scaled(Complex::new(theta.sin(), 0.0));
        m.determinant().re
    };
    let steps = 1440;
    let mut prev_theta = 0.0;
    let mut prev_val = g(0.0);
    for k in 1..=steps {
        let theta = std::f64::consts::PI * k as f64 / steps as f64;
        let val = g(theta);
        if val == 0.0 || val.signum() != prev_val.signum() {
            let t0 = bisect_root(&g, prev_theta, theta);
            let m = &xm.scaled(Complex::new(t0.cos(), 0.0))
                + &ym.scaled(Complex::new(t0.sin(), 0.0));
            return finish_singular(m, d);
        }
        prev_theta = theta;
        prev_val = val;
    }
    Err(Error::NoSingularCombination)
}

fn finish_singular(m: ComplexMatrix, d: usize) -> Result<HermitianOperator> {
    let norm = m.frob_norm();
    if norm <= 0.0 {
        return Err(Error::NoSingularCombination);
    }
    let t = HermitianOperator::symmetrize(&m.scaled(Complex::new(1.0 / norm, 0.0)));
    if numeric_rank(t.matrix(), RANK_TOL) >= d {
        return Err(Error::NoSingularCombination);
    }
    Ok(t)
}

fn bisect_root(f: &dyn Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    let mut flo = f(lo);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid == lo || mid == hi {
            break;
        }
        let fmid = f(mid);
        if fmid == 0.0 {
            return mid;
        }
        if fmid.signum() == flo.signum() {
            lo = mid;
            flo = fmid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

// ---------------------------------------------------------------------------
// Sampling
// ---------------------------------------------------------------------------

pub(crate) fn gaussian_complex_matrix(
    rows: usize,
    cols: usize,
    rng: &mut impl Rng,
) -> DMatrix<C64> {
    let normal = StandardNormal;
    DMatrix::from_fn(rows, cols, |_, _| {
        Complex::new(normal.sample(rng), normal.sample(rng))
    })
}

fn gaussian_complex_vector(d: usize, rng: &mut impl Rng) -> DVector<C64> {
    let normal = StandardNormal;
    DVector::from_fn(d, |_, _| Complex::new(normal.sample(rng), normal.sample(rng)))
}

/// Random Hermitian matrix `(G + G†)/2` with standard complex Gaussian `G`.
pub fn random_hermitian(d: usize, rng: &mut impl Rng) -> HermitianOperator {
    let g = gaussian_complex_matrix(d, d, rng);
    HermitianOperator::symmetrize(
        &ComplexMatrix::new(g).expect("gaussian entries are finite"),
    )
}

/// Draws one state from the premise with a fresh RNG for the given seed.
pub fn random_premise_state(premise: &Premise, rng_seed: u64) -> Result<DensityState> {
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    Ok(sample_premise_state(premise, &mut rng))
}

/// Draws one state from the premise using the provided generator.
pub fn sample_premise_state(premise: &Premise, rng: &mut impl Rng) -> DensityState {
    let d = premise.dim();
    match premise.kind() {
        PremiseKind::Pure => {
            let v = gaussian_complex_vector(d, rng);
            DensityState::from_pure_vector(&v).expect("gaussian vector is nonzero")
        }
        PremiseKind::RealPure => {
            let normal = StandardNormal;
            let v = DVector::from_fn(d, |_, _| Complex::new(normal.sample(rng), 0.0));
            DensityState::from_pure_vector(&v).expect("gaussian vector is nonzero")
        }
        PremiseKind::BoundedRank(r) => {
            let v = gaussian_complex_matrix(d, *r, rng);
            let w = &v * v.adjoint();
            let tr = w.trace().re;
            let m = ComplexMatrix::new(w * Complex::new(1.0 / tr, 0.0)).expect("finite");
            DensityState::with_declared_rank(HermitianOperator::symmetrize(&m), *r)
                .expect("normalized Gram matrix is a state")
        }
        PremiseKind::GrassmannProjections(r) => {
            let g = gaussian_complex_matrix(d, *r, rng);
            let q = g.qr().q();
            let p = &q * q.adjoint();
            let m = ComplexMatrix::new(p * Complex::new(1.0 / *r as f64, 0.0)).expect("finite");
            DensityState::with_declared_rank(HermitianOperator::symmetrize(&m), *r)
                .expect("normalized projection is a state")
        }
        PremiseKind::DepolarizedPure(sigma) => {
            let lambda: f64 = rng.random();
            let v = gaussian_complex_vector(d, rng);
            let pure = DensityState::from_pure_vector(&v).expect("nonzero");
            let m = &sigma.matrix().scaled(Complex::new(lambda, 0.0))
                + &pure.matrix().scaled(Complex::new(1.0 - lambda, 0.0));
            DensityState::new(HermitianOperator::symmetrize(&m))
                .expect("convex combination of states")
        }
    }
}

/// Samples `n_pairs` premise pairs and reports the smallest ratio
/// `‖Δ statistics‖ / ‖Δρ‖`. Pair i draws from RNG substream i+1, so the
/// result is independent of any work partition.
pub fn sampled_injectivity(
    scheme: &Scheme,
    premise: &Premise,
    n_pairs: usize,
    rng_seed: u64,
) -> Result<IcReport> {
    if scheme.dim() != premise.dim() {
        return Err(Error::DimensionMismatch {
            expected: premise.dim(),
            got: scheme.dim(),
        });
    }
    let mut min_ratio = f64::INFINITY;
    let mut worst: Option<(DensityState, DensityState, f64)> = None;
    for i in 0..n_pairs {
        let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
        rng.set_stream(i as u64 + 1);
        let rho1 = sample_premise_state(premise, &mut rng);
        let rho2 = sample_premise_state(premise, &mut rng);
        let dist = rho1.hs_distance(&rho2);
        if dist <= 1e-12 {
            continue;
        }
        let s1 = scheme.statistics(&rho1)?;
        let s2 = scheme.statistics(&rho2)?;
        let sep = s1.euclidean_distance(&s2);
        let ratio = sep / dist;
        if ratio < min_ratio {
            min_ratio = ratio;
            worst = Some((rho1, rho2, sep));
        }
    }
    let pass = min_ratio > SAMPLED_PASS_THRESHOLD;
    let mut report = IcReport::bare(if pass {
        Verdict::SampledPass
    } else {
        Verdict::SampledFail
    });
    report.trials = n_pairs;
    report.min_separation_ratio = Some(min_ratio);
    if !pass {
        if let Some((state1, state2, sep)) = worst {
            report.witness = Some(WitnessPair {
                state1,
                state2,
                statistics_residual: sep,
            });
        }
    }
    Ok(report)
}

/// Draws `m` random Hermitian observables and tests their injectivity on
/// the premise by pair sampling; almost any choice with `m` above twice the
/// premise dimension is expected to pass.
pub fn mane_experiment(
    premise: &Premise,
    m: usize,
    n_pairs: usize,
    rng_seed: u64,
) -> Result<IcReport> {
    if m == 0 {
        return Err(Error::InvalidArgument(
            "need at least one observable".into(),
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    let observables: Vec<HermitianOperator> = (0..m)
        .map(|_| random_hermitian(premise.dim(), &mut rng))
        .collect();
    let scheme = Scheme::Observables(ObservableSet::new(observables)?);
    let mut report = sampled_injectivity(&scheme, premise, n_pairs, rng_seed)?;
    let dim_bound = crate::bounds::minkowski_dim(premise)?;
    report.exceeds_generic_threshold = Some(m > 2 * dim_bound);
    Ok(report)
}

// ---------------------------------------------------------------------------
// Third-singular-value minimization over selfadjoint complement elements
// ---------------------------------------------------------------------------

fn combo(basis: &[HermitianOperator], theta: &[f64]) -> ComplexMatrix {
    let d = basis[0].dim();
    let mut out = ComplexMatrix::zeros(d);
    for (h, &c) in basis.iter().zip(theta) {
        out = &out + &h.matrix().scaled(Complex::new(c, 0.0));
    }
    out
}

/// Third singular value and its singular vectors (descending order).
fn sigma3_with_vectors(m: &ComplexMatrix) -> (f64, DVector<C64>, DVector<C64>) {
    let svd = m.raw().clone().svd(true, true);
    let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
    order.sort_by(|&a, &b| {
        svd.singular_values[b]
            .partial_cmp(&svd.singular_values[a])
            .unwrap()
    });
    let idx = order[2];
    let u = svd.u.as_ref().expect("u requested");
    let v_t = svd.v_t.as_ref().expect("v_t requested");
    (
        svd.singular_values[idx],
        u.column(idx).into_owned(),
        v_t.row(idx).adjoint(),
    )
}

fn normalize_theta(theta: &mut [f64]) {
    let n = theta.iter().map(|t| t * t).sum::<f64>().sqrt();
    if n > 0.0 {
        for t in theta.iter_mut() {
            *t /= n;
        }
    }
}

/// Multistart projected subgradient descent of `sigma_3` over unit-norm
/// selfadjoint combinations. Start i draws from RNG substream i, so the
/// search is deterministic per seed.
fn min_sigma3_multistart(
    basis: &[HermitianOperator],
    starts: usize,
    seed: u64,
) -> (f64, HermitianOperator) {
    let d = basis[0].dim();
    if d < 3 {
        // every nonzero selfadjoint traceless element already has rank <= 2
        return (0.0, basis[0].clone());
    }
    let m = basis.len();
    let normal = StandardNormal;
    let mut best_val = f64::INFINITY;
    let mut best_theta = vec![0.0; m];
    for start in 0..starts {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(start as u64);
        let mut theta: Vec<f64> = (0..m).map(|_| normal.sample(&mut rng)).collect();
        normalize_theta(&mut theta);
        let val = descend_sigma3(basis, &mut theta, 250);
        if val < best_val {
            best_val = val;
            best_theta = theta;
        }
        if best_val <= 1e-13 {
            break;
        }
    }
    // polish the best start
    let polished = descend_sigma3(basis, &mut best_theta, 600);
    let best = HermitianOperator::symmetrize(&combo(basis, &best_theta));
    (polished.min(best_val), best)
}

fn descend_sigma3(basis: &[HermitianOperator], theta: &mut [f64], iters: usize) -> f64 {
    let mut current = sigma3_with_vectors(&combo(basis, theta)).0;
    let mut step = 0.2;
    for _ in 0..iters {
        let t = combo(basis, theta);
        let (val, u3, v3) = sigma3_with_vectors(&t);
        current = val;
        if val <= 1e-15 || step <= 1e-14 {
            break;
        }
        // d sigma3 = Re(u3† H_j v3) per basis direction
        let mut grad: Vec<f64> = basis
            .iter()
            .map(|h| {
                let hv = h.matrix().raw() * &v3;
                u3.dotc(&hv).re
            })
            .collect();
        // project onto the tangent space of the unit sphere
        let along: f64 = grad.iter().zip(theta.iter()).map(|(g, t)| g * t).sum();
        for (g, t) in grad.iter_mut().zip(theta.iter()) {
            *g -= along * *t;
        }
        let gnorm = grad.iter().map(|g| g * g).sum::<f64>().sqrt();
        if gnorm <= 1e-16 {
            break;
        }
        let mut accepted = false;
        for _ in 0..30 {
            let mut cand: Vec<f64> = theta
                .iter()
                .zip(&grad)
                .map(|(t, g)| t - step * g)
                .collect();
            normalize_theta(&mut cand);
            let cand_val = sigma3_with_vectors(&combo(basis, &cand)).0;
            if cand_val < current {
                theta.copy_from_slice(&cand);
                current = cand_val;
                step *= 1.5;
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if !accepted {
            break;
        }
    }
    current
}
