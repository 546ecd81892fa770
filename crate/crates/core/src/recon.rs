//! Reconstruction of a rank-bounded state from noiseless POVM statistics,
//! via a factored parameterization `ρ = VV†/tr(VV†)` that enforces the rank
//! constraint by construction, plus a full-span linear-inversion baseline.

use nalgebra::DMatrix;
use num_complex::Complex;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::matrix::{ComplexMatrix, DensityState, HermitianOperator, C64};
use crate::opsys::{ExpectationVector, Povm};
use crate::subspace::{hermitian_canonical_basis, hermitian_coordinates};
use crate::verify::gaussian_complex_matrix;

/// Statistics residual below which a factored reconstruction counts as
/// converged.
pub const CONVERGENCE_RESIDUAL: f64 = 1e-8;

/// Residual the inner descent polishes down to; the extra two orders keep
/// the state error itself near the convergence bar.
const INNER_TARGET: f64 = 1e-11;

#[derive(Clone, Copy, Debug)]
pub struct ReconstructOptions {
    pub max_starts: usize,
    pub max_iters: usize,
    pub seed: u64,
}

impl Default for ReconstructOptions {
    fn default() -> Self {
        Self {
            max_starts: 16,
            max_iters: 60_000,
            seed: 0,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ReconstructionResult {
    pub state: DensityState,
    pub residual: f64,
    pub starts_used: usize,
    pub converged: bool,
}

fn validate_probs(a: &Povm, probs: &ExpectationVector) -> Result<()> {
    if probs.len() != a.len() {
        return Err(Error::WrongExpectationCount {
            expected: a.len(),
            got: probs.len(),
        });
    }
    if probs.values.iter().any(|p| *p < -1e-9 || !p.is_finite()) {
        return Err(Error::InfeasibleProbabilities(
            "negative or non-finite entry".into(),
        ));
    }
    let total: f64 = probs.values.iter().sum();
    if (total - 1.0).abs() > 1e-7 {
        return Err(Error::InfeasibleProbabilities(format!(
            "probabilities sum to {total}"
        )));
    }
    Ok(())
}

/// Squared statistics misfit and its matrix gradient with respect to the
/// conjugate factor, defined so that `df = 2 Re⟨G, dV⟩`.
pub fn misfit_and_gradient(
    effects: &[HermitianOperator],
    probs: &[f64],
    v: &DMatrix<C64>,
) -> (f64, DMatrix<C64>) {
    let trace = (v.adjoint() * v).trace().re;
    let mut f = 0.0;
    let mut grad = DMatrix::<C64>::zeros(v.nrows(), v.ncols());
    let mut weighted_residual = 0.0;
    for (a, &p) in effects.iter().zip(probs) {
        let av = a.matrix().raw() * v;
        let h = (v.adjoint() * &av).trace().re / trace;
        let e = h - p;
        f += e * e;
        // d h = (A V - h V)/trace, accumulated as 2 e (A V)/trace first
        grad += &av * Complex::new(2.0 * e / trace, 0.0);
        weighted_residual += 2.0 * e * h;
    }
    grad -= v * Complex::new(weighted_residual / trace, 0.0);
    (f, grad)
}

/// Recovers the (unique, when the POVM is informationally complete for the
/// rank premise) rank-`r` state matching noiseless probabilities.
///
/// Each start runs gradient descent on the factor with a Barzilai-Borwein
/// step and a backtracking line search; starts are taken in index order and
/// the first to reach the residual target wins.
pub fn reconstruct_rank_r(
    a: &Povm,
    probs: &ExpectationVector,
    r: usize,
    opts: ReconstructOptions,
) -> Result<ReconstructionResult> {
    if r < 1 || r > a.dim() {
        return Err(Error::RankOutOfRange { rank: r, dim: a.dim() });
    }
    validate_probs(a, probs)?;
    let d = a.dim();
    let mut best: Option<(f64, DMatrix<C64>)> = None;
    let mut starts_used = 0;
    for start in 0..opts.max_starts.max(1) {
        starts_used = start + 1;
        let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
        rng.set_stream(start as u64);
        let mut v = gaussian_complex_matrix(d, r, &mut rng);
        let tr = (v.adjoint() * &v).trace().re.sqrt();
        v /= Complex::new(tr, 0.0);
        let f = descend(a.effects(), &probs.values, &mut v, opts.max_iters);
        if best.as_ref().is_none_or(|(bf, _)| f < *bf) {
            best = Some((f, v.clone()));
        }
        if f.sqrt() <= CONVERGENCE_RESIDUAL {
            break;
        }
    }
    let (f, v) = best.expect("at least one start");
    let w = &v * v.adjoint();
    let trace = w.trace().re;
    let m = ComplexMatrix::new(w * Complex::new(1.0 / trace, 0.0))?;
    let state = DensityState::with_declared_rank(HermitianOperator::symmetrize(&m), r)?;
    let residual = f.sqrt();
    Ok(ReconstructionResult {
        state,
        residual,
        starts_used,
        converged: residual <= CONVERGENCE_RESIDUAL,
    })
}

fn descend(
    effects: &[HermitianOperator],
    probs: &[f64],
    v: &mut DMatrix<C64>,
    max_iters: usize,
) -> f64 {
    let (mut f, mut grad) = misfit_and_gradient(effects, probs, v);
    let mut step = 0.05;
    let mut prev: Option<(DMatrix<C64>, DMatrix<C64>)> = None; // (v, grad)
    // non-monotone (GLL) reference window lets the Barzilai-Borwein step
    // run at full length
    let mut window = [f; 8];
    let mut best = f;
    let mut best_v = v.clone();
    for it in 0..max_iters {
        if f.sqrt() <= INNER_TARGET {
            break;
        }
        let gnorm2 = grad.iter().map(|z| z.norm_sqr()).sum::<f64>();
        if gnorm2 <= 1e-30 {
            break;
        }
        if let Some((pv, pg)) = &prev {
            let dv = &*v - pv;
            let dg = &grad - pg;
            let num = dv.iter().zip(dg.iter()).map(|(a, b)| (a.conj() * b).re).sum::<f64>();
            let den = dg.iter().map(|z| z.norm_sqr()).sum::<f64>();
            if num.is_finite() && den > 1e-30 && num > 0.0 {
                step = (num / den).clamp(1e-12, 10.0);
            }
        }
        let reference = window.iter().cloned().fold(f64::MIN, f64::max);
        let mut accepted = false;
        for _ in 0..40 {
            let cand = &*v - &grad * Complex::new(step, 0.0);
            let (cf, cg) = misfit_and_gradient(effects, probs, &cand);
            if cf <= reference - 1e-4 * step * gnorm2 {
                prev = Some((v.clone(), grad.clone()));
                *v = cand;
                f = cf;
                grad = cg;
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if !accepted {
            break;
        }
        window[it % window.len()] = f;
        if f < best {
            best = f;
            best_v = v.clone();
        }
    }
    if best < f {
        *v = best_v;
    }
    best.min(f)
}

/// Unique Hermitian solution of `tr(ρ A_j) = p_j` for a full-span POVM via
/// the pseudo-inverse of the measurement map. The output may fail to be PSD
/// when the probabilities are perturbed; callers inspect it.
pub fn linear_inversion(a: &Povm, probs: &ExpectationVector) -> Result<HermitianOperator> {
    if probs.len() != a.len() {
        return Err(Error::WrongExpectationCount {
            expected: a.len(),
            got: probs.len(),
        });
    }
    let d = a.dim();
    let basis = hermitian_canonical_basis(d);
    let n = a.len();
    let mut m = DMatrix::<f64>::zeros(n, d * d);
    for (j, e) in a.effects().iter().enumerate() {
        for (k, c) in hermitian_coordinates(e.matrix(), &basis).into_iter().enumerate() {
            m[(j, k)] = c;
        }
    }
    let svd = m.clone().svd(true, true);
    let sigma_max = svd.singular_values.iter().cloned().fold(0.0f64, f64::max);
    let rank = svd
        .singular_values
        .iter()
        .filter(|&&s| s > 1e-10 * sigma_max.max(1.0))
        .count();
    if rank < d * d {
        return Err(Error::RankDeficientSpan {
            rank,
            needed: d * d,
        });
    }
    let rhs = nalgebra::DVector::from_column_slice(&probs.values);
    let coeffs = svd
        .solve(&rhs, 1e-12 * sigma_max.max(1.0))
        .map_err(|e| Error::InvalidArgument(e.to_string()))?;
    let mut out = ComplexMatrix::zeros(d);
    for (k, b) in basis.iter().enumerate() {
        out = &out + &b.matrix().scaled(Complex::new(coeffs[k], 0.0));
    }
    Ok(HermitianOperator::symmetrize(&out))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rankcon::rank_constrained_povm;
    use crate::verify::{random_premise_state, Premise, PremiseKind};

    #[test]
    fn gradient_matches_finite_differences() {
        let povm = rank_constrained_povm(4, 1).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let v0 = gaussian_complex_matrix(4, 1, &mut rng);
        let target = random_premise_state(&Premise::new(PremiseKind::Pure, 4).unwrap(), 9).unwrap();
        let probs = povm.statistics(&target).unwrap();
        let (_, grad) = misfit_and_gradient(povm.effects(), &probs.values, &v0);
        let eps = 1e-6;
        for idx in 0..v0.len() {
            for part in 0..2 {
                let mut plus = v0.clone();
                let mut minus = v0.clone();
                let delta = if part == 0 {
                    Complex::new(eps, 0.0)
                } else {
                    Complex::new(0.0, eps)
                };
                plus[idx] += delta;
                minus[idx] -= delta;
                let (fp, _) = misfit_and_gradient(povm.effects(), &probs.values, &plus);
                let (fm, _) = misfit_and_gradient(povm.effects(), &probs.values, &minus);
                let fd = (fp - fm) / (2.0 * eps);
                let analytic = if part == 0 {
                    2.0 * grad[idx].re
                } else {
                    2.0 * grad[idx].im
                };
                let scale = fd.abs().max(analytic.abs()).max(1e-6);
                assert!(
                    (fd - analytic).abs() / scale <= 1e-6,
                    "idx {idx} part {part}: fd {fd} vs {analytic}"
                );
            }
        }
    }

    #[test]
    fn objective_is_gauge_invariant() {
        let povm = rank_constrained_povm(5, 2).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let v = gaussian_complex_matrix(5, 2, &mut rng);
        let target =
            random_premise_state(&Premise::new(PremiseKind::BoundedRank(2), 5).unwrap(), 3)
                .unwrap();
        let probs = povm.statistics(&target).unwrap();
        // random unitary from QR
        let q = gaussian_complex_matrix(2, 2, &mut rng).qr().q();
        let (f1, _) = misfit_and_gradient(povm.effects(), &probs.values, &v);
        let vu = &v * &q;
        let (f2, _) = misfit_and_gradient(povm.effects(), &probs.values, &vu);
        assert!((f1 - f2).abs() <= 1e-12 * f1.max(1.0));
    }

    #[test]
    fn recovers_pure_target() {
        let povm = rank_constrained_povm(4, 1).unwrap();
        let premise = Premise::new(PremiseKind::Pure, 4).unwrap();
        let target = random_premise_state(&premise, 21).unwrap();
        let probs = povm.statistics(&target).unwrap();
        let result = reconstruct_rank_r(&povm, &probs, 1, ReconstructOptions::default()).unwrap();
        assert!(result.converged, "residual {}", result.residual);
        assert!(result.state.hs_distance(&target) <= 1e-5);
    }

    #[test]
    fn infeasible_maximally_mixed_does_not_converge_to_it() {
        let povm = rank_constrained_povm(4, 1).unwrap();
        let mixed = DensityState::maximally_mixed(4);
        let probs = povm.statistics(&mixed).unwrap();
        let opts = ReconstructOptions {
            max_starts: 2,
            max_iters: 600,
            seed: 4,
        };
        let result = reconstruct_rank_r(&povm, &probs, 1, opts).unwrap();
        // the target is outside the rank-1 premise: either we fail to
        // converge or we sit at a genuine misfit floor
        if result.converged {
            assert!(result.state.hs_distance(&mixed) > 1e-3);
        } else {
            assert!(result.residual > CONVERGENCE_RESIDUAL);
        }
    }

    #[test]
    fn rejects_bad_probabilities() {
        let povm = rank_constrained_povm(3, 1).unwrap();
        let bad = ExpectationVector::new(vec![0.5; 8]);
        assert!(matches!(
            reconstruct_rank_r(&povm, &bad, 1, ReconstructOptions::default()),
            Err(Error::InfeasibleProbabilities(_))
        ));
        let short = ExpectationVector::new(vec![0.5, 0.5]);
        assert!(reconstruct_rank_r(&povm, &short, 1, ReconstructOptions::default()).is_err());
    }

    #[test]
    fn linear_inversion_round_trip() {
        // a full-span POVM: complement of the zero subspace
        let sub = crate::subspace::OperatorSubspace::zero(3).orthogonal_complement();
        let system = crate::opsys::OperatorSystem::try_new(sub).unwrap();
        let povm = crate::opsys::povm_from_operator_system(&system).unwrap();
        assert_eq!(povm.len(), 9);
        let premise = Premise::new(PremiseKind::BoundedRank(3), 3).unwrap();
        let target = random_premise_state(&premise, 2).unwrap();
        let probs = povm.statistics(&target).unwrap();
        let recovered = linear_inversion(&povm, &probs).unwrap();
        assert!((recovered.matrix() - target.matrix()).frob_norm() <= 1e-10);

        let mixed = DensityState::maximally_mixed(3);
        let probs = povm.statistics(&mixed).unwrap();
        let recovered = linear_inversion(&povm, &probs).unwrap();
        assert!((recovered.matrix() - mixed.matrix()).frob_norm() <= 1e-10);
    }

    #[test]
    fn linear_inversion_perturbed_probs_stay_hermitian() {
        let sub = crate::subspace::OperatorSubspace::zero(2).orthogonal_complement();
        let system = crate::opsys::OperatorSystem::try_new(sub).unwrap();
        let povm = crate::opsys::povm_from_operator_system(&system).unwrap();
        let mixed = DensityState::maximally_mixed(2);
        let mut probs = povm.statistics(&mixed).unwrap();
        probs.values[0] += 0.2;
        probs.values[1] -= 0.2;
        let out = linear_inversion(&povm, &probs).unwrap();
        assert!(out.matrix().is_hermitian(1e-10));
    }

    #[test]
    fn linear_inversion_rejects_rank_deficient_span() {
        let povm = rank_constrained_povm(4, 1).unwrap(); // spans 12 < 16 dims
        let mixed = DensityState::maximally_mixed(4);
        let probs = povm.statistics(&mixed).unwrap();
        assert!(matches!(
            linear_inversion(&povm, &probs),
            Err(Error::RankDeficientSpan { .. })
        ));
    }
}
