//! POVMs, Hermitian observable sets and the conversions among them and
//! operator systems.

use num_complex::Complex;
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::matrix::{hs_dot, ComplexMatrix, DensityState, HermitianOperator, DEFAULT_TOL};
use crate::subspace::{orthonormalize, OperatorSubspace, SPAN_TOL};

/// A positive operator valued measure: PSD effects summing to the identity.
///
/// A single-effect POVM `{1}` is permitted and flagged degenerate; it arises
/// as the measurement generated by the trivial operator system `span{1}`.
#[derive(Clone, Debug)]
pub struct Povm {
    effects: Vec<HermitianOperator>,
}

impl Povm {
    pub fn new(effects: Vec<HermitianOperator>) -> Result<Self> {
        Self::with_tol(effects, DEFAULT_TOL)
    }

    pub fn with_tol(effects: Vec<HermitianOperator>, tol: f64) -> Result<Self> {
        let Some(first) = effects.first() else {
            return Err(Error::EmptyPovm);
        };
        let d = first.dim();
        let mut sum = ComplexMatrix::zeros(d);
        for (index, e) in effects.iter().enumerate() {
            if e.dim() != d {
                return Err(Error::DimensionMismatch {
                    expected: d,
                    got: e.dim(),
                });
            }
            let min_ev = e.min_eigenvalue();
            if min_ev < -tol * e.matrix().frob_norm().max(1.0) {
                return Err(Error::EffectNotPsd {
                    index,
                    min_eigenvalue: min_ev,
                });
            }
            sum = &sum + e.matrix();
        }
        let residual = (&sum - &ComplexMatrix::identity(d)).frob_norm();
        if residual > tol.max(tol * (d as f64).sqrt()) {
            return Err(Error::EffectsSumNotIdentity { residual });
        }
        Ok(Self { effects })
    }

    pub fn dim(&self) -> usize {
        self.effects[0].dim()
    }

    pub fn len(&self) -> usize {
        self.effects.len()
    }

    pub fn is_empty(&self) -> bool {
        self.effects.is_empty()
    }

    pub fn is_degenerate(&self) -> bool {
        self.effects.len() == 1
    }

    pub fn effects(&self) -> &[HermitianOperator] {
        &self.effects
    }

    /// Outcome probabilities `tr(ρ A_j)`.
    pub fn statistics(&self, rho: &DensityState) -> Result<ExpectationVector> {
        statistics_of(&self.effects, rho)
    }
}

/// A finite collection of Hermitian observables measured by expectation.
#[derive(Clone, Debug)]
pub struct ObservableSet {
    observables: Vec<HermitianOperator>,
}

impl ObservableSet {
    pub fn new(observables: Vec<HermitianOperator>) -> Result<Self> {
        let Some(first) = observables.first() else {
            return Err(Error::EmptyObservableSet);
        };
        let d = first.dim();
        for o in &observables {
            if o.dim() != d {
                return Err(Error::DimensionMismatch {
                    expected: d,
                    got: o.dim(),
                });
            }
        }
        Ok(Self { observables })
    }

    pub fn dim(&self) -> usize {
        self.observables[0].dim()
    }

    pub fn len(&self) -> usize {
        self.observables.len()
    }

    pub fn is_empty(&self) -> bool {
        self.observables.is_empty()
    }

    pub fn observables(&self) -> &[HermitianOperator] {
        &self.observables
    }

    pub fn statistics(&self, rho: &DensityState) -> Result<ExpectationVector> {
        statistics_of(&self.observables, rho)
    }
}

/// Real statistics vector: probabilities for POVM outcomes, expectation
/// values for observables.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExpectationVector {
    pub values: Vec<f64>,
}

impl ExpectationVector {
    pub fn new(values: Vec<f64>) -> Self {
        Self { values }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn euclidean_distance(&self, other: &ExpectationVector) -> f64 {
        self.values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt()
    }
}

fn statistics_of(ops: &[HermitianOperator], rho: &DensityState) -> Result<ExpectationVector> {
    let d = rho.dim();
    let mut values = Vec::with_capacity(ops.len());
    for op in ops {
        if op.dim() != d {
            return Err(Error::DimensionMismatch {
                expected: op.dim(),
                got: d,
            });
        }
        // tr(rho A) = <rho, A>_HS for Hermitian rho
        values.push(hs_dot(rho.matrix(), op.matrix()).re);
    }
    Ok(ExpectationVector::new(values))
}

/// An operator subspace verified to contain the identity and be closed
/// under adjoints.
#[derive(Clone, Debug)]
pub struct OperatorSystem {
    space: OperatorSubspace,
}

impl OperatorSystem {
    pub fn try_new(space: OperatorSubspace) -> Result<Self> {
        if !space.contains_identity() || !space.is_adjoint_closed() {
            return Err(Error::NotOperatorSystem {
                contains_identity: space.contains_identity(),
                adjoint_closed: space.is_adjoint_closed(),
            });
        }
        Ok(Self { space })
    }

    pub fn subspace(&self) -> &OperatorSubspace {
        &self.space
    }

    pub fn dim(&self) -> usize {
        self.space.dim()
    }

    pub fn space_dim(&self) -> usize {
        self.space.space_dim()
    }
}

/// The operator system spanned by a POVM's effects.
pub fn span_of_povm(a: &Povm) -> Result<OperatorSystem> {
    let mats: Vec<ComplexMatrix> = a.effects().iter().map(|e| e.matrix().clone()).collect();
    let space = OperatorSubspace::from_spanning(a.dim(), &mats)?;
    OperatorSystem::try_new(space)
}

/// Builds a POVM spanning a given operator system with exactly `dim`
/// outcomes: a positive basis `{E_1..E_m, 1}` is extracted by splitting the
/// basis into Hermitian and then positive parts, and the effects are
/// `A_j = E_j/(m ‖E_j‖)` with `A_{m+1} = 1 - Σ A_j`.
pub fn povm_from_operator_system(s: &OperatorSystem) -> Result<Povm> {
    let d = s.space_dim();
    let target = s.dim();
    let identity = ComplexMatrix::identity(d);

    if target == 1 {
        // span{1}: the degenerate single-effect measurement
        return Povm::new(vec![HermitianOperator::identity(d)]);
    }

    // Positive candidates in deterministic basis order.
    let mut candidates: Vec<HermitianOperator> = Vec::new();
    for b in s.subspace().basis() {
        let hermitians: Vec<HermitianOperator> = if b.is_hermitian(SPAN_TOL) {
            vec![HermitianOperator::symmetrize(b)]
        } else {
            let (h1, h2) = crate::matrix::split_selfadjoint(b);
            vec![h1, h2]
        };
        for h in hermitians {
            if h.matrix().frob_norm() <= SPAN_TOL {
                continue;
            }
            let (p1, p2) = crate::matrix::split_positive(&h);
            candidates.push(p1);
            candidates.push(p2);
        }
    }

    // Greedily pick m = dim - 1 positives that stay independent of {1, picked}.
    let m = target - 1;
    let mut ortho = orthonormalize(std::slice::from_ref(&identity), SPAN_TOL);
    let mut picked: Vec<HermitianOperator> = Vec::new();
    for cand in candidates {
        if picked.len() == m {
            break;
        }
        let norm = cand.matrix().frob_norm();
        if norm <= SPAN_TOL {
            continue;
        }
        let mut r = cand.matrix().clone();
        for _ in 0..2 {
            for b in &ortho {
                let c = hs_dot(b, &r);
                r = &r - &b.scaled(c);
            }
        }
        let res = r.frob_norm();
        if res > SPAN_TOL * norm.max(1.0) {
            ortho.push(r.scaled(Complex::new(1.0 / res, 0.0)));
            picked.push(cand);
        }
    }
    if picked.len() != m {
        return Err(Error::InvalidArgument(format!(
            "positive basis extraction found {} of {} independent elements",
            picked.len(),
            m
        )));
    }

    let mut effects: Vec<HermitianOperator> = Vec::with_capacity(target);
    let mut sum = ComplexMatrix::zeros(d);
    for e in &picked {
        let scale = 1.0 / (m as f64 * e.matrix().operator_norm());
        let a = HermitianOperator::symmetrize(&e.matrix().scaled(Complex::new(scale, 0.0)));
        sum = &sum + a.matrix();
        effects.push(a);
    }
    let last = HermitianOperator::symmetrize(&(&identity - &sum));
    effects.push(last);
    Povm::new(effects)
}

/// Turns observables `{S_j}` into a POVM with one extra outcome via
/// `A_j = (1/2 + S_j/(2‖S_j‖))/(n-1)`; informational completeness is
/// preserved in both directions.
pub fn povm_from_observables(obs: &ObservableSet) -> Result<Povm> {
    let d = obs.dim();
    let n_minus_1 = obs.len();
    let identity = ComplexMatrix::identity(d);
    let mut effects: Vec<HermitianOperator> = Vec::with_capacity(n_minus_1 + 1);
    let mut sum = ComplexMatrix::zeros(d);
    for s in obs.observables() {
        let norm = s.matrix().operator_norm();
        let dir = if norm > SPAN_TOL {
            // (1/2) 1 + (1/2) S/||S||
            &identity.scaled(Complex::new(0.5, 0.0))
                + &s.matrix().scaled(Complex::new(0.5 / norm, 0.0))
        } else {
            // zero observable: no direction term
            identity.scaled(Complex::new(0.5, 0.0))
        };
        let a =
            HermitianOperator::symmetrize(&dir.scaled(Complex::new(1.0 / n_minus_1 as f64, 0.0)));
        sum = &sum + a.matrix();
        effects.push(a);
    }
    effects.push(HermitianOperator::symmetrize(&(&identity - &sum)));
    Povm::new(effects)
}

/// Drops the redundant last effect; the remaining `n-1` operators carry the
/// same information as the POVM.
pub fn observables_from_povm(a: &Povm) -> Result<ObservableSet> {
    if a.len() < 2 {
        return Err(Error::InvalidArgument(
            "cannot drop an effect from a single-effect POVM".into(),
        ));
    }
    ObservableSet::new(a.effects()[..a.len() - 1].to_vec())
}

/// Either kind of measurement scheme, as read from scheme JSON files.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Scheme {
    Povm(Povm),
    Observables(ObservableSet),
}

impl Scheme {
    pub fn dim(&self) -> usize {
        match self {
            Scheme::Povm(p) => p.dim(),
            Scheme::Observables(o) => o.dim(),
        }
    }

    pub fn len(&self) -> usize {
        match self {
            Scheme::Povm(p) => p.len(),
            Scheme::Observables(o) => o.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn statistics(&self, rho: &DensityState) -> Result<ExpectationVector> {
        match self {
            Scheme::Povm(p) => p.statistics(rho),
            Scheme::Observables(o) => o.statistics(rho),
        }
    }

    pub fn operators(&self) -> &[HermitianOperator] {
        match self {
            Scheme::Povm(p) => p.effects(),
            Scheme::Observables(o) => o.observables(),
        }
    }

    /// The span of the scheme's operators with the identity adjoined
    /// (expectations only ever add the constant `tr ρ = 1`).
    pub fn span_with_identity(&self) -> OperatorSubspace {
        let d = self.dim();
        let mut mats: Vec<ComplexMatrix> = vec![ComplexMatrix::identity(d)];
        mats.extend(self.operators().iter().map(|o| o.matrix().clone()));
        OperatorSubspace::from_spanning(d, &mats).expect("operators share the scheme dimension")
    }
}

// ---------------------------------------------------------------------------
// JSON: {"dim": d, "effects": [...]} / {"dim": d, "observables": [...]}
// ---------------------------------------------------------------------------

#[derive(Serialize, Deserialize)]
struct PovmJson {
    dim: usize,
    effects: Vec<HermitianOperator>,
}

impl Serialize for Povm {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        PovmJson {
            dim: self.dim(),
            effects: self.effects.clone(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for Povm {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let j = PovmJson::deserialize(d)?;
        let povm = Povm::new(j.effects).map_err(D::Error::custom)?;
        if povm.dim() != j.dim {
            return Err(D::Error::custom("dim field disagrees with effects"));
        }
        Ok(povm)
    }
}

#[derive(Serialize, Deserialize)]
struct ObservablesJson {
    dim: usize,
    observables: Vec<HermitianOperator>,
}

impl Serialize for ObservableSet {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        ObservablesJson {
            dim: self.dim(),
            observables: self.observables.clone(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for ObservableSet {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let j = ObservablesJson::deserialize(d)?;
        let set = ObservableSet::new(j.observables).map_err(D::Error::custom)?;
        if set.dim() != j.dim {
            return Err(D::Error::custom("dim field disagrees with observables"));
        }
        Ok(set)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::{numeric_rank, pauli_x, pauli_y, pauli_z, ONE, RANK_TOL, ZERO};

    fn herm(m: ComplexMatrix) -> HermitianOperator {
        HermitianOperator::new(m).unwrap()
    }

    #[test]
    fn trivial_povm_spans_identity() {
        let half_id = ComplexMatrix::identity(2).scaled(Complex::new(0.5, 0.0));
        let povm = Povm::new(vec![herm(half_id.clone()), herm(half_id)]).unwrap();
        let s = span_of_povm(&povm).unwrap();
        assert_eq!(s.dim(), 1);
    }

    #[test]
    fn tetrahedral_povm_spans_full_space() {
        // qubit SIC-like POVM from the four tetrahedral Bloch vectors
        let dirs = [
            [1.0, 1.0, 1.0],
            [1.0, -1.0, -1.0],
            [-1.0, 1.0, -1.0],
            [-1.0, -1.0, 1.0],
        ];
        let sqrt3 = 3f64.sqrt();
        let effects: Vec<HermitianOperator> = dirs
            .iter()
            .map(|v| {
                let bloch = &(&pauli_x().scaled(Complex::new(v[0] / sqrt3, 0.0))
                    + &pauli_y().scaled(Complex::new(v[1] / sqrt3, 0.0)))
                    + &pauli_z().scaled(Complex::new(v[2] / sqrt3, 0.0));
                let m = &ComplexMatrix::identity(2) + &bloch;
                HermitianOperator::symmetrize(&m.scaled(Complex::new(0.25, 0.0)))
            })
            .collect();
        let povm = Povm::new(effects).unwrap();
        let s = span_of_povm(&povm).unwrap();
        assert_eq!(s.dim(), 4);
    }

    #[test]
    fn povm_from_trivial_operator_system_is_degenerate() {
        let s = OperatorSystem::try_new(
            OperatorSubspace::from_spanning(2, &[ComplexMatrix::identity(2)]).unwrap(),
        )
        .unwrap();
        let povm = povm_from_operator_system(&s).unwrap();
        assert_eq!(povm.len(), 1);
        assert!(povm.is_degenerate());
    }

    #[test]
    fn povm_from_full_operator_system() {
        let s = OperatorSystem::try_new(
            OperatorSubspace::from_spanning(
                2,
                &[
                    ComplexMatrix::identity(2),
                    pauli_x(),
                    pauli_y(),
                    pauli_z(),
                ],
            )
            .unwrap(),
        )
        .unwrap();
        let povm = povm_from_operator_system(&s).unwrap();
        assert_eq!(povm.len(), 4);
        let back = span_of_povm(&povm).unwrap();
        assert!(back.subspace().spans_same(s.subspace(), 1e-9));
    }

    #[test]
    fn povm_from_diagonal_operator_system() {
        let s = OperatorSystem::try_new(
            OperatorSubspace::from_spanning(2, &[ComplexMatrix::identity(2), pauli_z()]).unwrap(),
        )
        .unwrap();
        let povm = povm_from_operator_system(&s).unwrap();
        assert_eq!(povm.len(), 2);
        let back = span_of_povm(&povm).unwrap();
        assert_eq!(back.dim(), 2);
        assert!(back.subspace().spans_same(s.subspace(), 1e-9));
    }

    #[test]
    fn round_trip_span_of_generated_povm() {
        let diag = ComplexMatrix::from_diagonal(&[ONE, -ONE, ZERO]);
        let sub =
            OperatorSubspace::from_spanning(3, &[ComplexMatrix::identity(3), diag]).unwrap();
        let s = OperatorSystem::try_new(sub).unwrap();
        let povm = povm_from_operator_system(&s).unwrap();
        let back = span_of_povm(&povm).unwrap();
        assert!(back.subspace().spans_same(s.subspace(), 1e-9));
    }

    #[test]
    fn observables_to_povm_single_sigma_z() {
        let obs = ObservableSet::new(vec![herm(pauli_z())]).unwrap();
        let povm = povm_from_observables(&obs).unwrap();
        assert_eq!(povm.len(), 2);
        let e11 = ComplexMatrix::from_diagonal(&[ONE, ZERO]);
        let e22 = ComplexMatrix::from_diagonal(&[ZERO, ONE]);
        assert!((povm.effects()[0].matrix() - &e11).frob_norm() < 1e-12);
        assert!((povm.effects()[1].matrix() - &e22).frob_norm() < 1e-12);
    }

    #[test]
    fn observables_to_povm_pauli_triple() {
        let obs =
            ObservableSet::new(vec![herm(pauli_x()), herm(pauli_y()), herm(pauli_z())]).unwrap();
        let povm = povm_from_observables(&obs).unwrap();
        assert_eq!(povm.len(), 4);
        // PSD checked by the constructor; verify the upper bound A_j <= 1/(n-1)
        for e in povm.effects().iter().take(3) {
            let bounded = &ComplexMatrix::identity(2).scaled(Complex::new(1.0 / 3.0, 0.0))
                - e.matrix();
            assert!(HermitianOperator::symmetrize(&bounded).is_psd(1e-10));
        }
    }

    #[test]
    fn observables_from_povm_drops_last() {
        let obs = ObservableSet::new(vec![herm(pauli_z())]).unwrap();
        let povm = povm_from_observables(&obs).unwrap();
        let back = observables_from_povm(&povm).unwrap();
        assert_eq!(back.len(), 1);
    }

    #[test]
    fn statistics_of_maximally_mixed() {
        let obs =
            ObservableSet::new(vec![herm(pauli_x()), herm(pauli_y()), herm(pauli_z())]).unwrap();
        let povm = povm_from_observables(&obs).unwrap();
        let rho = DensityState::maximally_mixed(2);
        let stats = povm.statistics(&rho).unwrap();
        for (j, v) in stats.values.iter().enumerate() {
            let expect = povm.effects()[j].matrix().trace().re / 2.0;
            assert!((v - expect).abs() < 1e-12);
        }
        let total: f64 = stats.values.iter().sum();
        assert!((total - 1.0).abs() < 1e-12);
    }

    #[test]
    fn statistics_matches_entrywise_oracle() {
        use rand::rngs::StdRng;
        use rand::{Rng, SeedableRng};
        let mut rng = StdRng::seed_from_u64(42);
        let d = 3;
        let g = ComplexMatrix::from_fn(d, |_, _| {
            Complex::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5)
        });
        let psd = &g * &g.adjoint();
        let tr = psd.trace().re;
        let rho =
            DensityState::new(HermitianOperator::symmetrize(&psd.scaled(Complex::new(
                1.0 / tr,
                0.0,
            ))))
            .unwrap();
        let obs = ObservableSet::new(vec![herm(ComplexMatrix::from_diagonal(&[
            ONE,
            -ONE,
            ZERO,
        ]))])
        .unwrap();
        let stats = obs.statistics(&rho).unwrap();
        // oracle: explicit double loop over tr(rho A)
        let mut tr_direct = Complex::new(0.0, 0.0);
        for i in 0..d {
            for j in 0..d {
                tr_direct += rho.matrix().entry(i, j) * obs.observables()[0].matrix().entry(j, i);
            }
        }
        assert!((stats.values[0] - tr_direct.re).abs() < 1e-12);
    }

    #[test]
    fn basis_state_expectation() {
        let e11 = ComplexMatrix::from_diagonal(&[ONE, ZERO]);
        let rho = DensityState::new(herm(e11)).unwrap();
        let obs = ObservableSet::new(vec![herm(pauli_z())]).unwrap();
        let stats = obs.statistics(&rho).unwrap();
        assert!((stats.values[0] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn degenerate_rank_preserved_via_numeric_rank() {
        let e11 = ComplexMatrix::from_diagonal(&[ONE, ZERO]);
        assert_eq!(numeric_rank(&e11, RANK_TOL), 1);
    }

    #[test]
    fn scheme_json_round_trip() {
        let obs =
            ObservableSet::new(vec![herm(pauli_x()), herm(pauli_z())]).unwrap();
        let text = serde_json::to_string(&Scheme::Observables(obs)).unwrap();
        let parsed: Scheme = serde_json::from_str(&text).unwrap();
        assert!(matches!(parsed, Scheme::Observables(_)));
        assert_eq!(serde_json::to_string(&parsed).unwrap(), text);
    }
}
