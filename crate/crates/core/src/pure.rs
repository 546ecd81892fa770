//! Pure-state measurement schemes: the 4d-5 anti-diagonal observable set
//! with its exact reconstruction induction, the four-observable scheme for
//! real-amplitude qutrit states, and the Roman-surface point cloud showing
//! why three observables cannot suffice there.

use num_complex::Complex;
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::matrix::{
    numeric_rank, projector, spectral_decompose, ComplexMatrix, DensityState, HermitianOperator,
    C64, ONE, RANK_TOL, ZERO,
};
use crate::opsys::{ExpectationVector, ObservableSet};

/// Absolute threshold below which a diagonal expectation counts as zero
/// when locating the first nonzero amplitude.
pub const FIRST_AMPLITUDE_TOL: f64 = 1e-12;

/// Residual bound for accepting a reconstruction as consistent.
pub const RECONSTRUCTION_TOL: f64 = 1e-9;

/// The 4d-5 observables `{X_1..X_{2d-2}, Y_1..Y_{2d-3}}`: X_a has ones on
/// the a-th anti-diagonal, Y_b is the matching anti-symmetric anti-diagonal
/// with entries i below the diagonal.
#[derive(Clone, Debug)]
pub struct JamesScheme {
    dim: usize,
    x_ops: Vec<HermitianOperator>,
    y_ops: Vec<HermitianOperator>,
}

impl JamesScheme {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn x_ops(&self) -> &[HermitianOperator] {
        &self.x_ops
    }

    pub fn y_ops(&self) -> &[HermitianOperator] {
        &self.y_ops
    }

    pub fn len(&self) -> usize {
        self.x_ops.len() + self.y_ops.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// All observables, X block then Y block; this fixes the layout of
    /// expectation vectors.
    pub fn observables(&self) -> ObservableSet {
        let mut ops = self.x_ops.clone();
        ops.extend(self.y_ops.clone());
        ObservableSet::new(ops).expect("scheme is nonempty")
    }

    /// Noiseless expectations of a unit vector, in scheme order.
    pub fn expectations_of_vector(&self, amps: &[C64]) -> ExpectationVector {
        let d = self.dim;
        debug_assert_eq!(amps.len(), d);
        let mut values = Vec::with_capacity(self.len());
        for alpha in 1..=(2 * d - 2) {
            // support i + j = alpha - 1 (0-based), all ones
            let mut acc = Complex::new(0.0, 0.0);
            for i in 0..d {
                let s = alpha - 1;
                if s >= i {
                    let j = s - i;
                    if j < d {
                        acc += amps[i].conj() * amps[j];
                    }
                }
            }
            values.push(acc.re);
        }
        for beta in 1..=(2 * d - 3) {
            // support i + j = beta (0-based), -i above / +i below the diagonal
            let mut acc = Complex::new(0.0, 0.0);
            for i in 0..d {
                if beta >= i {
                    let j = beta - i;
                    if j < d && j != i {
                        let coeff = if i < j {
                            Complex::new(0.0, -1.0)
                        } else {
                            Complex::new(0.0, 1.0)
                        };
                        acc += amps[i].conj() * coeff * amps[j];
                    }
                }
            }
            values.push(acc.re);
        }
        ExpectationVector::new(values)
    }
}

/// Builds the scheme for dimension `d >= 2`.
pub fn james_observables(d: usize) -> Result<JamesScheme> {
    if d < 2 {
        return Err(Error::InvalidArgument(format!(
            "pure-state scheme needs dimension >= 2, got {d}"
        )));
    }
    let mut x_ops = Vec::with_capacity(2 * d - 2);
    for alpha in 1..=(2 * d - 2) {
        x_ops.push(HermitianOperator::symmetrize(&ComplexMatrix::from_fn(
            d,
            |i, j| if i + j == alpha - 1 { ONE } else { ZERO },
        )));
    }
    let mut y_ops = Vec::with_capacity(2 * d - 3);
    for beta in 1..=(2 * d - 3) {
        y_ops.push(HermitianOperator::symmetrize(&ComplexMatrix::from_fn(
            d,
            |i, j| {
                if i + j == beta && i != j {
                    if i < j {
                        Complex::new(0.0, -1.0)
                    } else {
                        Complex::new(0.0, 1.0)
                    }
                } else {
                    ZERO
                }
            },
        )));
    }
    Ok(JamesScheme { dim: d, x_ops, y_ops })
}

/// Upper-triangular auxiliary matrix driving the reconstruction induction:
/// ones at `k+l = gamma` above the diagonal, 1/2 at `k = l = gamma/2`, and
/// the identity for `gamma = 2d`.
pub fn c_matrix(d: usize, gamma: usize) -> Result<ComplexMatrix> {
    if gamma < 2 || gamma > 2 * d {
        return Err(Error::GammaOutOfRange {
            gamma,
            dim: d,
            max: 2 * d,
        });
    }
    if gamma == 2 * d {
        return Ok(ComplexMatrix::identity(d));
    }
    Ok(ComplexMatrix::from_fn(d, |i, j| {
        let (k, l) = (i + 1, j + 1);
        if k < l && k + l == gamma {
            ONE
        } else if k == l && 2 * k == gamma {
            Complex::new(0.5, 0.0)
        } else {
            ZERO
        }
    }))
}

/// A unit vector with the global phase fixed so that the first nonzero
/// amplitude is real and positive.
#[derive(Clone, Debug, PartialEq)]
pub struct PureStateVector {
    amplitudes: Vec<C64>,
}

impl PureStateVector {
    pub fn new(amplitudes: Vec<C64>) -> Result<Self> {
        let norm = l2_norm(&amplitudes);
        if (norm - 1.0).abs() > 1e-10 {
            return Err(Error::NotNormalized { norm });
        }
        Ok(Self::canonicalized(amplitudes))
    }

    /// Normalizes and canonicalizes; errors only on a vanishing vector.
    pub fn from_unnormalized(amplitudes: Vec<C64>) -> Result<Self> {
        let norm = l2_norm(&amplitudes);
        if norm <= 1e-14 || !norm.is_finite() {
            return Err(Error::NotNormalized { norm });
        }
        let scaled = amplitudes
            .into_iter()
            .map(|a| a / Complex::new(norm, 0.0))
            .collect();
        Ok(Self::canonicalized(scaled))
    }

    fn canonicalized(mut amplitudes: Vec<C64>) -> Self {
        if let Some(first) = amplitudes.iter().find(|a| a.norm() > 1e-10) {
            let phase = first / Complex::new(first.norm(), 0.0);
            let rot = phase.conj();
            for a in &mut amplitudes {
                *a *= rot;
            }
        }
        Self { amplitudes }
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amplitudes
    }

    pub fn density(&self) -> DensityState {
        let v = nalgebra::DVector::from_column_slice(&self.amplitudes);
        DensityState::from_pure_vector(&v).expect("unit vector")
    }

    /// `|⟨self, other⟩|²`.
    pub fn fidelity(&self, other: &PureStateVector) -> f64 {
        let overlap: C64 = self
            .amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum();
        overlap.norm_sqr()
    }
}

fn l2_norm(v: &[C64]) -> f64 {
    v.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
}

impl Serialize for PureStateVector {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct V<'a> {
            dim: usize,
            amplitudes: Vec<[f64; 2]>,
            #[serde(skip)]
            _marker: &'a (),
        }
        V {
            dim: self.dim(),
            amplitudes: self.amplitudes.iter().map(|a| [a.re, a.im]).collect(),
            _marker: &(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for PureStateVector {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct V {
            dim: usize,
            amplitudes: Vec<[f64; 2]>,
        }
        let v = V::deserialize(d)?;
        if v.amplitudes.len() != v.dim {
            return Err(D::Error::custom("dim disagrees with amplitude count"));
        }
        let amps = v.amplitudes.iter().map(|p| Complex::new(p[0], p[1])).collect();
        PureStateVector::new(amps).map_err(D::Error::custom)
    }
}

/// Reconstructs the unique pure state producing the given noiseless
/// expectations (X block then Y block, 4d-5 values).
///
/// The complex values `v_g = <C_g>` are assembled from the expectations;
/// the first n with `v_2n` above threshold fixes `|x_n|² = 2 v_2n`, and each
/// later amplitude is solved for from `v_{m+n+1}`, whose only unknown term
/// is `conj(x_n) x_{m+1}`. The result is renormalized and verified against
/// the input; a residual above tolerance means no pure state matches.
pub fn reconstruct_pure_state(
    expectations: &ExpectationVector,
    d: usize,
) -> Result<PureStateVector> {
    if d < 2 {
        return Err(Error::InvalidArgument(format!(
            "reconstruction needs dimension >= 2, got {d}"
        )));
    }
    let expected = 4 * d - 5;
    if expectations.len() != expected {
        return Err(Error::WrongExpectationCount {
            expected,
            got: expectations.len(),
        });
    }
    let vals = &expectations.values;
    // v[gamma] for gamma = 2..=2d-1; index shifted by 2
    let v = |gamma: usize| -> C64 {
        debug_assert!((2..=2 * d - 1).contains(&gamma));
        if gamma == 2 {
            Complex::new(vals[0] / 2.0, 0.0)
        } else {
            let x = vals[gamma - 2]; // X_{gamma-1}
            let y = vals[(2 * d - 2) + (gamma - 3)]; // Y_{gamma-2}
            Complex::new(x / 2.0, y / 2.0)
        }
    };

    // first index (1-based) whose squared amplitude 2*v_{2n} is nonzero
    let start = (1..d).find(|&n| v(2 * n).re > FIRST_AMPLITUDE_TOL);
    let mut amps = vec![Complex::new(0.0, 0.0); d];
    match start {
        None => {
            // all measured diagonal expectations vanish: only the last
            // basis vector is consistent, and the residual check decides
            amps[d - 1] = ONE;
        }
        Some(n) => {
            let x_n = (2.0 * v(2 * n).re).sqrt();
            amps[n - 1] = Complex::new(x_n, 0.0);
            for m in n..d {
                let gamma = m + n + 1;
                let mut known = Complex::new(0.0, 0.0);
                for j in 1..=m {
                    if gamma > j {
                        let i = gamma - j;
                        if i < j {
                            known += amps[i - 1].conj() * amps[j - 1];
                        }
                    }
                }
                if gamma % 2 == 0 && gamma / 2 <= m {
                    let mid = amps[gamma / 2 - 1];
                    known += mid.conj() * mid * Complex::new(0.5, 0.0);
                }
                amps[m] = (v(gamma) - known) / Complex::new(x_n, 0.0);
            }
        }
    }

    let scheme = james_observables(d)?;
    // the induction divides by the leading amplitude, which can amplify
    // roundoff; a short Gauss-Newton polish against the forward map pushes
    // consistent inputs back to machine accuracy
    let amps = polish_amplitudes(&scheme, expectations, amps);
    let state = PureStateVector::from_unnormalized(amps)
        .map_err(|_| Error::InconsistentExpectations { residual: f64::NAN })?;
    let forward = scheme.expectations_of_vector(state.amplitudes());
    let residual = forward.euclidean_distance(expectations);
    if residual > RECONSTRUCTION_TOL {
        return Err(Error::InconsistentExpectations { residual });
    }
    Ok(state)
}

/// Gauss-Newton refinement of the quadratic forward map around an initial
/// amplitude vector; returns the iterate with the smallest residual.
fn polish_amplitudes(
    scheme: &JamesScheme,
    target: &ExpectationVector,
    initial: Vec<C64>,
) -> Vec<C64> {
    use nalgebra::{DMatrix, DVector};
    let d = initial.len();
    let n_obs = scheme.len();
    let normalize = |z: &mut Vec<C64>| {
        let n = l2_norm(z);
        if n > 0.0 {
            for a in z.iter_mut() {
                *a /= Complex::new(n, 0.0);
            }
        }
    };
    let residual_of = |z: &[C64]| -> f64 {
        scheme
            .expectations_of_vector(z)
            .euclidean_distance(target)
    };
    let mut z = initial;
    normalize(&mut z);
    let mut best = z.clone();
    let mut best_res = residual_of(&z);
    for _ in 0..8 {
        if best_res <= 1e-14 {
            break;
        }
        let forward = scheme.expectations_of_vector(&z);
        let res = DVector::from_fn(n_obs, |j, _| forward.values[j] - target.values[j]);
        // rows: d/dRe(z_k), d/dIm(z_k) of <z|S_j|z> for unit z
        let mut jac = DMatrix::<f64>::zeros(n_obs, 2 * d);
        let ops: Vec<&HermitianOperator> = scheme
            .x_ops
            .iter()
            .chain(scheme.y_ops.iter())
            .collect();
        let zv = nalgebra::DVector::from_column_slice(&z);
        for (j, op) in ops.iter().enumerate() {
            let w = op.matrix().raw() * &zv;
            let f_j = forward.values[j];
            for k in 0..d {
                let g = w[k] - Complex::new(f_j, 0.0) * zv[k];
                jac[(j, k)] = 2.0 * g.re;
                jac[(j, d + k)] = 2.0 * g.im;
            }
        }
        let svd = jac.svd(true, true);
        let Ok(delta) = svd.solve(&res, 1e-12) else {
            break;
        };
        let mut cand = z.clone();
        for k in 0..d {
            cand[k] -= Complex::new(delta[k], delta[d + k]);
        }
        normalize(&mut cand);
        let cand_res = residual_of(&cand);
        if cand_res < best_res {
            best = cand.clone();
            best_res = cand_res;
            z = cand;
        } else {
            break;
        }
    }
    best
}

/// The four observables whose expectations in a real unit vector x are
/// `(x1 x2, x2 x3, x3 x1, x1² - x2²)`: three symmetric pair operators
/// scaled by 1/2 and one diagonal.
pub fn real_projective_scheme() -> ObservableSet {
    let pair = |i: usize, j: usize| {
        let mut m = ComplexMatrix::zeros(3);
        m.set_entry(i, j, Complex::new(0.5, 0.0));
        m.set_entry(j, i, Complex::new(0.5, 0.0));
        HermitianOperator::symmetrize(&m)
    };
    let diag = HermitianOperator::symmetrize(&ComplexMatrix::from_diagonal(&[
        ONE,
        -ONE,
        ZERO,
    ]));
    ObservableSet::new(vec![pair(0, 1), pair(1, 2), pair(2, 0), diag]).expect("nonempty")
}

/// Deterministic point cloud of `(x1 x2, x2 x3, x3 x1)` over a spherical
/// Fibonacci lattice; the image is the Roman surface.
pub fn roman_surface_points(n_samples: usize) -> Result<Vec<[f64; 3]>> {
    if n_samples < 1 {
        return Err(Error::InvalidArgument(
            "need at least one sample point".into(),
        ));
    }
    let golden_angle = std::f64::consts::PI * (3.0 - 5f64.sqrt());
    let mut out = Vec::with_capacity(n_samples);
    for i in 0..n_samples {
        let z = 1.0 - 2.0 * (i as f64 + 0.5) / n_samples as f64;
        let r = (1.0 - z * z).max(0.0).sqrt();
        let phi = golden_angle * i as f64;
        let x = [r * phi.cos(), r * phi.sin(), z];
        out.push([x[0] * x[1], x[1] * x[2], x[2] * x[0]]);
    }
    Ok(out)
}

/// From an invertible traceless 3×3 Hermitian operator with a single
/// positive eigenvalue (after an overall sign flip if needed), builds the
/// pure state `P1` and the mixed state `(λ2 P2 + λ3 P3)/λ1` whose
/// difference is proportional to the operator; any scheme whose complement
/// is spanned by it assigns both the same statistics.
pub fn indistinguishable_pure_mixed_pair(
    t: &HermitianOperator,
) -> Result<(DensityState, DensityState)> {
    if t.dim() != 3 {
        return Err(Error::QutritOnly { dim: t.dim() });
    }
    let trace = t.matrix().trace();
    if trace.norm() > 1e-10 * t.matrix().frob_norm().max(1.0) {
        return Err(Error::NotTraceless { trace: trace.re });
    }
    if numeric_rank(t.matrix(), RANK_TOL) != 3 {
        return Err(Error::SingularInput);
    }
    let mut pairs = spectral_decompose(t);
    let positives = pairs.iter().filter(|p| p.0 > 0.0).count();
    match positives {
        1 => {}
        2 => {
            for p in &mut pairs {
                p.0 = -p.0;
            }
            pairs.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap());
        }
        _ => return Err(Error::WrongEigenvalueSignature),
    }
    let lambda1 = pairs[0].0;
    let lambda2 = -pairs[1].0;
    let lambda3 = -pairs[2].0;
    debug_assert!(lambda1 > 0.0 && lambda2 >= 0.0 && lambda3 >= 0.0);
    let p1 = projector(&pairs[0].1);
    let p2 = projector(&pairs[1].1);
    let p3 = projector(&pairs[2].1);
    let pure = DensityState::from_pure_vector(&pairs[0].1)?;
    let mixed_m = &p2.scaled(Complex::new(lambda2 / lambda1, 0.0))
        + &p3.scaled(Complex::new(lambda3 / lambda1, 0.0));
    let mixed = DensityState::new(HermitianOperator::symmetrize(&mixed_m))?;
    debug_assert!({
        let diff = &(p1) - (&mixed_m);
        let t_scaled = t.matrix().scaled(Complex::new(1.0 / lambda1, 0.0));
        (&diff - &t_scaled).frob_norm() < 1e-9
    });
    Ok((pure, mixed))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::{hs_dot, pauli_x, pauli_y};
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    fn random_pure(d: usize, rng: &mut StdRng) -> PureStateVector {
        let amps: Vec<C64> = (0..d)
            .map(|_| Complex::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5))
            .collect();
        PureStateVector::from_unnormalized(amps).unwrap()
    }

    #[test]
    fn james_d2_is_e11_sigmax_sigmay() {
        let scheme = james_observables(2).unwrap();
        assert_eq!(scheme.len(), 3);
        let e11 = ComplexMatrix::from_diagonal(&[ONE, ZERO]);
        assert!((scheme.x_ops()[0].matrix() - &e11).frob_norm() < 1e-15);
        assert!((scheme.x_ops()[1].matrix() - &pauli_x()).frob_norm() < 1e-15);
        assert!((scheme.y_ops()[0].matrix() - &pauli_y()).frob_norm() < 1e-15);
    }

    #[test]
    fn james_counts_and_orthogonality() {
        for d in 2..=8 {
            let scheme = james_observables(d).unwrap();
            assert_eq!(scheme.len(), 4 * d - 5);
            let obs = scheme.observables();
            for (i, a) in obs.observables().iter().enumerate() {
                assert!(a.matrix().is_hermitian(1e-14));
                for b in obs.observables().iter().skip(i + 1) {
                    assert!(hs_dot(a.matrix(), b.matrix()).norm() < 1e-12);
                }
            }
        }
        assert!(james_observables(1).is_err());
    }

    #[test]
    fn c_matrix_identities() {
        // C_2 = X_1 / 2 and C_{2d} = identity
        let c2 = c_matrix(2, 2).unwrap();
        let x1 = james_observables(2).unwrap().x_ops()[0].matrix().clone();
        assert!((&c2 - &x1.scaled(Complex::new(0.5, 0.0))).frob_norm() < 1e-15);
        assert!(
            (&c_matrix(3, 6).unwrap() - &ComplexMatrix::identity(3)).frob_norm() < 1e-15
        );
        // C_gamma = (X_{gamma-1} + i Y_{gamma-2})/2, exact entrywise
        for d in 2..=32 {
            let scheme = james_observables(d).unwrap();
            for gamma in 3..=(2 * d - 1) {
                let c = c_matrix(d, gamma).unwrap();
                let x = scheme.x_ops()[gamma - 2].matrix();
                let y = scheme.y_ops()[gamma - 3].matrix();
                let combo = (x + &y.scaled(Complex::new(0.0, 1.0))).scaled(Complex::new(0.5, 0.0));
                assert_eq!(&c, &combo, "d={d} gamma={gamma}");
            }
        }
        assert!(c_matrix(3, 1).is_err());
        assert!(c_matrix(3, 7).is_err());
    }

    #[test]
    fn c_matrix_example_d3_gamma5() {
        let c = c_matrix(3, 5).unwrap();
        let scheme = james_observables(3).unwrap();
        let x4 = scheme.x_ops()[3].matrix();
        let y3 = scheme.y_ops()[2].matrix();
        let combo = (x4 + &y3.scaled(Complex::new(0.0, 1.0))).scaled(Complex::new(0.5, 0.0));
        assert!((&c - &combo).frob_norm() < 1e-15);
    }

    #[test]
    fn reconstruct_basis_state_d2() {
        let stats = ExpectationVector::new(vec![1.0, 0.0, 0.0]);
        let state = reconstruct_pure_state(&stats, 2).unwrap();
        assert!((state.amplitudes()[0] - ONE).norm() < 1e-12);
        assert!(state.amplitudes()[1].norm() < 1e-12);
    }

    #[test]
    fn reconstruct_plus_state_d2() {
        let stats = ExpectationVector::new(vec![0.5, 1.0, 0.0]);
        let state = reconstruct_pure_state(&stats, 2).unwrap();
        let s = std::f64::consts::FRAC_1_SQRT_2;
        assert!((state.amplitudes()[0].re - s).abs() < 1e-12);
        assert!((state.amplitudes()[1].re - s).abs() < 1e-12);
    }

    #[test]
    fn reconstruct_round_trip_random() {
        let mut rng = StdRng::seed_from_u64(99);
        for d in 2..=8 {
            let scheme = james_observables(d).unwrap();
            for _ in 0..20 {
                let x = random_pure(d, &mut rng);
                let stats = scheme.expectations_of_vector(x.amplitudes());
                let back = reconstruct_pure_state(&stats, d).unwrap();
                assert!(
                    back.fidelity(&x) >= 1.0 - 1e-8,
                    "fidelity {} at d={d}",
                    back.fidelity(&x)
                );
            }
        }
    }

    #[test]
    fn reconstruct_handles_leading_zeros() {
        let mut rng = StdRng::seed_from_u64(7);
        let d = 5;
        let scheme = james_observables(d).unwrap();
        for zeros in 1..d {
            let mut amps: Vec<C64> = vec![Complex::new(0.0, 0.0); d];
            for a in amps.iter_mut().skip(zeros) {
                *a = Complex::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5);
            }
            let x = PureStateVector::from_unnormalized(amps).unwrap();
            let stats = scheme.expectations_of_vector(x.amplitudes());
            let back = reconstruct_pure_state(&stats, d).unwrap();
            assert!(back.fidelity(&x) >= 1.0 - 1e-8, "zeros={zeros}");
        }
    }

    #[test]
    fn reconstruct_phase_invariance() {
        let mut rng = StdRng::seed_from_u64(21);
        let d = 4;
        let scheme = james_observables(d).unwrap();
        let x = random_pure(d, &mut rng);
        let phi = 1.234f64;
        let rotated: Vec<C64> = x
            .amplitudes()
            .iter()
            .map(|a| a * Complex::new(phi.cos(), phi.sin()))
            .collect();
        let y = PureStateVector::from_unnormalized(rotated).unwrap();
        // canonical representatives coincide
        for (a, b) in x.amplitudes().iter().zip(y.amplitudes()) {
            assert!((a - b).norm() < 1e-12);
        }
        let sx = scheme.expectations_of_vector(x.amplitudes());
        let sy = scheme.expectations_of_vector(y.amplitudes());
        assert!(sx.euclidean_distance(&sy) < 1e-12);
        let rx = reconstruct_pure_state(&sx, d).unwrap();
        let ry = reconstruct_pure_state(&sy, d).unwrap();
        for (a, b) in rx.amplitudes().iter().zip(ry.amplitudes()) {
            assert!((a - b).norm() < 1e-10);
        }
    }

    #[test]
    fn reconstruct_rejects_inconsistent_input() {
        // valid layout but impossible statistics: <E11> = 1 forces e_1,
        // which cannot also have <X_2> = 1
        let stats = ExpectationVector::new(vec![1.0, 1.0, 0.7]);
        match reconstruct_pure_state(&stats, 2) {
            Err(Error::InconsistentExpectations { residual }) => assert!(residual > 1e-6),
            other => panic!("expected inconsistency error, got {other:?}"),
        }
        assert!(matches!(
            reconstruct_pure_state(&ExpectationVector::new(vec![0.0; 4]), 2),
            Err(Error::WrongExpectationCount { .. })
        ));
    }

    #[test]
    fn real_projective_expectations() {
        let scheme = real_projective_scheme();
        let e1 = PureStateVector::new(vec![ONE, ZERO, ZERO]).unwrap();
        let stats = scheme.statistics(&e1.density()).unwrap();
        assert_eq!(stats.len(), 4);
        let expect = [0.0, 0.0, 0.0, 1.0];
        for (v, e) in stats.values.iter().zip(expect) {
            assert!((v - e).abs() < 1e-12);
        }
        let s = 1.0 / 3f64.sqrt();
        let diag = PureStateVector::new(vec![
            Complex::new(s, 0.0),
            Complex::new(s, 0.0),
            Complex::new(s, 0.0),
        ])
        .unwrap();
        let stats = scheme.statistics(&diag.density()).unwrap();
        let expect = [1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0, 0.0];
        for (v, e) in stats.values.iter().zip(expect) {
            assert!((v - e).abs() < 1e-12);
        }
    }

    #[test]
    fn roman_surface_implicit_relation() {
        let pts = roman_surface_points(2000).unwrap();
        for [y1, y2, y3] in pts {
            let lhs = y1 * y1 * y2 * y2 + y2 * y2 * y3 * y3 + y3 * y3 * y1 * y1;
            let rhs = y1 * y2 * y3;
            assert!((lhs - rhs).abs() < 1e-12);
        }
        assert!(roman_surface_points(0).is_err());
    }

    #[test]
    fn roman_map_is_even() {
        let x = [0.3, -0.5, (1.0f64 - 0.09 - 0.25).sqrt()];
        let plus = [x[0] * x[1], x[1] * x[2], x[2] * x[0]];
        let minus = [
            (-x[0]) * (-x[1]),
            (-x[1]) * (-x[2]),
            (-x[2]) * (-x[0]),
        ];
        for (a, b) in plus.iter().zip(minus) {
            assert!((a - b).abs() < 1e-15);
        }
    }

    #[test]
    fn pure_mixed_pair_from_diagonal() {
        let t = HermitianOperator::new(ComplexMatrix::from_diagonal(&[
            Complex::new(2.0, 0.0),
            -ONE,
            -ONE,
        ]))
        .unwrap();
        let (pure, mixed) = indistinguishable_pure_mixed_pair(&t).unwrap();
        let e11 = ComplexMatrix::from_diagonal(&[ONE, ZERO, ZERO]);
        assert!((pure.matrix() - &e11).frob_norm() < 1e-12);
        let half = Complex::new(0.5, 0.0);
        let target = ComplexMatrix::from_diagonal(&[ZERO, half, half]);
        assert!((mixed.matrix() - &target).frob_norm() < 1e-12);
    }

    #[test]
    fn pure_mixed_pair_rejects_singular() {
        let t = HermitianOperator::new(ComplexMatrix::from_diagonal(&[ONE, -ONE, ZERO]))
            .unwrap();
        assert!(matches!(
            indistinguishable_pure_mixed_pair(&t),
            Err(Error::SingularInput)
        ));
    }
}
