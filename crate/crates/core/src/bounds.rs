//! Closed-form bounds on the minimal number of informationally complete
//! observables for the supported premises, and the pure-state bound table.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::verify::{Premise, PremiseKind};

/// Number of ones in the binary expansion.
pub fn binary_ones(n: u64) -> u32 {
    n.count_ones()
}

/// Upper bound from the sharpened bilinear-map construction:
/// `4d-4-α` for odd d and `4d-5-α` for even d >= 4, with α the number of
/// binary ones of d-1. For d = 2 the anti-diagonal scheme's value 3 applies.
pub fn milgram_upper(d: usize) -> Result<usize> {
    if d < 2 {
        return Err(Error::InvalidArgument(format!(
            "bound needs dimension >= 2, got {d}"
        )));
    }
    if d == 2 {
        return Ok(3);
    }
    let alpha = binary_ones(d as u64 - 1) as usize;
    Ok(if d % 2 == 1 {
        4 * d - 4 - alpha
    } else {
        4 * d - 5 - alpha
    })
}

fn mayer_form(dim_manifold: i64, alpha: i64, d_odd: bool) -> usize {
    let base = 2 * dim_manifold - 2 * alpha;
    let threshold = if d_odd && alpha.rem_euclid(4) == 3 {
        base + 2
    } else if d_odd && alpha.rem_euclid(4) == 2 {
        base + 1
    } else {
        base
    };
    // smallest integer strictly greater than the threshold
    (threshold + 1).max(1) as usize
}

/// Lower bound for pure states from the projective-space non-embedding
/// result, with `D = 2d-2` and α the number of binary ones of d-1.
pub fn mayer_lower_pure(d: usize) -> Result<usize> {
    if d < 2 {
        return Err(Error::InvalidArgument(format!(
            "bound needs dimension >= 2, got {d}"
        )));
    }
    let dim_manifold = (2 * d - 2) as i64;
    let alpha = binary_ones(d as u64 - 1) as i64;
    Ok(mayer_form(dim_manifold, alpha, d % 2 == 1))
}

/// Grassmannian lower bound: the pure-state form with `D = 2r(d-r)` and α
/// replaced by `Σ_{j=1..r} β(d-j) - β(j-1)`. Coincides with the pure-state
/// bound at r = 1.
pub fn grassmann_lower(d: usize, r: usize) -> Result<usize> {
    if d < 2 {
        return Err(Error::InvalidArgument(format!(
            "bound needs dimension >= 2, got {d}"
        )));
    }
    if r < 1 || r > d - 1 {
        return Err(Error::RankOutOfRange { rank: r, dim: d });
    }
    let dim_manifold = (2 * r * (d - r)) as i64;
    let alpha: i64 = (1..=r)
        .map(|j| binary_ones((d - j) as u64) as i64 - binary_ones(j as u64 - 1) as i64)
        .sum();
    Ok(mayer_form(dim_manifold, alpha, d % 2 == 1))
}

/// Minkowski (box) dimension of the premise set.
///
/// Pure states form a manifold of dimension 2d-2, rank-r projections one of
/// dimension 2r(d-r), depolarized pure states add one parameter. The
/// bounded-rank stratum value `2rd - r² - 1` is a standard manifold count
/// but not certified by the sources the other values come from; see
/// [`minkowski_dim_certified`].
pub fn minkowski_dim(premise: &Premise) -> Result<usize> {
    let d = premise.dim();
    match premise.kind() {
        PremiseKind::Pure => Ok(2 * d - 2),
        PremiseKind::RealPure => Ok(d - 1),
        PremiseKind::GrassmannProjections(r) => Ok(2 * r * (d - r)),
        PremiseKind::DepolarizedPure(_) => Ok(2 * d - 1),
        PremiseKind::BoundedRank(r) => Ok(2 * r * d - r * r - 1),
    }
}

/// Whether the Minkowski dimension for this premise is a certified value.
pub fn minkowski_dim_certified(premise: &Premise) -> bool {
    !matches!(premise.kind(), PremiseKind::BoundedRank(_))
}

/// Generic upper bound `2 D(P) + 1`: almost any collection of that many
/// random observables is informationally complete for the premise.
pub fn generic_upper(premise: &Premise) -> Result<usize> {
    Ok(2 * minkowski_dim(premise)? + 1)
}

/// Upper bound `4r(d-r) - 1` from the rank-constrained construction.
pub fn rank_upper(d: usize, r: usize) -> Result<usize> {
    if r < 1 || 2 * r >= d {
        return Err(Error::RankOutOfRange { rank: r, dim: d });
    }
    Ok(4 * r * (d - r) - 1)
}

/// Lower/upper bounds for one dimension and premise.
#[derive(Clone, Debug, Serialize)]
pub struct BoundReport {
    pub d: usize,
    pub premise: Premise,
    pub lower: usize,
    pub upper: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub exact: Option<usize>,
    pub formula_tags: Vec<String>,
}

impl BoundReport {
    fn new(d: usize, premise: Premise, lower: usize, upper: usize, tags: &[&str]) -> Self {
        Self {
            d,
            premise,
            lower,
            upper,
            exact: (lower == upper).then_some(lower),
            formula_tags: tags.iter().map(|s| s.to_string()).collect(),
        }
    }
}

/// Pure-state bound table for d = 2..=d_max: lower bound from the
/// non-embedding result, upper bound `min(4d-5, milgram)`.
pub fn pure_bound_table(d_max: usize) -> Result<Vec<BoundReport>> {
    if d_max < 2 {
        return Err(Error::InvalidArgument(format!(
            "table needs d_max >= 2, got {d_max}"
        )));
    }
    (2..=d_max)
        .map(|d| {
            let premise = Premise::new(PremiseKind::Pure, d)?;
            let lower = mayer_lower_pure(d)?;
            let upper = (4 * d - 5).min(milgram_upper(d)?);
            Ok(BoundReport::new(
                d,
                premise,
                lower,
                upper,
                &["mayer-lower", "affine-4d-5", "milgram-upper"],
            ))
        })
        .collect()
}

/// Single bound report for any supported premise.
pub fn premise_bound_report(premise: &Premise) -> Result<BoundReport> {
    let d = premise.dim();
    match premise.kind() {
        PremiseKind::Pure => Ok(pure_bound_table(d)?.pop().expect("nonempty")),
        PremiseKind::GrassmannProjections(r) => {
            let lower = grassmann_lower(d, *r)?;
            let upper = generic_upper(premise)?;
            Ok(BoundReport::new(
                d,
                premise.clone(),
                lower,
                upper,
                &["grassmann-lower", "generic-upper"],
            ))
        }
        PremiseKind::BoundedRank(r) => {
            // the rank-<=r set contains the rank-r projections, so the
            // Grassmannian lower bound applies
            let lower = if *r < d { grassmann_lower(d, *r)? } else { d * d - 1 };
            let upper = if 2 * r < d {
                rank_upper(d, *r)?
            } else {
                d * d - 1
            };
            Ok(BoundReport::new(
                d,
                premise.clone(),
                lower,
                upper,
                &["grassmann-lower-contained", "rank-upper", "minkowski-non-certified"],
            ))
        }
        PremiseKind::RealPure => {
            if d != 3 {
                return Err(Error::InvalidPremise(
                    "real-amplitude bounds are only established for dimension 3".into(),
                ));
            }
            Ok(BoundReport::new(
                d,
                premise.clone(),
                4,
                4,
                &["projective-plane-exact"],
            ))
        }
        PremiseKind::DepolarizedPure(_) => {
            // contains all pure states at mixing parameter 0
            let lower = mayer_lower_pure(d)?;
            let upper = generic_upper(premise)?;
            Ok(BoundReport::new(
                d,
                premise.clone(),
                lower,
                upper,
                &["contains-pure-lower", "generic-upper"],
            ))
        }
    }
}
