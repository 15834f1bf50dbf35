//! Stability cases from the ρ sign pattern, and the reality predicates for
//! the case-(i) lower bound.

use serde::{Deserialize, Serialize};

use super::SpectraError;
use crate::charpoly::{best_lower_bound, CoefficientSequence};
use crate::lattice::{self, ClassDescriptor, LatticeVector, TruncationKind};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum StabilityCase {
    /// `α = 0`: the whole class is stationary.
    ZeroAlpha,
    /// No mode strictly inside the disc.
    Stable,
    /// Exactly one disc mode.
    CaseI,
    /// Two disc modes at consecutive indices.
    CaseII,
    /// Non-consecutive disc modes (Zeitlin wrap only).
    CaseIII,
}

impl StabilityCase {
    pub fn label(&self) -> &'static str {
        match self {
            StabilityCase::ZeroAlpha => "zero_alpha",
            StabilityCase::Stable => "stable",
            StabilityCase::CaseI => "case_i",
            StabilityCase::CaseII => "case_ii",
            StabilityCase::CaseIII => "case_iii",
        }
    }
}

/// Case from the signs of `ρ` alone; `ρ = 0` counts as outside the disc.
pub fn case_from_signs(rho: &[f64], kind: TruncationKind) -> Result<StabilityCase, SpectraError> {
    let neg: Vec<usize> = rho
        .iter()
        .enumerate()
        .filter(|(_, &r)| r < 0.0)
        .map(|(i, _)| i)
        .collect();
    let n = rho.len();
    let case = match neg.as_slice() {
        [] => StabilityCase::Stable,
        [_] => StabilityCase::CaseI,
        &[i, j] if j == i + 1 || (kind == TruncationKind::Zeitlin && i == 0 && j == n - 1) => {
            StabilityCase::CaseII
        }
        _ => StabilityCase::CaseIII,
    };
    if case == StabilityCase::CaseIII && kind == TruncationKind::Galerkin {
        return Err(SpectraError::GalerkinCaseIii { kind, indices: neg });
    }
    Ok(case)
}

/// Case of a class; `ZeroAlpha` is decided before `ρ` is needed, so classes
/// through the origin are accepted.
pub fn stability_case(descriptor: &ClassDescriptor) -> Result<StabilityCase, SpectraError> {
    let alpha = lattice::alpha(
        descriptor.leader,
        descriptor.p,
        1.0,
        descriptor.domain,
        descriptor.kind,
    );
    if alpha == 0.0 {
        return Ok(StabilityCase::ZeroAlpha);
    }
    case_from_signs(&descriptor.rho()?, descriptor.kind)
}

fn rho_untruncated(m: LatticeVector, p: LatticeVector) -> f64 {
    if m.is_zero() {
        return f64::NEG_INFINITY;
    }
    1.0 / p.norm_sq() as f64 - 1.0 / m.norm_sq() as f64
}

/// `ρ_0 < 0`, `ρ_{±1} > 0` and `ρ_0 + ρ_{±2} < 0` for at least one sign,
/// evaluated on the untruncated line `a + k p`. The origin is never accepted.
pub fn reality_condition(a: LatticeVector, p: LatticeVector) -> bool {
    if a.is_zero() || p.is_zero() {
        return false;
    }
    let r = |k: i64| rho_untruncated(a + k * p, p);
    r(0) < 0.0 && r(1) > 0.0 && r(-1) > 0.0 && (r(0) + r(2) < 0.0 || r(0) + r(-2) < 0.0)
}

/// Sufficient region: `|a| < (√3 - 1)|p|` and `|a ± p| > |p|`.
pub fn in_sufficient_region(a: LatticeVector, p: LatticeVector) -> bool {
    let pn = p.norm();
    a.norm() < (3f64.sqrt() - 1.0) * pn && (a + p).norm_sq() > p.norm_sq() && (a - p).norm_sq() > p.norm_sq()
}

/// Centres `±(1/√3)(-p2, p1)` and radius `(2/√3 - 1)|p|` of the disc inscribed
/// in the sufficient region.
pub fn sufficient_disc(p: LatticeVector) -> ([(f64, f64); 2], f64) {
    let s = 1.0 / 3f64.sqrt();
    let c = (-(p.x2 as f64) * s, p.x1 as f64 * s);
    ([c, (-c.0, -c.1)], (2.0 * s - 1.0) * p.norm())
}

/// `√3 / (√2 (2 - √3))`: above this `|p|` the inscribed disc contains a lattice point.
pub const SUFFICIENT_NORM: f64 = 4.570_810_086_342_818;

/// First lattice point `a` with `|a| < |p|` (lexicographic order) satisfying
/// [`reality_condition`].
pub fn find_case_i_leader(p: LatticeVector) -> Option<LatticeVector> {
    lattice::unstable_disc(p)
        .ok()?
        .into_iter()
        .find(|&a| reality_condition(a, p))
}

/// Whether `descriptor` meets the lower-bound hypotheses along its own
/// (possibly wrapped) ρ sequence: one disc mode and a real positive bound.
pub fn class_reality(descriptor: &ClassDescriptor) -> bool {
    if !matches!(stability_case(descriptor), Ok(StabilityCase::CaseI)) {
        return false;
    }
    let Ok(rho) = descriptor.rho() else {
        return false;
    };
    let root = rho.iter().position(|&r| r < 0.0).unwrap_or(0);
    CoefficientSequence::new(rho, descriptor.is_cyclic())
        .ok()
        .and_then(|s| best_lower_bound(&s, root))
        .is_some()
}
