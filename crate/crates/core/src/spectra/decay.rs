//! Geometric decay of the real eigenvector away from the disc mode.

use serde::{Deserialize, Serialize};

use super::eigen::real_eigenvector;
use super::SpectraError;
use crate::lattice::LatticeVector;
use crate::truncation::ClassMatrix;

/// Smallest class for which tail ratios are measured.
pub const MIN_DECAY_SIZE: usize = 41;

/// Entries below this fraction of `max |v|` are excluded from the tail.
const MAGNITUDE_FLOOR: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecayAnalysis {
    pub lambda: f64,
    pub mu1: f64,
    pub mu2: f64,
    /// `max |r_k - |μ1|| / |μ1|` over the tail window.
    pub tail_ratio_error: f64,
    pub tail_samples: usize,
    pub hamiltonian_residual: f64,
}

/// Roots of `μ² - λ|p|²μ - 1 = 0` as `(μ1, μ2)` with `|μ1| < 1 < |μ2|` for `λ > 0`.
pub fn decay_roots(lambda: f64, p: LatticeVector) -> (f64, f64) {
    let b = lambda.abs() * p.norm_sq() as f64;
    let s = b + (b * b + 4.0).sqrt();
    (-2.0 / s, s / 2.0)
}

/// Eigenvector decay for a real eigenvalue `lambda` of the unscaled class
/// matrix `A`.
///
/// Ratios `|v_far / v_near|` are taken stepping away from the disc mode at
/// index distances in `[n/8, 3n/8]`, which keeps clear of the Zeitlin wrap
/// seam and of the Galerkin truncation edges.
pub fn eigenvector_decay(cm: &ClassMatrix, lambda: f64) -> Result<DecayAnalysis, SpectraError> {
    let n = cm.size();
    if n < MIN_DECAY_SIZE {
        return Err(SpectraError::ClassTooSmall(n));
    }
    let (lam, v) = real_eigenvector(&cm.matrix, lambda.abs())?;
    let (mu1, mu2) = decay_roots(lam, cm.descriptor.p);

    let h: f64 = cm.rho.iter().zip(&v).map(|(r, x)| r * x * x).sum();
    let norm_sq: f64 = v.iter().map(|x| x * x).sum();
    let hamiltonian_residual = h.abs() / norm_sq;

    let disc = cm
        .rho
        .iter()
        .position(|&r| r < 0.0)
        .unwrap_or_else(|| (0..n).max_by(|&a, &b| v[a].abs().total_cmp(&v[b].abs())).unwrap());
    let vmax = v.iter().fold(0.0_f64, |m, x| m.max(x.abs()));
    let floor = MAGNITUDE_FLOOR * vmax;
    let cyclic = cm.descriptor.is_cyclic();
    let (lo, hi) = (n / 8, 3 * n / 8);

    let mut err = 0.0_f64;
    let mut samples = 0;
    for step in lo..hi {
        for dir in [1isize, -1] {
            let near = disc as isize + dir * step as isize;
            let far = near + dir;
            let idx = |k: isize| -> Option<usize> {
                if cyclic {
                    Some(k.rem_euclid(n as isize) as usize)
                } else if (0..n as isize).contains(&k)
                    && k.min(n as isize - 1 - k) >= lo as isize
                {
                    Some(k as usize)
                } else {
                    None
                }
            };
            let (Some(i), Some(j)) = (idx(near), idx(far)) else {
                continue;
            };
            if v[i].abs() < floor || v[j].abs() < floor {
                continue;
            }
            let ratio = (v[j] / v[i]).abs();
            err = err.max((ratio - mu1.abs()).abs() / mu1.abs());
            samples += 1;
        }
    }
    if samples == 0 {
        return Err(SpectraError::EmptyTail);
    }
    Ok(DecayAnalysis {
        lambda: lam,
        mu1,
        mu2,
        tail_ratio_error: err,
        tail_samples: samples,
        hamiltonian_residual,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{enumerate_class, Domain, TruncationKind};
    use crate::truncation::class_matrix;
    use proptest::prelude::*;

    #[test]
    fn small_class_rejected() {
        let p = LatticeVector::new(3, 1);
        let c = enumerate_class(LatticeVector::new(1, -2), p, Domain::new(10).unwrap(), TruncationKind::Zeitlin).unwrap();
        let cm = class_matrix(&c, 0.5).unwrap();
        assert!(matches!(eigenvector_decay(&cm, 0.07), Err(SpectraError::ClassTooSmall(21))));
    }

    #[test]
    fn non_eigenvalue_rejected() {
        let p = LatticeVector::new(3, 1);
        let c = enumerate_class(LatticeVector::new(1, -2), p, Domain::new(30).unwrap(), TruncationKind::Zeitlin).unwrap();
        let cm = class_matrix(&c, 0.5).unwrap();
        assert!(matches!(eigenvector_decay(&cm, 0.05), Err(SpectraError::NotEigenvalue { .. })));
    }

    #[test]
    fn decay_example() {
        let p = LatticeVector::new(3, 1);
        let c = enumerate_class(LatticeVector::new(1, -2), p, Domain::new(100).unwrap(), TruncationKind::Zeitlin).unwrap();
        let cm = class_matrix(&c, 0.5).unwrap();
        let ev = super::super::eigenvalues(&cm.matrix).unwrap();
        let lam = ev.iter().map(|z| z.re).fold(f64::NEG_INFINITY, f64::max);
        let d = eigenvector_decay(&cm, lam).unwrap();
        assert!(d.hamiltonian_residual < 1e-8);
        assert!(d.tail_ratio_error < 0.05, "{}", d.tail_ratio_error);
        assert!((d.mu1 + 0.709376).abs() < 1e-5, "{}", d.mu1);
    }

    proptest! {
        #[test]
        fn vieta(lambda in 1e-6f64..10.0, x in -8i64..=8, y in -8i64..=8) {
            let p = LatticeVector::new(x, y);
            prop_assume!(!p.is_zero());
            let (m1, m2) = decay_roots(lambda, p);
            prop_assert!((m1 * m2 + 1.0).abs() < 1e-12);
            prop_assert!(m1.abs() < 1.0 && m2.abs() > 1.0);
            let b = lambda * p.norm_sq() as f64;
            prop_assert!((m1 + m2 - b).abs() <= 1e-12 * b.max(1.0));
        }
    }
}
