//! Largest real eigenvalue of one class as the truncation grows.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::lattice::{self, enumerate_class, Domain, LatticeVector, TruncationKind};
use crate::spectra::{analyze_class, AnalysisOptions, SpectraError};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Series {
    /// Both truncations on the same domain `N`.
    SameDomain,
    /// Galerkin on the smallest domain whose class has at least `2N+1` modes.
    MatchedModes,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConvergencePoint {
    /// Nominal `N` of the series.
    pub n: i64,
    pub kind: TruncationKind,
    pub series: Series,
    /// Domain actually used.
    pub domain_n: i64,
    pub class_size: usize,
    /// Largest real eigenvalue of `A`, without the `α` factor.
    pub lambda: Option<f64>,
}

/// Largest real eigenvalue of the unscaled class matrix, if any.
pub fn largest_real(a: LatticeVector, p: LatticeVector, n: i64, kind: TruncationKind, options: &AnalysisOptions) -> Result<(usize, Option<f64>), SpectraError> {
    let c = enumerate_class(a, p, Domain::new(n)?, kind)?;
    // Γ only scales the spectrum; any nonzero value gives the same `A`.
    let s = analyze_class(&c, 1.0, options)?;
    Ok((c.size(), s.largest_real_unscaled()))
}

/// Smallest Galerkin `N ≥ p_max` whose class through `a` has at least `modes` modes.
pub fn matched_galerkin_n(a: LatticeVector, p: LatticeVector, modes: usize) -> Result<i64, SpectraError> {
    let mut n = p.x1.abs().max(p.x2.abs()).max(a.x1.abs()).max(a.x2.abs()).max(1);
    loop {
        let c = enumerate_class(a, p, Domain::new(n)?, TruncationKind::Galerkin)?;
        if c.size() >= modes {
            return Ok(n);
        }
        n += 1;
    }
}

/// Zeitlin, same-domain Galerkin and matched-mode Galerkin points for each
/// `N`. With `strict`, Zeitlin points are kept only at admissible `N`.
pub fn convergence_series(a: LatticeVector, p: LatticeVector, ns: &[i64], strict: bool, options: &AnalysisOptions) -> Result<Vec<ConvergencePoint>, SpectraError> {
    let mut jobs: Vec<(i64, TruncationKind, Series)> = Vec::new();
    for &n in ns {
        if !strict || lattice::is_admissible(p, n) {
            jobs.push((n, TruncationKind::Zeitlin, Series::SameDomain));
        }
        jobs.push((n, TruncationKind::Galerkin, Series::SameDomain));
        jobs.push((n, TruncationKind::Galerkin, Series::MatchedModes));
    }
    let mut points = jobs
        .par_iter()
        .map(|&(n, kind, series)| {
            let domain_n = match series {
                Series::SameDomain => n,
                Series::MatchedModes => matched_galerkin_n(a, p, (2 * n + 1) as usize)?,
            };
            let (class_size, lambda) = largest_real(a, p, domain_n, kind, options)?;
            Ok(ConvergencePoint {
                n,
                kind,
                series,
                domain_n,
                class_size,
                lambda,
            })
        })
        .collect::<Result<Vec<_>, SpectraError>>()?;
    points.sort_by_key(|q| (q.series as u8, q.kind as u8, q.n));
    Ok(points)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matched_domain_has_enough_modes() {
        let (a, p) = (LatticeVector::new(0, 3), LatticeVector::new(3, 1));
        for n in [10, 25, 40] {
            let g = matched_galerkin_n(a, p, 2 * n + 1).unwrap();
            let c = enumerate_class(a, p, Domain::new(g).unwrap(), TruncationKind::Galerkin).unwrap();
            assert!(c.size() > 2 * n);
            let smaller = enumerate_class(a, p, Domain::new(g - 1).unwrap(), TruncationKind::Galerkin).unwrap();
            assert!(smaller.size() <= 2 * n);
        }
    }

    #[test]
    fn strict_filters_inadmissible_zeitlin() {
        let (a, p) = (LatticeVector::new(1, -2), LatticeVector::new(3, 3));
        // κ = 3: admissible N are (3(2ñ+1) - 1)/2 with ñ ≥ 6
        let pts = convergence_series(a, p, &[16, 19, 20, 22], true, &AnalysisOptions::default()).unwrap();
        let z: Vec<i64> = pts.iter().filter(|q| q.kind == TruncationKind::Zeitlin).map(|q| q.n).collect();
        assert_eq!(z, vec![19, 22]);
        assert_eq!(pts.len(), 10);
    }
}
