//! Large-N model of a stable class spectrum: the circulant approximation
//! `ρ_k → 1/|p|²`, its arcsine density, and histograms to compare against.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::lattice::LatticeVector;
use crate::spectra::{ClassSpectrum, EigenLabel};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DensityError {
    #[error("circulant size must be odd and at least 3, got {0}")]
    BadSize(usize),
    #[error("x = {x} is outside the open support (-{edge}, {edge})")]
    OutsideSupport { x: f64, edge: f64 },
    #[error("zero wave vector")]
    ZeroWaveVector,
    #[error("degenerate class: a × p = 0")]
    Degenerate,
    #[error("histogram needs at least one bin")]
    NoBins,
}

/// `λ_j = (2i/|p|²) sin(2πj/n)` for `j = 0..n`.
pub fn circulant_spectrum(n: usize, p: LatticeVector) -> Result<Vec<Complex64>, DensityError> {
    if n < 3 || n % 2 == 0 {
        return Err(DensityError::BadSize(n));
    }
    if p.is_zero() {
        return Err(DensityError::ZeroWaveVector);
    }
    let s = 2.0 / p.norm_sq() as f64;
    Ok((0..n)
        .map(|j| {
            let t = std::f64::consts::TAU * j as f64 / n as f64;
            Complex64::new(0.0, s * t.sin())
        })
        .collect())
}

/// `F(x) = |p|² / (π sqrt(4α² - |p|⁴ x²))` on `|x| < 2|α|/|p|²`.
pub fn density_f(x: f64, p: LatticeVector, alpha: f64) -> Result<f64, DensityError> {
    if p.is_zero() {
        return Err(DensityError::ZeroWaveVector);
    }
    let p2 = p.norm_sq() as f64;
    let edge = 2.0 * alpha.abs() / p2;
    if !(x.abs() < edge) {
        return Err(DensityError::OutsideSupport { x, edge });
    }
    Ok(p2 / (std::f64::consts::PI * (4.0 * alpha * alpha - p2 * p2 * x * x).sqrt()))
}

/// Untruncated model for the class led by `a`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DensityModel {
    pub p: LatticeVector,
    pub a: LatticeVector,
    pub gamma: f64,
    /// `Γ (a × p)`.
    pub alpha: f64,
    /// `(2/|p|²)(a × p) Γ`.
    pub beta: f64,
    /// `[-|β|, |β|]` on the imaginary axis.
    pub support: (f64, f64),
}

impl DensityModel {
    pub fn new(p: LatticeVector, a: LatticeVector, gamma: f64) -> Result<Self, DensityError> {
        if p.is_zero() {
            return Err(DensityError::ZeroWaveVector);
        }
        let cross = a.cross(p) as f64;
        if cross == 0.0 || gamma == 0.0 {
            return Err(DensityError::Degenerate);
        }
        let alpha = gamma * cross;
        let beta = 2.0 / p.norm_sq() as f64 * cross * gamma;
        Ok(Self {
            p,
            a,
            gamma,
            alpha,
            beta,
            support: (-beta.abs(), beta.abs()),
        })
    }

    pub fn edge(&self) -> f64 {
        self.beta.abs()
    }

    pub fn density(&self, x: f64) -> Result<f64, DensityError> {
        density_f(x, self.p, self.alpha)
    }
}

/// Equal-width histogram normalised to unit mass.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Histogram {
    pub lo: f64,
    pub hi: f64,
    pub counts: Vec<usize>,
    pub density: Vec<f64>,
    /// Samples falling outside `[lo, hi]`, folded into the edge bins.
    pub clipped: usize,
}

impl Histogram {
    pub fn bins(&self) -> usize {
        self.counts.len()
    }

    pub fn width(&self) -> f64 {
        (self.hi - self.lo) / self.bins() as f64
    }

    pub fn centers(&self) -> Vec<f64> {
        let w = self.width();
        (0..self.bins()).map(|i| self.lo + (i as f64 + 0.5) * w).collect()
    }

    pub fn mass(&self) -> f64 {
        self.density.iter().sum::<f64>() * self.width()
    }

    /// `max |h_i - F(c_i)|` over bin centres, skipping the first and last bin.
    pub fn sup_deviation(&self, model: &DensityModel) -> Result<f64, DensityError> {
        let centers = self.centers();
        let mut worst = 0.0_f64;
        for i in 1..self.bins().saturating_sub(1) {
            worst = worst.max((self.density[i] - model.density(centers[i])?).abs());
        }
        Ok(worst)
    }
}

pub fn histogram(values: &[f64], lo: f64, hi: f64, bins: usize) -> Result<Histogram, DensityError> {
    if bins == 0 {
        return Err(DensityError::NoBins);
    }
    let w = (hi - lo) / bins as f64;
    let mut counts = vec![0usize; bins];
    let mut clipped = 0;
    for &x in values {
        if x < lo || x > hi {
            clipped += 1;
        }
        let i = (((x - lo) / w).floor().max(0.0) as usize).min(bins - 1);
        counts[i] += 1;
    }
    let total = values.len().max(1) as f64;
    let density = counts.iter().map(|&c| c as f64 / (total * w)).collect();
    Ok(Histogram {
        lo,
        hi,
        counts,
        density,
        clipped,
    })
}

/// Histogram of `Im λ` over the model support, using only eigenvalues
/// labelled imaginary.
pub fn empirical_density(spectrum: &ClassSpectrum, bins: usize) -> Result<(Histogram, DensityModel), DensityError> {
    let d = &spectrum.descriptor;
    let model = DensityModel::new(d.p, d.leader, spectrum.gamma)?;
    let values: Vec<f64> = spectrum
        .eigenvalues
        .iter()
        .zip(&spectrum.labels)
        .filter(|(_, &l)| l == EigenLabel::Imaginary)
        .map(|(z, _)| z.im)
        .collect();
    let h = histogram(&values, model.support.0, model.support.1, bins)?;
    Ok((h, model))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectra::{eigenvalues, spectral_radius};
    use crate::truncation::tridiagonal_matrix;
    use proptest::prelude::*;

    fn v(x1: i64, x2: i64) -> LatticeVector {
        LatticeVector::new(x1, x2)
    }

    fn adaptive_simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
        fn rec(f: &dyn Fn(f64) -> f64, a: f64, b: f64, fa: f64, fm: f64, fb: f64, whole: f64, tol: f64, depth: u32) -> f64 {
            let m = 0.5 * (a + b);
            let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
            let (flm, frm) = (f(lm), f(rm));
            let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
            let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
            if depth == 0 || (left + right - whole).abs() <= 15.0 * tol {
                return left + right + (left + right - whole) / 15.0;
            }
            rec(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1) + rec(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1)
        }
        let (fa, fb, fm) = (f(a), f(b), f(0.5 * (a + b)));
        rec(f, a, b, fa, fm, fb, (b - a) / 6.0 * (fa + 4.0 * fm + fb), tol, 50)
    }

    #[test]
    fn circulant_examples() {
        let s = circulant_spectrum(5, v(1, 0)).unwrap();
        assert_eq!(s[0], Complex64::new(0.0, 0.0));
        assert!((s[1].im - 1.902113).abs() < 1e-6);
        assert!(circulant_spectrum(4, v(1, 0)).is_err());
        assert!(circulant_spectrum(1, v(1, 0)).is_err());
    }

    #[test]
    fn circulant_matches_dense() {
        for p in [v(1, 0), v(3, 1), v(2, 2)] {
            let r = 1.0 / p.norm_sq() as f64;
            for n in (3..=101).step_by(2) {
                let dense = eigenvalues(&tridiagonal_matrix(&vec![r; n], true)).unwrap();
                let mut exact = circulant_spectrum(n, p).unwrap();
                let scale = spectral_radius(&exact);
                for z in dense {
                    let (i, d) = exact
                        .iter()
                        .enumerate()
                        .map(|(i, w)| (i, (w - z).norm()))
                        .min_by(|a, b| a.1.total_cmp(&b.1))
                        .unwrap();
                    assert!(d <= 1e-10 * scale.max(1.0), "n={n} {z} {d}");
                    exact.swap_remove(i);
                }
            }
        }
    }

    #[test]
    fn density_plug_in_and_domain() {
        let p = v(3, 1);
        let alpha = 3.5;
        let f0 = density_f(0.0, p, alpha).unwrap();
        assert!((f0 - 10.0 / (2.0 * std::f64::consts::PI * alpha)).abs() < 1e-14);
        let edge = 2.0 * alpha / 10.0;
        assert!(density_f(edge, p, alpha).is_err());
        assert!(density_f(-edge * 1.01, p, alpha).is_err());
        assert!(density_f(0.0, v(0, 0), alpha).is_err());
    }

    #[test]
    fn density_normalised() {
        for (p, alpha) in [(v(3, 1), 3.5), (v(1, 0), 0.2), (v(5, 3), -7.0)] {
            let b = 2.0 * f64::abs(alpha) / p.norm_sq() as f64;
            // x = ±b(1 - s²) removes the edge singularity.
            let g = |s: f64| {
                let x = b * (1.0 - s * s);
                if s == 0.0 {
                    return std::f64::consts::SQRT_2 / std::f64::consts::PI;
                }
                density_f(x, p, alpha).unwrap() * 2.0 * b * s
            };
            let half = adaptive_simpson(&g, 0.0, 1.0, 1e-10);
            assert!((2.0 * half - 1.0).abs() < 1e-6, "{half}");
        }
    }

    #[test]
    fn model_fields() {
        let m = DensityModel::new(v(3, 1), v(1, -2), 0.5).unwrap();
        assert_eq!(m.alpha, 0.5 * 7.0);
        assert!((m.beta - 0.7).abs() < 1e-15);
        assert!((m.support.1 - 0.7).abs() < 1e-15 && m.support.0 == -m.support.1);
        assert!(DensityModel::new(v(3, 1), v(3, 1), 0.5).is_err());
    }

    #[test]
    fn circulant_histogram_matches_arcsine() {
        let p = v(3, 1);
        let n = 20001;
        let values: Vec<f64> = circulant_spectrum(n, p).unwrap().iter().map(|z| z.im).collect();
        // all ρ = 1/|p|² corresponds to α = 1
        let model = DensityModel {
            p,
            a: v(0, 0),
            gamma: 1.0,
            alpha: 1.0,
            beta: 0.2,
            support: (-0.2, 0.2),
        };
        let h = histogram(&values, -0.2, 0.2, 40).unwrap();
        assert!((h.mass() - 1.0).abs() < 1e-12);
        let c = h.centers();
        let w = h.width();
        for i in 1..39 {
            // bin average of F from the arcsine CDF
            let cdf = |x: f64| (x / 0.2).clamp(-1.0, 1.0).asin() / std::f64::consts::PI;
            let avg = (cdf(c[i] + w / 2.0) - cdf(c[i] - w / 2.0)) / w;
            assert!((h.density[i] - avg).abs() < 0.02 * avg, "bin {i}");
        }
        assert!(h.sup_deviation(&model).unwrap() < 0.15 * model.density(0.0).unwrap());
    }

    proptest! {
        #[test]
        fn density_even(x in -0.99f64..0.99, alpha in 0.1f64..10.0, p1 in -5i64..=5, p2 in -5i64..=5) {
            let p = v(p1, p2);
            prop_assume!(!p.is_zero());
            let edge = 2.0 * alpha / p.norm_sq() as f64;
            let a = density_f(x * edge, p, alpha).unwrap();
            let b = density_f(-x * edge, p, alpha).unwrap();
            prop_assert_eq!(a, b);
            prop_assert!(a > 0.0);
        }

        #[test]
        fn histogram_mass_is_one(values in prop::collection::vec(-2.0f64..2.0, 1..200), bins in 1usize..50) {
            let h = histogram(&values, -1.0, 1.0, bins).unwrap();
            prop_assert!((h.mass() - 1.0).abs() < 1e-12);
            prop_assert_eq!(h.counts.iter().sum::<usize>(), values.len());
        }
    }
}
