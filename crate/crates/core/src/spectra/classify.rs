//! Labelling eigenvalues and grouping them into Hamiltonian orbits.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::SpectraError;

/// Default classification tolerance relative to the spectral radius.
pub const DEFAULT_TOL_REL: f64 = 1e-8;
/// Tolerance for matching `λ` with `-λ`, `λ̄`, `-λ̄`, relative to the spectral radius.
pub const PAIR_TOL_REL: f64 = 1e-6;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EigenLabel {
    Zero,
    Imaginary,
    Real,
    Complex,
}

/// Eigenvalue counts by type. Real pairs and quadruplets are counted as orbits.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Classification {
    pub zero: usize,
    pub imaginary: usize,
    pub real_pairs: usize,
    pub quadruplets: usize,
}

impl Classification {
    pub fn total(&self) -> usize {
        self.zero + self.imaginary + 2 * self.real_pairs + 4 * self.quadruplets
    }

    /// Number of eigenvalues with nonzero real part.
    pub fn nonimaginary(&self) -> usize {
        2 * self.real_pairs + 4 * self.quadruplets
    }

    pub fn real(&self) -> usize {
        2 * self.real_pairs
    }

    pub fn complex(&self) -> usize {
        4 * self.quadruplets
    }

    pub fn add(&self, other: &Self) -> Self {
        Self {
            zero: self.zero + other.zero,
            imaginary: self.imaginary + other.imaginary,
            real_pairs: self.real_pairs + other.real_pairs,
            quadruplets: self.quadruplets + other.quadruplets,
        }
    }
}

/// The label for one eigenvalue with absolute tolerance `tol`.
pub fn label(z: Complex64, tol: f64) -> EigenLabel {
    if z.norm() <= tol {
        EigenLabel::Zero
    } else if z.re.abs() <= tol {
        EigenLabel::Imaginary
    } else if z.im.abs() <= tol {
        EigenLabel::Real
    } else {
        EigenLabel::Complex
    }
}

/// Removes and returns the unused entry of `pool` nearest to `target`, if
/// within `tol`.
fn take_nearest(pool: &[Complex64], used: &mut [bool], target: Complex64, tol: f64) -> Result<(), f64> {
    let best = pool
        .iter()
        .enumerate()
        .filter(|(i, _)| !used[*i])
        .map(|(i, z)| (i, (z - target).norm()))
        .min_by(|a, b| a.1.total_cmp(&b.1));
    match best {
        Some((i, d)) if d <= tol => {
            used[i] = true;
            Ok(())
        }
        Some((_, d)) => Err(d),
        None => Err(f64::INFINITY),
    }
}

fn sort_key(z: &Complex64) -> (f64, f64) {
    (z.re, z.im)
}

/// Labels and groups a spectrum.
///
/// Tolerances are `tol_rel · scale` for labelling and
/// `max(PAIR_TOL_REL, tol_rel) · scale` for pairing. Real eigenvalues pair as
/// `±λ`; complex ones group into `±λ, ±λ̄`.
pub fn classify(spectrum: &[Complex64], scale: f64, tol_rel: f64) -> Result<(Classification, Vec<EigenLabel>), SpectraError> {
    let tol = tol_rel * scale;
    let pair_tol = PAIR_TOL_REL.max(tol_rel) * scale;
    let labels: Vec<EigenLabel> = spectrum.iter().map(|&z| label(z, tol)).collect();
    let mut counts = Classification::default();

    let mut reals: Vec<Complex64> = Vec::new();
    let mut complexes: Vec<Complex64> = Vec::new();
    for (&z, &l) in spectrum.iter().zip(&labels) {
        match l {
            EigenLabel::Zero => counts.zero += 1,
            EigenLabel::Imaginary => counts.imaginary += 1,
            EigenLabel::Real => reals.push(Complex64::new(z.re, 0.0)),
            EigenLabel::Complex => complexes.push(z),
        }
    }
    reals.sort_by(|a, b| sort_key(a).partial_cmp(&sort_key(b)).unwrap());
    complexes.sort_by(|a, b| sort_key(a).partial_cmp(&sort_key(b)).unwrap());

    let mut used = vec![false; reals.len()];
    for i in (0..reals.len()).rev() {
        if used[i] || reals[i].re < 0.0 {
            continue;
        }
        used[i] = true;
        let partner = -reals[i];
        take_nearest(&reals, &mut used, partner, pair_tol).map_err(|_| SpectraError::Unpaired {
            value: reals[i],
            partner,
            tol: pair_tol,
        })?;
        counts.real_pairs += 1;
    }
    if let Some(i) = used.iter().position(|u| !u) {
        return Err(SpectraError::Unpaired {
            value: reals[i],
            partner: -reals[i],
            tol: pair_tol,
        });
    }

    let mut used = vec![false; complexes.len()];
    for i in (0..complexes.len()).rev() {
        let z = complexes[i];
        if used[i] || z.re < 0.0 || z.im < 0.0 {
            continue;
        }
        used[i] = true;
        for partner in [-z, z.conj(), -z.conj()] {
            take_nearest(&complexes, &mut used, partner, pair_tol).map_err(|_| SpectraError::Unpaired {
                value: z,
                partner,
                tol: pair_tol,
            })?;
        }
        counts.quadruplets += 1;
    }
    if let Some(i) = used.iter().position(|u| !u) {
        let z = complexes[i];
        return Err(SpectraError::Unpaired {
            value: z,
            partner: -z.conj(),
            tol: pair_tol,
        });
    }
    Ok((counts, labels))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn simple_example() {
        let (k, labels) = classify(&[c(0.1, 0.0), c(-0.1, 0.0), c(0.0, 2.0), c(0.0, -2.0)], 1.0, DEFAULT_TOL_REL).unwrap();
        assert_eq!(
            k,
            Classification {
                zero: 0,
                imaginary: 2,
                real_pairs: 1,
                quadruplets: 0
            }
        );
        assert_eq!(labels[0], EigenLabel::Real);
        assert_eq!(k.total(), 4);
    }

    #[test]
    fn quadruplet_and_zero() {
        let z = c(0.25, 0.35);
        let spec = [z, -z, z.conj(), -z.conj(), c(0.0, 0.0), c(1e-12, 0.3)];
        let (k, _) = classify(&spec, 1.0, DEFAULT_TOL_REL).unwrap();
        assert_eq!(k.quadruplets, 1);
        assert_eq!(k.zero, 1);
        assert_eq!(k.imaginary, 1);
        assert_eq!(k.nonimaginary(), 4);
    }

    #[test]
    fn unpaired_is_error() {
        assert!(matches!(
            classify(&[c(0.1, 0.0), c(-0.2, 0.0)], 1.0, DEFAULT_TOL_REL),
            Err(SpectraError::Unpaired { .. })
        ));
        let z = c(0.25, 0.35);
        assert!(classify(&[z, -z, z.conj()], 1.0, DEFAULT_TOL_REL).is_err());
    }

    #[test]
    fn pairing_tolerates_roundoff() {
        let spec = [c(0.3 + 1e-9, 0.0), c(-0.3, 0.0)];
        assert_eq!(classify(&spec, 1.0, DEFAULT_TOL_REL).unwrap().0.real_pairs, 1);
    }
}
