//! Single-class analysis: dense spectrum, classification and the case-(i)
//! certificate chain.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::cases::{stability_case, StabilityCase};
use super::classify::{classify, Classification, EigenLabel, DEFAULT_TOL_REL};
use super::eigen::{eigenvalues, spectral_radius};
use super::SpectraError;
use crate::charpoly::{certified_root, CoefficientSequence, Side};
use crate::lattice::{self, ClassDescriptor};
use crate::truncation::class_matrix;

/// Slack on the dense-versus-bound comparison.
const BOUND_SLACK: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AnalysisOptions {
    /// Classification tolerance relative to the spectral radius of `αA`.
    pub tol_rel: f64,
}

impl Default for AnalysisOptions {
    fn default() -> Self {
        Self {
            tol_rel: DEFAULT_TOL_REL,
        }
    }
}

/// Case-(i) certificate. Scaled values include `|α|`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Certificates {
    pub lambda_dagger: f64,
    pub bracketed_root: f64,
    pub lambda_dagger_unscaled: f64,
    pub bracketed_root_unscaled: f64,
    pub bracket_unscaled: (f64, f64),
    pub side: Side,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClassSpectrum {
    pub descriptor: ClassDescriptor,
    pub gamma: f64,
    pub alpha: f64,
    pub case: StabilityCase,
    /// Spectrum of `A` (no `α` factor).
    pub eigenvalues_unscaled: Vec<Complex64>,
    /// Spectrum of `αA`.
    pub eigenvalues: Vec<Complex64>,
    pub labels: Vec<EigenLabel>,
    pub classification: Classification,
    pub certificates: Option<Certificates>,
}

impl ClassSpectrum {
    /// Largest real eigenvalue of `A`, if any eigenvalue is labelled real.
    pub fn largest_real_unscaled(&self) -> Option<f64> {
        self.eigenvalues_unscaled
            .iter()
            .zip(&self.labels)
            .filter(|(_, &l)| l == EigenLabel::Real)
            .map(|(z, _)| z.re.abs())
            .max_by(f64::total_cmp)
    }

    /// Largest real eigenvalue of `αA`.
    pub fn largest_real(&self) -> Option<f64> {
        self.largest_real_unscaled().map(|x| x * self.alpha.abs())
    }

    pub fn max_abs_re(&self) -> f64 {
        self.eigenvalues.iter().map(|z| z.re.abs()).fold(0.0, f64::max)
    }

    pub fn max_abs_im(&self) -> f64 {
        self.eigenvalues.iter().map(|z| z.im.abs()).fold(0.0, f64::max)
    }
}

/// Analyses one class of the linearisation about `Γ cos(p·x)`.
///
/// `α = 0` short-circuits to an all-zero spectrum without a dense solve.
pub fn analyze_class(descriptor: &ClassDescriptor, gamma: f64, options: &AnalysisOptions) -> Result<ClassSpectrum, SpectraError> {
    let n = descriptor.size();
    let case = stability_case(descriptor)?;
    let alpha = lattice::alpha(descriptor.leader, descriptor.p, gamma, descriptor.domain, descriptor.kind);
    if case == StabilityCase::ZeroAlpha || alpha == 0.0 {
        return Ok(ClassSpectrum {
            descriptor: descriptor.clone(),
            gamma,
            alpha,
            case: StabilityCase::ZeroAlpha,
            eigenvalues_unscaled: Vec::new(),
            eigenvalues: vec![Complex64::new(0.0, 0.0); n],
            labels: vec![EigenLabel::Zero; n],
            classification: Classification {
                zero: n,
                ..Classification::default()
            },
            certificates: None,
        });
    }

    let cm = class_matrix(descriptor, gamma)?;
    let unscaled = eigenvalues(&cm.matrix)?;
    let scaled: Vec<Complex64> = unscaled.iter().map(|z| z * alpha).collect();
    let (classification, labels) = classify(&scaled, spectral_radius(&scaled), options.tol_rel)?;

    let mut spectrum = ClassSpectrum {
        descriptor: descriptor.clone(),
        gamma,
        alpha,
        case,
        eigenvalues_unscaled: unscaled,
        eigenvalues: scaled,
        labels,
        classification,
        certificates: None,
    };

    if case == StabilityCase::CaseI {
        let root = cm.rho.iter().position(|&r| r < 0.0).expect("case i has a disc mode");
        let cert = CoefficientSequence::new(cm.rho.clone(), descriptor.is_cyclic())
            .ok()
            .and_then(|seq| certified_root(&seq, root));
        if let Some(c) = cert {
            let dense = spectrum.largest_real_unscaled().unwrap_or(0.0);
            if dense * alpha.abs() < c.lambda_dagger * alpha.abs() - BOUND_SLACK {
                return Err(SpectraError::BoundViolated {
                    dense: dense * alpha.abs(),
                    bound: c.lambda_dagger * alpha.abs(),
                });
            }
            spectrum.certificates = Some(Certificates {
                lambda_dagger: c.lambda_dagger * alpha.abs(),
                bracketed_root: c.root * alpha.abs(),
                lambda_dagger_unscaled: c.lambda_dagger,
                bracketed_root_unscaled: c.root,
                bracket_unscaled: c.bracket,
                side: c.side,
            });
        }
    }
    Ok(spectrum)
}
