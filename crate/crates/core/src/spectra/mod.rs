//! Dense class spectra, their classification, the stability-case taxonomy,
//! reality predicates for the lower bound, and eigenvector decay.

mod analysis;
mod cases;
mod classify;
mod decay;
mod eigen;

pub use analysis::{analyze_class, AnalysisOptions, Certificates, ClassSpectrum};
pub use cases::{
    case_from_signs, class_reality, find_case_i_leader, in_sufficient_region, reality_condition,
    stability_case, sufficient_disc, StabilityCase, SUFFICIENT_NORM,
};
pub use classify::{classify, Classification, EigenLabel, DEFAULT_TOL_REL, PAIR_TOL_REL};
pub use decay::{decay_roots, eigenvector_decay, DecayAnalysis, MIN_DECAY_SIZE};
pub use eigen::{eigenvalues, real_eigenvector, spectral_radius};

use thiserror::Error;

use crate::charpoly::CharpolyError;
use crate::lattice::{LatticeError, TruncationKind};
use crate::truncation::TruncationError;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SpectraError {
    #[error("eigensolver failed: {0}")]
    Eigensolver(String),
    #[error("matrix has non-finite entries")]
    NonFinite,
    #[error("eigenvalue {value} has no partner {partner} within {tol:e}")]
    Unpaired {
        value: num_complex::Complex64,
        partner: num_complex::Complex64,
        tol: f64,
    },
    #[error("{kind} class has non-consecutive disc modes {indices:?}")]
    GalerkinCaseIii {
        kind: TruncationKind,
        indices: Vec<usize>,
    },
    #[error("dense real eigenvalue {dense} below certified lower bound {bound}")]
    BoundViolated { dense: f64, bound: f64 },
    #[error("{lambda} is not an eigenvalue: relative residual {residual:e}")]
    NotEigenvalue { lambda: f64, residual: f64 },
    #[error("class size {0} too small for the decay analysis (need >= {MIN_DECAY_SIZE})")]
    ClassTooSmall(usize),
    #[error("no decaying tail samples above the magnitude floor")]
    EmptyTail,
    #[error(transparent)]
    Lattice(#[from] LatticeError),
    #[error(transparent)]
    Truncation(#[from] TruncationError),
    #[error(transparent)]
    Charpoly(#[from] CharpolyError),
}
