//! Sweeps over every class of one equilibrium.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::lattice::{self, DiscCensus, Domain, LatticeError, LatticeVector, TruncationKind};
use crate::spectra::{analyze_class, stability_case, AnalysisOptions, Certificates, Classification, ClassSpectrum, SpectraError, StabilityCase};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EnsembleError {
    #[error(transparent)]
    Lattice(#[from] LatticeError),
    #[error("class led by {leader}: {source}")]
    Class {
        leader: LatticeVector,
        #[source]
        source: SpectraError,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnsembleConfig {
    pub p: LatticeVector,
    pub gamma: f64,
    pub domain: Domain,
    pub kind: TruncationKind,
    pub options: AnalysisOptions,
    /// Skip dense solves of `Stable` and `ZeroAlpha` classes.
    pub fast: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClassRecord {
    pub leader: LatticeVector,
    pub size: usize,
    pub alpha: f64,
    pub case: StabilityCase,
    pub solved: bool,
    /// `None` when the dense solve was skipped.
    pub classification: Option<Classification>,
    pub certificates: Option<Certificates>,
    pub largest_real: Option<f64>,
}

impl ClassRecord {
    /// `none`, `real`, `complex` or `mixed` by the hyperbolic eigenvalues present.
    pub fn hyperbolic_type(&self) -> &'static str {
        match self.classification {
            Some(c) if c.real_pairs > 0 && c.quadruplets > 0 => "mixed",
            Some(c) if c.real_pairs > 0 => "real",
            Some(c) if c.quadruplets > 0 => "complex",
            _ => "none",
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Totals {
    pub classes: usize,
    pub solved: usize,
    pub modes: usize,
    pub nonimaginary: usize,
    pub real: usize,
    pub complex: usize,
    pub real_pairs: usize,
    pub quadruplets: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnsembleReport {
    pub config: EnsembleConfig,
    pub records: Vec<ClassRecord>,
    pub totals: Totals,
    pub census: DiscCensus,
}

impl EnsembleReport {
    pub fn recompute_totals(records: &[ClassRecord]) -> Totals {
        let mut t = Totals {
            classes: records.len(),
            ..Totals::default()
        };
        for r in records {
            t.modes += r.size;
            if let Some(c) = r.classification {
                t.solved += 1;
                t.nonimaginary += c.nonimaginary();
                t.real += c.real();
                t.complex += c.complex();
                t.real_pairs += c.real_pairs;
                t.quadruplets += c.quadruplets;
            }
        }
        t
    }
}

/// A report plus the spectra of the solved classes, sorted by leader.
#[derive(Clone, Debug)]
pub struct EnsembleOutcome {
    pub report: EnsembleReport,
    pub spectra: Vec<ClassSpectrum>,
}

/// One CSV row of an ensemble eigenvalue dump.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EigenRow {
    pub re: f64,
    pub im: f64,
    pub leader: LatticeVector,
}

/// Rows of every solved spectrum, sorted by `(re, im, leader)`.
pub fn eigenvalue_rows(spectra: &[ClassSpectrum]) -> Vec<EigenRow> {
    let mut rows: Vec<EigenRow> = spectra
        .iter()
        .flat_map(|s| {
            s.eigenvalues.iter().map(move |z: &Complex64| EigenRow {
                // `+ 0.0` folds -0.0 into 0.0
                re: z.re + 0.0,
                im: z.im + 0.0,
                leader: s.descriptor.leader,
            })
        })
        .collect();
    rows.sort_by(|a, b| {
        a.re.total_cmp(&b.re)
            .then(a.im.total_cmp(&b.im))
            .then_with(|| a.leader.cmp(&b.leader))
    });
    rows
}

/// Runs on the current rayon pool; results do not depend on the pool size.
pub fn run_ensemble(config: &EnsembleConfig) -> Result<EnsembleOutcome, EnsembleError> {
    let classes = lattice::enumerate_classes(config.p, config.domain, config.kind)?;
    let results: Vec<(ClassRecord, Option<ClassSpectrum>)> = classes
        .par_iter()
        .map(|c| {
            let wrap = |source| EnsembleError::Class { leader: c.leader, source };
            let case = stability_case(c).map_err(wrap)?;
            let skip = config.fast && matches!(case, StabilityCase::Stable | StabilityCase::ZeroAlpha);
            if skip {
                let alpha = lattice::alpha(c.leader, c.p, config.gamma, c.domain, c.kind);
                return Ok((
                    ClassRecord {
                        leader: c.leader,
                        size: c.size(),
                        alpha,
                        case,
                        solved: false,
                        classification: None,
                        certificates: None,
                        largest_real: None,
                    },
                    None,
                ));
            }
            let s = analyze_class(c, config.gamma, &config.options).map_err(wrap)?;
            Ok((
                ClassRecord {
                    leader: c.leader,
                    size: c.size(),
                    alpha: s.alpha,
                    case: s.case,
                    solved: true,
                    classification: Some(s.classification),
                    certificates: s.certificates,
                    largest_real: s.largest_real(),
                },
                Some(s),
            ))
        })
        .collect::<Result<_, EnsembleError>>()?;

    let (mut records, spectra): (Vec<_>, Vec<_>) = results.into_iter().unzip();
    records.sort_by_key(|r| r.leader);
    let mut spectra: Vec<ClassSpectrum> = spectra.into_iter().flatten().collect();
    spectra.sort_by_key(|s| s.descriptor.leader);
    let totals = EnsembleReport::recompute_totals(&records);
    Ok(EnsembleOutcome {
        report: EnsembleReport {
            config: *config,
            records,
            totals,
            census: lattice::disc_census(config.p)?,
        },
        spectra,
    })
}
