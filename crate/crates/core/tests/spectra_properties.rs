//! Spectral properties over whole families of classes.

use euler_spectra::ensemble::{run_ensemble, EnsembleConfig, EnsembleReport};
use euler_spectra::lattice::{admissible_n, disc_census, enumerate_class, min_n_tilde, unstable_disc};
use euler_spectra::spectra::{analyze_class, class_reality, AnalysisOptions, ClassSpectrum, StabilityCase};
use euler_spectra::{Domain, LatticeVector, TruncationKind};

fn v(x1: i64, x2: i64) -> LatticeVector {
    LatticeVector::new(x1, x2)
}

fn ensemble(p: LatticeVector, n: i64, kind: TruncationKind, fast: bool) -> EnsembleReport {
    run_ensemble(&EnsembleConfig {
        p,
        gamma: 0.5,
        domain: Domain::new(n).unwrap(),
        kind,
        options: AnalysisOptions::default(),
        fast,
    })
    .unwrap()
    .report
}

#[test]
fn case_i_classes_have_a_real_pair() {
    for p in [v(3, 1), v(5, 3), v(4, 1)] {
        let zn = admissible_n(p, min_n_tilde(p) + 5).unwrap();
        for (kind, n) in [(TruncationKind::Zeitlin, zn), (TruncationKind::Galerkin, zn)] {
            let d = Domain::new(n).unwrap();
            let mut seen = 0;
            for a in unstable_disc(p).unwrap().into_iter().filter(|a| !a.is_zero()) {
                let c = enumerate_class(a, p, d, kind).unwrap();
                let s = analyze_class(&c, 0.5, &AnalysisOptions::default()).unwrap();
                // Galerkin chains split at a ρ = 0 mode, which can leave the
                // disc mode at a chain end without a real pair.
                let split = kind == TruncationKind::Galerkin && c.rho().unwrap().contains(&0.0);
                if s.case == StabilityCase::CaseI && !split {
                    seen += 1;
                    assert!(s.classification.real_pairs >= 1, "{kind} p={p} a={a}");
                }
            }
            assert!(seen > 0);
        }
    }
}

#[test]
fn lower_bound_holds_along_admissible_sequence() {
    for p in [v(3, 1), v(4, 1), v(3, 2)] {
        let base = min_n_tilde(p);
        for a in unstable_disc(p).unwrap().into_iter().filter(|a| !a.is_zero()) {
            let mut min_dense = f64::INFINITY;
            let mut dagger = None;
            for step in [0, 4, 16, 48] {
                let n = admissible_n(p, base + step).unwrap();
                let c = enumerate_class(a, p, Domain::new(n).unwrap(), TruncationKind::Zeitlin).unwrap();
                if !class_reality(&c) {
                    continue;
                }
                let s = analyze_class(&c, 0.5, &AnalysisOptions::default()).unwrap();
                let cert = s.certificates.expect("case i with reality is certified");
                let dense = s.largest_real_unscaled().unwrap();
                assert!(dense > cert.lambda_dagger_unscaled, "p={p} a={a} N={n}");
                assert!((dense - cert.bracketed_root_unscaled).abs() <= 1e-8, "p={p} a={a} N={n}");
                min_dense = min_dense.min(dense);
                dagger = Some(cert.lambda_dagger_unscaled);
            }
            if let Some(d) = dagger {
                assert!(min_dense >= d);
            }
        }
    }
}

#[test]
fn hyperbolic_count_matches_disc_size() {
    for (p, n) in [(v(2, 1), 12), (v(2, 1), 30), (v(5, 3), 34)] {
        let r = ensemble(p, n, TruncationKind::Zeitlin, true);
        let census = disc_census(p).unwrap();
        assert_eq!(r.totals.nonimaginary, 2 * census.interior_points, "p={p} N={n}");
    }
}

#[test]
fn p_2_1_real_pairs_and_quadruplets() {
    // classes of a and -a have equal spectra; counted once per pair
    let r = ensemble(v(2, 1), 30, TruncationKind::Zeitlin, true);
    assert_eq!((r.totals.real_pairs, r.totals.quadruplets), (4, 4));
    let real = r.records.iter().filter(|r| r.hyperbolic_type() == "real").count();
    let complex = r.records.iter().filter(|r| r.hyperbolic_type() == "complex").count();
    assert_eq!((real / 2, complex / 2), (2, 2));
    for rec in r.records.iter().filter(|r| r.hyperbolic_type() != "none") {
        let twin = r.records.iter().find(|t| t.leader == canonical_negation(&r.config, rec.leader)).unwrap();
        assert_eq!(twin.classification, rec.classification);
    }
}

/// Leader of the class containing `-a`.
fn canonical_negation(config: &EnsembleConfig, a: LatticeVector) -> LatticeVector {
    let c = enumerate_class(-a, config.p, config.domain, config.kind).unwrap();
    // canonical leaders come first in row-major order
    *c.modes.iter().min_by_key(|m| config.domain.index_of(**m)).unwrap()
}

#[test]
fn stable_cases_are_imaginary() {
    let r = ensemble(v(3, 1), 12, TruncationKind::Zeitlin, false);
    for rec in r.records.iter().filter(|r| r.case == StabilityCase::Stable) {
        assert_eq!(rec.classification.unwrap().nonimaginary(), 0, "{}", rec.leader);
    }
    let g = ensemble(v(3, 1), 12, TruncationKind::Galerkin, false);
    assert!(g.records.iter().all(|r| r.case != StabilityCase::CaseIII));
}

#[test]
fn p_6_2_re_entry_is_case_iii() {
    for n in [10, 17, 30] {
        let c = enumerate_class(v(1, 6), v(6, 2), Domain::new(n).unwrap(), TruncationKind::Zeitlin).unwrap();
        let s = analyze_class(&c, 0.5, &AnalysisOptions::default()).unwrap();
        assert_eq!(s.case, StabilityCase::CaseIII);
    }
}

#[test]
fn reports_round_trip_through_json() {
    let r = ensemble(v(2, 1), 6, TruncationKind::Zeitlin, false);
    let text = serde_json::to_string(&r).unwrap();
    let back: EnsembleReport = serde_json::from_str(&text).unwrap();
    assert_eq!(back, r);

    let c = enumerate_class(v(1, -2), v(3, 1), Domain::new(19).unwrap(), TruncationKind::Zeitlin).unwrap();
    let s = analyze_class(&c, 0.5, &AnalysisOptions::default()).unwrap();
    let back: ClassSpectrum = serde_json::from_str(&serde_json::to_string(&s).unwrap()).unwrap();
    assert_eq!(back, s);
}
