use euler_spectra::convergence::{convergence_series, ConvergencePoint, Series};
use euler_spectra::density::{empirical_density, DensityError};
use euler_spectra::ensemble::{eigenvalue_rows, run_ensemble, EnsembleConfig, EnsembleError};
use euler_spectra::lattice::{self, enumerate_class, LatticeError};
use euler_spectra::spectra::{analyze_class, AnalysisOptions, ClassSpectrum, EigenLabel, SpectraError};
use euler_spectra::verify::{self, Level};
use euler_spectra::{Domain, LatticeVector, TruncationKind};
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::args::{ClassArgs, ConvergenceArgs, DensityArgs, EnsembleArgs, Format, Grid, LevelArg, Physics, VerifyArgs};
use crate::output::{csv_rows, json, Outcome};
use crate::Failure;

const DEFAULT_GAMMA: f64 = 0.5;

fn spectra_failure(e: SpectraError) -> Failure {
    match e {
        SpectraError::Lattice(l) => Failure::usage(l),
        other => Failure::numerical(other),
    }
}

fn ensemble_failure(e: EnsembleError) -> Failure {
    match e {
        EnsembleError::Lattice(l) => Failure::usage(l),
        EnsembleError::Class {
            source: SpectraError::Lattice(l),
            ..
        } => Failure::usage(l),
        other => Failure::numerical(other),
    }
}

fn density_failure(e: DensityError) -> Failure {
    match e {
        DensityError::OutsideSupport { .. } => Failure::numerical(e),
        other => Failure::usage(other),
    }
}

fn options(tol: f64) -> Result<AnalysisOptions, Failure> {
    if !(tol.is_finite() && tol > 0.0) {
        return Err(Failure::usage(format!("--tol must be positive and finite, got {tol}")));
    }
    Ok(AnalysisOptions { tol_rel: tol })
}

fn gamma(value: Option<f64>, default: f64) -> Result<f64, Failure> {
    let g = value.unwrap_or(default);
    if !g.is_finite() {
        return Err(Failure::usage(format!("--gamma must be finite, got {g}")));
    }
    Ok(g)
}

fn wave_vector(physics: &Physics) -> Result<LatticeVector, Failure> {
    let p = physics.p.ok_or_else(|| Failure::usage("--p is required"))?;
    if p.is_zero() {
        return Err(Failure::usage(LatticeError::ZeroWaveVector));
    }
    Ok(p)
}

/// Resolves `--N` / `--n-tilde`, enforcing `--strict-admissible` for Zeitlin.
fn domain(p: LatticeVector, grid: &Grid, kind: TruncationKind, fallback: Option<i64>) -> Result<Domain, Failure> {
    let n = match (grid.n, grid.n_tilde, fallback) {
        (_, Some(t), _) => lattice::admissible_n(p, t).map_err(Failure::usage)?,
        (Some(n), None, _) => n,
        (None, None, Some(n)) => n,
        (None, None, None) => return Err(Failure::usage("one of --N or --n-tilde is required")),
    };
    if grid.strict_admissible && kind == TruncationKind::Zeitlin && !lattice::is_admissible(p, n) {
        return Err(Failure::usage(format!(
            "N = {n} is not an admissible Zeitlin size for p = {p}; pass --n-tilde or drop --strict-admissible"
        )));
    }
    Domain::new(n).map_err(Failure::usage)
}

fn analyse(a: LatticeVector, p: LatticeVector, domain: Domain, kind: TruncationKind, gamma: f64, options: &AnalysisOptions) -> Result<ClassSpectrum, Failure> {
    if !domain.contains(a) {
        return Err(Failure::usage(LatticeError::OutsideDomain { mode: a, n: domain.n() }));
    }
    let c = enumerate_class(a, p, domain, kind).map_err(Failure::usage)?;
    analyze_class(&c, gamma, options).map_err(spectra_failure)
}

/// JSON record of one class.
#[derive(Serialize, Deserialize)]
pub struct ClassReport {
    #[serde(flatten)]
    pub spectrum: ClassSpectrum,
    /// `ρ` per mode; `null` at the origin.
    pub rho: Vec<Option<f64>>,
    pub largest_real: Option<f64>,
    pub largest_real_unscaled: Option<f64>,
}

#[derive(Serialize)]
struct EigenCsvRow {
    re: f64,
    im: f64,
    label: EigenLabel,
}

pub fn class(args: &ClassArgs, format: Option<Format>) -> Result<Outcome, Failure> {
    let p = wave_vector(&args.physics)?;
    let kind: TruncationKind = args.physics.kind.into();
    let opts = options(args.physics.tol)?;
    let g = gamma(args.physics.gamma, DEFAULT_GAMMA)?;
    let d = domain(p, &args.grid, kind, None)?;
    let s = analyse(args.a, p, d, kind, g, &opts)?;

    let summary = json!({
        "size": s.descriptor.size(),
        "case": s.case,
        "alpha": s.alpha,
        "classification": s.classification,
        "largest_real": s.largest_real(),
        "certificates": s.certificates,
    });
    let body = match format.unwrap_or(Format::Json) {
        Format::Json => json(&ClassReport {
            rho: s.descriptor.modes.iter().map(|&m| lattice::rho_of_mode(m, p).ok()).collect(),
            largest_real: s.largest_real(),
            largest_real_unscaled: s.largest_real_unscaled(),
            spectrum: s.clone(),
        })?,
        Format::Csv => {
            let mut rows: Vec<EigenCsvRow> = s
                .eigenvalues
                .iter()
                .zip(&s.labels)
                .map(|(z, &label)| EigenCsvRow {
                    re: z.re + 0.0,
                    im: z.im + 0.0,
                    label,
                })
                .collect();
            rows.sort_by(|x, y| x.re.total_cmp(&y.re).then(x.im.total_cmp(&y.im)));
            csv_rows(rows)?
        }
    };
    let config = json!({
        "p": p,
        "a": args.a,
        "gamma": g,
        "n": d.n(),
        "kind": kind,
        "tol": opts.tol_rel,
    });
    Ok(Outcome::new(body, config, Some(opts.tol_rel), summary))
}

#[derive(Serialize)]
struct RecordCsvRow {
    leader_x1: i64,
    leader_x2: i64,
    size: usize,
    alpha: f64,
    case: &'static str,
    solved: bool,
    real_pairs: Option<usize>,
    quadruplets: Option<usize>,
    hyperbolic_type: &'static str,
    largest_real: Option<f64>,
}

#[derive(Serialize)]
struct EigenLeaderRow {
    re: f64,
    im: f64,
    leader_x1: i64,
    leader_x2: i64,
}

pub fn ensemble(args: &EnsembleArgs, format: Option<Format>) -> Result<Outcome, Failure> {
    let p = wave_vector(&args.physics)?;
    let kind: TruncationKind = args.physics.kind.into();
    let config = EnsembleConfig {
        p,
        gamma: gamma(args.physics.gamma, DEFAULT_GAMMA)?,
        domain: domain(p, &args.grid, kind, None)?,
        kind,
        options: options(args.physics.tol)?,
        fast: args.fast,
    };
    let out = run_ensemble(&config).map_err(ensemble_failure)?;
    let report = &out.report;

    let body = match format.unwrap_or(Format::Json) {
        Format::Json => json(report)?,
        Format::Csv => csv_rows(report.records.iter().map(|r| RecordCsvRow {
            leader_x1: r.leader.x1,
            leader_x2: r.leader.x2,
            size: r.size,
            alpha: r.alpha,
            case: r.case.label(),
            solved: r.solved,
            real_pairs: r.classification.map(|c| c.real_pairs),
            quadruplets: r.classification.map(|c| c.quadruplets),
            hyperbolic_type: r.hyperbolic_type(),
            largest_real: r.largest_real,
        }))?,
    };
    let eigen = csv_rows(eigenvalue_rows(&out.spectra).into_iter().map(|r| EigenLeaderRow {
        re: r.re,
        im: r.im,
        leader_x1: r.leader.x1,
        leader_x2: r.leader.x2,
    }))?;
    let hyperbolic: Vec<_> = report
        .records
        .iter()
        .filter(|r| r.hyperbolic_type() != "none")
        .map(|r| json!({"leader": r.leader, "type": r.hyperbolic_type()}))
        .collect();
    let summary = json!({
        "totals": report.totals,
        "census": report.census,
        "hyperbolic_classes": hyperbolic,
    });
    let mut outcome = Outcome::new(body, serde_json::to_value(config).map_err(Failure::io)?, Some(config.options.tol_rel), summary);
    outcome.siblings.push(("eigenvalues.csv", eigen));
    Ok(outcome)
}

pub fn convergence(args: &ConvergenceArgs, format: Option<Format>) -> Result<Outcome, Failure> {
    if args.p.is_zero() {
        return Err(Failure::usage(LatticeError::ZeroWaveVector));
    }
    let opts = options(args.tol)?;
    let ns: Vec<i64> = if args.n_values.is_empty() {
        args.n_tilde_values
            .iter()
            .map(|&t| lattice::admissible_n(args.p, t).map_err(Failure::usage))
            .collect::<Result<_, _>>()?
    } else {
        args.n_values.clone()
    };
    for &n in &ns {
        let d = Domain::new(n).map_err(Failure::usage)?;
        if !d.contains(args.a) {
            return Err(Failure::usage(LatticeError::OutsideDomain { mode: args.a, n }));
        }
    }
    let points = convergence_series(args.a, args.p, &ns, args.strict_admissible, &opts).map_err(spectra_failure)?;

    let last = |kind: TruncationKind, series: Series| -> Option<&ConvergencePoint> {
        points.iter().filter(|q| q.kind == kind && q.series == series).max_by_key(|q| q.n)
    };
    let limits: Vec<_> = [
        (TruncationKind::Zeitlin, Series::SameDomain),
        (TruncationKind::Galerkin, Series::SameDomain),
        (TruncationKind::Galerkin, Series::MatchedModes),
    ]
    .into_iter()
    .filter_map(|(k, s)| last(k, s))
    .map(|q| json!({"kind": q.kind, "series": q.series, "n": q.n, "lambda": q.lambda}))
    .collect();

    let body = match format.unwrap_or(Format::Csv) {
        Format::Csv => csv_rows(&points)?,
        Format::Json => json(&points)?,
    };
    let config = json!({
        "p": args.p,
        "a": args.a,
        "n_values": ns,
        "strict_admissible": args.strict_admissible,
        "tol": opts.tol_rel,
    });
    Ok(Outcome::new(body, config, Some(opts.tol_rel), json!({"points": points.len(), "largest_n": limits})))
}

#[derive(Serialize)]
struct DensityRow {
    bin_center: f64,
    empirical: f64,
    model: f64,
}

pub fn density(args: &DensityArgs, format: Option<Format>) -> Result<Outcome, Failure> {
    let (preset_p, preset_a, preset_n, preset_gamma) = args.preset.values();
    let p = args.physics.p.unwrap_or(preset_p);
    let a = args.a.unwrap_or(preset_a);
    let kind: TruncationKind = args.physics.kind.into();
    let opts = options(args.physics.tol)?;
    let g = gamma(args.physics.gamma, preset_gamma)?;
    let d = domain(p, &args.grid, kind, Some(preset_n))?;
    if args.bins == 0 {
        return Err(Failure::usage(DensityError::NoBins));
    }
    let s = analyse(a, p, d, kind, g, &opts)?;
    let (h, model) = empirical_density(&s, args.bins).map_err(density_failure)?;

    let centers = h.centers();
    let rows: Vec<DensityRow> = centers
        .iter()
        .zip(&h.density)
        .map(|(&c, &e)| {
            Ok(DensityRow {
                bin_center: c,
                empirical: e,
                model: model.density(c).map_err(density_failure)?,
            })
        })
        .collect::<Result<_, Failure>>()?;
    let f0 = model.density(0.0).map_err(density_failure)?;
    let sup = h.sup_deviation(&model).map_err(density_failure)?;
    let summary = json!({
        "support": [model.support.0, model.support.1],
        "alpha": model.alpha,
        "beta": model.beta,
        "model_at_zero": f0,
        "sup_deviation": sup,
        "sup_deviation_over_model_at_zero": sup / f0,
        "max_abs_im": s.max_abs_im(),
        "support_gap": 1.0 - s.max_abs_im() / model.edge(),
        "imaginary": s.classification.imaginary,
        "nonimaginary": s.classification.nonimaginary(),
        "clipped": h.clipped,
        "mass": h.mass(),
    });
    let body = match format.unwrap_or(Format::Csv) {
        Format::Csv => csv_rows(rows)?,
        Format::Json => json(&json!({"model": model, "histogram": h, "summary": summary}))?,
    };
    let config = json!({
        "preset": args.preset,
        "p": p,
        "a": a,
        "gamma": g,
        "n": d.n(),
        "kind": kind,
        "bins": args.bins,
        "tol": opts.tol_rel,
    });
    Ok(Outcome::new(body, config, Some(opts.tol_rel), summary))
}

pub fn verify(args: &VerifyArgs) -> Result<Outcome, Failure> {
    let level = match args.level {
        LevelArg::Quick => Level::Quick,
        LevelArg::Full => Level::Full,
    };
    let results = verify::run(level);
    for r in &results {
        println!("{r}");
    }
    let failed: Vec<u8> = results.iter().filter(|r| !r.passed).map(|r| r.id).collect();
    println!("{}/{} criteria passed", results.len() - failed.len(), results.len());

    let summary = json!({
        "checks": results.iter().map(|r| json!({"id": r.id, "name": r.name, "passed": r.passed})).collect::<Vec<_>>(),
        "failed": failed,
    });
    let mut outcome = Outcome::new(json(&results)?, json!({"level": level}), None, summary);
    outcome.body_to_stdout = false;
    if !failed.is_empty() {
        let ids: Vec<String> = failed.iter().map(u8::to_string).collect();
        outcome.failure = Some(Failure {
            code: Failure::VERIFICATION,
            error: anyhow::anyhow!("failed criteria: {}", ids.join(", ")),
        });
    }
    Ok(outcome)
}
