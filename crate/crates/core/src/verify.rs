//! Reproducible checks with fixed tolerances. Each check reports one
//! pass/fail line.

use std::fmt;
use std::time::Instant;

use faer::Mat;
use num_complex::Complex64;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use serde::{Deserialize, Serialize};

use crate::charpoly::{self, CoefficientSequence};
use crate::density::{self, DensityModel};
use crate::ensemble::{run_ensemble, EnsembleConfig};
use crate::lattice::{self, admissible_n, enumerate_class, enumerate_classes, min_n_tilde, Domain, LatticeVector, TruncationKind};
use crate::spectra::{self, analyze_class, eigenvalues, find_case_i_leader, AnalysisOptions, EigenLabel};
use crate::truncation::{class_matrix, full_jacobian, tridiagonal_matrix};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Level {
    Quick,
    Full,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckResult {
    pub id: u8,
    pub name: String,
    pub passed: bool,
    pub detail: String,
    pub seconds: f64,
}

impl fmt::Display for CheckResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "[{}] criterion {}: {} ({}; {:.1}s)",
            if self.passed { "PASS" } else { "FAIL" },
            self.id,
            self.name,
            self.detail,
            self.seconds
        )
    }
}

type Outcome = Result<(bool, String), String>;

fn timed(id: u8, name: &str, f: impl FnOnce() -> Outcome) -> CheckResult {
    let start = Instant::now();
    let (passed, detail) = match f() {
        Ok(r) => r,
        Err(e) => (false, format!("error: {e}")),
    };
    CheckResult {
        id,
        name: name.to_string(),
        passed,
        detail,
        seconds: start.elapsed().as_secs_f64(),
    }
}

fn err<E: fmt::Display>(e: E) -> String {
    e.to_string()
}

fn v(x1: i64, x2: i64) -> LatticeVector {
    LatticeVector::new(x1, x2)
}

/// Multiset distance: greedy nearest matching, returning the worst pair
/// distance, or `None` when the sizes differ.
pub fn multiset_distance(a: &[Complex64], b: &[Complex64]) -> Option<f64> {
    if a.len() != b.len() {
        return None;
    }
    let mut pool: Vec<Complex64> = b.to_vec();
    let mut worst = 0.0_f64;
    for z in a {
        let (i, d) = pool
            .iter()
            .enumerate()
            .map(|(i, w)| (i, (w - z).norm()))
            .min_by(|x, y| x.1.total_cmp(&y.1))?;
        worst = worst.max(d);
        pool.swap_remove(i);
    }
    Some(worst)
}

pub fn criterion_1() -> CheckResult {
    timed(1, "ensemble p=(5,3), Zeitlin N=200", || {
        let config = EnsembleConfig {
            p: v(5, 3),
            gamma: 0.5,
            domain: Domain::new(200).map_err(err)?,
            kind: TruncationKind::Zeitlin,
            options: AnalysisOptions::default(),
            fast: true,
        };
        let r = run_ensemble(&config).map_err(err)?.report;
        let t = r.totals;
        let c = r.census;
        let ok = c.interior_points == 100 && t.nonimaginary == 200 && t.real == 56 && t.complex == 144 && c.lens_points == 24;
        Ok((
            ok,
            format!(
                "interior={} nonimaginary={} real={} complex={} lens={}",
                c.interior_points, t.nonimaginary, t.real, t.complex, c.lens_points
            ),
        ))
    })
}

/// The quadruplet member with positive real and imaginary parts for
/// `p = (1,1)`, `a = (0,1)`, `Γ = 1`, Zeitlin.
pub fn quadruplet_p11(n: i64) -> Result<Complex64, String> {
    let d = Domain::new(n).map_err(err)?;
    let c = enumerate_class(v(0, 1), v(1, 1), d, TruncationKind::Zeitlin).map_err(err)?;
    let s = analyze_class(&c, 1.0, &AnalysisOptions::default()).map_err(err)?;
    if s.classification.quadruplets != 1 {
        return Err(format!("expected one quadruplet, got {:?}", s.classification));
    }
    s.eigenvalues
        .iter()
        .zip(&s.labels)
        .find(|(z, &l)| l == EigenLabel::Complex && z.re > 0.0 && z.im > 0.0)
        .map(|(z, _)| *z)
        .ok_or_else(|| "no quadruplet member in the first quadrant".to_string())
}

pub fn criterion_2() -> CheckResult {
    timed(2, "p=(1,1) quadruplet at Zeitlin N=201", || {
        let target = Complex64::new(0.24822, 0.35172);
        let coarse = quadruplet_p11(101)?;
        let fine = quadruplet_p11(201)?;
        let gap = (fine - target).norm();
        let ok = gap <= 2e-3 && (fine - target).norm() < (coarse - target).norm();
        Ok((
            ok,
            format!(
                "N=101 {:.6}{:+.6}i, N=201 {:.6}{:+.6}i, |Δ|={:.2e}, |λ(201)-λ(101)|={:.2e}",
                coarse.re,
                coarse.im,
                fine.re,
                fine.im,
                gap,
                (fine - coarse).norm()
            ),
        ))
    })
}

pub fn criterion_3() -> CheckResult {
    timed(3, "lower bound certificate p=(3,1), a=(1,-2)", || {
        let p = v(3, 1);
        let a = v(1, -2);
        let mut ok = true;
        let mut notes = Vec::new();
        for (kind, n) in [
            (TruncationKind::Zeitlin, 19),
            (TruncationKind::Zeitlin, 39),
            (TruncationKind::Zeitlin, 79),
            (TruncationKind::Galerkin, 20),
            (TruncationKind::Galerkin, 40),
            (TruncationKind::Galerkin, 80),
        ] {
            let c = enumerate_class(a, p, Domain::new(n).map_err(err)?, kind).map_err(err)?;
            let s = analyze_class(&c, 0.5, &AnalysisOptions::default()).map_err(err)?;
            let Some(cert) = s.certificates else {
                ok = false;
                notes.push(format!("{kind} N={n}: no certificate"));
                continue;
            };
            let dense = s.largest_real_unscaled().unwrap_or(f64::NAN);
            let dagger = cert.lambda_dagger_unscaled;
            let agree = (dense - cert.bracketed_root_unscaled).abs();
            let this = (dagger - 0.028988).abs() <= 1e-6 && dense > dagger && agree <= 1e-8;
            ok &= this;
            notes.push(format!("{kind} N={n}: λ={dense:.7} λ†={dagger:.8} |Δ|={agree:.1e}"));
        }
        Ok((ok, notes.join("; ")))
    })
}

/// `max |Re λ| / ‖αA‖_F` for a class matrix with coefficients `rho`.
pub fn stable_disc_ratio(rho: &[f64], alpha: f64, cyclic: bool) -> Result<f64, String> {
    let m = tridiagonal_matrix(rho, cyclic);
    let scaled = Mat::from_fn(m.nrows(), m.ncols(), |i, j| alpha * m[(i, j)]);
    let norm = scaled.norm_l2();
    let ev = eigenvalues(&scaled).map_err(err)?;
    let re = ev.iter().map(|z| z.re.abs()).fold(0.0, f64::max);
    Ok(re / norm)
}

pub const STABLE_DISC_TOL: f64 = 1e-9;

/// Random classes with every `ρ_k > 0` and `α ≠ 0`.
pub fn stable_classes(samples: usize, seed: u64) -> Result<Vec<(Vec<f64>, f64, bool, String)>, String> {
    let mut rng = StdRng::seed_from_u64(seed);
    let ps = [v(3, 1), v(5, 3), v(4, 1)];
    let mut out = Vec::with_capacity(samples);
    while out.len() < samples {
        let p = ps[rng.gen_range(0..ps.len())];
        let kind = TruncationKind::ALL[rng.gen_range(0..2)];
        let n = match kind {
            TruncationKind::Zeitlin => admissible_n(p, min_n_tilde(p) + rng.gen_range(0..30)).map_err(err)?,
            TruncationKind::Galerkin => rng.gen_range(10..=60),
        };
        let d = Domain::new(n).map_err(err)?;
        let a = v(rng.gen_range(-n..=n), rng.gen_range(-n..=n));
        let c = enumerate_class(a, p, d, kind).map_err(err)?;
        if c.contains_origin() || c.size() < 2 {
            continue;
        }
        let rho = c.rho().map_err(err)?;
        let alpha = lattice::alpha(c.leader, p, 0.5, d, kind);
        if alpha == 0.0 || rho.iter().any(|&r| r <= 0.0) {
            continue;
        }
        out.push((rho, alpha, c.is_cyclic(), format!("{kind} p={p} N={n} a={}", c.leader)));
    }
    Ok(out)
}

pub fn criterion_4_with(samples: usize, seed: u64) -> CheckResult {
    timed(4, "stable disc property", || {
        let mut worst = (0.0_f64, String::new());
        for (rho, alpha, cyclic, label) in stable_classes(samples, seed)? {
            let r = stable_disc_ratio(&rho, alpha, cyclic)?;
            if r > worst.0 || worst.1.is_empty() {
                worst = (r, label);
            }
        }
        Ok((
            worst.0 <= STABLE_DISC_TOL,
            format!("{samples} classes, max |Re λ|/‖αA‖ = {:.2e} at {}", worst.0, worst.1),
        ))
    })
}

pub fn criterion_4() -> CheckResult {
    criterion_4_with(200, 4)
}

/// Worst distance between the full Jacobian spectrum and the union of class
/// spectra.
pub fn block_diagonal_gap(p: LatticeVector, n: i64, kind: TruncationKind, gamma: f64) -> Result<f64, String> {
    let d = Domain::new(n).map_err(err)?;
    let jac = full_jacobian(p, gamma, d, kind).map_err(err)?;
    let full = eigenvalues(&jac.matrix).map_err(err)?;
    let mut union = Vec::with_capacity(full.len());
    for c in enumerate_classes(p, d, kind).map_err(err)? {
        // the origin is not a Jacobian mode
        if c.contains_origin() {
            union.extend(std::iter::repeat_n(Complex64::new(0.0, 0.0), c.size() - 1));
            continue;
        }
        if lattice::alpha(c.leader, p, gamma, d, kind) == 0.0 {
            union.extend(std::iter::repeat_n(Complex64::new(0.0, 0.0), c.size()));
            continue;
        }
        let cm = class_matrix(&c, gamma).map_err(err)?;
        union.extend(eigenvalues(&cm.scaled()).map_err(err)?);
    }
    multiset_distance(&full, &union).ok_or_else(|| format!("size mismatch {} vs {}", full.len(), union.len()))
}

pub fn criterion_5() -> CheckResult {
    timed(5, "block diagonalisation", || {
        let mut worst = 0.0_f64;
        for p in [v(1, 0), v(1, 1), v(2, 1)] {
            for kind in TruncationKind::ALL {
                for n in 1..=4 {
                    if p.x1.abs().max(p.x2.abs()) > n {
                        continue;
                    }
                    worst = worst.max(block_diagonal_gap(p, n, kind, 0.5)?);
                }
            }
        }
        Ok((worst <= 1e-9, format!("max multiset distance {worst:.2e}")))
    })
}

/// Determinant of `xI - T` computed by dense LU.
fn lu_char(a: &[f64], cyclic: bool, x: f64) -> f64 {
    let t = tridiagonal_matrix(a, cyclic);
    let n = a.len();
    Mat::from_fn(n, n, |i, j| if i == j { x } else { 0.0 } - t[(i, j)]).determinant()
}

fn rel_err(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(1e-300)
}

pub fn criterion_6() -> CheckResult {
    timed(6, "recurrence oracles", || {
        let mut rng = StdRng::seed_from_u64(6);
        let mut worst_det = 0.0_f64;
        let mut worst_fd = 0.0_f64;
        for _ in 0..100 {
            let n = rng.gen_range(2..=9);
            let a: Vec<f64> = (0..n).map(|_| rng.gen_range(-2.0..2.0)).collect();
            let seq = CoefficientSequence::new(a.clone(), false).map_err(err)?;
            let alpha = rng.gen_range(0..n);
            let beta = rng.gen_range(alpha..n);
            let x = rng.gen_range(-3.0..3.0);
            let got = charpoly::t_eval(&seq, alpha, beta, x).map_err(err)?;
            let want = lu_char(&a[alpha..=beta], false, x);
            if (got - want).abs() > 1e-13 {
                worst_det = worst_det.max(rel_err(got, want));
            }

            let odd = 2 * rng.gen_range(1..=4) + 1;
            let b: Vec<f64> = (0..odd).map(|_| rng.gen_range(-2.0..2.0)).collect();
            let cyc = CoefficientSequence::new(b.clone(), true).map_err(err)?;
            let got = charpoly::a_eval(&cyc, x).map_err(err)?;
            let want = lu_char(&b, true, x);
            if (got - want).abs() > 1e-13 {
                worst_det = worst_det.max(rel_err(got, want));
            }

            let h = 1e-5;
            let t0 = charpoly::t_eval(&seq, alpha, beta, 0.0).map_err(err)?;
            worst_fd = worst_fd.max((t0 - charpoly::t_at_zero(&seq, alpha, beta).map_err(err)?).abs());
            let fd = (charpoly::t_eval(&seq, alpha, beta, h).map_err(err)? - charpoly::t_eval(&seq, alpha, beta, -h).map_err(err)?) / (2.0 * h);
            worst_fd = worst_fd.max((fd - charpoly::dt_at_zero(&seq, alpha, beta).map_err(err)?).abs());
        }
        Ok((
            worst_det <= 1e-10 && worst_fd <= 1e-8,
            format!("det rel err {worst_det:.1e}, closed-form err {worst_fd:.1e}"),
        ))
    })
}

pub fn criterion_7() -> CheckResult {
    timed(7, "circulant spectrum and density p=(3,1), a=(1,-2), N=1000", || {
        let mut circ = 0.0_f64;
        for n in (3..=101).step_by(2) {
            let p = v(3, 1);
            let dense = eigenvalues(&tridiagonal_matrix(&vec![1.0 / p.norm_sq() as f64; n], true)).map_err(err)?;
            let exact = density::circulant_spectrum(n, p).map_err(err)?;
            circ = circ.max(multiset_distance(&dense, &exact).ok_or("size mismatch")?);
        }
        let (p, a, gamma) = (v(3, 1), v(1, -2), 0.5);
        let c = enumerate_class(a, p, Domain::new(1000).map_err(err)?, TruncationKind::Zeitlin).map_err(err)?;
        let s = analyze_class(&c, gamma, &AnalysisOptions::default()).map_err(err)?;
        let (h, model): (_, DensityModel) = density::empirical_density(&s, 40).map_err(err)?;
        let dev = h.sup_deviation(&model).map_err(err)?;
        let f0 = model.density(0.0).map_err(err)?;
        let support = s.max_abs_im();
        let gap = (support - model.edge()).abs() / model.edge();
        Ok((
            circ <= 1e-10 && dev <= 0.15 * f0 && gap <= 0.01,
            format!(
                "circulant err {circ:.1e}; sup dev {dev:.4} (limit {:.4}); max|Im| {support:.6} vs |β| {:.6}",
                0.15 * f0,
                model.edge()
            ),
        ))
    })
}

pub fn criterion_8() -> CheckResult {
    timed(8, "eigenvector decay p=(3,1), a=(1,-2), N=100", || {
        let mut ok = true;
        let mut notes = Vec::new();
        for kind in TruncationKind::ALL {
            let c = enumerate_class(v(1, -2), v(3, 1), Domain::new(100).map_err(err)?, kind).map_err(err)?;
            let cm = class_matrix(&c, 0.5).map_err(err)?;
            let s = analyze_class(&c, 0.5, &AnalysisOptions::default()).map_err(err)?;
            let lam = s.largest_real_unscaled().ok_or("no real eigenvalue")?;
            let d = spectra::eigenvector_decay(&cm, lam).map_err(err)?;
            ok &= d.hamiltonian_residual <= 1e-8 && d.tail_ratio_error <= 0.05;
            notes.push(format!(
                "{kind}: H residual {:.1e}, tail err {:.2e} (μ1={:.6})",
                d.hamiltonian_residual, d.tail_ratio_error, d.mu1
            ));
        }
        Ok((ok, notes.join("; ")))
    })
}

/// `p` equal to `(1,0)`, `(1,1)` or `(1,2)` up to sign changes and swaps.
pub fn is_exception(p: LatticeVector) -> bool {
    let (x, y) = (p.x1.abs(), p.x2.abs());
    matches!((x.min(y), x.max(y)), (0, 1) | (1, 1) | (1, 2))
}

pub fn criterion_9() -> CheckResult {
    timed(9, "exception audit |p| <= 12", || {
        let mut absent = 0;
        let mut mismatches = Vec::new();
        for x in -12i64..=12 {
            for y in -12i64..=12 {
                let p = v(x, y);
                if p.is_zero() || p.norm_sq() > 144 {
                    continue;
                }
                let none = find_case_i_leader(p).is_none();
                absent += none as usize;
                if none != is_exception(p) {
                    mismatches.push(p.to_string());
                }
            }
        }
        Ok((
            mismatches.is_empty() && absent == 16,
            format!("absent for {absent} vectors, mismatches {mismatches:?}"),
        ))
    })
}

pub fn run(level: Level) -> Vec<CheckResult> {
    match level {
        Level::Quick => vec![
            criterion_3(),
            criterion_4_with(50, 4),
            criterion_5(),
            criterion_6(),
            criterion_8(),
            criterion_9(),
        ],
        Level::Full => vec![
            criterion_1(),
            criterion_2(),
            criterion_3(),
            criterion_4(),
            criterion_5(),
            criterion_6(),
            criterion_7(),
            criterion_8(),
            criterion_9(),
        ],
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn multiset_distance_basics() {
        let a = [Complex64::new(1.0, 0.0), Complex64::new(0.0, 1.0)];
        let b = [Complex64::new(0.0, 1.0), Complex64::new(1.0, 1e-3)];
        assert!((multiset_distance(&a, &b).unwrap() - 1e-3).abs() < 1e-15);
        assert!(multiset_distance(&a, &b[..1]).is_none());
    }

    #[test]
    fn exception_predicate() {
        assert!(is_exception(v(0, -1)) && is_exception(v(-2, 1)) && is_exception(v(1, -1)));
        assert!(!is_exception(v(2, 2)) && !is_exception(v(3, 0)));
    }

    #[test]
    fn stable_fixture_passes_and_sign_flip_fails() {
        let (rho, alpha, cyclic, _) = stable_classes(1, 11).unwrap().remove(0);
        assert!(stable_disc_ratio(&rho, alpha, cyclic).unwrap() <= STABLE_DISC_TOL);
        // one ρ flipped: the class gains a disc mode
        let mut bad = rho.clone();
        let k = bad.len() / 2;
        bad[k] = -bad[k] - 0.5;
        assert!(stable_disc_ratio(&bad, alpha, cyclic).unwrap() > STABLE_DISC_TOL);
    }

    #[test]
    fn quick_checks_pass() {
        for r in [criterion_5(), criterion_6(), criterion_9()] {
            assert!(r.passed, "{r}");
        }
    }
}
