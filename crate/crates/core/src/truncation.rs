//! Truncated vorticity dynamics and their linearisation.
//!
//! States use the real-coefficient convention: one real number per mode of
//! `D`, with no conjugate constraint between `ω_k` and `ω_{-k}`. The mean
//! mode `ω_0` is held at zero.

use faer::Mat;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::lattice::{self, ClassDescriptor, Domain, LatticeError, LatticeVector, TruncationKind};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TruncationError {
    #[error(transparent)]
    Lattice(#[from] LatticeError),
    #[error("wave vector {p} must lie in D \\ {{0}} for N = {n}")]
    WaveVectorOutsideDomain { p: LatticeVector, n: i64 },
    #[error("state length {got} does not match domain size {want}")]
    StateLength { got: usize, want: usize },
}

/// Real Fourier coefficients on every mode of a domain.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModeState {
    domain: Domain,
    coefficients: Vec<f64>,
}

impl ModeState {
    pub fn zeros(domain: Domain) -> Self {
        Self {
            domain,
            coefficients: vec![0.0; domain.len()],
        }
    }

    /// Builds a state from `f(k)`; the value at the origin is discarded.
    pub fn from_fn(domain: Domain, mut f: impl FnMut(LatticeVector) -> f64) -> Self {
        let mut s = Self::zeros(domain);
        for (i, k) in domain.points().enumerate() {
            if !k.is_zero() {
                s.coefficients[i] = f(k);
            }
        }
        s
    }

    /// Coefficients in lexicographic order of `D`; the origin entry is zeroed.
    pub fn from_vec(domain: Domain, mut coefficients: Vec<f64>) -> Result<Self, TruncationError> {
        if coefficients.len() != domain.len() {
            return Err(TruncationError::StateLength {
                got: coefficients.len(),
                want: domain.len(),
            });
        }
        coefficients[domain.index_of(LatticeVector::ZERO)] = 0.0;
        Ok(Self {
            domain,
            coefficients,
        })
    }

    pub fn domain(&self) -> Domain {
        self.domain
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.coefficients
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.coefficients
    }

    /// `ω_k`, or 0 outside `D`.
    pub fn get(&self, k: LatticeVector) -> f64 {
        if self.domain.contains(k) {
            self.coefficients[self.domain.index_of(k)]
        } else {
            0.0
        }
    }

    /// Sets `ω_k`; writes to the origin are ignored.
    pub fn set(&mut self, k: LatticeVector, value: f64) {
        if !k.is_zero() {
            let i = self.domain.index_of(k);
            self.coefficients[i] = value;
        }
    }

    pub fn scaled(&self, c: f64) -> Self {
        Self {
            domain: self.domain,
            coefficients: self.coefficients.iter().map(|x| c * x).collect(),
        }
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.coefficients
            .iter()
            .zip(&other.coefficients)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

/// The steady state `2Γ cos(p·x)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Equilibrium {
    pub p: LatticeVector,
    pub gamma: f64,
}

impl Equilibrium {
    /// `ω_{±p} = Γ`, all else 0.
    pub fn state(&self, domain: Domain) -> Result<ModeState, TruncationError> {
        check_wave_vector(self.p, domain)?;
        let mut s = ModeState::zeros(domain);
        s.set(self.p, self.gamma);
        s.set(-self.p, self.gamma);
        Ok(s)
    }
}

fn check_wave_vector(p: LatticeVector, domain: Domain) -> Result<(), TruncationError> {
    if p.is_zero() || !domain.contains(p) {
        return Err(TruncationError::WaveVectorOutsideDomain { p, n: domain.n() });
    }
    Ok(())
}

/// `sin(ε c)/ε` with `c` reduced mod `2N+1`.
fn sine_weight(c: i64, domain: Domain) -> f64 {
    let r = c.rem_euclid(domain.side());
    if r == 0 {
        return 0.0;
    }
    let eps = domain.epsilon();
    (eps * r as f64).sin() / eps
}

/// Time derivative of the truncated Euler system.
///
/// Galerkin: `ω̇_k = Σ_{l ≠ 0} (k×l)/|l|² ω_{-l} ω_{k+l}` with modes outside
/// `D` treated as zero. Zeitlin: `(k×l)` becomes `sin(ε k×l)/ε` and `k + l`
/// is wrapped.
pub fn vector_field(state: &ModeState, kind: TruncationKind) -> ModeState {
    let domain = state.domain;
    let mut out = ModeState::zeros(domain);
    for (i, k) in domain.points().enumerate() {
        if k.is_zero() {
            continue;
        }
        let mut acc = 0.0;
        for (j, l) in domain.points().enumerate() {
            if l.is_zero() {
                continue;
            }
            let w_neg_l = state.coefficients[domain.len() - 1 - j];
            if w_neg_l == 0.0 {
                continue;
            }
            let (weight, w_kl) = match kind {
                TruncationKind::Galerkin => {
                    let m = k + l;
                    if !domain.contains(m) {
                        continue;
                    }
                    (k.cross(l) as f64, state.coefficients[domain.index_of(m)])
                }
                TruncationKind::Zeitlin => {
                    let m = lattice::wrap(k + l, domain);
                    (
                        sine_weight(k.cross(l), domain),
                        state.coefficients[domain.index_of(m)],
                    )
                }
            };
            acc += weight / l.norm_sq() as f64 * w_neg_l * w_kl;
        }
        out.coefficients[i] = acc;
    }
    out
}

/// `H = ½ Σ_{k ∈ D \ 0} ω_k ω_{-k} / |k|²`.
pub fn hamiltonian(state: &ModeState) -> f64 {
    let domain = state.domain;
    let n = domain.len();
    0.5 * domain
        .points()
        .enumerate()
        .filter(|(_, k)| !k.is_zero())
        .map(|(i, k)| state.coefficients[i] * state.coefficients[n - 1 - i] / k.norm_sq() as f64)
        .sum::<f64>()
}

/// One classical fourth-order Runge–Kutta step of `y' = f(y)`.
pub fn rk4_step(f: &impl Fn(&[f64]) -> Vec<f64>, y: &[f64], dt: f64) -> Vec<f64> {
    let axpy = |a: &[f64], s: f64, b: &[f64]| -> Vec<f64> {
        a.iter().zip(b).map(|(x, d)| x + s * d).collect()
    };
    let k1 = f(y);
    let k2 = f(&axpy(y, 0.5 * dt, &k1));
    let k3 = f(&axpy(y, 0.5 * dt, &k2));
    let k4 = f(&axpy(y, dt, &k3));
    y.iter()
        .enumerate()
        .map(|(i, x)| x + dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]))
        .collect()
}

/// Integrates the nonlinear truncated system.
pub fn integrate_rk4(state: &ModeState, kind: TruncationKind, dt: f64, steps: usize) -> ModeState {
    let domain = state.domain;
    let f = |y: &[f64]| {
        let s = ModeState {
            domain,
            coefficients: y.to_vec(),
        };
        vector_field(&s, kind).coefficients
    };
    let mut y = state.coefficients.clone();
    for _ in 0..steps {
        y = rk4_step(&f, &y, dt);
    }
    ModeState {
        domain,
        coefficients: y,
    }
}

/// Integrates `y' = M y` for a dense matrix `M`.
pub fn integrate_linear_rk4(matrix: &Mat<f64>, y0: &[f64], dt: f64, steps: usize) -> Vec<f64> {
    assert_eq!(matrix.ncols(), y0.len());
    let f = |y: &[f64]| -> Vec<f64> {
        (0..matrix.nrows())
            .map(|i| (0..matrix.ncols()).map(|j| matrix[(i, j)] * y[j]).sum())
            .collect()
    };
    let mut y = y0.to_vec();
    for _ in 0..steps {
        y = rk4_step(&f, &y, dt);
    }
    y
}

/// Dense Jacobian of the truncated field at the equilibrium.
#[derive(Clone, Debug)]
pub struct FullJacobian {
    /// Basis: `D \ {0}` in lexicographic order.
    pub modes: Vec<LatticeVector>,
    pub matrix: Mat<f64>,
}

/// Linearisation about `ω_{±p} = Γ` in the basis `D \ {0}`.
///
/// Row `k` couples only to `k ± p` (wrapped for Zeitlin) with coefficients
/// `± w(k) ρ(k ± p)`, where `w = Γ k×p` (Galerkin) or `Γ sin(ε k×p)/ε`
/// (Zeitlin). Couplings to modes outside `D` or to the origin are dropped.
pub fn full_jacobian(
    p: LatticeVector,
    gamma: f64,
    domain: Domain,
    kind: TruncationKind,
) -> Result<FullJacobian, TruncationError> {
    check_wave_vector(p, domain)?;
    let modes: Vec<LatticeVector> = domain.points().filter(|k| !k.is_zero()).collect();
    let dim = modes.len();
    let origin = domain.index_of(LatticeVector::ZERO);
    let basis_index = |m: LatticeVector| {
        let i = domain.index_of(m);
        if i > origin {
            i - 1
        } else {
            i
        }
    };
    let mut matrix = Mat::<f64>::zeros(dim, dim);
    for (row, &k) in modes.iter().enumerate() {
        let w = lattice::alpha(k, p, gamma, domain, kind);
        if w == 0.0 {
            continue;
        }
        for (sign, step) in [(1.0, p), (-1.0, -p)] {
            let m = match kind {
                TruncationKind::Galerkin => {
                    let m = k + step;
                    if !domain.contains(m) {
                        continue;
                    }
                    m
                }
                TruncationKind::Zeitlin => lattice::wrap(k + step, domain),
            };
            if m.is_zero() {
                continue;
            }
            let r = lattice::rho_of_mode(m, p)?;
            matrix[(row, basis_index(m))] += sign * w * r;
        }
    }
    Ok(FullJacobian { modes, matrix })
}

/// The class system `ω̇ = α A ω` with `A = J S`.
#[derive(Clone, Debug)]
pub struct ClassMatrix {
    pub descriptor: ClassDescriptor,
    pub rho: Vec<f64>,
    pub alpha: f64,
    /// `A` without the `α` factor.
    pub matrix: Mat<f64>,
    /// Skew part: `+1` above, `-1` below the diagonal, plus the Zeitlin corners.
    pub j: Mat<f64>,
    /// `diag(S) = ρ`.
    pub s: Vec<f64>,
}

impl ClassMatrix {
    pub fn size(&self) -> usize {
        self.rho.len()
    }

    /// `α A`.
    pub fn scaled(&self) -> Mat<f64> {
        let a = self.alpha;
        Mat::from_fn(self.size(), self.size(), |i, j| a * self.matrix[(i, j)])
    }

    /// Max absolute entry of `α A`, i.e. `‖αA‖_max`.
    pub fn scaled_norm_max(&self) -> f64 {
        self.alpha.abs() * self.rho.iter().fold(0.0_f64, |m, r| m.max(r.abs()))
    }

    /// Frobenius norm of `α A`.
    pub fn scaled_norm_fro(&self) -> f64 {
        let n = self.size();
        let mut acc = 0.0;
        for i in 0..n {
            for j in 0..n {
                acc += self.matrix[(i, j)].powi(2);
            }
        }
        self.alpha.abs() * acc.sqrt()
    }
}

/// `J` for a class of size `n`; cyclic adds the corners `(0, n-1) = -1`,
/// `(n-1, 0) = +1`.
pub fn skew_pattern(n: usize, cyclic: bool) -> Mat<f64> {
    let mut j = Mat::<f64>::zeros(n, n);
    for i in 0..n.saturating_sub(1) {
        j[(i, i + 1)] = 1.0;
        j[(i + 1, i)] = -1.0;
    }
    if cyclic && n >= 3 {
        j[(0, n - 1)] = -1.0;
        j[(n - 1, 0)] = 1.0;
    }
    j
}

/// `A = J diag(ρ)`: `A[i][i+1] = ρ_{i+1}`, `A[i][i-1] = -ρ_{i-1}`.
pub fn tridiagonal_matrix(rho: &[f64], cyclic: bool) -> Mat<f64> {
    let n = rho.len();
    let j = skew_pattern(n, cyclic);
    Mat::from_fn(n, n, |r, c| j[(r, c)] * rho[c])
}

/// Builds the class matrix. Classes through the origin are rejected since
/// `ρ` is undefined there; such classes always have `α = 0`.
pub fn class_matrix(descriptor: &ClassDescriptor, gamma: f64) -> Result<ClassMatrix, TruncationError> {
    let rho = descriptor.rho()?;
    let cyclic = descriptor.is_cyclic();
    let n = rho.len();
    let alpha = lattice::alpha(
        descriptor.leader,
        descriptor.p,
        gamma,
        descriptor.domain,
        descriptor.kind,
    );
    let j = skew_pattern(n, cyclic);
    let matrix = Mat::from_fn(n, n, |r, c| j[(r, c)] * rho[c]);
    Ok(ClassMatrix {
        descriptor: descriptor.clone(),
        s: rho.clone(),
        rho,
        alpha,
        matrix,
        j,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};

    fn v(x1: i64, x2: i64) -> LatticeVector {
        LatticeVector::new(x1, x2)
    }

    fn random_state(domain: Domain, seed: u64) -> ModeState {
        let mut rng = rand::rngs::StdRng::seed_from_u64(seed);
        ModeState::from_fn(domain, |_| rng.gen_range(-1.0..1.0))
    }

    /// Direct transcription of the Galerkin sum over all `l ∈ D`.
    fn galerkin_oracle(state: &ModeState, k: LatticeVector) -> f64 {
        let n = state.domain().n();
        let mut acc = 0.0;
        for l1 in -n..=n {
            for l2 in -n..=n {
                let l = v(l1, l2);
                if l.is_zero() {
                    continue;
                }
                acc += k.cross(l) as f64 / l.norm_sq() as f64 * state.get(-l) * state.get(k + l);
            }
        }
        acc
    }

    #[test]
    fn equilibrium_is_fixed() {
        for n in 2..=6 {
            let d = Domain::new(n).unwrap();
            for p in [v(1, 0), v(1, 1), v(2, 1), v(-1, 2), v(n, n - 1)] {
                let eq = Equilibrium { p, gamma: 0.7 }.state(d).unwrap();
                for kind in TruncationKind::ALL {
                    let f = vector_field(&eq, kind);
                    assert!(f.as_slice().iter().all(|&x| x == 0.0), "{p} {kind} N={n}");
                }
            }
        }
    }

    #[test]
    fn single_mode_is_steady() {
        let d = Domain::new(3).unwrap();
        let mut s = ModeState::zeros(d);
        s.set(v(2, -1), 1.5);
        for kind in TruncationKind::ALL {
            assert!(vector_field(&s, kind).as_slice().iter().all(|&x| x == 0.0));
        }
    }

    #[test]
    fn two_mode_galerkin_against_direct_sum() {
        let d = Domain::new(2).unwrap();
        let mut s = ModeState::zeros(d);
        s.set(v(1, 0), 1.0);
        s.set(v(0, 1), 1.0);
        let f = vector_field(&s, TruncationKind::Galerkin);
        assert_eq!(f.get(v(1, 1)), 0.0);
        for k in d.points() {
            assert!((f.get(k) - galerkin_oracle(&s, k)).abs() < 1e-14);
        }
        // l = (0,-1) and l = (-1,0) each contribute -1
        assert_eq!(f.get(v(1, -1)), 0.0);
        let random = random_state(d, 11);
        let f = vector_field(&random, TruncationKind::Galerkin);
        for k in d.points() {
            assert!((f.get(k) - galerkin_oracle(&random, k)).abs() < 1e-12);
        }
    }

    #[test]
    fn hamiltonian_examples() {
        let d = Domain::new(4).unwrap();
        assert_eq!(hamiltonian(&ModeState::zeros(d)), 0.0);
        let p = v(2, 1);
        let eq = Equilibrium { p, gamma: 0.3 }.state(d).unwrap();
        assert!((hamiltonian(&eq) - 0.09 / 5.0).abs() < 1e-16);
        let s = random_state(d, 3);
        let h = hamiltonian(&s);
        assert!((hamiltonian(&s.scaled(-2.5)) - 6.25 * h).abs() < 1e-12 * h.abs().max(1.0));
    }

    #[test]
    fn rk4_conserves_hamiltonian_zeitlin() {
        let d = Domain::new(3).unwrap();
        for seed in 0..5 {
            let s = random_state(d, seed);
            let h0 = hamiltonian(&s);
            let end = integrate_rk4(&s, TruncationKind::Zeitlin, 1e-3, 100);
            let h1 = hamiltonian(&end);
            assert!((h1 - h0).abs() <= 1e-8 * h0.abs().max(1.0), "{h0} {h1}");
        }
    }

    #[test]
    fn rk4_keeps_equilibrium() {
        let d = Domain::new(3).unwrap();
        let eq = Equilibrium { p: v(1, 1), gamma: 1.0 }.state(d).unwrap();
        for kind in TruncationKind::ALL {
            let end = integrate_rk4(&eq, kind, 0.1, 10);
            assert!(end.max_abs_diff(&eq) < 1e-14);
        }
    }

    #[test]
    fn linear_flow_is_linear() {
        let d = Domain::new(2).unwrap();
        let jac = full_jacobian(v(1, 1), 0.8, d, TruncationKind::Zeitlin).unwrap();
        let mut rng = rand::rngs::StdRng::seed_from_u64(5);
        let y: Vec<f64> = (0..jac.modes.len()).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let y2: Vec<f64> = y.iter().map(|x| 2.0 * x).collect();
        let a = integrate_linear_rk4(&jac.matrix, &y, 1e-2, 50);
        let b = integrate_linear_rk4(&jac.matrix, &y2, 1e-2, 50);
        for (x, z) in a.iter().zip(&b) {
            assert!((2.0 * x - z).abs() < 1e-13);
        }
    }

    /// Central differences of the quadratic field are exact up to roundoff.
    #[test]
    fn full_jacobian_matches_finite_differences() {
        for kind in TruncationKind::ALL {
            for (n, p) in [(2, v(1, 0)), (3, v(1, 1)), (3, v(2, 1)), (4, v(-1, 3))] {
                let d = Domain::new(n).unwrap();
                let gamma = 0.9;
                let eq = Equilibrium { p, gamma }.state(d).unwrap();
                let jac = full_jacobian(p, gamma, d, kind).unwrap();
                let h = 1e-3;
                for (col, &m) in jac.modes.iter().enumerate() {
                    let mut plus = eq.clone();
                    plus.set(m, eq.get(m) + h);
                    let mut minus = eq.clone();
                    minus.set(m, eq.get(m) - h);
                    let fp = vector_field(&plus, kind);
                    let fm = vector_field(&minus, kind);
                    for (row, &k) in jac.modes.iter().enumerate() {
                        let fd = (fp.get(k) - fm.get(k)) / (2.0 * h);
                        assert!(
                            (fd - jac.matrix[(row, col)]).abs() < 1e-9,
                            "{kind} N={n} p={p} row {k} col {m}: {fd} vs {}",
                            jac.matrix[(row, col)]
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn full_jacobian_structure() {
        for kind in TruncationKind::ALL {
            let d = Domain::new(3).unwrap();
            let jac = full_jacobian(v(1, 1), 1.0, d, kind).unwrap();
            let dim = jac.modes.len();
            let mut trace = 0.0;
            for i in 0..dim {
                trace += jac.matrix[(i, i)];
                let nnz = (0..dim).filter(|&j| jac.matrix[(i, j)] != 0.0).count();
                assert!(nnz <= 2);
            }
            assert_eq!(trace, 0.0);
        }
        assert!(full_jacobian(v(5, 0), 1.0, Domain::new(3).unwrap(), TruncationKind::Galerkin).is_err());
    }

    #[test]
    fn zeitlin_n3_matrix() {
        let rho = [0.3, -0.2, 0.7];
        let a = tridiagonal_matrix(&rho, true);
        let want = [[0.0, -0.2, -0.7], [-0.3, 0.0, 0.7], [0.3, 0.2, 0.0]];
        for i in 0..3 {
            for j in 0..3 {
                assert_eq!(a[(i, j)], want[i][j]);
            }
        }
    }

    #[test]
    fn class_matrix_rows_follow_recurrence() {
        let mut rng = rand::rngs::StdRng::seed_from_u64(17);
        let mut tested = 0;
        while tested < 100 {
            let n = rng.gen_range(3..12);
            let d = Domain::new(n).unwrap();
            let p = v(rng.gen_range(-3..=3), rng.gen_range(-3..=3));
            if p.is_zero() {
                continue;
            }
            let a = v(rng.gen_range(-n..=n), rng.gen_range(-n..=n));
            let kind = if tested % 2 == 0 { TruncationKind::Zeitlin } else { TruncationKind::Galerkin };
            let desc = lattice::enumerate_class(a, p, d, kind).unwrap();
            if desc.contains_origin() {
                continue;
            }
            let cm = class_matrix(&desc, 1.0).unwrap();
            let size = cm.size();
            for col in 0..size {
                for row in 0..size {
                    // ω̇_row = ρ_{row+1} ω_{row+1} - ρ_{row-1} ω_{row-1}
                    let mut want = 0.0;
                    let next = if kind == TruncationKind::Zeitlin { (row + 1) % size } else { row + 1 };
                    let prev = if kind == TruncationKind::Zeitlin { (row + size - 1) % size } else { row.wrapping_sub(1) };
                    if next == col && next < size {
                        want += cm.rho[col];
                    }
                    if prev == col && prev < size {
                        want -= cm.rho[col];
                    }
                    assert_eq!(cm.matrix[(row, col)], want, "{desc:?}");
                }
            }
            // A = J S, J skew
            for r in 0..size {
                for c in 0..size {
                    assert_eq!(cm.matrix[(r, c)], cm.j[(r, c)] * cm.s[c]);
                    assert_eq!(cm.j[(r, c)], -cm.j[(c, r)]);
                }
                assert_eq!(cm.matrix[(r, r)], 0.0);
            }
            tested += 1;
        }
    }

    #[test]
    fn class_through_origin_rejected() {
        let d = Domain::new(3).unwrap();
        let desc = lattice::enumerate_class(v(1, 0), v(1, 0), d, TruncationKind::Galerkin).unwrap();
        assert!(class_matrix(&desc, 1.0).is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn zeitlin_state_hamiltonian_stationary(seed in 0u64..10_000, n in 1i64..4) {
            // dH/dt = ∇H · f = 0 for any state
            let d = Domain::new(n).unwrap();
            let s = random_state(d, seed);
            let f = vector_field(&s, TruncationKind::Zeitlin);
            let len = d.len();
            let dh: f64 = d.points().enumerate().filter(|(_, k)| !k.is_zero())
                .map(|(i, k)| s.as_slice()[len - 1 - i] / k.norm_sq() as f64 * f.as_slice()[i])
                .sum();
            prop_assert!(dh.abs() < 1e-12);
        }
    }
}
