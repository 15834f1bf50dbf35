//! Integer-lattice geometry of the truncated mode set.
//!
//! Fourier modes live on `D = [-N, N]² ∩ Z²`. The Zeitlin truncation treats
//! `D` as a discrete torus of side `2N + 1`; [`wrap`] maps any integer vector
//! back into `D`. A class is the orbit of a leader `a` under repeated
//! translation by `p`, cut off at the boundary of `D` (Galerkin) or closed by
//! wrapping (Zeitlin).

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num_integer::Integer;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Largest supported grid parameter. Keeps `(2N+1)²` and all cross products
/// well inside `i64`.
pub const MAX_GRID: i64 = 100_000;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LatticeError {
    #[error("wave vector p must be nonzero")]
    ZeroWaveVector,
    #[error("grid size N = {0} outside 1..={MAX_GRID}")]
    InvalidGrid(i64),
    #[error("mode {mode} lies outside the domain [-{n}, {n}]²")]
    OutsideDomain { mode: LatticeVector, n: i64 },
    #[error("degenerate class: mode (0, 0) has no ρ coefficient")]
    DegenerateMode,
    #[error("no admissible N exists for even gcd (κ = {0})")]
    EvenGcd(i64),
    #[error("ñ = {n_tilde} too small: need ñ > (2|p|² - κ)/(2κ) = {bound}")]
    NTildeTooSmall { n_tilde: i64, bound: f64 },
}

/// An integer 2-vector indexing a Fourier mode.
#[derive(
    Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize,
)]
pub struct LatticeVector {
    pub x1: i64,
    pub x2: i64,
}

impl LatticeVector {
    pub const ZERO: LatticeVector = LatticeVector { x1: 0, x2: 0 };

    pub const fn new(x1: i64, x2: i64) -> Self {
        Self { x1, x2 }
    }

    /// Scalar cross product `u × v = u1 v2 - u2 v1`.
    pub fn cross(self, other: Self) -> i64 {
        self.x1 * other.x2 - self.x2 * other.x1
    }

    pub fn norm_sq(self) -> i64 {
        self.x1 * self.x1 + self.x2 * self.x2
    }

    pub fn norm(self) -> f64 {
        (self.norm_sq() as f64).sqrt()
    }

    pub fn is_zero(self) -> bool {
        self == Self::ZERO
    }

    /// `gcd(|x1|, |x2|)`, with `gcd(x, 0) = |x|`.
    pub fn gcd(self) -> i64 {
        self.x1.abs().gcd(&self.x2.abs())
    }
}

impl Add for LatticeVector {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        Self::new(self.x1 + rhs.x1, self.x2 + rhs.x2)
    }
}

impl Sub for LatticeVector {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        Self::new(self.x1 - rhs.x1, self.x2 - rhs.x2)
    }
}

impl Neg for LatticeVector {
    type Output = Self;
    fn neg(self) -> Self {
        Self::new(-self.x1, -self.x2)
    }
}

impl Mul<LatticeVector> for i64 {
    type Output = LatticeVector;
    fn mul(self, rhs: LatticeVector) -> LatticeVector {
        LatticeVector::new(self * rhs.x1, self * rhs.x2)
    }
}

impl fmt::Display for LatticeVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.x1, self.x2)
    }
}

impl FromStr for LatticeVector {
    type Err = String;

    /// Parses `"x,y"` (surrounding parentheses and spaces allowed).
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let trimmed = s.trim().trim_start_matches('(').trim_end_matches(')');
        let mut parts = trimmed.split(',');
        let (Some(a), Some(b), None) = (parts.next(), parts.next(), parts.next()) else {
            return Err(format!("expected two comma-separated integers, got {s:?}"));
        };
        let parse = |t: &str| {
            t.trim()
                .parse::<i64>()
                .map_err(|e| format!("invalid integer {t:?}: {e}"))
        };
        Ok(Self::new(parse(a)?, parse(b)?))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TruncationKind {
    Galerkin,
    Zeitlin,
}

impl TruncationKind {
    pub const ALL: [TruncationKind; 2] = [TruncationKind::Galerkin, TruncationKind::Zeitlin];
}

impl fmt::Display for TruncationKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TruncationKind::Galerkin => "galerkin",
            TruncationKind::Zeitlin => "zeitlin",
        })
    }
}

/// The truncated mode square `[-N, N]²`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Domain {
    n: i64,
}

impl Domain {
    pub fn new(n: i64) -> Result<Self, LatticeError> {
        if (1..=MAX_GRID).contains(&n) {
            Ok(Self { n })
        } else {
            Err(LatticeError::InvalidGrid(n))
        }
    }

    /// The grid parameter `N`.
    pub fn n(&self) -> i64 {
        self.n
    }

    /// Side length `2N + 1`.
    pub fn side(&self) -> i64 {
        2 * self.n + 1
    }

    /// Sine-bracket deformation parameter `ε = 2π / (2N + 1)`.
    pub fn epsilon(&self) -> f64 {
        std::f64::consts::TAU / self.side() as f64
    }

    pub fn len(&self) -> usize {
        (self.side() * self.side()) as usize
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn contains(&self, k: LatticeVector) -> bool {
        k.x1.abs() <= self.n && k.x2.abs() <= self.n
    }

    /// Row-major position of `k` in lexicographic order; `k` must be in `D`.
    pub fn index_of(&self, k: LatticeVector) -> usize {
        debug_assert!(self.contains(k));
        ((k.x1 + self.n) * self.side() + (k.x2 + self.n)) as usize
    }

    pub fn point_at(&self, index: usize) -> LatticeVector {
        let side = self.side();
        let i = index as i64;
        LatticeVector::new(i / side - self.n, i % side - self.n)
    }

    /// All points of `D` in lexicographic order `(x1, x2)`.
    pub fn points(&self) -> impl Iterator<Item = LatticeVector> + '_ {
        (0..self.len()).map(move |i| self.point_at(i))
    }
}

/// Maps `k` to the unique `k̂ ∈ D` with `k - k̂ ∈ (2N+1) Z²`.
pub fn wrap(k: LatticeVector, domain: Domain) -> LatticeVector {
    let n = domain.n();
    let side = domain.side();
    LatticeVector::new(
        (k.x1 + n).rem_euclid(side) - n,
        (k.x2 + n).rem_euclid(side) - n,
    )
}

/// Lattice points strictly inside the disc of radius `|p|`, including the
/// origin. Boundary points `|x| = |p|` are excluded.
pub fn unstable_disc(p: LatticeVector) -> Result<Vec<LatticeVector>, LatticeError> {
    if p.is_zero() {
        return Err(LatticeError::ZeroWaveVector);
    }
    let r2 = p.norm_sq();
    let r = (r2 as f64).sqrt().ceil() as i64;
    let mut out = Vec::new();
    for x1 in -r..=r {
        for x2 in -r..=r {
            let x = LatticeVector::new(x1, x2);
            if x.norm_sq() < r2 {
                out.push(x);
            }
        }
    }
    Ok(out)
}

/// `1/|p|² - 1/|m|²` for a nonzero mode `m`.
pub fn rho_of_mode(m: LatticeVector, p: LatticeVector) -> Result<f64, LatticeError> {
    if m.is_zero() {
        return Err(LatticeError::DegenerateMode);
    }
    Ok(1.0 / p.norm_sq() as f64 - 1.0 / m.norm_sq() as f64)
}

/// The mode at offset `k` from `a` along `p`, wrapped for Zeitlin.
pub fn class_mode(
    a: LatticeVector,
    k: i64,
    p: LatticeVector,
    domain: Domain,
    kind: TruncationKind,
) -> LatticeVector {
    let m = a + k * p;
    match kind {
        TruncationKind::Galerkin => m,
        TruncationKind::Zeitlin => wrap(m, domain),
    }
}

/// ρ coefficient attached to the class mode `a + k p` (wrapped for Zeitlin).
///
/// Negative exactly when the mode lies strictly inside the unstable disc.
pub fn rho(
    a: LatticeVector,
    k: i64,
    p: LatticeVector,
    domain: Domain,
    kind: TruncationKind,
) -> Result<f64, LatticeError> {
    rho_of_mode(class_mode(a, k, p, domain, kind), p)
}

/// One decoupled block of the linearisation.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClassDescriptor {
    pub leader: LatticeVector,
    pub p: LatticeVector,
    pub kind: TruncationKind,
    pub domain: Domain,
    /// Galerkin: `a - m1 p, …, a + m2 p`. Zeitlin: `hat(a + k p)` for `k = 0..n`.
    pub modes: Vec<LatticeVector>,
    /// Steps taken backwards from the leader (Galerkin only; 0 for Zeitlin).
    pub m1: usize,
    /// Steps taken forwards from the leader (Galerkin only; 0 for Zeitlin).
    pub m2: usize,
}

impl ClassDescriptor {
    pub fn size(&self) -> usize {
        self.modes.len()
    }

    /// Position of the leader within `modes`.
    pub fn leader_index(&self) -> usize {
        self.m1
    }

    pub fn is_cyclic(&self) -> bool {
        self.kind == TruncationKind::Zeitlin
    }

    pub fn contains_origin(&self) -> bool {
        self.modes.iter().any(|m| m.is_zero())
    }

    /// ρ for every mode in class order.
    pub fn rho(&self) -> Result<Vec<f64>, LatticeError> {
        self.modes.iter().map(|&m| rho_of_mode(m, self.p)).collect()
    }

    /// Indices of modes strictly inside the unstable disc, excluding the origin.
    pub fn disc_indices(&self) -> Vec<usize> {
        let r2 = self.p.norm_sq();
        self.modes
            .iter()
            .enumerate()
            .filter(|(_, m)| !m.is_zero() && m.norm_sq() < r2)
            .map(|(i, _)| i)
            .collect()
    }
}

/// Enumerates the class led by `a`.
pub fn enumerate_class(
    a: LatticeVector,
    p: LatticeVector,
    domain: Domain,
    kind: TruncationKind,
) -> Result<ClassDescriptor, LatticeError> {
    if p.is_zero() {
        return Err(LatticeError::ZeroWaveVector);
    }
    if !domain.contains(a) {
        return Err(LatticeError::OutsideDomain {
            mode: a,
            n: domain.n(),
        });
    }
    let (modes, m1, m2) = match kind {
        TruncationKind::Galerkin => {
            let mut back = Vec::new();
            let mut m = a - p;
            while domain.contains(m) {
                back.push(m);
                m = m - p;
            }
            let m1 = back.len();
            back.reverse();
            back.push(a);
            let mut m = a + p;
            while domain.contains(m) {
                back.push(m);
                m = m + p;
            }
            let m2 = back.len() - m1 - 1;
            (back, m1, m2)
        }
        TruncationKind::Zeitlin => {
            let n = zeitlin_class_size(p, domain);
            let modes = (0..n as i64)
                .map(|k| wrap(a + k * p, domain))
                .collect::<Vec<_>>();
            debug_assert_eq!(wrap(a + n as i64 * p, domain), a);
            (modes, 0, 0)
        }
    };
    Ok(ClassDescriptor {
        leader: a,
        p,
        kind,
        domain,
        modes,
        m1,
        m2,
    })
}

/// `(2N+1) / gcd(2N+1, κ)`: the common size of every Zeitlin class.
pub fn zeitlin_class_size(p: LatticeVector, domain: Domain) -> usize {
    let side = domain.side();
    (side / side.gcd(&p.gcd())) as usize
}

/// Upper bound `ceil((2N+1) / max(|p1|, |p2|))` on a Galerkin class size.
/// The floor form is exceeded by e.g. `p = (10, 0)`, `N = 18`, `a = (-2, 0)`.
pub fn galerkin_class_size_bound(p: LatticeVector, domain: Domain) -> usize {
    Integer::div_ceil(&domain.side(), &p.x1.abs().max(p.x2.abs())) as usize
}

/// Class prefactor: `Γ a×p` (Galerkin) or `Γ sin(ε a×p)/ε` (Zeitlin).
///
/// For Zeitlin the cross product is reduced mod `2N+1` before the sine, so the
/// value is identical for every member of a class and exactly zero for classes
/// through the origin.
pub fn alpha(
    a: LatticeVector,
    p: LatticeVector,
    gamma: f64,
    domain: Domain,
    kind: TruncationKind,
) -> f64 {
    let c = a.cross(p);
    if c == 0 {
        return 0.0;
    }
    match kind {
        TruncationKind::Galerkin => gamma * c as f64,
        TruncationKind::Zeitlin => {
            let side = domain.side();
            let r = c.rem_euclid(side);
            if r == 0 {
                return 0.0;
            }
            let eps = domain.epsilon();
            gamma * (eps * r as f64).sin() / eps
        }
    }
}

/// Leaders of a partition of `D` into classes: a lexicographic sweep records
/// the first unvisited mode as leader and marks its whole class visited.
pub fn canonical_leaders(
    p: LatticeVector,
    domain: Domain,
    kind: TruncationKind,
) -> Result<Vec<LatticeVector>, LatticeError> {
    Ok(enumerate_classes(p, domain, kind)?
        .into_iter()
        .map(|c| c.leader)
        .collect())
}

/// The classes led by [`canonical_leaders`], in sweep order.
pub fn enumerate_classes(
    p: LatticeVector,
    domain: Domain,
    kind: TruncationKind,
) -> Result<Vec<ClassDescriptor>, LatticeError> {
    if p.is_zero() {
        return Err(LatticeError::ZeroWaveVector);
    }
    let mut visited = vec![false; domain.len()];
    let mut classes = Vec::new();
    for idx in 0..domain.len() {
        if visited[idx] {
            continue;
        }
        let class = enumerate_class(domain.point_at(idx), p, domain, kind)?;
        for &m in &class.modes {
            visited[domain.index_of(m)] = true;
        }
        classes.push(class);
    }
    Ok(classes)
}

/// Grid size `N = ((2ñ+1)κ - 1)/2` for which no Zeitlin class meets the
/// unstable disc at two non-consecutive modes.
pub fn admissible_n(p: LatticeVector, n_tilde: i64) -> Result<i64, LatticeError> {
    if p.is_zero() {
        return Err(LatticeError::ZeroWaveVector);
    }
    let kappa = p.gcd();
    if kappa % 2 == 0 {
        return Err(LatticeError::EvenGcd(kappa));
    }
    // ñ > (2|p|² - κ)/(2κ)  ⇔  2κñ > 2|p|² - κ
    if n_tilde < 1 || 2 * kappa * n_tilde <= 2 * p.norm_sq() - kappa {
        return Err(LatticeError::NTildeTooSmall {
            n_tilde,
            bound: (2 * p.norm_sq() - kappa) as f64 / (2 * kappa) as f64,
        });
    }
    Ok(((2 * n_tilde + 1) * kappa - 1) / 2)
}

/// Whether `n` equals [`admissible_n`]`(p, ñ)` for some valid `ñ`.
pub fn is_admissible(p: LatticeVector, n: i64) -> bool {
    let k = p.gcd();
    if p.is_zero() || k % 2 == 0 || (2 * n + 1) % k != 0 {
        return false;
    }
    admissible_n(p, ((2 * n + 1) / k - 1) / 2).is_ok_and(|m| m == n)
}

/// Smallest `ñ` accepted by [`admissible_n`].
pub fn min_n_tilde(p: LatticeVector) -> i64 {
    let kappa = p.gcd().max(1);
    (2 * p.norm_sq() - kappa).div_euclid(2 * kappa) + 1
}

/// Counts of the unstable disc used by the ensemble report.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DiscCensus {
    /// `|D_p \ {0}|`.
    pub interior_points: usize,
    /// Interior points `a ≠ 0` whose neighbours `a ± p` are not inside the
    /// disc (boundary counts as outside).
    pub lens_points: usize,
}

/// Interior points `a ≠ 0` of the disc with `a ± p` outside or on its boundary.
pub fn lens_points(p: LatticeVector) -> Result<Vec<LatticeVector>, LatticeError> {
    let r2 = p.norm_sq();
    Ok(unstable_disc(p)?
        .into_iter()
        .filter(|a| !a.is_zero() && (*a + p).norm_sq() >= r2 && (*a - p).norm_sq() >= r2)
        .collect())
}

pub fn disc_census(p: LatticeVector) -> Result<DiscCensus, LatticeError> {
    Ok(DiscCensus {
        interior_points: unstable_disc(p)?.len() - 1,
        lens_points: lens_points(p)?.len(),
    })
}
