//! Characteristic polynomials of the class matrices by three-term recurrence.
//!
//! For coefficients `a_0 … a_{n-1}`, `T_α^β` is the tridiagonal block
//! `T[i][i+1] = a_{α+i+1}`, `T[i+1][i] = -a_{α+i}` on indices `α..=β`, and
//! `𝒯_α^β(x) = det(xI - T_α^β)`. Conventions: the empty block (`β = α - 1`)
//! is 1 and the `1×1` block is `x`. The cyclic matrix adds the corners
//! `(0, n-1) = -a_{n-1}`, `(n-1, 0) = +a_0`, with `𝒜(x) = det(xI - A')`.
//!
//! Values are carried as `mantissa · 2^exponent` so that signs and roots stay
//! available at class sizes where `f64` would overflow.

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CharpolyError {
    #[error("coefficient sequence needs at least 2 entries, got {0}")]
    TooShort(usize),
    #[error("cyclic coefficient sequence must have odd length, got {0}")]
    EvenCyclic(usize),
    #[error("index range {alpha}..={beta} invalid for length {n}")]
    BadRange { alpha: usize, beta: usize, n: usize },
    #[error("polynomial is not negative at the lower end {0}")]
    NotNegative(f64),
    #[error("no sign change found up to the Gershgorin bound {0}")]
    NoSignChange(f64),
    #[error("non-finite coefficient")]
    NonFinite,
}

/// The parameters `a_k` of a class, optionally cyclic.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoefficientSequence {
    pub a: Vec<f64>,
    pub cyclic: bool,
}

impl CoefficientSequence {
    pub fn new(a: Vec<f64>, cyclic: bool) -> Result<Self, CharpolyError> {
        if a.len() < 2 {
            return Err(CharpolyError::TooShort(a.len()));
        }
        if cyclic && a.len() % 2 == 0 {
            return Err(CharpolyError::EvenCyclic(a.len()));
        }
        if a.iter().any(|x| !x.is_finite()) {
            return Err(CharpolyError::NonFinite);
        }
        Ok(Self { a, cyclic })
    }

    pub fn len(&self) -> usize {
        self.a.len()
    }

    pub fn is_empty(&self) -> bool {
        self.a.is_empty()
    }

    /// `a` at a signed offset from `root`: wrapped if cyclic, `None` outside
    /// otherwise.
    pub fn at(&self, root: usize, offset: isize) -> Option<f64> {
        let n = self.len() as isize;
        let i = root as isize + offset;
        if self.cyclic {
            Some(self.a[i.rem_euclid(n) as usize])
        } else if (0..n).contains(&i) {
            Some(self.a[i as usize])
        } else {
            None
        }
    }

    /// Cyclic rotation placing `root` at index 0; identity for non-cyclic.
    pub fn rerooted(&self, root: usize) -> Self {
        if !self.cyclic {
            return self.clone();
        }
        let mut a = self.a.clone();
        a.rotate_left(root % self.len());
        Self { a, cyclic: true }
    }

    /// `max_k (|a_{k-1}| + |a_{k+1}|)`: bounds every eigenvalue modulus.
    pub fn gershgorin_bound(&self) -> f64 {
        (0..self.len())
            .map(|k| {
                self.at(k, -1).map_or(0.0, f64::abs) + self.at(k, 1).map_or(0.0, f64::abs)
            })
            .fold(0.0, f64::max)
    }
}

/// `mantissa · 2^exponent`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScaledValue {
    pub mantissa: f64,
    pub exponent: i64,
}

const RESCALE_BITS: i32 = 256;

fn pow2(e: i32) -> f64 {
    2f64.powi(e)
}

impl ScaledValue {
    pub const ZERO: ScaledValue = ScaledValue {
        mantissa: 0.0,
        exponent: 0,
    };

    pub fn from_f64(x: f64) -> Self {
        Self {
            mantissa: x,
            exponent: 0,
        }
    }

    /// May overflow to ±∞ or underflow to 0.
    pub fn to_f64(self) -> f64 {
        let mut m = self.mantissa;
        let mut e = self.exponent;
        while e > 0 && m.is_finite() && m != 0.0 {
            let step = e.min(RESCALE_BITS as i64);
            m *= pow2(step as i32);
            e -= step;
        }
        while e < 0 && m != 0.0 {
            let step = (-e).min(RESCALE_BITS as i64);
            m *= pow2(-(step as i32));
            e += step;
        }
        m
    }

    pub fn signum(self) -> f64 {
        if self.mantissa == 0.0 {
            0.0
        } else {
            self.mantissa.signum()
        }
    }

    /// `log2 |value|`, `-∞` for zero.
    pub fn log2_abs(self) -> f64 {
        self.mantissa.abs().log2() + self.exponent as f64
    }

    pub fn scale(self, c: f64) -> Self {
        Self {
            mantissa: self.mantissa * c,
            exponent: self.exponent,
        }
    }

    pub fn add(self, other: Self) -> Self {
        if self.mantissa == 0.0 {
            return other;
        }
        if other.mantissa == 0.0 {
            return self;
        }
        let (hi, lo) = if self.exponent >= other.exponent {
            (self, other)
        } else {
            (other, self)
        };
        let shift = hi.exponent - lo.exponent;
        let lo_m = if shift > 1100 {
            0.0
        } else {
            ScaledValue {
                mantissa: lo.mantissa,
                exponent: -shift,
            }
            .to_f64()
        };
        Self {
            mantissa: hi.mantissa + lo_m,
            exponent: hi.exponent,
        }
    }

    /// Relative comparison: `|self - other| ≤ tol · max(|self|, |other|)`.
    pub fn rel_close(self, other: Self, tol: f64) -> bool {
        let diff = self.add(other.scale(-1.0));
        let scale = if self.log2_abs() >= other.log2_abs() {
            self
        } else {
            other
        };
        if scale.mantissa == 0.0 {
            return diff.mantissa == 0.0;
        }
        let ratio = ScaledValue {
            mantissa: diff.mantissa / scale.mantissa.abs(),
            exponent: diff.exponent - scale.exponent,
        };
        ratio.to_f64().abs() <= tol
    }
}

/// Runs `u_k = x u_{k-1} + c_k u_{k-2}` from `u_{-1} = 1`, `u_{-2} = 0`.
fn run_recurrence(x: f64, couplings: impl Iterator<Item = f64>) -> ScaledValue {
    let hi = pow2(RESCALE_BITS);
    let lo = pow2(-RESCALE_BITS);
    let (mut prev, mut prev2) = (1.0_f64, 0.0_f64);
    let mut exponent = 0_i64;
    for c in couplings {
        let next = x * prev + c * prev2;
        prev2 = prev;
        prev = next;
        let m = prev.abs().max(prev2.abs());
        if m > hi {
            prev *= lo;
            prev2 *= lo;
            exponent += RESCALE_BITS as i64;
        } else if m < lo && m != 0.0 {
            prev *= hi;
            prev2 *= hi;
            exponent -= RESCALE_BITS as i64;
        }
    }
    ScaledValue {
        mantissa: prev,
        exponent,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Direction {
    /// Adds rows at the bottom: `𝒯_α^β = x 𝒯_α^{β-1} + a_β a_{β-1} 𝒯_α^{β-2}`.
    TopLeft,
    /// Adds rows at the top: `𝒯_α^β = x 𝒯_{α+1}^β + a_α a_{α+1} 𝒯_{α+2}^β`.
    BottomRight,
}

fn check_range(seq: &CoefficientSequence, alpha: usize, beta: usize) -> Result<(), CharpolyError> {
    if alpha > beta + 1 || beta >= seq.len() {
        return Err(CharpolyError::BadRange {
            alpha,
            beta,
            n: seq.len(),
        });
    }
    Ok(())
}

/// `𝒯_α^β(x)` in scaled form. `alpha = beta + 1` gives the empty block.
pub fn t_eval_scaled(
    seq: &CoefficientSequence,
    alpha: usize,
    beta: usize,
    x: f64,
    direction: Direction,
) -> Result<ScaledValue, CharpolyError> {
    check_range(seq, alpha, beta)?;
    if alpha == beta + 1 {
        return Ok(ScaledValue::from_f64(1.0));
    }
    let a = &seq.a;
    Ok(match direction {
        TopLeft => run_recurrence(
            x,
            (alpha..=beta).map(|k| if k == alpha { 0.0 } else { a[k] * a[k - 1] }),
        ),
        BottomRight => run_recurrence(
            x,
            (alpha..=beta)
                .rev()
                .map(|k| if k == beta { 0.0 } else { a[k] * a[k + 1] }),
        ),
    })
}

use Direction::{BottomRight, TopLeft};

/// `𝒯_α^β(x)` as `f64`.
pub fn t_eval(seq: &CoefficientSequence, alpha: usize, beta: usize, x: f64) -> Result<f64, CharpolyError> {
    Ok(t_eval_scaled(seq, alpha, beta, x, TopLeft)?.to_f64())
}

/// `𝒯_α^β(0)`: `Π a_k` when `β - α` is odd, else 0.
pub fn t_at_zero(seq: &CoefficientSequence, alpha: usize, beta: usize) -> Result<f64, CharpolyError> {
    check_range(seq, alpha, beta)?;
    if alpha == beta + 1 {
        return Ok(1.0);
    }
    Ok(if (beta - alpha) % 2 == 1 {
        seq.a[alpha..=beta].iter().product()
    } else {
        0.0
    })
}

/// `𝒯'_α^β(0)`: 0 when `β - α` is odd, else `Σ_{k=0}^{(β-α)/2} Π_{j ≠ α+2k} a_j`.
pub fn dt_at_zero(seq: &CoefficientSequence, alpha: usize, beta: usize) -> Result<f64, CharpolyError> {
    check_range(seq, alpha, beta)?;
    if alpha == beta + 1 || (beta - alpha) % 2 == 1 {
        return Ok(0.0);
    }
    let block = &seq.a[alpha..=beta];
    Ok((0..block.len())
        .step_by(2)
        .map(|skip| {
            block
                .iter()
                .enumerate()
                .filter(|&(j, _)| j != skip)
                .map(|(_, v)| v)
                .product::<f64>()
        })
        .sum())
}

/// `𝒜(x) = 𝒯_0^{n-1}(x) + a_0 a_{n-1} 𝒯_1^{n-2}(x)` in scaled form.
pub fn a_eval_scaled(seq: &CoefficientSequence, x: f64) -> Result<ScaledValue, CharpolyError> {
    if seq.len() % 2 == 0 {
        return Err(CharpolyError::EvenCyclic(seq.len()));
    }
    let n = seq.len();
    let main = t_eval_scaled(seq, 0, n - 1, x, TopLeft)?;
    let inner = t_eval_scaled(seq, 1, n - 2, x, TopLeft)?;
    Ok(main.add(inner.scale(seq.a[0] * seq.a[n - 1])))
}

/// `𝒜(x)` as `f64`; the sequence is read cyclically and must have odd length.
pub fn a_eval(seq: &CoefficientSequence, x: f64) -> Result<f64, CharpolyError> {
    Ok(a_eval_scaled(seq, x)?.to_f64())
}

/// `det(xI - A)` for the class matrix: `𝒜` if cyclic, `𝒯_0^{n-1}` otherwise.
pub fn char_poly_scaled(seq: &CoefficientSequence, x: f64) -> Result<ScaledValue, CharpolyError> {
    if seq.cyclic {
        a_eval_scaled(seq, x)
    } else {
        t_eval_scaled(seq, 0, seq.len() - 1, x, TopLeft)
    }
}

/// `e_{n-1}(a) = Σ_k Π_{j≠k} a_j`, the linear coefficient of `𝒜`.
pub fn elementary_symmetric_n_minus_1(a: &[f64]) -> f64 {
    let n = a.len();
    let mut prefix = vec![1.0; n + 1];
    for i in 0..n {
        prefix[i + 1] = prefix[i] * a[i];
    }
    let mut suffix = 1.0;
    let mut acc = 0.0;
    for k in (0..n).rev() {
        acc += prefix[k] * suffix;
        suffix *= a[k];
    }
    acc
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    /// `√(-a_1 (a_0 + a_2))` relative to the root.
    Front,
    /// `√(-a_{-1} (a_0 + a_{-2}))` relative to the root.
    Back,
}

/// Lower bound `λ†` on a real root, measured from the disc index `root`.
///
/// Absent when the radicand is not strictly positive or a neighbour is
/// missing (non-cyclic sequences near an end).
pub fn lower_bound_lambda(seq: &CoefficientSequence, root: usize, side: Side) -> Option<f64> {
    let s: isize = match side {
        Side::Front => 1,
        Side::Back => -1,
    };
    let a0 = seq.at(root, 0)?;
    let a1 = seq.at(root, s)?;
    let a2 = seq.at(root, 2 * s)?;
    let radicand = -a1 * (a0 + a2);
    (radicand > 0.0).then(|| radicand.sqrt())
}

/// The larger of the two valid bounds.
pub fn best_lower_bound(seq: &CoefficientSequence, root: usize) -> Option<(f64, Side)> {
    let front = lower_bound_lambda(seq, root, Side::Front).map(|l| (l, Side::Front));
    let back = lower_bound_lambda(seq, root, Side::Back).map(|l| (l, Side::Back));
    match (front, back) {
        (Some(f), Some(b)) => Some(if b.0 > f.0 { b } else { f }),
        (f, b) => f.or(b),
    }
}

/// Whether the class characteristic polynomial is strictly negative at the
/// best `λ†` for disc index `root`.
pub fn certify_negative_at_bound(seq: &CoefficientSequence, root: usize) -> bool {
    best_lower_bound(seq, root)
        .and_then(|(l, _)| char_poly_scaled(seq, l).ok())
        .is_some_and(|v| v.signum() < 0.0)
}

/// `[lo, hi]` with the characteristic polynomial negative at `lo` and
/// positive at `hi`, found by doubling from `lo` and capped at the
/// Gershgorin bound.
pub fn bracket_real_root(seq: &CoefficientSequence, lo: f64) -> Result<(f64, f64), CharpolyError> {
    let f_lo = char_poly_scaled(seq, lo)?;
    if f_lo.signum() >= 0.0 {
        return Err(CharpolyError::NotNegative(lo));
    }
    let cap = seq.gershgorin_bound();
    let mut hi = lo;
    loop {
        hi = (2.0 * hi).min(cap);
        if char_poly_scaled(seq, hi)?.signum() > 0.0 {
            return Ok((lo, hi));
        }
        if hi >= cap {
            return Err(CharpolyError::NoSignChange(cap));
        }
    }
}

/// Bisection on a sign-change bracket until `hi - lo ≤ tol`.
pub fn bisect_root(seq: &CoefficientSequence, mut lo: f64, mut hi: f64, tol: f64) -> Result<f64, CharpolyError> {
    let s_lo = char_poly_scaled(seq, lo)?.signum();
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let s = char_poly_scaled(seq, mid)?.signum();
        match s.partial_cmp(&0.0) {
            Some(Ordering::Equal) => return Ok(mid),
            _ if s == s_lo => lo = mid,
            _ => hi = mid,
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Bisection tolerance on `x`.
pub const BISECTION_TOL: f64 = 1e-12;

/// A root certified to exceed `λ†`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RootCertificate {
    pub lambda_dagger: f64,
    pub side: Side,
    pub bracket: (f64, f64),
    pub root: f64,
}

/// Full chain: `λ†`, sign certificate, bracket and bisection.
pub fn certified_root(seq: &CoefficientSequence, root: usize) -> Option<RootCertificate> {
    let (lambda_dagger, side) = best_lower_bound(seq, root)?;
    let bracket = bracket_real_root(seq, lambda_dagger).ok()?;
    let r = bisect_root(seq, bracket.0, bracket.1, BISECTION_TOL).ok()?;
    Some(RootCertificate {
        lambda_dagger,
        side,
        bracket,
        root: r,
    })
}
