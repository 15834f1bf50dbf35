//! Dense nonsymmetric eigensolver backend.

use faer::Mat;
use num_complex::Complex64;

use super::SpectraError;

fn check_finite(m: &Mat<f64>) -> Result<(), SpectraError> {
    for j in 0..m.ncols() {
        for i in 0..m.nrows() {
            if !m[(i, j)].is_finite() {
                return Err(SpectraError::NonFinite);
            }
        }
    }
    Ok(())
}

/// Permutation step of balancing: repeatedly splits off indices whose row or
/// column is zero off the diagonal within the remaining submatrix. Each such
/// index contributes its diagonal entry exactly, which keeps the zero
/// eigenvalues of defective blocks (`ρ = 0` modes, `α = 0` rows) exact.
///
/// Returns the isolated eigenvalues and the remaining indices.
fn isolate(m: &Mat<f64>) -> (Vec<Complex64>, Vec<usize>) {
    let n = m.nrows();
    let mut row_nnz = vec![0usize; n];
    let mut col_nnz = vec![0usize; n];
    for j in 0..n {
        for i in 0..n {
            if i != j && m[(i, j)] != 0.0 {
                row_nnz[i] += 1;
                col_nnz[j] += 1;
            }
        }
    }
    let mut active = vec![true; n];
    let mut queue: Vec<usize> = (0..n).filter(|&k| row_nnz[k] == 0 || col_nnz[k] == 0).collect();
    let mut isolated = Vec::new();
    while let Some(k) = queue.pop() {
        if !active[k] {
            continue;
        }
        active[k] = false;
        isolated.push(Complex64::new(m[(k, k)], 0.0));
        for i in 0..n {
            if active[i] && i != k {
                if m[(i, k)] != 0.0 {
                    row_nnz[i] -= 1;
                    if row_nnz[i] == 0 {
                        queue.push(i);
                    }
                }
                if m[(k, i)] != 0.0 {
                    col_nnz[i] -= 1;
                    if col_nnz[i] == 0 {
                        queue.push(i);
                    }
                }
            }
        }
    }
    (isolated, (0..n).filter(|&k| active[k]).collect())
}

/// All eigenvalues of a square real matrix.
pub fn eigenvalues(m: &Mat<f64>) -> Result<Vec<Complex64>, SpectraError> {
    assert_eq!(m.nrows(), m.ncols(), "square matrix required");
    if m.nrows() == 0 {
        return Ok(Vec::new());
    }
    check_finite(m)?;
    let (mut values, rest) = isolate(m);
    if rest.is_empty() {
        return Ok(values);
    }
    let sub = if rest.len() == m.nrows() {
        m.clone()
    } else {
        Mat::from_fn(rest.len(), rest.len(), |i, j| m[(rest[i], rest[j])])
    };
    values.extend(
        sub.eigenvalues()
            .map_err(|e| SpectraError::Eigensolver(format!("{e:?}")))?,
    );
    Ok(values)
}

pub fn spectral_radius(values: &[Complex64]) -> f64 {
    values.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

fn frobenius(m: &Mat<f64>) -> f64 {
    let mut acc = 0.0;
    for j in 0..m.ncols() {
        for i in 0..m.nrows() {
            acc += m[(i, j)] * m[(i, j)];
        }
    }
    acc.sqrt()
}

/// Unit eigenvector for a real eigenvalue near `lambda`, with the sign fixed
/// so the largest-magnitude entry is positive.
///
/// Fails unless `‖Mv - λv‖ ≤ 1e-8 ‖M‖_F` for the eigenvalue `λ` nearest to
/// `lambda`, and `|λ - lambda| ≤ 1e-8 max(1, |lambda|)`.
pub fn real_eigenvector(m: &Mat<f64>, lambda: f64) -> Result<(f64, Vec<f64>), SpectraError> {
    check_finite(m)?;
    let n = m.nrows();
    let evd = m
        .eigen()
        .map_err(|e| SpectraError::Eigensolver(format!("{e:?}")))?;
    let s = evd.S().column_vector();
    let u = evd.U();
    let target = Complex64::new(lambda, 0.0);
    let (col, found) = (0..n)
        .map(|j| (j, s[j]))
        .min_by(|a, b| (a.1 - target).norm().total_cmp(&(b.1 - target).norm()))
        .ok_or(SpectraError::NotEigenvalue {
            lambda,
            residual: f64::INFINITY,
        })?;
    if (found - target).norm() > 1e-8 * lambda.abs().max(1.0) {
        return Err(SpectraError::NotEigenvalue {
            lambda,
            residual: (found - target).norm(),
        });
    }
    // remove the arbitrary complex phase using the dominant entry
    let pivot = (0..n)
        .max_by(|&a, &b| u[(a, col)].norm().total_cmp(&u[(b, col)].norm()))
        .unwrap();
    let phase = u[(pivot, col)].conj() / u[(pivot, col)].norm();
    let mut v: Vec<f64> = (0..n).map(|i| (u[(i, col)] * phase).re).collect();
    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    v.iter_mut().for_each(|x| *x /= norm);

    let lam = found.re;
    let residual = (0..n)
        .map(|i| {
            let mv: f64 = (0..n).map(|j| m[(i, j)] * v[j]).sum();
            (mv - lam * v[i]).powi(2)
        })
        .sum::<f64>()
        .sqrt()
        / frobenius(m).max(f64::MIN_POSITIVE);
    if residual > 1e-8 {
        return Err(SpectraError::NotEigenvalue { lambda, residual });
    }
    Ok((lam, v))
}
