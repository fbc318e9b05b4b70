//! Symmetric-matrix routines backing the SPD metrics.
//!
//! All matrices are row-major `dim * dim` slices. The eigendecomposition is
//! delegated to nalgebra; matrix log, square root, and exponential are built
//! from it by mapping the spectrum.

use nalgebra::{DMatrix, DVector};

use super::{ObjectError, SPD_EIGENVALUE_FLOOR, SYMMETRY_TOLERANCE};

/// Frobenius norm of a row-major matrix (or any slice).
pub fn frobenius_norm(data: &[f64]) -> f64 {
    data.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// The SPD acceptance gate; false for anything non-finite.
pub(crate) fn passes_spd_floor(smallest: f64, largest: f64) -> bool {
    smallest > SPD_EIGENVALUE_FLOOR * largest
}

/// Check `||A - A^T||_F <= SYMMETRY_TOLERANCE * ||A||_F`.
pub fn check_symmetric(data: &[f64], dim: usize) -> Result<(), ObjectError> {
    let mut asym = 0.0;
    for i in 0..dim {
        for j in (i + 1)..dim {
            let d = data[i * dim + j] - data[j * dim + i];
            asym += 2.0 * d * d;
        }
    }
    if asym.sqrt() > SYMMETRY_TOLERANCE * frobenius_norm(data) {
        return Err(ObjectError::NotSymmetric);
    }
    Ok(())
}

/// Eigendecomposition of a symmetric matrix.
///
/// Returns the eigenvalues in descending order and the orthonormal
/// eigenvectors as the columns of a row-major matrix, so that
/// `A = V diag(lambda) V^T`. The input is symmetrized as `(A + A^T) / 2`
/// before decomposing; inputs that are not symmetric within tolerance are
/// rejected.
pub fn sym_eig(data: &[f64], dim: usize) -> Result<(Vec<f64>, Vec<f64>), ObjectError> {
    check_symmetric(data, dim)?;
    let mut m = DMatrix::from_row_slice(dim, dim, data);
    // exact symmetry for the decomposition
    for i in 0..dim {
        for j in (i + 1)..dim {
            let v = 0.5 * (m[(i, j)] + m[(j, i)]);
            m[(i, j)] = v;
            m[(j, i)] = v;
        }
    }
    let decomp = m.symmetric_eigen();
    let mut order: Vec<usize> = (0..dim).collect();
    order.sort_by(|&a, &b| decomp.eigenvalues[b].total_cmp(&decomp.eigenvalues[a]));

    let mut eigenvalues = Vec::with_capacity(dim);
    let mut vectors = vec![0.0; dim * dim];
    for (col, &src) in order.iter().enumerate() {
        eigenvalues.push(decomp.eigenvalues[src]);
        for row in 0..dim {
            vectors[row * dim + col] = decomp.eigenvectors[(row, src)];
        }
    }
    Ok((eigenvalues, vectors))
}

/// `V f(diag) V^T` for a validated SPD spectrum.
fn spectral_map(
    data: &[f64],
    dim: usize,
    f: impl Fn(f64) -> f64,
    require_spd: bool,
) -> Result<Vec<f64>, ObjectError> {
    let (eigenvalues, vectors) = sym_eig(data, dim)?;
    if require_spd && !passes_spd_floor(eigenvalues[dim - 1], eigenvalues[0]) {
        return Err(ObjectError::NotSpd);
    }
    let mapped: Vec<f64> = eigenvalues.iter().map(|&l| f(l)).collect();
    let v = DMatrix::from_row_slice(dim, dim, &vectors);
    let d = DMatrix::from_diagonal(&DVector::from_vec(mapped));
    let out = &v * d * v.transpose();
    Ok(row_major(&out))
}

/// Matrix logarithm of an SPD matrix (a symmetric matrix).
pub fn matrix_log(data: &[f64], dim: usize) -> Result<Vec<f64>, ObjectError> {
    spectral_map(data, dim, f64::ln, true)
}

/// Principal square root of an SPD matrix (SPD).
pub fn matrix_sqrt(data: &[f64], dim: usize) -> Result<Vec<f64>, ObjectError> {
    spectral_map(data, dim, f64::sqrt, true)
}

/// Inverse principal square root of an SPD matrix.
pub fn matrix_inv_sqrt(data: &[f64], dim: usize) -> Result<Vec<f64>, ObjectError> {
    spectral_map(data, dim, |l| 1.0 / l.sqrt(), true)
}

/// Matrix exponential of a symmetric matrix.
pub fn matrix_exp(data: &[f64], dim: usize) -> Result<Vec<f64>, ObjectError> {
    spectral_map(data, dim, f64::exp, false)
}

/// Lower-triangular Cholesky factor `L` with positive diagonal, `L L^T = A`.
pub fn cholesky_lower(data: &[f64], dim: usize) -> Result<Vec<f64>, ObjectError> {
    check_symmetric(data, dim)?;
    let (eigenvalues, _) = sym_eig(data, dim)?;
    if !passes_spd_floor(eigenvalues[dim - 1], eigenvalues[0]) {
        return Err(ObjectError::NotSpd);
    }
    let m = DMatrix::from_row_slice(dim, dim, data);
    let chol = m.cholesky().ok_or(ObjectError::NotSpd)?;
    Ok(row_major(&chol.l()))
}

/// `A * B` for row-major square matrices.
pub fn matmul(a: &[f64], b: &[f64], dim: usize) -> Vec<f64> {
    let mut out = vec![0.0; dim * dim];
    for i in 0..dim {
        for k in 0..dim {
            let aik = a[i * dim + k];
            if aik == 0.0 {
                continue;
            }
            for j in 0..dim {
                out[i * dim + j] += aik * b[k * dim + j];
            }
        }
    }
    out
}

fn row_major(m: &DMatrix<f64>) -> Vec<f64> {
    let (r, c) = m.shape();
    let mut out = Vec::with_capacity(r * c);
    for i in 0..r {
        for j in 0..c {
            out.push(m[(i, j)]);
        }
    }
    out
}
