//! Constant diffusion matrix and the operator norms that enter the horizon
//! conditions.

use nalgebra::DMatrix;

use crate::error::{invalid, Error, Result};

const SINGULAR_TOL: f64 = 1e-12;

/// An invertible `d × d` diffusion matrix with cached norms.
#[derive(Debug, Clone, PartialEq)]
pub struct SigmaSpec {
    matrix: DMatrix<f64>,
    inverse: DMatrix<f64>,
    op_norm: f64,
    inv_op_norm: f64,
    det_gram: f64,
}

impl SigmaSpec {
    pub fn identity(dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(invalid("sigma dimension must be positive"));
        }
        sigma_analyze(&DMatrix::identity(dim, dim))
    }

    /// Builds from row-major rows.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let d = rows.len();
        if d == 0 || rows.iter().any(|r| r.len() != d) {
            return Err(invalid("sigma must be a non-empty square matrix"));
        }
        let m = DMatrix::from_fn(d, d, |i, j| rows[i][j]);
        sigma_analyze(&m)
    }

    pub fn scalar(s: f64) -> Result<Self> {
        Self::from_rows(&[vec![s]])
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn inverse(&self) -> &DMatrix<f64> {
        &self.inverse
    }

    /// ‖σ‖, the spectral norm.
    pub fn op_norm(&self) -> f64 {
        self.op_norm
    }

    /// ‖σ⁻¹‖.
    pub fn inv_op_norm(&self) -> f64 {
        self.inv_op_norm
    }

    /// det(σσ*).
    pub fn det_gram(&self) -> f64 {
        self.det_gram
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        (0..self.dim())
            .map(|i| (0..self.dim()).map(|j| self.matrix[(i, j)]).collect())
            .collect()
    }

    /// `out = σ v`
    pub fn apply(&self, v: &[f64], out: &mut [f64]) {
        mat_vec(&self.matrix, v, out);
    }

    /// `out = σ⁻¹ v`
    pub fn apply_inv(&self, v: &[f64], out: &mut [f64]) {
        mat_vec(&self.inverse, v, out);
    }
}

fn mat_vec(m: &DMatrix<f64>, v: &[f64], out: &mut [f64]) {
    let d = m.nrows();
    for (i, o) in out.iter_mut().enumerate().take(d) {
        let mut acc = 0.0;
        for (j, vj) in v.iter().enumerate().take(d) {
            acc += m[(i, j)] * vj;
        }
        *o = acc;
    }
}

/// Analyzes a square matrix: spectral norms of `σ` and `σ⁻¹` and `det(σσ*)`.
///
/// Diagonal matrices are handled in closed form; everything else goes
/// through a symmetric eigensolve of the Gram matrix.
pub fn sigma_analyze(matrix: &DMatrix<f64>) -> Result<SigmaSpec> {
    let d = matrix.nrows();
    if d == 0 || matrix.ncols() != d {
        return Err(invalid("sigma must be a non-empty square matrix"));
    }
    if matrix.iter().any(|v| !v.is_finite()) {
        return Err(invalid("sigma has non-finite entries"));
    }
    let scale = matrix.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    let det = matrix.clone().lu().determinant();
    if scale == 0.0 || det.abs() < SINGULAR_TOL * scale.powi(d as i32) {
        return Err(Error::SingularSigma { det });
    }
    let inverse = matrix
        .clone()
        .try_inverse()
        .ok_or(Error::SingularSigma { det })?;

    let is_diagonal = (0..d).all(|i| (0..d).all(|j| i == j || matrix[(i, j)] == 0.0));
    let (op_norm, inv_op_norm) = if is_diagonal {
        let diag = (0..d).map(|i| matrix[(i, i)].abs());
        let max = diag.clone().fold(0.0_f64, f64::max);
        let min = diag.fold(f64::INFINITY, f64::min);
        (max, 1.0 / min)
    } else {
        (spectral_norm(matrix), spectral_norm(&inverse))
    };

    Ok(SigmaSpec {
        matrix: matrix.clone(),
        inverse,
        op_norm,
        inv_op_norm,
        det_gram: det * det,
    })
}

/// Largest singular value, from the eigenvalues of `A Aᵀ`.
pub(crate) fn spectral_norm(a: &DMatrix<f64>) -> f64 {
    let gram = a * a.transpose();
    gram.symmetric_eigenvalues().max().max(0.0).sqrt()
}
