//! Small Hermitian matrix helpers on top of nalgebra.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};

pub type CMatrix = DMatrix<C64>;
pub type CVector = DVector<C64>;

pub const HERMITIAN_TOL: f64 = 1e-12;

pub fn from_rows(rows: &[Vec<C64>]) -> Result<CMatrix> {
    let d = rows.len();
    for r in rows {
        if r.len() != d {
            return Err(Error::DimensionMismatch { expected: d, found: r.len() });
        }
    }
    Ok(CMatrix::from_fn(d, d, |i, j| rows[i][j]))
}

pub fn to_rows(m: &CMatrix) -> Vec<Vec<C64>> {
    (0..m.nrows()).map(|i| (0..m.ncols()).map(|j| m[(i, j)]).collect()).collect()
}

pub fn is_hermitian(m: &CMatrix, tol: f64) -> bool {
    m.is_square()
        && (0..m.nrows()).all(|i| (0..m.ncols()).all(|j| (m[(i, j)] - m[(j, i)].conj()).norm() <= tol))
}

/// Eigenvalues (ascending) and unitary eigenvectors of a Hermitian matrix.
pub fn hermitian_eigen(m: &CMatrix) -> Result<(Vec<f64>, CMatrix)> {
    if !is_hermitian(m, HERMITIAN_TOL * (1.0 + m.norm())) {
        return Err(Error::NotPositiveDefinite("matrix is not Hermitian".into()));
    }
    if m.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
        return Err(Error::NonFinite("matrix entry".into()));
    }
    // symmetrize exactly so the solver sees a Hermitian input
    let sym = (m + m.adjoint()).map(|c| c * 0.5);
    let eig = sym.symmetric_eigen();
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = CMatrix::from_fn(m.nrows(), m.ncols(), |r, c| eig.eigenvectors[(r, order[c])]);
    Ok((values, vectors))
}

/// Spectral data of a Hermitian positive-definite matrix.
#[derive(Clone, Debug)]
pub struct PdSpectrum {
    pub values: Vec<f64>,
    pub vectors: CMatrix,
}

impl PdSpectrum {
    pub fn new(m: &CMatrix) -> Result<Self> {
        let (values, vectors) = hermitian_eigen(m)?;
        let max = values.last().copied().unwrap_or(0.0);
        match values.first() {
            Some(&min) if min > 1e-14 * max.max(1.0) => Ok(Self { values, vectors }),
            Some(&min) => Err(Error::NotPositiveDefinite(format!("smallest eigenvalue {min:e}"))),
            None => Err(Error::NotPositiveDefinite("empty matrix".into())),
        }
    }

    pub fn min(&self) -> f64 {
        self.values[0]
    }

    pub fn max(&self) -> f64 {
        *self.values.last().expect("nonempty spectrum")
    }

    fn apply(&self, f: impl Fn(f64) -> f64) -> CMatrix {
        let diag = CMatrix::from_diagonal(&CVector::from_iterator(
            self.values.len(),
            self.values.iter().map(|&v| C64::new(f(v), 0.0)),
        ));
        &self.vectors * diag * self.vectors.adjoint()
    }

    /// Hermitian square root `A` with `A* A = A^2 = m`.
    pub fn sqrt(&self) -> CMatrix {
        self.apply(f64::sqrt)
    }

    pub fn inverse(&self) -> CMatrix {
        self.apply(|v| 1.0 / v)
    }

    pub fn det(&self) -> f64 {
        self.values.iter().product()
    }
}

/// Hilbert-Schmidt (Frobenius) norm.
pub fn hs_norm(m: &CMatrix) -> f64 {
    m.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
}

pub fn max_abs_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}
