use nalgebra::DMatrix;
use num_complex::Complex64;

use super::ComplexMatrix;
use crate::error::{Error, Result};

/// Largest `|M - M^dagger|` entry accepted (and symmetrized away) before
/// an eigendecomposition.
pub const HERMITIAN_TOLERANCE: f64 = 1e-10;

/// Spectrum of a Hermitian matrix, eigenvalues ascending, eigenvectors as
/// the matching columns of a unitary matrix.
#[derive(Debug, Clone)]
pub struct HermitianEigen {
    pub values: Vec<f64>,
    pub vectors: ComplexMatrix,
}

impl HermitianEigen {
    /// `V f(Λ) V^dagger` for a scalar function of the eigenvalues.
    pub fn map_spectrum(&self, f: impl Fn(f64) -> Complex64) -> ComplexMatrix {
        let n = self.values.len();
        let v = &self.vectors;
        let weights: Vec<Complex64> = self.values.iter().map(|&l| f(l)).collect();
        let mut out = ComplexMatrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                let mut acc = Complex64::new(0.0, 0.0);
                for k in 0..n {
                    acc += v[(i, k)] * weights[k] * v[(j, k)].conj();
                }
                out[(i, j)] = acc;
            }
        }
        out
    }
}

fn require_hermitian(m: &ComplexMatrix) -> Result<ComplexMatrix> {
    if !m.is_square() {
        return Err(Error::InvalidDimension(format!(
            "eigendecomposition needs a square matrix, got {}x{}",
            m.rows(),
            m.cols()
        )));
    }
    let asymmetry = m.hermitian_asymmetry();
    if asymmetry > HERMITIAN_TOLERANCE {
        return Err(Error::NotHermitian { asymmetry });
    }
    Ok(m.hermitian_part())
}

/// Eigendecomposition of a Hermitian matrix.
///
/// Inputs within [`HERMITIAN_TOLERANCE`] of Hermitian are replaced by their
/// Hermitian part first; anything further off is rejected.
pub fn eig_hermitian(m: &ComplexMatrix) -> Result<HermitianEigen> {
    let sym = require_hermitian(m)?;
    let n = sym.rows();
    if n == 0 {
        return Ok(HermitianEigen {
            values: Vec::new(),
            vectors: ComplexMatrix::zeros(0, 0),
        });
    }
    let dense = DMatrix::<Complex64>::from_fn(n, n, |i, j| sym[(i, j)]);
    let eig = dense.symmetric_eigen();

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));

    let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let vectors = ComplexMatrix::from_fn(n, n, |i, j| eig.eigenvectors[(i, order[j])]);
    Ok(HermitianEigen { values, vectors })
}

/// Eigenvalues only, ascending.
pub fn eigvals_hermitian(m: &ComplexMatrix) -> Result<Vec<f64>> {
    let sym = require_hermitian(m)?;
    let n = sym.rows();
    let dense = DMatrix::<Complex64>::from_fn(n, n, |i, j| sym[(i, j)]);
    let mut values: Vec<f64> = dense.symmetric_eigenvalues().iter().copied().collect();
    values.sort_by(f64::total_cmp);
    Ok(values)
}

/// `exp(-i H)` for a Hermitian generator `H` that already carries every
/// time integral.
pub fn propagator(h: &ComplexMatrix) -> Result<ComplexMatrix> {
    let eig = eig_hermitian(h)?;
    Ok(eig.map_spectrum(|l| Complex64::new(0.0, -l).exp()))
}
