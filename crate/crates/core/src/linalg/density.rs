use num_complex::Complex64;

use super::{eigvals_hermitian, ComplexMatrix, HERMITIAN_TOLERANCE};
use crate::error::{Error, Result};

pub const TRACE_TOLERANCE: f64 = 1e-10;
pub const POSITIVITY_TOLERANCE: f64 = 1e-10;

/// Unit-trace, Hermitian, positive-semidefinite matrix.
///
/// Construction validates all three properties. Round-off asymmetry below
/// [`HERMITIAN_TOLERANCE`] is removed on the way in, so a stored value is
/// Hermitian to machine precision.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    matrix: ComplexMatrix,
}

impl DensityMatrix {
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        if !matrix.is_square() || matrix.rows() == 0 {
            return Err(Error::InvalidDimension(format!(
                "density matrix must be square and non-empty, got {}x{}",
                matrix.rows(),
                matrix.cols()
            )));
        }
        let asymmetry = matrix.hermitian_asymmetry();
        if asymmetry > HERMITIAN_TOLERANCE {
            return Err(Error::NotHermitian { asymmetry });
        }
        let matrix = matrix.hermitian_part();
        let trace = matrix.trace().re;
        if (trace - 1.0).abs() > TRACE_TOLERANCE {
            return Err(Error::InvalidState(format!("trace is {trace}, expected 1")));
        }
        let smallest = eigvals_hermitian(&matrix)?[0];
        if smallest < -POSITIVITY_TOLERANCE {
            return Err(Error::InvalidState(format!(
                "smallest eigenvalue {smallest:e} is negative"
            )));
        }
        Ok(Self { matrix })
    }

    /// Diagonal state from a list of populations.
    pub fn from_populations(populations: &[f64]) -> Result<Self> {
        if populations.iter().any(|p| !p.is_finite() || *p < -POSITIVITY_TOLERANCE) {
            return Err(Error::InvalidState("populations must be non-negative".into()));
        }
        Self::new(ComplexMatrix::from_real_diagonal(populations))
    }

    /// `|ψ><ψ|` for a vector that is normalized here.
    pub fn from_pure(amplitudes: &[Complex64]) -> Result<Self> {
        let norm = amplitudes.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if !(norm > 0.0) || !norm.is_finite() {
            return Err(Error::InvalidState("state vector has zero norm".into()));
        }
        let psi: Vec<Complex64> = amplitudes.iter().map(|z| z / norm).collect();
        Self::new(ComplexMatrix::outer(&psi, &psi))
    }

    /// Basis projector `|k><k|` in dimension `dim`.
    pub fn basis(dim: usize, k: usize) -> Result<Self> {
        if k >= dim {
            return Err(Error::InvalidDimension(format!("level {k} outside dimension {dim}")));
        }
        let mut p = vec![0.0; dim];
        p[k] = 1.0;
        Self::from_populations(&p)
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    #[inline]
    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.matrix
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.matrix[(i, j)]
    }

    pub fn populations(&self) -> Vec<f64> {
        self.matrix.diagonal().iter().map(|z| z.re).collect()
    }

    /// `U ρ U^dagger`.
    pub fn evolve(&self, u: &ComplexMatrix) -> Result<Self> {
        if u.rows() != self.dim() || u.cols() != self.dim() {
            return Err(Error::InvalidDimension(format!(
                "propagator is {}x{}, state has dimension {}",
                u.rows(),
                u.cols(),
                self.dim()
            )));
        }
        Self::new(self.matrix.conjugate_by(u))
    }

    pub fn min_eigenvalue(&self) -> f64 {
        eigvals_hermitian(&self.matrix).map(|v| v[0]).unwrap_or(f64::NAN)
    }

    pub fn purity(&self) -> f64 {
        // tr(ρ²) = Σ|ρ_ij|² for Hermitian ρ
        self.matrix.frobenius_norm().powi(2)
    }

    /// Total population of the last `levels` basis states.
    pub fn edge_population(&self, levels: usize) -> f64 {
        let n = self.dim();
        (n.saturating_sub(levels)..n).map(|i| self.matrix[(i, i)].re).sum()
    }
}

/// Reduces a state on `A ⊗ B` to subsystem `A` by summing over `B`.
pub fn partial_trace_b(rho: &DensityMatrix, dim_a: usize, dim_b: usize) -> Result<DensityMatrix> {
    let reduced = partial_trace_b_matrix(rho.matrix(), dim_a, dim_b)?;
    DensityMatrix::new(reduced)
}

/// Matrix-level partial trace over the second tensor factor.
pub fn partial_trace_b_matrix(m: &ComplexMatrix, dim_a: usize, dim_b: usize) -> Result<ComplexMatrix> {
    if dim_a == 0 || dim_b == 0 || m.rows() != dim_a * dim_b || m.cols() != dim_a * dim_b {
        return Err(Error::InvalidDimension(format!(
            "cannot trace a {}x{} matrix as {dim_a}x{dim_b} subsystems",
            m.rows(),
            m.cols()
        )));
    }
    Ok(ComplexMatrix::from_fn(dim_a, dim_a, |i, j| {
        (0..dim_b).map(|k| m[(i * dim_b + k, j * dim_b + k)]).sum()
    }))
}
