//! Distances between quantum states.

use crate::error::{Error, Result};
use crate::linalg::{eigvals_hermitian, DensityMatrix};
use crate::tls::BlochVector;

/// Eigenvalues of `ρ - σ` below this magnitude count as zero.
pub const EIGENVALUE_FLOOR: f64 = 1e-13;

fn same_dim(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<()> {
    if rho.dim() != sigma.dim() {
        return Err(Error::InvalidDimension(format!(
            "cannot compare states of dimension {} and {}",
            rho.dim(),
            sigma.dim()
        )));
    }
    Ok(())
}

/// Trace distance `½ tr|ρ - σ|`, computed from the spectrum of `ρ - σ`.
pub fn trace_distance(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    same_dim(rho, sigma)?;
    let diff = rho.matrix() - sigma.matrix();
    let spectrum = eigvals_hermitian(&diff)?;
    let total: f64 = spectrum
        .iter()
        .map(|l| l.abs())
        .filter(|&l| l >= EIGENVALUE_FLOOR)
        .sum();
    Ok((0.5 * total).min(1.0))
}

/// Hilbert-Schmidt distance `√tr[(ρ - σ)²]`, the Frobenius norm of the difference.
pub fn hs_distance(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    same_dim(rho, sigma)?;
    Ok((rho.matrix() - sigma.matrix()).frobenius_norm())
}

/// Half the Euclidean distance between two Bloch vectors, equal to the
/// trace distance of the qubit states they describe.
pub fn bloch_distance(a1: &BlochVector, a2: &BlochVector) -> Result<f64> {
    a1.validate()?;
    a2.validate()?;
    let d = [a1.rx - a2.rx, a1.ry - a2.ry, a1.rz - a2.rz];
    Ok(0.5 * d.iter().map(|x| x * x).sum::<f64>().sqrt())
}
