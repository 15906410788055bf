use num_complex::Complex64;
use serde::Serialize;

use super::{ComplexMatrix, DensityMatrix};
use crate::error::{Error, Result};

/// Default number of retained Fock levels.
pub const DEFAULT_FOCK_DIM: usize = 40;

/// Largest population allowed in the top two retained levels of an evolved
/// state before the truncation is reported as inadequate.
pub const EDGE_POPULATION_LIMIT: f64 = 1e-10;

/// Number of retained levels `|0>, ..., |dim-1>` of a bosonic mode.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct FockTruncation(usize);

impl FockTruncation {
    pub fn new(dim: usize) -> Result<Self> {
        if dim < 2 {
            return Err(Error::InvalidDimension(format!(
                "Fock truncation needs at least 2 levels, got {dim}"
            )));
        }
        Ok(Self(dim))
    }

    #[inline]
    pub fn dim(self) -> usize {
        self.0
    }
}

impl Default for FockTruncation {
    fn default() -> Self {
        Self(DEFAULT_FOCK_DIM)
    }
}

/// Lowering operator `a` with `a|n> = √n |n-1>`.
pub fn ladder_lowering(trunc: FockTruncation) -> ComplexMatrix {
    let n = trunc.dim();
    let mut a = ComplexMatrix::zeros(n, n);
    for level in 1..n {
        a[(level - 1, level)] = Complex64::new((level as f64).sqrt(), 0.0);
    }
    a
}

pub fn ladder_raising(trunc: FockTruncation) -> ComplexMatrix {
    ladder_lowering(trunc).adjoint()
}

/// `diag(0, 1, ..., dim-1)`.
pub fn number_operator(trunc: FockTruncation) -> ComplexMatrix {
    let diag: Vec<f64> = (0..trunc.dim()).map(|n| n as f64).collect();
    ComplexMatrix::from_real_diagonal(&diag)
}

/// How an inadequate truncation is handled.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TruncationPolicy {
    /// Fail with [`Error::Truncation`].
    #[default]
    Strict,
    /// Return the renormalized state together with a [`TruncationWarning`].
    Warn,
}

/// Report that an evolved state leaks into the top of its Fock basis.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TruncationWarning {
    pub dim: usize,
    pub edge_population: f64,
}

impl std::fmt::Display for TruncationWarning {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "population {:.3e} in the top two of {} Fock levels exceeds {:e}",
            self.edge_population, self.dim, EDGE_POPULATION_LIMIT
        )
    }
}

/// A state together with the truncation diagnostic raised while building it.
#[derive(Debug, Clone)]
pub struct Checked {
    pub state: DensityMatrix,
    pub warning: Option<TruncationWarning>,
}

impl Checked {
    /// Applies the top-two-levels adequacy test to `state`.
    pub fn inspect(state: DensityMatrix, policy: TruncationPolicy) -> Result<Self> {
        let edge_population = state.edge_population(2);
        if edge_population <= EDGE_POPULATION_LIMIT {
            return Ok(Self { state, warning: None });
        }
        let warning = TruncationWarning {
            dim: state.dim(),
            edge_population,
        };
        match policy {
            TruncationPolicy::Strict => Err(Error::Truncation(warning.to_string())),
            TruncationPolicy::Warn => Ok(Self {
                state,
                warning: Some(warning),
            }),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn trunc(dim: usize) -> FockTruncation {
        FockTruncation::new(dim).unwrap()
    }

    #[test]
    fn rejects_tiny_truncation() {
        assert!(FockTruncation::new(1).is_err());
        assert!(FockTruncation::new(0).is_err());
        assert_eq!(FockTruncation::default().dim(), 40);
    }

    #[test]
    fn lowering_two_levels() {
        let a = ladder_lowering(trunc(2));
        let expected = ComplexMatrix::from_fn(2, 2, |i, j| {
            if (i, j) == (0, 1) {
                Complex64::new(1.0, 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            }
        });
        assert_eq!(a, expected);
    }

    #[test]
    fn lowering_three_levels_superdiagonal() {
        let a = ladder_lowering(trunc(3));
        assert!((a[(1, 2)].re - std::f64::consts::SQRT_2).abs() < 1e-15);
        assert_eq!(a[(2, 1)], Complex64::new(0.0, 0.0));
    }

    #[test]
    fn number_operator_is_exact() {
        for dim in [2, 4, 9] {
            let a = ladder_lowering(trunc(dim));
            let n = &a.adjoint() * &a;
            // (√k)² is exact only up to one rounding of the square root
            assert!(n.max_abs_diff(&number_operator(trunc(dim))) <= 4.0 * f64::EPSILON * dim as f64);
            assert!((0..dim).all(|i| (0..dim).all(|j| i == j || n[(i, j)].norm() == 0.0)));
        }
    }

    #[test]
    fn checked_policy() {
        let leaky = DensityMatrix::from_populations(&[0.5, 0.3, 0.2]).unwrap();
        assert!(matches!(
            Checked::inspect(leaky.clone(), TruncationPolicy::Strict),
            Err(Error::Truncation(_))
        ));
        let warned = Checked::inspect(leaky, TruncationPolicy::Warn).unwrap();
        assert!((warned.warning.unwrap().edge_population - 0.5).abs() < 1e-15);

        let tight = DensityMatrix::basis(5, 0).unwrap();
        assert!(Checked::inspect(tight, TruncationPolicy::Strict).unwrap().warning.is_none());
    }
}
