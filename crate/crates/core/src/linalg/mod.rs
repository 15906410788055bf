//! Dense complex matrix kernels: operators, tensor products, partial
//! traces and Hermitian eigendecomposition.

mod density;
mod eigen;
mod fock;
mod matrix;

pub use density::{partial_trace_b, partial_trace_b_matrix, DensityMatrix, POSITIVITY_TOLERANCE, TRACE_TOLERANCE};
pub use eigen::{eig_hermitian, eigvals_hermitian, propagator, HermitianEigen, HERMITIAN_TOLERANCE};
pub use fock::{
    ladder_lowering, ladder_raising, number_operator, Checked, FockTruncation, TruncationPolicy,
    TruncationWarning, DEFAULT_FOCK_DIM, EDGE_POPULATION_LIMIT,
};
pub use matrix::{pauli_x, pauli_y, pauli_z, sigma_minus, sigma_plus, tensor, ComplexMatrix};
