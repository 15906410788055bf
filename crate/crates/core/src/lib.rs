//! Quantum Mpemba crossings in exactly solvable open systems.
//!
//! Three models are covered: a damped oscillator coupled to a bath
//! oscillator, a qubit coupled to a bath qubit, and a qubit coupled to a
//! bosonic mode with a time-dependent Jaynes-Cummings interaction. Every
//! closed-form evolution has a brute-force counterpart in [`oracle`] that
//! evolves the full composite system in a truncated basis.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod error;
pub mod linalg;
pub mod metrics;
pub mod mpemba;
pub mod oracle;
pub mod oscillator;
pub mod schedules;
pub mod tls;

pub use error::{Error, Result};
pub use linalg::{ComplexMatrix, DensityMatrix, FockTruncation};
pub use num_complex::Complex64;
