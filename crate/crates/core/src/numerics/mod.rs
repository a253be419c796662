//! Dense linear algebra needed by the precoder: matrices, unitary FFT,
//! Jacobi SVD and the unitary projection.

pub mod fft;
pub mod matrix;
pub mod projection;
pub mod svd;

pub use fft::{centered_to_natural, fft_unitary, natural_to_centered, Direction, UnitaryFft};
pub use matrix::{ComplexMatrix, Matrix, RealMatrix, Scalar};
pub use projection::{nearest_unitary, project_unitary};
pub use svd::{svd, SvdFactors};
