//! Projection onto the unitary group.
//!
//! The Frobenius-nearest unitary matrix to `A = U Σ Vᴴ` is `U Vᴴ`. It is
//! unique only when `A` has full rank.

use crate::error::{Error, Result};
use crate::numerics::matrix::{Matrix, Scalar};
use crate::numerics::svd::{svd, SvdFactors};

/// Relative threshold below which a singular value counts as zero.
pub const RANK_TOL: f64 = 1e-12;

fn check_square<T: Scalar>(a: &Matrix<T>) -> Result<()> {
    if !a.is_square() {
        return Err(Error::Size(format!("projection needs a square matrix, got {}x{}", a.rows(), a.cols())));
    }
    Ok(())
}

/// Number of singular values at or below `RANK_TOL·σ_max`.
pub fn deficiency(sigma: &[f64]) -> usize {
    let smax = sigma.first().copied().unwrap_or(0.0);
    sigma.iter().filter(|&&s| s <= RANK_TOL * smax).count()
}

/// `U Vᴴ` for a full-rank square matrix.
///
/// Returns [`Error::Singular`] when the smallest singular value is at or below
/// `1e-12` of the largest, since the projection is then not unique.
pub fn project_unitary<T: Scalar>(a: &Matrix<T>) -> Result<Matrix<T>> {
    check_square(a)?;
    let f = svd(a)?;
    let deficient = deficiency(&f.sigma);
    if deficient > 0 || a.rows() == 0 {
        return Err(Error::Singular { deficient });
    }
    polar(&f)
}

/// A Frobenius-nearest unitary matrix, also for rank-deficient input.
///
/// On the null space the factor pairs the SVD's deterministic completion of
/// `U` with the matching columns of `V`; any such pairing is equally close.
/// The SVD is returned so callers can inspect or adjust that completion.
pub fn nearest_unitary<T: Scalar>(a: &Matrix<T>) -> Result<(Matrix<T>, SvdFactors<T>)> {
    check_square(a)?;
    let f = svd(a)?;
    let q = polar(&f)?;
    Ok((q, f))
}

fn polar<T: Scalar>(f: &SvdFactors<T>) -> Result<Matrix<T>> {
    f.u.matmul(&f.v.adjoint())
}
