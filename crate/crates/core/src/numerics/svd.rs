//! One-sided Jacobi singular value decomposition.
//!
//! Columns of a working copy of `A` are rotated pairwise until they are
//! mutually orthogonal; the accumulated rotations form `V`, the column norms
//! are the singular values, and the normalised columns form `U`. Columns whose
//! norm is zero to working precision are replaced by an orthonormal completion
//! so that `U` always has orthonormal columns.

use crate::error::{Error, Result};
use crate::numerics::matrix::{Matrix, Scalar};

const MAX_SWEEPS: usize = 80;

/// Thin SVD `A = U diag(sigma) Vᴴ`.
#[derive(Clone, Debug)]
pub struct SvdFactors<T> {
    /// `rows × k` with orthonormal columns, `k = min(rows, cols)`.
    pub u: Matrix<T>,
    /// Nonincreasing, nonnegative.
    pub sigma: Vec<f64>,
    /// `cols × k` with orthonormal columns.
    pub v: Matrix<T>,
    /// Number of singular values above `sigma[0]·max(rows, cols)·ε`.
    pub rank: usize,
}

impl<T: Scalar> SvdFactors<T> {
    /// `U diag(sigma) Vᴴ`.
    pub fn reconstruct(&self) -> Matrix<T> {
        let mut us = self.u.clone();
        for (j, &s) in self.sigma.iter().enumerate() {
            for x in us.col_mut(j) {
                *x = x.scale(s);
            }
        }
        us.matmul(&self.v.adjoint()).expect("factor shapes are consistent")
    }
}

pub fn svd<T: Scalar>(a: &Matrix<T>) -> Result<SvdFactors<T>> {
    if !a.is_finite() {
        return Err(Error::Size("SVD input has non-finite entries".into()));
    }
    if a.rows() < a.cols() {
        let t = svd_tall(&a.adjoint())?;
        return Ok(SvdFactors { u: t.v, sigma: t.sigma, v: t.u, rank: t.rank });
    }
    svd_tall(a)
}

fn svd_tall<T: Scalar>(a: &Matrix<T>) -> Result<SvdFactors<T>> {
    let (m, n) = (a.rows(), a.cols());
    let mut g = a.clone();
    let mut v = Matrix::<T>::identity(n);
    let tol = f64::EPSILON * m.max(2) as f64;
    // Columns below this squared norm are numerically zero and left alone;
    // otherwise they keep shrinking without ever passing the relative test.
    let negligible = (f64::EPSILON * f64::EPSILON) * a.frobenius_norm().powi(2);

    let mut converged = n < 2;
    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..n.saturating_sub(1) {
            for q in p + 1..n {
                let (gp, gq) = g.col_pair_mut(p, q);
                let mut alpha = 0.0;
                let mut beta = 0.0;
                let mut gamma = T::zero();
                for (&x, &y) in gp.iter().zip(gq.iter()) {
                    alpha += x.norm_sqr();
                    beta += y.norm_sqr();
                    gamma += x.conj() * y;
                }
                let gabs = gamma.abs();
                if gabs == 0.0 || alpha.min(beta) <= negligible || gabs <= tol * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                // Remove the phase of gamma from column q, then apply a real rotation.
                let e = gamma.unit_phase().conj();
                let zeta = (beta - alpha) / (2.0 * gabs);
                let t = if zeta >= 0.0 { 1.0 } else { -1.0 } / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                rotate(gp, gq, e, c, s);
                let (vp, vq) = v.col_pair_mut(p, q);
                rotate(vp, vq, e, c, s);
            }
        }
        if !rotated {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::NoConvergence { sweeps: MAX_SWEEPS });
    }

    let norms: Vec<f64> = (0..n).map(|j| g.col(j).iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()).collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| norms[j].total_cmp(&norms[i]).then(i.cmp(&j)));

    let sigma: Vec<f64> = order.iter().map(|&j| norms[j]).collect();
    let smax = sigma.first().copied().unwrap_or(0.0);
    let cutoff = smax * f64::EPSILON * m.max(n) as f64;
    let rank = sigma.iter().filter(|&&s| s > cutoff && s > 0.0).count();

    let mut u = Matrix::<T>::zeros(m, n);
    let mut vs = Matrix::<T>::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        vs.col_mut(dst).copy_from_slice(v.col(src));
        if dst < rank {
            let inv = 1.0 / norms[src];
            for (o, &x) in u.col_mut(dst).iter_mut().zip(g.col(src)) {
                *o = x.scale(inv);
            }
        }
    }
    orthonormalize(&mut u, rank);
    Ok(SvdFactors { u, sigma, v: vs, rank })
}

fn rotate<T: Scalar>(xp: &mut [T], xq: &mut [T], e: T, c: f64, s: f64) {
    for (a, b) in xp.iter_mut().zip(xq.iter_mut()) {
        let p = *a;
        let q = *b * e;
        *a = p.scale(c) - q.scale(s);
        *b = p.scale(s) + q.scale(c);
    }
}

fn dot<T: Scalar>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).fold(T::zero(), |acc, (&x, &y)| acc + x.conj() * y)
}

/// Subtracts from `x` its projection on the first `k` columns of `q`, twice.
fn project_out<T: Scalar>(q: &Matrix<T>, k: usize, x: &mut [T]) {
    for _ in 0..2 {
        for j in 0..k {
            let c = dot(q.col(j), x);
            for (xi, &qi) in x.iter_mut().zip(q.col(j)) {
                *xi -= qi * c;
            }
        }
    }
}

fn normalize<T: Scalar>(x: &mut [T]) -> f64 {
    let nrm = x.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
    if nrm > 0.0 {
        for v in x.iter_mut() {
            *v = v.scale(1.0 / nrm);
        }
    }
    nrm
}

/// Re-orthonormalises the first `valid` columns in order (Gram-Schmidt) and
/// fills the remaining columns with a deterministic orthonormal completion
/// drawn from the standard basis.
pub(crate) fn orthonormalize<T: Scalar>(u: &mut Matrix<T>, valid: usize) {
    let (m, n) = (u.rows(), u.cols());
    let mut filled = 0;
    for j in 0..valid {
        let mut x = u.col(j).to_vec();
        project_out(u, filled, &mut x);
        if normalize(&mut x) > 0.5 {
            u.col_mut(filled).copy_from_slice(&x);
            filled += 1;
        }
    }
    // Columns that collapsed during re-orthogonalisation are completed too,
    // keeping the ordering of the surviving ones.
    for j in filled..valid {
        u.col_mut(j).fill(T::zero());
    }
    while filled < n {
        let mut best: Option<(f64, Vec<T>)> = None;
        for i in 0..m {
            let mut x = vec![T::zero(); m];
            x[i] = T::one();
            project_out(u, filled, &mut x);
            let r = x.iter().map(|v| v.norm_sqr()).sum::<f64>();
            if best.as_ref().is_none_or(|(b, _)| r > *b + 1e-12) {
                best = Some((r, x));
            }
        }
        let (_, mut x) = best.expect("at least one candidate");
        normalize(&mut x);
        u.col_mut(filled).copy_from_slice(&x);
        filled += 1;
    }
}
