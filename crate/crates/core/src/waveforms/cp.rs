//! Cyclic prefix insertion and removal.

use crate::error::{Error, Result};

/// Prepends the last `l` samples of `x`.
pub fn add_cp<T: Copy>(x: &[T], l: usize) -> Result<Vec<T>> {
    if l >= x.len() && !(l == 0 && x.is_empty()) {
        return Err(Error::Config(format!("CP length {l} must be shorter than the block ({})", x.len())));
    }
    let mut out = Vec::with_capacity(x.len() + l);
    out.extend_from_slice(&x[x.len() - l..]);
    out.extend_from_slice(x);
    Ok(out)
}

/// Keeps the last `len - l` samples of `y`.
pub fn remove_cp<T: Copy>(y: &[T], l: usize) -> Result<Vec<T>> {
    if l >= y.len() {
        return Err(Error::Config(format!("CP length {l} must be shorter than the block ({})", y.len())));
    }
    Ok(y[l..].to_vec())
}
