//! Unitary FFT with a centered frequency index.
//!
//! Vectors are stored in natural bin order `b = 0..N`. The centered index
//! `k = -N/2..N/2` maps to storage slot `b = k mod N`; [`centered_to_natural`]
//! and [`natural_to_centered`] are the only places that conversion happens.
//!
//! The inverse direction applies `F` with entries `exp(+j2πkn/N)/√N`, the
//! forward direction applies `Fᴴ`. Because `k ≡ b (mod N)` the centered and
//! natural kernels coincide, so only the storage order needs care.

use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Direction {
    /// Time to frequency (`Fᴴ`).
    Forward,
    /// Frequency to time (`F`).
    Inverse,
}

/// Storage slot of centered frequency index `k`.
pub fn centered_to_natural(k: i64, n: usize) -> usize {
    k.rem_euclid(n as i64) as usize
}

/// Centered frequency index of storage slot `b`.
pub fn natural_to_centered(b: usize, n: usize) -> i64 {
    if b < n / 2 {
        b as i64
    } else {
        b as i64 - n as i64
    }
}

fn check_len(n: usize) -> Result<()> {
    if n < 2 || !n.is_power_of_two() {
        return Err(Error::Size(format!("FFT length {n} is not an even power of two")));
    }
    Ok(())
}

/// Planned unitary transform of one length. Cheap to clone and share.
#[derive(Clone)]
pub struct UnitaryFft {
    n: usize,
    scale: f64,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl std::fmt::Debug for UnitaryFft {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("UnitaryFft").field("n", &self.n).finish()
    }
}

impl UnitaryFft {
    pub fn new(n: usize) -> Result<Self> {
        check_len(n)?;
        let mut planner = FftPlanner::new();
        Ok(Self {
            n,
            scale: 1.0 / (n as f64).sqrt(),
            forward: planner.plan_fft_forward(n),
            inverse: planner.plan_fft_inverse(n),
        })
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Transforms `buf` in place.
    pub fn process(&self, buf: &mut [Complex64], dir: Direction) -> Result<()> {
        if buf.len() != self.n {
            return Err(Error::Size(format!(
                "buffer of length {} given to a length-{} FFT",
                buf.len(),
                self.n
            )));
        }
        match dir {
            Direction::Forward => self.forward.process(buf),
            Direction::Inverse => self.inverse.process(buf),
        }
        for z in buf.iter_mut() {
            *z *= self.scale;
        }
        Ok(())
    }

    /// Frequency-domain image (natural order) of a real time block.
    pub fn forward_real(&self, x: &[f64]) -> Result<Vec<Complex64>> {
        let mut buf: Vec<Complex64> = x.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        self.process(&mut buf, Direction::Forward)?;
        Ok(buf)
    }
}

/// One-shot unitary transform of `x` (natural bin order).
pub fn fft_unitary(x: &[Complex64], dir: Direction) -> Result<Vec<Complex64>> {
    let plan = UnitaryFft::new(x.len())?;
    let mut buf = x.to_vec();
    plan.process(&mut buf, dir)?;
    Ok(buf)
}
