//! Hermitian-symmetric Zadoff-Chu training block.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::numerics::{centered_to_natural, Direction, UnitaryFft};
use crate::precoder::SpectralMask;

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// `exp(-jπ u n(n+1)/L)` for odd `L`, `exp(-jπ u n²/L)` for even `L`.
pub fn zadoff_chu(len: usize, root: usize) -> Result<Vec<Complex64>> {
    if len == 0 || root == 0 || root >= len.max(2) || gcd(root, len) != 1 {
        return Err(Error::Config(format!("root {root} is not coprime with sequence length {len}")));
    }
    let odd = len % 2 == 1;
    Ok((0..len)
        .map(|n| {
            let m = if odd { n * (n + 1) } else { n * n };
            // Reduce mod 2L before the float multiply to keep the phase exact.
            let arg = (root * m) % (2 * len);
            Complex64::from_polar(1.0, -std::f64::consts::PI * arg as f64 / len as f64)
        })
        .collect())
}

/// Training spectrum (natural bin order) and its real time-domain block.
#[derive(Clone, Debug)]
pub struct Preamble {
    pub training: Vec<Complex64>,
    pub time: Vec<f64>,
}

/// Lays a ZC sequence on the active bins `k > 0` and mirrors it conjugated
/// onto `-k`. Self-mirrored active bins (`0`, `-N/2`) get the real value 1.
pub fn zadoff_chu_preamble(mask: &SpectralMask, root: usize) -> Result<Preamble> {
    let n = mask.n_total();
    let positive: Vec<i64> = mask.active_set().into_iter().filter(|&k| k > 0).collect();
    let mut training = vec![Complex64::new(0.0, 0.0); n];
    if !positive.is_empty() {
        let seq = zadoff_chu(positive.len(), root)?;
        for (&k, &z) in positive.iter().zip(&seq) {
            training[centered_to_natural(k, n)] = z;
            training[centered_to_natural(-k, n)] = z.conj();
        }
    }
    for k in [0, -(n as i64) / 2] {
        if mask.is_active(k) {
            training[centered_to_natural(k, n)] = Complex64::new(1.0, 0.0);
        }
    }
    let mut buf = training.clone();
    UnitaryFft::new(n)?.process(&mut buf, Direction::Inverse)?;
    let imag = buf.iter().map(|z| z.im.abs()).fold(0.0, f64::max);
    if imag > 1e-12 {
        return Err(Error::Config(format!("training block is not real: {imag:e}")));
    }
    Ok(Preamble { training, time: buf.iter().map(|z| z.re).collect() })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn length_seven_table() {
        let z = zadoff_chu(7, 1).unwrap();
        for (n, v) in z.iter().enumerate() {
            let want = Complex64::from_polar(1.0, -std::f64::consts::PI * (n * (n + 1)) as f64 / 7.0);
            assert!((v - want).norm() < 1e-12, "n = {n}");
        }
    }

    #[test]
    fn invalid_roots() {
        assert!(zadoff_chu(8, 2).is_err());
        assert!(zadoff_chu(7, 0).is_err());
        assert!(zadoff_chu(7, 7).is_err());
        assert!(zadoff_chu(127, 3).is_ok());
    }

    #[test]
    fn preamble_is_flat_hermitian_and_real() {
        let mask = SpectralMask::build(256, 0, 0).unwrap();
        let p = zadoff_chu_preamble(&mask, 1).unwrap();
        for b in 0..256 {
            let mag = p.training[b].norm();
            if mask.bin_active(b) {
                assert!((mag - 1.0).abs() < 1e-12);
                assert!((p.training[b] - p.training[(256 - b) % 256].conj()).norm() < 1e-12);
            } else {
                assert_eq!(mag, 0.0);
            }
        }
        assert_eq!(p.time.len(), 256);
    }

    #[test]
    fn all_active_preamble_covers_every_bin() {
        let p = zadoff_chu_preamble(&SpectralMask::all_active(64).unwrap(), 1).unwrap();
        assert!(p.training.iter().all(|z| (z.norm() - 1.0).abs() < 1e-12));
    }
}
