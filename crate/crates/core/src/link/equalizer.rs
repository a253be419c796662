//! Preamble-based zero-forcing equalizer.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::numerics::{natural_to_centered, UnitaryFft};
use crate::precoder::SpectralMask;

/// Relative magnitude below which an active bin is treated as a spectral null.
pub const SINGULAR_REL: f64 = 1e-12;

/// Diagonal of `D` in natural bin order; null bins hold 0.
#[derive(Clone, Debug, PartialEq)]
pub struct Equalizer {
    pub d: Vec<Complex64>,
}

impl Equalizer {
    pub fn scaled(&self, f: f64) -> Self {
        Self { d: self.d.iter().map(|z| z * f).collect() }
    }
}

/// `d[k] = training[k] / rx[k]` on active bins of `mask`. `preamble_rx` is
/// the received training block with the CP removed.
pub fn estimate_channel(
    preamble_rx: &[f64],
    training: &[Complex64],
    mask: &SpectralMask,
    fft: &UnitaryFft,
) -> Result<Equalizer> {
    let n = mask.n_total();
    if preamble_rx.len() != n || training.len() != n {
        return Err(Error::Size(format!("training block must have {n} samples")));
    }
    let rx = fft.forward_real(preamble_rx)?;
    let peak = (0..n).filter(|&b| mask.bin_active(b)).map(|b| rx[b].norm()).fold(0.0, f64::max);
    let mut d = vec![Complex64::new(0.0, 0.0); n];
    for b in (0..n).filter(|&b| mask.bin_active(b)) {
        let mag = rx[b].norm();
        if !(mag > SINGULAR_REL * peak) || training[b].norm() == 0.0 {
            return Err(Error::Equalization { bin: natural_to_centered(b, n), magnitude: mag });
        }
        d[b] = training[b] / rx[b];
    }
    Ok(Equalizer { d })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::waveforms::zadoff_chu_preamble;

    fn circular(x: &[f64], taps: &[f64]) -> Vec<f64> {
        let n = x.len();
        (0..n).map(|t| taps.iter().enumerate().map(|(j, h)| h * x[(t + n - j) % n]).sum()).collect()
    }

    #[test]
    fn flat_gain_is_inverted() {
        let mask = SpectralMask::build(64, 0, 0).unwrap();
        let fft = UnitaryFft::new(64).unwrap();
        let pre = zadoff_chu_preamble(&mask, 1).unwrap();
        let rx: Vec<f64> = pre.time.iter().map(|v| 0.25 * v).collect();
        let eq = estimate_channel(&rx, &pre.training, &mask, &fft).unwrap();
        for b in 0..64 {
            if mask.bin_active(b) {
                assert!((eq.d[b] - 4.0).norm() < 1e-12);
            } else {
                assert_eq!(eq.d[b], Complex64::new(0.0, 0.0));
            }
        }
    }

    #[test]
    fn two_tap_channel_is_inverted() {
        let n = 64;
        let mask = SpectralMask::build(n, 0, 0).unwrap();
        let fft = UnitaryFft::new(n).unwrap();
        let pre = zadoff_chu_preamble(&mask, 1).unwrap();
        let taps = [0.8, -0.3];
        let eq = estimate_channel(&circular(&pre.time, &taps), &pre.training, &mask, &fft).unwrap();
        let mut h = vec![0.0; n];
        h[..2].copy_from_slice(&taps);
        let hf = fft.forward_real(&h).unwrap();
        for b in (0..n).filter(|&b| mask.bin_active(b)) {
            let product = eq.d[b] * hf[b] * (n as f64).sqrt();
            assert!((product - 1.0).norm() < 1e-9);
        }
    }

    #[test]
    fn spectral_null_is_reported() {
        let n = 16;
        let mask = SpectralMask::build(n, 0, 0).unwrap();
        let fft = UnitaryFft::new(n).unwrap();
        let pre = zadoff_chu_preamble(&mask, 1).unwrap();
        // 1 + z^-2 vanishes at k = ±N/4.
        let rx = circular(&pre.time, &[1.0, 0.0, 1.0]);
        match estimate_channel(&rx, &pre.training, &mask, &fft) {
            Err(Error::Equalization { bin, .. }) => assert_eq!(bin.abs(), 4),
            other => panic!("expected an equalization error, got {other:?}"),
        }
    }
}
