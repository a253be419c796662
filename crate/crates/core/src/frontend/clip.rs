//! DC biasing, dynamic-range clipping and clip-probability calibration.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::waveforms::Polarity;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct FrontEndConfig {
    pub range_lo: f64,
    pub range_hi: f64,
    /// DC level added to bipolar signals.
    pub bias: f64,
    pub gain: f64,
    pub target_clip_prob: f64,
}

impl Default for FrontEndConfig {
    fn default() -> Self {
        Self { range_lo: 0.0, range_hi: 1.0, bias: 0.5, gain: 1.0, target_clip_prob: 1e-2 }
    }
}

impl FrontEndConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.range_lo < self.bias && self.bias < self.range_hi) {
            return Err(Error::Config(format!(
                "bias {} must lie strictly inside [{}, {}]",
                self.bias, self.range_lo, self.range_hi
            )));
        }
        if !(self.target_clip_prob > 0.0 && self.target_clip_prob < 0.5) {
            return Err(Error::Config(format!("clip probability {} outside (0, 0.5)", self.target_clip_prob)));
        }
        if !(self.gain.is_finite() && self.gain >= 0.0) {
            return Err(Error::Config(format!("gain {} must be finite and nonnegative", self.gain)));
        }
        Ok(())
    }

    /// Optical-domain value of one electrical sample. Unipolar signals are
    /// clipped only at the upper limit; their zero clipping happened before
    /// pulse shaping.
    pub fn drive(&self, s: f64, polarity: Polarity) -> f64 {
        match polarity {
            Polarity::Bipolar => (self.bias + self.gain * s).clamp(self.range_lo, self.range_hi),
            Polarity::Unipolar => (self.gain * s).min(self.range_hi),
        }
    }

    /// Whether a sample is clipped. Unipolar signals count only the upper
    /// limit, since their lower clipping at zero is part of the modulation.
    fn clips(&self, gain: f64, s: f64, polarity: Polarity) -> bool {
        match polarity {
            Polarity::Bipolar => {
                let v = self.bias + gain * s;
                v > self.range_hi || v < self.range_lo
            }
            Polarity::Unipolar => gain * s > self.range_hi,
        }
    }
}

/// `clip(bias + gain·s)` for bipolar, `min(gain·s, range_hi)` for unipolar schemes.
pub fn scale_and_bias(stream: &[f64], fe: &FrontEndConfig, polarity: Polarity) -> Vec<f64> {
    stream.iter().map(|&s| fe.drive(s, polarity)).collect()
}

/// Fraction of samples that hit the dynamic-range limits at `gain`.
pub fn clip_probability(stream: &[f64], fe: &FrontEndConfig, gain: f64, polarity: Polarity) -> f64 {
    if stream.is_empty() {
        return 0.0;
    }
    stream.iter().filter(|&&s| fe.clips(gain, s, polarity)).count() as f64 / stream.len() as f64
}

/// Gain at which the empirical clip probability of `stream` meets `target`,
/// by bisection in log-gain over the monotone empirical curve.
pub fn calibrate_gain(stream: &[f64], fe: &FrontEndConfig, target: f64, polarity: Polarity) -> Result<f64> {
    if !(target > 0.0 && target < 0.5) {
        return Err(Error::Calibration(format!("target clip probability {target} outside (0, 0.5)")));
    }
    let peak = stream.iter().map(|v| v.abs()).fold(0.0, f64::max);
    if peak == 0.0 {
        return Err(Error::Calibration("zero-variance stream never clips".into()));
    }
    // Probability reachable as the gain grows without bound.
    let reachable = clip_probability(stream, fe, 1e300 / peak.max(1.0), polarity);
    if target >= reachable {
        return Err(Error::Calibration(format!(
            "target {target:e} exceeds the largest achievable clip probability {reachable:e}"
        )));
    }
    let headroom = match polarity {
        Polarity::Bipolar => (fe.range_hi - fe.bias).min(fe.bias - fe.range_lo),
        Polarity::Unipolar => fe.range_hi,
    };
    // Nothing clips at `lo`; grow `hi` until the target is met.
    let mut lo = (headroom / peak).ln() - 1.0;
    let mut hi = lo + 1.0;
    while clip_probability(stream, fe, hi.exp(), polarity) < target {
        hi += 2.0;
        if hi > 700.0 {
            return Err(Error::Calibration("bisection bracket not found".into()));
        }
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if clip_probability(stream, fe, mid.exp(), polarity) < target {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-12 {
            break;
        }
    }
    Ok(hi.exp())
}
