//! Root-raised-cosine pulse shaping and matched filtering.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ShapingConfig {
    pub oversampling: usize,
    pub rolloff: f64,
    /// Filter half-length in low-rate samples.
    pub group_delay: usize,
}

impl Default for ShapingConfig {
    fn default() -> Self {
        Self { oversampling: 8, rolloff: 0.25, group_delay: 8 }
    }
}

impl ShapingConfig {
    pub fn validate(&self) -> Result<()> {
        if self.oversampling == 0 || self.group_delay == 0 {
            return Err(Error::Config("oversampling and group delay must be positive".into()));
        }
        if !(self.rolloff > 0.0 && self.rolloff <= 1.0) {
            return Err(Error::Config(format!("roll-off {} outside (0, 1]", self.rolloff)));
        }
        Ok(())
    }

    pub fn num_taps(&self) -> usize {
        2 * self.group_delay * self.oversampling + 1
    }

    /// Delay of TX filter followed by the matched filter, in high-rate samples.
    pub fn cascade_delay(&self) -> usize {
        2 * self.group_delay * self.oversampling
    }
}

/// Unnormalised RRC impulse response at `t` symbol periods.
pub fn rrc_value(t: f64, beta: f64) -> f64 {
    use std::f64::consts::PI;
    if t.abs() < 1e-12 {
        return 1.0 - beta + 4.0 * beta / PI;
    }
    if (t.abs() - 1.0 / (4.0 * beta)).abs() < 1e-12 {
        let a = PI / (4.0 * beta);
        return beta / 2f64.sqrt() * ((1.0 + 2.0 / PI) * a.sin() + (1.0 - 2.0 / PI) * a.cos());
    }
    let num = (PI * t * (1.0 - beta)).sin() + 4.0 * beta * t * (PI * t * (1.0 + beta)).cos();
    let den = PI * t * (1.0 - (4.0 * beta * t).powi(2));
    num / den
}

/// Unit-energy, symmetric RRC taps of length `2·D·OS + 1`.
pub fn rrc_taps(cfg: &ShapingConfig) -> Result<Vec<f64>> {
    cfg.validate()?;
    let os = cfg.oversampling as f64;
    let centre = (cfg.group_delay * cfg.oversampling) as f64;
    let raw: Vec<f64> = (0..cfg.num_taps()).map(|i| rrc_value((i as f64 - centre) / os, cfg.rolloff)).collect();
    let energy = raw.iter().map(|h| h * h).sum::<f64>().sqrt();
    Ok(raw.iter().map(|h| h / energy).collect())
}

/// Pulse shaper and matched filter sharing one tap set.
#[derive(Clone, Debug)]
pub struct Shaper {
    cfg: ShapingConfig,
    taps: Vec<f64>,
}

impl Shaper {
    pub fn new(cfg: ShapingConfig) -> Result<Self> {
        Ok(Self { cfg, taps: rrc_taps(&cfg)? })
    }

    pub fn config(&self) -> &ShapingConfig {
        &self.cfg
    }

    pub fn taps(&self) -> &[f64] {
        &self.taps
    }

    /// Sum of the taps (DC gain of one filter).
    pub fn dc_gain(&self) -> f64 {
        self.taps.iter().sum()
    }

    /// Upsamples by zero insertion and filters (full convolution).
    /// Output length is `len·OS + taps - 1`.
    pub fn shape(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.is_empty() {
            return Err(Error::Size("cannot shape an empty stream".into()));
        }
        let os = self.cfg.oversampling;
        let mut out = vec![0.0; x.len() * os + self.taps.len() - 1];
        for (m, &a) in x.iter().enumerate() {
            if a == 0.0 {
                continue;
            }
            for (o, &h) in out[m * os..m * os + self.taps.len()].iter_mut().zip(&self.taps) {
                *o += a * h;
            }
        }
        Ok(out)
    }

    /// Matched filter evaluated only at the symbol instants
    /// `cascade_delay + m·OS`, `m = 0..count`.
    pub fn matched_downsample(&self, y: &[f64], count: usize) -> Result<Vec<f64>> {
        if y.len() < self.taps.len() {
            return Err(Error::Size(format!(
                "stream of {} samples is shorter than the {}-tap filter",
                y.len(),
                self.taps.len()
            )));
        }
        let os = self.cfg.oversampling;
        let d = self.cfg.cascade_delay();
        Ok((0..count)
            .map(|m| {
                let i = d + m * os;
                // Full-convolution output i = Σ_j h[j] y[i - j].
                let mut acc = 0.0;
                for (j, &h) in self.taps.iter().enumerate() {
                    if let Some(v) = i.checked_sub(j).and_then(|t| y.get(t)) {
                        acc += h * v;
                    }
                }
                acc
            })
            .collect())
    }

    /// Full matched-filter output at the high rate.
    pub fn matched_filter(&self, y: &[f64]) -> Result<Vec<f64>> {
        if y.len() < self.taps.len() {
            return Err(Error::Size("stream shorter than the filter".into()));
        }
        let mut out = vec![0.0; y.len() + self.taps.len() - 1];
        for (i, &v) in y.iter().enumerate() {
            if v == 0.0 {
                continue;
            }
            for (o, &h) in out[i..i + self.taps.len()].iter_mut().zip(&self.taps) {
                *o += v * h;
            }
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    /// RRC evaluated straight from the textbook formula, with no special cases.
    fn closed_form(t: f64, beta: f64) -> f64 {
        use std::f64::consts::PI;
        ((PI * t * (1.0 - beta)).sin() + 4.0 * beta * t * (PI * t * (1.0 + beta)).cos())
            / (PI * t * (1.0 - (4.0 * beta * t).powi(2)))
    }

    #[test]
    fn taps_shape_and_energy() {
        let cfg = ShapingConfig::default();
        let h = rrc_taps(&cfg).unwrap();
        assert_eq!(h.len(), 129);
        assert!((h.iter().map(|v| v * v).sum::<f64>() - 1.0).abs() < 1e-12);
        for i in 0..h.len() {
            assert_eq!(h[i], h[h.len() - 1 - i]);
        }
        let centre = h[64];
        assert!(h.iter().enumerate().all(|(i, &v)| i == 64 || v < centre));
    }

    #[test]
    fn taps_match_closed_form_at_spot_indices() {
        let cfg = ShapingConfig::default();
        let h = rrc_taps(&cfg).unwrap();
        let raw: Vec<f64> = (0..129).map(|i| rrc_value((i as f64 - 64.0) / 8.0, 0.25)).collect();
        let norm = raw.iter().map(|v| v * v).sum::<f64>().sqrt();
        for i in [1usize, 30, 63, 65, 100] {
            let t = (i as f64 - 64.0) / 8.0;
            assert!((h[i] - closed_form(t, 0.25) / norm).abs() < 1e-12, "tap {i}");
        }
        // The removable singularity at t = 1/(4β) = 1 symbol equals the limit.
        let near = closed_form(1.0 + 1e-7, 0.25);
        assert!((rrc_value(1.0, 0.25) - near).abs() < 1e-6);
        let near0 = closed_form(1e-9, 0.25);
        assert!((rrc_value(0.0, 0.25) - near0).abs() < 1e-6);
    }

    #[test]
    fn raised_cosine_has_near_zero_isi() {
        let s = Shaper::new(ShapingConfig::default()).unwrap();
        let rc = s.matched_filter(s.taps()).unwrap();
        let centre = rc[128];
        for m in 1..16 {
            assert!(rc[128 + 8 * m].abs() < 1e-3 * centre, "ISI at lag {m}: {}", rc[128 + 8 * m]);
        }
    }

    #[test]
    fn impulse_in_taps_out_and_cascade_recovers_symbols() {
        let s = Shaper::new(ShapingConfig::default()).unwrap();
        let out = s.shape(&[1.0]).unwrap();
        assert_eq!(out.len(), 8 + 128);
        assert_eq!(&out[..129], s.taps());

        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let x: Vec<f64> = (0..400).map(|_| rng.random_range(-1.0..1.0)).collect();
        let y = s.shape(&x).unwrap();
        let back = s.matched_downsample(&y, x.len()).unwrap();
        let g = 2 * s.config().group_delay;
        let (err, sig) = (g..x.len() - g).fold((0.0, 0.0), |(e, p), i| (e + (back[i] - x[i]).powi(2), p + x[i] * x[i]));
        let evm_db = 10.0 * (err / sig).log10();
        // Truncation to ±8 symbols leaves a residual ISI floor; for i.i.d.
        // symbols the EVM equals the symbol-spaced raised-cosine tail energy.
        let rc = s.matched_filter(s.taps()).unwrap();
        let tail: f64 = (1..16).map(|m| rc[128 + 8 * m].powi(2) + rc[128 - 8 * m].powi(2)).sum();
        let floor_db = 10.0 * (tail / rc[128].powi(2)).log10();
        assert!((evm_db - floor_db).abs() < 1.5, "cascade EVM {evm_db} dB vs ISI floor {floor_db} dB");
        assert!(evm_db < -55.0, "cascade EVM {evm_db} dB");
        let full = s.matched_filter(&y).unwrap();
        assert!((full[s.config().cascade_delay() + 8 * 100] - back[100]).abs() < 1e-12);
    }

    #[test]
    fn short_streams_are_rejected() {
        let s = Shaper::new(ShapingConfig::default()).unwrap();
        assert!(s.shape(&[]).is_err());
        assert!(s.matched_downsample(&[0.0; 10], 1).is_err());
        assert!(ShapingConfig { rolloff: 0.0, ..Default::default() }.validate().is_err());
    }
}
