//! Sinusoidal baseline wander.

use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct WanderConfig {
    /// RMS of the added sinusoid.
    pub rms: f64,
    /// Period in OFDM symbols.
    pub period_syms: f64,
    pub phase: f64,
}

impl Default for WanderConfig {
    fn default() -> Self {
        Self { rms: 0.0, period_syms: 45.0, phase: 0.0 }
    }
}

/// Adds `√2·rms·sin(2πt/T + phase)` with `T = period_syms·symbol_span` samples.
pub fn apply_wander(stream: &[f64], w: &WanderConfig, symbol_span: usize) -> Vec<f64> {
    if w.rms == 0.0 {
        return stream.to_vec();
    }
    let period = w.period_syms * symbol_span as f64;
    let amp = 2f64.sqrt() * w.rms;
    stream
        .iter()
        .enumerate()
        .map(|(t, &v)| v + amp * (2.0 * std::f64::consts::PI * t as f64 / period + w.phase).sin())
        .collect()
}

/// Population standard deviation.
pub fn std_dev(x: &[f64]) -> f64 {
    if x.is_empty() {
        return 0.0;
    }
    let mean = x.iter().sum::<f64>() / x.len() as f64;
    (x.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / x.len() as f64).sqrt()
}
