//! Windowed PAPR statistics and empirical CCDFs.

use crate::error::{Error, Result};

/// PAPR values (dB) of consecutive non-overlapping windows.
#[derive(Clone, Debug, Default)]
pub struct PaprWindows {
    pub values_db: Vec<f64>,
    /// Windows with zero mean power, excluded from `values_db`.
    pub skipped: usize,
}

/// Splits `stream` into windows of `window` samples (a trailing partial
/// window is dropped) and returns `10·log10(max|x|² / mean|x|²)` per window.
pub fn papr_windows(stream: &[f64], window: usize) -> Result<PaprWindows> {
    if window == 0 {
        return Err(Error::Config("PAPR window must be positive".into()));
    }
    let mut out = PaprWindows::default();
    for w in stream.chunks_exact(window) {
        let power: Vec<f64> = w.iter().map(|v| v * v).collect();
        let mean = power.iter().sum::<f64>() / window as f64;
        if mean == 0.0 {
            out.skipped += 1;
            continue;
        }
        let peak = power.iter().cloned().fold(0.0, f64::max);
        out.values_db.push(10.0 * (peak / mean).log10());
    }
    Ok(out)
}

/// Empirical `P(X > x)` at each grid point.
pub fn ccdf(values: &[f64], grid: &[f64]) -> Vec<f64> {
    if values.is_empty() {
        return vec![0.0; grid.len()];
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    grid.iter()
        .map(|&x| {
            let at_or_below = sorted.partition_point(|&v| v <= x);
            (sorted.len() - at_or_below) as f64 / sorted.len() as f64
        })
        .collect()
}

/// Smallest sample value `x` with empirical `P(X > x) <= level`.
pub fn ccdf_quantile(values: &[f64], level: f64) -> Result<f64> {
    if values.is_empty() {
        return Err(Error::Size("no values for a CCDF quantile".into()));
    }
    if !(0.0..1.0).contains(&level) {
        return Err(Error::Config(format!("CCDF level {level} outside [0, 1)")));
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len();
    // At most floor(level·n) samples may exceed the answer.
    let allowed = (level * n as f64).floor() as usize;
    Ok(sorted[n - 1 - allowed.min(n - 1)])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_envelope_is_zero_db() {
        let w = papr_windows(&[1.0, -1.0, 1.0, -1.0, 1.0, -1.0], 3).unwrap();
        assert_eq!(w.values_db, vec![0.0, 0.0]);
    }

    #[test]
    fn single_spike_window() {
        let mut s = vec![0.0; 8];
        s[3] = 2.0;
        let w = papr_windows(&s, 8).unwrap();
        assert!((w.values_db[0] - 10.0 * 8f64.log10()).abs() < 1e-12);
    }

    #[test]
    fn zero_windows_are_skipped_and_partials_dropped() {
        let mut s = vec![0.0; 10];
        s[5] = 1.0;
        let w = papr_windows(&s, 4).unwrap();
        assert_eq!(w.skipped, 1);
        assert_eq!(w.values_db.len(), 1);
        assert!(papr_windows(&s, 0).is_err());
    }

    #[test]
    fn ccdf_and_quantile_agree() {
        let v: Vec<f64> = (0..1000).map(|i| i as f64).collect();
        let c = ccdf(&v, &[-1.0, 0.0, 499.5, 999.0]);
        assert_eq!(c, vec![1.0, 0.999, 0.5, 0.0]);
        let q = ccdf_quantile(&v, 1e-2).unwrap();
        assert_eq!(q, 989.0);
        assert!(ccdf(&v, &[q])[0] <= 1e-2);
        assert!(ccdf_quantile(&[], 0.1).is_err());
    }
}
