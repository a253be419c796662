//! Campaign results and BER-curve helpers.

use serde::{Deserialize, Serialize};

use crate::channel::ChannelKind;
use crate::link::config::LinkConfig;
use crate::waveforms::{RxOps, Scheme};

pub const CSV_VERSION: u32 = 1;
pub const CSV_COLUMNS: &str = "scheme,channel,pn_db,ber,bits,errors,evm_db,clip_prob";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LinkRow {
    pub scheme: Scheme,
    pub channel: ChannelKind,
    pub pn_db: f64,
    pub ber: f64,
    pub bits: u64,
    pub errors: u64,
    pub evm_db: f64,
    /// Clip probability measured on the transmitted payloads.
    pub clip_prob: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SchemeSummary {
    pub scheme: Scheme,
    pub qam_order: usize,
    pub gain: f64,
    pub clip_target: f64,
    pub calibration_clip_prob: f64,
    pub achieved_clip_prob: f64,
    pub mean_papr_db: f64,
    /// Receive-side operation counts for one payload block.
    pub rx_ops_per_block: RxOps,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LinkReport {
    pub config: LinkConfig,
    pub schemes: Vec<SchemeSummary>,
    pub rows: Vec<LinkRow>,
}

impl LinkReport {
    /// One row per scheme and noise level, without header comments.
    pub fn csv_body(&self) -> String {
        let mut out = String::from(CSV_COLUMNS);
        out.push('\n');
        for r in &self.rows {
            out.push_str(&format!(
                "{},{},{},{:e},{},{},{},{:e}\n",
                r.scheme, r.channel, r.pn_db, r.ber, r.bits, r.errors, r.evm_db, r.clip_prob
            ));
        }
        out
    }

    /// `(P_N, BER, bits)` points of one scheme, ascending in noise power.
    pub fn curve(&self, scheme: Scheme) -> Vec<(f64, f64, u64)> {
        let mut c: Vec<_> =
            self.rows.iter().filter(|r| r.scheme == scheme).map(|r| (r.pn_db, r.ber, r.bits)).collect();
        c.sort_by(|a, b| a.0.total_cmp(&b.0));
        c
    }

    pub fn summary(&self, scheme: Scheme) -> Option<&SchemeSummary> {
        self.schemes.iter().find(|s| s.scheme == scheme)
    }
}

/// Largest noise power at which the curve reaches `target`, interpolating
/// `log10 BER` linearly between grid points. Zero-error points count as half
/// an error. `None` if the curve never gets down to `target`.
pub fn ber_crossing_db(curve: &[(f64, f64, u64)], target: f64) -> Option<f64> {
    let lg = |ber: f64, bits: u64| ber.max(0.5 / bits.max(1) as f64).log10();
    let t = target.log10();
    for i in (0..curve.len()).rev() {
        let (x0, b0, n0) = curve[i];
        if lg(b0, n0) > t {
            continue;
        }
        let Some(&(x1, b1, n1)) = curve.get(i + 1) else {
            return Some(x0);
        };
        let (y0, y1) = (lg(b0, n0), lg(b1, n1));
        return Some(if y1 == y0 { x0 } else { x0 + (t - y0) / (y1 - y0) * (x1 - x0) });
    }
    None
}

/// Noise margin of `a` over `b` at `target` BER, in dB: positive when `a`
/// reaches the target at a higher noise power.
pub fn horizontal_gap_db(report: &LinkReport, a: Scheme, b: Scheme, target: f64) -> Option<f64> {
    Some(ber_crossing_db(&report.curve(a), target)? - ber_crossing_db(&report.curve(b), target)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn crossing_interpolates_in_log_ber() {
        let c = vec![(-30.0, 1e-5, 1_000_000), (-20.0, 1e-4, 1_000_000), (-10.0, 1e-2, 1_000_000)];
        let x = ber_crossing_db(&c, 1e-3).unwrap();
        assert!((x + 15.0).abs() < 1e-12);
        assert_eq!(ber_crossing_db(&c, 1e-6), None);
        assert_eq!(ber_crossing_db(&c, 0.1), Some(-10.0));
    }

    #[test]
    fn zero_error_points_are_floored() {
        let c = vec![(-30.0, 0.0, 1000), (-20.0, 1e-1, 1000)];
        let x = ber_crossing_db(&c, 1e-2).unwrap();
        assert!(x > -30.0 && x < -20.0);
    }
}
