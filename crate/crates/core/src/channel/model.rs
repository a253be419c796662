//! Channel realizations and their application to high-rate streams.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::channel::geometry::{RoomGeometry, SPEED_OF_LIGHT};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ChannelKind {
    Awgn,
    Dlos,
    Ndlos,
}

impl ChannelKind {
    pub const ALL: [ChannelKind; 3] = [ChannelKind::Awgn, ChannelKind::Dlos, ChannelKind::Ndlos];

    pub fn name(self) -> &'static str {
        match self {
            ChannelKind::Awgn => "awgn",
            ChannelKind::Dlos => "dlos",
            ChannelKind::Ndlos => "ndlos",
        }
    }

    /// Nominal receiver position.
    pub fn rx_xy(self) -> [f64; 2] {
        match self {
            ChannelKind::Ndlos => [1.5, 1.5],
            _ => [0.0, 0.0],
        }
    }

    pub fn id(self) -> u64 {
        self as u64
    }
}

impl fmt::Display for ChannelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ChannelKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ChannelKind::ALL
            .into_iter()
            .find(|k| k.name() == s.to_ascii_lowercase())
            .ok_or_else(|| Error::Config(format!("unknown channel '{s}' (expected awgn, dlos or ndlos)")))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ChannelRealization {
    /// Symbol-rate impulse response.
    pub taps: Vec<f64>,
    pub noise_sigma: f64,
    pub kind: ChannelKind,
}

impl ChannelRealization {
    pub fn unit(kind: ChannelKind) -> Self {
        Self { taps: vec![1.0], noise_sigma: 0.0, kind }
    }

    /// Same taps with noise power `P_N = 20 log10 σ`.
    pub fn with_noise_db(&self, p_n_db: f64) -> Self {
        Self { noise_sigma: 10f64.powf(p_n_db / 20.0), ..self.clone() }
    }

    pub fn dc_gain(&self) -> f64 {
        self.taps.iter().sum()
    }
}

/// Direct and first-order reflected gains binned to the symbol-rate grid.
/// Delays are measured from the earliest path with nonzero gain.
pub fn bin_paths(geom: &RoomGeometry) -> Vec<f64> {
    let mut paths = geom.reflected_paths();
    let direct = geom.direct_path();
    if direct.gain > 0.0 {
        paths.push(direct);
    }
    let Some(first) = paths.iter().map(|p| p.length).min_by(f64::total_cmp) else {
        return vec![0.0];
    };
    let bin_len = SPEED_OF_LIGHT * geom.symbol_period;
    let mut taps: Vec<f64> = Vec::new();
    for p in &paths {
        let i = ((p.length - first) / bin_len).round() as usize;
        if taps.len() <= i {
            taps.resize(i + 1, 0.0);
        }
        taps[i] += p.gain * geom.tx_power;
    }
    taps
}

/// Draws one channel. Multipath kinds jitter the receiver uniformly by
/// `±geom.jitter` around the kind's nominal position. The tap span must fit
/// within a cyclic prefix of `cp` samples.
pub fn realize_channel<R: Rng + ?Sized>(
    geom: &RoomGeometry,
    kind: ChannelKind,
    cp: usize,
    rng: &mut R,
) -> Result<ChannelRealization> {
    if kind == ChannelKind::Awgn {
        return Ok(ChannelRealization::unit(kind));
    }
    let nominal = kind.rx_xy();
    let mut g = geom.clone();
    g.rx_xy = [
        nominal[0] + rng.random_range(-1.0..=1.0) * geom.jitter,
        nominal[1] + rng.random_range(-1.0..=1.0) * geom.jitter,
    ];
    g.validate()?;
    let taps = bin_paths(&g);
    if taps.len() > cp + 1 {
        return Err(Error::Config(format!(
            "channel spans {} symbol periods, more than the cyclic prefix of {cp}",
            taps.len() - 1
        )));
    }
    Ok(ChannelRealization { taps, noise_sigma: 0.0, kind })
}

/// Linear convolution with the symbol-rate taps placed every `oversampling`
/// high-rate samples. Output length is `len + (taps - 1)·OS`.
pub fn convolve(stream: &[f64], taps: &[f64], oversampling: usize) -> Vec<f64> {
    let os = oversampling.max(1);
    let mut out = vec![0.0; stream.len() + taps.len().saturating_sub(1) * os];
    for (j, &h) in taps.iter().enumerate() {
        if h == 0.0 {
            continue;
        }
        for (o, &v) in out[j * os..].iter_mut().zip(stream) {
            *o += h * v;
        }
    }
    out
}

/// Adds white Gaussian noise of standard deviation `sigma` in place.
pub fn add_noise<R: Rng + ?Sized>(stream: &mut [f64], sigma: f64, rng: &mut R) {
    if sigma == 0.0 {
        return;
    }
    for v in stream.iter_mut() {
        let z: f64 = StandardNormal.sample(rng);
        *v += sigma * z;
    }
}

/// Convolution with the channel followed by AWGN of `ch.noise_sigma` per sample.
pub fn apply_channel<R: Rng + ?Sized>(
    stream: &[f64],
    ch: &ChannelRealization,
    oversampling: usize,
    rng: &mut R,
) -> Vec<f64> {
    let mut out = convolve(stream, &ch.taps, oversampling);
    add_noise(&mut out, ch.noise_sigma, rng);
    out
}
