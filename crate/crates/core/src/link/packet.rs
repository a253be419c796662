//! One packet through the transmit and receive chains.

use std::sync::Arc;

use rand::Rng;

use crate::error::{Error, Result};
use crate::frontend::{calibrate_gain, clip_probability, papr_windows, FrontEndConfig, Shaper};
use crate::link::config::LinkConfig;
use crate::link::equalizer::estimate_channel;
use crate::link::seeds::{stream, Purpose, SETUP_RUN};
use crate::precoder::{Precoder, SpectralMask};
use crate::waveforms::{add_cp, zadoff_chu_preamble, Modem, Polarity, Preamble, RxOps, Scheme, SymbolBlock};

/// Per-scheme state fixed for a whole campaign.
#[derive(Clone, Debug)]
pub struct SchemeSetup {
    pub modem: Modem,
    pub preamble: Preamble,
    /// Training block with its CP.
    pub preamble_cp: Vec<f64>,
    /// Amplitude scale of the payload.
    pub gain: f64,
    /// Amplitude scale of the preamble, chosen so that it never clips.
    pub preamble_gain: f64,
    pub clip_target: f64,
    /// Clip probability reached on the calibration stream.
    pub calibration_clip: f64,
    pub mean_papr_db: f64,
}

fn random_bits<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Vec<u8> {
    (0..n).map(|_| rng.random_range(0..2u8)).collect()
}

impl SchemeSetup {
    pub fn new(
        scheme: Scheme,
        cfg: &LinkConfig,
        mask: &SpectralMask,
        precoder: Option<Arc<Precoder>>,
        shaper: &Shaper,
    ) -> Result<Self> {
        let modem = Modem::new(scheme, mask, precoder, cfg.cp, cfg.qam_order(scheme))?;
        let preamble = zadoff_chu_preamble(modem.mask(), cfg.zc_root)?;
        let preamble_cp = add_cp(&preamble.time, cfg.cp)?;
        let fe = cfg.frontend;
        let headroom = (fe.range_hi - fe.bias).min(fe.bias - fe.range_lo);
        let peak = shaper.shape(&preamble_cp)?.iter().map(|v| v.abs()).fold(0.0, f64::max);
        let preamble_gain = 0.9 * headroom / peak;

        let os = shaper.config().oversampling;
        let spb = modem.samples_per_block();
        let blocks = cfg.calibration_samples.div_ceil(spb * os) + 2;
        let mut rng = stream(cfg.seed, SETUP_RUN, Purpose::Calibration, scheme.id());
        let mut low = Vec::with_capacity(blocks * spb);
        for _ in 0..blocks {
            let bits = random_bits(&mut rng, modem.bits_per_block());
            low.extend(modem.modulate_bits(&bits)?.1.samples);
        }
        let shaped = shaper.shape(&low)?;
        // Symbol m peaks at m·OS + D·OS; drop the first and last block.
        let start = shaper.config().group_delay * os + spb * os;
        let stream = &shaped[start..start + (blocks - 2) * spb * os];
        let target = cfg.clip_targets.get(scheme);
        let gain = calibrate_gain(stream, &fe, target, scheme.polarity())?;
        let calibration_clip = clip_probability(stream, &fe, gain, scheme.polarity());
        let windows = papr_windows(stream, (cfg.n + cfg.cp) * os)?;
        let mean_papr_db = windows.values_db.iter().sum::<f64>() / windows.values_db.len().max(1) as f64;
        Ok(Self { modem, preamble, preamble_cp, gain, preamble_gain, clip_target: target, calibration_clip, mean_papr_db })
    }

    pub fn scheme(&self) -> Scheme {
        self.modem.scheme()
    }
}

/// Transmitted packet at the high rate.
#[derive(Clone, Debug)]
pub struct PacketTx {
    /// Optical drive after biasing and clipping. Unipolar payloads are
    /// clipped at the upper limit only.
    pub optical: Vec<f64>,
    /// Bias component of `optical` before clipping.
    pub bias: Vec<f64>,
    pub blocks: Vec<SymbolBlock>,
    /// Low-rate samples in the packet (preamble included).
    pub low_len: usize,
    pub clipped: usize,
    pub payload_samples: usize,
}

impl PacketTx {
    /// Signal part of the optical drive, which the receiver sees after
    /// removing the known bias response.
    pub fn ac(&self) -> Vec<f64> {
        self.optical.iter().zip(&self.bias).map(|(o, b)| o - b).collect()
    }
}

/// Builds preamble plus `blocks` payload blocks, shapes, biases and clips.
pub fn transmit<R: Rng + ?Sized>(
    setup: &SchemeSetup,
    shaper: &Shaper,
    fe: &FrontEndConfig,
    blocks: usize,
    rng: &mut R,
) -> Result<PacketTx> {
    let modem = &setup.modem;
    let mut low: Vec<f64> = setup.preamble_cp.iter().map(|v| v * setup.preamble_gain).collect();
    let pre_len = low.len();
    let mut symbols = Vec::with_capacity(blocks);
    for _ in 0..blocks {
        let bits = random_bits(rng, modem.bits_per_block());
        let (sym, tx) = modem.modulate_bits(&bits)?;
        low.extend(tx.samples.iter().map(|v| v * setup.gain));
        symbols.push(sym);
    }
    let shaped = shaper.shape(&low)?;
    let os = shaper.config().oversampling;
    let delay = shaper.config().group_delay * os;
    // Unipolar payloads carry no bias; their preamble is still sent biased.
    let bias_end = match setup.scheme().polarity() {
        Polarity::Bipolar => shaped.len(),
        Polarity::Unipolar => pre_len * os + delay,
    };
    let bias: Vec<f64> = (0..shaped.len()).map(|i| if i < bias_end { fe.bias } else { 0.0 }).collect();
    let payload = pre_len * os + delay..low.len() * os + delay;
    let mut clipped = 0;
    let optical = shaped
        .iter()
        .zip(&bias)
        .enumerate()
        .map(|(i, (&s, &b))| {
            let v = b + s;
            let clips = match setup.scheme().polarity() {
                Polarity::Bipolar => v > fe.range_hi || v < fe.range_lo,
                Polarity::Unipolar => v > fe.range_hi,
            };
            if clips && payload.contains(&i) {
                clipped += 1;
            }
            match setup.scheme().polarity() {
                Polarity::Bipolar => v.clamp(fe.range_lo, fe.range_hi),
                Polarity::Unipolar if i < bias_end => v.clamp(fe.range_lo, fe.range_hi),
                Polarity::Unipolar => v.min(fe.range_hi),
            }
        })
        .collect();
    Ok(PacketTx { optical, bias, blocks: symbols, low_len: low.len(), clipped, payload_samples: payload.len() })
}

/// Error and distortion tallies of one received packet.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct PacketStats {
    pub bits: u64,
    pub errors: u64,
    pub error_energy: f64,
    pub symbol_energy: f64,
    pub blocks: u64,
    pub ops: RxOps,
}

impl PacketStats {
    pub fn merge(&mut self, o: &PacketStats) {
        self.bits += o.bits;
        self.errors += o.errors;
        self.error_energy += o.error_energy;
        self.symbol_energy += o.symbol_energy;
        self.blocks += o.blocks;
        self.ops.fft += o.ops.fft;
        self.ops.equalizer += o.ops.equalizer;
        self.ops.decode_macs += o.ops.decode_macs;
        self.ops.decode_adds += o.ops.decode_adds;
    }
}

/// Matched filter, symbol-rate sampling at the known delay, preamble-based
/// equalization and demodulation. `rx` is the high-rate received stream with
/// the bias response already removed.
pub fn receive(setup: &SchemeSetup, shaper: &Shaper, rx: &[f64], tx: &PacketTx) -> Result<PacketStats> {
    let modem = &setup.modem;
    let z = shaper.matched_downsample(rx, tx.low_len)?;
    let pre_len = setup.preamble_cp.len();
    let eq = estimate_channel(&z[modem.cp()..pre_len], &setup.preamble.training, modem.mask(), modem.fft())?
        .scaled(setup.preamble_gain / setup.gain);
    let spb = modem.samples_per_block();
    if z.len() != pre_len + tx.blocks.len() * spb {
        return Err(Error::Size("received packet length does not match the transmitted one".into()));
    }
    let mut stats = PacketStats::default();
    for (i, sym) in tx.blocks.iter().enumerate() {
        let frame = &z[pre_len + i * spb..pre_len + (i + 1) * spb];
        let x = modem.demodulate_counted(frame, &eq.d, &mut stats.ops)?;
        let bits = modem.qam().demap(&x);
        stats.errors += bits.iter().zip(&sym.bits).filter(|(a, b)| a != b).count() as u64;
        stats.bits += sym.bits.len() as u64;
        for (a, b) in x.iter().zip(&sym.x) {
            stats.error_energy += (a - b).norm_sqr();
            stats.symbol_energy += b.norm_sqr();
        }
        stats.blocks += 1;
    }
    Ok(stats)
}
