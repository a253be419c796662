//! Monte Carlo campaign over runs, packets and noise levels.

use std::sync::Arc;

use rayon::prelude::*;

use crate::channel::{add_noise, bin_paths, convolve, realize_channel, ChannelKind, ChannelRealization};
use crate::error::{Error, Result};
use crate::frontend::Shaper;
use crate::link::config::LinkConfig;
use crate::link::packet::{receive, transmit, PacketStats, SchemeSetup};
use crate::link::report::{LinkReport, LinkRow, SchemeSummary};
use crate::link::seeds::{data_index, noise_index, stream, Purpose};
use crate::precoder::{Precoder, SpectralMask};
use crate::waveforms::{RxOps, Scheme};

/// Noise grid around the nominal received level of `cfg.channel`: from 50 dB
/// to 10 dB below the DC gain of the channel at its nominal position.
pub fn default_pn_grid(cfg: &LinkConfig) -> Vec<f64> {
    let reference = match cfg.channel {
        ChannelKind::Awgn => 0.0,
        kind => {
            let room = crate::channel::RoomGeometry { rx_xy: kind.rx_xy(), ..cfg.room() };
            20.0 * bin_paths(&room).iter().sum::<f64>().log10()
        }
    };
    (0..=40).map(|i| (reference - 50.0 + i as f64).round()).collect()
}

/// Schemes, shaper and noise grid ready to simulate.
pub struct Campaign {
    pub cfg: LinkConfig,
    pub shaper: Shaper,
    pub setups: Vec<SchemeSetup>,
    pub grid: Vec<f64>,
}

#[derive(Clone, Debug, Default)]
struct RunResult {
    /// Indexed by scheme, then noise level.
    stats: Vec<Vec<PacketStats>>,
    clipped: Vec<u64>,
    payload: Vec<u64>,
}

impl Campaign {
    pub fn prepare(cfg: &LinkConfig, precoder: Option<Arc<Precoder>>) -> Result<Self> {
        cfg.validate()?;
        let mask = SpectralMask::build(cfg.n, cfg.n_middle, cfg.n_edge)?;
        let precoder = match precoder {
            Some(p) if p.mask().m() == mask.m() => Some(p),
            Some(_) => return Err(Error::Config("precoder does not match the configured mask".into())),
            None if cfg.schemes.contains(&Scheme::Ucp) => Some(Arc::new(Precoder::synthesize(&mask)?)),
            None => None,
        };
        let shaper = Shaper::new(cfg.shaping)?;
        let setups = cfg
            .schemes
            .iter()
            .map(|&s| SchemeSetup::new(s, cfg, &mask, precoder.clone(), &shaper))
            .collect::<Result<Vec<_>>>()?;
        let grid = if cfg.pn_db.is_empty() { default_pn_grid(cfg) } else { cfg.pn_db.clone() };
        Ok(Self { cfg: cfg.clone(), shaper, setups, grid })
    }

    pub fn channel(&self, run: usize) -> Result<ChannelRealization> {
        let mut rng = stream(self.cfg.seed, run as u64, Purpose::Channel, 0);
        realize_channel(&self.cfg.room(), self.cfg.channel, self.cfg.cp, &mut rng)
    }

    fn run_one(&self, run: usize) -> Result<RunResult> {
        let cfg = &self.cfg;
        let ch = self.channel(run)?;
        let os = self.shaper.config().oversampling;
        let mut out = RunResult {
            stats: vec![vec![PacketStats::default(); self.grid.len()]; self.setups.len()],
            clipped: vec![0; self.setups.len()],
            payload: vec![0; self.setups.len()],
        };
        for (si, setup) in self.setups.iter().enumerate() {
            for packet in 0..cfg.packets_per_run {
                let mut rng = stream(cfg.seed, run as u64, Purpose::Data, data_index(packet, setup.scheme().id()));
                let tx = transmit(setup, &self.shaper, &cfg.frontend, cfg.payload_syms, &mut rng)?;
                out.clipped[si] += tx.clipped as u64;
                out.payload[si] += tx.payload_samples as u64;
                let clean = convolve(&tx.ac(), &ch.taps, os);
                for (pi, &pn) in self.grid.iter().enumerate() {
                    let mut y = clean.clone();
                    let mut noise = stream(cfg.seed, run as u64, Purpose::Noise, noise_index(packet, pi));
                    add_noise(&mut y, 10f64.powf(pn / 20.0), &mut noise);
                    let s = receive(setup, &self.shaper, &y, &tx)?;
                    out.stats[si][pi].merge(&s);
                }
            }
        }
        Ok(out)
    }

    /// Runs every Monte Carlo run and reduces them in run order, so results
    /// do not depend on the number of worker threads.
    pub fn run(&self) -> Result<LinkReport> {
        let work = || (0..self.cfg.runs).into_par_iter().map(|r| self.run_one(r)).collect::<Result<Vec<_>>>();
        let results = if self.cfg.threads > 0 {
            rayon::ThreadPoolBuilder::new()
                .num_threads(self.cfg.threads)
                .build()
                .map_err(|e| Error::Config(format!("thread pool: {e}")))?
                .install(work)?
        } else {
            work()?
        };
        let mut total = RunResult {
            stats: vec![vec![PacketStats::default(); self.grid.len()]; self.setups.len()],
            clipped: vec![0; self.setups.len()],
            payload: vec![0; self.setups.len()],
        };
        for r in &results {
            for si in 0..self.setups.len() {
                for pi in 0..self.grid.len() {
                    total.stats[si][pi].merge(&r.stats[si][pi]);
                }
                total.clipped[si] += r.clipped[si];
                total.payload[si] += r.payload[si];
            }
        }
        let mut rows = Vec::new();
        let mut schemes = Vec::new();
        for (si, setup) in self.setups.iter().enumerate() {
            let achieved = total.clipped[si] as f64 / total.payload[si].max(1) as f64;
            for (pi, &pn) in self.grid.iter().enumerate() {
                let s = &total.stats[si][pi];
                rows.push(LinkRow {
                    scheme: setup.scheme(),
                    channel: self.cfg.channel,
                    pn_db: pn,
                    ber: s.errors as f64 / s.bits.max(1) as f64,
                    bits: s.bits,
                    errors: s.errors,
                    evm_db: 10.0 * (s.error_energy / s.symbol_energy).log10(),
                    clip_prob: achieved,
                });
            }
            let s = &total.stats[si][0];
            let blocks = s.blocks.max(1);
            schemes.push(SchemeSummary {
                scheme: setup.scheme(),
                qam_order: setup.modem.qam().order(),
                gain: setup.gain,
                clip_target: setup.clip_target,
                calibration_clip_prob: setup.calibration_clip,
                achieved_clip_prob: achieved,
                mean_papr_db: setup.mean_papr_db,
                rx_ops_per_block: RxOps {
                    fft: s.ops.fft / blocks,
                    equalizer: s.ops.equalizer / blocks,
                    decode_macs: s.ops.decode_macs / blocks,
                    decode_adds: s.ops.decode_adds / blocks,
                },
            });
        }
        Ok(LinkReport { config: self.cfg.clone(), schemes, rows })
    }
}

/// Prepares and runs a campaign, synthesising the precoder if needed.
pub fn run_campaign(cfg: &LinkConfig) -> Result<LinkReport> {
    Campaign::prepare(cfg, None)?.run()
}
