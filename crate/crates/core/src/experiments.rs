//! PAPR, baseline-wander, BER and clip-sweep experiments.

use std::sync::Arc;

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::channel::{apply_wander, std_dev, ChannelKind, WanderConfig};
use crate::error::{Error, Result};
use crate::frontend::{ccdf, ccdf_quantile, papr_windows, Shaper};
use crate::link::seeds::{stream, Purpose, SETUP_RUN};
use crate::link::{default_pn_grid, Campaign, LinkConfig, LinkReport};
use crate::precoder::{Precoder, SpectralMask};
use crate::waveforms::{Modem, Polarity, Scheme, SymbolBlock};

/// Generates `blocks` random blocks and returns their symbols together with
/// the concatenated low-rate samples.
fn random_blocks<R: Rng + ?Sized>(modem: &Modem, blocks: usize, rng: &mut R) -> Result<(Vec<SymbolBlock>, Vec<f64>)> {
    let mut syms = Vec::with_capacity(blocks);
    let mut low = Vec::with_capacity(blocks * modem.samples_per_block());
    for _ in 0..blocks {
        let bits: Vec<u8> = (0..modem.bits_per_block()).map(|_| rng.random_range(0..2u8)).collect();
        let (sym, tx) = modem.modulate_bits(&bits)?;
        low.extend(tx.samples);
        syms.push(sym);
    }
    Ok((syms, low))
}

fn precoder_for(mask: &SpectralMask, schemes: &[Scheme], given: Option<Arc<Precoder>>) -> Result<Option<Arc<Precoder>>> {
    match given {
        Some(p) if p.mask().m() == mask.m() => Ok(Some(p)),
        Some(_) => Err(Error::Config("precoder does not match the configured mask".into())),
        None if schemes.contains(&Scheme::Ucp) => Ok(Some(Arc::new(Precoder::synthesize(mask)?))),
        None => Ok(None),
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PaprConfig {
    pub schemes: Vec<Scheme>,
    /// OFDM symbols (CP-prefixed frames) per scheme.
    pub symbols: usize,
    pub qam_order: usize,
    /// Bias of bipolar schemes in standard deviations of the shaped signal.
    pub bias_sigmas: f64,
    /// CCDF grid in dB: start, stop, step.
    pub grid_db: [f64; 3],
}

impl Default for PaprConfig {
    fn default() -> Self {
        Self { schemes: Scheme::ALL.to_vec(), symbols: 10_000, qam_order: 16, bias_sigmas: 3.0, grid_db: [0.0, 20.0, 0.05] }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PaprCurve {
    pub scheme: Scheme,
    pub values_db: Vec<f64>,
    pub ccdf: Vec<f64>,
    /// PAPR exceeded with probability 1e-3.
    pub papr_at_1e3_db: f64,
    pub bias: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PaprReport {
    pub grid_db: Vec<f64>,
    pub curves: Vec<PaprCurve>,
}

impl PaprReport {
    pub fn curve(&self, s: Scheme) -> Option<&PaprCurve> {
        self.curves.iter().find(|c| c.scheme == s)
    }
}

/// Per-symbol PAPR of the shaped (and, for bipolar schemes, biased) signal.
/// Windows are aligned to symbol boundaries and skip the filter transients
/// at both ends of the stream.
pub fn run_papr(link: &LinkConfig, cfg: &PaprConfig, precoder: Option<Arc<Precoder>>) -> Result<PaprReport> {
    if cfg.symbols == 0 || cfg.schemes.is_empty() {
        return Err(Error::Config("PAPR experiment needs schemes and a positive symbol count".into()));
    }
    let [lo, hi, step] = cfg.grid_db;
    if !(step > 0.0 && hi > lo) {
        return Err(Error::Config("PAPR grid needs start < stop and a positive step".into()));
    }
    let grid: Vec<f64> = (0..=((hi - lo) / step).round() as usize).map(|i| lo + i as f64 * step).collect();
    let mask = SpectralMask::build(link.n, link.n_middle, link.n_edge)?;
    let precoder = precoder_for(&mask, &cfg.schemes, precoder)?;
    let shaper = Shaper::new(link.shaping)?;
    let os = link.shaping.oversampling;
    let frame = (link.n + link.cp) * os;
    let mut curves = Vec::new();
    for &scheme in &cfg.schemes {
        let modem = Modem::new(scheme, &mask, precoder.clone(), link.cp, cfg.qam_order)?;
        let blocks = cfg.symbols.div_ceil(scheme.frames_per_block());
        let mut rng = stream(link.seed, SETUP_RUN, Purpose::Experiment, scheme.id());
        // One guard block on each side absorbs the filter transients.
        let (_, low) = random_blocks(&modem, blocks + 2, &mut rng)?;
        let shaped = shaper.shape(&low)?;
        let start = link.shaping.group_delay * os + modem.samples_per_block() * os;
        let mut s = shaped[start..start + cfg.symbols * frame].to_vec();
        let bias = match scheme.polarity() {
            Polarity::Bipolar => cfg.bias_sigmas * std_dev(&s),
            Polarity::Unipolar => 0.0,
        };
        s.iter_mut().for_each(|v| *v += bias);
        let values_db = papr_windows(&s, frame)?.values_db;
        curves.push(PaprCurve {
            scheme,
            ccdf: ccdf(&values_db, &grid),
            papr_at_1e3_db: ccdf_quantile(&values_db, 1e-3)?,
            values_db,
            bias,
        });
    }
    Ok(PaprReport { grid_db: grid, curves })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct WanderExperiment {
    pub symbols: usize,
    pub qam_order: usize,
    /// Standard deviation of the shaped drive signal.
    pub signal_std: f64,
    pub bias: f64,
    pub pn_db: f64,
    /// Wander RMS relative to the signal standard deviation.
    pub rms_ratio: f64,
    pub period_syms: f64,
    pub phase: f64,
}

impl Default for WanderExperiment {
    fn default() -> Self {
        Self {
            symbols: 200,
            qam_order: 16,
            signal_std: 1.0 / 6.0,
            bias: 0.5,
            pn_db: -40.0,
            rms_ratio: 1.0,
            period_syms: 45.0,
            phase: 0.0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WanderTrace {
    pub scheme: Scheme,
    /// Received drive at the symbol rate (one sample per low-rate sample).
    pub waveform: Vec<f64>,
    pub constellation: Vec<Complex64>,
    pub evm_db: f64,
    pub symbol_errors: usize,
    pub bit_errors: usize,
    pub wander_rms: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WanderReport {
    pub config: WanderExperiment,
    pub traces: Vec<WanderTrace>,
}

impl WanderReport {
    pub fn trace(&self, s: Scheme) -> Option<&WanderTrace> {
        self.traces.iter().find(|t| t.scheme == s)
    }
}

/// BB against UCP-OFDM under a slow sinusoidal baseline drift in AWGN. The
/// receiver removes the known bias and equalizes the known flat gain; the
/// drift itself is left in place.
pub fn run_wander(link: &LinkConfig, cfg: &WanderExperiment, precoder: Option<Arc<Precoder>>) -> Result<WanderReport> {
    if cfg.symbols == 0 || !(cfg.signal_std > 0.0) || !cfg.pn_db.is_finite() {
        return Err(Error::Config("wander experiment needs symbols, a positive signal std and a finite noise power".into()));
    }
    let schemes = [Scheme::Bb, Scheme::Ucp];
    let mask = SpectralMask::build(link.n, link.n_middle, link.n_edge)?;
    let precoder = precoder_for(&mask, &schemes, precoder)?;
    let shaper = Shaper::new(link.shaping)?;
    let os = link.shaping.oversampling;
    let span = (link.n + link.cp) * os;
    let sigma = 10f64.powf(cfg.pn_db / 20.0);
    let mut traces = Vec::new();
    for scheme in schemes {
        let modem = Modem::new(scheme, &mask, precoder.clone(), link.cp, cfg.qam_order)?;
        let mut rng = stream(link.seed, SETUP_RUN, Purpose::Experiment, 16 + scheme.id());
        let (syms, low) = random_blocks(&modem, cfg.symbols, &mut rng)?;
        let shaped = shaper.shape(&low)?;
        let gain = cfg.signal_std / std_dev(&shaped);
        let drive: Vec<f64> = shaped.iter().map(|v| cfg.bias + gain * v).collect();
        let w = WanderConfig { rms: cfg.rms_ratio * std_dev(&drive), period_syms: cfg.period_syms, phase: cfg.phase };
        let mut rx = apply_wander(&drive, &w, span);
        let mut noise = stream(link.seed, SETUP_RUN, Purpose::Noise, 16 + scheme.id());
        for v in rx.iter_mut() {
            let z: f64 = noise.sample(StandardNormal);
            *v += sigma * z - cfg.bias;
        }
        let z = shaper.matched_downsample(&rx, low.len())?;
        let eq: Vec<Complex64> = modem.identity_equalizer().iter().map(|d| d / gain).collect();
        let spb = modem.samples_per_block();
        let (mut err, mut sig) = (0.0, 0.0);
        let (mut symbol_errors, mut bit_errors) = (0, 0);
        let mut constellation = Vec::new();
        for (i, sym) in syms.iter().enumerate() {
            let (x, bits) = modem.demodulate_bits(&z[i * spb..(i + 1) * spb], &eq)?;
            for (a, b) in x.iter().zip(&sym.x) {
                err += (a - b).norm_sqr();
                sig += b.norm_sqr();
                if modem.qam().slice(*a) != *b {
                    symbol_errors += 1;
                }
            }
            bit_errors += bits.iter().zip(&sym.bits).filter(|(a, b)| a != b).count();
            constellation.extend(x);
        }
        let delay = link.shaping.group_delay * os;
        let waveform = (0..low.len()).map(|m| rx[delay + m * os] + cfg.bias).collect();
        traces.push(WanderTrace {
            scheme,
            waveform,
            constellation,
            evm_db: 10.0 * (err / sig).log10(),
            symbol_errors,
            bit_errors,
            wander_rms: w.rms,
        });
    }
    Ok(WanderReport { config: cfg.clone(), traces })
}

/// One campaign per channel kind, sharing a precoder.
pub fn run_ber(cfg: &LinkConfig, channels: &[ChannelKind], precoder: Option<Arc<Precoder>>) -> Result<Vec<LinkReport>> {
    let mask = SpectralMask::build(cfg.n, cfg.n_middle, cfg.n_edge)?;
    let precoder = precoder_for(&mask, &cfg.schemes, precoder)?;
    channels
        .iter()
        .map(|&channel| Campaign::prepare(&LinkConfig { channel, ..cfg.clone() }, precoder.clone())?.run())
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ClipSweepConfig {
    /// Target clip probabilities to try; the same grid is used for every scheme.
    pub targets: Vec<f64>,
    /// Noise power of the sweep. `None` uses 20 dB below the channel's
    /// nominal received level.
    pub pn_db: Option<f64>,
    pub runs: usize,
}

impl Default for ClipSweepConfig {
    fn default() -> Self {
        // 1e-4 to 1e-1 in quarter decades.
        let targets = (0..=12).map(|i| 10f64.powf(-4.0 + 0.25 * i as f64)).collect();
        Self { targets, pn_db: None, runs: 10 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClipPoint {
    pub target: f64,
    pub achieved: f64,
    pub ber: f64,
    pub bits: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClipSweepCurve {
    pub scheme: Scheme,
    pub points: Vec<ClipPoint>,
    /// Target with the lowest BER (the smallest target on ties).
    pub best: ClipPoint,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClipSweepReport {
    pub pn_db: f64,
    pub curves: Vec<ClipSweepCurve>,
}

/// BER at a fixed noise power as a function of the clip-probability target.
pub fn run_clip_sweep(link: &LinkConfig, cfg: &ClipSweepConfig, precoder: Option<Arc<Precoder>>) -> Result<ClipSweepReport> {
    if cfg.targets.is_empty() || cfg.runs == 0 {
        return Err(Error::Config("clip sweep needs at least one target and one run".into()));
    }
    if let Some(t) = cfg.targets.iter().find(|t| !(**t > 0.0 && **t < 0.5)) {
        return Err(Error::Config(format!("clip target {t} outside (0, 0.5)")));
    }
    let pn = match cfg.pn_db {
        Some(v) => v,
        None => default_pn_grid(link)[30],
    };
    let mask = SpectralMask::build(link.n, link.n_middle, link.n_edge)?;
    let precoder = precoder_for(&mask, &link.schemes, precoder)?;
    let mut curves = Vec::new();
    for &scheme in &link.schemes {
        let mut points = Vec::new();
        for &target in &cfg.targets {
            let mut run = LinkConfig { schemes: vec![scheme], runs: cfg.runs, pn_db: vec![pn], ..link.clone() };
            run.clip_targets.set(scheme, target);
            let report = Campaign::prepare(&run, precoder.clone())?.run()?;
            let row = &report.rows[0];
            points.push(ClipPoint { target, achieved: row.clip_prob, ber: row.ber, bits: row.bits });
        }
        let best = points
            .iter()
            .min_by(|a, b| a.ber.total_cmp(&b.ber).then(a.target.total_cmp(&b.target)))
            .cloned()
            .expect("non-empty grid");
        curves.push(ClipSweepCurve { scheme, points, best });
    }
    Ok(ClipSweepReport { pn_db: pn, curves })
}
