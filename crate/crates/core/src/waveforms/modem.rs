//! Block modulators and demodulators for the five schemes.
//!
//! Every modulator returns real samples with the cyclic prefix already
//! attached. Demodulators take the received block (CP included), strip the
//! prefix, apply the per-bin equalizer `d` (natural bin order) and return the
//! constellation estimates.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{centered_to_natural, Direction, UnitaryFft};
use crate::precoder::{OpTally, Precoder, SpectralMask};
use crate::waveforms::cp::{add_cp, remove_cp};
use crate::waveforms::qam::QamMap;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Scheme {
    Ucp,
    Dco,
    Aco,
    UOfdm,
    Bb,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Polarity {
    /// Zero-mean signal that needs a DC bias.
    Bipolar,
    /// Nonnegative signal, transmitted without bias.
    Unipolar,
}

impl Scheme {
    pub const ALL: [Scheme; 5] = [Scheme::Ucp, Scheme::Dco, Scheme::Aco, Scheme::UOfdm, Scheme::Bb];

    pub fn name(self) -> &'static str {
        match self {
            Scheme::Ucp => "ucp",
            Scheme::Dco => "dco",
            Scheme::Aco => "aco",
            Scheme::UOfdm => "u-ofdm",
            Scheme::Bb => "bb",
        }
    }

    pub fn polarity(self) -> Polarity {
        match self {
            Scheme::Aco | Scheme::UOfdm => Polarity::Unipolar,
            _ => Polarity::Bipolar,
        }
    }

    /// Constellation order under the throughput pairing: unipolar schemes use
    /// half the subcarriers (or twice the time), so they double bits per symbol.
    pub fn default_qam_order(self) -> usize {
        match self.polarity() {
            Polarity::Bipolar => 16,
            Polarity::Unipolar => 256,
        }
    }

    /// Transmitted blocks per data block (U-OFDM sends two halves).
    pub fn frames_per_block(self) -> usize {
        if self == Scheme::UOfdm {
            2
        } else {
            1
        }
    }

    /// Stable stream identifier for seeding.
    pub fn id(self) -> u64 {
        self as u64
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Scheme {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "ucp" | "ucp-ofdm" => Ok(Scheme::Ucp),
            "dco" | "dco-ofdm" => Ok(Scheme::Dco),
            "aco" | "aco-ofdm" => Ok(Scheme::Aco),
            "u-ofdm" | "u" | "uofdm" => Ok(Scheme::UOfdm),
            "bb" | "baseband" | "bb-fde" => Ok(Scheme::Bb),
            other => Err(Error::Config(format!("unknown scheme '{other}'"))),
        }
    }
}

/// Constellation block with its source bits.
#[derive(Clone, Debug)]
pub struct SymbolBlock {
    pub scheme: Scheme,
    pub x: Vec<Complex64>,
    pub bits: Vec<u8>,
}

/// Scalar-operation counts of the receive path. An `N`-point FFT counts
/// `N·log2 N`; equalization counts 4 real multiplies per active bin pair
/// (the mirror bin follows by conjugation) and 2 per active self-mirrored bin.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct RxOps {
    pub fft: u64,
    pub equalizer: u64,
    pub decode_macs: u64,
    pub decode_adds: u64,
}

impl RxOps {
    pub fn total_multiplies(&self) -> u64 {
        self.fft + self.equalizer + self.decode_macs
    }
}

/// Time-domain samples of one block, CP included.
#[derive(Clone, Debug)]
pub struct SampleBlock {
    pub samples: Vec<f64>,
    /// Length of one CP-prefixed frame (`N + L`).
    pub block_len: usize,
}

/// Per-scheme modulator state. Cheap to clone; the precoder is shared.
#[derive(Clone, Debug)]
pub struct Modem {
    scheme: Scheme,
    n: usize,
    cp: usize,
    fft: UnitaryFft,
    qam: QamMap,
    mask: SpectralMask,
    precoder: Option<Arc<Precoder>>,
    /// Natural-order bins carrying symbols (Hermitian schemes), or input
    /// positions of the `B` map (UCP).
    slots: Vec<usize>,
}

impl Modem {
    /// `mask` is the spectral mask of the multicarrier schemes; UCP needs the
    /// precoder synthesised for that mask. BB occupies every bin and replaces
    /// the mask by the all-active one.
    pub fn new(
        scheme: Scheme,
        mask: &SpectralMask,
        precoder: Option<Arc<Precoder>>,
        cp: usize,
        qam_order: usize,
    ) -> Result<Self> {
        let n = mask.n_total();
        if cp >= n {
            return Err(Error::Config(format!("CP length {cp} must be shorter than N = {n}")));
        }
        let fft = UnitaryFft::new(n)?;
        let qam = QamMap::new(qam_order)?;
        let mask = if scheme == Scheme::Bb { SpectralMask::all_active(n)? } else { mask.clone() };
        let positive: Vec<i64> = mask.active_set().into_iter().filter(|&k| k > 0).collect();
        let slots: Vec<usize> = match scheme {
            Scheme::Ucp => {
                let pre = precoder
                    .as_ref()
                    .ok_or_else(|| Error::Config("UCP-OFDM needs a precoder".into()))?;
                if pre.mask().m() != mask.m() {
                    return Err(Error::Config("precoder was synthesised for a different mask".into()));
                }
                if mask.m_active() % 2 != 0 {
                    return Err(Error::Config("UCP-OFDM needs an even number of active bins".into()));
                }
                (0..n).filter(|&p| mask.position_active(p)).collect()
            }
            Scheme::Dco | Scheme::UOfdm => positive.iter().map(|&k| centered_to_natural(k, n)).collect(),
            Scheme::Aco => positive.iter().filter(|&&k| k % 2 == 1).map(|&k| centered_to_natural(k, n)).collect(),
            Scheme::Bb => (0..n).collect(),
        };
        if slots.is_empty() {
            return Err(Error::Config(format!("{scheme} has no data subcarriers under this mask")));
        }
        Ok(Self { scheme, n, cp, fft, qam, mask, precoder, slots })
    }

    pub fn scheme(&self) -> Scheme {
        self.scheme
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn cp(&self) -> usize {
        self.cp
    }

    pub fn qam(&self) -> &QamMap {
        &self.qam
    }

    pub fn mask(&self) -> &SpectralMask {
        &self.mask
    }

    pub fn fft(&self) -> &UnitaryFft {
        &self.fft
    }

    pub fn precoder(&self) -> Option<&Precoder> {
        self.precoder.as_deref()
    }

    /// Complex constellation points per block.
    pub fn symbols_per_block(&self) -> usize {
        match self.scheme {
            Scheme::Ucp | Scheme::Bb => self.slots.len() / 2,
            _ => self.slots.len(),
        }
    }

    pub fn bits_per_block(&self) -> usize {
        self.symbols_per_block() * self.qam.bits_per_symbol()
    }

    /// Transmitted samples per block, CP included.
    pub fn samples_per_block(&self) -> usize {
        self.scheme.frames_per_block() * (self.n + self.cp)
    }

    fn check_symbols(&self, x: &[Complex64]) -> Result<()> {
        if x.len() != self.symbols_per_block() {
            return Err(Error::Size(format!(
                "{} expects {} symbols per block, got {}",
                self.scheme,
                self.symbols_per_block(),
                x.len()
            )));
        }
        Ok(())
    }

    fn hermitian_time(&self, x: &[Complex64]) -> Result<Vec<f64>> {
        let mut spec = vec![Complex64::new(0.0, 0.0); self.n];
        for (&b, &v) in self.slots.iter().zip(x) {
            spec[b] = v;
            spec[self.n - b] = v.conj();
        }
        self.fft.process(&mut spec, Direction::Inverse)?;
        Ok(spec.iter().map(|z| z.re).collect())
    }

    /// Bipolar time block before any clipping and without CP. For U-OFDM this
    /// is the frame that is later split into its two halves.
    pub fn bipolar_block(&self, x: &[Complex64]) -> Result<Vec<f64>> {
        self.check_symbols(x)?;
        match self.scheme {
            Scheme::Ucp => {
                let half = self.slots.len() / 2;
                let mut v = vec![0.0; self.n];
                for (i, s) in x.iter().enumerate() {
                    v[self.slots[i]] = s.re;
                    v[self.slots[half + i]] = s.im;
                }
                self.precoder.as_ref().expect("checked in new").encode_fast(&v)
            }
            Scheme::Dco | Scheme::Aco | Scheme::UOfdm => self.hermitian_time(x),
            Scheme::Bb => Ok(x.iter().map(|s| s.re).chain(x.iter().map(|s| s.im)).collect()),
        }
    }

    /// Transmitted samples for one block of symbols.
    pub fn modulate(&self, x: &[Complex64]) -> Result<SampleBlock> {
        let s = self.bipolar_block(x)?;
        let samples = match self.scheme {
            Scheme::Aco => add_cp(&s.iter().map(|&v| v.max(0.0)).collect::<Vec<_>>(), self.cp)?,
            Scheme::UOfdm => {
                let pos: Vec<f64> = s.iter().map(|&v| v.max(0.0)).collect();
                let neg: Vec<f64> = s.iter().map(|&v| (-v).max(0.0)).collect();
                let mut out = add_cp(&pos, self.cp)?;
                out.extend(add_cp(&neg, self.cp)?);
                out
            }
            _ => add_cp(&s, self.cp)?,
        };
        Ok(SampleBlock { samples, block_len: self.n + self.cp })
    }

    /// Maps bits and modulates them.
    pub fn modulate_bits(&self, bits: &[u8]) -> Result<(SymbolBlock, SampleBlock)> {
        if bits.len() != self.bits_per_block() {
            return Err(Error::Size(format!("{} expects {} bits per block", self.scheme, self.bits_per_block())));
        }
        let x = self.qam.map(bits)?;
        let samples = self.modulate(&x)?;
        Ok((SymbolBlock { scheme: self.scheme, x, bits: bits.to_vec() }, samples))
    }

    fn fft_ops(&self) -> u64 {
        (self.n * self.n.trailing_zeros() as usize) as u64
    }

    fn equalizer_ops(&self) -> u64 {
        let n = self.n as i64;
        self.mask
            .active_set()
            .into_iter()
            .map(|k| match k {
                0 => 2,
                k if k == -n / 2 => 2,
                k if k > 0 => 4,
                _ => 0,
            })
            .sum()
    }

    /// Equalised spectrum of one CP-prefixed frame.
    fn equalized(&self, frame: &[f64], eq: &[Complex64], ops: &mut RxOps) -> Result<Vec<Complex64>> {
        let y = remove_cp(frame, self.cp)?;
        let mut spec = self.fft.forward_real(&y)?;
        for (z, d) in spec.iter_mut().zip(eq) {
            *z *= d;
        }
        ops.fft += self.fft_ops();
        ops.equalizer += self.equalizer_ops();
        Ok(spec)
    }

    /// Constellation estimates from a received block (CP included).
    pub fn demodulate(&self, rx: &[f64], eq: &[Complex64]) -> Result<Vec<Complex64>> {
        self.demodulate_counted(rx, eq, &mut RxOps::default())
    }

    /// [`Modem::demodulate`] that also tallies receive-side operations.
    pub fn demodulate_counted(&self, rx: &[f64], eq: &[Complex64], ops: &mut RxOps) -> Result<Vec<Complex64>> {
        if rx.len() != self.samples_per_block() {
            return Err(Error::Size(format!(
                "{} expects {} received samples, got {}",
                self.scheme,
                self.samples_per_block(),
                rx.len()
            )));
        }
        if eq.len() != self.n {
            return Err(Error::Size(format!("equalizer has {} bins, N = {}", eq.len(), self.n)));
        }
        let frame = self.n + self.cp;
        match self.scheme {
            Scheme::Ucp | Scheme::Bb => {
                let mut spec = self.equalized(rx, eq, ops)?;
                self.fft.process(&mut spec, Direction::Inverse)?;
                ops.fft += self.fft_ops();
                let s: Vec<f64> = spec.iter().map(|z| z.re).collect();
                let half = self.slots.len() / 2;
                let v = match self.scheme {
                    Scheme::Ucp => {
                        let mut t = OpTally::default();
                        let v = self.precoder.as_ref().expect("checked in new").decode_fast_counted(&s, &mut t)?;
                        ops.decode_macs += t.macs;
                        ops.decode_adds += t.adds;
                        v
                    }
                    _ => s,
                };
                Ok((0..half).map(|i| Complex64::new(v[self.slots[i]], v[self.slots[half + i]])).collect())
            }
            Scheme::Dco => {
                let spec = self.equalized(rx, eq, ops)?;
                Ok(self.slots.iter().map(|&b| spec[b]).collect())
            }
            Scheme::Aco => {
                let spec = self.equalized(rx, eq, ops)?;
                Ok(self.slots.iter().map(|&b| spec[b] * 2.0).collect())
            }
            Scheme::UOfdm => {
                let pos = self.equalized(&rx[..frame], eq, ops)?;
                let neg = self.equalized(&rx[frame..], eq, ops)?;
                Ok(self.slots.iter().map(|&b| pos[b] - neg[b]).collect())
            }
        }
    }

    /// Demodulates and slices to bits.
    pub fn demodulate_bits(&self, rx: &[f64], eq: &[Complex64]) -> Result<(Vec<Complex64>, Vec<u8>)> {
        let x = self.demodulate(rx, eq)?;
        let bits = self.qam.demap(&x);
        Ok((x, bits))
    }

    /// Equalizer of an ideal unit channel: 1 on used bins, 0 on null bins.
    pub fn identity_equalizer(&self) -> Vec<Complex64> {
        (0..self.n)
            .map(|b| {
                if self.mask.bin_active(b) {
                    Complex64::new(1.0, 0.0)
                } else {
                    Complex64::new(0.0, 0.0)
                }
            })
            .collect()
    }
}

/// Even-bin and odd-bin energy of an ACO block (without CP).
pub fn aco_bin_energy(fft: &UnitaryFft, block: &[f64]) -> Result<(f64, f64)> {
    let spec = fft.forward_real(block)?;
    let (mut even, mut odd) = (0.0, 0.0);
    for (b, z) in spec.iter().enumerate() {
        if b % 2 == 0 {
            even += z.norm_sqr();
        } else {
            odd += z.norm_sqr();
        }
    }
    Ok((even, odd))
}

/// `10·log10(max s² / mean s²)` of one block.
pub fn block_papr_db(s: &[f64]) -> f64 {
    let peak = s.iter().map(|v| v * v).fold(0.0, f64::max);
    let mean = s.iter().map(|v| v * v).sum::<f64>() / s.len() as f64;
    10.0 * (peak / mean).log10()
}
