//! Link-level experiment configuration.

use serde::{Deserialize, Serialize};

use crate::channel::{ChannelKind, RoomGeometry};
use crate::error::{Error, Result};
use crate::frontend::{FrontEndConfig, ShapingConfig};
use crate::waveforms::Scheme;

/// Target clipping probabilities per scheme.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ClipTargets {
    pub ucp: f64,
    pub dco: f64,
    pub aco: f64,
    pub u_ofdm: f64,
    pub bb: f64,
}

impl Default for ClipTargets {
    fn default() -> Self {
        Self { ucp: 2.2e-2, dco: 4.4e-2, aco: 0.69e-3, u_ofdm: 0.97e-3, bb: 2.2e-2 }
    }
}

impl ClipTargets {
    pub fn get(&self, s: Scheme) -> f64 {
        match s {
            Scheme::Ucp => self.ucp,
            Scheme::Dco => self.dco,
            Scheme::Aco => self.aco,
            Scheme::UOfdm => self.u_ofdm,
            Scheme::Bb => self.bb,
        }
    }

    pub fn set(&mut self, s: Scheme, v: f64) {
        match s {
            Scheme::Ucp => self.ucp = v,
            Scheme::Dco => self.dco = v,
            Scheme::Aco => self.aco = v,
            Scheme::UOfdm => self.u_ofdm = v,
            Scheme::Bb => self.bb = v,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LinkConfig {
    pub schemes: Vec<Scheme>,
    pub n: usize,
    pub cp: usize,
    /// Null bins around DC beyond DC itself, and at the band edge beyond -N/2.
    pub n_middle: usize,
    pub n_edge: usize,
    pub bandwidth_hz: f64,
    pub payload_syms: usize,
    pub packets_per_run: usize,
    pub runs: usize,
    pub qam_bipolar: usize,
    pub qam_unipolar: usize,
    pub channel: ChannelKind,
    /// Noise powers `P_N = 20 log10 σ` in dB. Empty selects a grid around
    /// the nominal received level of the channel.
    pub pn_db: Vec<f64>,
    pub seed: u64,
    pub zc_root: usize,
    pub calibration_samples: usize,
    /// Worker threads; 0 uses the global default.
    pub threads: usize,
    pub clip_targets: ClipTargets,
    pub shaping: ShapingConfig,
    pub frontend: FrontEndConfig,
    pub geometry: RoomGeometry,
}

impl Default for LinkConfig {
    fn default() -> Self {
        Self {
            schemes: vec![Scheme::Ucp, Scheme::Dco, Scheme::Aco, Scheme::UOfdm],
            n: 256,
            cp: 16,
            n_middle: 0,
            n_edge: 0,
            bandwidth_hz: 625e6,
            payload_syms: 10,
            packets_per_run: 5,
            runs: 100,
            qam_bipolar: 16,
            qam_unipolar: 256,
            channel: ChannelKind::Awgn,
            pn_db: Vec::new(),
            seed: 1,
            zc_root: 1,
            calibration_samples: 100_000,
            threads: 0,
            clip_targets: ClipTargets::default(),
            shaping: ShapingConfig::default(),
            frontend: FrontEndConfig::default(),
            geometry: RoomGeometry::default(),
        }
    }
}

impl LinkConfig {
    pub fn validate(&self) -> Result<()> {
        if self.schemes.is_empty() {
            return Err(Error::Config("no schemes selected".into()));
        }
        if self.runs == 0 || self.packets_per_run == 0 || self.payload_syms == 0 {
            return Err(Error::Config("runs, packets and payload symbols must be positive".into()));
        }
        if !(self.bandwidth_hz > 0.0) {
            return Err(Error::Config("bandwidth must be positive".into()));
        }
        if self.pn_db.iter().any(|v| !v.is_finite()) {
            return Err(Error::Config("noise grid must be finite".into()));
        }
        for s in &self.schemes {
            let t = self.clip_targets.get(*s);
            if !(t > 0.0 && t < 0.5) {
                return Err(Error::Config(format!("clip target {t} for {s} outside (0, 0.5)")));
            }
        }
        self.shaping.validate()?;
        let fe = FrontEndConfig { target_clip_prob: 0.01, ..self.frontend };
        fe.validate()?;
        self.geometry.validate()?;
        Ok(())
    }

    pub fn qam_order(&self, s: Scheme) -> usize {
        match s.polarity() {
            crate::waveforms::Polarity::Bipolar => self.qam_bipolar,
            crate::waveforms::Polarity::Unipolar => self.qam_unipolar,
        }
    }

    /// Geometry with the sample period implied by the bandwidth.
    pub fn room(&self) -> RoomGeometry {
        RoomGeometry { symbol_period: 1.0 / self.bandwidth_hz, ..self.geometry.clone() }
    }
}
