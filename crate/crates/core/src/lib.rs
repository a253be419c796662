//! Unitary checkerboard precoded OFDM for optical wireless links.
//!
//! The crate is organised bottom-up:
//!
//! * [`numerics`]: dense matrices, unitary FFT, Jacobi SVD and the unitary projection.
//! * [`precoder`]: spectral masks, the checkerboard precoder `W`, the composite
//!   matrix `P = F W` and its low-rank fast path.
//! * [`waveforms`]: QAM, cyclic prefix, Zadoff-Chu preamble and the five schemes
//!   (UCP-OFDM, DCO-OFDM, ACO-OFDM, U-OFDM, baseband with FDE).
//! * [`frontend`]: RRC shaping, biasing, clipping and PAPR statistics.
//! * [`channel`]: AWGN, Lambertian indoor multipath and baseline wander.
//! * [`link`]: packet simulation, channel estimation and the Monte Carlo runner.
//! * [`experiments`]: the PAPR, wander, BER and clip-sweep experiments.

pub mod channel;
pub mod error;
pub mod experiments;
pub mod frontend;
pub mod link;
pub mod numerics;
pub mod precoder;
pub mod waveforms;

pub use error::{Error, Result};
