//! Modulation schemes, QAM mapping, cyclic prefix and the Zadoff-Chu preamble.

pub mod cp;
pub mod modem;
pub mod qam;
pub mod zc;

pub use cp::{add_cp, remove_cp};
pub use modem::{aco_bin_energy, block_papr_db, Modem, Polarity, RxOps, SampleBlock, Scheme, SymbolBlock};
pub use qam::QamMap;
pub use zc::{zadoff_chu, zadoff_chu_preamble, Preamble};
