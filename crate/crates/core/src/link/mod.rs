//! End-to-end packet simulation and the Monte Carlo campaign runner.

pub mod campaign;
pub mod config;
pub mod equalizer;
pub mod packet;
pub mod report;
pub mod seeds;

pub use campaign::{default_pn_grid, run_campaign, Campaign};
pub use config::{ClipTargets, LinkConfig};
pub use equalizer::{estimate_channel, Equalizer};
pub use packet::{receive, transmit, PacketStats, PacketTx, SchemeSetup};
pub use report::{ber_crossing_db, horizontal_gap_db, LinkReport, LinkRow, SchemeSummary, CSV_COLUMNS, CSV_VERSION};
