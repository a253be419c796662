//! Pulse shaping, biasing and clipping, and PAPR statistics.

pub mod clip;
pub mod papr;
pub mod rrc;

pub use clip::{calibrate_gain, clip_probability, scale_and_bias, FrontEndConfig};
pub use papr::{ccdf, ccdf_quantile, papr_windows, PaprWindows};
pub use rrc::{rrc_taps, rrc_value, Shaper, ShapingConfig};
