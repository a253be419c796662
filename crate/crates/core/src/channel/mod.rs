//! Optical wireless channels: AWGN, indoor multipath from a Lambertian room
//! model, and sinusoidal baseline wander.

pub mod geometry;
pub mod model;
pub mod wander;

pub use geometry::{Path, RoomGeometry, SPEED_OF_LIGHT};
pub use model::{add_noise, apply_channel, bin_paths, convolve, realize_channel, ChannelKind, ChannelRealization};
pub use wander::{apply_wander, std_dev, WanderConfig};
