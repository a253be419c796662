//! Spectral masks, the checkerboard precoder and its low-rank fast path.

pub mod cache;
pub mod mask;
pub mod synth;

pub use mask::{pattern_matrix, SpectralMask};
pub use synth::{hermitian_basis, masked_conj_dft, Diagnostics, OpCount, OpTally, Precoder, RANK_CUTOFF};
