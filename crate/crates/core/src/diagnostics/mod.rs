//! Scalar monitors fed by [`crate::dynamics::integrate`] at every recorded
//! time, plus replay helpers that run the same monitors over the stored
//! snapshots of a finished trajectory.

mod monitors;
mod series;

pub use monitors::{
    besov_track, blowup_accumulator, conserved_quantity, momentum, momentum_norm,
    momentum_spectral, riccati_monitor, BesovTrack, BlowupAccumulator, ConservedQuantity,
    RiccatiMonitor, PARITY_ABORT, SPECTRAL_NOISE_FLOOR,
};
pub use series::DiagnosticSeries;
