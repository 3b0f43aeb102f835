//! Time stepping: the method of lines for the full equation, the linear
//! transport solver and the Picard scheme built on it.

mod integrate;
mod picard;
mod transport;

pub use integrate::{integrate, integrate_with, Monitor, StepController, Termination, Trajectory};
pub use picard::{picard_solve, PicardConfig, PicardSolution};
pub use transport::{transport_history, transport_solve, TimeSeriesField};
