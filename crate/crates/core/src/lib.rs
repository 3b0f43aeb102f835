//! Numerical laboratory for the fifth-order Camassa-Holm (FOCH) equation
//!
//! ```text
//! m_t + u m_x + b u_x m = 0,   m = (1 - alpha^2 d_xx)(1 - beta^2 d_xx) u
//! ```
//!
//! posed on a periodic box. The crate is organised bottom-up:
//!
//! * [`spectral`]: grid, transforms, derivatives, multipliers, norms.
//! * [`besov`]: Littlewood-Paley blocks, Besov norms, paraproducts.
//! * [`model`]: the multiplier `P(D)`, `u <-> m`, and the nonlocal terms.
//! * [`dynamics`]: RK4 method of lines, transport solver, Picard scheme.
//! * [`lagrangian`]: characteristics, exponential kernels, conservation.
//! * [`diagnostics`]: monitors attached to trajectories.
//! * [`experiments`]: ill-posedness data and scripted studies.

pub mod besov;
pub mod corpus;
pub mod diagnostics;
pub mod dynamics;
pub mod error;
pub mod experiments;
pub mod lagrangian;
pub mod model;
pub mod quadrature;
pub mod spectral;
pub mod validation;

pub use error::{Error, Result};
pub use model::FochParams;
pub use spectral::{Grid, RealField, SpectralField};
