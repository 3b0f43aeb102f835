//! Characteristics `dy/dt = u(t, y)`, `y(0, xi) = xi`, the exponential
//! kernels of the unit Helmholtz case, the momentum identity
//! `m(t, y) y_xi^b = m0`, and the Lagrangian integral form of `F`.

mod flow;
mod kernel;

pub use flow::{
    conservation_identity, flow_map, lagrangian_f, lagrangian_velocity, FlowMap, MAX_STEP_STRETCH,
};
pub use kernel::{kernel_convolve, kernel_value, ExpSweep, KernelKind, OneSided};
