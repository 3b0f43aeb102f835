//! Periodic grid, transforms, spectral differentiation, multipliers,
//! dealiased products and norms.

mod fft;
mod field;
mod grid;
mod ops;

pub use field::{RealField, SpectralField};
pub use grid::Grid;
pub use ops::{
    apply_symbol, derivative, eval_at, multiply_dealiased, norm_lp, MAX_DERIVATIVE_ORDER,
    SUP_UPSAMPLING,
};

pub(crate) use grid::mode_index;
pub(crate) use fft::{forward, inverse};
pub(crate) use ops::{
    derivative_multiplier, differentiate_coeffs, lp_rectangle,
    multiply_spectral, padded_len, sup_norm_spectral,
};
