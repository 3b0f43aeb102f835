//! The two ill-posedness constructions at the critical `b = 5/3`, their
//! norm-growth runs, momentum-conservation studies for `0 <= b <= 1`, and
//! corpus measurements of inequality constants.

mod conservation;
mod constants;
mod ill1;
mod ill2;
mod inflation;

pub use conservation::{run_conservation_study, ConservationConfig, ConservationReport};
pub use constants::{measure_constants, MeasuredConstants};
pub use ill1::{build_ill1_data, ill1_scalings, Ill1Config, Ill1Scalings};
pub use ill2::{
    build_ill2_data, bump, ill2_scalings, Ill2Config, Ill2Scalings, Ill2Spectrum, BUMP_SUPPORT,
};
pub use inflation::{run_inflation, InflationCase, InflationOptions, InflationReport};
