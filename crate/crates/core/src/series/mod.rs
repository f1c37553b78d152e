//! Truncated real-coefficient power series and their complexification.

mod complex;
mod multi;
mod power;

pub use complex::ComplexSeries;
pub use multi::{MultiSeries, DEFAULT_DEGREE};
pub use power::{revert_complex, PowerSeries1D, DEFAULT_ORDER, MIN_RADIUS_TERMS, RADIUS_SAFETY};
