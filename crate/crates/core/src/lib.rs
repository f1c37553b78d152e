//! Numerical reflection principles and holomorphic extension of CR functions.
//!
//! * [`reflection`]: one-variable reflection operators (classical, with an
//!   analytic imaginary trace, harmonic, across analytic curves).
//! * [`eow`]: the explicit edge-of-the-wedge averaging operator.
//! * [`wedge`]: generic submanifolds in regular coordinates, cones, wedges.
//! * [`crext`]: extension of wedge functions with analytic imaginary part.

pub mod analytic;
pub mod crext;
pub mod eow;
pub mod error;
pub mod reflection;
pub mod sampling;
pub mod series;
pub mod wedge;

pub use error::{Error, Result};
pub use num_complex::Complex64;
