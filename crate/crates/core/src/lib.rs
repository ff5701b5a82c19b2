//! Magnetic geodesic flows on surfaces of revolution.
//!
//! The crate converts a rotationally symmetric surface with a magnetic field
//! into action coordinates, integrates the flow, reduces the strong-field
//! limit to a one-degree-of-freedom problem and classifies surfaces for which
//! all bounded orbits close.

pub mod error;
pub mod fit;
pub mod func;
pub mod jet;
pub mod quadrature;
pub mod spline;
pub mod surface;
pub mod dynamics;
pub mod reduction;
pub mod bertrand;

pub use error::{Error, Result};
