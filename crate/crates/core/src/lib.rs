//! Geometric simulation of one-dimensional wave propagation.
//!
//! The envelope pair `(A, B)` of a wave `Ψ = A cos kx + B sin kx` evolves
//! under SL(2,R); its quadratic image is a Bloch vector on a cone (real
//! amplitudes) or a hyperboloid (complex amplitudes). This crate integrates
//! both pictures, implements the coordinate gauge maps and the Lorentz-group
//! phases of cyclic evolutions, and cross-checks everything against direct
//! integration of the Helmholtz equation.

pub mod algebra;
pub mod berry;
pub mod bloch;
pub mod cli;
pub mod envelope;
pub mod error;
pub mod gauge;
mod ode;
pub mod oracle;

pub use algebra::{Matrix2, ThreeVector};
pub use envelope::{EnvelopeState, Medium, PotentialProfile, Trajectory};
pub use error::{Error, Result};
