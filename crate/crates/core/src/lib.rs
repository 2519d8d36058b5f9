//! Numerical Bergman, Szegő and Green kernels on planar domains.
//!
//! The crate builds orthonormal bases of the Bergman space from spectrally
//! accurate boundary moments, solves the Kerzman–Stein equation for the
//! Szegő kernel, evaluates Green's functions and Robin constants, and runs
//! the minimal-point classification: a domain has a point with
//! `K(z₀, z₀) = 1 / area` exactly when it is a disk centered at `z₀`, up to a
//! removable polar set. A separate module treats the quartic Reinhardt domain
//! `|z₁|⁴ + |z₁|² + |z₂|² < 1` in `C²`.

pub mod bergman;
pub mod error;
pub mod geometry;
mod layer;
pub mod potential;
pub mod quadrature;
pub mod reinhardt2;
pub mod rigidity;
pub mod szego;
#[cfg(test)]
mod test_domains;

pub use error::{Error, Result};
pub use geometry::{BoundaryCurve, CurveShape, DomainKind, Membership, Orientation, PlanarDomain};
pub use num_complex::Complex64;
