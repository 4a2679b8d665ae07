//! Numerical laboratory for spectral projector kernels on the boundary of
//! the Grauert tube over the round two-sphere.
//!
//! The library builds three layers:
//!
//! * model kernels on Bargmann--Fock space, including the quantization of a
//!   linear symplectic map ([`bargmann_fock`], [`symplectic`]);
//! * the exact tube geometry of `S^2` inside the complex quadric
//!   `{zeta . zeta = 1}` in `C^3`, with geodesic flow, Heisenberg frames and
//!   Liouville quadrature ([`sphere_tube`]);
//! * analytically continued spherical harmonics on the tube boundary and the
//!   spectral localization kernels assembled from them ([`harmonics`],
//!   [`spectral`]).
//!
//! Everything is double precision; quantities that grow like `e^{N tau}` are
//! carried in log-scaled form (see [`harmonics::LogComplex`]). All public
//! operations are pure functions of their inputs and safe to call
//! concurrently.

pub mod bargmann_fock;
mod error;
pub mod harmonics;
pub mod numerics;
pub mod spectral;
pub mod sphere_tube;
pub mod symplectic;

pub use error::{Error, Result};
