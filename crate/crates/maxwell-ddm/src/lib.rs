//! Finite element solver for the 3D time-harmonic Maxwell curl-curl equation
//! on structured hexahedral grids, preconditioned by an overlapping optimized
//! restricted additive Schwarz (ORAS) method.
//!
//! The domain is truncated either by a first-order impedance (Robin)
//! condition or by a perfectly matched layer built from singular coordinate
//! stretching. The same two choices are available as transmission conditions
//! on the interfaces of the overlapping subdomains, which is where the
//! iteration counts of the preconditioned GMRES solver are decided.
//!
//! # Layout
//!
//! - [`physics`] - frequency, wave speed and material constants
//! - [`grid`] - structured hexahedral mesh with edge degrees of freedom
//! - [`pml`] - stretching functions and equivalent anisotropic material tensors
//! - [`assembly`] - lowest-order edge element assembly of the global system
//! - [`ddm`] - overlapping decomposition, restriction/partition-of-unity
//!   operators and local subdomain problems
//! - [`linalg`] - sparse complex matrices, sparse LU, right-preconditioned
//!   GMRES and the ORAS preconditioner application
//! - [`runner`] - experiment configuration, sweeps, CSV tables and field export
//!
//! See the `examples/` directory for runnable entry points covering each
//! capability; the `maxwell-ddm` binary exposes `solve` and `validate`
//! subcommands over the same machinery.

pub mod assembly;
pub mod ddm;
pub mod error;
pub mod grid;
pub mod linalg;
pub mod physics;
pub mod pml;
pub mod runner;

pub use error::Error;

/// Complex scalar used throughout the crate.
pub type C64 = num_complex::Complex64;
