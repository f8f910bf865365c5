//! First Steklov-Dirichlet eigenvalue of a planar eccentric annulus.
//!
//! The domain is the region between two circles, the inner one strictly
//! inside the outer, with zero Dirichlet data on the inner boundary and the
//! spectral (Robin) condition `du/dnu = sigma u` on the outer one. In bipolar
//! coordinates both boundaries become coordinate circles and the
//! Dirichlet-to-Neumann operator, restricted to even modes, is tridiagonal in
//! a weighted cosine basis. This crate computes the smallest eigenvalue by
//! finite-section truncation with Sturm bisection, reconstructs the first
//! eigenfunction as a modal series, certifies the value through a
//! Rayleigh-quotient upper bound, and exposes analytic bounds, the derivative
//! of the eigenvalue in the center offset, and the three-term-recurrence
//! coefficient diagnostics (ratio sequences, fixed points, small-gap
//! asymptotics).
//!
//! The crate is `no_std`-compatible (it requires `alloc`); build with
//! `--no-default-features --features libm` to drop the `std` dependency.

#![cfg_attr(not(feature = "std"), no_std)]
#![deny(unsafe_code)]

#[cfg(all(not(feature = "std"), not(feature = "libm")))]
compile_error!("steklov-core needs either the `std` feature or the `libm` feature");

extern crate alloc;

pub mod analysis;
pub mod eigenfunction;
mod error;
pub mod geometry;
pub(crate) mod math;
pub(crate) mod quad;
pub mod spectral;

pub use error::Error;

/// Crate-wide result alias.
pub type Result<T> = core::result::Result<T, Error>;

pub use eigenfunction::EigenfunctionSeries;
pub use geometry::{Annulus, AsymptoticFrame, BipolarFrame};
pub use spectral::{ConvergedEigenvalue, EigenResult, ModeWeights, TridiagonalSection};
