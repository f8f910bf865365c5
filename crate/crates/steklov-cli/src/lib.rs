//! Batch front end for the eccentric-annulus Steklov-Dirichlet solver.
//!
//! The binary (`steklov`) wires these pieces to subcommands; they live in a
//! library so the sweep engine, formatting, and verification checks are
//! directly testable.

pub mod format;
pub mod svg;
pub mod sweep;
pub mod verify;
