//! Exact enumeration of short vectors of the E8, BW16 and E6 lattices and the
//! quantum states they define.
//!
//! Shell vectors are turned into unnormalised pure states over the Gaussian or
//! Eisenstein integers.  Everything downstream (stabiliser Rényi entropy, Clifford
//! orbits, overlaps) is computed in exact arithmetic; only the mixed-state
//! concurrence falls back to floating point for root isolation.

#![allow(clippy::needless_range_loop)]

pub mod arith;
pub mod clifford;
pub mod entangle;
pub mod error;
pub mod lattice;
pub mod magic;
pub mod pipeline;
pub mod poly;
pub mod state;
pub mod tolerances;

pub use error::{Error, Result};
