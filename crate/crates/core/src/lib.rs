//! Renewal structure of self-avoiding walks on the hypercubic lattice.
//!
//! The crate enumerates self-avoiding walks, bridges and irreducible bridges
//! exactly, turns the irreducible two-point function into the regeneration
//! step law, samples regeneration skeletons conditioned on ending at
//! `(n, 0, ..., 0)`, and provides the statistics used to compare scaled
//! skeletons with a Brownian bridge.
//!
//! Everything here is `no_std` + `alloc`. The `std` feature (on by default)
//! adds rayon-backed parallel enumeration, dynamic programming and ensemble
//! sampling; results are identical with or without it.

#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

mod error;

pub mod enumerate;
pub mod lattice;
pub mod renewal;
pub mod rng;
pub mod sampler;
pub mod stats;

pub use error::{Error, Result};
pub use lattice::{FrameSplit, LatticeSite, SawPath, MAX_DIM};
