//! Exact and Monte Carlo machinery for exponential last-passage percolation.
//!
//! The crate is organised bottom-up:
//!
//! - [`lattice`]: deterministic passage times, increment fields, induced weights and geodesics
//!   on finite rectangular grids.
//! - [`rng`] and [`environments`]: reproducible counter-based sampling of exponential weight
//!   fields, including the inhomogeneous η-environment whose increments reproduce the joint law of
//!   Busemann functions.
//! - [`coupling`]: the two-row unused-service transform, its queueing interpretation and its
//!   composition into row/column rate permutations.
//! - [`busemann`]: the exact Busemann sampler, prelimit approximations, thin Busemann functions.
//! - [`shape`]: A/B integrals, ρ, critical directions and the shape minimiser for finitely
//!   supported parameter measures.
//! - [`stats`]: KS, atom-plus-tail, energy-distance and distance-correlation tests.
//! - [`harness`]: named verification suites, JSON reports and CSV exports.

pub mod busemann;
pub mod coupling;
pub mod environments;
pub mod error;
pub mod harness;
pub mod lattice;
pub mod rng;
pub mod shape;
pub mod stats;

pub use error::{LppError, Result};
