//! Finite-bath thermodynamics of diagonal quantum systems.
//!
//! A bath is described only by its inverse temperature and heat capacity.
//! The crate provides:
//!
//! * [`bath`]: saddle-point reduction of an entropy model and the discretized
//!   bath grid (log-degeneracies, Gibbs weights).
//! * [`system`]: diagonal states and their thermodynamic functionals.
//! * [`flucwork`]: closed-form bounds on average (fluctuating) work and the
//!   explicit near-optimal maps.
//! * [`lpopt`]: the exact optimum of average work over all thermal operations
//!   on a discretized bath, solved as a linear program.
//! * [`detwork`]: single-shot (deterministic) work via thermomajorization in
//!   each total-energy subspace.
//! * [`cli`]: configuration, commands and report emission behind the
//!   `finbath` binary.

#![allow(clippy::needless_range_loop, clippy::neg_cmp_op_on_partial_ord)]

pub mod bath;
pub mod cli;
pub mod detwork;
pub mod error;
pub mod flucwork;
pub mod lpopt;
pub mod numeric;
pub mod system;

pub use bath::{BathGrid, BathSpec, EntropyModel};
pub use error::{FinbathError, Result};
pub use system::{DiagonalState, SystemSpec, Transition};
