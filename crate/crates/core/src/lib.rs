//! Positive radial entire solutions of competitive semilinear elliptic systems
//!
//! ```text
//! Δu = p(r) f(u, v),   Δv = q(r) g(u, v),   x ∈ ℝⁿ, n ≥ 3, r = |x|
//! ```
//!
//! The crate builds solutions by monotone (Picard) iteration of the radial
//! Green-potential form of the system, evaluates Keller–Osserman integrals,
//! classifies central values `(α, β) = (u(0), v(0))` as entire or blowing up at
//! a finite radius, and maps the set of admissible central values together with
//! its edge. A verification layer checks residuals, hypotheses, the transform
//! lower bound for `u + v` and the divergence dichotomy on computed solutions.
//!
//! The crate is `no_std` and only needs `alloc`. Parallel sweeps, file formats
//! and the command line live in the companion `entire-cli` crate; the region
//! explorer here accepts any [`region::NodeMapper`] so callers can plug in a
//! thread pool without affecting outcomes.
//!
//! Module map:
//! - [`problem`]: weights, nonlinearities, grids and the Green-type potentials.
//! - [`ko`]: Keller–Osserman integrals, the tail transform `H` and its inverse,
//!   and the primitive `C_f` used by the barrier.
//! - [`solver`]: monotone iteration, scalar supersolution, classification,
//!   blow-up radii and the barrier radius.
//! - [`region`]: raster sweeps, edge bisection and closure checks.
//! - [`verify`]: hypothesis checklist, residuals, lower bound and divergence.
#![no_std]
#![deny(rust_2018_idioms, unused_must_use)]
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod digest;
pub mod error;
pub mod ko;
mod math;
pub mod numerics;
pub mod problem;
pub mod region;
pub mod solver;
pub mod verify;

pub use error::{Error, Result};
pub use numerics::quad::IntegralVerdict;
pub use problem::{Envelope, NonlinearPair, Nonlinearity, ProblemSpec, RadialGrid, ScalarMap, Tail, Weight};
pub use region::{EdgePoint, RegionBox, RegionMap};
pub use solver::{ClassifyOutcome, SolutionPair, Solver, SolverConfig};
