//! Numerical building blocks shared by the problem, solver and verify layers.

pub mod fit;
pub mod green;
pub mod ode;
pub mod quad;
