//! Counting operators, cut norms, local factors, weak regularity and density
//! increments for the nonlinear Roth configuration `x, x + y, x + q y²`.
//!
//! All functions live on `[N] = {1, .., N}` and are stored 0-based.

pub mod counting;
pub mod cutnorm;
pub mod error;
pub mod factors;
pub mod fourier;
pub mod function;
pub mod increment;
pub mod io;
pub mod progression;
pub mod regularity;
pub mod set;

pub use error::{Error, Result};
pub use function::BoundedFunction;
pub use progression::Progression;
pub use set::IntegerSet;
