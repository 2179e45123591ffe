//! Exact calculus on an interval for pairings between bounded
//! divergence-measure fields and BV functions.
//!
//! Everything is rational arithmetic: measures are piecewise-polynomial
//! densities plus atoms plus affine staircase components, BV functions are
//! polynomial pieces with explicit jumps and staircase summands, and the
//! identities the check suite verifies (decomposition, coarea, chain rule,
//! Leibniz, Gauss-Green, semicontinuity) come out as exact residuals.

pub mod bv;
pub mod cantor;
pub mod checks;
pub mod corpus;
pub mod error;
pub mod field;
pub mod measure;
pub mod pairing;
pub mod poly;
pub mod radial;
pub mod rational;
pub mod roots;
pub mod scenario;
pub mod sequences;
pub mod set;

pub use error::{Error, Result};
pub use rational::{Bounded, Rational};
