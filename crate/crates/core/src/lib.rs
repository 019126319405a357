//! Adaptive weighted least squares for heteroscedastic nonparametric
//! regression on the sieve `x_l = l/n`, with a Monte Carlo risk harness and a
//! lab for the matching minimax lower bound.

pub mod basis;
pub mod error;
pub mod lowerbound;
pub mod models;
pub mod quadrature;
pub mod risk;
pub mod rng;
pub mod selector;
pub mod weights;

pub use error::{Error, Result};
