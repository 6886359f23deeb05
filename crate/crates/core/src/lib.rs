//! Reduction of higher-order submodular pseudo-Boolean functions to
//! quadratic submodular functions with auxiliary variables, minimization by
//! max-flow, and exhaustive certification of every transformation.

pub mod cli;
pub mod error;
pub mod lp;
pub mod maxflow;
pub mod mbf;
pub mod oracle;
pub mod pbf;
pub mod rational;
pub mod reduce_general;
pub mod reduce_quartic;

pub use error::{Error, Result};
pub use rational::Rational;
