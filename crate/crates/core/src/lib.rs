//! Exact distributions, characteristic functions and effective
//! Erdős–Wintner bounds for Zeckendorf-additive functions.

pub mod bounds;
pub mod charfn;
pub mod cli;
pub mod distribution;
pub mod error;
pub mod numeration;
pub mod verify;
pub mod weights;

pub use error::{Error, Result};
