//! Pattern Censoring (PC) code for stationary memoryless sources over the
//! positive integers, and a laboratory for the redundancy of envelope classes.

pub mod cli;
pub mod coding;
pub mod envelope;
pub mod error;
pub mod numeric;
pub mod occupancy;
pub mod par;
pub mod pc;
pub mod redundancy;

pub use error::{Error, Result};
