//! Rate-distortion trade-offs for lossy computing of a function of two
//! correlated sources when the encoder may only measure a fraction of the
//! samples of each source.

#![forbid(unsafe_code)]

pub mod binary;
pub mod combiner;
pub mod error;
pub mod gaussian;
pub mod model;
pub mod multihop;
pub mod oracle;
pub mod primitives;
pub mod scenario;
mod search;
pub mod worstcase;

pub use error::{Error, ProfileViolation, Result};
