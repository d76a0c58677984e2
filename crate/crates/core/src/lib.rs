//! Subsequence selection and randomness diagnostics for binary sequences.
//!
//! The crate is organised bottom-up:
//!
//! - [`bitseq`]: packed finite binary strings and indexed sequence sources;
//! - [`generators`]: Champernowne, Fibonacci and certified Sturmian words,
//!   a specified pseudorandom Bernoulli stream, periodic words;
//! - [`selection`]: the selection operator `x/y`, its complement, split and merge;
//! - [`measures`]: computable measures with exact rational conditionals;
//! - [`coder`]: an exact-rational monotone arithmetic coder and decoder;
//! - [`stats`]: block frequencies, discrepancy, empirical entropy, factor
//!   complexity and LZ78 phrase counts;
//! - [`experiment`]: manifest-driven experiments writing CSV curves and a
//!   pass/fail summary.

pub mod bitseq;
pub mod cli;
pub mod coder;
pub mod descriptor;
pub mod error;
pub mod experiment;
pub mod generators;
pub mod measures;
pub mod selection;
pub mod stats;

pub use bitseq::{BitString, SequenceSource};
pub use descriptor::Record;
pub use error::{Error, Result};
