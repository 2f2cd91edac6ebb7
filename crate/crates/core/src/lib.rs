#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod circuit;
pub mod error;
pub mod experiment;
pub mod interference;
pub mod source;
pub mod tcspc;
pub mod units;

pub use error::{Error, Result};
