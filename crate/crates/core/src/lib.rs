#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod class_v;
pub mod cli;
pub mod closure;
pub mod error;
pub mod gamma_kernel;
pub mod mero_series;
mod nonfinite;
pub mod radii;
pub mod verifier;

pub use error::{Error, Result};
