#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod continuum;
pub mod dynamics;
pub mod error;
pub mod interp;
pub mod io;
pub mod maxent;
pub mod prob;
pub mod wigner;

pub use error::{Error, Result};
