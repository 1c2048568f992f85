//! JSON formats, the function mini-language, job execution and the
//! verification suite behind the `slicecalc` command-line tool.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod job;
pub mod json;
pub mod lang;
pub mod random;
pub mod verify;

pub use slicecalc_core as core;
