//! Open-system dynamics of small nuclear-spin networks.

// `!(x >= 0.0)` is used on purpose to reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod channels;
pub mod dynamics;
pub mod molecule;
pub mod qcore;
pub mod textfmt;
pub mod xcli;
