#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod catalog;
pub mod cli_io;
pub mod linalg;
pub mod modal;
pub mod params;
pub mod resolvent;
pub mod simulate;
pub mod stability;
