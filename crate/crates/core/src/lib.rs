// NaN-rejecting `!(x > y)` checks and full-precision quadrature constants are intended.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::excessive_precision, clippy::redundant_guards, clippy::type_complexity, clippy::needless_range_loop)]

pub mod envelope;
pub mod error;
pub mod evolute;
pub mod export;
pub mod expr;
pub mod frenet;
pub mod jet;
pub mod monge;
pub mod numeric;
pub mod pseudo;
pub mod report;
pub mod rolling;

pub use error::{GeomError, Result};
