//! Exact and numeric verification of theta-constant identities.

pub mod cyclotomic;
pub mod qseries;
pub mod thetaforms;
pub mod arith;
pub mod numeric;
pub mod expr;
pub mod dsl;
pub mod identities;
pub mod cli;
