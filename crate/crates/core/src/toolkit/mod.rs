//! Random generators, form files and the verification harness.

pub mod harness;
pub mod io;
pub mod random;
