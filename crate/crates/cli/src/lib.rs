//! Pieces of the `fredent` tool that are useful outside the binary: the
//! scalar sweep experiments and output helpers.

pub mod experiments;
pub mod output;
