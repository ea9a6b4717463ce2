//! File formats, reference oracles, the acceptance suite and the command implementations
//! behind the `hyp2` binary.

pub mod acceptance;
pub mod commands;
pub mod formats;
pub mod generate;
pub mod oracle;
