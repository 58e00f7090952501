//! Library surface of the `bnet` command-line tool, split out so the
//! integration and acceptance suites can drive the commands directly.

pub mod commands;
pub mod stats;
