//! Library side of the command-line front end: bundle and trace file IO,
//! synthetic problem generation, the comparison chart, and the verification
//! suites. The binary in main.rs is a thin argument-parsing layer over this.

pub mod bundle;
pub mod commands;
pub mod csvio;
pub mod error;
pub mod svg;
pub mod tracefile;
pub mod verify;
