//! Library surface of the batch front-end, shared by the binary and the
//! acceptance suite.

pub mod artifacts;
pub mod commands;
pub mod config;
pub mod verify;
