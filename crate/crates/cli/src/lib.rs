//! Library half of the batch front end: argument-independent command
//! implementations, the text parsers, presets and file emitters. The binary
//! in `main.rs` is a thin clap wrapper over [`commands`].

pub mod commands;
pub mod output;
pub mod parse;
pub mod presets;
