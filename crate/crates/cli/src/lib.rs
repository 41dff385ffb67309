//! Command-line front end for `braille-core` and the keypad service.

pub mod commands;
pub mod server;
