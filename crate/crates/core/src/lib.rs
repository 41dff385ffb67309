pub mod app;
pub mod decode;
pub mod enhance;
pub mod extract;
pub mod image;
pub mod layout;
pub mod synth;
