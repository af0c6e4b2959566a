pub mod block_space;
pub mod ergodic;
pub mod error;
pub mod grid;
pub mod kernel;
pub mod lab;
pub mod norms;
pub mod oscillation;
pub mod sequences;

pub use error::{Error, Result};
