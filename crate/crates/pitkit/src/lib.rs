pub mod circuit;
pub mod cli;
pub mod error;
pub mod field;
pub mod kernels;
pub mod oracle;
pub mod pit_black;
pub mod pit_white;
pub mod poly;

pub use error::{Error, Result};
