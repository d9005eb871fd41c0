pub mod alphabet;
pub mod constructions;
pub mod error;
pub mod harness;
pub mod machine;
pub mod oracles;

pub use error::{Error, Result};
