pub mod charclass;
pub mod continuation;
pub mod cohomology;
pub mod error;
pub mod fm;
pub mod givental;
pub mod linalg;
pub mod quantum;
pub mod scalars;
pub mod theorem;

pub use error::{Error, Result};

/// Version tag carried by every exported file.
pub const SCHEMA: &str = "flopcheck/1";
