//! Exact finite-truncation models of Cuntz algebra representations arising
//! from iterated function systems.

pub mod error;
pub mod exact;
pub mod ifs;
pub mod measure;
pub mod symbolic;

pub use error::{Error, Result};
