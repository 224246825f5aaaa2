//! Dagger categories with numerical completeness structure, realized over
//! finite-dimensional Hilbert spaces and unitary representations of finite
//! groups, with a seeded property-test harness.

pub mod completion;
pub mod error;
pub mod fdhilb;
pub mod harness;
pub mod json;
pub mod linalg;
pub mod star;
pub mod urep;

pub use error::{Error, Result};
