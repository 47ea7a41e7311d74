//! Numerical verification of frame-divergence and Codazzi-tensor identities.

pub mod codazzi;
pub mod config;
pub mod error;
pub mod expr;
pub mod geometry;
pub mod hypersurface;
pub mod polyfamily;
pub mod report;
pub mod roots;
pub mod suite;
pub mod sympoly;

pub use error::{Error, Result};
