//! Controllability analysis of arrays of identical linear systems driven by
//! relative actuators.

pub mod array_model;
pub mod cli;
pub mod controllability;
pub mod corpus;
pub mod error;
pub mod genographe;
pub mod linalg;
pub mod nnls;
pub mod oracle;
pub mod report;
pub mod spectral;
pub mod tolerances;

pub use error::{Error, Result};
pub use tolerances::Tolerances;
