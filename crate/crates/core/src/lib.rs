//! Upper bounds for the independence ratio of distance graphs on the sphere
//! and the independence density of the unit-distance graph in R^n.

pub mod bqp;
pub mod certio;
pub mod conic;
pub mod configs;
pub mod error;
pub mod finitetheta;
pub mod profiles;
pub mod separation;
pub mod specfun;
pub mod verifier;

pub use error::{Error, Rejection, Result};
