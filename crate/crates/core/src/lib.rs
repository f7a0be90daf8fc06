//! Finite classical polar spaces, their Grassmann graphs, polar Johnson
//! graphs, and verifiers that recognize apartments from graph-theoretic data.

pub mod apartments;
pub mod error;
pub mod graphs;
pub mod grassmann;
pub mod io;
pub mod linalg;
pub mod polar;
pub mod search;
pub mod workload;

pub use error::{Error, Result};
