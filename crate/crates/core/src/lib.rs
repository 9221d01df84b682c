pub mod cli;
pub mod dewitt;
pub mod dynamics;
pub mod error;
pub mod geometry;
pub mod helmholtz;
pub mod observables;
pub mod ode;
pub mod quadrature;
pub mod quantum;
pub mod sources;
pub mod vector;

pub use error::{Error, Result};
