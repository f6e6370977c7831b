//! Simulation of ℤ_d parafermion defects in a qudit plaquette model.

pub mod deform;
pub mod error;
pub mod gates;
pub mod lattice;
pub mod modular;
pub mod pauli;
pub mod protocols;
pub mod resources;
pub mod runner;
pub mod statevector;
pub mod tableau;
pub mod theory;

pub use error::{Error, Result};
