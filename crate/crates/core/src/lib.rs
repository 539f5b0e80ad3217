//! Exact computations in the residue pairing between Artin–Schreier classes
//! and Artin–Hasse units, used to compare two descriptions of the subspace of
//! extension classes attached to a Serre weight.

pub mod artin_hasse;
pub mod check;
pub mod cli;
pub mod embvec;
pub mod error;
pub mod gf;
pub mod pairing;
pub mod phimod;
pub mod report;
pub mod series;
pub mod weights;

pub use error::{Error, Result};
