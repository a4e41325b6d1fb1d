//! Exact computer algebra for difference algebras: strongly etale algebras, strong cores,
//! limit degrees, Babbitt chains, compatibility, and difference Hopf algebras.

pub mod error;
pub mod exactfield;
pub mod expr;
pub mod findiff;
pub mod linalg;
pub mod poly;
pub mod diffpoly;
pub mod io;
pub mod towers;
pub mod hopf;
pub mod cli;

pub use error::{Error, Result};
pub use exactfield::{DifferenceField, FieldDescriptor, Scalar};
