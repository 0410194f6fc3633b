//! Spectral radii of linear trees and generalized Shearer sequences.

pub mod diagonalize;
pub mod error;
pub mod expr;
pub mod limits;
pub mod numeric;
pub mod poly;
pub mod shearer;
pub mod spectral;
pub mod tree_model;
pub mod variational;

pub use error::Error;
