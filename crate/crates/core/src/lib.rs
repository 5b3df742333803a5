//! Spectral computations for compact quantum graphs with δ_s vertex
//! conditions: eigenvalues through eigenphase tracking of the bond scattering
//! matrix, eigenfunction s-points and s-domains, the Robin map on a marked
//! point set, spectral curves in the coupling parameter and their flow.

pub mod conditions;
pub mod count;
pub mod document;
pub mod eigenfunction;
pub mod error;
pub mod flow;
pub mod generate;
pub mod graph;
pub mod linalg;
pub mod robin;
pub mod scattering;
pub mod solver;
pub mod stats;

pub use error::{Error, ErrorClass, Result};
