//! Exact combinatorics of wonderful compactifications, compactified
//! apartments, big-cell seminorms and the lattice model of the SL_n building
//! over `Q_p(sqrt p)`.

pub mod apartment;
pub mod building;
pub mod error;
pub mod linalg;
pub mod multval;
pub mod par;
pub mod rational;
pub mod rootsys;
pub mod theta;
pub mod wonderful;

pub use error::{Error, Result};
