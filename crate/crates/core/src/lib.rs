//! Finite-index subgroups of the modular group through their coset actions:
//! cuboid graphs, special polygons, independent generators and reduction.

pub mod cosets;
pub mod cuboid;
pub mod error;
pub mod geometry;
pub mod modint;
pub mod par;
pub mod polygon;
pub mod psl2;
pub mod reduce;

pub use cosets::{build, CosetSystem, Family, Label};
pub use error::{Error, Result};
pub use par::Execution;
pub use psl2::{Cusp, Psl2Elt};
