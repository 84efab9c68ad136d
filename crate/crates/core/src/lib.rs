//! Simulation of SU(2)/SO(3) rotation representations on a compact
//! angular-momentum register, routed through discretized spherical harmonics
//! on a periodic cubic lattice.

pub mod error;
pub mod kickedtop;
pub mod lattice;
pub mod linalg;
pub mod phasest;
pub mod pipeline;
pub mod rotation;
pub mod shear;
pub mod specfun;
pub mod stateprep;
pub mod symm;

pub use error::{Error, Result};
pub use linalg::C64;
pub use rotation::Rotation;
pub use specfun::{CompactState, Spin, WignerMatrix};
