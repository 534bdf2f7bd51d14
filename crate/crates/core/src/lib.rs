//! Pseudospectral toolkit for low-Mach compressible Navier-Stokes flows on
//! periodic boxes, their incompressible limit and the acoustic wave system
//! that separates the two.
//!
//! The crate is organised bottom-up: [`torus`] owns lattices, fields and
//! transforms; [`littlewood_paley`] measures fields in dyadic norms;
//! [`operators`] holds the projections, the acoustic basis and the bilinear
//! couplings; [`resonance`] classifies mode triples and builds the averaged
//! limit; [`solvers`] integrates the three systems in time; [`experiments`]
//! runs convergence studies and writes reports.

pub mod error;
pub mod experiments;
pub mod littlewood_paley;
pub mod operators;
pub mod resonance;
pub mod solvers;
pub mod torus;
pub mod trajectory;

pub use error::{Error, Result};
pub use num_complex::Complex64;
