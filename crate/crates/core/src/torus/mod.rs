//! Rational-period lattices, Fourier coefficient storage and the spectral
//! primitives every other module is built on.

mod field;
mod lattice;

pub use field::{
    dealiased_product, forward_transform, grid_product, inverse_transform, partial,
    spectral_derivative, DerivativeKind, GridField, SpectralField,
};
pub use lattice::{Lattice, LatticeSpec, Period, MAX_DIM};
