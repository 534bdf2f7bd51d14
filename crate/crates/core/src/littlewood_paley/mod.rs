//! Dyadic decomposition, Besov and Chemin-Lerner norms, and Bony's
//! paraproduct on the lattice.

pub mod bump;
mod blocks;
mod norms;
mod paraproduct;

pub use blocks::{compute_jb, dyadic_block, low_cut, BlockDecomposition};
pub use norms::{
    chemin_lerner_norm, norm, time_norm, Band, BlockProfile, Integrability, NormKind, NormSpec,
    ProfiledTrajectory, Summability,
};
pub use paraproduct::{bony_paraproduct, Paraproduct};
