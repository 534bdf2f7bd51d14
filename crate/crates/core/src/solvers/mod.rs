//! Time integration of the compressible system, its incompressible limit
//! and the averaged acoustic system.
//!
//! All three share one scheme: a second-order Lawson step whose linear part
//! is applied exactly mode by mode, so the `1/eps` acoustic terms impose no
//! stability restriction. Steps live on the grid `t_i = T i / n`, which
//! makes restarts bit-identical.

mod checkpoint;
mod compressible;
mod config;
mod incompressible;
mod initial;
mod limit;
mod propagator;
mod scheme;

pub use checkpoint::{Checkpoint, CheckpointHeader, StateKind, CHECKPOINT_VERSION};
pub use compressible::{CompressibleSolver, CompressibleState};
pub use config::{Envelope, ForcingMode, ForcingSpec, SolverConfig, TimeGrid};
pub use incompressible::IncompressibleSolver;
pub use initial::generate_initial_data;
pub use limit::{Frozen, Interpolant, LimitSolver, VelocityField};
pub use propagator::{acoustic_viscous_propagator, transverse_factor, Propagator};
pub use scheme::{lawson_heun, Evolution, LinearSpace};
