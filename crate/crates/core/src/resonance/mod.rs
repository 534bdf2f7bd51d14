//! Exact resonance classification on rational lattices, the averaged limit
//! couplings, small-divisor constants and the two-time-scale correctors.
//!
//! Mode norms are compared through the integers `|k|^2 * scale`, so a
//! triple is resonant exactly when its signed square roots cancel.

mod correctors;
mod divisors;
mod exact;
mod limits;
mod table;

pub use correctors::{
    assemble_correctors, oscillating_source, self_advection, CorrectorInputs, CorrectorParams,
    CorrectorSet, Correctors,
};
pub use divisors::{small_divisors, SmallDivisorReport, Witness};
pub use exact::{resonance_test, roots_sum_to_zero, Resonance, SignedRoot};
pub use limits::{limit_q1, limit_q2};
pub use table::{enumerate_resonance_sets, AcousticTriple, ResonanceTable, VelocityTriple};
