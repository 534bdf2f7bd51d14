//! Helmholtz projections, the acoustic eigenbasis and wave group, the
//! oscillating bilinear couplings and the pressure law.

mod acoustic;
mod bilinear;
mod helmholtz;
mod pressure;

pub use acoustic::{
    acoustic_inverse, acoustic_transform, branch, sg, slot_sign, wave_eigenvalue, wave_group,
    AcousticCoeffs, BRANCHES,
};
pub use bilinear::{
    a2_eps, a2_eps_modes, convective_term, q1_eps, q1_eps_modes, q2_eps, q2_eps_modes, ModeSum, ModeWindow,
    within_radius,
};
pub use helmholtz::{helmholtz_project, Projection};
pub use pressure::{
    nonlinear_coefficients, nonlinear_coefficients_within, viscous_factor, NonlinearCoefficients,
    PressureLaw,
};
