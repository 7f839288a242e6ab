//! Numerical laboratory for the anisotropic porous medium equation
//! `u_t = Σ_i (u^{m_i})_{x_i x_i}`.
//!
//! * [`params`]: exponent sets, derived constants and admissibility.
//! * [`barrier`]: explicit super-solution profiles, barriers and envelopes.
//! * [`transform`]: the self-similar change of variables.
//! * [`solver`]: explicit conservative schemes for both frames.
//! * [`initial`]: initial-data generators.
//! * [`verify`]: numerical checks producing [`verify::CheckReport`]s.

pub mod barrier;
pub mod initial;
pub mod params;
pub mod quasi;
pub mod solver;
pub mod transform;
pub mod verify;
