//! Partial-wave phase shifts to second order in a unitary perturbation
//! theory, around either free spherical waves or exact Coulomb solutions,
//! and the wavepacket-regularized differential cross sections built from
//! them.
//!
//! The crate is organized bottom-up:
//!
//! * [`specfun`]: spherical Bessel/Neumann functions, complex log-gamma and
//!   digamma, regular Coulomb wavefunctions.
//! * [`pvquad`]: Gauss–Legendre panel quadrature, principal-value rules and
//!   the three second-order integrals.
//! * [`potential`]: potential descriptions, scenario parameters and the
//!   matrix-element kernels (selected by name through [`KernelRegistry`]).
//! * [`shifts`]: first/second-order shifts, the exact step-potential oracle
//!   and phase-shift tables.
//! * [`xsection`]: differential cross sections (selected by name through
//!   [`ModeRegistry`]).
//! * [`validation`]: the self-check suite behind `pwshift validate`.
//!
//! Everything is in natural units (ħ = c = 1) with energies and momenta in
//! MeV and lengths in MeV⁻¹; see [`units`] for the conversions.

// `!(x > 0.0)` is used on purpose so that NaN inputs are rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod potential;
pub mod pvquad;
pub mod shifts;
pub mod specfun;
pub mod units;
pub mod validation;
pub mod xsection;

pub use error::{Error, Result};
pub use potential::{
    Basis, Coulomb, KernelRegistry, KernelRequest, Masses, MatrixElementKernel, PotentialSpec,
    ScatteringScenario, ScenarioParams, ShortRangeProfile, SphericalStep,
};
pub use pvquad::{QuadratureSpec, SecondOrderTerms};
pub use shifts::{PhaseShiftRecord, PhaseShiftTable};
pub use xsection::{CrossSectionCurve, CrossSectionMode, ModeRegistry, WavepacketSpec};
