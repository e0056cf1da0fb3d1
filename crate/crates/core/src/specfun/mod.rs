//! Special functions for the radial bases.

pub mod bessel;
pub mod coulomb;
pub mod gamma;

pub use bessel::{
    modified_spherical_bessel_i_all, modified_spherical_bessel_i_with_derivative,
    spherical_bessel_j, spherical_bessel_j_all, spherical_bessel_j_lower,
    spherical_bessel_j_with_derivative, spherical_bessel_n, spherical_bessel_n_all,
    spherical_bessel_n_with_derivative,
};
pub use coulomb::{
    coulomb_c_coefficient, coulomb_phase_derivative, coulomb_wave, stationary_point_velocity,
    CoulombParams, CoulombWave,
};
pub use gamma::{coulomb_sigma, coulomb_sigma_all, digamma_complex, log_gamma_complex};

/// Which radial basis a quantity refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Basis {
    Free,
    Coulomb,
}

/// A real radial wavefunction value tagged with its basis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadialWaveValue {
    pub value: f64,
    pub r_times_k: f64,
    pub basis: Basis,
}

impl RadialWaveValue {
    /// `√(2/π) ρ j_l(ρ)`.
    pub fn free(l: u32, rho: f64) -> Self {
        Self {
            value: (2.0 / std::f64::consts::PI).sqrt() * rho * spherical_bessel_j(l, rho),
            r_times_k: rho,
            basis: Basis::Free,
        }
    }

    pub fn coulomb(l: u32, eta: f64, rho: f64) -> crate::Result<Self> {
        Ok(Self {
            value: coulomb_wave(l, eta, rho)?,
            r_times_k: rho,
            basis: Basis::Coulomb,
        })
    }
}
