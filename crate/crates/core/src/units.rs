//! Physical constants and unit conversions.
//!
//! Configuration uses MeV for energies/momenta/masses and fm for lengths.
//! Internally lengths are MeV⁻¹, so `r[MeV⁻¹] = r[fm] / HBAR_C`.

/// ħc in MeV·fm.
pub const HBAR_C: f64 = 197.326_980_4;

/// Fine-structure constant.
pub const ALPHA: f64 = 1.0 / 137.035_999_084;

/// (ħc)² expressed in MeV²·barn (1 b = 100 fm²). A cross section
/// `f / p²` in natural units is `BARN_MEV2 * f / p[MeV]²` barn.
pub const BARN_MEV2: f64 = HBAR_C * HBAR_C / 100.0;

pub fn fm_to_inverse_mev(r_fm: f64) -> f64 {
    r_fm / HBAR_C
}

pub fn inverse_mev_to_fm(r: f64) -> f64 {
    r * HBAR_C
}

/// Converts a cross section in MeV⁻² to barn.
pub fn natural_to_barn(dsigma: f64) -> f64 {
    dsigma * BARN_MEV2
}

/// Nuclear radius estimate `r0 · A^{1/3}` in fm.
pub fn nuclear_radius_fm(r0_fm: f64, mass_number: u32) -> f64 {
    r0_fm * f64::from(mass_number).cbrt()
}
