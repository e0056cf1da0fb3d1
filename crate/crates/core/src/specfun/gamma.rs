//! Complex log-gamma, digamma and the Coulomb phase σ_l.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// B_{2n} / (2n (2n-1)) for the Stirling series, n = 1..=8.
const STIRLING: [f64; 8] = [
    1.0 / 12.0,
    -1.0 / 360.0,
    1.0 / 1260.0,
    -1.0 / 1680.0,
    1.0 / 1188.0,
    -691.0 / 360_360.0,
    1.0 / 156.0,
    -3617.0 / 122_400.0,
];

/// B_{2n} / (2n) for the digamma asymptotic series, n = 1..=8.
const DIGAMMA_ASYM: [f64; 8] = [
    1.0 / 12.0,
    -1.0 / 120.0,
    1.0 / 252.0,
    -1.0 / 240.0,
    1.0 / 132.0,
    -691.0 / 32_760.0,
    1.0 / 12.0,
    -3617.0 / 8160.0,
];

const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_8;

fn check_pole(z: Complex64) -> Result<()> {
    if z.im == 0.0 && z.re <= 0.0 && z.re.fract() == 0.0 {
        return Err(Error::Pole(z.re));
    }
    Ok(())
}

/// Principal-branch log Γ(z).
///
/// For Re z ≥ 1/2 the imaginary part is the continuous branch (it is built
/// from a shifted Stirling series and a sum of principal logarithms, so it
/// may exceed π in magnitude). Left of that line the reflection formula is
/// used and the imaginary part is only defined modulo 2π.
pub fn log_gamma_complex(z: Complex64) -> Result<Complex64> {
    check_pole(z)?;
    if z.re < 0.5 {
        let reflected = log_gamma_complex(Complex64::new(1.0, 0.0) - z)?;
        let sin_pz = (z * PI).sin();
        return Ok(Complex64::new(PI.ln(), 0.0) - sin_pz.ln() - reflected);
    }
    let mut w = z;
    let mut shift = Complex64::new(0.0, 0.0);
    while w.re < 10.0 {
        shift += w.ln();
        w += 1.0;
    }
    let inv = w.inv();
    let inv2 = inv * inv;
    let mut series = Complex64::new(0.0, 0.0);
    let mut power = inv;
    for c in STIRLING {
        series += power * c;
        power *= inv2;
    }
    Ok((w - 0.5) * w.ln() - w + LN_SQRT_2PI + series - shift)
}

/// Complex digamma ψ(z) = Γ'(z)/Γ(z).
pub fn digamma_complex(z: Complex64) -> Result<Complex64> {
    check_pole(z)?;
    if z.re < 0.5 {
        // ψ(z) = ψ(1 - z) - π cot(π z)
        let reflected = digamma_complex(Complex64::new(1.0, 0.0) - z)?;
        let pz = z * PI;
        return Ok(reflected - pz.cos() / pz.sin() * PI);
    }
    let mut w = z;
    let mut shift = Complex64::new(0.0, 0.0);
    while w.re < 8.0 {
        shift += w.inv();
        w += 1.0;
    }
    let inv = w.inv();
    let inv2 = inv * inv;
    let mut series = Complex64::new(0.0, 0.0);
    let mut power = inv2;
    for c in DIGAMMA_ASYM {
        series += power * c;
        power *= inv2;
    }
    Ok(w.ln() - inv * 0.5 - series - shift)
}

/// Coulomb phase shift σ_l(η) = Arg Γ(l + 1 + iη), continuous in η with
/// σ_l(0) = 0.
pub fn coulomb_sigma(l: u32, eta: f64) -> f64 {
    if eta == 0.0 {
        return 0.0;
    }
    // Re z ≥ 1 so the pole check cannot fail.
    log_gamma_complex(Complex64::new(f64::from(l) + 1.0, eta))
        .map(|v| v.im)
        .unwrap_or(f64::NAN)
}

/// σ_0..=σ_lmax by the recurrence σ_{l+1} = σ_l + atan(η / (l+1)).
pub fn coulomb_sigma_all(lmax: usize, eta: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(lmax + 1);
    let mut sigma = coulomb_sigma(0, eta);
    out.push(sigma);
    for l in 1..=lmax {
        sigma += eta.atan2(l as f64);
        out.push(sigma);
    }
    out
}
