//! Regular Coulomb wavefunctions and related quantities.
//!
//! The regular solution is evaluated as `y_l(ρ) = √(2/π) F_l(η, ρ)`, with
//! `F_l` the standard regular Coulomb function. Two representations are
//! used:
//!
//! * the ascending power series `F_l = C_l ρ^{l+1} Σ_k a_k ρ^k`, summed in
//!   double-double arithmetic because the terms cancel strongly once ρ
//!   exceeds a few units;
//! * the large-ρ expansion `F_l = g cos θ + f sin θ` with
//!   `θ = ρ − η ln 2ρ − lπ/2 + σ_l`.
//!
//! The series is used up to `rho_switch = 20 + 2l`, the asymptotic form
//! beyond. Each evaluation carries its own error estimate; if neither
//! representation reaches [`CERTIFIED_ACCURACY`] a range error is returned.

use std::f64::consts::{FRAC_PI_2, PI};

use num_complex::Complex64;
use twofloat::TwoFloat;

use super::gamma::{coulomb_sigma, digamma_complex};
use crate::error::{Error, Result};

/// Absolute accuracy (relative to the unit asymptotic amplitude) each
/// evaluation must certify.
pub const CERTIFIED_ACCURACY: f64 = 1e-9;

/// Below this |η| the removable singularity of c_0 is handled by Taylor
/// expansion.
const SMALL_ETA: f64 = 1e-6;

/// Most negative η for which the normalization is evaluated.
const MIN_ETA: f64 = -30.0;

const SQRT_2_OVER_PI: f64 = 0.797_884_560_802_865_4;

/// Parameters of a Coulomb partial wave.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoulombParams {
    /// Dimensionless Coulomb strength η (> 0 repulsive).
    pub eta: f64,
    pub l: u32,
}

fn ln_c0(eta: f64) -> f64 {
    let x = 2.0 * PI * eta;
    if eta.abs() < SMALL_ETA {
        // x / (e^x - 1) = 1 - x/2 + x²/12 + O(x⁴)
        return 0.5 * (-0.5 * x + x * x / 12.0).ln_1p();
    }
    if x > 30.0 {
        // ln(e^x - 1) = x + ln(1 - e^{-x})
        0.5 * (x.ln() - x - (-(-x).exp()).ln_1p())
    } else if x > 0.0 {
        0.5 * (x.ln() - x.exp_m1().ln())
    } else {
        0.5 * ((-x).ln() - (-x.exp_m1()).ln())
    }
}

fn ln_c_coefficient(l: u32, eta: f64) -> Result<f64> {
    if eta < MIN_ETA {
        return Err(Error::range(
            "coulomb_c_coefficient",
            format!("eta = {eta} below {MIN_ETA}; attractive normalization not evaluated"),
        ));
    }
    let mut ln_c = ln_c0(eta);
    for s in 1..=l {
        let s = f64::from(s);
        ln_c += 0.5 * (eta * eta / (s * s)).ln_1p() - (2.0 * s + 1.0).ln();
    }
    Ok(ln_c)
}

/// Normalization `c_l(η)`: `c_0 = (2πη/(e^{2πη}−1))^{1/2}` and
/// `c_l = c_0/(2l+1)!! · Π_{s=1}^{l} (1+η²/s²)^{1/2}`.
pub fn coulomb_c_coefficient(l: u32, eta: f64) -> Result<f64> {
    Ok(ln_c_coefficient(l, eta)?.exp())
}

/// A regular Coulomb partial wave at fixed (l, η), with the
/// ρ-independent pieces precomputed.
#[derive(Debug, Clone)]
pub struct CoulombWave {
    params: CoulombParams,
    ln_c: f64,
    sigma: f64,
    rho_switch: f64,
}

/// A function value together with its estimated absolute error.
#[derive(Debug, Clone, Copy)]
struct Estimate {
    value: f64,
    error: f64,
}

impl CoulombWave {
    pub fn new(l: u32, eta: f64) -> Result<Self> {
        if !eta.is_finite() {
            return Err(Error::domain("coulomb_wave", format!("eta = {eta}")));
        }
        Ok(Self {
            params: CoulombParams { eta, l },
            ln_c: ln_c_coefficient(l, eta)?,
            sigma: coulomb_sigma(l, eta),
            rho_switch: 20.0 + 2.0 * f64::from(l),
        })
    }

    pub fn params(&self) -> CoulombParams {
        self.params
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn rho_switch(&self) -> f64 {
        self.rho_switch
    }

    /// Regular Coulomb function F_l(η, ρ), ρ ≥ 0.
    pub fn regular(&self, rho: f64) -> Result<f64> {
        if !(rho >= 0.0) {
            return Err(Error::domain("coulomb_wave", format!("rho = {rho} < 0")));
        }
        if rho == 0.0 {
            return Ok(0.0);
        }
        let methods: [fn(&Self, f64) -> Option<Estimate>; 2] = if rho <= self.rho_switch {
            [Self::series, Self::asymptotic]
        } else {
            [Self::asymptotic, Self::series]
        };
        for method in methods {
            if let Some(est) = method(self, rho) {
                if est.error <= CERTIFIED_ACCURACY * est.value.abs().max(1.0) {
                    return Ok(est.value);
                }
            }
        }
        Err(Error::range(
            "coulomb_wave",
            format!(
                "cannot certify F_{}(eta = {}, rho = {rho}) to {CERTIFIED_ACCURACY:e}",
                self.params.l, self.params.eta
            ),
        ))
    }

    /// `y_l(ρ) = √(2/π) F_l(η, ρ)`.
    pub fn eval(&self, rho: f64) -> Result<f64> {
        Ok(SQRT_2_OVER_PI * self.regular(rho)?)
    }

    /// Ascending series in double-double arithmetic.
    fn series(&self, rho: f64) -> Option<Estimate> {
        let CoulombParams { eta, l } = self.params;
        let two_eta_rho = TwoFloat::new_mul(2.0 * eta, rho);
        let rho2 = TwoFloat::new_mul(rho, rho);
        let lf = f64::from(l);

        let mut prev = TwoFloat::from(0.0);
        let mut cur = TwoFloat::from(1.0);
        let mut sum = cur;
        let mut largest = 1.0_f64;
        // Terms decrease monotonically once j(j+2l+1) exceeds this.
        let decay_start = 2.0 * (rho * rho + 2.0 * eta.abs() * rho);
        for j in 1..10_000u32 {
            let jf = f64::from(j);
            let denom = jf * (jf + 2.0 * lf + 1.0);
            let next = if j == 1 {
                TwoFloat::new_mul(eta, rho) / (lf + 1.0)
            } else {
                (two_eta_rho * cur - rho2 * prev) / denom
            };
            prev = cur;
            cur = next;
            sum += cur;
            let mag = f64::from(cur).abs();
            largest = largest.max(mag);
            if !largest.is_finite() {
                return None;
            }
            let tiny = 1e-32 * f64::from(sum).abs().max(f64::MIN_POSITIVE);
            if denom > decay_start && mag < tiny && f64::from(prev).abs() < tiny {
                let sum = f64::from(sum);
                if sum == 0.0 {
                    return Some(Estimate { value: 0.0, error: 0.0 });
                }
                let ln_scale = self.ln_c + (lf + 1.0) * rho.ln();
                let value = sum.signum() * (ln_scale + sum.abs().ln()).exp();
                let error = (ln_scale + largest.ln()).exp() * 1e-30 * jf;
                return Some(Estimate { value, error });
            }
        }
        None
    }

    /// Large-ρ expansion, truncated at its smallest term.
    fn asymptotic(&self, rho: f64) -> Option<Estimate> {
        let CoulombParams { eta, l } = self.params;
        let ll = f64::from(l) * f64::from(l + 1);
        let (mut fk, mut gk) = (1.0_f64, 0.0_f64);
        let (mut f, mut g) = (1.0_f64, 0.0_f64);
        let mut last = f64::INFINITY;
        let mut error = f64::INFINITY;
        for k in 0..200u32 {
            let kf = f64::from(k);
            let denom = (2.0 * kf + 2.0) * rho;
            let a = (2.0 * kf + 1.0) * eta / denom;
            let b = (ll - kf * (kf + 1.0) + eta * eta) / denom;
            let (nf, ng) = (a * fk - b * gk, a * gk + b * fk);
            let mag = nf.abs() + ng.abs();
            if mag > last {
                // Divergent from here on; the last included term bounds the error.
                error = last;
                break;
            }
            fk = nf;
            gk = ng;
            f += fk;
            g += gk;
            last = mag;
            if mag <= 1e-17 * (f.abs() + g.abs()) {
                error = mag + 4.0 * f64::EPSILON;
                break;
            }
        }
        if !error.is_finite() {
            return None;
        }
        let theta = rho - eta * (2.0 * rho).ln() - f64::from(l) * FRAC_PI_2 + self.sigma;
        let (s, c) = theta.sin_cos();
        // Phase error grows with the argument size through range reduction.
        let phase_error = f64::EPSILON * (rho.abs() + (eta * (2.0 * rho).ln()).abs());
        Some(Estimate {
            value: g * c + f * s,
            error: error + phase_error,
        })
    }
}

/// `y_l^{(C)}` at `ρ = p r` for Coulomb strength η.
pub fn coulomb_wave(l: u32, eta: f64, rho: f64) -> Result<f64> {
    CoulombWave::new(l, eta)?.eval(rho)
}

/// ∂φ_l/∂k for the Coulomb asymptotic phase
/// `φ_l = kr − η(k) ln 2kr − lπ/2 + σ_l(η(k))`, with `η(k) = Z_tZ_pαm / k`:
///
/// `r + (Z_tZ_pαm/k²) {ln(2kr/e) − Re ψ(l+1+iη)}`.
pub fn coulomb_phase_derivative(l: u32, eta: f64, k: f64, r: f64) -> Result<f64> {
    if !(k > 0.0 && r > 0.0) {
        return Err(Error::domain(
            "coulomb_phase_derivative",
            format!("requires k > 0 and r > 0, got k = {k}, r = {r}"),
        ));
    }
    if eta == 0.0 {
        return Ok(r);
    }
    let psi = digamma_complex(Complex64::new(f64::from(l) + 1.0, eta))?;
    Ok(r + eta / k * ((2.0 * k * r).ln() - 1.0 - psi.re))
}

/// Largest root `v₀` of the stationary-phase condition
/// `1 + g/(v²ρ) {ln(2vρ/e) − Re ψ(l+1+i g/v)} = 0` in the dimensionless
/// velocity `v = k/m`, for coupling `g = Z_tZ_pα` and `ρ = m r`.
pub fn stationary_point_velocity(l: u32, coupling: f64, rho: f64) -> Result<f64> {
    if !(rho > 0.0) || coupling == 0.0 {
        return Err(Error::domain(
            "stationary_point_velocity",
            format!("requires rho > 0 and nonzero coupling, got rho = {rho}, g = {coupling}"),
        ));
    }
    let condition = |v: f64| -> Result<f64> {
        let psi = digamma_complex(Complex64::new(f64::from(l) + 1.0, coupling / v))?;
        Ok(1.0 + coupling / (v * v * rho) * ((2.0 * v * rho).ln() - 1.0 - psi.re))
    };
    // Scan downward on a log grid for the first sign change, then bisect.
    let mut hi = 10.0_f64;
    let mut h_hi = condition(hi)?;
    let mut lo = hi;
    let mut found = false;
    while lo > 1e-14 {
        lo = hi * 0.8;
        let h_lo = condition(lo)?;
        if h_lo.signum() != h_hi.signum() {
            found = true;
            break;
        }
        hi = lo;
        h_hi = h_lo;
    }
    if !found {
        return Err(Error::range(
            "stationary_point_velocity",
            format!("no sign change found for rho = {rho}"),
        ));
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        let h_mid = condition(mid)?;
        if h_mid.signum() == h_hi.signum() {
            hi = mid;
            h_hi = h_mid;
        } else {
            lo = mid;
        }
        if hi - lo <= 1e-15 * hi {
            break;
        }
    }
    Ok(0.5 * (lo + hi))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::specfun::bessel::spherical_bessel_j;
    use approx::assert_relative_eq;

    #[test]
    fn c_coefficient_limits() {
        assert_eq!(coulomb_c_coefficient(0, 0.0).unwrap(), 1.0);
        assert_relative_eq!(coulomb_c_coefficient(1, 0.0).unwrap(), 1.0 / 3.0, max_relative = 1e-15);
        assert_relative_eq!(coulomb_c_coefficient(3, 0.0).unwrap(), 1.0 / 105.0, max_relative = 1e-15);
    }

    #[test]
    fn c_coefficient_direct_evaluation() {
        // Straight evaluation of the defining formula at 40 digits.
        let eta = 0.0461;
        assert_relative_eq!(
            coulomb_c_coefficient(0, eta).unwrap(),
            0.928_522_741_860_064_5,
            max_relative = 1e-14
        );
        let naive = (2.0 * PI * eta / ((2.0 * PI * eta).exp() - 1.0)).sqrt();
        assert_relative_eq!(coulomb_c_coefficient(0, eta).unwrap(), naive, max_relative = 1e-13);
        let l2 = naive / 15.0 * ((1.0 + eta * eta) * (1.0 + eta * eta / 4.0)).sqrt();
        assert_relative_eq!(coulomb_c_coefficient(2, eta).unwrap(), l2, max_relative = 1e-13);
    }

    #[test]
    fn c_coefficient_continuous_through_zero() {
        for l in 0..4 {
            let mut prev = f64::INFINITY;
            for eps in [1e-3, 1e-5, 1e-7, 1e-9] {
                let gap = (coulomb_c_coefficient(l, eps).unwrap()
                    - coulomb_c_coefficient(l, -eps).unwrap())
                .abs();
                assert!(gap < prev);
                prev = gap;
            }
            assert!(prev < 1e-7);
        }
    }

    #[test]
    fn c_coefficient_attractive_guard() {
        assert!(matches!(
            coulomb_c_coefficient(0, -31.0),
            Err(Error::Range { .. })
        ));
        assert!(coulomb_c_coefficient(0, -29.0).unwrap().is_finite());
    }

    #[test]
    fn free_limit() {
        for rho in [0.0, 0.3, 2.0, 7.5] {
            assert_relative_eq!(
                coulomb_wave(0, 0.0, rho).unwrap(),
                SQRT_2_OVER_PI * rho.sin(),
                epsilon = 1e-15
            );
        }
        assert_eq!(coulomb_wave(3, 0.7, 0.0).unwrap(), 0.0);
    }

    #[test]
    fn against_extended_precision() {
        // F_l(η, ρ) at 40 digits.
        let cases: [(u32, f64, f64, f64); 12] = [
            (0, 0.0461, 0.5, 0.455_645_151_587_432_6),
            (0, 0.0461, 2.5, 0.682_897_273_653_682_4),
            (1, 0.0461, 5.0, -0.398_074_766_239_917_45),
            (2, 0.3, 10.0, 0.267_587_411_319_701_4),
            (0, 0.0461, 50.0, -0.483_447_962_152_245_94),
            (3, 1.5, 25.0, -0.833_534_146_995_936_2),
            (5, 0.0461, 30.0, -0.524_356_955_129_199_2),
            (0, 5.0, 1.0, 2.041_301_212_571_756e-5),
            (4, 0.02, 100.0, -0.485_661_064_990_952_8),
            (2, -0.5, 8.0, -0.120_882_245_474_036_2),
            (1, 2.0, 40.0, -0.435_025_585_650_682_7),
            (10, 0.1, 15.0, 0.134_981_835_983_862_8),
        ];
        for (l, eta, rho, want) in cases {
            let got = CoulombWave::new(l, eta).unwrap().regular(rho).unwrap();
            assert!(
                (got - want).abs() <= 1e-11 * want.abs().max(1e-3),
                "F_{l}({eta}, {rho}) = {got}, want {want}"
            );
        }
    }

    #[test]
    fn series_and_asymptotic_overlap() {
        for l in 0..6u32 {
            for &eta in &[0.0, 0.0461, 0.5, -0.3] {
                let wave = CoulombWave::new(l, eta).unwrap();
                let rho = wave.rho_switch();
                let s = wave.series(rho).unwrap();
                let a = wave.asymptotic(rho).unwrap();
                assert!(s.error < 1e-12 && a.error < 1e-12, "l={l} eta={eta}");
                assert!((s.value - a.value).abs() < 1e-9, "l={l} eta={eta}");
            }
        }
    }

    #[test]
    fn matches_riccati_bessel_at_zero_eta() {
        for l in 0..=5u32 {
            for i in 0..=100 {
                let rho = 0.5 * f64::from(i);
                let want = SQRT_2_OVER_PI * rho * spherical_bessel_j(l, rho);
                assert!((coulomb_wave(l, 0.0, rho).unwrap() - want).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn asymptotic_phase_at_rho_50() {
        let eta = 0.0461;
        let want = SQRT_2_OVER_PI * (50.0 - eta * 100f64.ln() + coulomb_sigma(0, eta)).sin();
        assert!((coulomb_wave(0, eta, 50.0).unwrap() - want).abs() < 2e-3);
    }

    #[test]
    fn phase_derivative() {
        assert_eq!(coulomb_phase_derivative(2, 0.0, 1.3, 4.0).unwrap(), 4.0);
        assert!(coulomb_phase_derivative(0, 0.0461, 237.0, 50.0).unwrap() > 0.0);
        assert!(coulomb_phase_derivative(0, 0.1, 0.0, 1.0).is_err());
    }

    #[test]
    fn stationary_root_decreases_with_rho() {
        let g = 2.0 / 137.035_999_084;
        let mut prev = f64::INFINITY;
        for rho in [1e2, 1e3, 1e4, 1e5, 1e6, 1e7] {
            let v0 = stationary_point_velocity(0, g, rho).unwrap();
            assert!(v0 > 0.0 && v0 < prev, "rho={rho}: {v0}");
            prev = v0;
        }
        assert!(prev < 1e-3);
    }
}
