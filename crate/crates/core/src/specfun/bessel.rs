//! Spherical Bessel functions of the first and second kind, and the
//! modified spherical Bessel function of the first kind.
//!
//! `j_l` uses the small-argument series for z < 1, upward recurrence when
//! z ≥ l, and Miller's downward recurrence otherwise. `n_l` is always
//! computed upward, which is stable for the irregular solution.

use crate::error::{Error, Result};

/// Rescaling threshold for the downward recurrences.
const BIG: f64 = 1e250;

/// Ascending series for `j_l(z)`; accurate for |z| ≲ 1 at any order.
fn j_series(l: u32, z: f64) -> f64 {
    let mut lead = 1.0;
    for k in 1..=l {
        lead *= z / f64::from(2 * k + 1);
    }
    if lead == 0.0 {
        return 0.0;
    }
    let half_z2 = -0.5 * z * z;
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 1..200u32 {
        term *= half_z2 / (f64::from(k) * f64::from(2 * l + 2 * k + 1));
        sum += term;
        if term.abs() < 1e-17 * sum.abs() {
            break;
        }
    }
    lead * sum
}

/// `j_0..=j_lmax` at `z`.
///
/// Negative arguments are handled through the parity `j_l(-z) = (-1)^l j_l(z)`.
pub fn spherical_bessel_j_all(lmax: u32, z: f64) -> Vec<f64> {
    let n = lmax as usize + 1;
    if z < 0.0 {
        let mut out = spherical_bessel_j_all(lmax, -z);
        out.iter_mut().skip(1).step_by(2).for_each(|v| *v = -*v);
        return out;
    }
    let mut out = vec![0.0; n];
    if z == 0.0 {
        out[0] = 1.0;
        return out;
    }
    if z < 1.0 {
        for (l, slot) in out.iter_mut().enumerate() {
            *slot = j_series(l as u32, z);
        }
        return out;
    }

    let (s, c) = z.sin_cos();
    let j0 = s / z;
    let j1 = s / (z * z) - c / z;
    out[0] = j0;
    if n == 1 {
        return out;
    }
    out[1] = j1;

    if f64::from(lmax) <= z {
        for l in 1..lmax as usize {
            out[l + 1] = (2 * l + 1) as f64 / z * out[l] - out[l - 1];
        }
        return out;
    }

    // Miller: start well above both lmax and z so the minimal solution dominates.
    let top = f64::from(lmax).max(z);
    let start = (top + 20.0 + (40.0 * top).sqrt()).ceil() as usize;
    let mut upper = 0.0_f64;
    let mut current = 1.0_f64;
    let mut trial = vec![0.0; n];
    for l in (1..=start).rev() {
        let lower = (2 * l + 1) as f64 / z * current - upper;
        upper = current;
        current = lower;
        if l - 1 < n {
            trial[l - 1] = current;
        }
        if current.abs() > BIG {
            current /= BIG;
            upper /= BIG;
            trial.iter_mut().for_each(|v| *v /= BIG);
        }
    }
    // `current` is j_0 and `upper` is j_1 of the unnormalized sequence.
    let scale = if j0.abs() >= j1.abs() {
        j0 / current
    } else {
        j1 / upper
    };
    for (slot, t) in out.iter_mut().zip(trial) {
        *slot = t * scale;
    }
    out
}

/// Spherical Bessel function `j_l(z)`.
pub fn spherical_bessel_j(l: u32, z: f64) -> f64 {
    spherical_bessel_j_all(l, z)[l as usize]
}

/// `n_0..=n_lmax` at `z > 0` by upward recurrence.
pub fn spherical_bessel_n_all(lmax: u32, z: f64) -> Result<Vec<f64>> {
    if !(z > 0.0) {
        return Err(Error::domain(
            "spherical_bessel_n",
            format!("n_l diverges at z = {z}; requires z > 0"),
        ));
    }
    let n = lmax as usize + 1;
    let (s, c) = z.sin_cos();
    let mut out = vec![0.0; n];
    out[0] = -c / z;
    if n > 1 {
        out[1] = -c / (z * z) - s / z;
    }
    for l in 1..n.saturating_sub(1) {
        out[l + 1] = (2 * l + 1) as f64 / z * out[l] - out[l - 1];
    }
    Ok(out)
}

/// Spherical Neumann function `n_l(z)`, z > 0.
pub fn spherical_bessel_n(l: u32, z: f64) -> Result<f64> {
    Ok(spherical_bessel_n_all(l, z)?[l as usize])
}

/// `j_{l-1}(z)` with the convention `j_{-1}(z) = -n_0(z) = cos z / z`.
pub fn spherical_bessel_j_lower(l: u32, z: f64) -> f64 {
    if l == 0 {
        z.cos() / z
    } else {
        spherical_bessel_j(l - 1, z)
    }
}

/// Value and derivative `(j_l(z), j_l'(z))` for z > 0, from
/// `j_l' = j_{l-1} - (l+1) j_l / z`.
pub fn spherical_bessel_j_with_derivative(l: u32, z: f64) -> (f64, f64) {
    let all = spherical_bessel_j_all(l, z);
    let jl = all[l as usize];
    let lower = if l == 0 { z.cos() / z } else { all[l as usize - 1] };
    (jl, lower - f64::from(l + 1) * jl / z)
}

/// Value and derivative `(n_l(z), n_l'(z))` for z > 0, with `n_{-1} = j_0`.
pub fn spherical_bessel_n_with_derivative(l: u32, z: f64) -> Result<(f64, f64)> {
    let all = spherical_bessel_n_all(l, z)?;
    let nl = all[l as usize];
    let lower = if l == 0 { z.sin() / z } else { all[l as usize - 1] };
    Ok((nl, lower - f64::from(l + 1) * nl / z))
}

fn i_series(l: u32, z: f64) -> f64 {
    let mut lead = 1.0;
    for k in 1..=l {
        lead *= z / f64::from(2 * k + 1);
    }
    if lead == 0.0 {
        return 0.0;
    }
    let half_z2 = 0.5 * z * z;
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 1..200u32 {
        term *= half_z2 / (f64::from(k) * f64::from(2 * l + 2 * k + 1));
        sum += term;
        if term < 1e-17 * sum {
            break;
        }
    }
    lead * sum
}

/// Modified spherical Bessel functions `i_0..=i_lmax` at `z ≥ 0`,
/// `i_l(z) = i^{-l} j_l(iz)`.
pub fn modified_spherical_bessel_i_all(lmax: u32, z: f64) -> Vec<f64> {
    let n = lmax as usize + 1;
    let mut out = vec![0.0; n];
    if z == 0.0 {
        out[0] = 1.0;
        return out;
    }
    if z < 1.0 {
        for (l, slot) in out.iter_mut().enumerate() {
            *slot = i_series(l as u32, z);
        }
        return out;
    }
    // Downward recurrence i_{l-1} = i_{l+1} + (2l+1)/z i_l is stable for the
    // decreasing solution; normalize on i_0 = sinh z / z.
    let top = f64::from(lmax).max(z);
    let start = (f64::from(lmax) + 20.0 + (40.0 * top).sqrt()).ceil() as usize;
    let mut upper = 0.0_f64;
    let mut current = 1.0_f64;
    let mut trial = vec![0.0; n];
    for l in (1..=start).rev() {
        let lower = upper + (2 * l + 1) as f64 / z * current;
        upper = current;
        current = lower;
        if l - 1 < n {
            trial[l - 1] = current;
        }
        if current.abs() > BIG {
            current /= BIG;
            upper /= BIG;
            trial.iter_mut().for_each(|v| *v /= BIG);
        }
    }
    let i0 = z.sinh() / z;
    let scale = i0 / current;
    for (slot, t) in out.iter_mut().zip(trial) {
        *slot = t * scale;
    }
    out
}

/// Value and derivative of `i_l` at z > 0, with `i_l' = i_{l+1} + l i_l / z`.
pub fn modified_spherical_bessel_i_with_derivative(l: u32, z: f64) -> (f64, f64) {
    let all = modified_spherical_bessel_i_all(l + 1, z);
    let il = all[l as usize];
    (il, all[l as usize + 1] + f64::from(l) * il / z)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn origin_values() {
        assert_eq!(spherical_bessel_j(0, 0.0), 1.0);
        assert_eq!(spherical_bessel_j(1, 0.0), 0.0);
        assert_eq!(spherical_bessel_j(7, 0.0), 0.0);
    }

    #[test]
    fn closed_forms() {
        // sin(2)/2 and the n_0, n_1 closed forms at 40 digits.
        assert_relative_eq!(
            spherical_bessel_j(0, 2.0),
            0.454_648_713_412_840_85,
            max_relative = 1e-14
        );
        assert_relative_eq!(
            spherical_bessel_n(0, 1.0).unwrap(),
            -0.540_302_305_868_139_7,
            max_relative = 1e-14
        );
        assert_relative_eq!(
            spherical_bessel_n(1, 1.0).unwrap(),
            -1.381_773_290_676_036_2,
            max_relative = 1e-14
        );
        assert!(spherical_bessel_n(0, std::f64::consts::FRAC_PI_2).unwrap().abs() < 1e-16);
    }

    #[test]
    fn neumann_rejects_origin() {
        assert!(matches!(
            spherical_bessel_n(0, 0.0),
            Err(Error::Domain { .. })
        ));
    }

    #[test]
    fn lower_order_convention() {
        let z = 1.7;
        assert_relative_eq!(
            spherical_bessel_j_lower(0, z),
            -spherical_bessel_n(0, z).unwrap(),
            max_relative = 1e-15
        );
    }

    #[test]
    fn series_and_recurrence_agree_at_switch() {
        for l in 0..12 {
            let below = spherical_bessel_j(l, 1.0 - 1e-12);
            let above = spherical_bessel_j(l, 1.0);
            assert_relative_eq!(below, above, max_relative = 1e-10);
        }
    }

    #[test]
    fn high_order_small_argument() {
        // j_10(0.5) from the leading series term times its first correction.
        let z: f64 = 0.5;
        let mut df = 1.0;
        for k in 1..=10 {
            df *= f64::from(2 * k + 1);
        }
        let lead = z.powi(10) / df * (1.0 - z * z / (2.0 * 23.0));
        assert_relative_eq!(spherical_bessel_j(10, z), lead, max_relative = 1e-6);
    }

    #[test]
    fn large_argument_against_asymptotic() {
        let z = 3000.0;
        for l in [0u32, 3, 10] {
            // Two leading terms of the Hankel expansion.
            let phase = z - f64::from(l) * std::f64::consts::FRAC_PI_2;
            let c1 = f64::from(l * (l + 1)) / (2.0 * z);
            let asym = (phase.sin() + c1 * phase.cos()) / z;
            assert!((spherical_bessel_j(l, z) - asym).abs() < 1e-3 / z);
        }
    }

    #[test]
    fn derivative_matches_finite_difference() {
        let h = 1e-5;
        for l in 0..6 {
            for &z in &[0.7, 2.48, 9.3] {
                let (_, d) = spherical_bessel_j_with_derivative(l, z);
                let fd = (spherical_bessel_j(l, z + h) - spherical_bessel_j(l, z - h)) / (2.0 * h);
                assert_relative_eq!(d, fd, epsilon = 1e-9, max_relative = 1e-7);
                let (_, dn) = spherical_bessel_n_with_derivative(l, z).unwrap();
                let fdn = (spherical_bessel_n(l, z + h).unwrap()
                    - spherical_bessel_n(l, z - h).unwrap())
                    / (2.0 * h);
                assert_relative_eq!(dn, fdn, epsilon = 1e-9, max_relative = 1e-7);
            }
        }
    }

    #[test]
    fn modified_closed_forms() {
        let z: f64 = 2.3;
        let i = modified_spherical_bessel_i_all(1, z);
        assert_relative_eq!(i[0], z.sinh() / z, max_relative = 1e-14);
        assert_relative_eq!(
            i[1],
            (z * z.cosh() - z.sinh()) / (z * z),
            max_relative = 1e-13
        );
        let (_, d) = modified_spherical_bessel_i_with_derivative(0, z);
        assert_relative_eq!(d, i[1], max_relative = 1e-14);
    }
}
