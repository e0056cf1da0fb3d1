//! Self-checks run by `pwshift validate`.
//!
//! Each check recomputes a reference quantity by an independent route and
//! reports pass/fail with a one-line detail. Numeric errors inside a check
//! count as failures.

use std::f64::consts::PI;

use crate::error::Result;
use crate::potential::{Coulomb, FreeStepKernel, PotentialSpec, ScatteringScenario, ScenarioParams, SphericalStep};
use crate::pvquad::{sine_kernel_delta_sequence, principal_value_sine_transform, QuadratureSpec};
use crate::shifts::{exact_step_shift_unwrapped, first_order_shift, phase_shift_table, second_order_shift, LRange};
use crate::units::fm_to_inverse_mev;
use crate::xsection::{composite_cross_section, geometric_theta_grid, rutherford_reference, WavepacketSpec};

/// Reference proton–⁴He phase shifts: (l, δ^(1), δ^(2), exact well-only).
pub const REFERENCE_SHIFTS: [(u32, f64, f64, f64); 5] = [
    (0, 1.230, -0.316, 0.805),
    (1, 0.651, 0.299, 0.906),
    (2, 0.136, 0.050, 0.232),
    (3, 0.015, 0.003, 0.020),
    (4, 0.001, 0.000, 0.001),
];

/// Reduced mass used for the proton–⁴He scenario, MeV.
pub const HELIUM_REDUCED_MASS: f64 = 749.0;
/// Incident momentum, MeV.
pub const HELIUM_MOMENTUM: f64 = 237.0;
/// Well depth, MeV.
pub const HELIUM_WELL_DEPTH: f64 = -30.2;
/// 1.3 fm · 4^{1/3}.
pub const HELIUM_RADIUS_FM: f64 = 2.063_621_367_558_659;

/// Coulomb plus step potential of the proton–⁴He model.
pub fn proton_helium_potential() -> PotentialSpec {
    PotentialSpec::Composite {
        coulomb: Coulomb {
            z_target: 2,
            z_projectile: 1,
        },
        short_range: SphericalStep {
            height: HELIUM_WELL_DEPTH,
            radius: fm_to_inverse_mev(HELIUM_RADIUS_FM),
        },
    }
}

pub fn proton_helium() -> ScatteringScenario {
    ScatteringScenario::new(proton_helium_potential(), HELIUM_REDUCED_MASS, HELIUM_MOMENTUM)
        .expect("valid built-in scenario")
}

#[derive(Debug, Clone, PartialEq)]
pub struct CheckOutcome {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

impl CheckOutcome {
    fn from_result(name: &'static str, r: Result<(bool, String)>) -> Self {
        match r {
            Ok((passed, detail)) => Self { name, passed, detail },
            Err(e) => Self {
                name,
                passed: false,
                detail: format!("numeric failure: {e}"),
            },
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ValidationOptions {
    /// Absolute tolerance on each published table entry.
    pub table_tolerance: f64,
    pub quadrature: QuadratureSpec,
}

impl Default for ValidationOptions {
    fn default() -> Self {
        Self {
            table_tolerance: 0.01,
            quadrature: QuadratureSpec::default(),
        }
    }
}

pub fn run_all(opts: &ValidationOptions) -> Vec<CheckOutcome> {
    vec![
        CheckOutcome::from_result("reference-shifts", check_reference_shifts(opts)),
        CheckOutcome::from_result("scenario-parameters", check_scenario_parameters()),
        CheckOutcome::from_result("first-order-closed-form", check_first_order()),
        CheckOutcome::from_result("third-order-error-scaling", check_error_scaling(opts)),
        CheckOutcome::from_result("rutherford-limit", check_rutherford_limit()),
        CheckOutcome::from_result("composite-peak", check_composite_peak(opts)),
        CheckOutcome::from_result("delta-sequence", check_delta_sequence()),
        CheckOutcome::from_result("asymptotic-principal-value", check_asymptotic_pv()),
    ]
}

/// Labelled even test function.
type TestFunction = (&'static str, fn(f64) -> f64);

fn check_reference_shifts(opts: &ValidationOptions) -> Result<(bool, String)> {
    let table = phase_shift_table(&proton_helium(), LRange::Upto(4), &opts.quadrature)?;
    let mut worst: f64 = 0.0;
    for (row, &(_, d1, d2, exact)) in table.records.iter().zip(REFERENCE_SHIFTS.iter()) {
        let e = row.exact.unwrap_or(f64::NAN);
        for diff in [row.delta1 - d1, row.delta2 - d2, e - exact] {
            worst = worst.max(diff.abs());
        }
    }
    Ok((
        worst <= opts.table_tolerance,
        format!("max |deviation| = {worst:.2e} (tolerance {:.1e})", opts.table_tolerance),
    ))
}

fn three_figures(got: f64, want: f64) -> bool {
    let digits = want.abs().log10().floor();
    (got - want).abs() <= 0.5 * 10f64.powf(digits - 2.0)
}

fn check_scenario_parameters() -> Result<(bool, String)> {
    let s: ScenarioParams = proton_helium().params();
    let ok = three_figures(s.kappa, 2.48) && three_figures(s.lambda, -0.316) && three_figures(s.eta_coulomb, 0.0461);
    Ok((
        ok,
        format!("kappa = {:.4}, lambda = {:.4}, eta_C = {:.5}", s.kappa, s.lambda, s.eta_coulomb),
    ))
}

fn check_first_order() -> Result<(bool, String)> {
    let mut worst: f64 = 0.0;
    for kappa in [2.48, 10.0] {
        let kernel = FreeStepKernel::new(SphericalStep::from_lambda(1.0, kappa)?, 0)?;
        for i in 0..=20 {
            let eta = -1.0 + 0.1 * f64::from(i);
            let want = -eta * (1.0 - (2.0 * kappa).sin() / (2.0 * kappa));
            worst = worst.max((first_order_shift(&kernel, 1.0, eta)? - want).abs());
        }
    }
    Ok((worst <= 1e-8, format!("max |deviation| = {worst:.2e}")))
}

fn check_error_scaling(opts: &ValidationOptions) -> Result<(bool, String)> {
    let etas = [0.02, 0.04, 0.08, 0.16];
    let mut detail = Vec::new();
    let mut ok = true;
    for l in [0u32, 5] {
        let kernel = FreeStepKernel::new(SphericalStep::from_lambda(1.0, 10.0)?, l)?;
        let d1 = first_order_shift(&kernel, 1.0, 1.0)?;
        let (d2, _) = second_order_shift(&kernel, 1.0, 1.0, &opts.quadrature)?;
        let mut xs = Vec::new();
        let mut ys = Vec::new();
        for &eta in &etas {
            let exact = exact_step_shift_unwrapped(l, 10.0, eta)?;
            let first = (eta * d1 - exact).abs();
            let second = (eta * d1 + eta * eta * d2 - exact).abs();
            ok &= second < first;
            xs.push(eta.ln());
            ys.push(second.ln());
        }
        let slope = least_squares_slope(&xs, &ys);
        ok &= (slope - 3.0).abs() <= 0.5;
        detail.push(format!("l={l} slope {slope:.2}"));
    }
    Ok((ok, detail.join(", ")))
}

/// Slope of the least-squares line through (x, y).
pub fn least_squares_slope(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    sxy / sxx
}

fn check_rutherford_limit() -> Result<(bool, String)> {
    let scenario = proton_helium();
    let table = phase_shift_table(&scenario, LRange::Upto(0), &QuadratureSpec::default())?.without_nuclear();
    let wp = WavepacketSpec::default();
    let grid = geometric_theta_grid(200, 0.2)?;
    let coulomb = composite_cross_section(&table, wp, &grid)?;
    let reference = rutherford_reference(table.params.p, table.params.eta_coulomb, &grid)?;
    let worst = coulomb
        .dsigma_natural
        .iter()
        .zip(&reference.dsigma_natural)
        .map(|(a, b)| ((a - b) / b).abs())
        .fold(0.0, f64::max);
    let forward = composite_cross_section(&table, wp, &[1e-6])?.dsigma_barn[0];
    Ok((
        worst <= 0.02 && forward.is_finite(),
        format!("max rel. deviation {worst:.2e} on [0.2, pi]; value at 1e-6 rad = {forward:.3e} b"),
    ))
}

fn check_composite_peak(opts: &ValidationOptions) -> Result<(bool, String)> {
    let table = phase_shift_table(&proton_helium(), LRange::Upto(4), &opts.quadrature)?;
    let grid = geometric_theta_grid(400, 0.05)?;
    let curve = composite_cross_section(&table, WavepacketSpec::default(), &grid)?;
    let peak = curve
        .local_maxima(0.05, PI)
        .into_iter()
        .fold(None::<(f64, f64)>, |best, m| match best {
            Some(b) if b.1 >= m.1 => Some(b),
            _ => Some(m),
        });
    match peak {
        Some((theta, value)) => Ok((
            (value / 0.07 - 1.0).abs() <= 0.2,
            format!("largest interior maximum {value:.4} b at {theta:.3} rad"),
        )),
        None => Ok((false, "no interior maximum on [0.05, pi]".into())),
    }
}

fn check_delta_sequence() -> Result<(bool, String)> {
    let fs: [TestFunction; 3] = [
        ("1", |_| 1.0),
        ("1-x^2", |x| 1.0 - x * x),
        ("(1-x^2)^2", |x| (1.0 - x * x).powi(2)),
    ];
    let mut ok = true;
    let mut detail = Vec::new();
    for (label, f) in fs {
        let errs = [1e2, 1e3, 1e4]
            .iter()
            .map(|&k| Ok((sine_kernel_delta_sequence(k, f)? - PI * f(0.0)).abs()))
            .collect::<Result<Vec<f64>>>()?;
        ok &= decays_like_inverse(&[1e2, 1e3, 1e4], &errs);
        detail.push(format!("{label}: {:.1e}", errs[2]));
    }
    Ok((ok, detail.join(", ")))
}

/// `err(κ) ≤ C/κ` with C = 2κ₀err(κ₀) taken from the first point, and
/// errors decreasing until they reach quadrature noise.
pub fn decays_like_inverse(kappas: &[f64], errs: &[f64]) -> bool {
    const NOISE: f64 = 1e-10;
    let c = 2.0 * kappas[0] * errs[0];
    let bounded = kappas.iter().zip(errs).all(|(k, e)| *e <= c / k || *e < NOISE);
    let monotone = errs.windows(2).all(|w| w[1] < w[0] || w[1] < NOISE);
    bounded && monotone
}

/// Test function for the half-line principal-value asymptotics.
pub fn asymptotic_test_function(k: f64) -> f64 {
    k * k * (-(k - 1.0) * (k - 1.0)).exp()
}

fn check_asymptotic_pv() -> Result<(bool, String)> {
    let spec = QuadratureSpec {
        rel_tol: 1e-11,
        abs_tol: 1e-13,
        max_panels: 1 << 16,
        ..QuadratureSpec::default()
    };
    let p = 1.0;
    let mut ok = true;
    let mut detail = Vec::new();
    for l in [0u32, 1] {
        let rs = [200.0, 400.0, 800.0];
        let errs = rs
            .iter()
            .map(|&r| {
                let got = principal_value_sine_transform(asymptotic_test_function, p, r, l, 12.0, &spec)?;
                let phase = f64::from(l) * PI / 2.0;
                let want = PI / (2.0 * p) * asymptotic_test_function(p) * (2.0 / PI).sqrt() * (p * r - phase).cos();
                Ok((got - want).abs())
            })
            .collect::<Result<Vec<f64>>>()?;
        ok &= decays_like_inverse(&rs, &errs);
        detail.push(format!("l={l}: {:.1e}/{:.1e}/{:.1e}", errs[0], errs[1], errs[2]));
    }
    Ok((ok, detail.join(", ")))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn slope_of_cubic() {
        let x: Vec<f64> = [1.0f64, 2.0, 4.0].iter().map(|v| v.ln()).collect();
        let y: Vec<f64> = [1.0f64, 8.0, 64.0].iter().map(|v| v.ln()).collect();
        assert!((least_squares_slope(&x, &y) - 3.0).abs() < 1e-12);
    }

    #[test]
    fn inverse_decay_criterion() {
        assert!(decays_like_inverse(&[1.0, 10.0], &[1.0, 0.1]));
        assert!(!decays_like_inverse(&[1.0, 10.0], &[1.0, 0.9]));
    }

    #[test]
    fn radius_constant() {
        assert!((HELIUM_RADIUS_FM - crate::units::nuclear_radius_fm(1.3, 4)).abs() < 1e-9);
    }
}
