//! Perturbative phase shifts, the exact step-potential phase shift and
//! phase-shift tables.

use std::f64::consts::PI;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::potential::{
    Basis, KernelRegistry, KernelRequest, MatrixElementKernel, ScatteringScenario, ScenarioParams,
    SphericalStep,
};
use crate::pvquad::{delta_infinity, delta_minus, delta_plus, QuadratureSpec, SecondOrderTerms};
use crate::specfun::{
    coulomb_sigma, modified_spherical_bessel_i_with_derivative, spherical_bessel_j_with_derivative, spherical_bessel_n_with_derivative,
};

/// Coulomb-basis kernels are sampled no closer to k = 0 than this
/// fraction of p.
pub const K_MIN_FRACTION: f64 = 1e-6;

/// Threshold on |δ^(1)| that ends the automatic l range.
pub const AUTO_L_THRESHOLD: f64 = 1e-4;

/// Largest l the automatic range may reach.
pub const AUTO_L_CAP: u32 = 25;

/// `δ^(1) = −η v_l(p, p)`.
pub fn first_order_shift(kernel: &dyn MatrixElementKernel, p: f64, eta: f64) -> Result<f64> {
    if eta == 0.0 {
        return Ok(0.0);
    }
    Ok(-eta * kernel.eval(p, p)?)
}

/// `δ^(2) = η² (Δ₋ + Δ₊ + Δ∞)`, with the three integrals.
pub fn second_order_shift(
    kernel: &dyn MatrixElementKernel,
    p: f64,
    eta: f64,
    spec: &QuadratureSpec,
) -> Result<(f64, SecondOrderTerms)> {
    if eta == 0.0 {
        return Ok((0.0, SecondOrderTerms::default()));
    }
    spec.validate()?;
    let floor = match kernel.basis() {
        Basis::Free => 0.0,
        Basis::Coulomb => K_MIN_FRACTION,
    };
    let profile = |s: f64| kernel.eval(p, p * s.max(floor));
    let (delta_inf, tail_estimate) = delta_infinity(&profile, spec)?;
    let terms = SecondOrderTerms {
        delta_minus: delta_minus(&profile, spec)?,
        delta_plus: delta_plus(&profile, spec)?,
        delta_inf,
        tail_estimate,
    };
    Ok((eta * eta * terms.sum(), terms))
}

/// Interior solution at κ′ scaled by κ′^{-l}, as `(J, κ′ J′)`, which is
/// real and continuous through κ′² = 0. For κ′² < 0 the modified function
/// `i_l(|κ′|)` takes over.
fn interior_solution(l: u32, kappa_prime_sq: f64) -> (f64, f64) {
    let lf = f64::from(l);
    if kappa_prime_sq.abs() < 1e-24 {
        let mut dfact = 1.0;
        for k in 1..=l {
            dfact *= f64::from(2 * k + 1);
        }
        return (1.0 / dfact, lf / dfact);
    }
    let q = kappa_prime_sq.abs().sqrt();
    let (value, slope) = if kappa_prime_sq > 0.0 {
        let (j, dj) = spherical_bessel_j_with_derivative(l, q);
        (j, q * dj)
    } else {
        let (i, di) = modified_spherical_bessel_i_with_derivative(l, q);
        (i, q * di)
    };
    let scale = q.powi(-(l as i32));
    (value * scale, slope * scale)
}

/// Exact phase shift of a step in dimensionless form, in (−π, π].
///
/// `κ′² = κ² − 2ηκ`, `A = κ² J n_l′(κ) − κ′J′ κ n_l(κ)`,
/// `B = κ′J′ κ j_l(κ) − κ² J j_l′(κ)`, `δ = Arg(A − iB)`.
pub fn exact_step_shift_dimensionless(l: u32, kappa: f64, eta: f64) -> Result<f64> {
    if !(kappa > 0.0) {
        return Err(Error::domain("exact_step_shift", format!("kappa = {kappa} must be positive")));
    }
    if eta == 0.0 {
        return Ok(0.0);
    }
    let (interior, interior_slope) = interior_solution(l, kappa * kappa - 2.0 * eta * kappa);
    let (j, dj) = spherical_bessel_j_with_derivative(l, kappa);
    let (n, dn) = spherical_bessel_n_with_derivative(l, kappa)?;
    let k2 = kappa * kappa;
    let a = k2 * interior * dn - interior_slope * kappa * n;
    let b = interior_slope * kappa * j - k2 * interior * dj;
    Ok((-b).atan2(a))
}

/// Exact phase shift continued from 0 at η = 0 without 2π jumps.
pub fn exact_step_shift_unwrapped(l: u32, kappa: f64, eta: f64) -> Result<f64> {
    let steps = (64.0 * eta.abs().max(1.0)).ceil() as usize;
    let mut previous = 0.0;
    for i in 1..=steps {
        let raw = exact_step_shift_dimensionless(l, kappa, eta * i as f64 / steps as f64)?;
        let turns = ((previous - raw) / (2.0 * PI)).round();
        previous = raw + 2.0 * PI * turns;
    }
    Ok(previous)
}

/// Exact phase shift of a step for reduced mass μ and momentum p,
/// unwrapped from η = 0.
pub fn exact_step_shift(well: &SphericalStep, l: u32, p: f64, reduced_mass: f64) -> Result<f64> {
    well.validate()?;
    if !(p > 0.0 && reduced_mass > 0.0) {
        return Err(Error::InvalidInput(format!(
            "exact_step_shift requires p > 0 and reduced mass > 0, got p = {p}, mu = {reduced_mass}"
        )));
    }
    exact_step_shift_unwrapped(l, p * well.radius, well.lambda() * reduced_mass / p)
}

/// `|(approx − exact) / exact|`.
pub fn relative_error(approx: f64, exact: f64) -> Result<f64> {
    if exact == 0.0 {
        return Err(Error::domain("relative_error", "exact value is zero"));
    }
    Ok(((approx - exact) / exact).abs())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseShiftRecord {
    pub l: u32,
    pub delta1: f64,
    pub delta2: f64,
    /// σ_l; zero in the free basis.
    pub sigma: f64,
    /// σ_l + δ^(1) + δ^(2).
    pub total: f64,
    /// Exact phase shift of the short-range step alone.
    pub exact: Option<f64>,
    pub terms: SecondOrderTerms,
}

impl PhaseShiftRecord {
    /// δ^(1) + δ^(2).
    pub fn perturbative(&self) -> f64 {
        self.delta1 + self.delta2
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PhaseShiftTable {
    pub records: Vec<PhaseShiftRecord>,
    pub params: ScenarioParams,
    pub basis: Basis,
    /// Kernel strategy used (empty when no short-range part exists).
    pub kernel: String,
}

impl PhaseShiftTable {
    pub fn l_max(&self) -> u32 {
        self.records.last().map_or(0, |r| r.l)
    }

    /// Same table with every short-range shift zeroed.
    pub fn without_nuclear(&self) -> Self {
        let mut out = self.clone();
        for r in &mut out.records {
            r.delta1 = 0.0;
            r.delta2 = 0.0;
            r.total = r.sigma;
            r.terms = SecondOrderTerms::default();
        }
        out
    }
}

/// How many partial waves to compute.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LRange {
    Upto(u32),
    /// Smallest l with |δ^(1)| below [`AUTO_L_THRESHOLD`], at most [`AUTO_L_CAP`].
    Auto,
}

/// Table with the default kernel for the scenario's potential.
pub fn phase_shift_table(
    scenario: &ScatteringScenario,
    l_range: LRange,
    spec: &QuadratureSpec,
) -> Result<PhaseShiftTable> {
    phase_shift_table_with(scenario, l_range, spec, &KernelRegistry::default(), None)
}

/// Table with an explicitly named kernel strategy.
pub fn phase_shift_table_with(
    scenario: &ScatteringScenario,
    l_range: LRange,
    spec: &QuadratureSpec,
    registry: &KernelRegistry,
    kernel_name: Option<&str>,
) -> Result<PhaseShiftTable> {
    spec.validate()?;
    let params = scenario.params();
    let basis = scenario.basis();
    let short_range = scenario.potential.short_range().copied();
    let kernel_name = match (short_range, kernel_name) {
        (None, _) => None,
        (Some(_), Some(name)) => Some(name.to_string()),
        (Some(_), None) => Some(KernelRegistry::default_name(&scenario.potential)?.to_string()),
    };
    if let Some(name) = &kernel_name {
        if registry.basis_of(name) != Some(basis) && registry.basis_of(name).is_some() {
            return Err(Error::InvalidInput(format!(
                "kernel '{name}' works in the {:?} basis but the scenario needs {basis:?}",
                registry.basis_of(name).unwrap()
            )));
        }
    }
    let build = |l: u32| -> Result<Option<Box<dyn MatrixElementKernel>>> {
        match &kernel_name {
            None => Ok(None),
            Some(name) => {
                let request = KernelRequest {
                    potential: scenario.potential,
                    l,
                    reduced_mass: scenario.reduced_mass,
                    quadrature: *spec,
                };
                registry.build(name, &request).map(Some)
            }
        }
    };

    let l_max = match l_range {
        LRange::Upto(l) => l,
        LRange::Auto => {
            let mut chosen = AUTO_L_CAP;
            for l in 0..=AUTO_L_CAP {
                let d1 = match build(l).map_err(|e| e.at_l(l))? {
                    Some(k) => first_order_shift(k.as_ref(), params.p, params.eta).map_err(|e| e.at_l(l))?,
                    None => 0.0,
                };
                if d1.abs() < AUTO_L_THRESHOLD {
                    chosen = l;
                    break;
                }
            }
            chosen
        }
    };

    let row = |l: u32| -> Result<PhaseShiftRecord> {
        let sigma = match basis {
            Basis::Free => 0.0,
            Basis::Coulomb => coulomb_sigma(l, params.eta_coulomb),
        };
        let (delta1, delta2, terms) = match build(l)? {
            Some(kernel) => {
                let d1 = first_order_shift(kernel.as_ref(), params.p, params.eta)?;
                let (d2, terms) = second_order_shift(kernel.as_ref(), params.p, params.eta, spec)?;
                (d1, d2, terms)
            }
            None => (0.0, 0.0, SecondOrderTerms::default()),
        };
        let exact = match short_range {
            Some(step) => Some(exact_step_shift(&step, l, params.p, params.reduced_mass)?),
            None => None,
        };
        Ok(PhaseShiftRecord {
            l,
            delta1,
            delta2,
            sigma,
            total: sigma + delta1 + delta2,
            exact,
            terms,
        })
    };

    let rows: Vec<Result<PhaseShiftRecord>> = (0..=l_max).into_par_iter().map(row).collect();
    let mut records = Vec::with_capacity(rows.len());
    for (l, r) in rows.into_iter().enumerate() {
        records.push(r.map_err(|e| e.at_l(l as u32))?);
    }
    Ok(PhaseShiftTable {
        records,
        params,
        basis,
        kernel: kernel_name.unwrap_or_default(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::potential::{Coulomb, FreeStepKernel, PotentialSpec};
    use approx::assert_relative_eq;

    fn sinc(x: f64) -> f64 {
        x.sin() / x
    }

    /// Kernel of a step at unit momentum with radius κ.
    fn unit_kernel(kappa: f64, l: u32) -> FreeStepKernel {
        FreeStepKernel::new(SphericalStep::from_lambda(1.0, kappa).unwrap(), l).unwrap()
    }

    #[test]
    fn zero_coupling() {
        let k = unit_kernel(10.0, 0);
        assert_eq!(first_order_shift(&k, 1.0, 0.0).unwrap(), 0.0);
        assert_eq!(second_order_shift(&k, 1.0, 0.0, &QuadratureSpec::default()).unwrap().0, 0.0);
        for l in 0..5 {
            assert_eq!(exact_step_shift_dimensionless(l, 2.48, 0.0).unwrap(), 0.0);
        }
    }

    #[test]
    fn first_order_closed_form() {
        for kappa in [2.48, 10.0] {
            let k = unit_kernel(kappa, 0);
            for eta in [-1.0, -0.3, 0.02, 0.7, 1.0] {
                let want = -eta * (1.0 - sinc(2.0 * kappa));
                assert!((first_order_shift(&k, 1.0, eta).unwrap() - want).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn exact_l0_closed_form() {
        // δ₀ = −κ + atan(κ tan κ′ / κ′) on the principal branch.
        for (kappa, eta) in [(2.48f64, -0.2f64), (10.0, 0.3), (3.0, 0.9)] {
            let kp = (kappa * kappa - 2.0 * eta * kappa).sqrt();
            let want = -kappa + (kappa * kp.tan() / kp).atan();
            let got = exact_step_shift_dimensionless(0, kappa, eta).unwrap();
            let diff = (got - want) / PI;
            assert!((diff - diff.round()).abs() < 1e-12, "{got} vs {want}");
        }
    }

    #[test]
    fn exact_is_continuous_through_tunneling_threshold() {
        // κ′ = 0 at η = κ/2.
        for l in [0u32, 2] {
            let kappa = 2.0;
            let below = exact_step_shift_unwrapped(l, kappa, 1.0 - 1e-7).unwrap();
            let above = exact_step_shift_unwrapped(l, kappa, 1.0 + 1e-7).unwrap();
            assert!((below - above).abs() < 1e-5, "l={l}: {below} vs {above}");
        }
        // Hard-sphere limit of a very high barrier: δ₀ → −κ.
        let hard = exact_step_shift_unwrapped(0, 1.0, 2000.0).unwrap();
        assert!((hard + 1.0).abs() < 0.05);
    }

    #[test]
    fn first_order_is_linear_term_of_exact() {
        for (l, kappa) in [(0u32, 10.0), (5, 10.0)] {
            let k = unit_kernel(kappa, l);
            let d1 = first_order_shift(&k, 1.0, 1.0).unwrap();
            let mut residuals = Vec::new();
            for eta in [1e-3, 2e-3, 4e-3] {
                let exact = exact_step_shift_unwrapped(l, kappa, eta).unwrap();
                residuals.push((exact - eta * d1).abs());
            }
            // O(η²): doubling η quadruples the residual.
            for w in residuals.windows(2) {
                let ratio = w[1] / w[0];
                assert!((ratio - 4.0).abs() < 0.3, "l={l}: ratio {ratio}");
            }
        }
    }

    #[test]
    fn third_order_error_scaling() {
        let spec = QuadratureSpec::default();
        let k = unit_kernel(10.0, 0);
        let d1 = first_order_shift(&k, 1.0, 1.0).unwrap();
        let (d2, _) = second_order_shift(&k, 1.0, 1.0, &spec).unwrap();
        let err = |eta: f64| (eta * d1 + eta * eta * d2 - exact_step_shift_unwrapped(0, 10.0, eta).unwrap()).abs();
        let slope = (err(0.16) / err(0.02)).ln() / 8f64.ln();
        assert!((slope - 3.0).abs() < 0.5, "slope {slope}");
    }

    #[test]
    fn relative_error_examples() {
        assert_eq!(relative_error(0.3, 0.3).unwrap(), 0.0);
        assert_relative_eq!(relative_error(0.914, 0.805).unwrap(), 0.1354, epsilon = 1e-4);
        assert_relative_eq!(relative_error(0.950, 0.906).unwrap(), 0.0486, epsilon = 1e-4);
        assert!(relative_error(1.0, 0.0).is_err());
    }

    #[test]
    fn zero_coupling_table() {
        let step = SphericalStep::new(0.0, 0.01).unwrap();
        let spec = PotentialSpec::Composite {
            coulomb: Coulomb {
                z_target: 0,
                z_projectile: 0,
            },
            short_range: step,
        };
        let s = ScatteringScenario::new(spec, 749.0, 237.0).unwrap();
        let t = phase_shift_table(&s, LRange::Upto(3), &QuadratureSpec::default()).unwrap();
        assert_eq!(t.records.len(), 4);
        for r in &t.records {
            assert_eq!((r.delta1, r.delta2, r.sigma, r.total, r.exact), (0.0, 0.0, 0.0, 0.0, Some(0.0)));
        }
    }

    #[test]
    fn pure_coulomb_table_is_sigma_only() {
        let spec = PotentialSpec::Coulomb(Coulomb {
            z_target: 2,
            z_projectile: 1,
        });
        let s = ScatteringScenario::new(spec, 749.0, 237.0).unwrap();
        let t = phase_shift_table(&s, LRange::Auto, &QuadratureSpec::default()).unwrap();
        assert_eq!(t.l_max(), 0);
        assert_eq!(t.records[0].exact, None);
        assert!((t.records[0].sigma - coulomb_sigma(0, t.params.eta_coulomb)).abs() < 1e-15);
    }

    #[test]
    fn kernel_basis_mismatch_is_rejected() {
        let step = SphericalStep::new(-30.0, 0.01).unwrap();
        let s = ScatteringScenario::new(PotentialSpec::SphericalStep(step), 749.0, 237.0).unwrap();
        let r = phase_shift_table_with(
            &s,
            LRange::Upto(1),
            &QuadratureSpec::default(),
            &KernelRegistry::default(),
            Some("coulomb-step-closed"),
        );
        assert!(r.is_err());
    }
}
