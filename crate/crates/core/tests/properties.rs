use std::f64::consts::PI;

use proptest::prelude::*;
use pwshift_core::potential::{FreeStepKernel, KernelRegistry, KernelRequest, MatrixElementKernel, SphericalStep};
use pwshift_core::pvquad::{delta_infinity, principal_value_symmetric, QuadratureSpec};
use pwshift_core::shifts::{exact_step_shift_dimensionless, exact_step_shift_unwrapped, phase_shift_table, LRange};
use pwshift_core::validation::proton_helium;
use pwshift_core::xsection::{nuclear_only_cross_section, rutherford_reference};
use pwshift_core::{Error, WavepacketSpec};

fn spec() -> QuadratureSpec {
    QuadratureSpec::default()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn pv_is_linear(a in -3.0..3.0f64, b in -3.0..3.0f64, c in 0.1..2.0f64) {
        let f = |x: f64| (c * x).exp() / x;
        let g = |x: f64| (1.0 + x * x) / x + x.cos();
        let lhs = principal_value_symmetric(|x| a * f(x) + b * g(x), &spec()).unwrap();
        let rhs = a * principal_value_symmetric(f, &spec()).unwrap() + b * principal_value_symmetric(g, &spec()).unwrap();
        prop_assert!((lhs - rhs).abs() <= 1e-10 * (1.0 + lhs.abs()));
    }

    #[test]
    fn pv_of_odd_integrand_vanishes(c in 0.1..5.0f64) {
        let v = principal_value_symmetric(|x: f64| (c * x).cos() / x, &spec()).unwrap();
        prop_assert!(v.abs() < 1e-12);
    }

    #[test]
    fn free_kernel_is_symmetric(l in 0u32..6, kappa in 0.5..12.0f64, s in 0.05..4.0f64) {
        let k = FreeStepKernel::new(SphericalStep::from_lambda(1.0, kappa).unwrap(), l).unwrap();
        let (a, b) = (k.eval(1.0, s).unwrap(), k.eval(s, 1.0).unwrap());
        prop_assert!((a - b).abs() <= 1e-12 * (1.0 + a.abs()));
    }

    #[test]
    fn tail_estimate_bounds_truncation(power in 1.2..3.0f64) {
        // Power-law kernels decay fast enough for the tail to close.
        let v = move |z: f64| Ok(z.powf(-power));
        let (val, tail) = delta_infinity(&v, &spec()).unwrap();
        prop_assert!(val.is_finite() && tail >= 0.0);
        prop_assert!(tail <= 1e-8 * val.abs().max(1e-4));
    }

    #[test]
    fn exact_shift_is_continuous_in_eta(l in 0u32..4, kappa in 0.5..8.0f64, eta in -0.9..0.9f64) {
        let d = 1e-7;
        let a = exact_step_shift_unwrapped(l, kappa, eta).unwrap();
        let b = exact_step_shift_unwrapped(l, kappa, eta + d).unwrap();
        prop_assert!((a - b).abs() < 1e-4);
        let wrapped = exact_step_shift_dimensionless(l, kappa, eta).unwrap();
        let turns = (a - wrapped) / (2.0 * PI);
        prop_assert!((turns - turns.round()).abs() < 1e-9);
    }

    #[test]
    fn nuclear_only_is_nonnegative(d0 in -3.0..3.0f64, d1 in -3.0..3.0f64, theta in 0.0..PI) {
        let c = nuclear_only_cross_section(&[d0, d1], 237.0, &[theta]).unwrap();
        prop_assert!(c.dsigma_natural[0] >= 0.0);
    }
}

#[test]
fn single_wave_nuclear_cross_section_is_isotropic() {
    let d0: f64 = 0.7;
    let c = nuclear_only_cross_section(&[d0], 2.0, &[0.1, 1.0, 3.0]).unwrap();
    for v in c.dsigma_natural {
        assert!((v - d0.sin().powi(2) / 4.0).abs() < 1e-15);
    }
}

#[test]
fn rutherford_rejects_forward_angle() {
    assert!(rutherford_reference(237.0, 0.05, &[0.0]).is_err());
}

#[test]
fn registry_kernels_agree_across_routes() {
    let scenario = proton_helium();
    let reg = KernelRegistry::default();
    let request = KernelRequest {
        potential: scenario.potential,
        l: 1,
        reduced_mass: scenario.reduced_mass,
        quadrature: spec(),
    };
    let closed = reg.build("coulomb-step-closed", &request).unwrap();
    let quad = reg.build("coulomb-quadrature", &request).unwrap();
    for s in [0.3, 0.99, 1.0, 2.5] {
        let (a, b) = (closed.eval(237.0, 237.0 * s).unwrap(), quad.eval(237.0, 237.0 * s).unwrap());
        assert!((a - b).abs() <= 1e-8 * b.abs().max(1e-6), "s = {s}: {a} vs {b}");
    }
    assert!(matches!(reg.build("nope", &request), Err(Error::UnknownStrategy { .. })));
}

#[test]
fn table_is_deterministic() {
    let a = phase_shift_table(&proton_helium(), LRange::Upto(2), &spec()).unwrap();
    let b = phase_shift_table(&proton_helium(), LRange::Upto(2), &spec()).unwrap();
    for (x, y) in a.records.iter().zip(&b.records) {
        assert_eq!(x.total.to_bits(), y.total.to_bits());
    }
}

#[test]
fn wavepacket_width_is_validated() {
    assert!(WavepacketSpec::new(0.0).is_err());
    assert!(WavepacketSpec::new(0.6).is_err());
    assert!(WavepacketSpec::new(0.01).is_ok());
}
