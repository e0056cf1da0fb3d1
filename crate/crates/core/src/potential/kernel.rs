//! Matrix-element kernels.
//!
//! Free basis: `v_l(k₁,k₂) = (2/λ) k₁k₂ ∫ r² j_l(k₁r) V(r) j_l(k₂r) dr`,
//! so that `V_l = (λ/π) v_l`.
//!
//! Coulomb basis: `𝒱_l(k₁,k₂) = (2/λ⁺) ∫ F_l(η₁,k₁r) V⁺(r) F_l(η₂,k₂r) dr`
//! with `η_i = Z_tZ_pαμ/k_i`.
//!
//! For a step both have closed forms. The free one is Lommel's integral;
//! the Coulomb one follows from the Wronskian, because the Coulomb term in
//! the radial equation does not depend on k. Both closed forms are 0/0 on
//! the diagonal and are evaluated there by four-point interpolation from
//! samples at relative offsets ±h, ±2h.

use std::collections::BTreeMap;
use std::sync::Arc;

use super::{Basis, Coulomb, PotentialSpec, ShortRangeProfile, SphericalStep};
use crate::error::{Error, Result};
use crate::pvquad::{integrate, QuadratureSpec};
use crate::specfun::{spherical_bessel_j_all, CoulombWave};

/// Relative offset below which the free closed form is interpolated.
const FREE_DIAGONAL_H: f64 = 1e-4;

/// Phase advance per Gauss–Legendre panel for the quadrature kernels
/// (about 8 nodes per half-oscillation).
const RADIANS_PER_PANEL: f64 = 25.0;

pub trait MatrixElementKernel: Send + Sync + std::fmt::Debug {
    fn name(&self) -> &'static str;
    fn basis(&self) -> Basis;
    fn l(&self) -> u32;
    /// `v_l(k₁,k₂)` or `𝒱_l(k₁,k₂)`.
    fn eval(&self, k1: f64, k2: f64) -> Result<f64>;
}

/// Value at x from samples at x = −2h, −h, h, 2h (cubic Lagrange).
fn interpolate_across_diagonal(x: f64, h: f64, f: impl Fn(f64) -> Result<f64>) -> Result<f64> {
    let nodes = [-2.0 * h, -h, h, 2.0 * h];
    let mut acc = 0.0;
    for (i, &xi) in nodes.iter().enumerate() {
        let mut w = 1.0;
        for (j, &xj) in nodes.iter().enumerate() {
            if i != j {
                w *= (x - xj) / (xi - xj);
            }
        }
        acc += w * f(xi)?;
    }
    Ok(acc)
}

/// `∫₀¹ ρ² j_l(aρ) j_l(bρ) dρ` for a ≠ b, both positive.
pub(crate) fn lommel_integral(l: u32, a: f64, b: f64) -> f64 {
    let ja = spherical_bessel_j_all(l, a);
    let jb = spherical_bessel_j_all(l, b);
    let li = l as usize;
    let (lower_a, lower_b) = if l == 0 {
        (a.cos() / a, b.cos() / b)
    } else {
        (ja[li - 1], jb[li - 1])
    };
    (b * ja[li] * lower_b - a * lower_a * jb[li]) / ((a - b) * (a + b))
}

/// Closed-form free-basis kernel of a step.
#[derive(Debug, Clone)]
pub struct FreeStepKernel {
    step: SphericalStep,
    l: u32,
}

impl FreeStepKernel {
    pub fn new(step: SphericalStep, l: u32) -> Result<Self> {
        step.validate()?;
        Ok(Self { step, l })
    }

    fn closed(&self, a: f64, b: f64) -> f64 {
        2.0 * a * b * lommel_integral(self.l, a, b)
    }
}

impl MatrixElementKernel for FreeStepKernel {
    fn name(&self) -> &'static str {
        "free-step-closed"
    }

    fn basis(&self) -> Basis {
        Basis::Free
    }

    fn l(&self) -> u32 {
        self.l
    }

    fn eval(&self, k1: f64, k2: f64) -> Result<f64> {
        check_momenta(k1, k2, 0.0)?;
        if self.step.lambda() == 0.0 || k1 == 0.0 || k2 == 0.0 {
            return Ok(0.0);
        }
        let a = k1 * self.step.radius;
        let b = k2 * self.step.radius;
        let x = b / a - 1.0;
        if x.abs() < FREE_DIAGONAL_H {
            return interpolate_across_diagonal(x, FREE_DIAGONAL_H, |t| Ok(self.closed(a, a * (1.0 + t))));
        }
        Ok(self.closed(a, b))
    }
}

/// Free-basis kernel of any short-range profile by Gauss–Legendre panels
/// over its support.
#[derive(Debug, Clone)]
pub struct FreeQuadratureKernel {
    profile: Arc<dyn ShortRangeProfile>,
    l: u32,
    spec: QuadratureSpec,
}

impl FreeQuadratureKernel {
    pub fn new(profile: Arc<dyn ShortRangeProfile>, l: u32, spec: QuadratureSpec) -> Self {
        Self { profile, l, spec }
    }
}

impl MatrixElementKernel for FreeQuadratureKernel {
    fn name(&self) -> &'static str {
        "free-quadrature"
    }

    fn basis(&self) -> Basis {
        Basis::Free
    }

    fn l(&self) -> u32 {
        self.l
    }

    fn eval(&self, k1: f64, k2: f64) -> Result<f64> {
        check_momenta(k1, k2, 0.0)?;
        if self.profile.lambda() == 0.0 || k1 == 0.0 || k2 == 0.0 {
            return Ok(0.0);
        }
        let r_max = self.profile.support();
        let li = self.l as usize;
        let panels = ((k1 + k2) * r_max / RADIANS_PER_PANEL).ceil().max(1.0) as usize;
        let integral = integrate(
            |r| {
                let j1 = spherical_bessel_j_all(self.l, k1 * r)[li];
                let j2 = spherical_bessel_j_all(self.l, k2 * r)[li];
                Ok(r * r * j1 * j2 * self.profile.shape(r))
            },
            0.0,
            r_max,
            panels,
            &self.spec,
        )?;
        Ok(2.0 * k1 * k2 * integral)
    }
}

/// `F_l(η(k), kR)` and its r-derivative `k F_l'(η(k), kR)`.
fn coulomb_value_and_slope(l: u32, eta: f64, k: f64, r: f64) -> Result<(f64, f64)> {
    let rho = k * r;
    let f = CoulombWave::new(l, eta)?.regular(rho)?;
    let f_up = CoulombWave::new(l + 1, eta)?.regular(rho)?;
    let lp = f64::from(l + 1);
    let deriv = ((lp * lp / rho + eta) * f - (lp * lp + eta * eta).sqrt() * f_up) / lp;
    Ok((f, k * deriv))
}

/// Closed-form Coulomb-basis kernel of a step, from the Wronskian:
/// `(k₁² − k₂²) ∫₀^R u₁u₂ dr = [u₁u₂' − u₁'u₂]_{r=R}`.
#[derive(Debug, Clone)]
pub struct CoulombStepKernel {
    step: SphericalStep,
    coulomb: Coulomb,
    reduced_mass: f64,
    l: u32,
}

impl CoulombStepKernel {
    pub fn new(step: SphericalStep, coulomb: Coulomb, reduced_mass: f64, l: u32) -> Result<Self> {
        step.validate()?;
        check_reduced_mass(reduced_mass)?;
        Ok(Self {
            step,
            coulomb,
            reduced_mass,
            l,
        })
    }

    fn closed(&self, k1: f64, k2: f64) -> Result<f64> {
        let r = self.step.radius;
        let (u1, du1) = coulomb_value_and_slope(self.l, self.coulomb.eta(self.reduced_mass, k1), k1, r)?;
        let (u2, du2) = coulomb_value_and_slope(self.l, self.coulomb.eta(self.reduced_mass, k2), k2, r)?;
        Ok(2.0 / r * (u1 * du2 - du1 * u2) / ((k1 - k2) * (k1 + k2)))
    }

    /// Interpolation half-width: small enough that the cubic error
    /// `O((κh)⁴)` is negligible, large enough to avoid cancellation.
    fn diagonal_h(&self, k: f64) -> f64 {
        (1e-2 / (k * self.step.radius)).min(1e-3)
    }
}

impl MatrixElementKernel for CoulombStepKernel {
    fn name(&self) -> &'static str {
        "coulomb-step-closed"
    }

    fn basis(&self) -> Basis {
        Basis::Coulomb
    }

    fn l(&self) -> u32 {
        self.l
    }

    fn eval(&self, k1: f64, k2: f64) -> Result<f64> {
        check_momenta(k1, k2, f64::MIN_POSITIVE)?;
        if self.step.lambda() == 0.0 {
            return Ok(0.0);
        }
        let x = k2 / k1 - 1.0;
        let h = self.diagonal_h(k1);
        if x.abs() < h {
            return interpolate_across_diagonal(x, h, |t| self.closed(k1, k1 * (1.0 + t)));
        }
        self.closed(k1, k2)
    }
}

/// Coulomb-basis kernel of any short-range profile by Gauss–Legendre
/// panels over its support.
#[derive(Debug, Clone)]
pub struct CoulombQuadratureKernel {
    profile: Arc<dyn ShortRangeProfile>,
    coulomb: Coulomb,
    reduced_mass: f64,
    l: u32,
    spec: QuadratureSpec,
}

impl CoulombQuadratureKernel {
    pub fn new(
        profile: Arc<dyn ShortRangeProfile>,
        coulomb: Coulomb,
        reduced_mass: f64,
        l: u32,
        spec: QuadratureSpec,
    ) -> Result<Self> {
        check_reduced_mass(reduced_mass)?;
        Ok(Self {
            profile,
            coulomb,
            reduced_mass,
            l,
            spec,
        })
    }
}

impl MatrixElementKernel for CoulombQuadratureKernel {
    fn name(&self) -> &'static str {
        "coulomb-quadrature"
    }

    fn basis(&self) -> Basis {
        Basis::Coulomb
    }

    fn l(&self) -> u32 {
        self.l
    }

    fn eval(&self, k1: f64, k2: f64) -> Result<f64> {
        check_momenta(k1, k2, f64::MIN_POSITIVE)?;
        if self.profile.lambda() == 0.0 {
            return Ok(0.0);
        }
        let w1 = CoulombWave::new(self.l, self.coulomb.eta(self.reduced_mass, k1))?;
        let w2 = CoulombWave::new(self.l, self.coulomb.eta(self.reduced_mass, k2))?;
        let r_max = self.profile.support();
        let panels = ((k1 + k2) * r_max / RADIANS_PER_PANEL).ceil().max(1.0) as usize;
        let integral = integrate(
            |r| Ok(w1.regular(k1 * r)? * w2.regular(k2 * r)? * self.profile.shape(r)),
            0.0,
            r_max,
            panels,
            &self.spec,
        )?;
        Ok(2.0 * integral)
    }
}

fn check_momenta(k1: f64, k2: f64, min: f64) -> Result<()> {
    if k1 >= min && k2 >= min && k1.is_finite() && k2.is_finite() {
        return Ok(());
    }
    Err(Error::Endpoint(format!(
        "kernel requires momenta >= {min:e}, got k1 = {k1}, k2 = {k2}"
    )))
}

fn check_reduced_mass(m: f64) -> Result<()> {
    if m > 0.0 && m.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidInput(format!("reduced mass must be positive, got {m}")))
    }
}

fn diagonal_divergence() -> Error {
    Error::InvalidPotential(
        "Coulomb matrix elements between free waves diverge on the diagonal; \
         perturb around Coulomb waves instead"
            .into(),
    )
}

/// `V_l(k₁,k₂) = (λ/π) v_l(k₁,k₂)` in the free basis.
pub fn free_matrix_element(spec: &PotentialSpec, l: u32, k1: f64, k2: f64) -> Result<f64> {
    let step = match spec {
        PotentialSpec::SphericalStep(s) => *s,
        PotentialSpec::Composite { coulomb, short_range } if coulomb.coupling() == 0.0 => *short_range,
        _ => return Err(diagonal_divergence()),
    };
    if step.lambda() == 0.0 {
        return Ok(0.0);
    }
    let v = FreeStepKernel::new(step, l)?.eval(k1, k2)?;
    Ok(step.lambda() / std::f64::consts::PI * v)
}

/// `𝒱_l(k₁,k₂)` by quadrature of Coulomb waves over the short-range support.
pub fn coulomb_basis_matrix_element(
    spec: &PotentialSpec,
    l: u32,
    k1: f64,
    k2: f64,
    reduced_mass: f64,
) -> Result<f64> {
    let (coulomb, step) = split_composite(spec)?;
    CoulombQuadratureKernel::new(Arc::new(step), coulomb, reduced_mass, l, QuadratureSpec::default())?
        .eval(k1, k2)
}

fn split_composite(spec: &PotentialSpec) -> Result<(Coulomb, SphericalStep)> {
    match spec {
        PotentialSpec::Composite { coulomb, short_range } => Ok((*coulomb, *short_range)),
        PotentialSpec::SphericalStep(s) => Ok((
            Coulomb {
                z_target: 0,
                z_projectile: 0,
            },
            *s,
        )),
        PotentialSpec::Coulomb(_) => Err(Error::InvalidPotential(
            "a pure Coulomb potential has no short-range part to take matrix elements of".into(),
        )),
    }
}

/// Everything a kernel factory may need.
#[derive(Debug, Clone, Copy)]
pub struct KernelRequest {
    pub potential: PotentialSpec,
    pub l: u32,
    pub reduced_mass: f64,
    pub quadrature: QuadratureSpec,
}

type Factory = fn(&KernelRequest) -> Result<Box<dyn MatrixElementKernel>>;

/// Kernel strategies selectable by name.
#[derive(Clone)]
pub struct KernelRegistry {
    factories: BTreeMap<&'static str, (Basis, Factory)>,
}

impl std::fmt::Debug for KernelRegistry {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_list().entries(self.factories.keys()).finish()
    }
}

impl Default for KernelRegistry {
    fn default() -> Self {
        let mut reg = Self::empty();
        reg.register("free-step-closed", Basis::Free, |req| {
            let step = free_step(&req.potential)?;
            Ok(Box::new(FreeStepKernel::new(step, req.l)?))
        });
        reg.register("free-quadrature", Basis::Free, |req| {
            let step = free_step(&req.potential)?;
            Ok(Box::new(FreeQuadratureKernel::new(Arc::new(step), req.l, req.quadrature)))
        });
        reg.register("coulomb-step-closed", Basis::Coulomb, |req| {
            let (coulomb, step) = split_composite(&req.potential)?;
            Ok(Box::new(CoulombStepKernel::new(step, coulomb, req.reduced_mass, req.l)?))
        });
        reg.register("coulomb-quadrature", Basis::Coulomb, |req| {
            let (coulomb, step) = split_composite(&req.potential)?;
            Ok(Box::new(CoulombQuadratureKernel::new(
                Arc::new(step),
                coulomb,
                req.reduced_mass,
                req.l,
                req.quadrature,
            )?))
        });
        reg
    }
}

fn free_step(spec: &PotentialSpec) -> Result<SphericalStep> {
    match spec {
        PotentialSpec::SphericalStep(s) => Ok(*s),
        _ => Err(diagonal_divergence()),
    }
}

impl KernelRegistry {
    pub fn empty() -> Self {
        Self {
            factories: BTreeMap::new(),
        }
    }

    pub fn register(&mut self, name: &'static str, basis: Basis, factory: Factory) {
        self.factories.insert(name, (basis, factory));
    }

    pub fn names(&self) -> Vec<&'static str> {
        self.factories.keys().copied().collect()
    }

    pub fn basis_of(&self, name: &str) -> Option<Basis> {
        self.factories.get(name).map(|(b, _)| *b)
    }

    pub fn build(&self, name: &str, request: &KernelRequest) -> Result<Box<dyn MatrixElementKernel>> {
        let (_, factory) = self.factories.get(name).ok_or_else(|| Error::UnknownStrategy {
            kind: "kernel",
            name: name.to_string(),
            available: self.names().join(", "),
        })?;
        factory(request)
    }

    /// Preferred kernel for a potential.
    pub fn default_name(spec: &PotentialSpec) -> Result<&'static str> {
        match spec {
            PotentialSpec::SphericalStep(_) => Ok("free-step-closed"),
            PotentialSpec::Composite { .. } => Ok("coulomb-step-closed"),
            PotentialSpec::Coulomb(_) => Err(diagonal_divergence()),
        }
    }

    pub fn build_default(&self, request: &KernelRequest) -> Result<Box<dyn MatrixElementKernel>> {
        self.build(Self::default_name(&request.potential)?, request)
    }
}
