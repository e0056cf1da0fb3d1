//! Potential descriptions, derived scenario parameters and the
//! matrix-element kernels.

mod kernel;

pub use kernel::{
    coulomb_basis_matrix_element, free_matrix_element, CoulombQuadratureKernel,
    CoulombStepKernel, FreeQuadratureKernel, FreeStepKernel, KernelRegistry, KernelRequest,
    MatrixElementKernel,
};

pub use crate::specfun::Basis;

use crate::error::{Error, Result};
use crate::units::{fm_to_inverse_mev, ALPHA};

/// Radial shape of a short-range potential, `V(r) = λ · shape(r)`.
pub trait ShortRangeProfile: Send + Sync + std::fmt::Debug {
    /// Dimensionless coupling λ.
    fn lambda(&self) -> f64;
    /// `V(r) / λ` in MeV (r in MeV⁻¹).
    fn shape(&self, r: f64) -> f64;
    /// Radius beyond which the potential vanishes.
    fn support(&self) -> f64;
}

/// Constant potential `height` on `[0, radius]`, zero outside.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SphericalStep {
    /// V₀ in MeV (negative for a well).
    pub height: f64,
    /// R in MeV⁻¹.
    pub radius: f64,
}

impl SphericalStep {
    pub fn new(height: f64, radius: f64) -> Result<Self> {
        let step = Self { height, radius };
        step.validate()?;
        Ok(step)
    }

    /// From V₀ in MeV and R in fm.
    pub fn from_mev_fm(height_mev: f64, radius_fm: f64) -> Result<Self> {
        Self::new(height_mev, fm_to_inverse_mev(radius_fm))
    }

    /// Step with a prescribed coupling λ = V₀R.
    pub fn from_lambda(lambda: f64, radius: f64) -> Result<Self> {
        if !(radius > 0.0) {
            return Err(Error::InvalidPotential(format!("step radius must be positive, got {radius}")));
        }
        Self::new(lambda / radius, radius)
    }

    pub fn lambda(&self) -> f64 {
        self.height * self.radius
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.radius > 0.0 && self.radius.is_finite()) {
            return Err(Error::InvalidPotential(format!(
                "step radius must be positive and finite, got {}",
                self.radius
            )));
        }
        if !self.height.is_finite() {
            return Err(Error::InvalidPotential(format!("step height {} is not finite", self.height)));
        }
        Ok(())
    }
}

impl ShortRangeProfile for SphericalStep {
    fn lambda(&self) -> f64 {
        SphericalStep::lambda(self)
    }

    fn shape(&self, r: f64) -> f64 {
        if r <= self.radius {
            1.0 / self.radius
        } else {
            0.0
        }
    }

    fn support(&self) -> f64 {
        self.radius
    }
}

/// Point-charge Coulomb interaction between target and projectile.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Coulomb {
    pub z_target: i32,
    pub z_projectile: i32,
}

impl Coulomb {
    /// `Z_t Z_p α`.
    pub fn coupling(&self) -> f64 {
        f64::from(self.z_target * self.z_projectile) * ALPHA
    }

    /// η^C(k) = Z_t Z_p α μ / k.
    pub fn eta(&self, reduced_mass: f64, k: f64) -> f64 {
        self.coupling() * reduced_mass / k
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PotentialSpec {
    SphericalStep(SphericalStep),
    Coulomb(Coulomb),
    Composite {
        coulomb: Coulomb,
        short_range: SphericalStep,
    },
}

impl PotentialSpec {
    /// Coupling of the short-range part (λ, or λ⁺ for a composite); zero
    /// for a pure Coulomb potential.
    pub fn lambda(&self) -> f64 {
        self.short_range().map_or(0.0, |s| s.lambda())
    }

    pub fn short_range(&self) -> Option<&SphericalStep> {
        match self {
            PotentialSpec::SphericalStep(s) => Some(s),
            PotentialSpec::Composite { short_range, .. } => Some(short_range),
            PotentialSpec::Coulomb(_) => None,
        }
    }

    pub fn coulomb(&self) -> Option<&Coulomb> {
        match self {
            PotentialSpec::Coulomb(c) => Some(c),
            PotentialSpec::Composite { coulomb, .. } => Some(coulomb),
            PotentialSpec::SphericalStep(_) => None,
        }
    }

    /// Basis the perturbation expansion is built on.
    pub fn basis(&self) -> Basis {
        match self {
            PotentialSpec::SphericalStep(_) => Basis::Free,
            _ => Basis::Coulomb,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self.short_range() {
            Some(s) => s.validate(),
            None => Ok(()),
        }
    }
}

/// Target and projectile rest masses in MeV.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Masses {
    pub m_target: f64,
    pub m_projectile: f64,
}

impl Masses {
    pub fn reduced_mass(&self) -> f64 {
        self.m_target * self.m_projectile / (self.m_target + self.m_projectile)
    }
}

/// Dimensionless parameters of a scattering run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScenarioParams {
    pub reduced_mass: f64,
    pub p: f64,
    /// κ = pR (zero without a short-range part).
    pub kappa: f64,
    /// λ (or λ⁺) = V₀R.
    pub lambda: f64,
    /// η (or η⁺) = λ μ / p.
    pub eta: f64,
    /// η^C = Z_t Z_p α μ / p.
    pub eta_coulomb: f64,
}

/// Derives μ, κ, λ⁺, η⁺ and η^C from masses, momentum and potential.
pub fn scenario_parameters(masses: Masses, p: f64, spec: &PotentialSpec) -> Result<ScenarioParams> {
    if !(masses.m_target > 0.0 && masses.m_projectile > 0.0) {
        return Err(Error::InvalidInput(format!(
            "masses must be positive, got m_target = {}, m_projectile = {}",
            masses.m_target, masses.m_projectile
        )));
    }
    ScenarioParams::from_reduced_mass(masses.reduced_mass(), p, spec)
}

impl ScenarioParams {
    pub fn from_reduced_mass(reduced_mass: f64, p: f64, spec: &PotentialSpec) -> Result<Self> {
        if !(reduced_mass > 0.0 && reduced_mass.is_finite()) {
            return Err(Error::InvalidInput(format!("reduced mass must be positive, got {reduced_mass}")));
        }
        if !(p > 0.0 && p.is_finite()) {
            return Err(Error::InvalidInput(format!("momentum must be positive, got {p}")));
        }
        spec.validate()?;
        let velocity = p / reduced_mass;
        let lambda = spec.lambda();
        Ok(Self {
            reduced_mass,
            p,
            kappa: spec.short_range().map_or(0.0, |s| p * s.radius),
            lambda,
            eta: lambda / velocity,
            eta_coulomb: spec.coulomb().map_or(0.0, |c| c.coupling() / velocity),
        })
    }
}

/// A potential together with the kinematics it is probed at.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScatteringScenario {
    pub potential: PotentialSpec,
    pub reduced_mass: f64,
    pub p: f64,
}

impl ScatteringScenario {
    pub fn new(potential: PotentialSpec, reduced_mass: f64, p: f64) -> Result<Self> {
        ScenarioParams::from_reduced_mass(reduced_mass, p, &potential)?;
        Ok(Self {
            potential,
            reduced_mass,
            p,
        })
    }

    pub fn from_masses(potential: PotentialSpec, masses: Masses, p: f64) -> Result<Self> {
        scenario_parameters(masses, p, &potential)?;
        Self::new(potential, masses.reduced_mass(), p)
    }

    pub fn params(&self) -> ScenarioParams {
        ScenarioParams::from_reduced_mass(self.reduced_mass, self.p, &self.potential)
            .expect("validated at construction")
    }

    pub fn basis(&self) -> Basis {
        self.potential.basis()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::units::nuclear_radius_fm;

    fn three_figures(got: f64, want: f64) -> bool {
        let digits = want.abs().log10().floor();
        (got - want).abs() <= 0.5 * 10f64.powf(digits - 2.0)
    }

    #[test]
    fn helium_reduced_mass() {
        let m = Masses {
            m_target: 3727.38,
            m_projectile: 938.27,
        };
        assert!((m.reduced_mass() - 749.58).abs() < 0.01);
    }

    #[test]
    fn proton_helium_parameters() {
        let step = SphericalStep::from_mev_fm(-30.2, nuclear_radius_fm(1.3, 4)).unwrap();
        let spec = PotentialSpec::Composite {
            coulomb: Coulomb {
                z_target: 2,
                z_projectile: 1,
            },
            short_range: step,
        };
        let s = ScenarioParams::from_reduced_mass(749.0, 237.0, &spec).unwrap();
        assert!(three_figures(s.kappa, 2.48), "{}", s.kappa);
        assert!(three_figures(s.lambda, -0.316), "{}", s.lambda);
        assert!(three_figures(s.eta_coulomb, 0.0461), "{}", s.eta_coulomb);
        assert!((s.eta + 1.0).abs() < 0.005);
    }

    #[test]
    fn invalid_inputs() {
        assert!(SphericalStep::new(1.0, 0.0).is_err());
        let spec = PotentialSpec::SphericalStep(SphericalStep::new(1.0, 0.01).unwrap());
        assert!(ScenarioParams::from_reduced_mass(749.0, 0.0, &spec).is_err());
        let bad = Masses {
            m_target: -1.0,
            m_projectile: 1.0,
        };
        assert!(scenario_parameters(bad, 1.0, &spec).is_err());
    }

    #[test]
    fn pure_coulomb_has_no_lambda() {
        let spec = PotentialSpec::Coulomb(Coulomb {
            z_target: 2,
            z_projectile: 1,
        });
        assert_eq!(spec.lambda(), 0.0);
        assert_eq!(spec.basis(), Basis::Coulomb);
    }
}
