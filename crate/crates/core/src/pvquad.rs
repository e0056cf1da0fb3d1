//! Gauss–Legendre panel quadrature, the principal-value rule on [−1, 1],
//! and the three integrals that make up a second-order phase shift.
//!
//! Every integrand here is real. Principal-value integrals are never
//! evaluated as ε-limits: the odd part of an integrand with a simple pole
//! at the origin integrates to zero, so `P∫_{-1}^{1} f = ∫_0^1 [f(x)+f(−x)] dx`
//! and the folded integrand is regular. Gauss–Legendre nodes never include
//! a panel endpoint, so x = 0 is never sampled.

use std::f64::consts::PI;
use std::num::NonZeroUsize;
use std::sync::OnceLock;

use gauss_quad::legendre::GaussLegendre;

use crate::error::{Error, Result};

/// Points per Gauss–Legendre panel.
pub const PANEL_ORDER: usize = 64;

/// First octave boundary of the [2, ∞) integral.
const TAIL_START: f64 = 16.0;

/// Nodes and weights of the 64-point rule on [−1, 1].
pub fn gauss_legendre_64() -> &'static [(f64, f64)] {
    static RULE: OnceLock<Vec<(f64, f64)>> = OnceLock::new();
    RULE.get_or_init(|| {
        let n = NonZeroUsize::new(PANEL_ORDER).expect("nonzero order");
        GaussLegendre::new(n).as_node_weight_pairs().to_vec()
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureSpec {
    pub rel_tol: f64,
    pub abs_tol: f64,
    /// Cap on the number of panels examined by one adaptive integral.
    pub max_panels: usize,
    /// Largest z the [2, ∞) integral may extend to.
    pub tail_zmax: f64,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self {
            rel_tol: 1e-8,
            abs_tol: 1e-12,
            max_panels: 4096,
            tail_zmax: 1e7,
        }
    }
}

impl QuadratureSpec {
    pub fn with_rel_tol(rel_tol: f64) -> Self {
        Self {
            rel_tol,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.rel_tol > 0.0 && self.abs_tol > 0.0) {
            return Err(Error::InvalidInput(format!(
                "quadrature tolerances must be positive (rel_tol = {}, abs_tol = {})",
                self.rel_tol, self.abs_tol
            )));
        }
        if self.max_panels < 4 {
            return Err(Error::InvalidInput(format!(
                "max_panels must be at least 4, got {}",
                self.max_panels
            )));
        }
        if !(self.tail_zmax > TAIL_START) {
            return Err(Error::InvalidInput(format!(
                "tail_zmax must exceed {TAIL_START}, got {}",
                self.tail_zmax
            )));
        }
        Ok(())
    }
}

/// Components of η²(Δ₋ + Δ₊ + Δ∞).
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct SecondOrderTerms {
    pub delta_minus: f64,
    pub delta_plus: f64,
    pub delta_inf: f64,
    /// Estimated remainder of Δ∞ beyond the last octave.
    pub tail_estimate: f64,
}

impl SecondOrderTerms {
    pub fn sum(&self) -> f64 {
        self.delta_minus + self.delta_plus + self.delta_inf
    }
}

/// One fixed 64-point panel on [a, b], returning (∫f, ∫|f|).
fn panel<F>(f: &mut F, a: f64, b: f64) -> Result<(f64, f64)>
where
    F: FnMut(f64) -> Result<f64>,
{
    let half = 0.5 * (b - a);
    let mid = 0.5 * (b + a);
    let mut sum = 0.0;
    let mut abs = 0.0;
    for &(x, w) in gauss_legendre_64() {
        let v = f(mid + half * x)?;
        sum += w * v;
        abs += w * v.abs();
    }
    Ok((sum * half, abs * half))
}

/// Adaptive integral of a fallible integrand over [a, b], starting from
/// `initial_panels` equal panels and bisecting any panel whose two halves
/// disagree with the whole.
pub fn integrate<F>(mut f: F, a: f64, b: f64, initial_panels: usize, spec: &QuadratureSpec) -> Result<f64>
where
    F: FnMut(f64) -> Result<f64>,
{
    if a == b {
        return Ok(0.0);
    }
    let n0 = initial_panels.max(1);
    let width = (b - a) / n0 as f64;
    let mut stack: Vec<(f64, f64, f64, f64, u32)> = Vec::with_capacity(n0 + 64);
    for i in (0..n0).rev() {
        let lo = a + width * i as f64;
        let hi = if i + 1 == n0 { b } else { lo + width };
        let (v, m) = panel(&mut f, lo, hi)?;
        stack.push((lo, hi, v, m, 0));
    }
    let total_width = (b - a).abs();
    let mut panels = n0;
    let mut total = 0.0;
    while let Some((lo, hi, whole, whole_abs, depth)) = stack.pop() {
        let mid = 0.5 * (lo + hi);
        let (left, left_abs) = panel(&mut f, lo, mid)?;
        let (right, right_abs) = panel(&mut f, mid, hi)?;
        panels += 2;
        let refined = left + right;
        let scale = whole_abs.max(left_abs + right_abs);
        let tol = (spec.abs_tol * (hi - lo).abs() / total_width).max(spec.rel_tol * scale);
        if (refined - whole).abs() <= tol || depth >= 50 {
            total += refined;
            continue;
        }
        if panels > spec.max_panels {
            return Err(Error::NonConvergence {
                lower: lo,
                upper: hi,
                panels,
            });
        }
        stack.push((mid, hi, right, right_abs, depth + 1));
        stack.push((lo, mid, left, left_abs, depth + 1));
    }
    Ok(total)
}

/// Infallible convenience wrapper around [`integrate`].
pub fn integrate_real<F>(f: F, a: f64, b: f64, initial_panels: usize, spec: &QuadratureSpec) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    integrate(|x| Ok(f(x)), a, b, initial_panels, spec)
}

/// `P∫_{-1}^{1} f(x) dx` for `f` analytic on [−1, 1] apart from at most a
/// simple pole at the origin.
pub fn principal_value_symmetric<F>(f: F, spec: &QuadratureSpec) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    integrate(|x| Ok(f(x) + f(-x)), 0.0, 1.0, 1, spec)
}

/// Scaled kernel along a momentum ray: `s ↦ v_l(p, p s)`.
pub trait MomentumProfile {
    fn at(&self, s: f64) -> Result<f64>;
}

impl<F> MomentumProfile for F
where
    F: Fn(f64) -> Result<f64>,
{
    fn at(&self, s: f64) -> Result<f64> {
        self(s)
    }
}

/// `Δ₋ = (2/π) ∫_{-1}^{1} {v(1+x)² − v(1−x)²} / (x(4−x²)) dx`.
///
/// The integrand is even with a removable singularity at x = 0, so it is
/// folded onto [0, 1].
pub fn delta_minus(v: &dyn MomentumProfile, spec: &QuadratureSpec) -> Result<f64> {
    let folded = integrate(
        |x| {
            let up = v.at(1.0 + x)?;
            let down = v.at(1.0 - x)?;
            Ok((up - down) * (up + down) / (x * (4.0 - x * x)))
        },
        0.0,
        1.0,
        2,
        spec,
    )?;
    Ok(4.0 / PI * folded)
}

/// `Δ₊ = −(1/π) ∫_{-1}^{1} {v(1+x)² + v(1−x)²} / (4−x²) dx`.
pub fn delta_plus(v: &dyn MomentumProfile, spec: &QuadratureSpec) -> Result<f64> {
    let folded = integrate(
        |x| {
            let up = v.at(1.0 + x)?;
            let down = v.at(1.0 - x)?;
            Ok((up * up + down * down) / (4.0 - x * x))
        },
        0.0,
        1.0,
        2,
        spec,
    )?;
    Ok(-2.0 / PI * folded)
}

/// `Δ∞ = (2/π) ∫_2^∞ v(z)² / (z²−1) dz`, returned with the estimated
/// remainder beyond the last octave.
///
/// The range is covered as [2, 16] followed by octaves [z, 2z]. With the
/// integrand bounded by C/z³ an octave contributes 3C/(8z²) and everything
/// beyond it C/(8z²), so the remainder is taken as a third of the last
/// octave. Extension stops once that is below tolerance and the octaves
/// are decaying at least like 1/z.
pub fn delta_infinity(v: &dyn MomentumProfile, spec: &QuadratureSpec) -> Result<(f64, f64)> {
    let integrand = |z: f64| -> Result<f64> {
        let val = v.at(z)?;
        Ok(val * val / (z * z - 1.0))
    };
    let mut total = integrate(integrand, 2.0, TAIL_START, 4, spec)?;
    let mut lo = TAIL_START;
    let mut previous = f64::INFINITY;
    while 2.0 * lo <= spec.tail_zmax {
        let octave = integrate(integrand, lo, 2.0 * lo, 2, spec)?;
        total += octave;
        let tail = octave / 3.0;
        let decaying = octave <= 0.5 * previous || octave == 0.0;
        if decaying && tail <= spec.abs_tol.max(spec.rel_tol * total.abs()) {
            return Ok((2.0 / PI * total, 2.0 / PI * tail));
        }
        previous = octave;
        lo *= 2.0;
    }
    Err(Error::TailFailure { z_max: lo })
}

/// `∫_{-1}^{1} sin(κx)/x · f(x) dx` for even `f`, which tends to π f(0)
/// with an O(1/κ) error.
pub fn sine_kernel_delta_sequence<F>(kappa: f64, f_even: F) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    if kappa == 0.0 {
        return Ok(0.0);
    }
    let spec = QuadratureSpec {
        rel_tol: 1e-12,
        abs_tol: 1e-14,
        max_panels: 1 << 20,
        ..QuadratureSpec::default()
    };
    // About four half-periods per initial panel.
    let panels = (kappa.abs() / (4.0 * PI)).ceil() as usize;
    let half = integrate_real(
        |x| {
            let kx = kappa * x;
            kappa * sinc(kx) * f_even(x)
        },
        0.0,
        1.0,
        panels,
        &spec,
    )?;
    Ok(2.0 * half)
}

/// sin(x)/x with the removable point filled in.
pub fn sinc(x: f64) -> f64 {
    if x.abs() < 1e-4 {
        let x2 = x * x;
        1.0 - x2 / 6.0 + x2 * x2 / 120.0
    } else {
        x.sin() / x
    }
}

/// `P∫_0^∞ √(2/π) sin(kr − lπ/2) f(k) / (k² − p²) dk` for a smooth `f`
/// that is negligible beyond `k_cut`.
///
/// [0, 2p] is mapped to x ∈ [−1, 1] via k = p(1+x) and handled by the
/// principal-value rule; [2p, k_cut] is an ordinary integral.
pub fn principal_value_sine_transform<F>(
    f: F,
    p: f64,
    r: f64,
    l: u32,
    k_cut: f64,
    spec: &QuadratureSpec,
) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    let phase = f64::from(l) * std::f64::consts::FRAC_PI_2;
    let norm = (2.0 / PI).sqrt();
    let oscillations = (p * r / PI).ceil() as usize;
    // k² − p² = p² x (2 + x), dk = p dx.
    let near = integrate_real(
        |x| {
            let g = |x: f64| {
                let k = p * (1.0 + x);
                norm * (k * r - phase).sin() * f(k) / (p * x * (2.0 + x))
            };
            g(x) + g(-x)
        },
        0.0,
        1.0,
        oscillations.max(1),
        spec,
    )?;
    let far_panels = ((k_cut - 2.0 * p) * r / (4.0 * PI)).ceil().max(1.0) as usize;
    let far = integrate_real(
        |k| norm * (k * r - phase).sin() * f(k) / (k * k - p * p),
        2.0 * p,
        k_cut,
        far_panels,
        spec,
    )?;
    Ok(near + far)
}
