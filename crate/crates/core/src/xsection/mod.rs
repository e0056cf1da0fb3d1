//! Differential cross sections from a phase-shift table.
//!
//! The wavepacket-regularized amplitude is
//! `S(θ) = Σ_l (2l+1) g_l e^{2iσ_l} e^{2iδ_l} P_l(cos θ)` with
//! `g_l = exp(−2ε²(l+½)²)`, and `dσ/dΩ = |S|² / 4p²`. The sum is split as
//! `e^{2iδ} = 1 + 2i e^{iδ} sin δ` into a pure Coulomb part, which runs to
//! the Gaussian cutoff, and a nuclear part, which only has the few l of
//! the table. The two are added before squaring.

mod modes;

pub use modes::{CrossSectionInput, CrossSectionMode, ModeRegistry};

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::shifts::PhaseShiftTable;
use crate::specfun::coulomb_sigma_all;
use crate::units::natural_to_barn;

/// Gaussian factors below this end the Coulomb sum.
pub const GAUSSIAN_CUTOFF: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WavepacketSpec {
    /// Momentum width relative to the mean momentum.
    pub epsilon: f64,
}

impl Default for WavepacketSpec {
    fn default() -> Self {
        Self { epsilon: 1e-3 }
    }
}

impl WavepacketSpec {
    pub fn new(epsilon: f64) -> Result<Self> {
        if !(epsilon > 0.0 && epsilon < 0.5) {
            return Err(Error::InvalidInput(format!(
                "wavepacket epsilon must lie in (0, 0.5), got {epsilon}"
            )));
        }
        Ok(Self { epsilon })
    }

    /// `exp(−2ε²(l+½)²)`.
    pub fn damping(&self, l: usize) -> f64 {
        let x = self.epsilon * (l as f64 + 0.5);
        (-2.0 * x * x).exp()
    }

    /// `ceil(4/ε)`, extended if needed until the damping is below
    /// [`GAUSSIAN_CUTOFF`].
    pub fn l_max(&self) -> usize {
        let mut l = (4.0 / self.epsilon).ceil() as usize;
        while self.damping(l) >= GAUSSIAN_CUTOFF {
            l += 1;
        }
        l
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CrossSectionCurve {
    pub mode: String,
    /// Angles in radians.
    pub theta: Vec<f64>,
    /// dσ/dΩ in MeV⁻².
    pub dsigma_natural: Vec<f64>,
    /// dσ/dΩ in barn/sr.
    pub dsigma_barn: Vec<f64>,
    /// Highest l in the partial-wave sum (0 for closed-form modes).
    pub l_max_used: usize,
    /// Largest dropped-term bound relative to the largest kept term.
    pub truncation_residual: f64,
}

impl CrossSectionCurve {
    fn from_natural(mode: &str, theta: &[f64], natural: Vec<f64>, l_max_used: usize, residual: f64) -> Self {
        Self {
            mode: mode.to_string(),
            theta: theta.to_vec(),
            dsigma_barn: natural.iter().map(|&v| natural_to_barn(v)).collect(),
            dsigma_natural: natural,
            l_max_used,
            truncation_residual: residual,
        }
    }

    /// Index and value of the largest barn value with θ in [lo, hi].
    pub fn max_in(&self, lo: f64, hi: f64) -> Option<(usize, f64)> {
        self.theta
            .iter()
            .zip(&self.dsigma_barn)
            .enumerate()
            .filter(|(_, (t, _))| **t >= lo && **t <= hi)
            .map(|(i, (_, v))| (i, *v))
            .fold(None, |best, (i, v)| match best {
                Some((_, b)) if b >= v => best,
                _ => Some((i, v)),
            })
    }

    /// Interior local maxima `(θ, barn)` with θ in [lo, hi].
    pub fn local_maxima(&self, lo: f64, hi: f64) -> Vec<(f64, f64)> {
        let v = &self.dsigma_barn;
        (1..v.len().saturating_sub(1))
            .filter(|&i| self.theta[i] >= lo && self.theta[i] <= hi)
            .filter(|&i| v[i] > v[i - 1] && v[i] >= v[i + 1])
            .map(|i| (self.theta[i], v[i]))
            .collect()
    }
}

/// Neumaier's compensated summation.
#[derive(Debug, Clone, Copy, Default)]
pub struct CompensatedSum {
    sum: f64,
    carry: f64,
}

impl CompensatedSum {
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.carry += (self.sum - t) + x;
        } else {
            self.carry += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.carry
    }
}

#[derive(Debug, Clone, Copy, Default)]
struct ComplexSum {
    re: CompensatedSum,
    im: CompensatedSum,
}

impl ComplexSum {
    fn add(&mut self, z: Complex64) {
        self.re.add(z.re);
        self.im.add(z.im);
    }

    fn value(&self) -> Complex64 {
        Complex64::new(self.re.value(), self.im.value())
    }
}

/// Legendre polynomial by upward recurrence.
pub fn legendre_p(l: u32, x: f64) -> f64 {
    let (mut prev, mut cur) = (1.0, x);
    if l == 0 {
        return prev;
    }
    for n in 1..l {
        let nf = f64::from(n);
        let next = ((2.0 * nf + 1.0) * x * cur - nf * prev) / (nf + 1.0);
        prev = cur;
        cur = next;
    }
    cur
}

/// Calls `f(l, P_l(x))` for l = 0..=l_max.
fn for_each_legendre(l_max: usize, x: f64, mut f: impl FnMut(usize, f64)) {
    let (mut prev, mut cur) = (0.0, 1.0);
    for l in 0..=l_max {
        f(l, cur);
        let lf = l as f64;
        let next = ((2.0 * lf + 1.0) * x * cur - lf * prev) / (lf + 1.0);
        prev = cur;
        cur = next;
    }
}

fn check_grid(theta: &[f64], allow_zero: bool) -> Result<()> {
    for &t in theta {
        let ok = if allow_zero { t >= 0.0 } else { t > 0.0 };
        if !(ok && t <= PI) {
            return Err(Error::domain(
                "cross_section",
                format!("angle {t} outside {}", if allow_zero { "[0, π]" } else { "(0, π]" }),
            ));
        }
    }
    Ok(())
}

/// Wavepacket sum for arbitrary Coulomb phases `sigma` (length gives the
/// Coulomb l range) and nuclear shifts `nuclear` (zero beyond its length).
pub fn wavepacket_cross_section(
    p: f64,
    sigma: &[f64],
    nuclear: &[f64],
    wp: WavepacketSpec,
    theta: &[f64],
    mode: &str,
) -> Result<CrossSectionCurve> {
    check_grid(theta, true)?;
    if sigma.is_empty() {
        return Err(Error::InvalidInput("empty Coulomb phase list".into()));
    }
    let l_max = sigma.len() - 1;
    let coulomb_terms: Vec<Complex64> = sigma
        .iter()
        .enumerate()
        .map(|(l, &s)| Complex64::from_polar((2 * l + 1) as f64 * wp.damping(l), 2.0 * s))
        .collect();
    let nuclear_terms: Vec<Complex64> = nuclear
        .iter()
        .zip(&coulomb_terms)
        .map(|(&d, &c)| c * Complex64::new(0.0, 2.0) * Complex64::from_polar(d.sin(), d))
        .collect();
    let natural: Vec<f64> = theta
        .par_iter()
        .map(|&t| {
            let mut sc = ComplexSum::default();
            let mut sn = ComplexSum::default();
            for_each_legendre(l_max, t.cos(), |l, pl| {
                sc.add(coulomb_terms[l] * pl);
                if let Some(n) = nuclear_terms.get(l) {
                    sn.add(*n * pl);
                }
            });
            (sc.value() + sn.value()).norm_sqr() / (4.0 * p * p)
        })
        .collect();
    let residual = (2 * l_max + 3) as f64 * wp.damping(l_max + 1);
    Ok(CrossSectionCurve::from_natural(mode, theta, natural, l_max, residual))
}

/// Coulomb plus nuclear cross section from a Coulomb-basis table.
pub fn composite_cross_section(
    table: &PhaseShiftTable,
    wp: WavepacketSpec,
    theta: &[f64],
) -> Result<CrossSectionCurve> {
    let sigma = coulomb_sigma_all(wp.l_max(), table.params.eta_coulomb);
    let nuclear: Vec<f64> = table.records.iter().map(|r| r.perturbative()).collect();
    wavepacket_cross_section(table.params.p, &sigma, &nuclear, wp, theta, "composite")
}

/// `|Σ (2l+1) e^{iδ_l} sin δ_l P_l|² / p²` for the given shifts.
pub fn nuclear_only_cross_section(shifts: &[f64], p: f64, theta: &[f64]) -> Result<CrossSectionCurve> {
    check_grid(theta, true)?;
    let terms: Vec<Complex64> = shifts
        .iter()
        .enumerate()
        .map(|(l, &d)| Complex64::from_polar((2 * l + 1) as f64 * d.sin(), d))
        .collect();
    let l_max = shifts.len().saturating_sub(1);
    let natural: Vec<f64> = theta
        .par_iter()
        .map(|&t| {
            let mut s = ComplexSum::default();
            for_each_legendre(l_max, t.cos(), |l, pl| {
                if let Some(z) = terms.get(l) {
                    s.add(*z * pl);
                }
            });
            s.value().norm_sqr() / (p * p)
        })
        .collect();
    let residual = match (terms.first(), terms.last()) {
        (Some(_), Some(last)) if shifts.len() > 1 => {
            let largest = terms.iter().map(|z| z.norm()).fold(0.0, f64::max);
            if largest > 0.0 {
                last.norm() / largest
            } else {
                0.0
            }
        }
        _ => 0.0,
    };
    Ok(CrossSectionCurve::from_natural("nuclear_only", theta, natural, l_max, residual))
}

/// Narrow forward term `exp(−θ²/4ε²) / (16 p² ε⁴)` in MeV⁻².
pub fn forward_peak(p: f64, wp: WavepacketSpec, theta: f64) -> f64 {
    let e2 = wp.epsilon * wp.epsilon;
    (-theta * theta / (4.0 * e2)).exp() / (16.0 * p * p * e2 * e2)
}

/// `η²/(4 p² sin⁴(θ/2))`.
pub fn rutherford_reference(p: f64, eta_coulomb: f64, theta: &[f64]) -> Result<CrossSectionCurve> {
    check_grid(theta, false)?;
    let natural = theta
        .iter()
        .map(|&t| {
            let s2 = (0.5 * t).sin().powi(2);
            eta_coulomb * eta_coulomb / (4.0 * p * p * s2 * s2)
        })
        .collect();
    Ok(CrossSectionCurve::from_natural("rutherford", theta, natural, 0, 0.0))
}

/// `n` angles spaced geometrically from `lo` to π.
pub fn geometric_theta_grid(n: usize, lo: f64) -> Result<Vec<f64>> {
    if n < 2 || !(lo > 0.0 && lo < PI) {
        return Err(Error::InvalidInput(format!(
            "theta grid needs at least 2 points and 0 < lo < π, got n = {n}, lo = {lo}"
        )));
    }
    let ratio = (PI / lo).ln() / (n - 1) as f64;
    let mut grid: Vec<f64> = (0..n).map(|i| lo * (ratio * i as f64).exp()).collect();
    grid[n - 1] = PI;
    Ok(grid)
}

/// 600 angles from 1e-4 to π.
pub fn default_theta_grid() -> Vec<f64> {
    geometric_theta_grid(600, 1e-4).expect("valid default grid")
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;
    use twofloat::TwoFloat;

    #[test]
    fn legendre_values() {
        assert_eq!(legendre_p(0, 0.3), 1.0);
        assert_eq!(legendre_p(1, 0.5), 0.5);
        let x: f64 = 0.3;
        let oracle = (63.0 * x.powi(5) - 70.0 * x.powi(3) + 15.0 * x) / 8.0;
        assert_relative_eq!(oracle, 0.345_386_25, max_relative = 1e-14);
        assert_relative_eq!(legendre_p(5, x), 0.345_386_25, max_relative = 1e-14);
    }

    #[test]
    fn compensated_sum_recovers_small_terms() {
        let mut s = CompensatedSum::default();
        for x in [1e16, 1.0, -1e16, 1.0] {
            s.add(x);
        }
        assert_eq!(s.value(), 2.0);
    }

    #[test]
    fn forward_peak_values() {
        let wp = WavepacketSpec::new(1e-3).unwrap();
        let p: f64 = 237.0;
        assert_relative_eq!(forward_peak(p, wp, 0.0), 1.0 / (16.0 * p * p * 1e-12), max_relative = 1e-14);
        assert_relative_eq!(
            forward_peak(p, wp, 2e-3) / forward_peak(p, wp, 0.0),
            (-1f64).exp(),
            max_relative = 1e-14
        );
        let barn = natural_to_barn(forward_peak(p, wp, 0.0));
        assert!((barn / 4.33e8 - 1.0).abs() < 0.005, "{barn}");
    }

    #[test]
    fn rutherford_values() {
        let p = 237.0;
        let back = rutherford_reference(p, 0.0461, &[PI, PI / 2.0]).unwrap();
        assert!((back.dsigma_barn[0] / 3.68e-6 - 1.0).abs() < 0.005, "{}", back.dsigma_barn[0]);
        assert_relative_eq!(back.dsigma_barn[1], 4.0 * back.dsigma_barn[0], max_relative = 1e-12);
        assert!(rutherford_reference(p, 0.0, &[1.0]).unwrap().dsigma_natural[0] == 0.0);
        assert!(rutherford_reference(p, 0.0461, &[0.0]).is_err());
    }

    #[test]
    fn nuclear_only_examples() {
        let grid = [0.1, 1.0, 3.0];
        let zero = nuclear_only_cross_section(&[0.0, 0.0, 0.0], 237.0, &grid).unwrap();
        assert!(zero.dsigma_natural.iter().all(|&v| v == 0.0));
        let d0: f64 = 0.8;
        let single = nuclear_only_cross_section(&[d0], 237.0, &grid).unwrap();
        for v in single.dsigma_natural {
            assert_relative_eq!(v, d0.sin().powi(2) / (237.0 * 237.0), max_relative = 1e-14);
        }
    }

    #[test]
    fn split_matches_direct_sum() {
        // Three partial waves with arbitrary phases, direct sum in double-double.
        let sigma = [0.3, -1.1, 2.0];
        let delta = [0.7, -0.4, 1.9];
        let wp = WavepacketSpec::new(0.2).unwrap();
        let p = 1.0;
        for theta in [0.0, 0.4, 2.0, PI] {
            let split = wavepacket_cross_section(p, &sigma, &delta, wp, &[theta], "t").unwrap();
            let x = f64::cos(theta);
            let (mut re, mut im) = (TwoFloat::from(0.0), TwoFloat::from(0.0));
            for l in 0..3 {
                let w = (2 * l + 1) as f64 * wp.damping(l) * legendre_p(l as u32, x);
                let phase = 2.0 * (sigma[l] + delta[l]);
                re += TwoFloat::new_mul(w, phase.cos());
                im += TwoFloat::new_mul(w, phase.sin());
            }
            let (re, im) = (f64::from(re), f64::from(im));
            let direct = (re * re + im * im) / 4.0;
            assert!((split.dsigma_natural[0] - direct).abs() < 1e-12 * direct.max(1.0));
        }
    }

    #[test]
    fn gaussian_cutoff_l_max() {
        let wp = WavepacketSpec::new(1e-3).unwrap();
        assert!(wp.l_max() >= 4000);
        assert!(wp.damping(wp.l_max()) < GAUSSIAN_CUTOFF);
        assert!(WavepacketSpec::new(0.0).is_err());
    }

    #[test]
    fn l_max_stability() {
        let wp = WavepacketSpec::new(0.01).unwrap();
        let eta = 0.0461;
        let grid = [0.01, 0.3, 2.0];
        let l = wp.l_max();
        let a = wavepacket_cross_section(237.0, &coulomb_sigma_all(l, eta), &[0.5], wp, &grid, "t").unwrap();
        let b = wavepacket_cross_section(237.0, &coulomb_sigma_all(l + 5, eta), &[0.5], wp, &grid, "t").unwrap();
        for (x, y) in a.dsigma_natural.iter().zip(&b.dsigma_natural) {
            assert!((x - y).abs() < 1e-8 * x.abs());
        }
    }

    #[test]
    fn grid_shape() {
        let g = default_theta_grid();
        assert_eq!(g.len(), 600);
        assert_relative_eq!(g[0], 1e-4, max_relative = 1e-15);
        assert_eq!(g[599], PI);
        assert!(g.windows(2).all(|w| w[1] > w[0]));
    }

    proptest! {
        #[test]
        fn curves_are_nonnegative(
            d in proptest::collection::vec(-3.0f64..3.0, 1..6),
            theta in 0.0f64..PI,
            eta in -0.5f64..0.5,
        ) {
            let wp = WavepacketSpec::new(0.05).unwrap();
            let sigma = coulomb_sigma_all(wp.l_max(), eta);
            let c = wavepacket_cross_section(10.0, &sigma, &d, wp, &[theta], "t").unwrap();
            prop_assert!(c.dsigma_natural[0] >= 0.0);
            let n = nuclear_only_cross_section(&d, 10.0, &[theta]).unwrap();
            prop_assert!(n.dsigma_natural[0] >= 0.0);
        }
    }
}
