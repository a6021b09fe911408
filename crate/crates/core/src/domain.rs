//! Product domains `R₊^{d(1)} × … × R₊^{d(k)}` with homogeneous block weights.
//!
//! Every block is treated radially: a factor is a function of `ρ = |x|` and
//! the block measure is `ω · w(ρ) · ρ^{d-1} dρ`, where `ω` is the area of the
//! positive part of the unit sphere.

use alloc::sync::Arc;
use alloc::vec::Vec;
use core::fmt;

use crate::error::{Error, Result};
use crate::math::{exp, lgamma, ln, powf};

/// A radial weight `w(ρ)`, as its logarithm.
pub type LnWeight = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// The weight of one block.
#[derive(Clone)]
pub enum WeightProfile {
    /// `W = 1`.
    Lebesgue,
    /// `W(x) = c |x|^θ`.
    Power { c: f64 },
    /// A user weight given radially, with its declared order and the angular
    /// mass it carries on the unit sphere.
    Custom { ln_radial: LnWeight, angular_mass: f64 },
}

impl fmt::Debug for WeightProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            WeightProfile::Lebesgue => f.write_str("Lebesgue"),
            WeightProfile::Power { c } => write!(f, "Power {{ c: {c} }}"),
            WeightProfile::Custom { angular_mass, .. } => write!(f, "Custom {{ angular_mass: {angular_mass} }}"),
        }
    }
}

/// One factor `R₊^{d}` of the domain.
#[derive(Debug, Clone)]
pub struct BlockSpec {
    pub dim: usize,
    pub theta: f64,
    pub profile: WeightProfile,
}

impl BlockSpec {
    pub fn lebesgue(dim: usize) -> Self {
        BlockSpec { dim, theta: 0.0, profile: WeightProfile::Lebesgue }
    }

    /// `W(x) = c |x|^θ`.
    pub fn power(dim: usize, theta: f64, c: f64) -> Self {
        BlockSpec { dim, theta, profile: WeightProfile::Power { c } }
    }

    pub fn custom(dim: usize, theta: f64, ln_radial: LnWeight) -> Self {
        BlockSpec { dim, theta, profile: WeightProfile::Custom { ln_radial, angular_mass: orthant_sphere_area(dim) } }
    }

    /// `d + θ`, the scaling exponent of the block measure.
    pub fn scaling_exponent(&self) -> f64 {
        self.dim as f64 + self.theta
    }

    /// `ln W` along a ray, at radius `rho`.
    pub fn ln_weight(&self, rho: f64) -> f64 {
        match &self.profile {
            WeightProfile::Lebesgue => 0.0,
            WeightProfile::Power { c } => ln(*c) + self.theta * ln(rho),
            WeightProfile::Custom { ln_radial, .. } => ln_radial(rho),
        }
    }

    pub fn weight(&self, rho: f64) -> f64 {
        exp(self.ln_weight(rho))
    }

    /// `ln` of the full radial density `ω w(ρ) ρ^{d-1}`.
    pub fn ln_density(&self, rho: f64) -> f64 {
        let radial = if self.dim == 1 { 0.0 } else { (self.dim as f64 - 1.0) * ln(rho) };
        ln(self.angular_mass()) + self.ln_weight(rho) + radial
    }

    pub fn angular_mass(&self) -> f64 {
        match &self.profile {
            WeightProfile::Custom { angular_mass, .. } => *angular_mass,
            _ => orthant_sphere_area(self.dim),
        }
    }

    /// For Lebesgue and power profiles: `(ln coefficient, exponent)` with
    /// density `= exp(ln coefficient) ρ^{exponent}`.
    pub fn power_density(&self) -> Option<(f64, f64)> {
        let ln_c = match &self.profile {
            WeightProfile::Lebesgue => 0.0,
            WeightProfile::Power { c } => ln(*c),
            WeightProfile::Custom { .. } => return None,
        };
        let theta = if matches!(self.profile, WeightProfile::Lebesgue) { 0.0 } else { self.theta };
        Some((ln_c + ln(self.angular_mass()), theta + self.dim as f64 - 1.0))
    }

    fn validate(&self) -> Result<()> {
        if self.dim == 0 {
            return Err(Error::InvalidInput("block dimension must be positive".into()));
        }
        if !self.theta.is_finite() {
            return Err(Error::InvalidInput("block order must be finite".into()));
        }
        match &self.profile {
            WeightProfile::Lebesgue if self.theta != 0.0 => {
                Err(Error::InvalidInput("a Lebesgue block has order 0".into()))
            }
            WeightProfile::Power { c } if !(*c > 0.0 && c.is_finite()) => {
                Err(Error::NonPositive { what: "weight coefficient", value: *c })
            }
            _ if self.scaling_exponent() <= 0.0 => Err(Error::ParameterOutOfRange { name: "d + theta", value: self.scaling_exponent() }),
            _ => Ok(()),
        }
    }
}

/// Area of `S^{d-1} ∩ R₊^d`: `2 π^{d/2} / (Γ(d/2) 2^d)`.
pub fn orthant_sphere_area(dim: usize) -> f64 {
    let d = dim as f64;
    exp(ln(2.0) + 0.5 * d * ln(core::f64::consts::PI) - lgamma(0.5 * d) - d * ln(2.0))
}

/// The product domain with its weight.
#[derive(Debug, Clone)]
pub struct WeightedDomain {
    blocks: Vec<BlockSpec>,
}

impl WeightedDomain {
    pub fn new(blocks: Vec<BlockSpec>) -> Result<Self> {
        if blocks.is_empty() {
            return Err(Error::InvalidInput("a domain needs at least one block".into()));
        }
        for b in &blocks {
            b.validate()?;
        }
        Ok(WeightedDomain { blocks })
    }

    /// `R₊` with Lebesgue measure.
    pub fn line() -> Self {
        WeightedDomain { blocks: alloc::vec![BlockSpec::lebesgue(1)] }
    }

    /// One block of dimension `dim` with weight `|x|^θ` (Lebesgue when `θ = 0`).
    pub fn single(dim: usize, theta: f64) -> Result<Self> {
        let b = if theta == 0.0 { BlockSpec::lebesgue(dim) } else { BlockSpec::power(dim, theta, 1.0) };
        Self::new(alloc::vec![b])
    }

    pub fn blocks(&self) -> &[BlockSpec] {
        &self.blocks
    }

    pub fn num_blocks(&self) -> usize {
        self.blocks.len()
    }

    pub fn total_dim(&self) -> usize {
        self.blocks.iter().map(|b| b.dim).sum()
    }

    pub fn theta_vec(&self) -> Vec<f64> {
        self.blocks.iter().map(|b| b.theta).collect()
    }

    /// The vector `d + θ`.
    pub fn scaling_exponents(&self) -> Vec<f64> {
        self.blocks.iter().map(|b| b.scaling_exponent()).collect()
    }

    /// True when every block is Lebesgue or a power weight.
    pub fn is_power_weighted(&self) -> bool {
        self.blocks.iter().all(|b| b.power_density().is_some())
    }

    /// Same dimensions, orders and profiles (custom weights compare by
    /// pointer).
    pub fn same_as(&self, other: &WeightedDomain) -> bool {
        self.blocks.len() == other.blocks.len()
            && self.blocks.iter().zip(&other.blocks).all(|(x, y)| {
                x.dim == y.dim
                    && x.theta == y.theta
                    && match (&x.profile, &y.profile) {
                        (WeightProfile::Lebesgue, WeightProfile::Lebesgue) => true,
                        (WeightProfile::Power { c: c1 }, WeightProfile::Power { c: c2 }) => c1 == c2,
                        (WeightProfile::Custom { ln_radial: f1, .. }, WeightProfile::Custom { ln_radial: f2, .. }) => {
                            Arc::ptr_eq(f1, f2)
                        }
                        _ => false,
                    }
            })
    }
}

/// `∏ s(r)^{e(r)}`.
pub fn multi_power(s: &[f64], e: &[f64]) -> Result<f64> {
    let ln_v = ln_multi_power(s, e)?;
    let direct: f64 = s.iter().zip(e).map(|(&si, &ei)| crate::math::powf(si, ei)).product();
    Ok(if direct.is_finite() && direct > 0.0 { direct } else { exp(ln_v) })
}

/// `ln ∏ s(r)^{e(r)}`.
pub fn ln_multi_power(s: &[f64], e: &[f64]) -> Result<f64> {
    if s.len() != e.len() {
        return Err(Error::LengthMismatch { expected: s.len(), found: e.len() });
    }
    let mut acc = 0.0;
    for (&si, &ei) in s.iter().zip(e) {
        if !(si > 0.0 && si.is_finite()) {
            return Err(Error::NonPositive { what: "dilation factor", value: si });
        }
        acc += ei * ln(si);
    }
    Ok(acc)
}

/// `s^{d+θ} = ∏ s(r)^{d(r)+θ(r)}`: the factor by which `σ_s` multiplies
/// every `∫ |f|^p dμ`.
pub fn measure_scaling_factor(domain: &WeightedDomain, s: &[f64]) -> Result<f64> {
    multi_power(s, &domain.scaling_exponents())
}

pub fn ln_measure_scaling_factor(domain: &WeightedDomain, s: &[f64]) -> Result<f64> {
    ln_multi_power(s, &domain.scaling_exponents())
}

/// Sampled homogeneity-defect constants of a one-dimensional weight: the
/// extrema of `W(s y) / (s^θ W(y))` over `s >= 1` (the `∞` pair) and
/// `s <= 1` (the `0` pair).
#[derive(Debug, Clone, PartialEq)]
pub struct DefectConstants {
    pub k_plus_inf: f64,
    pub k_minus_inf: f64,
    pub k_plus_0: f64,
    pub k_minus_0: f64,
    /// Sampled `s >= 1` values; the `s <= 1` side uses their reciprocals.
    pub s_grid: Vec<f64>,
    pub y_grid: Vec<f64>,
}

/// Sample `W(s y) / (s^θ W(y))` on `s = 10^{k/4}`, `k = 0..=budget`, and
/// `y = 10^{(j - budget)/4}`, `j = 0..=2 budget`.
pub fn defect_constants<W: Fn(f64) -> f64>(weight: W, theta: f64, sample_budget: usize) -> Result<DefectConstants> {
    let n = sample_budget.max(1);
    let s_grid: Vec<f64> = (0..=n).map(|k| powf(10.0, k as f64 / 4.0)).collect();
    let y_grid: Vec<f64> = (0..=2 * n).map(|j| powf(10.0, (j as f64 - n as f64) / 4.0)).collect();
    let mut out = DefectConstants {
        k_plus_inf: f64::NEG_INFINITY,
        k_minus_inf: f64::INFINITY,
        k_plus_0: f64::NEG_INFINITY,
        k_minus_0: f64::INFINITY,
        s_grid: s_grid.clone(),
        y_grid: y_grid.clone(),
    };
    for &y in &y_grid {
        let wy = weight(y);
        if !(wy > 0.0) {
            return Err(Error::NonPositive { what: "weight", value: wy });
        }
        for &s in &s_grid {
            for (scale, hi) in [(s, true), (1.0 / s, false)] {
                let w = weight(scale * y);
                if !(w > 0.0) {
                    return Err(Error::NonPositive { what: "weight", value: w });
                }
                let r = w / (powf(scale, theta) * wy);
                if hi {
                    out.k_plus_inf = out.k_plus_inf.max(r);
                    out.k_minus_inf = out.k_minus_inf.min(r);
                } else {
                    out.k_plus_0 = out.k_plus_0.max(r);
                    out.k_minus_0 = out.k_minus_0.min(r);
                }
            }
        }
    }
    Ok(out)
}

/// Multiplicative bounds on `||σ_s||` relative to `φ(G(ν), s^{d+θ})` implied
/// by the defect constants for a weight that is only nearly homogeneous.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DefectBounds {
    /// Upper factor for `min s(j) > 1`.
    pub upper_inf: f64,
    /// Lower factor for `min s(j) > 1`.
    pub lower_inf: f64,
    /// Upper factor on the `0` side as printed, built from `K⁻₀`.
    pub upper_0_printed: f64,
    /// Upper factor on the `0` side built from `K⁺₀`.
    pub upper_0_corrected: f64,
    pub lower_0: f64,
}

fn pow_pair(k: f64, a: f64, b: f64) -> (f64, f64) {
    let x = powf(k, 1.0 / a);
    let y = if b == f64::INFINITY { 1.0 } else { powf(k, 1.0 / b) };
    (x, y)
}

pub fn defect_bounds(k: &DefectConstants, a: f64, b: f64) -> DefectBounds {
    let (p1, p2) = pow_pair(k.k_plus_inf, a, b);
    let (m1, m2) = pow_pair(k.k_minus_inf, a, b);
    let (q1, q2) = pow_pair(k.k_plus_0, a, b);
    let (n1, n2) = pow_pair(k.k_minus_0, a, b);
    DefectBounds {
        upper_inf: p1.max(p2),
        lower_inf: m1.min(m2),
        upper_0_printed: n1.max(n2),
        upper_0_corrected: q1.max(q2),
        lower_0: n1.min(n2),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn multi_power_examples() {
        assert_eq!(multi_power(&[2.0, 3.0], &[1.0, 2.0]).unwrap(), 18.0);
        assert_eq!(multi_power(&[5.0], &[0.0]).unwrap(), 1.0);
        assert!(matches!(multi_power(&[2.0], &[1.0, 2.0]), Err(Error::LengthMismatch { .. })));
        assert!(matches!(multi_power(&[-1.0], &[1.0]), Err(Error::NonPositive { .. })));
    }

    #[test]
    fn orthant_areas() {
        assert!((orthant_sphere_area(1) - 1.0).abs() < 1e-14);
        assert!((orthant_sphere_area(2) - core::f64::consts::FRAC_PI_2).abs() < 1e-14);
        // an eighth of 4π
        assert!((orthant_sphere_area(3) - core::f64::consts::PI / 2.0).abs() < 1e-13);
    }

    #[test]
    fn scaling_factor_examples() {
        let d = WeightedDomain::line();
        assert!((measure_scaling_factor(&d, &[2.0]).unwrap() - 2.0).abs() < 1e-15);
        let d = WeightedDomain::single(1, 1.0).unwrap();
        assert!((measure_scaling_factor(&d, &[2.0]).unwrap() - 4.0).abs() < 1e-15);
        let d = WeightedDomain::new(alloc::vec![BlockSpec::lebesgue(1), BlockSpec::power(1, 1.0, 1.0)]).unwrap();
        assert!((measure_scaling_factor(&d, &[2.0, 3.0]).unwrap() - 18.0).abs() < 1e-13);
    }

    #[test]
    fn homogeneous_weight_has_unit_defects() {
        let k = defect_constants(|x| 3.0 * x * x, 2.0, 16).unwrap();
        for v in [k.k_plus_inf, k.k_minus_inf, k.k_plus_0, k.k_minus_0] {
            assert!((v - 1.0).abs() < 1e-12);
        }
    }
}
