//! Boyd and Shimogaki indices, associate-space indices and the sandwich
//! chain between them.

use alloc::vec::Vec;

use crate::domain::WeightedDomain;
use crate::error::{Error, Result};
use crate::math::{exp, least_squares_line, ln, neville_at_zero};
use crate::psi::{divide_psi, Interval, PsiFunction};
use crate::search::golden_max;
use crate::space::ln_fundamental;

/// Which end of the scale a limit is taken at.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    ToZero,
    ToInfinity,
}

/// A log-log slope limit.
#[derive(Debug, Clone, PartialEq)]
pub struct SlopeEstimate {
    /// Extrapolated limit.
    pub value: f64,
    /// `ln s` at each level, starting with `s = 1`.
    pub ln_s: Vec<f64>,
    pub ln_h: Vec<f64>,
    /// Two-point slopes between consecutive levels.
    pub slopes: Vec<f64>,
    /// Least-squares slope over the four largest scales and its RMS residual.
    pub fit_slope: f64,
    pub fit_residual: f64,
}

/// Limit of `d ln h / d ln s` along `s = 10^{±2m}`, `m = 0..=levels`.
///
/// The two-point slopes carry an `O(1/ln s)` bias; they are extrapolated to
/// `1/|ln s| → 0` by a quadratic through the last three.
pub fn extrapolated_slope<F>(mut ln_h: F, direction: Direction, levels: usize) -> Result<SlopeEstimate>
where
    F: FnMut(f64) -> Result<f64>,
{
    if levels < 3 {
        return Err(Error::ParameterOutOfRange { name: "levels", value: levels as f64 });
    }
    let sign = match direction {
        Direction::ToInfinity => 1.0,
        Direction::ToZero => -1.0,
    };
    let mut ls = Vec::with_capacity(levels + 1);
    let mut hs = Vec::with_capacity(levels + 1);
    for m in 0..=levels {
        let l = sign * 2.0 * m as f64 * core::f64::consts::LN_10;
        let h = ln_h(l)?;
        if !h.is_finite() {
            return Err(Error::InvalidInput(alloc::format!("non-finite ln h at ln s = {l}")));
        }
        ls.push(l);
        hs.push(h);
    }
    let mut slopes = Vec::with_capacity(levels);
    let mut xs = Vec::with_capacity(levels);
    for m in 1..=levels {
        slopes.push((hs[m] - hs[m - 1]) / (ls[m] - ls[m - 1]));
        xs.push(1.0 / (0.5 * (ls[m] + ls[m - 1])).abs());
    }
    let k = slopes.len();
    let value = neville_at_zero(&xs[k - 3..], &slopes[k - 3..]);
    let j = ls.len();
    let (fit_slope, _, fit_residual) = least_squares_line(&ls[j - 4..], &hs[j - 4..]);
    Ok(SlopeEstimate { value, ln_s: ls, ln_h: hs, slopes, fit_slope, fit_residual })
}

/// Upper (`s(j) → ∞`) or lower (`s(j) → 0`) Boyd index.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoydSide {
    Upper,
    Lower,
}

/// A numerical Boyd index with its closed form `(d(j)+θ(j))/a` or `/b`.
#[derive(Debug, Clone, PartialEq)]
pub struct BoydEstimate {
    pub closed_form: f64,
    pub estimate: SlopeEstimate,
}

/// Boyd index of block `j` for the pair `(G(ψ), G(ψν))`, other coordinates
/// of `s` held at 1.
pub fn boyd_index(psi: &PsiFunction, nu: &PsiFunction, domain: &WeightedDomain, j: usize, side: BoydSide, levels: usize) -> Result<BoydEstimate> {
    if psi.representation().is_none() {
        return Err(Error::MissingRepresentation);
    }
    if psi.interval() != nu.interval() {
        let (x, y) = (psi.interval(), nu.interval());
        return Err(Error::IntervalMismatch { left: (x.a(), x.b()), right: (y.a(), y.b()) });
    }
    let block = domain.blocks().get(j).ok_or(Error::LengthMismatch { expected: domain.num_blocks(), found: j + 1 })?;
    let dd = block.scaling_exponent();
    let iv = psi.interval();
    let (direction, closed_form) = match side {
        BoydSide::Upper => (Direction::ToInfinity, dd / iv.a()),
        BoydSide::Lower => (Direction::ToZero, dd * iv.inv_b()),
    };
    let estimate = extrapolated_slope(|l| ln_fundamental(nu, dd * l), direction, levels)?;
    Ok(BoydEstimate { closed_form, estimate })
}

/// Boyd index of the pair `(G(ψ), G(ζ))` with `ν = ζ/ψ`.
pub fn boyd_index_for_pair(psi: &PsiFunction, zeta: &PsiFunction, domain: &WeightedDomain, j: usize, side: BoydSide, levels: usize) -> Result<BoydEstimate> {
    let nu = divide_psi(zeta, psi)?;
    boyd_index(psi, &nu, domain, j, side, levels)
}

/// Boyd indices of every block.
#[derive(Debug, Clone, PartialEq)]
pub struct IndexReport {
    /// `[B⁺_1, B⁻_1, B⁺_2, B⁻_2, …]` in closed form.
    pub closed_form: Vec<f64>,
    pub numerical: Vec<f64>,
    /// Numerical `(B⁺_j, B⁻_j)`.
    pub per_block: Vec<(f64, f64)>,
    /// Largest fit residual over all slopes.
    pub fit_residual: f64,
}

pub fn boyd_report(psi: &PsiFunction, nu: &PsiFunction, domain: &WeightedDomain, levels: usize) -> Result<IndexReport> {
    let mut closed_form = Vec::new();
    let mut numerical = Vec::new();
    let mut per_block = Vec::new();
    let mut fit_residual: f64 = 0.0;
    for j in 0..domain.num_blocks() {
        let up = boyd_index(psi, nu, domain, j, BoydSide::Upper, levels)?;
        let lo = boyd_index(psi, nu, domain, j, BoydSide::Lower, levels)?;
        closed_form.extend_from_slice(&[up.closed_form, lo.closed_form]);
        numerical.extend_from_slice(&[up.estimate.value, lo.estimate.value]);
        per_block.push((up.estimate.value, lo.estimate.value));
        fit_residual = fit_residual.max(up.estimate.fit_residual).max(lo.estimate.fit_residual);
    }
    Ok(IndexReport { closed_form, numerical, per_block, fit_residual })
}

/// `ln s` sampling grid for `M_G`: `10^{lo}..10^{hi}` with `points` nodes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogGrid {
    pub lo_exp: f64,
    pub hi_exp: f64,
    pub points: usize,
}

impl Default for LogGrid {
    fn default() -> Self {
        LogGrid { lo_exp: -8.0, hi_exp: 8.0, points: 65 }
    }
}

impl LogGrid {
    pub fn ln_nodes(&self) -> Vec<f64> {
        let n = self.points.max(2);
        (0..n)
            .map(|i| (self.lo_exp + (self.hi_exp - self.lo_exp) * i as f64 / (n - 1) as f64) * core::f64::consts::LN_10)
            .collect()
    }
}

/// `M_G(t)` with where it was found.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MValue {
    pub value: f64,
    pub ln_value: f64,
    /// `ln s` of the maximiser; `±inf` for a limit at an end of the scale.
    pub ln_s_argmax: f64,
}

/// Outward steps when the maximiser sits at an end of the `s`-grid.
const OUTWARD_STEPS: usize = 12;

/// `M_G(t) = sup_s φ(st) / φ(s)`.
///
/// Grid maximisers are refined by golden section in `ln s`. When the
/// maximiser sits at an end of the grid, the ratio is followed outward on
/// `ln s = 2^k ln s_end` and extrapolated in `1/ln s`.
pub fn shimogaki_m(psi: &PsiFunction, t: f64, grid: &LogGrid) -> Result<MValue> {
    if !(t > 0.0 && t.is_finite()) {
        return Err(Error::NonPositive { what: "t", value: t });
    }
    if t == 1.0 {
        return Ok(MValue { value: 1.0, ln_value: 0.0, ln_s_argmax: 0.0 });
    }
    let lt = ln(t);
    let ratio = |l: f64| -> Result<f64> { Ok(ln_fundamental(psi, l + lt)? - ln_fundamental(psi, l)?) };
    let nodes = grid.ln_nodes();
    let mut vals = Vec::with_capacity(nodes.len());
    for &l in &nodes {
        vals.push(ratio(l)?);
    }
    let best = (0..vals.len()).max_by(|&i, &j| vals[i].total_cmp(&vals[j])).unwrap();
    let mut ln_value = vals[best];
    let mut arg = nodes[best];
    if best > 0 && best + 1 < nodes.len() {
        let g = |l: f64| ratio(l).unwrap_or(f64::NEG_INFINITY);
        let (l, v) = golden_max(&g, nodes[best - 1], nodes[best + 1], 1e-10, 200);
        if v > ln_value {
            ln_value = v;
            arg = l;
        }
        return Ok(MValue { value: exp(ln_value), ln_value, ln_s_argmax: arg });
    }
    let l_end = nodes[best];
    let mut xs = Vec::with_capacity(OUTWARD_STEPS);
    let mut ys = Vec::with_capacity(OUTWARD_STEPS);
    for k in 1..=OUTWARD_STEPS {
        let l = l_end * (1u64 << k) as f64;
        let v = ratio(l)?;
        xs.push(1.0 / l);
        ys.push(v);
        if v > ln_value {
            ln_value = v;
            arg = l;
        }
    }
    let m = xs.len();
    let limit = neville_at_zero(&xs[m - 4..], &ys[m - 4..]);
    if limit.is_finite() && limit > ln_value {
        ln_value = limit;
        arg = if l_end > 0.0 { f64::INFINITY } else { f64::NEG_INFINITY };
    }
    Ok(MValue { value: exp(ln_value), ln_value, ln_s_argmax: arg })
}

/// Shimogaki indices by limits and by the defining inf/sup.
#[derive(Debug, Clone, PartialEq)]
pub struct ShimogakiReport {
    /// Limit of `ln M(t)/ln t` as `t → 0`.
    pub beta_minus: f64,
    /// Limit as `t → ∞`.
    pub beta_plus: f64,
    /// `sup_{t<1} ln M(t)/ln t` over the sampled `t`.
    pub beta_minus_def: f64,
    /// `inf_{t>1} ln M(t)/ln t` over the sampled `t`.
    pub beta_plus_def: f64,
    /// Sampled `(t, M(t))`, ascending in `t`.
    pub m_profile: Vec<(f64, f64)>,
    /// Limits and definitional values differ by more than 2%.
    pub disagreement: bool,
}

/// `t = 10^{±m}`, `m = 1..=levels`.
pub fn shimogaki_indices(psi: &PsiFunction, levels: usize) -> Result<ShimogakiReport> {
    if levels < 3 {
        return Err(Error::ParameterOutOfRange { name: "levels", value: levels as f64 });
    }
    let grid = LogGrid::default();
    let side = |sign: f64| -> Result<(Vec<f64>, Vec<f64>, Vec<(f64, f64)>)> {
        let mut xs = Vec::new();
        let mut rs = Vec::new();
        let mut prof = Vec::new();
        for m in 1..=levels {
            let lt = sign * m as f64 * core::f64::consts::LN_10;
            let mv = shimogaki_m(psi, exp(lt), &grid)?;
            xs.push(1.0 / lt.abs());
            rs.push(mv.ln_value / lt);
            prof.push((exp(lt), mv.value));
        }
        Ok((xs, rs, prof))
    };
    let (xu, ru, pu) = side(1.0)?;
    let (xl, rl, pl) = side(-1.0)?;
    let k = xu.len();
    let beta_plus = neville_at_zero(&xu[k - 3..], &ru[k - 3..]);
    let beta_minus = neville_at_zero(&xl[k - 3..], &rl[k - 3..]);
    let beta_plus_def = ru.iter().copied().fold(f64::INFINITY, f64::min);
    let beta_minus_def = rl.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut m_profile: Vec<(f64, f64)> = pl.into_iter().rev().collect();
    m_profile.push((1.0, 1.0));
    m_profile.extend(pu);
    let off = |x: f64, y: f64| (x - y).abs() > 0.02 * x.abs().max(y.abs()).max(0.05);
    let disagreement = off(beta_plus, beta_plus_def) || off(beta_minus, beta_minus_def);
    Ok(ShimogakiReport { beta_minus, beta_plus, beta_minus_def, beta_plus_def, m_profile, disagreement })
}

/// `(1 - 1/b, 1 - 1/a)`: upper and lower Boyd indices of the associate space.
pub fn associate_boyd(interval: &Interval) -> (f64, f64) {
    (1.0 - interval.inv_b(), 1.0 - 1.0 / interval.a())
}

/// The chain `B⁻ <= β⁻ <= β⁺ <= B⁺` for `G(ψ)` on the line.
#[derive(Debug, Clone, PartialEq)]
pub struct SandwichReport {
    pub b_minus: f64,
    pub beta_minus: f64,
    pub beta_plus: f64,
    pub b_plus: f64,
    pub holds: bool,
}

/// Slack of the chain comparisons: 2% of the larger side, never below
/// `0.02 · 0.05`.
pub fn le_with_slack(x: f64, y: f64) -> bool {
    x <= y + 0.02 * x.abs().max(y.abs()).max(0.05)
}

pub fn sandwich_check(psi: &PsiFunction, levels: usize) -> Result<SandwichReport> {
    let rep = psi.representation().ok_or(Error::MissingRepresentation)?;
    let domain = rep.domain().clone();
    let one = PsiFunction::constant(psi.interval(), 1.0)?;
    let up = boyd_index(psi, &one, &domain, 0, BoydSide::Upper, levels)?;
    let lo = boyd_index(psi, &one, &domain, 0, BoydSide::Lower, levels)?;
    let sh = shimogaki_indices(psi, levels.min(6))?;
    let (b_minus, b_plus) = (lo.estimate.value, up.estimate.value);
    let holds = b_minus >= -0.001
        && le_with_slack(b_minus, sh.beta_minus)
        && le_with_slack(sh.beta_minus, sh.beta_plus)
        && le_with_slack(sh.beta_plus, b_plus);
    Ok(SandwichReport { b_minus, beta_minus: sh.beta_minus, beta_plus: sh.beta_plus, b_plus, holds })
}
