//! The grand space `G(ψ)`: its norm, fundamental function, the subspace
//! `G°`, and the Fatou property.

use alloc::vec::Vec;

use crate::domain::WeightedDomain;
use crate::error::{Error, Result};
use crate::function::{indicator_of_measure, lp_norm_with, truncate, LpOptions, ProductFunction};
use crate::indices::{extrapolated_slope, Direction, SlopeEstimate};
use crate::math::{exp, ln};
use crate::psi::PsiFunction;
use crate::search::{sup_over_p, SupOptions, SupOverP};

/// `G_X(μ; ψ; a, b)`.
#[derive(Debug, Clone)]
pub struct GrandSpace {
    domain: WeightedDomain,
    psi: PsiFunction,
}

impl GrandSpace {
    /// Fails when ψ carries a representation living on a different domain.
    pub fn new(domain: WeightedDomain, psi: PsiFunction) -> Result<Self> {
        if let Some(f) = psi.representation() {
            if !f.domain().same_as(&domain) {
                return Err(Error::Structure("ψ's representation lives on a different domain".into()));
            }
        }
        Ok(GrandSpace { domain, psi })
    }

    /// `G(ψ)` on the domain of ψ's representation.
    pub fn from_representation(psi: PsiFunction) -> Result<Self> {
        let domain = psi.representation().ok_or(Error::MissingRepresentation)?.domain().clone();
        Ok(GrandSpace { domain, psi })
    }

    pub fn domain(&self) -> &WeightedDomain {
        &self.domain
    }

    pub fn psi(&self) -> &PsiFunction {
        &self.psi
    }
}

/// Settings for norm suprema.
#[derive(Debug, Clone, Copy, Default)]
pub struct NormOptions {
    pub lp: LpOptions,
    pub sup: SupOptions,
}

/// `||f||_{G(ψ)} = sup_p |f|_p / ψ(p)`.
pub fn bgls_norm(space: &GrandSpace, f: &ProductFunction, tol: f64) -> Result<SupOverP> {
    let mut opts = NormOptions::default();
    opts.lp.tol = tol;
    bgls_norm_with(space, f, opts)
}

pub fn bgls_norm_with(space: &GrandSpace, f: &ProductFunction, opts: NormOptions) -> Result<SupOverP> {
    if !f.domain().same_as(&space.domain) {
        return Err(Error::Structure("function and space live on different domains".into()));
    }
    norm_over(&space.psi, f, opts)
}

/// `sup_p |f|_p / ψ(p)` without a domain check.
pub(crate) fn norm_over(psi: &PsiFunction, f: &ProductFunction, opts: NormOptions) -> Result<SupOverP> {
    sup_over_p(
        &psi.interval(),
        |p| {
            let r = lp_norm_with(f, p, opts.lp)?;
            if r.is_infinite() {
                return Ok(f64::INFINITY);
            }
            if r.value == 0.0 {
                return Ok(f64::NEG_INFINITY);
            }
            Ok(r.ln_value - psi.ln_eval(p)?)
        },
        opts.sup,
    )
}

/// `φ(G(ψ), δ) = sup_p δ^{1/p} / ψ(p)`.
pub fn fundamental_function(space: &GrandSpace, delta: f64) -> Result<SupOverP> {
    fundamental_function_psi(&space.psi, delta)
}

/// The fundamental function depends on ψ alone.
pub fn fundamental_function_psi(psi: &PsiFunction, delta: f64) -> Result<SupOverP> {
    if !(delta > 0.0) {
        return Err(Error::NonPositive { what: "measure", value: delta });
    }
    ln_fundamental_sup(psi, ln(delta), SupOptions::default())
}

fn ln_fundamental_sup(psi: &PsiFunction, ln_delta: f64, opts: SupOptions) -> Result<SupOverP> {
    sup_over_p(&psi.interval(), |p| Ok(ln_delta / p - psi.ln_eval(p)?), opts)
}

/// `ln φ(G(ψ), e^{ln_delta})`, usable far beyond the `f64` range of `δ`.
pub fn ln_fundamental(psi: &PsiFunction, ln_delta: f64) -> Result<f64> {
    let opts = SupOptions { keep_profile: false, ..SupOptions::default() };
    Ok(ln_fundamental_sup(psi, ln_delta, opts)?.ln_value)
}

/// Extrapolated limit of `ln φ(s) / ln s` as `s → 0` or `s → ∞`, from
/// `s = 10^{∓2m}`, `m = 1..=levels`.
pub fn fundfn_asymptotic_slope(psi: &PsiFunction, direction: Direction, levels: usize) -> Result<SlopeEstimate> {
    extrapolated_slope(|ln_s| ln_fundamental(psi, ln_s), direction, levels)
}

/// Whether `φ(δ)` falls below `1e-3` along `δ = 10^{-m}`, `m <= 12`.
pub fn fundfn_vanishes_at_zero(space: &GrandSpace) -> Result<bool> {
    for m in 1..=12 {
        let v = ln_fundamental(&space.psi, -(m as f64) * core::f64::consts::LN_10)?;
        if v < ln(1e-3) {
            return Ok(true);
        }
    }
    Ok(false)
}

/// Thresholds for the `G°` test.
pub const G_O_PSI_LEVEL: f64 = 1e3;
pub const G_O_RATIO_LEVEL: f64 = 1e-3;
/// Deepest endpoint probe `10^-k` for the `G°` test.
pub const G_O_DEPTH: u32 = 14;

/// Whether `|f|_p / ψ(p) → 0` where `ψ(p) → ∞`: at each endpoint where ψ
/// exceeds `1e3` on the probe ladder, the ratio at the deepest probe must be
/// below `1e-3`.
pub fn in_g_o(space: &GrandSpace, f: &ProductFunction) -> Result<bool> {
    if f.is_zero() {
        return Ok(true);
    }
    let iv = space.psi.interval();
    let lp = LpOptions::default();
    for upper in [false, true] {
        let mut deepest: Option<f64> = None;
        for k in 2..=G_O_DEPTH {
            let e = exp(-(k as f64) * core::f64::consts::LN_10);
            let p = iv.p_of(if upper { 1.0 - e } else { e });
            let lpsi = space.psi.ln_eval(p)?;
            if lpsi > ln(G_O_PSI_LEVEL) {
                let r = lp_norm_with(f, p, lp)?;
                deepest = Some(if r.is_infinite() { f64::INFINITY } else { r.ln_value - lpsi });
            }
        }
        if let Some(v) = deepest {
            if v >= ln(G_O_RATIO_LEVEL) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// `||f_n||_G` along dyadic truncation levels.
#[derive(Debug, Clone, PartialEq)]
pub struct FatouReport {
    pub ns: Vec<f64>,
    pub norms: Vec<f64>,
    pub target: f64,
    pub nondecreasing: bool,
    /// Final value within `tol` (relative) of the target; vacuous for an
    /// infinite target.
    pub converged: bool,
}

/// Truncations at `n = 1, 2, 4, …, n_max`.
pub fn fatou_check(space: &GrandSpace, f: &ProductFunction, n_max: f64, tol: f64) -> Result<FatouReport> {
    let opts = NormOptions::default();
    let target = bgls_norm_with(space, f, opts)?.value;
    let mut ns = Vec::new();
    let mut norms = Vec::new();
    let mut n = 1.0;
    while n <= n_max {
        ns.push(n);
        norms.push(bgls_norm_with(space, &truncate(f, n), opts)?.value);
        n *= 2.0;
    }
    let nondecreasing = norms.windows(2).all(|w| w[1] >= w[0] * (1.0 - 1e-9));
    let last = norms.last().copied().unwrap_or(0.0);
    let converged = if target.is_finite() {
        if target == 0.0 {
            last == 0.0
        } else {
            (last - target).abs() <= tol * target && last <= target * (1.0 + 1e-9)
        }
    } else {
        true
    };
    Ok(FatouReport { ns, norms, target, nondecreasing, converged })
}

/// `||I_A||_{G(ψ)}` for a set of measure `delta`.
pub fn indicator_norm(space: &GrandSpace, delta: f64) -> Result<SupOverP> {
    let ind = indicator_of_measure(&space.domain, delta)?;
    bgls_norm_with(space, &ind, NormOptions::default())
}
