//! Boundedness criteria for Hardy-type, maximal, Hilbert and Fourier
//! operators on `G(ψ; a, b)` over `R₊` with Lebesgue measure, and the Hardy
//! operators `P_α`, `Q_β` themselves.

use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::function::{truncate, Factor, NumericFactor, Piece, ProductFunction};
use crate::math::{exp, ln, ln_add_exp, ln_log_power_integral, powf};
use crate::psi::Interval;
use crate::quad::{integrate_ln, QuadOptions};
use crate::search::SupOptions;
use crate::space::{norm_over, GrandSpace, NormOptions};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Operator {
    PAlpha,
    QBeta,
    Maximal,
    Hilbert,
    Fourier,
}

impl Operator {
    pub const ALL: [Operator; 5] = [Operator::PAlpha, Operator::QBeta, Operator::Maximal, Operator::Hilbert, Operator::Fourier];

    pub fn name(&self) -> &'static str {
        match self {
            Operator::PAlpha => "P_alpha",
            Operator::QBeta => "Q_beta",
            Operator::Maximal => "maximal",
            Operator::Hilbert => "hilbert",
            Operator::Fourier => "fourier",
        }
    }
}

/// The verdict of a boundedness rule.
#[derive(Debug, Clone, PartialEq)]
pub struct CriterionVerdict {
    pub operator: Operator,
    pub parameters: Vec<(&'static str, f64)>,
    pub bounded: bool,
    pub condition_text: String,
}

fn unit_parameter(name: &'static str, v: Option<f64>) -> Result<f64> {
    match v {
        Some(x) if x > 0.0 && x < 1.0 => Ok(x),
        Some(x) => Err(Error::ParameterOutOfRange { name, value: x }),
        None => Err(Error::InvalidInput(alloc::format!("{name} is required"))),
    }
}

/// Boundedness on `G(ψ; a, b)`. Boundary cases are unbounded.
pub fn boundedness(op: Operator, interval: &Interval, param: Option<f64>) -> Result<CriterionVerdict> {
    let (a, b) = (interval.a(), interval.b());
    let (parameters, bounded, condition_text) = match op {
        Operator::PAlpha => {
            let alpha = unit_parameter("alpha", param)?;
            (alloc::vec![("alpha", alpha)], alpha > 1.0 / a, String::from("alpha > 1/a"))
        }
        Operator::QBeta => {
            let beta = unit_parameter("beta", param)?;
            (alloc::vec![("beta", beta)], beta < interval.inv_b(), String::from("beta < 1/b"))
        }
        Operator::Maximal => (Vec::new(), a > 1.0, String::from("a > 1")),
        Operator::Hilbert => (Vec::new(), a > 1.0 && b < f64::INFINITY, String::from("a > 1 and b < inf")),
        Operator::Fourier => (Vec::new(), a > 1.0 && b < f64::INFINITY, String::from("a > 1 and b < inf")),
    };
    Ok(CriterionVerdict { operator: op, parameters, bounded, condition_text })
}

fn line_factor(f: &ProductFunction) -> Result<&Factor> {
    let bl = f.domain().blocks();
    if bl.len() != 1 || bl[0].dim != 1 || bl[0].theta != 0.0 || bl[0].power_density() != Some((0.0, 0.0)) {
        return Err(Error::Structure("Hardy operators act on R₊ with Lebesgue measure".into()));
    }
    Ok(&f.factors()[0])
}

/// `ln ∫_lo^hi s^γ piece(s) ds` over a sub-range of the piece.
fn ln_piece_moment(piece: &Piece, gamma: f64, lo: f64, hi: f64) -> Result<f64> {
    if hi <= lo {
        return Ok(f64::NEG_INFINITY);
    }
    let (k, anchor) = piece.log.map_or((0.0, 1.0), |l| (l.k, l.anchor));
    let q = piece.e + gamma;
    if let Some(v) = ln_log_power_integral(lo, hi, q, k, anchor) {
        return Ok(if v.is_infinite() { v } else { ln(piece.c) + v });
    }
    let r = integrate_ln(|s| piece.ln_value(s) + gamma * ln(s), lo, hi, QuadOptions { rel_tol: 1e-13, max_intervals: 10_000 })?;
    Ok(r.ln_value)
}

fn ln_numeric_moment(nf: &NumericFactor, gamma: f64, lo: f64, hi: f64) -> Result<f64> {
    let (lo, hi) = (lo.max(nf.support.0), hi.min(nf.support.1));
    if hi <= lo {
        return Ok(f64::NEG_INFINITY);
    }
    let mut pts = alloc::vec![lo];
    pts.extend(nf.breaks.iter().copied().filter(|&b| b > lo && b < hi));
    pts.push(hi);
    pts.sort_by(|x, y| x.total_cmp(y));
    let mut acc = f64::NEG_INFINITY;
    for w in pts.windows(2) {
        let ev = &nf.ln_eval;
        let r = integrate_ln(|s| ev(s) + gamma * ln(s), w[0], w[1], QuadOptions { rel_tol: 1e-12, max_intervals: 10_000 })?;
        acc = ln_add_exp(acc, r.ln_value);
    }
    Ok(acc)
}

/// `ln ∫_lo^hi s^γ f(s) ds`.
fn ln_moment(f: &Factor, gamma: f64, lo: f64, hi: f64) -> Result<f64> {
    match f {
        Factor::Pieces(pp) => {
            let mut acc = f64::NEG_INFINITY;
            for piece in pp.pieces() {
                let v = ln_piece_moment(piece, gamma, piece.lo.max(lo), piece.hi.min(hi))?;
                acc = ln_add_exp(acc, v);
            }
            Ok(acc)
        }
        Factor::Numeric(nf) => ln_numeric_moment(nf, gamma, lo, hi),
    }
}

fn ln_hardy_p(f: &Factor, alpha: f64, t: f64) -> Result<f64> {
    let v = ln_moment(f, alpha - 1.0, 0.0, t)?;
    if v == f64::INFINITY {
        return Err(Error::NonIntegrable("at 0"));
    }
    Ok(v - alpha * ln(t))
}

fn ln_hardy_q(f: &Factor, beta: f64, t: f64) -> Result<f64> {
    let v = ln_moment(f, beta - 1.0, t, f64::INFINITY)?;
    if v == f64::INFINITY {
        return Err(Error::NonIntegrable("at infinity"));
    }
    Ok(v - beta * ln(t))
}

/// `(P_α f)(t) = t^{-α} ∫_0^t s^{α-1} f(s) ds`.
pub fn hardy_p(f: &ProductFunction, alpha: f64, t: f64) -> Result<f64> {
    let fac = line_factor(f)?;
    let alpha = unit_parameter("alpha", Some(alpha))?;
    if !(t > 0.0 && t.is_finite()) {
        return Err(Error::NonPositive { what: "t", value: t });
    }
    Ok(exp(ln_hardy_p(fac, alpha, t)?))
}

/// `(Q_β f)(t) = t^{-β} ∫_t^∞ s^{β-1} f(s) ds`.
pub fn hardy_q(f: &ProductFunction, beta: f64, t: f64) -> Result<f64> {
    let fac = line_factor(f)?;
    let beta = unit_parameter("beta", Some(beta))?;
    if !(t > 0.0 && t.is_finite()) {
        return Err(Error::NonPositive { what: "t", value: t });
    }
    Ok(exp(ln_hardy_q(fac, beta, t)?))
}

/// `P_α f` or `Q_β f` as a numeric function, with its endpoint exponents.
pub fn apply_hardy(op: Operator, f: &ProductFunction, param: f64) -> Result<ProductFunction> {
    let fac = line_factor(f)?.clone();
    let nf = fac.to_numeric();
    let (lo, hi) = nf.support;
    if !(hi > lo) {
        return Ok(ProductFunction::zero(f.domain().clone()));
    }
    let mut breaks = nf.breaks.clone();
    breaks.extend_from_slice(&[lo, hi]);
    breaks.retain(|b| b.is_finite() && *b > 0.0);
    let out = match op {
        Operator::PAlpha => {
            let alpha = unit_parameter("alpha", Some(param))?;
            if lo == 0.0 && nf.zero_exponent.map_or(false, |e| alpha + e <= 0.0) {
                return Err(Error::NonIntegrable("at 0"));
            }
            let inf_exponent = if hi == f64::INFINITY { nf.inf_exponent.map(|e| e.max(-alpha)) } else { Some(-alpha) };
            let g = fac.clone();
            NumericFactor {
                ln_eval: Arc::new(move |t| ln_hardy_p(&g, alpha, t).unwrap_or(f64::NAN)),
                breaks,
                support: (lo, f64::INFINITY),
                zero_exponent: if lo == 0.0 { nf.zero_exponent } else { None },
                inf_exponent,
            }
        }
        Operator::QBeta => {
            let beta = unit_parameter("beta", Some(param))?;
            if hi == f64::INFINITY && nf.inf_exponent.map_or(false, |e| beta + e >= 0.0) {
                return Err(Error::NonIntegrable("at infinity"));
            }
            let zero_exponent = if lo == 0.0 { nf.zero_exponent.map(|e| e.min(-beta)) } else { Some(-beta) };
            let g = fac.clone();
            NumericFactor {
                ln_eval: Arc::new(move |t| ln_hardy_q(&g, beta, t).unwrap_or(f64::NAN)),
                breaks,
                support: (0.0, hi),
                zero_exponent,
                inf_exponent: if hi == f64::INFINITY { nf.inf_exponent } else { None },
            }
        }
        _ => return Err(Error::InvalidInput("only P_alpha and Q_beta are applied numerically".into())),
    };
    ProductFunction::new(alloc::vec![Factor::Numeric(out)], f.domain().clone())
}

/// Qualitative outcome of [`hardy_norm_probe`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProbeFlag {
    BoundedConsistent,
    UnboundedConsistent,
    Inconclusive,
}

/// Relative change below which the probe ratios count as a plateau.
pub const PLATEAU_CHANGE: f64 = 0.01;
/// Per-level growth above which the probe ratios count as unbounded.
pub const GROWTH_RATE: f64 = 0.10;

#[derive(Debug, Clone, PartialEq)]
pub struct ProbeReport {
    pub ns: Vec<f64>,
    /// `||T f_n||_G / ||f_n||_G`; `+inf` when `T f_n` leaves the space.
    pub ratios: Vec<f64>,
    pub flag: ProbeFlag,
}

/// Decimal exponent of the last truncation level of [`hardy_norm_probe`].
pub const PROBE_MAX_DECADE: usize = 300;

/// True when the declared endpoint exponents of `T f` make `|T f|_p`
/// infinite for some `p` in the interval.
fn leaves_space(tf: &ProductFunction, iv: &Interval) -> bool {
    let Factor::Numeric(nf) = &tf.factors()[0] else { return false };
    let at_zero = nf.support.0 == 0.0 && nf.zero_exponent.map_or(false, |e| e < 0.0 && -1.0 / e < iv.b());
    let at_inf = nf.support.1 == f64::INFINITY && nf.inf_exponent.map_or(false, |e| e >= 0.0 || iv.a() < -1.0 / e);
    at_zero || at_inf
}

/// Ratios `||T f_n|| / ||f_n||` over truncations `f_n` of the
/// representation of ψ, at `n = 10^{kD}`, `k = 1..=levels`,
/// `D = ⌊300 / levels⌋`.
pub fn hardy_norm_probe(op: Operator, space: &GrandSpace, param: f64, levels: usize) -> Result<ProbeReport> {
    let psi = space.psi();
    let rep = psi.representation().ok_or(Error::MissingRepresentation)?;
    line_factor(rep)?;
    if levels < 3 {
        return Err(Error::ParameterOutOfRange { name: "levels", value: levels as f64 });
    }
    let mut opts = NormOptions::default();
    opts.lp.tol = 1e-9;
    opts.sup = SupOptions { grid: 32, keep_profile: false, ..SupOptions::default() };
    let iv = psi.interval();
    let mut ns = Vec::new();
    let mut ratios = Vec::new();
    let step = PROBE_MAX_DECADE / levels;
    for k in 1..=levels {
        let n = powf(10.0, (step * k) as f64);
        let fnc = truncate(rep, n);
        let tf = apply_hardy(op, &fnc, param)?;
        ns.push(n);
        if leaves_space(&tf, &iv) {
            ratios.push(f64::INFINITY);
            continue;
        }
        let num = norm_over(psi, &tf, opts)?;
        let den = norm_over(psi, &fnc, opts)?;
        ratios.push(if num.is_infinite() { f64::INFINITY } else { exp(num.ln_value - den.ln_value) });
    }
    let m = ratios.len();
    let flag = if ratios.iter().any(|r| r.is_infinite()) {
        ProbeFlag::UnboundedConsistent
    } else if (m - 2..m).all(|i| (ratios[i] / ratios[i - 1] - 1.0).abs() < PLATEAU_CHANGE) {
        ProbeFlag::BoundedConsistent
    } else if (m - 2..m).all(|i| ratios[i] > ratios[i - 1] * (1.0 + GROWTH_RATE)) {
        ProbeFlag::UnboundedConsistent
    } else {
        ProbeFlag::Inconclusive
    };
    Ok(ProbeReport { ns, ratios, flag })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::function::PiecewisePowerFactor;

    fn iv(a: f64, b: f64) -> Interval {
        Interval::new(a, b).unwrap()
    }

    #[test]
    fn verdict_examples() {
        assert!(boundedness(Operator::PAlpha, &iv(2.0, 4.0), Some(0.6)).unwrap().bounded);
        assert!(!boundedness(Operator::QBeta, &iv(2.0, 4.0), Some(0.3)).unwrap().bounded);
        assert!(!boundedness(Operator::Hilbert, &iv(2.0, f64::INFINITY), None).unwrap().bounded);
        assert!(boundedness(Operator::Fourier, &iv(2.0, 4.0), None).unwrap().bounded);
        assert!(!boundedness(Operator::PAlpha, &iv(2.0, 4.0), Some(0.5)).unwrap().bounded);
        assert!(!boundedness(Operator::QBeta, &iv(2.0, 4.0), Some(0.25)).unwrap().bounded);
        assert!(matches!(boundedness(Operator::PAlpha, &iv(2.0, 4.0), Some(1.0)), Err(Error::ParameterOutOfRange { .. })));
    }

    #[test]
    fn hardy_closed_forms() {
        let c = 0.3;
        let f = ProductFunction::on_line(PiecewisePowerFactor::single(0.0, 1.0, 1.0, -c).unwrap());
        for t in [0.1, 0.5, 1.0] {
            let v = hardy_p(&f, 0.7, t).unwrap();
            let exact = powf(t, -c) / (0.7 - c);
            assert!((v - exact).abs() < 1e-12 * exact);
        }
        assert!(matches!(hardy_p(&f, 0.3, 0.5), Err(Error::NonIntegrable(_))));
        let g = ProductFunction::on_line(PiecewisePowerFactor::single(1.0, f64::INFINITY, 1.0, -c).unwrap());
        for t in [1.0, 3.0, 40.0] {
            let v = hardy_q(&g, 0.1, t).unwrap();
            let exact = powf(t, -c) / (c - 0.1);
            assert!((v - exact).abs() < 1e-12 * exact);
        }
        assert!(matches!(hardy_q(&g, 0.3, 2.0), Err(Error::NonIntegrable(_))));
        let ind = ProductFunction::on_line(PiecewisePowerFactor::indicator(0.0, 1.0).unwrap());
        assert_eq!(hardy_q(&ind, 0.5, 2.0).unwrap(), 0.0);
        assert!((hardy_p(&ind, 0.4, 0.5).unwrap() - 2.5).abs() < 1e-13);
    }
}
