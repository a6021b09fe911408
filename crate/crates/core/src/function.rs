//! Test functions in product form and their weighted `L_p` norms.
//!
//! A factor is either piecewise `c x^e |ln(x/ℓ)|^k` (closed-form integrals,
//! exact divergence detection) or a numeric evaluator handled by quadrature.

use alloc::sync::Arc;
use alloc::vec::Vec;
use core::fmt;

use crate::domain::{BlockSpec, WeightProfile, WeightedDomain};
use crate::error::{Error, Result};
use crate::math::{exp, ln, ln_add_exp, ln_log_power_integral, powf};
use crate::quad::{integrate_ln, QuadOptions};

/// Optional logarithmic term `|ln(x/anchor)|^k` of a piece.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogTerm {
    pub k: f64,
    pub anchor: f64,
}

/// `c x^e |ln(x/ℓ)|^k` on `(lo, hi]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Piece {
    pub lo: f64,
    pub hi: f64,
    pub c: f64,
    pub e: f64,
    pub log: Option<LogTerm>,
}

impl Piece {
    pub fn power(lo: f64, hi: f64, c: f64, e: f64) -> Self {
        Piece { lo, hi, c, e, log: None }
    }

    pub fn log_power(lo: f64, hi: f64, c: f64, e: f64, k: f64, anchor: f64) -> Self {
        Piece { lo, hi, c, e, log: Some(LogTerm { k, anchor }) }
    }

    pub fn contains(&self, x: f64) -> bool {
        x > self.lo && x <= self.hi && x < f64::INFINITY
    }

    /// `ln` of the piece's value at `x` (inside the piece).
    pub fn ln_value(&self, x: f64) -> f64 {
        let mut v = ln(self.c) + self.e * ln(x);
        if let Some(l) = self.log {
            if l.k != 0.0 {
                v += l.k * ln(ln(x / l.anchor).abs());
            }
        }
        v
    }

    fn validate(&self) -> Result<()> {
        if !(self.lo >= 0.0 && self.hi > self.lo && !self.lo.is_nan() && !self.hi.is_nan()) {
            return Err(Error::InvalidInput(alloc::format!("bad piece range ({}, {}]", self.lo, self.hi)));
        }
        if !(self.c > 0.0 && self.c.is_finite()) {
            return Err(Error::NonPositive { what: "piece coefficient", value: self.c });
        }
        if !self.e.is_finite() {
            return Err(Error::InvalidInput("piece exponent must be finite".into()));
        }
        if let Some(l) = self.log {
            if !(l.k >= 0.0 && l.k.is_finite()) {
                return Err(Error::ParameterOutOfRange { name: "log power", value: l.k });
            }
            if !(l.anchor > 0.0 && l.anchor.is_finite()) {
                return Err(Error::NonPositive { what: "log anchor", value: l.anchor });
            }
            if self.lo < l.anchor && self.hi > l.anchor {
                return Err(Error::InvalidInput("a log piece may not straddle its anchor".into()));
            }
        }
        Ok(())
    }

    fn same_shape(&self, other: &Piece) -> bool {
        self.lo == other.lo && self.hi == other.hi && self.e == other.e && self.log == other.log
    }
}

/// Sorted, disjoint pieces; zero off the pieces.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct PiecewisePowerFactor {
    pieces: Vec<Piece>,
}

impl PiecewisePowerFactor {
    pub fn new(mut pieces: Vec<Piece>) -> Result<Self> {
        for p in &pieces {
            p.validate()?;
        }
        pieces.sort_by(|x, y| x.lo.total_cmp(&y.lo));
        for w in pieces.windows(2) {
            if w[1].lo < w[0].hi {
                return Err(Error::InvalidInput("pieces overlap".into()));
            }
        }
        Ok(PiecewisePowerFactor { pieces })
    }

    pub fn single(lo: f64, hi: f64, c: f64, e: f64) -> Result<Self> {
        Self::new(alloc::vec![Piece::power(lo, hi, c, e)])
    }

    pub fn indicator(lo: f64, hi: f64) -> Result<Self> {
        Self::single(lo, hi, 1.0, 0.0)
    }

    pub fn pieces(&self) -> &[Piece] {
        &self.pieces
    }

    pub fn is_zero(&self) -> bool {
        self.pieces.is_empty()
    }

    pub fn ln_eval(&self, x: f64) -> f64 {
        for p in &self.pieces {
            if p.contains(x) {
                return p.ln_value(x);
            }
        }
        f64::NEG_INFINITY
    }

    pub fn has_log_terms(&self) -> bool {
        self.pieces.iter().any(|p| p.log.map_or(false, |l| l.k != 0.0))
    }
}

/// `ln |f(x)|` of a numeric factor; `-inf` where it vanishes.
pub type LnEval = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// A factor known only through an evaluator.
///
/// `breaks` are interior points where the evaluator may have kinks; the
/// declared endpoint exponents (`f ~ x^e`) give exact divergence decisions
/// when the support reaches 0 or ∞.
#[derive(Clone)]
pub struct NumericFactor {
    pub ln_eval: LnEval,
    pub breaks: Vec<f64>,
    pub support: (f64, f64),
    pub zero_exponent: Option<f64>,
    pub inf_exponent: Option<f64>,
}

impl fmt::Debug for NumericFactor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("NumericFactor")
            .field("breaks", &self.breaks)
            .field("support", &self.support)
            .field("zero_exponent", &self.zero_exponent)
            .field("inf_exponent", &self.inf_exponent)
            .finish()
    }
}

impl NumericFactor {
    pub fn new(ln_eval: LnEval, support: (f64, f64)) -> Self {
        NumericFactor { ln_eval, breaks: Vec::new(), support, zero_exponent: None, inf_exponent: None }
    }

    pub fn cells(&self) -> Vec<(f64, f64)> {
        let (lo, hi) = self.support;
        let mut pts: Vec<f64> = alloc::vec![lo];
        let mut br: Vec<f64> = self.breaks.iter().copied().filter(|&x| x > lo && x < hi).collect();
        br.sort_by(|x, y| x.total_cmp(y));
        br.dedup();
        pts.extend(br);
        pts.push(hi);
        pts.windows(2).map(|w| (w[0], w[1])).collect()
    }
}

/// One block's factor.
#[derive(Debug, Clone)]
pub enum Factor {
    Pieces(PiecewisePowerFactor),
    Numeric(NumericFactor),
}

impl From<PiecewisePowerFactor> for Factor {
    fn from(p: PiecewisePowerFactor) -> Self {
        Factor::Pieces(p)
    }
}

impl Factor {
    pub fn ln_eval(&self, x: f64) -> f64 {
        match self {
            Factor::Pieces(p) => p.ln_eval(x),
            Factor::Numeric(n) => {
                if x > n.support.0 && x <= n.support.1 {
                    (n.ln_eval)(x)
                } else {
                    f64::NEG_INFINITY
                }
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Factor::Pieces(p) => p.is_zero(),
            Factor::Numeric(n) => !(n.support.1 > n.support.0),
        }
    }

    /// The same function as a numeric evaluator.
    pub fn to_numeric(&self) -> NumericFactor {
        match self {
            Factor::Numeric(n) => n.clone(),
            Factor::Pieces(p) => {
                let pieces = p.pieces.clone();
                let lo = pieces.first().map_or(0.0, |x| x.lo);
                let hi = pieces.last().map_or(0.0, |x| x.hi);
                let mut breaks = Vec::new();
                for x in &pieces {
                    breaks.push(x.lo);
                    breaks.push(x.hi);
                    if let Some(l) = x.log {
                        breaks.push(l.anchor);
                    }
                }
                let zero_exponent = pieces.first().filter(|x| x.lo == 0.0).map(|x| x.e);
                let inf_exponent = pieces.last().filter(|x| x.hi == f64::INFINITY).map(|x| x.e);
                let inner = PiecewisePowerFactor { pieces };
                NumericFactor {
                    ln_eval: Arc::new(move |x| inner.ln_eval(x)),
                    breaks,
                    support: (lo, hi),
                    zero_exponent,
                    inf_exponent,
                }
            }
        }
    }

    fn scale_arg(&self, s: f64) -> Factor {
        match self {
            Factor::Pieces(p) => Factor::Pieces(PiecewisePowerFactor {
                pieces: p
                    .pieces
                    .iter()
                    .map(|x| Piece {
                        lo: x.lo * s,
                        hi: x.hi * s,
                        c: x.c * powf(s, -x.e),
                        e: x.e,
                        log: x.log.map(|l| LogTerm { k: l.k, anchor: l.anchor * s }),
                    })
                    .collect(),
            }),
            Factor::Numeric(n) => {
                let inner = n.ln_eval.clone();
                Factor::Numeric(NumericFactor {
                    ln_eval: Arc::new(move |x| inner(x / s)),
                    breaks: n.breaks.iter().map(|b| b * s).collect(),
                    support: (n.support.0 * s, n.support.1 * s),
                    zero_exponent: n.zero_exponent,
                    inf_exponent: n.inf_exponent,
                })
            }
        }
    }

    fn scaled(&self, c: f64) -> Factor {
        match self {
            Factor::Pieces(p) => Factor::Pieces(PiecewisePowerFactor {
                pieces: p.pieces.iter().map(|x| Piece { c: x.c * c, ..*x }).collect(),
            }),
            Factor::Numeric(n) => {
                let inner = n.ln_eval.clone();
                let lc = ln(c);
                Factor::Numeric(NumericFactor { ln_eval: Arc::new(move |x| inner(x) + lc), ..n.clone() })
            }
        }
    }

    fn truncate(&self, n: f64) -> Factor {
        let (lo, hi) = (1.0 / n, n);
        let ln_n = ln(n);
        match self {
            Factor::Pieces(p) => {
                let mut out = Vec::new();
                for x in &p.pieces {
                    let (l, h) = (x.lo.max(lo), x.hi.min(hi));
                    if l >= h {
                        continue;
                    }
                    for (a, b) in sublevel_ranges(x, l, h, ln_n) {
                        out.push(Piece { lo: a, hi: b, ..*x });
                    }
                }
                Factor::Pieces(PiecewisePowerFactor { pieces: out })
            }
            Factor::Numeric(f) => {
                let inner = f.ln_eval.clone();
                let (l, h) = (f.support.0.max(lo), f.support.1.min(hi));
                let mut breaks = f.breaks.clone();
                breaks.push(lo);
                breaks.push(hi);
                Factor::Numeric(NumericFactor {
                    ln_eval: Arc::new(move |x| {
                        let v = inner(x);
                        if v <= ln_n {
                            v
                        } else {
                            f64::NEG_INFINITY
                        }
                    }),
                    breaks,
                    support: if l < h { (l, h) } else { (0.0, 0.0) },
                    zero_exponent: None,
                    inf_exponent: None,
                })
            }
        }
    }
}

/// Sub-ranges of `(l, h]` where the piece is at most `e^{ln_n}`.
fn sublevel_ranges(x: &Piece, l: f64, h: f64, ln_n: f64) -> Vec<(f64, f64)> {
    let has_log = x.log.map_or(false, |t| t.k != 0.0);
    if !has_log {
        let lc = ln(x.c);
        if x.e == 0.0 {
            return if lc <= ln_n { alloc::vec![(l, h)] } else { Vec::new() };
        }
        let cross = exp((ln_n - lc) / x.e);
        let (a, b) = if x.e > 0.0 { (l, h.min(cross)) } else { (l.max(cross), h) };
        return if a < b { alloc::vec![(a, b)] } else { Vec::new() };
    }
    // sample on a log grid and bisect the sign changes of g - ln n
    let g = |t: f64| x.ln_value(t) - ln_n;
    let m = 400;
    let (la, lb) = (ln(l), ln(h));
    let pts: Vec<f64> = (0..=m).map(|i| exp(la + (lb - la) * i as f64 / m as f64)).collect();
    let mut out = Vec::new();
    let mut start: Option<f64> = if g(l * (1.0 + 1e-15)) <= 0.0 { Some(l) } else { None };
    for w in pts.windows(2) {
        let (ga, gb) = (g(w[0]), g(w[1]));
        if (ga <= 0.0) != (gb <= 0.0) {
            let (mut a, mut b) = (w[0], w[1]);
            for _ in 0..200 {
                let mid = 0.5 * (a + b);
                if (g(mid) <= 0.0) == (ga <= 0.0) {
                    a = mid;
                } else {
                    b = mid;
                }
            }
            let r = 0.5 * (a + b);
            match start.take() {
                Some(s) => out.push((s, r)),
                None => start = Some(r),
            }
        }
    }
    if let Some(s) = start {
        out.push((s, h));
    }
    out.retain(|r| r.1 > r.0);
    out
}

/// A function `f(x) = ∏_r f_r(|x_r|)` on a weighted product domain.
#[derive(Debug, Clone)]
pub struct ProductFunction {
    factors: Vec<Factor>,
    domain: WeightedDomain,
}

impl ProductFunction {
    pub fn new(factors: Vec<Factor>, domain: WeightedDomain) -> Result<Self> {
        if factors.len() != domain.num_blocks() {
            return Err(Error::LengthMismatch { expected: domain.num_blocks(), found: factors.len() });
        }
        Ok(ProductFunction { factors, domain })
    }

    /// A one-block function on `R₊` with Lebesgue measure.
    pub fn on_line(factor: impl Into<Factor>) -> Self {
        ProductFunction { factors: alloc::vec![factor.into()], domain: WeightedDomain::line() }
    }

    pub fn zero(domain: WeightedDomain) -> Self {
        let factors = (0..domain.num_blocks()).map(|_| Factor::Pieces(PiecewisePowerFactor::default())).collect();
        ProductFunction { factors, domain }
    }

    pub fn factors(&self) -> &[Factor] {
        &self.factors
    }

    pub fn domain(&self) -> &WeightedDomain {
        &self.domain
    }

    pub fn is_zero(&self) -> bool {
        self.factors.iter().any(|f| f.is_zero())
    }

    pub fn is_piecewise(&self) -> bool {
        self.factors.iter().all(|f| matches!(f, Factor::Pieces(_)))
    }

    /// `ln |f|` at a point given by its block radii.
    pub fn ln_eval(&self, radii: &[f64]) -> Result<f64> {
        if radii.len() != self.factors.len() {
            return Err(Error::LengthMismatch { expected: self.factors.len(), found: radii.len() });
        }
        Ok(self.factors.iter().zip(radii).map(|(f, &x)| f.ln_eval(x)).sum())
    }

    /// `c · f`; the norm only sees `|c|`.
    pub fn scaled(&self, c: f64) -> Self {
        if c == 0.0 {
            return Self::zero(self.domain.clone());
        }
        let mut factors = self.factors.clone();
        factors[0] = factors[0].scaled(c.abs());
        ProductFunction { factors, domain: self.domain.clone() }
    }

    /// Pointwise sum of two one-block functions. Pieces on a common grid with
    /// common exponents add coefficients; anything else becomes numeric.
    pub fn try_add(&self, other: &ProductFunction) -> Result<Self> {
        if self.factors.len() != 1 || !self.domain.same_as(&other.domain) {
            return Err(Error::Structure("sums are only formed for one-block functions on the same domain".into()));
        }
        let (f, g) = (&self.factors[0], &other.factors[0]);
        if let (Factor::Pieces(a), Factor::Pieces(b)) = (f, g) {
            if a.pieces.len() == b.pieces.len() && a.pieces.iter().zip(&b.pieces).all(|(x, y)| x.same_shape(y)) {
                let pieces = a.pieces.iter().zip(&b.pieces).map(|(x, y)| Piece { c: x.c + y.c, ..*x }).collect();
                return Ok(ProductFunction {
                    factors: alloc::vec![Factor::Pieces(PiecewisePowerFactor { pieces })],
                    domain: self.domain.clone(),
                });
            }
        }
        let (nf, ng) = (f.to_numeric(), g.to_numeric());
        let lo = nf.support.0.min(ng.support.0);
        let hi = nf.support.1.max(ng.support.1);
        let mut breaks = nf.breaks.clone();
        breaks.extend_from_slice(&ng.breaks);
        breaks.extend_from_slice(&[nf.support.0, nf.support.1, ng.support.0, ng.support.1]);
        let pick = |x: Option<f64>, y: Option<f64>, worst_min: bool| match (x, y) {
            (Some(u), Some(v)) => Some(if worst_min { u.min(v) } else { u.max(v) }),
            (u, None) => u,
            (None, v) => v,
        };
        let zero_exponent = pick(
            nf.zero_exponent.filter(|_| nf.support.0 == 0.0),
            ng.zero_exponent.filter(|_| ng.support.0 == 0.0),
            true,
        );
        let inf_exponent = pick(
            nf.inf_exponent.filter(|_| nf.support.1 == f64::INFINITY),
            ng.inf_exponent.filter(|_| ng.support.1 == f64::INFINITY),
            false,
        );
        let (ff, gg) = (f.clone(), g.clone());
        let sum = NumericFactor {
            ln_eval: Arc::new(move |x| ln_add_exp(ff.ln_eval(x), gg.ln_eval(x))),
            breaks,
            support: (lo, hi),
            zero_exponent,
            inf_exponent,
        };
        Ok(ProductFunction { factors: alloc::vec![Factor::Numeric(sum)], domain: self.domain.clone() })
    }
}

/// How [`lp_norm`] obtained its value.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Analytic,
    Quadrature,
}

/// A weighted `L_p` norm.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LpResult {
    /// `+inf` on divergence.
    pub value: f64,
    pub ln_value: f64,
    pub method: Method,
    /// Absolute error estimate; zero for analytic results.
    pub est_error: f64,
}

impl LpResult {
    pub fn is_infinite(&self) -> bool {
        self.ln_value == f64::INFINITY
    }
}

/// Which integration route [`lp_norm_with`] may take.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Path {
    /// Closed forms where available, quadrature otherwise.
    Auto,
    ForceQuadrature,
}

#[derive(Debug, Clone, Copy)]
pub struct LpOptions {
    pub tol: f64,
    pub path: Path,
    pub max_intervals: usize,
}

impl Default for LpOptions {
    fn default() -> Self {
        LpOptions { tol: 1e-11, path: Path::Auto, max_intervals: 10_000 }
    }
}

/// `(∏_r ∫ |f_r|^p dμ_r)^{1/p}` with the default options and tolerance `tol`.
pub fn lp_norm(f: &ProductFunction, p: f64, tol: f64) -> Result<LpResult> {
    lp_norm_with(f, p, LpOptions { tol, ..LpOptions::default() })
}

pub fn lp_norm_with(f: &ProductFunction, p: f64, opts: LpOptions) -> Result<LpResult> {
    if !(p >= 1.0 && p.is_finite()) {
        return Err(Error::Domain { value: p, lo: 1.0, hi: f64::INFINITY });
    }
    if f.is_zero() {
        return Ok(LpResult { value: 0.0, ln_value: f64::NEG_INFINITY, method: Method::Analytic, est_error: 0.0 });
    }
    let mut ln_total = 0.0;
    let mut rel = 0.0;
    let mut method = Method::Analytic;
    let mut infinite = false;
    for (factor, block) in f.factors.iter().zip(f.domain.blocks()) {
        let (ln_i, rel_i, m) = ln_factor_integral(factor, block, p, opts)?;
        if ln_i == f64::NEG_INFINITY {
            return Ok(LpResult { value: 0.0, ln_value: f64::NEG_INFINITY, method: m, est_error: 0.0 });
        }
        if ln_i == f64::INFINITY {
            infinite = true;
        }
        ln_total += ln_i;
        rel += rel_i;
        if m == Method::Quadrature {
            method = Method::Quadrature;
        }
    }
    if infinite {
        return Ok(LpResult { value: f64::INFINITY, ln_value: f64::INFINITY, method, est_error: 0.0 });
    }
    let ln_value = ln_total / p;
    let value = exp(ln_value);
    Ok(LpResult { value, ln_value, method, est_error: value * rel / p })
}

/// `ln ∫ |f_r|^p dμ_r` with its relative error.
fn ln_factor_integral(factor: &Factor, block: &BlockSpec, p: f64, opts: LpOptions) -> Result<(f64, f64, Method)> {
    // |f|_p needs only p times the relative accuracy of the integral
    let quad = QuadOptions { rel_tol: (opts.tol * p).min(1e-3), max_intervals: opts.max_intervals };
    let density = block.power_density();
    match factor {
        Factor::Pieces(pp) => {
            let mut ln_sum = f64::NEG_INFINITY;
            let mut terms: Vec<(f64, f64)> = Vec::with_capacity(pp.pieces.len());
            let mut method = Method::Analytic;
            for piece in &pp.pieces {
                let closed = match (opts.path, density) {
                    (Path::Auto, Some((ln_cw, gamma))) => {
                        let q = piece.e * p + gamma;
                        let (k, anchor) = piece.log.map_or((0.0, 1.0), |l| (l.k * p, l.anchor));
                        ln_log_power_integral(piece.lo, piece.hi, q, k, anchor).map(|v| {
                            if v.is_infinite() {
                                v
                            } else {
                                p * ln(piece.c) + ln_cw + v
                            }
                        })
                    }
                    _ => None,
                };
                let (v, r) = match closed {
                    Some(v) => (v, 0.0),
                    None => {
                        method = Method::Quadrature;
                        let res = integrate_ln(|x| p * piece.ln_value(x) + block.ln_density(x), piece.lo, piece.hi, quad)?;
                        (res.ln_value, res.rel_error)
                    }
                };
                if v == f64::INFINITY {
                    return Ok((f64::INFINITY, 0.0, method));
                }
                ln_sum = ln_add_exp(ln_sum, v);
                terms.push((v, r));
            }
            let rel = terms.iter().map(|&(v, r)| exp(v - ln_sum) * r).sum();
            Ok((ln_sum, rel, method))
        }
        Factor::Numeric(nf) => {
            let (lo, hi) = nf.support;
            if !(hi > lo) {
                return Ok((f64::NEG_INFINITY, 0.0, Method::Quadrature));
            }
            let gamma = density.map_or(block.theta + block.dim as f64 - 1.0, |d| d.1);
            if lo == 0.0 {
                if let Some(e) = nf.zero_exponent {
                    if e * p + gamma <= -1.0 {
                        return Ok((f64::INFINITY, 0.0, Method::Quadrature));
                    }
                }
            }
            if hi == f64::INFINITY {
                if let Some(e) = nf.inf_exponent {
                    if e * p + gamma >= -1.0 {
                        return Ok((f64::INFINITY, 0.0, Method::Quadrature));
                    }
                }
            }
            let mut ln_sum = f64::NEG_INFINITY;
            let mut terms = Vec::new();
            for (a, b) in nf.cells() {
                let ev = &nf.ln_eval;
                let res = integrate_ln(|x| p * ev(x) + block.ln_density(x), a, b, quad)?;
                if res.ln_value == f64::INFINITY {
                    return Ok((f64::INFINITY, 0.0, Method::Quadrature));
                }
                ln_sum = ln_add_exp(ln_sum, res.ln_value);
                terms.push((res.ln_value, res.rel_error));
            }
            let rel = terms.iter().map(|&(v, r)| if v == f64::NEG_INFINITY { 0.0 } else { exp(v - ln_sum) * r }).sum();
            Ok((ln_sum, rel, Method::Quadrature))
        }
    }
}

/// `f · I(box (1/n, n)) · I(|f_r| <= n)`, applied factor by factor.
pub fn truncate(f: &ProductFunction, n: f64) -> ProductFunction {
    ProductFunction {
        factors: f.factors.iter().map(|x| x.truncate(n)).collect(),
        domain: f.domain.clone(),
    }
}

/// `x ↦ f(x/s)` blockwise.
pub fn scale_arg(f: &ProductFunction, s: &[f64]) -> Result<ProductFunction> {
    if s.len() != f.factors.len() {
        return Err(Error::LengthMismatch { expected: f.factors.len(), found: s.len() });
    }
    for &v in s {
        if !(v > 0.0 && v.is_finite()) {
            return Err(Error::NonPositive { what: "dilation factor", value: v });
        }
    }
    Ok(ProductFunction {
        factors: f.factors.iter().zip(s).map(|(x, &si)| if si == 1.0 { x.clone() } else { x.scale_arg(si) }).collect(),
        domain: f.domain.clone(),
    })
}

/// Radius `x` with `μ_r(B(0, x) ∩ R₊^d) = m` for one block.
pub fn radius_of_measure(block: &BlockSpec, m: f64) -> Result<f64> {
    if !(m > 0.0 && m.is_finite()) {
        return Err(Error::NonPositive { what: "measure", value: m });
    }
    if let Some((ln_cw, gamma)) = block.power_density() {
        // m = C x^{γ+1} / (γ+1)
        let r = gamma + 1.0;
        return Ok(exp((ln(m) + ln(r) - ln_cw) / r));
    }
    if let WeightProfile::Custom { .. } = block.profile {
        let ln_m = ln(m);
        let mass = |x: f64| -> Result<f64> {
            Ok(integrate_ln(|t| block.ln_density(t), 0.0, x, QuadOptions { rel_tol: 1e-13, max_intervals: 10_000 })?.ln_value)
        };
        let (mut lo, mut hi) = (-1.0f64, 1.0f64);
        while mass(exp(lo))? > ln_m {
            lo *= 2.0;
            if lo < -700.0 {
                return Err(Error::InvalidInput("weight mass does not vanish at 0".into()));
            }
        }
        while mass(exp(hi))? < ln_m {
            hi *= 2.0;
            if hi > 700.0 {
                return Err(Error::InvalidInput("weight mass is bounded".into()));
            }
        }
        for _ in 0..100 {
            let mid = 0.5 * (lo + hi);
            if mass(exp(mid))? < ln_m {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        return Ok(exp(0.5 * (lo + hi)));
    }
    unreachable!()
}

/// The indicator of a product set of measure `delta`: each block carries a
/// ball of measure `delta^{1/k}`.
pub fn indicator_of_measure(domain: &WeightedDomain, delta: f64) -> Result<ProductFunction> {
    if !(delta > 0.0 && delta.is_finite()) {
        return Err(Error::NonPositive { what: "measure", value: delta });
    }
    let k = domain.num_blocks() as f64;
    let m = exp(ln(delta) / k);
    let mut factors = Vec::new();
    for b in domain.blocks() {
        let x = radius_of_measure(b, m)?;
        factors.push(Factor::Pieces(PiecewisePowerFactor::indicator(0.0, x)?));
    }
    ProductFunction::new(factors, domain.clone())
}

/// Factor with `|f|_p^p = ω C [b/(D(b-p)) + a/(D(p-a))]` on a block with
/// `D = d + θ`: `ρ^{-D/b}` on `(0,1]`, `ρ^{-D/a}` on `(1,∞)`. For `b = ∞`
/// the inner piece is `|ln ρ|^3`.
pub fn canonical_factor(block: &BlockSpec, a: f64, b: f64) -> Result<Factor> {
    let dd = block.scaling_exponent();
    let inner = if b == f64::INFINITY {
        Piece::log_power(0.0, 1.0, 1.0, 0.0, 3.0, 1.0)
    } else {
        Piece::power(0.0, 1.0, 1.0, -dd / b)
    };
    let outer = Piece::power(1.0, f64::INFINITY, 1.0, -dd / a);
    Ok(Factor::Pieces(PiecewisePowerFactor::new(alloc::vec![inner, outer])?))
}

/// The product of [`canonical_factor`]s over every block.
pub fn canonical_function(domain: &WeightedDomain, a: f64, b: f64) -> Result<ProductFunction> {
    let factors = domain.blocks().iter().map(|bl| canonical_factor(bl, a, b)).collect::<Result<Vec<_>>>()?;
    ProductFunction::new(factors, domain.clone())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn canonical() -> ProductFunction {
        canonical_function(&WeightedDomain::line(), 2.0, 4.0).unwrap()
    }

    #[test]
    fn canonical_norm_at_three() {
        let r = lp_norm(&canonical(), 3.0, 1e-12).unwrap();
        assert_eq!(r.method, Method::Analytic);
        assert!((r.value - powf(6.0, 1.0 / 3.0)).abs() < 1e-14);
        assert_eq!(r.est_error, 0.0);
        let q = lp_norm_with(&canonical(), 3.0, LpOptions { path: Path::ForceQuadrature, ..Default::default() }).unwrap();
        assert_eq!(q.method, Method::Quadrature);
        assert!((q.value - r.value).abs() < 1e-9);
    }

    #[test]
    fn indicator_and_divergence() {
        let ind = ProductFunction::on_line(PiecewisePowerFactor::indicator(0.0, 1.0).unwrap());
        for p in [1.0, 2.5, 7.0] {
            assert!((lp_norm(&ind, p, 1e-12).unwrap().value - 1.0).abs() < 1e-15);
        }
        let f = ProductFunction::on_line(PiecewisePowerFactor::single(0.0, 1.0, 1.0, -0.5).unwrap());
        assert!(lp_norm(&f, 2.0, 1e-12).unwrap().is_infinite());
        assert!(lp_norm(&f, 1.999, 1e-12).unwrap().value.is_finite());
    }

    #[test]
    fn truncation_examples() {
        let t = truncate(&canonical(), 10.0);
        let exact = ((1.0 - powf(0.1, 0.25)) / 0.25 + (1.0 - powf(10.0, -0.5)) / 0.5f64).powf(1.0 / 3.0);
        let v = lp_norm(&t, 3.0, 1e-12).unwrap().value;
        assert!((v - exact).abs() < 1e-13, "{v} vs {exact}");
        assert!(v < powf(6.0, 1.0 / 3.0));
        assert!(truncate(&canonical(), 1.0).is_zero());
    }

    #[test]
    fn cap_splits_log_pieces() {
        let f = ProductFunction::on_line(PiecewisePowerFactor::new(alloc::vec![Piece::log_power(0.0, 1.0, 1.0, 0.0, 3.0, 1.0)]).unwrap());
        let t = truncate(&f, 8.0);
        match &t.factors()[0] {
            Factor::Pieces(p) => {
                // |ln x|^3 <= 8 iff x >= e^{-2}
                assert_eq!(p.pieces().len(), 1);
                assert!((p.pieces()[0].lo - exp(-2.0)).abs() < 1e-12);
            }
            _ => panic!(),
        }
    }

    #[test]
    fn scaling_identity() {
        let f = canonical();
        for s in [0.25, 0.5, 2.0, 4.0] {
            let g = scale_arg(&f, &[s]).unwrap();
            for p in [2.2, 3.0, 3.7] {
                let r = lp_norm(&g, p, 1e-12).unwrap().value / lp_norm(&f, p, 1e-12).unwrap().value;
                assert!((r - powf(s, 1.0 / p)).abs() < 1e-12);
            }
        }
        let w = WeightedDomain::single(1, 1.0).unwrap();
        let f = canonical_function(&w, 2.0, 4.0).unwrap();
        let g = scale_arg(&f, &[2.0]).unwrap();
        let r = lp_norm(&g, 3.0, 1e-12).unwrap().value / lp_norm(&f, 3.0, 1e-12).unwrap().value;
        assert!((r - powf(4.0, 1.0 / 3.0)).abs() < 1e-12);
    }

    #[test]
    fn indicator_measures() {
        for (dom, delta) in [
            (WeightedDomain::line(), 0.01),
            (WeightedDomain::single(1, 1.0).unwrap(), 3.0),
            (WeightedDomain::single(2, 0.0).unwrap(), 7.0),
        ] {
            let ind = indicator_of_measure(&dom, delta).unwrap();
            // |I_A|_1 = μ(A)
            assert!((lp_norm(&ind, 1.0, 1e-12).unwrap().value - delta).abs() < 1e-12 * delta);
        }
    }

    #[test]
    fn sums_on_common_grid_stay_closed_form() {
        let f = canonical();
        let g = f.scaled(2.0);
        let h = f.try_add(&g).unwrap();
        assert!(h.is_piecewise());
        let v = lp_norm(&h, 3.0, 1e-12).unwrap().value;
        assert!((v - 3.0 * powf(6.0, 1.0 / 3.0)).abs() < 1e-13);
        let k = ProductFunction::on_line(PiecewisePowerFactor::indicator(0.0, 2.0).unwrap());
        let m = f.try_add(&k).unwrap();
        assert!(!m.is_piecewise());
        assert!(lp_norm(&m, 3.0, 1e-10).unwrap().value > v / 3.0);
    }
}
