//! ψ-functions: positive continuous functions on an open exponent interval.

use alloc::boxed::Box;
use alloc::sync::Arc;
use alloc::vec::Vec;
use core::fmt;

use crate::error::{Error, Result};
use crate::function::{canonical_function, lp_norm_with, LpOptions, ProductFunction};
use crate::domain::WeightedDomain;
use crate::math::{cos, exp, ln, least_squares_line};

/// The exponent range `(a, b)`, `1 <= a < b <= ∞`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    a: f64,
    b: f64,
}

impl Interval {
    pub fn new(a: f64, b: f64) -> Result<Self> {
        if !(a >= 1.0 && a.is_finite()) {
            return Err(Error::ParameterOutOfRange { name: "a", value: a });
        }
        if !(b > a) {
            return Err(Error::ParameterOutOfRange { name: "b", value: b });
        }
        Ok(Interval { a, b })
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn is_bounded(&self) -> bool {
        self.b < f64::INFINITY
    }

    pub fn contains(&self, p: f64) -> bool {
        p.is_finite() && p > self.a && p < self.b
    }

    /// Unit parameter to exponent: `a + (b-a) u`, or `a + u/(1-u)` for `b = ∞`.
    pub fn p_of(&self, u: f64) -> f64 {
        if self.is_bounded() {
            self.a + (self.b - self.a) * u
        } else {
            self.a + u / (1.0 - u)
        }
    }

    pub fn u_of(&self, p: f64) -> f64 {
        if self.is_bounded() {
            (p - self.a) / (self.b - self.a)
        } else {
            let t = p - self.a;
            t / (1.0 + t)
        }
    }

    /// `1/b`, zero for `b = ∞`.
    pub fn inv_b(&self) -> f64 {
        if self.is_bounded() {
            1.0 / self.b
        } else {
            0.0
        }
    }

    fn check(&self, p: f64) -> Result<()> {
        if self.contains(p) {
            Ok(())
        } else {
            Err(Error::Domain { value: p, lo: self.a, hi: self.b })
        }
    }
}

/// `ln ψ(p)` of a user formula.
pub type LnPsi = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// A closed-form ψ.
#[derive(Clone)]
pub enum Formula {
    Constant(f64),
    /// `c (p-a)^{-γa} (b-p)^{-γb}`; for `b = ∞` the second factor is `p^{γb}`.
    Power { c: f64, gamma_a: f64, gamma_b: f64 },
    Ln(LnPsi),
}

impl fmt::Debug for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Formula::Constant(c) => write!(f, "Constant({c})"),
            Formula::Power { c, gamma_a, gamma_b } => write!(f, "Power({c}, {gamma_a}, {gamma_b})"),
            Formula::Ln(_) => f.write_str("Ln(..)"),
        }
    }
}

#[derive(Debug, Clone)]
pub enum PsiKind {
    Analytic(Formula),
    /// `ψ(p) = |f|_p` for the stored representation.
    Representation,
    Product(Box<PsiFunction>, Box<PsiFunction>),
}

/// A ψ-function with an optional representation `f`, `|f|_p = ψ(p)`.
#[derive(Debug, Clone)]
pub struct PsiFunction {
    interval: Interval,
    kind: PsiKind,
    representation: Option<ProductFunction>,
}

const REP_OPTIONS: LpOptions = LpOptions { tol: 1e-11, path: crate::function::Path::Auto, max_intervals: 10_000 };

impl PsiFunction {
    pub fn constant(interval: Interval, c: f64) -> Result<Self> {
        if !(c > 0.0 && c.is_finite()) {
            return Err(Error::NonPositive { what: "constant ψ", value: c });
        }
        Ok(PsiFunction { interval, kind: PsiKind::Analytic(Formula::Constant(c)), representation: None })
    }

    pub fn power(interval: Interval, c: f64, gamma_a: f64, gamma_b: f64) -> Result<Self> {
        if !(c > 0.0 && c.is_finite()) {
            return Err(Error::NonPositive { what: "ψ coefficient", value: c });
        }
        if !(gamma_a.is_finite() && gamma_b.is_finite()) {
            return Err(Error::InvalidInput("ψ exponents must be finite".into()));
        }
        Ok(PsiFunction { interval, kind: PsiKind::Analytic(Formula::Power { c, gamma_a, gamma_b }), representation: None })
    }

    /// ψ from `ln ψ`.
    pub fn from_ln_fn(interval: Interval, ln_psi: LnPsi) -> Self {
        PsiFunction { interval, kind: PsiKind::Analytic(Formula::Ln(ln_psi)), representation: None }
    }

    /// Attach a representation to a closed-form ψ. Consistency is checked by
    /// [`classify`], not here.
    pub fn with_representation(mut self, f: ProductFunction) -> Self {
        self.representation = Some(f);
        self
    }

    /// The ψ generated by the canonical representation on `domain`.
    pub fn canonical(domain: &WeightedDomain, interval: Interval) -> Result<Self> {
        let f = canonical_function(domain, interval.a, interval.b)?;
        Ok(PsiFunction { interval, kind: PsiKind::Representation, representation: Some(f) })
    }

    pub fn interval(&self) -> Interval {
        self.interval
    }

    pub fn kind(&self) -> &PsiKind {
        &self.kind
    }

    pub fn representation(&self) -> Option<&ProductFunction> {
        self.representation.as_ref()
    }

    /// `ln ψ(p)`.
    pub fn ln_eval(&self, p: f64) -> Result<f64> {
        self.interval.check(p)?;
        self.ln_eval_unchecked(p)
    }

    fn ln_eval_unchecked(&self, p: f64) -> Result<f64> {
        let Interval { a, b } = self.interval;
        match &self.kind {
            PsiKind::Analytic(Formula::Constant(c)) => Ok(ln(*c)),
            PsiKind::Analytic(Formula::Power { c, gamma_a, gamma_b }) => {
                let tail = if b == f64::INFINITY { gamma_b * ln(p) } else { -gamma_b * ln(b - p) };
                Ok(ln(*c) - gamma_a * ln(p - a) + tail)
            }
            PsiKind::Analytic(Formula::Ln(g)) => {
                let v = g(p);
                if v.is_nan() {
                    Err(Error::InvalidInput("ψ formula evaluated to NaN".into()))
                } else {
                    Ok(v)
                }
            }
            PsiKind::Representation => {
                let f = self.representation.as_ref().ok_or(Error::MissingRepresentation)?;
                let r = lp_norm_with(f, p, REP_OPTIONS)?;
                if r.is_infinite() {
                    return Err(Error::Divergence { p });
                }
                Ok(r.ln_value)
            }
            PsiKind::Product(x, y) => Ok(x.ln_eval_unchecked(p)? + y.ln_eval_unchecked(p)?),
        }
    }
}

/// `ψ(p)`.
pub fn eval_psi(psi: &PsiFunction, p: f64) -> Result<f64> {
    Ok(exp(psi.ln_eval(p)?))
}

/// `ζ = ψ · ν`.
pub fn multiply_psi(psi: &PsiFunction, nu: &PsiFunction) -> Result<PsiFunction> {
    if psi.interval != nu.interval {
        return Err(Error::IntervalMismatch {
            left: (psi.interval.a, psi.interval.b),
            right: (nu.interval.a, nu.interval.b),
        });
    }
    Ok(PsiFunction {
        interval: psi.interval,
        kind: PsiKind::Product(Box::new(psi.clone()), Box::new(nu.clone())),
        representation: None,
    })
}

/// `ν = ζ / ψ`.
pub fn divide_psi(zeta: &PsiFunction, psi: &PsiFunction) -> Result<PsiFunction> {
    if psi.interval != zeta.interval {
        return Err(Error::IntervalMismatch {
            left: (zeta.interval.a, zeta.interval.b),
            right: (psi.interval.a, psi.interval.b),
        });
    }
    let (z, s) = (zeta.clone(), psi.clone());
    Ok(PsiFunction::from_ln_fn(
        psi.interval,
        Arc::new(move |p| match (z.ln_eval_unchecked(p), s.ln_eval_unchecked(p)) {
            (Ok(x), Ok(y)) => x - y,
            _ => f64::NAN,
        }),
    ))
}

/// `c · ψ`; a representation is scaled along.
pub fn scale_psi(psi: &PsiFunction, c: f64) -> Result<PsiFunction> {
    let mut out = multiply_psi(psi, &PsiFunction::constant(psi.interval, c)?)?;
    out.representation = psi.representation.as_ref().map(|f| f.scaled(c));
    Ok(out)
}

/// Verification grid for representations: 16 interior Chebyshev points.
fn verification_grid(interval: &Interval, n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| {
            let c = cos(core::f64::consts::PI * (i as f64 + 0.5) / n as f64);
            interval.p_of(0.5 - 0.49 * c)
        })
        .collect()
}

/// The ψ generated by `f`: `ψ(p) = |f|_p`. Fails if a grid norm diverges.
pub fn from_representation(f: ProductFunction, interval: Interval, tol: f64) -> Result<PsiFunction> {
    let opts = LpOptions { tol, ..LpOptions::default() };
    for p in verification_grid(&interval, 16) {
        let r = lp_norm_with(&f, p, opts)?;
        if r.is_infinite() {
            return Err(Error::Divergence { p });
        }
        if r.value == 0.0 {
            return Err(Error::NonPositive { what: "representation norm", value: 0.0 });
        }
    }
    Ok(PsiFunction { interval, kind: PsiKind::Representation, representation: Some(f) })
}

/// Class membership report of [`classify`].
#[derive(Debug, Clone, PartialEq)]
pub struct PsiClassReport {
    pub in_e_psi: bool,
    pub in_psi: bool,
    /// Estimate of `ψ(a+0)`; `+inf` when judged divergent.
    pub psi_at_a_plus: f64,
    pub psi_at_b_minus: f64,
    pub log_convex: bool,
    /// `ψ >= 1` on the grid.
    pub at_least_one: bool,
    pub diverges_at_a: bool,
    pub diverges_at_b: bool,
}

/// Endpoint probes use `u = 10^-k`, `k = 2..=8`.
const PROBE_LEVELS: core::ops::RangeInclusive<i32> = 2..=8;
/// A growing endpoint sequence whose power-law extrapolation to `ε = 1e-100`
/// exceeds this is taken as `ψ → ∞`.
pub const DIVERGENCE_THRESHOLD: f64 = 1e6;

/// Estimate of an endpoint limit and whether it is judged infinite.
fn endpoint_limit(psi: &PsiFunction, upper: bool) -> Result<(f64, bool)> {
    let mut ln_eps = Vec::new();
    let mut vals = Vec::new();
    for k in PROBE_LEVELS {
        let e = exp(-(k as f64) * core::f64::consts::LN_10);
        let u = if upper { 1.0 - e } else { e };
        ln_eps.push(ln(e));
        vals.push(psi.ln_eval(psi.interval.p_of(u))?);
    }
    let m = vals.len();
    let increasing = (m - 4..m - 1).all(|i| vals[i + 1] > vals[i]);
    let (slope, _, _) = least_squares_line(&ln_eps[m - 3..], &vals[m - 3..]);
    let projected = vals[m - 1] + slope * (ln(1e-100) - ln_eps[m - 1]);
    if increasing && projected > ln(DIVERGENCE_THRESHOLD) {
        return Ok((f64::INFINITY, true));
    }
    Ok((exp(vals[m - 1]), false))
}

/// Advisory class report for ψ on a grid of `grid_size` points.
pub fn classify(psi: &PsiFunction, grid_size: usize) -> Result<PsiClassReport> {
    if grid_size < 16 {
        return Err(Error::ParameterOutOfRange { name: "grid_size", value: grid_size as f64 });
    }
    let iv = psi.interval;
    let ps: Vec<f64> = (0..grid_size).map(|i| iv.p_of(0.01 + 0.98 * i as f64 / (grid_size - 1) as f64)).collect();
    let mut lv = Vec::with_capacity(ps.len());
    for &p in &ps {
        lv.push(psi.ln_eval(p)?);
    }
    let at_least_one = lv.iter().all(|&v| v >= -1e-12);
    // divided second differences of p ln ψ(p)
    let h: Vec<f64> = ps.iter().zip(&lv).map(|(p, v)| p * v).collect();
    let scale = h.iter().fold(1.0f64, |m, v| m.max(v.abs()));
    let mut log_convex = true;
    for i in 1..ps.len() - 1 {
        let d1 = (h[i] - h[i - 1]) / (ps[i] - ps[i - 1]);
        let d2 = (h[i + 1] - h[i]) / (ps[i + 1] - ps[i]);
        let span = ps[i + 1] - ps[i - 1];
        let hmin = (ps[i] - ps[i - 1]).min(ps[i + 1] - ps[i]);
        if 2.0 * (d2 - d1) / span < -1e-10 * scale / (hmin * hmin) {
            log_convex = false;
        }
    }
    let (psi_a, div_a) = endpoint_limit(psi, false)?;
    let (psi_b, div_b) = endpoint_limit(psi, true)?;
    let in_psi = match &psi.representation {
        None => false,
        Some(f) => {
            let mut ok = true;
            for p in verification_grid(&iv, 16) {
                let r = lp_norm_with(f, p, REP_OPTIONS)?;
                let v = psi.ln_eval(p)?;
                if r.is_infinite() || (r.ln_value - v).abs() > 1e-6 {
                    ok = false;
                }
            }
            ok
        }
    };
    Ok(PsiClassReport {
        in_e_psi: at_least_one && div_b,
        in_psi,
        psi_at_a_plus: psi_a,
        psi_at_b_minus: psi_b,
        log_convex,
        at_least_one,
        diverges_at_a: div_a,
        diverges_at_b: div_b,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::function::PiecewisePowerFactor;
    use crate::math::powf;

    fn iv(a: f64, b: f64) -> Interval {
        Interval::new(a, b).unwrap()
    }

    #[test]
    fn canonical_values() {
        let psi = PsiFunction::canonical(&WeightedDomain::line(), iv(2.0, 4.0)).unwrap();
        assert!((eval_psi(&psi, 3.0).unwrap() - powf(6.0, 1.0 / 3.0)).abs() < 1e-14);
        let nu = PsiFunction::constant(iv(2.0, 4.0), 2.0).unwrap();
        let z = multiply_psi(&psi, &nu).unwrap();
        assert!((eval_psi(&z, 3.0).unwrap() - 2.0 * powf(6.0, 1.0 / 3.0)).abs() < 1e-13);
        let sq = multiply_psi(&psi, &psi).unwrap();
        assert!((eval_psi(&sq, 3.0).unwrap() - powf(6.0, 2.0 / 3.0)).abs() < 1e-13);
    }

    #[test]
    fn domain_errors() {
        let psi = PsiFunction::constant(iv(2.0, 4.0), 1.0).unwrap();
        for p in [2.0, 4.0, 1.0, f64::NAN, f64::INFINITY] {
            assert!(matches!(eval_psi(&psi, p), Err(Error::Domain { .. })));
        }
        let other = PsiFunction::constant(iv(2.0, 5.0), 1.0).unwrap();
        assert!(matches!(multiply_psi(&psi, &other), Err(Error::IntervalMismatch { .. })));
        assert!(Interval::new(0.5, 2.0).is_err());
        assert!(Interval::new(2.0, 2.0).is_err());
    }

    #[test]
    fn representation_examples() {
        let ind = ProductFunction::on_line(PiecewisePowerFactor::indicator(0.0, 1.0).unwrap());
        let psi = from_representation(ind, iv(2.0, 4.0), 1e-10).unwrap();
        assert!((eval_psi(&psi, 3.3).unwrap() - 1.0).abs() < 1e-15);
        let rep = classify(&psi, 32).unwrap();
        assert!(!rep.in_e_psi);
        assert!(rep.in_psi);
        let bad = ProductFunction::on_line(PiecewisePowerFactor::single(0.0, 1.0, 1.0, -0.5).unwrap());
        assert!(matches!(from_representation(bad, iv(2.0, 4.0), 1e-10), Err(Error::Divergence { .. })));
    }

    #[test]
    fn classify_examples() {
        let psi = PsiFunction::canonical(&WeightedDomain::line(), iv(2.0, 4.0)).unwrap();
        let r = classify(&psi, 32).unwrap();
        assert!(r.in_e_psi && r.in_psi && r.log_convex);
        assert!(r.diverges_at_a && r.diverges_at_b);

        let one = PsiFunction::constant(iv(2.0, 4.0), 1.0).unwrap();
        let r = classify(&one, 32).unwrap();
        assert!(!r.in_e_psi && !r.in_psi);
        assert_eq!(r.psi_at_b_minus, 1.0);

        // 1/(4-p) blows up at b but dips below 1 on (2,3)
        let pole = PsiFunction::power(iv(2.0, 4.0), 1.0, 0.0, 1.0).unwrap();
        let r = classify(&pole, 32).unwrap();
        assert!(r.diverges_at_b);
        assert_eq!(r.psi_at_b_minus, f64::INFINITY);
        assert!(!r.at_least_one);
        assert!(!r.in_psi);
    }

    #[test]
    fn unbounded_interval_canonical() {
        let psi = PsiFunction::canonical(&WeightedDomain::line(), iv(2.0, f64::INFINITY)).unwrap();
        let r = classify(&psi, 32).unwrap();
        assert!(r.in_e_psi && r.in_psi && r.log_convex);
        // ψ(p)^p = Γ(3p+1) + 2/(p-2)
        let p = 3.0;
        let exact = powf(362_880.0 + 2.0, 1.0 / p);
        assert!((eval_psi(&psi, p).unwrap() - exact).abs() < 1e-12 * exact);
    }
}
