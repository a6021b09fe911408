//! Maximisation over an open exponent interval.
//!
//! A supremum over `p ∈ (a,b)` may only be reached in the limit `p → a+` or
//! `p → b-`. The search samples a Chebyshev grid in the unit parameter `u`,
//! adds endpoint probes at `u = 10^-k` and `1 - 10^-k`, and refines an
//! interior maximiser by golden section.

use alloc::vec::Vec;
use core::cell::RefCell;

use crate::error::{Error, Result};
use crate::math::{cos, exp, ln};
use crate::psi::Interval;

const INV_PHI: f64 = 0.618_033_988_749_894_8;

/// Golden-section maximisation of `f` on `[lo, hi]`. Returns the best point
/// seen and its value.
pub fn golden_max<F: Fn(f64) -> f64>(f: &F, lo: f64, hi: f64, tol: f64, max_iter: usize) -> (f64, f64) {
    let (mut a, mut b) = (lo, hi);
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    for _ in 0..max_iter {
        if (b - a).abs() <= tol * (1.0 + c.abs()) {
            break;
        }
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d);
        }
    }
    if fc >= fd {
        (c, fc)
    } else {
        (d, fd)
    }
}

/// Where a supremum over `(a,b)` is attained.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ArgMax {
    Interior(f64),
    /// Approached as `p → a+`.
    LowerEnd,
    /// Approached as `p → b-`.
    UpperEnd,
}

/// A supremum over the exponent interval together with the sampled profile.
#[derive(Debug, Clone, PartialEq)]
pub struct SupOverP {
    /// `+inf` when the supremum is judged unbounded.
    pub value: f64,
    pub ln_value: f64,
    pub argmax: ArgMax,
    /// Sampled `(p, ratio)` pairs sorted by `p`.
    pub profile: Vec<(f64, f64)>,
}

impl SupOverP {
    pub fn is_infinite(&self) -> bool {
        self.value == f64::INFINITY
    }
}

/// Grid and refinement settings for [`sup_over_p`].
#[derive(Debug, Clone, Copy)]
pub struct SupOptions {
    pub grid: usize,
    /// Deepest endpoint probe: `u = 10^-depth`.
    pub depth: u32,
    pub golden_tol: f64,
    /// Keep the sampled profile in the result.
    pub keep_profile: bool,
}

impl Default for SupOptions {
    fn default() -> Self {
        SupOptions { grid: 64, depth: 8, golden_tol: 1e-11, keep_profile: true }
    }
}

/// Values above `1e12` that keep growing towards an endpoint, with
/// increments that do not contract, count as infinite.
pub const INFINITE_THRESHOLD: f64 = 1e12;

struct Sample {
    u: f64,
    ln_r: f64,
    /// `Some((side, k))` for an endpoint probe at `10^-k`; side 0 is `a+`.
    probe: Option<(usize, u32)>,
}

/// Supremum over `p ∈ (a,b)` of `exp(ln_ratio(p))`.
pub fn sup_over_p<F>(interval: &Interval, mut ln_ratio: F, opts: SupOptions) -> Result<SupOverP>
where
    F: FnMut(f64) -> Result<f64>,
{
    let eps0 = 1e-2;
    let n = opts.grid.max(4);
    let mut samples: Vec<Sample> = Vec::with_capacity(n + 2 * opts.depth as usize);
    for i in 0..n {
        let c = cos(core::f64::consts::PI * (i as f64 + 0.5) / n as f64);
        let u = 0.5 - 0.5 * (1.0 - 2.0 * eps0) * c;
        samples.push(Sample { u, ln_r: 0.0, probe: None });
    }
    for k in 2..=opts.depth.max(2) {
        let e = exp(-(k as f64) * core::f64::consts::LN_10);
        samples.push(Sample { u: e, ln_r: 0.0, probe: Some((0, k)) });
        samples.push(Sample { u: 1.0 - e, ln_r: 0.0, probe: Some((1, k)) });
    }
    for s in samples.iter_mut() {
        let v = ln_ratio(interval.p_of(s.u))?;
        if v.is_nan() {
            return Err(Error::InvalidInput("ratio evaluated to NaN".into()));
        }
        s.ln_r = v;
    }
    samples.sort_by(|x, y| x.u.total_cmp(&y.u));

    let profile = |samples: &[Sample]| -> Vec<(f64, f64)> {
        if opts.keep_profile {
            samples.iter().map(|s| (interval.p_of(s.u), exp(s.ln_r))).collect()
        } else {
            Vec::new()
        }
    };

    let depth = opts.depth.max(2);
    // per-side probe sequences ordered by depth
    let side_seq = |side: usize| -> Vec<f64> {
        let mut v: Vec<(u32, f64)> = samples
            .iter()
            .filter_map(|s| match s.probe {
                Some((sd, k)) if sd == side => Some((k, s.ln_r)),
                _ => None,
            })
            .collect();
        v.sort_by_key(|x| x.0);
        v.into_iter().map(|x| x.1).collect()
    };
    let seqs = [side_seq(0), side_seq(1)];

    if let Some(pos) = samples.iter().position(|s| s.ln_r == f64::INFINITY) {
        let argmax = match samples[pos].probe {
            Some((0, _)) => ArgMax::LowerEnd,
            Some((_, _)) => ArgMax::UpperEnd,
            None => ArgMax::Interior(interval.p_of(samples[pos].u)),
        };
        return Ok(SupOverP { value: f64::INFINITY, ln_value: f64::INFINITY, argmax, profile: profile(&samples) });
    }
    let ln_thr = ln(INFINITE_THRESHOLD);
    for (side, seq) in seqs.iter().enumerate() {
        let m = seq.len();
        // a finite limit shows increments shrinking about tenfold per probe
        let contracting = m >= 3 && (seq[m - 1] - seq[m - 2]) < 0.5 * (seq[m - 2] - seq[m - 3]);
        if m >= 3 && seq[m - 1] > ln_thr && seq[m - 1] > seq[m - 2] && seq[m - 2] > seq[m - 3] && !contracting {
            let argmax = if side == 0 { ArgMax::LowerEnd } else { ArgMax::UpperEnd };
            return Ok(SupOverP { value: f64::INFINITY, ln_value: f64::INFINITY, argmax, profile: profile(&samples) });
        }
    }

    let best = samples
        .iter()
        .enumerate()
        .max_by(|x, y| x.1.ln_r.total_cmp(&y.1.ln_r))
        .map(|(i, _)| i)
        .unwrap();
    if samples[best].ln_r == f64::NEG_INFINITY {
        return Ok(SupOverP {
            value: 0.0,
            ln_value: f64::NEG_INFINITY,
            argmax: ArgMax::Interior(interval.p_of(0.5)),
            profile: profile(&samples),
        });
    }

    // endpoint limit: the newest probe on one side has been the maximiser
    // for the last three refinement levels
    let level_argmax = |level: u32| -> Option<(usize, u32)> {
        samples
            .iter()
            .filter(|s| match s.probe {
                Some((_, k)) => k <= level,
                None => true,
            })
            .max_by(|x, y| x.ln_r.total_cmp(&y.ln_r))
            .and_then(|s| s.probe)
    };
    for side in 0..2 {
        let at_end = depth >= 4
            && (depth - 2..=depth).all(|lvl| matches!(level_argmax(lvl), Some((sd, k)) if sd == side && k == lvl));
        if at_end {
            let seq = &seqs[side];
            let m = seq.len();
            let (v1, v2, v3) = (seq[m - 3], seq[m - 2], seq[m - 1]);
            let mut ln_value = v3;
            // linear extrapolation in ε on a ratio-10 ladder
            if v3 > v2 && (v3 - v2) < 0.5 * (v2 - v1) {
                ln_value = v3 + (v3 - v2) / 9.0;
            }
            let argmax = if side == 0 { ArgMax::LowerEnd } else { ArgMax::UpperEnd };
            return Ok(SupOverP { value: exp(ln_value), ln_value, argmax, profile: profile(&samples) });
        }
    }

    let mut u_best = samples[best].u;
    let mut ln_best = samples[best].ln_r;
    if best > 0 && best + 1 < samples.len() {
        let (lo, hi) = (samples[best - 1].u, samples[best + 1].u);
        let err: RefCell<Option<Error>> = RefCell::new(None);
        let cell = RefCell::new(&mut ln_ratio);
        let g = |u: f64| -> f64 {
            match (cell.borrow_mut())(interval.p_of(u)) {
                Ok(v) if !v.is_nan() => v,
                Ok(_) => f64::NEG_INFINITY,
                Err(e) => {
                    *err.borrow_mut() = Some(e);
                    f64::NEG_INFINITY
                }
            }
        };
        let (u, v) = golden_max(&g, lo, hi, opts.golden_tol, 200);
        if v > ln_best {
            u_best = u;
            ln_best = v;
        }
        if let Some(e) = err.into_inner() {
            return Err(e);
        }
    }
    Ok(SupOverP {
        value: exp(ln_best),
        ln_value: ln_best,
        argmax: ArgMax::Interior(interval.p_of(u_best)),
        profile: profile(&samples),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn golden_finds_parabola_peak() {
        let (x, fx) = golden_max(&|x: f64| -(x - 0.3) * (x - 0.3), 0.0, 1.0, 1e-12, 200);
        assert!((x - 0.3).abs() < 1e-6);
        assert!(fx.abs() < 1e-12);
    }

    #[test]
    fn interior_sup() {
        let iv = Interval::new(2.0, 4.0).unwrap();
        let s = sup_over_p(&iv, |p| Ok(-(p - 3.1) * (p - 3.1)), SupOptions::default()).unwrap();
        assert!((s.value - 1.0).abs() < 1e-12);
        match s.argmax {
            ArgMax::Interior(p) => assert!((p - 3.1).abs() < 1e-5),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn endpoint_sup_is_tagged() {
        let iv = Interval::new(2.0, 4.0).unwrap();
        let s = sup_over_p(&iv, |p| Ok(ln(16.0) / p), SupOptions::default()).unwrap();
        assert_eq!(s.argmax, ArgMax::LowerEnd);
        assert!((s.value - 4.0).abs() < 1e-12);
        let s = sup_over_p(&iv, |p| Ok(-ln(16.0) / p), SupOptions::default()).unwrap();
        assert_eq!(s.argmax, ArgMax::UpperEnd);
        assert!((s.value - 0.5).abs() < 1e-12);
    }

    #[test]
    fn growing_sup_is_infinite() {
        let iv = Interval::new(2.0, 4.0).unwrap();
        let s = sup_over_p(&iv, |p| Ok(-2.0 * ln(4.0 - p)), SupOptions::default()).unwrap();
        assert!(s.is_infinite());
        assert_eq!(s.argmax, ArgMax::UpperEnd);
    }

    #[test]
    fn unbounded_interval_limit() {
        let iv = Interval::new(1.0, f64::INFINITY).unwrap();
        // sup_p δ^{1/p} for δ < 1 is the limit 1 as p → ∞
        let s = sup_over_p(&iv, |p| Ok(ln(0.01) / p), SupOptions::default()).unwrap();
        assert_eq!(s.argmax, ArgMax::UpperEnd);
        assert!((s.value - 1.0).abs() < 1e-7);
    }

    #[test]
    fn large_finite_endpoint_limit() {
        // sup_p δ^{1/p} on (1,3) is δ itself, above the divergence threshold
        let iv = Interval::new(1.0, 3.0).unwrap();
        let s = sup_over_p(&iv, |p| Ok(ln(1e16) / p), SupOptions::default()).unwrap();
        assert_eq!(s.argmax, ArgMax::LowerEnd);
        assert!((s.ln_value - ln(1e16)).abs() < 1e-6 * ln(1e16));
    }
}
