//! Scalar helpers: `libm` wrappers, log-space arithmetic and incomplete gamma
//! integrals. Everything that can overflow for large exponents is carried as a
//! natural logarithm.

pub(crate) fn ln(x: f64) -> f64 {
    libm::log(x)
}

pub(crate) fn exp(x: f64) -> f64 {
    libm::exp(x)
}

pub(crate) fn powf(x: f64, y: f64) -> f64 {
    libm::pow(x, y)
}

pub(crate) fn sqrt(x: f64) -> f64 {
    libm::sqrt(x)
}

pub(crate) fn cos(x: f64) -> f64 {
    libm::cos(x)
}

pub(crate) fn expm1(x: f64) -> f64 {
    libm::expm1(x)
}

pub(crate) fn ln1p(x: f64) -> f64 {
    libm::log1p(x)
}

pub(crate) fn lgamma(x: f64) -> f64 {
    libm::lgamma(x)
}

pub(crate) fn ceil(x: f64) -> f64 {
    libm::ceil(x)
}

/// `ln(e^x + e^y)`.
pub fn ln_add_exp(x: f64, y: f64) -> f64 {
    if x == f64::NEG_INFINITY {
        return y;
    }
    if y == f64::NEG_INFINITY {
        return x;
    }
    let (hi, lo) = if x >= y { (x, y) } else { (y, x) };
    if hi == f64::INFINITY {
        return hi;
    }
    hi + ln1p(exp(lo - hi))
}

/// `ln(e^x - e^y)` for `x >= y`; `-inf` when the difference vanishes.
pub fn ln_sub_exp(x: f64, y: f64) -> f64 {
    if y == f64::NEG_INFINITY {
        return x;
    }
    if y >= x {
        return f64::NEG_INFINITY;
    }
    x + ln(-expm1(y - x))
}

/// Natural log of `∫_lo^hi x^q dx` over `0 <= lo < hi <= ∞`, or `+inf` when
/// the integral diverges.
///
/// Divergence is decided exactly: a piece touching 0 diverges iff `q <= -1`,
/// an unbounded piece iff `q >= -1`.
pub fn ln_power_integral(lo: f64, hi: f64, q: f64) -> f64 {
    if hi <= lo {
        return f64::NEG_INFINITY;
    }
    let r = q + 1.0;
    let ln_lo = ln(lo);
    let ln_hi = ln(hi);
    if r == 0.0 {
        if lo == 0.0 || hi == f64::INFINITY {
            return f64::INFINITY;
        }
        return ln(ln_hi - ln_lo);
    }
    if r > 0.0 {
        if hi == f64::INFINITY {
            return f64::INFINITY;
        }
        // hi^r (1 - (lo/hi)^r) / r
        r * ln_hi + ln(-expm1(r * (ln_lo - ln_hi))) - ln(r)
    } else {
        if lo == 0.0 {
            return f64::INFINITY;
        }
        // lo^r (1 - (hi/lo)^r) / |r|
        r * ln_lo + ln(-expm1(r * (ln_hi - ln_lo))) - ln(-r)
    }
}

const GAMMA_EPS: f64 = 1e-16;
const GAMMA_MAX_ITER: usize = 2_000_000;
const FPMIN: f64 = 1e-300;

/// `ln γ(s, x)`, the lower incomplete gamma function, by its power series.
/// Accurate for `x < s + 1`.
fn ln_lower_gamma_series(s: f64, x: f64) -> f64 {
    if x <= 0.0 {
        return f64::NEG_INFINITY;
    }
    let mut ap = s;
    let mut del = 1.0 / s;
    let mut sum = del;
    for _ in 0..GAMMA_MAX_ITER {
        ap += 1.0;
        del *= x / ap;
        sum += del;
        if del.abs() < sum.abs() * GAMMA_EPS {
            break;
        }
    }
    ln(sum) - x + s * ln(x)
}

/// `ln Γ(s, x)`, the upper incomplete gamma function, by Lentz's continued
/// fraction. Accurate for `x >= s + 1`.
fn ln_upper_gamma_cf(s: f64, x: f64) -> f64 {
    if x == f64::INFINITY {
        return f64::NEG_INFINITY;
    }
    let mut b = x + 1.0 - s;
    let mut c = 1.0 / FPMIN;
    let mut d = 1.0 / b;
    let mut h = d;
    for i in 1..GAMMA_MAX_ITER {
        let an = -(i as f64) * (i as f64 - s);
        b += 2.0;
        d = an * d + b;
        if d.abs() < FPMIN {
            d = FPMIN;
        }
        c = b + an / c;
        if c.abs() < FPMIN {
            c = FPMIN;
        }
        d = 1.0 / d;
        let del = d * c;
        h *= del;
        if (del - 1.0).abs() < GAMMA_EPS {
            break;
        }
    }
    ln(h) - x + s * ln(x)
}

/// `ln ∫_{x1}^{x2} t^{s-1} e^{-t} dt` for `0 <= x1 < x2 <= ∞`, `s > 0`.
pub fn ln_gamma_increment(s: f64, x1: f64, x2: f64) -> f64 {
    if x2 <= x1 {
        return f64::NEG_INFINITY;
    }
    if x1 == 0.0 && x2 == f64::INFINITY {
        return lgamma(s);
    }
    let m = s + 1.0;
    if x2 <= m {
        return ln_sub_exp(ln_lower_gamma_series(s, x2), ln_lower_gamma_series(s, x1));
    }
    if x1 >= m {
        return ln_sub_exp(ln_upper_gamma_cf(s, x1), ln_upper_gamma_cf(s, x2));
    }
    let head = ln_sub_exp(ln_lower_gamma_series(s, m), ln_lower_gamma_series(s, x1));
    let tail = ln_sub_exp(ln_upper_gamma_cf(s, m), ln_upper_gamma_cf(s, x2));
    ln_add_exp(head, tail)
}

/// Natural log of `∫_lo^hi x^q |ln(x/anchor)|^k dx` for a range on one side
/// of `anchor` (`hi <= anchor` or `lo >= anchor`), `k >= 0`. Returns `None`
/// when no incomplete-gamma form exists (a growing exponential after the log
/// substitution, or a range straddling the anchor), and `Some(+inf)` on
/// divergence.
pub fn ln_log_power_integral(lo: f64, hi: f64, q: f64, k: f64, anchor: f64) -> Option<f64> {
    if hi <= lo {
        return Some(f64::NEG_INFINITY);
    }
    if k == 0.0 {
        return Some(ln_power_integral(lo, hi, q));
    }
    let r = q + 1.0;
    let ln_anchor = ln(anchor);
    let s = k + 1.0;
    if hi <= anchor {
        // t = ln(anchor / x): ∫_{t1}^{t2} anchor^r e^{-r t} t^k dt
        let t1 = ln(anchor / hi).max(0.0);
        let t2 = if lo == 0.0 { f64::INFINITY } else { ln(anchor / lo) };
        if r > 0.0 {
            Some(r * ln_anchor - s * ln(r) + ln_gamma_increment(s, r * t1, r * t2))
        } else if r == 0.0 {
            if t2 == f64::INFINITY {
                return Some(f64::INFINITY);
            }
            Some(ln_sub_exp(s * ln(t2), s * ln(t1)) - ln(s))
        } else if lo == 0.0 {
            Some(f64::INFINITY)
        } else {
            None
        }
    } else if lo >= anchor {
        // t = ln(x / anchor): ∫_{t1}^{t2} anchor^r e^{r t} t^k dt
        let t1 = ln(lo / anchor).max(0.0);
        let t2 = if hi == f64::INFINITY { f64::INFINITY } else { ln(hi / anchor) };
        if r < 0.0 {
            Some(r * ln_anchor - s * ln(-r) + ln_gamma_increment(s, -r * t1, -r * t2))
        } else if t2 == f64::INFINITY {
            Some(f64::INFINITY)
        } else if r == 0.0 {
            Some(ln_sub_exp(s * ln(t2), s * ln(t1)) - ln(s))
        } else {
            None
        }
    } else {
        None
    }
}

/// Polynomial (Neville) extrapolation of the points `(xs[i], ys[i])` to `x = 0`.
pub fn neville_at_zero(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len().min(ys.len());
    if n == 0 {
        return f64::NAN;
    }
    let mut p: alloc::vec::Vec<f64> = ys[..n].to_vec();
    for m in 1..n {
        for i in 0..n - m {
            let (xi, xj) = (xs[i], xs[i + m]);
            p[i] = (xj * p[i] - xi * p[i + 1]) / (xj - xi);
        }
    }
    p[0]
}

/// Ordinary least squares line through the points; returns
/// `(slope, intercept, rms_residual)`.
pub fn least_squares_line(xs: &[f64], ys: &[f64]) -> (f64, f64, f64) {
    let n = xs.len().min(ys.len()) as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let mut sxy = 0.0;
    let mut sxx = 0.0;
    for (x, y) in xs.iter().zip(ys) {
        sxy += (x - mx) * (y - my);
        sxx += (x - mx) * (x - mx);
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let rss: f64 = xs
        .iter()
        .zip(ys)
        .map(|(x, y)| {
            let e = y - (slope * x + intercept);
            e * e
        })
        .sum();
    (slope, intercept, sqrt(rss / n))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn power_integral_closed_forms() {
        // ∫_0^1 x^{-3/4} = 4, ∫_1^∞ x^{-3/2} = 2
        assert!((exp(ln_power_integral(0.0, 1.0, -0.75)) - 4.0).abs() < 1e-13);
        assert!((exp(ln_power_integral(1.0, f64::INFINITY, -1.5)) - 2.0).abs() < 1e-13);
        assert!((exp(ln_power_integral(1.0, 10.0, -1.0)) - ln(10.0)).abs() < 1e-13);
        assert_eq!(ln_power_integral(0.0, 1.0, -1.0), f64::INFINITY);
        assert_eq!(ln_power_integral(1.0, f64::INFINITY, -1.0), f64::INFINITY);
        assert_eq!(ln_power_integral(0.0, 1.0, -1.2), f64::INFINITY);
        assert_eq!(ln_power_integral(2.0, f64::INFINITY, 0.5), f64::INFINITY);
    }

    #[test]
    fn incomplete_gamma_pieces_sum_to_gamma() {
        for &s in &[0.5, 1.0, 3.0, 7.5, 40.0] {
            let full = ln_gamma_increment(s, 0.0, f64::INFINITY);
            assert!((full - lgamma(s)).abs() < 1e-12 * lgamma(s).abs().max(1.0), "s={s}");
            let a = ln_gamma_increment(s, 0.0, 2.0);
            let b = ln_gamma_increment(s, 2.0, f64::INFINITY);
            assert!((ln_add_exp(a, b) - full).abs() < 1e-12 * full.abs().max(1.0));
        }
        // γ(1, x) = 1 - e^{-x}
        let v = exp(ln_gamma_increment(1.0, 0.5, 3.0));
        assert!((v - (exp(-0.5) - exp(-3.0))).abs() < 1e-14);
    }

    #[test]
    fn log_power_integral_matches_gamma() {
        // ∫_0^1 |ln x|^3 dx = Γ(4) = 6
        let v = exp(ln_log_power_integral(0.0, 1.0, 0.0, 3.0, 1.0).unwrap());
        assert!((v - 6.0).abs() < 1e-12);
        // ∫_0^1 x |ln x| dx = 1/4
        let v = exp(ln_log_power_integral(0.0, 1.0, 1.0, 1.0, 1.0).unwrap());
        assert!((v - 0.25).abs() < 1e-14);
        assert_eq!(ln_log_power_integral(0.0, 1.0, -1.0, 2.0, 1.0), Some(f64::INFINITY));
        // ∫_1^∞ x^{-2} ln x dx = 1
        let v = exp(ln_log_power_integral(1.0, f64::INFINITY, -2.0, 1.0, 1.0).unwrap());
        assert!((v - 1.0).abs() < 1e-13);
        assert_eq!(ln_log_power_integral(1.0, f64::INFINITY, -1.0, 1.0, 1.0), Some(f64::INFINITY));
        assert_eq!(ln_log_power_integral(0.5, 2.0, 0.0, 1.0, 1.0), None);
    }

    #[test]
    fn neville_recovers_polynomial_limit() {
        let xs = [0.1, 0.2, 0.3];
        let ys: alloc::vec::Vec<f64> = xs.iter().map(|x| 0.5 + 2.0 * x - x * x).collect();
        assert!((neville_at_zero(&xs, &ys) - 0.5).abs() < 1e-13);
    }

    #[test]
    fn log_space_add_sub() {
        let a = ln(3.0);
        let b = ln(2.0);
        assert!((exp(ln_add_exp(a, b)) - 5.0).abs() < 1e-14);
        assert!((exp(ln_sub_exp(a, b)) - 1.0).abs() < 1e-14);
        assert_eq!(ln_sub_exp(b, b), f64::NEG_INFINITY);
    }
}
