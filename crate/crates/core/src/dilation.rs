//! Dilation operators `σ_s` and matrix dilations `D_A f(x) = f(A^{-1} x)`.

use alloc::vec;
use alloc::vec::Vec;

use crate::domain::{ln_measure_scaling_factor, WeightedDomain};
use crate::error::{Error, Result};
use crate::function::{canonical_function, indicator_of_measure, scale_arg, ProductFunction};
use crate::indices::{extrapolated_slope, Direction, SlopeEstimate};
use crate::math::{exp, ln, powf, sqrt};
use crate::psi::{multiply_psi, PsiFunction};
use crate::quad::{integrate, QuadOptions};
use crate::space::{ln_fundamental, norm_over, NormOptions};

/// A dense square matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    n: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn new(n: usize, data: Vec<f64>) -> Result<Self> {
        if n == 0 || data.len() != n * n {
            return Err(Error::LengthMismatch { expected: n * n, found: data.len() });
        }
        if data.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidInput("matrix entries must be finite".into()));
        }
        Ok(Matrix { n, data })
    }

    pub fn identity(n: usize) -> Self {
        Self::diag(&vec![1.0; n])
    }

    pub fn diag(d: &[f64]) -> Self {
        let n = d.len();
        let mut data = vec![0.0; n * n];
        for (i, &v) in d.iter().enumerate() {
            data[i * n + i] = v;
        }
        Matrix { n, data }
    }

    /// `s` times the rotation by `angle`.
    pub fn scaled_rotation(s: f64, angle: f64) -> Self {
        let (c, sn) = (libm::cos(angle), libm::sin(angle));
        Matrix { n: 2, data: vec![s * c, -s * sn, s * sn, s * c] }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    /// Determinant by LU with partial pivoting.
    pub fn det(&self) -> f64 {
        let n = self.n;
        let mut m = self.data.clone();
        let mut det = 1.0;
        for k in 0..n {
            let piv = (k..n).max_by(|&i, &j| m[i * n + k].abs().total_cmp(&m[j * n + k].abs())).unwrap();
            if m[piv * n + k] == 0.0 {
                return 0.0;
            }
            if piv != k {
                for j in 0..n {
                    m.swap(k * n + j, piv * n + j);
                }
                det = -det;
            }
            let d = m[k * n + k];
            det *= d;
            for i in k + 1..n {
                let f = m[i * n + k] / d;
                for j in k..n {
                    m[i * n + j] -= f * m[k * n + j];
                }
            }
        }
        det
    }

    fn gram(&self) -> Vec<f64> {
        let n = self.n;
        let mut g = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                g[i * n + j] = (0..n).map(|k| self.get(k, i) * self.get(k, j)).sum();
            }
        }
        g
    }

    /// Euclidean operator norm: the largest singular value, from cyclic
    /// Jacobi on `AᵀA`.
    pub fn spectral_norm(&self) -> f64 {
        let n = self.n;
        let mut g = self.gram();
        for _ in 0..100 {
            let off: f64 = (0..n).flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j))).map(|(i, j)| g[i * n + j] * g[i * n + j]).sum();
            if off < 1e-30 {
                break;
            }
            for p in 0..n {
                for q in p + 1..n {
                    let apq = g[p * n + q];
                    if apq == 0.0 {
                        continue;
                    }
                    let theta = (g[q * n + q] - g[p * n + p]) / (2.0 * apq);
                    let t = theta.signum() / (theta.abs() + sqrt(theta * theta + 1.0));
                    let t = if theta == 0.0 { 1.0 } else { t };
                    let c = 1.0 / sqrt(t * t + 1.0);
                    let s = t * c;
                    for k in 0..n {
                        let (gkp, gkq) = (g[k * n + p], g[k * n + q]);
                        g[k * n + p] = c * gkp - s * gkq;
                        g[k * n + q] = s * gkp + c * gkq;
                    }
                    for k in 0..n {
                        let (gpk, gqk) = (g[p * n + k], g[q * n + k]);
                        g[p * n + k] = c * gpk - s * gqk;
                        g[q * n + k] = s * gpk + c * gqk;
                    }
                }
            }
        }
        sqrt((0..n).map(|i| g[i * n + i]).fold(0.0, f64::max))
    }

    pub fn is_diagonal(&self) -> bool {
        (0..self.n).all(|i| (0..self.n).all(|j| i == j || self.get(i, j) == 0.0))
    }

    /// `Some(s)` when `A = s U` with `U` orthogonal.
    pub fn scaled_orthogonal(&self) -> Option<f64> {
        let n = self.n;
        let g = self.gram();
        let s2 = g[0];
        if !(s2 > 0.0) {
            return None;
        }
        for i in 0..n {
            for j in 0..n {
                let want = if i == j { s2 } else { 0.0 };
                if (g[i * n + j] - want).abs() > 1e-12 * s2 {
                    return None;
                }
            }
        }
        Some(sqrt(s2))
    }

    /// `A^{-1} x` for a 2×2 matrix.
    fn solve2(&self, x: f64, y: f64) -> (f64, f64) {
        let (a, b, c, d) = (self.data[0], self.data[1], self.data[2], self.data[3]);
        let det = a * d - b * c;
        ((d * x - b * y) / det, (-c * x + a * y) / det)
    }
}

/// A dilation: per-block factors, or a matrix (optionally with the weight
/// `|||x|||^σ` on the domain).
#[derive(Debug, Clone, PartialEq)]
pub enum DilationSpec {
    Vector(Vec<f64>),
    Matrix(Matrix),
    MatrixWeighted { a: Matrix, sigma: f64 },
}

impl DilationSpec {
    pub fn vector(s: Vec<f64>) -> Result<Self> {
        if let Some(&v) = s.iter().find(|&&v| !(v > 0.0 && v.is_finite())) {
            return Err(Error::NonPositive { what: "dilation factor", value: v });
        }
        Ok(DilationSpec::Vector(s))
    }

    pub fn matrix(a: Matrix) -> Result<Self> {
        if a.det() == 0.0 {
            return Err(Error::SingularMatrix);
        }
        Ok(DilationSpec::Matrix(a))
    }
}

/// What the closed form promises.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    EqualityExpected,
    UpperBoundOnly,
}

/// Closed-form operator norm with an empirical witness value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OperatorNormResult {
    pub closed_form: f64,
    /// Ratio attained by the witness (the representation, or the best of a
    /// witness bank); `None` when no witness could be evaluated.
    pub empirical_lower: Option<f64>,
    pub relation: Relation,
}

/// `σ_s f` or `D_A f`, structurally.
pub fn apply_dilation(spec: &DilationSpec, f: &ProductFunction) -> Result<ProductFunction> {
    match spec {
        DilationSpec::Vector(s) => scale_arg(f, s),
        DilationSpec::Matrix(a) | DilationSpec::MatrixWeighted { a, .. } => {
            if a.det() == 0.0 {
                return Err(Error::SingularMatrix);
            }
            let blocks = f.domain().blocks();
            if a.is_diagonal() && blocks.len() == a.dim() && blocks.iter().all(|b| b.dim == 1) {
                let s: Vec<f64> = (0..a.dim()).map(|i| a.get(i, i).abs()).collect();
                return scale_arg(f, &s);
            }
            if blocks.len() == 1 && blocks[0].dim == a.dim() {
                if let Some(s) = a.scaled_orthogonal() {
                    return scale_arg(f, &[s]);
                }
            }
            Err(Error::Structure("this matrix does not preserve the product form of the function".into()))
        }
    }
}

fn check_pair(psi: &PsiFunction, nu: &PsiFunction) -> Result<PsiFunction> {
    multiply_psi(psi, nu)
}

/// `||σ_s||(G(ψ) → G(ψν)) = φ(G(ν), s^{d+θ})`.
pub fn dilation_norm_closed_form(psi: &PsiFunction, nu: &PsiFunction, domain: &WeightedDomain, s: &[f64]) -> Result<f64> {
    check_pair(psi, nu)?;
    if s.len() != domain.num_blocks() {
        return Err(Error::LengthMismatch { expected: domain.num_blocks(), found: s.len() });
    }
    Ok(exp(ln_fundamental(nu, ln_measure_scaling_factor(domain, s)?)?))
}

fn witness_ratio(psi: &PsiFunction, zeta: &PsiFunction, f: &ProductFunction, g: &ProductFunction) -> Result<Option<f64>> {
    let opts = NormOptions::default();
    let den = norm_over(psi, f, opts)?;
    if den.is_infinite() || den.value == 0.0 {
        return Ok(None);
    }
    let num = norm_over(zeta, g, opts)?;
    Ok(Some(exp(num.ln_value - den.ln_value)))
}

/// Witnesses for ψ without a representation: indicators of measure
/// `10^k`, `|k| <= 3`, and the canonical function of the interval.
fn witness_bank(domain: &WeightedDomain, psi: &PsiFunction) -> Result<Vec<ProductFunction>> {
    let mut bank = Vec::new();
    for k in -3..=3 {
        bank.push(indicator_of_measure(domain, powf(10.0, k as f64))?);
    }
    let iv = psi.interval();
    bank.push(canonical_function(domain, iv.a(), iv.b())?);
    Ok(bank)
}

/// `||σ_s f||_{G(ψν)} / ||f||_{G(ψ)}` for the representation `f` of ψ,
/// against the closed form.
pub fn dilation_norm_empirical(psi: &PsiFunction, nu: &PsiFunction, domain: &WeightedDomain, s: &[f64]) -> Result<OperatorNormResult> {
    let zeta = check_pair(psi, nu)?;
    let closed_form = dilation_norm_closed_form(psi, nu, domain, s)?;
    match psi.representation() {
        Some(f) => {
            if !f.domain().same_as(domain) {
                return Err(Error::Structure("ψ's representation lives on a different domain".into()));
            }
            let g = scale_arg(f, s)?;
            let r = witness_ratio(psi, &zeta, f, &g)?;
            Ok(OperatorNormResult { closed_form, empirical_lower: r, relation: Relation::EqualityExpected })
        }
        None => {
            let mut best: Option<f64> = None;
            for f in witness_bank(domain, psi)? {
                let g = scale_arg(&f, s)?;
                if let Some(r) = witness_ratio(psi, &zeta, &f, &g)? {
                    best = Some(best.map_or(r, |b: f64| b.max(r)));
                }
            }
            Ok(OperatorNormResult { closed_form, empirical_lower: best, relation: Relation::UpperBoundOnly })
        }
    }
}

/// Norm of `D_A` from `G(ψ)` to `G(ψν)`: `φ(G(ν), |det A|)`, or with the
/// weight `|||x|||^σ`, `φ(G(ν, μ_σ), |det A| |||A|||^σ)` (`s^{d+σ}` for
/// `A = sU`).
pub fn matrix_dilation_norm(psi: &PsiFunction, nu: &PsiFunction, a: &Matrix, sigma: Option<f64>) -> Result<OperatorNormResult> {
    let zeta = check_pair(psi, nu)?;
    let det = a.det();
    if det == 0.0 {
        return Err(Error::SingularMatrix);
    }
    let n = a.dim() as f64;
    let (ln_arg, exact) = match sigma {
        None => (ln(det.abs()), true),
        Some(sg) => match a.scaled_orthogonal() {
            Some(s) => ((n + sg) * ln(s), true),
            None => (ln(det.abs()) + sg * ln(a.spectral_norm()), false),
        },
    };
    let closed_form = exp(ln_fundamental(nu, ln_arg)?);
    let relation = if exact && psi.representation().is_some() { Relation::EqualityExpected } else { Relation::UpperBoundOnly };
    let mut empirical = None;
    if let Some(f) = psi.representation() {
        let blocks = f.domain().blocks();
        let fits = match sigma {
            None => blocks.iter().all(|b| b.theta == 0.0) && f.domain().total_dim() == a.dim(),
            Some(sg) => blocks.len() == 1 && blocks[0].dim == a.dim() && blocks[0].theta == sg,
        };
        if fits {
            let spec = match sigma {
                None => DilationSpec::Matrix(a.clone()),
                Some(sg) => DilationSpec::MatrixWeighted { a: a.clone(), sigma: sg },
            };
            if let Ok(g) = apply_dilation(&spec, f) {
                empirical = witness_ratio(psi, &zeta, f, &g)?;
            }
        }
    }
    Ok(OperatorNormResult { closed_form, empirical_lower: empirical, relation })
}

/// Slopes of `ln ||D_A|| / ln |det A|` as `|det A| → ∞` and `→ 0`, along
/// `A = diag(10^{±2m}, 1, …)`.
pub fn matrix_boyd_limits(psi: &PsiFunction, nu: &PsiFunction, dim: usize, levels: usize) -> Result<(SlopeEstimate, SlopeEstimate)> {
    if psi.representation().is_none() {
        return Err(Error::MissingRepresentation);
    }
    check_pair(psi, nu)?;
    let h = |ln_s: f64| -> Result<f64> {
        let mut d = vec![1.0; dim.max(1)];
        d[0] = exp(ln_s);
        let det = Matrix::diag(&d).det();
        ln_fundamental(nu, ln(det.abs()))
    };
    let up = extrapolated_slope(h, Direction::ToInfinity, levels)?;
    let down = extrapolated_slope(h, Direction::ToZero, levels)?;
    Ok((up, down))
}

/// `∫|g(A^{-1}x)|^p dx / ∫|g(x)|^p dx` over the square `[-r, r]²`, for a
/// numeric plane function; tails outside the square are ignored.
pub fn plane_lp_ratio<G: Fn(f64, f64) -> f64>(a: &Matrix, g: G, p: f64, r: f64) -> Result<f64> {
    if a.dim() != 2 {
        return Err(Error::LengthMismatch { expected: 2, found: a.dim() });
    }
    if a.det() == 0.0 {
        return Err(Error::SingularMatrix);
    }
    let opts = QuadOptions { rel_tol: 1e-10, max_intervals: 2_000 };
    let box_integral = |h: &dyn Fn(f64, f64) -> f64| -> Result<f64> {
        let inner = |x: f64| -> f64 {
            integrate(|y| powf(h(x - r, y - r).abs(), p), 0.0, 2.0 * r, opts).map(|v| v.0).unwrap_or(f64::NAN)
        };
        Ok(integrate(inner, 0.0, 2.0 * r, opts)?.0)
    };
    let num = box_integral(&|x, y| {
        let (u, v) = a.solve2(x, y);
        g(u, v)
    })?;
    let den = box_integral(&|x, y| g(x, y))?;
    Ok(num / den)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn determinants_and_norms() {
        let a = Matrix::new(3, vec![2.0, 1.0, 0.0, 1.0, 3.0, 1.0, 0.0, 1.0, 4.0]).unwrap();
        assert!((a.det() - 18.0).abs() < 1e-12);
        let r = Matrix::scaled_rotation(2.0, 0.7);
        assert!((r.det() - 4.0).abs() < 1e-12);
        assert!((r.spectral_norm() - 2.0).abs() < 1e-12);
        assert!((r.scaled_orthogonal().unwrap() - 2.0).abs() < 1e-12);
        // singular values of [[1,2],[0,1]] are 1 ± √2
        let sh = Matrix::new(2, vec![1.0, 2.0, 0.0, 1.0]).unwrap();
        assert!((sh.spectral_norm() - (1.0 + libm::sqrt(2.0))).abs() < 1e-12);
        assert!(sh.scaled_orthogonal().is_none());
        assert!(matches!(DilationSpec::matrix(Matrix::new(2, vec![1.0, 2.0, 2.0, 4.0]).unwrap()), Err(Error::SingularMatrix)));
    }

    #[test]
    fn shear_preserves_plane_norms() {
        let sh = Matrix::new(2, vec![1.0, 0.5, 0.0, 2.0]).unwrap();
        let g = |x: f64, y: f64| exp(-(x * x + y * y));
        let r = plane_lp_ratio(&sh, g, 3.0, 12.0).unwrap();
        assert!((r - 2.0).abs() < 1e-7, "{r}");
    }
}
