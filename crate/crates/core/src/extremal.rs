//! Polynomials in the Chebyshev basis of the hull, sup-norms over interval
//! unions, the Bernstein bound check, and near-extremal polynomials from
//! the discretized semi-infinite program `max p'(x0), |p| <= 1 on E`.

use crate::bernstein::interior_density_factor;
use crate::equilibrium::solve_gap_polynomial;
use crate::error::{Error, Result};
use crate::set::{PointLocation, RealCompactSet};
use crate::simplex::maximize_linear_over_unit_ball;

/// Numeric slack on the Theorem-2 ceiling `ratio <= 1`.
pub const RATIO_SLACK: f64 = 1e-6;

/// A real polynomial stored in the Chebyshev basis of a fixed interval
/// (the hull of the set it was built for).
#[derive(Debug, Clone, PartialEq)]
pub struct Polynomial {
    hull: (f64, f64),
    coeffs: Vec<f64>,
}

impl Polynomial {
    pub fn new(hull: (f64, f64), coeffs: Vec<f64>) -> Self {
        assert!(hull.0 < hull.1 && !coeffs.is_empty());
        Self { hull, coeffs }
    }

    /// The basis polynomial `T_k` on `[a, b]`.
    pub fn chebyshev(hull: (f64, f64), k: usize) -> Self {
        let mut coeffs = vec![0.0; k + 1];
        coeffs[k] = 1.0;
        Self::new(hull, coeffs)
    }

    pub fn constant(hull: (f64, f64), c: f64) -> Self {
        Self::new(hull, vec![c])
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn hull(&self) -> (f64, f64) {
        self.hull
    }

    fn to_u(&self, x: f64) -> f64 {
        (2.0 * x - self.hull.0 - self.hull.1) / (self.hull.1 - self.hull.0)
    }

    /// Clenshaw evaluation.
    pub fn eval(&self, x: f64) -> f64 {
        let u = self.to_u(x);
        let n = self.coeffs.len() - 1;
        let (mut b1, mut b2) = (0.0, 0.0);
        for k in (1..=n).rev() {
            let b0 = self.coeffs[k] + 2.0 * u * b1 - b2;
            b2 = b1;
            b1 = b0;
        }
        self.coeffs[0] + u * b1 - b2
    }

    /// Derivative as a Chebyshev series on the same hull (standard
    /// backward recurrence, then the chain-rule factor `2/(b-a)`).
    pub fn derivative(&self) -> Polynomial {
        let n = self.coeffs.len() - 1;
        if n == 0 {
            return Polynomial::constant(self.hull, 0.0);
        }
        let mut d = vec![0.0; n + 1];
        for k in (1..=n).rev() {
            d[k - 1] = if k + 1 <= n { d[k + 1] } else { 0.0 } + 2.0 * k as f64 * self.coeffs[k];
        }
        d[0] *= 0.5;
        d.truncate(n);
        let scale = 2.0 / (self.hull.1 - self.hull.0);
        for v in d.iter_mut() {
            *v *= scale;
        }
        Polynomial::new(self.hull, d)
    }

    pub fn eval_derivative(&self, x: f64) -> f64 {
        self.derivative().eval(x)
    }

    /// Monomial coefficients in the scaled variable `u`, exact for low
    /// degrees (the integer Chebyshev coefficients stay below 2^53 for
    /// n <= 16).
    pub fn monomial_coeffs_in_u(&self) -> Vec<f64> {
        let n = self.coeffs.len();
        let mut result = vec![0.0; n];
        let mut t_prev = vec![0.0; n];
        let mut t_curr = vec![0.0; n];
        t_prev[0] = 1.0;
        if n > 1 {
            t_curr[1] = 1.0;
        }
        for (k, &c) in self.coeffs.iter().enumerate() {
            let basis = match k {
                0 => &t_prev,
                1 => &t_curr,
                _ => {
                    let mut next = vec![0.0; n];
                    for j in 0..n - 1 {
                        next[j + 1] += 2.0 * t_curr[j];
                    }
                    for (j, v) in t_prev.iter().enumerate() {
                        next[j] -= v;
                    }
                    t_prev = std::mem::take(&mut t_curr);
                    t_curr = next;
                    &t_curr
                }
            };
            for (r, b) in result.iter_mut().zip(basis) {
                *r += c * b;
            }
        }
        result
    }
}

/// The functional `p ↦ p'(x0)` in coefficient space: component `k` is
/// `T_k'(u0) * 2/(b-a) = k U_{k-1}(u0) * 2/(b-a)`.
pub fn derivative_functional(hull: (f64, f64), n: usize, x0: f64) -> Vec<f64> {
    let u0 = (2.0 * x0 - hull.0 - hull.1) / (hull.1 - hull.0);
    let scale = 2.0 / (hull.1 - hull.0);
    let mut out = Vec::with_capacity(n + 1);
    out.push(0.0);
    let (mut u_prev, mut u_curr) = (1.0, 2.0 * u0);
    for k in 1..=n {
        let u_km1 = if k == 1 { u_prev } else { u_curr };
        out.push(k as f64 * u_km1 * scale);
        if k >= 2 {
            let next = 2.0 * u0 * u_curr - u_prev;
            u_prev = u_curr;
            u_curr = next;
        }
    }
    out
}

/// Sup-norm of `p` over the set: dense Chebyshev sampling per component
/// (`4n+16` nodes) followed by golden-section refinement around the best
/// local maxima.
pub fn sup_norm(set: &RealCompactSet, p: &Polynomial) -> f64 {
    let n = p.degree();
    let samples = 4 * n + 16;
    let mut best = 0.0f64;
    for iv in set.intervals() {
        let (mid, half) = (iv.midpoint(), iv.half_width());
        let xs: Vec<f64> = (0..samples)
            .map(|j| {
                let theta = std::f64::consts::PI * j as f64 / (samples - 1) as f64;
                mid + half * theta.cos()
            })
            .collect();
        let vals: Vec<f64> = xs.iter().map(|&x| p.eval(x).abs()).collect();
        for &v in &vals {
            best = best.max(v);
        }
        // Candidate brackets: the three strongest interior local maxima.
        let mut candidates: Vec<(usize, f64)> = (1..samples - 1)
            .filter(|&j| vals[j] >= vals[j - 1] && vals[j] >= vals[j + 1])
            .map(|j| (j, vals[j]))
            .collect();
        candidates.sort_by(|a, b| b.1.total_cmp(&a.1));
        for &(j, _) in candidates.iter().take(3) {
            // xs descend with theta; order the bracket.
            let (lo, hi) = (xs[j + 1].min(xs[j - 1]), xs[j + 1].max(xs[j - 1]));
            best = best.max(golden_section_max(|x| p.eval(x).abs(), lo, hi));
        }
    }
    best
}

fn golden_section_max(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> f64 {
    let inv_phi = 0.5 * (5.0f64.sqrt() - 1.0);
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..90 {
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    fc.max(fd)
}

/// Slack in the Theorem-2 upper bound at `x0`:
/// `margin = h n ||p||_E - |p'(x0)|`, nonnegative (up to numeric slack)
/// for every real polynomial.
pub fn bernstein_bound_check(
    set: &RealCompactSet,
    x0: f64,
    p: &Polynomial,
    h: f64,
) -> f64 {
    let n = p.degree() as f64;
    h * n * sup_norm(set, p) - p.eval_derivative(x0).abs()
}

/// Output of the extremal search, rescaled to certified sup-norm 1.
#[derive(Debug, Clone, PartialEq)]
pub struct ExtremalResult {
    pub poly: Polynomial,
    /// `|p'(x0)|` of the rescaled polynomial.
    pub value: f64,
    pub certified_norm: f64,
    /// `value / (h n)`; at most `1 + RATIO_SLACK` by Theorem-2 type bounds.
    pub ratio: f64,
    pub grid_size: usize,
    pub iterations: usize,
}

/// Maximizes `p'(x0)` over polynomials of degree `n` bounded by 1 on a
/// Chebyshev-node discretization of `E`, then certifies the result against
/// the refined true sup-norm so the reported ratio is feasible-side.
pub fn extremal_polynomial(
    set: &RealCompactSet,
    x0: f64,
    n: usize,
    grid_per_interval: usize,
) -> Result<ExtremalResult> {
    if set.classify_point(x0).location != PointLocation::Interior {
        return Err(Error::PointNotInterior(x0));
    }
    let hull = (set.min(), set.max());
    if n == 0 {
        // Derivative of constants: total API, trivial result.
        return Ok(ExtremalResult {
            poly: Polynomial::constant(hull, 1.0),
            value: 0.0,
            certified_norm: 1.0,
            ratio: 0.0,
            grid_size: 0,
            iterations: 0,
        });
    }
    if grid_per_interval < 4 * n {
        return Err(Error::InvalidParameter {
            name: "grid_per_interval",
            value: grid_per_interval as f64,
            reason: "need at least 4n grid nodes per interval",
        });
    }
    let eq = solve_gap_polynomial(set)?;
    let h = interior_density_factor(&eq, x0)?;

    let mut samples: Vec<Vec<f64>> = Vec::new();
    for iv in set.intervals() {
        let (mid, half) = (iv.midpoint(), iv.half_width());
        for j in 0..grid_per_interval {
            let theta = std::f64::consts::PI * j as f64 / (grid_per_interval - 1) as f64;
            let x = mid + half * theta.cos();
            let u = (2.0 * x - hull.0 - hull.1) / (hull.1 - hull.0);
            let mut row = Vec::with_capacity(n + 1);
            row.push(1.0);
            if n >= 1 {
                row.push(u);
            }
            for k in 2..=n {
                let t = 2.0 * u * row[k - 1] - row[k - 2];
                row.push(t);
            }
            samples.push(row);
        }
    }
    let grid_size = samples.len();
    let objective = derivative_functional(hull, n, x0);
    let lp = maximize_linear_over_unit_ball(&objective, &samples)?;

    let raw = Polynomial::new(hull, lp.coefficients);
    let certified = sup_norm(set, &raw);
    let scaled = Polynomial::new(
        hull,
        raw.coeffs().iter().map(|c| c / certified).collect(),
    );
    let value = objective
        .iter()
        .zip(scaled.coeffs())
        .map(|(d, c)| d * c)
        .sum::<f64>()
        .abs();
    let ratio = value / (h * n as f64);
    if ratio > 1.0 + RATIO_SLACK {
        return Err(Error::RatioCeilingExceeded { ratio, slack: RATIO_SLACK });
    }
    Ok(ExtremalResult {
        poly: scaled,
        value,
        certified_norm: 1.0,
        ratio,
        grid_size,
        iterations: lp.iterations,
    })
}
