//! Integration primitives for equilibrium densities and potentials.
//!
//! Three singularity classes appear throughout the crate:
//!
//! * inverse-square-root weights `1/sqrt((x-a)(b-x))` at interval endpoints
//!   (equilibrium densities) — removed exactly by the substitution
//!   `x = m + h*cos(theta)`, which turns the rule into Gauss–Chebyshev;
//! * logarithmic kernels `log|x0 - t|` against the same weight (potentials
//!   evaluated on the set) — handled by a cosine expansion of the smooth
//!   part and the closed-form integrals of `log|cos t* - cos t|` against
//!   each mode;
//! * slowly decaying tails on rays to infinity — handled by geometric
//!   window doubling.
//!
//! All rules report an error estimate obtained by comparing two refinement
//! levels, and are deterministic for a fixed order.

use std::collections::HashMap;
use std::sync::{Arc, LazyLock, RwLock};

use crate::error::{Error, Result};

/// Default node count per interval. Densities are analytic on interval
/// interiors, so a fixed spectral order is enough; it is doubled once for
/// the error estimate.
pub const DEFAULT_ORDER: usize = 200;

/// Outcome of a quadrature call.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureResult {
    pub value: f64,
    /// Absolute difference between the two highest refinement levels used.
    pub error_estimate: f64,
    pub nodes_used: usize,
}

fn check_bounds(a: f64, b: f64) -> Result<()> {
    if a >= b || !a.is_finite() || !b.is_finite() {
        return Err(Error::InvalidBounds(a, b));
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Gauss–Legendre nodes, cached per order.
// ---------------------------------------------------------------------------

type NodeTable = Arc<Vec<(f64, f64)>>;

static GL_CACHE: LazyLock<RwLock<HashMap<usize, NodeTable>>> =
    LazyLock::new(|| RwLock::new(HashMap::new()));

/// Nodes and weights of the `n`-point Gauss–Legendre rule on `[-1, 1]`,
/// computed by Newton iteration on the Legendre recurrence.
pub fn gauss_legendre(n: usize) -> NodeTable {
    if let Some(t) = GL_CACHE.read().unwrap().get(&n) {
        return t.clone();
    }
    let mut table = Vec::with_capacity(n);
    for i in 1..=n {
        let mut x = (std::f64::consts::PI * (i as f64 - 0.25) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            // Legendre recurrence for P_n and its derivative.
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        table.push((x, w));
    }
    table.sort_by(|a, b| a.0.total_cmp(&b.0));
    let table = Arc::new(table);
    GL_CACHE.write().unwrap().insert(n, table.clone());
    table
}

fn gauss_legendre_sum(f: &impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
    let mid = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let table = gauss_legendre(n);
    // Fixed summation order keeps results independent of thread count.
    let mut acc = 0.0;
    for &(x, w) in table.iter() {
        acc += w * f(mid + half * x);
    }
    acc * half
}

/// `∫_a^b f(x) dx` for continuous `f`, Gauss–Legendre with a doubling-based
/// error estimate.
pub fn integrate_smooth(f: impl Fn(f64) -> f64, a: f64, b: f64, order: usize) -> Result<QuadratureResult> {
    check_bounds(a, b)?;
    let order = order.max(2);
    let coarse = gauss_legendre_sum(&f, a, b, order);
    let fine = gauss_legendre_sum(&f, a, b, 2 * order);
    Ok(QuadratureResult {
        value: fine,
        error_estimate: (fine - coarse).abs(),
        nodes_used: 3 * order,
    })
}

// ---------------------------------------------------------------------------
// Inverse-square-root endpoint weight.
// ---------------------------------------------------------------------------

fn chebyshev_sum(f: &impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
    let mid = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let mut acc = 0.0;
    for k in 1..=n {
        let theta = (2.0 * k as f64 - 1.0) * std::f64::consts::PI / (2.0 * n as f64);
        acc += f(mid + half * theta.cos());
    }
    acc * std::f64::consts::PI / n as f64
}

/// `∫_a^b f(x)/sqrt((x-a)(b-x)) dx` with smooth `f`. The substitution
/// `x = m + h*cos(theta)` removes the singularity exactly; the resulting
/// rule is Gauss–Chebyshev and is exact for polynomial `f` of degree
/// `< 2*order`.
pub fn integrate_sqrt_singular(
    f: impl Fn(f64) -> f64,
    a: f64,
    b: f64,
    order: usize,
) -> Result<QuadratureResult> {
    check_bounds(a, b)?;
    let order = order.max(8);
    let coarse = chebyshev_sum(&f, a, b, order);
    let fine = chebyshev_sum(&f, a, b, 2 * order);
    Ok(QuadratureResult {
        value: fine,
        error_estimate: (fine - coarse).abs(),
        nodes_used: 3 * order,
    })
}

/// `∫_a^upper f(x)/sqrt((x-a)(b-x)) dx` for `a < upper <= b`: the cosine
/// substitution maps the clipped range to `theta in [theta0, pi]`, where the
/// integrand is smooth and plain Gauss–Legendre applies.
pub fn integrate_sqrt_singular_upto(
    f: impl Fn(f64) -> f64,
    a: f64,
    b: f64,
    upper: f64,
    order: usize,
) -> Result<QuadratureResult> {
    check_bounds(a, b)?;
    if upper <= a || upper > b {
        return Err(Error::InvalidBounds(a, upper));
    }
    let mid = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let theta0 = ((upper - mid) / half).clamp(-1.0, 1.0).acos();
    let g = |theta: f64| f(mid + half * theta.cos());
    integrate_smooth(g, theta0, std::f64::consts::PI, order)
}

// ---------------------------------------------------------------------------
// Logarithmic kernel against the inverse-square-root weight.
// ---------------------------------------------------------------------------

/// `∫_a^b f(t) log|x0 - t| / sqrt((t-a)(b-t)) dt` for smooth `f` and any
/// real `x0` — inside, at an endpoint, or outside the interval.
///
/// With `t = m + h*cos(theta)` the kernel splits as
/// `log h + log|c - cos(theta)|`, `c = (x0-m)/h`. Writing `c = (v + 1/v)/2`
/// with `|v| >= 1` gives the factorization
/// `c - cos(theta) = (v - e^{i theta})(v - e^{-i theta})/(2v)`, hence the
/// closed-form modes
/// `∫_0^pi log|c - cos t| cos(k t) dt = -pi Re(v^-k)/k` (and
/// `pi log(|v|/2)` for `k = 0`). Expanding the smooth part in cosine modes
/// integrates the singular core analytically; accuracy depends only on the
/// smoothness of `f`, not on where `x0` sits.
pub fn integrate_log_sqrt_singular(
    f: impl Fn(f64) -> f64,
    a: f64,
    b: f64,
    x0: f64,
    order: usize,
) -> Result<QuadratureResult> {
    check_bounds(a, b)?;
    if !x0.is_finite() {
        return Err(Error::InvalidBounds(x0, b));
    }
    let order = order.max(8);
    let coarse = log_mode_sum(&f, a, b, x0, order);
    let fine = log_mode_sum(&f, a, b, x0, 2 * order);
    Ok(QuadratureResult {
        value: fine,
        error_estimate: (fine - coarse).abs(),
        nodes_used: 3 * order,
    })
}

/// The exterior Joukowski preimage of `c`: the root of `v + 1/v = 2c` with
/// `|v| >= 1`.
pub(crate) fn joukowski_exterior(c: num_complex::Complex64) -> num_complex::Complex64 {
    let s = (c * c - 1.0).sqrt();
    let v = c + s;
    if v.norm_sqr() >= 1.0 {
        v
    } else {
        c - s
    }
}

fn log_mode_sum(f: &impl Fn(f64) -> f64, a: f64, b: f64, x0: f64, n: usize) -> f64 {
    use num_complex::Complex64;
    let mid = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let pi = std::f64::consts::PI;
    let c = (x0 - mid) / half;
    let v = joukowski_exterior(Complex64::new(c, 0.0));
    let vinv = v.finv();

    let samples: Vec<(f64, f64)> = (1..=n)
        .map(|k| {
            let theta = (2.0 * k as f64 - 1.0) * pi / (2.0 * n as f64);
            (theta, f(mid + half * theta.cos()))
        })
        .collect();

    // Discrete cosine coefficients of the smooth part.
    let g0: f64 = samples.iter().map(|&(_, v)| v).sum::<f64>() / n as f64;
    let mut acc = g0 * (half.ln() + (v.norm() / 2.0).ln());
    let mut vk = Complex64::new(1.0, 0.0);
    for k in 1..n {
        let kf = k as f64;
        vk *= vinv;
        let gk: f64 = samples
            .iter()
            .map(|&(theta, val)| val * (kf * theta).cos())
            .sum::<f64>()
            * 2.0
            / n as f64;
        acc -= gk * vk.re / kf;
    }
    pi * acc
}

// ---------------------------------------------------------------------------
// Tails.
// ---------------------------------------------------------------------------

/// Controls the geometric window scheme of [`integrate_to_infinity`].
#[derive(Debug, Clone, Copy)]
pub struct TailConfig {
    /// Width of the first window `[a, a + first_window]`.
    pub first_window: f64,
    /// Stop once a window contributes less than this in absolute value.
    pub tolerance: f64,
    pub max_windows: usize,
    /// Gauss–Legendre order within each window.
    pub order: usize,
}

impl Default for TailConfig {
    fn default() -> Self {
        Self { first_window: 1.0, tolerance: 1e-12, max_windows: 64, order: 64 }
    }
}

/// `∫_a^∞ f(x) dx` for `f` decaying at least like `x^-2`: windows of
/// geometrically doubling width are added until the last one contributes
/// less than the requested tolerance, which is also the error estimate.
pub fn integrate_to_infinity(
    f: impl Fn(f64) -> f64,
    a: f64,
    cfg: TailConfig,
) -> Result<QuadratureResult> {
    let mut left = a;
    let mut width = cfg.first_window;
    let mut total = 0.0;
    let mut nodes = 0;
    let mut last = f64::INFINITY;
    for _ in 0..cfg.max_windows {
        let piece = integrate_smooth(&f, left, left + width, cfg.order)?;
        total += piece.value;
        nodes += piece.nodes_used;
        last = piece.value.abs();
        if last < cfg.tolerance {
            return Ok(QuadratureResult { value: total, error_estimate: last, nodes_used: nodes });
        }
        left += width;
        width *= 2.0;
    }
    Err(Error::DivergenceSuspected { windows: cfg.max_windows, last })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::PI;

    // Closed-form monomial oracle for the sqrt-singular weight:
    // ∫ t^p / sqrt((t-a)(b-t)) dt = ∫_0^pi (m + h cos θ)^p dθ, expanded with
    // the Wallis integrals ∫_0^pi cos^j θ dθ.
    fn monomial_oracle(p: u32, a: f64, b: f64) -> f64 {
        let m = 0.5 * (a + b);
        let h = 0.5 * (b - a);
        let mut total = 0.0;
        for j in (0..=p).step_by(2) {
            let mut binom = 1.0;
            for i in 0..j {
                binom *= (p - i) as f64 / (i + 1) as f64;
            }
            let mut wallis = PI;
            let mut i = 2;
            while i <= j {
                wallis *= (i - 1) as f64 / i as f64;
                i += 2;
            }
            total += binom * m.powi((p - j) as i32) * h.powi(j as i32) * wallis;
        }
        total
    }

    #[test]
    fn arcsine_mass_is_one() {
        let r = integrate_sqrt_singular(|_| 1.0 / PI, -1.0, 1.0, 32).unwrap();
        assert_abs_diff_eq!(r.value, 1.0, epsilon = 1e-14);
    }

    #[test]
    fn unit_weight_integrates_to_pi() {
        let r = integrate_sqrt_singular(|_| 1.0, 0.0, 1.0, 32).unwrap();
        assert_abs_diff_eq!(r.value, PI, epsilon = 1e-13);
    }

    #[test]
    fn second_arcsine_moment() {
        let r = integrate_sqrt_singular(|x| x * x / PI, -1.0, 1.0, 32).unwrap();
        assert_abs_diff_eq!(r.value, 0.5, epsilon = 1e-14);
    }

    #[test]
    fn monomials_exact_to_gauss_chebyshev_degree() {
        let (a, b) = (0.25, 2.75);
        for p in 0..=15u32 {
            let r = integrate_sqrt_singular(|t| t.powi(p as i32), a, b, 8).unwrap();
            let exact = monomial_oracle(p, a, b);
            assert!(
                (r.value - exact).abs() <= 1e-12 * exact.abs().max(1.0),
                "degree {p}: {} vs {exact}",
                r.value
            );
        }
    }

    #[test]
    fn linearity() {
        let (a, b) = (-0.5, 1.5);
        let f = |x: f64| (x * 1.3).sin();
        let g = |x: f64| (0.7 * x).exp();
        let lhs = integrate_sqrt_singular(|x| 2.5 * f(x) - 0.75 * g(x), a, b, 64)
            .unwrap()
            .value;
        let rhs = 2.5 * integrate_sqrt_singular(f, a, b, 64).unwrap().value
            - 0.75 * integrate_sqrt_singular(g, a, b, 64).unwrap().value;
        assert_abs_diff_eq!(lhs, rhs, epsilon = 1e-12);
    }

    #[test]
    fn clipped_rule_recovers_arcsine_cdf() {
        // ∫_{-1}^{x0} dx/(pi sqrt(1-x^2)) = 1/2 + asin(x0)/pi
        let r = integrate_sqrt_singular_upto(|_| 1.0 / PI, -1.0, 1.0, 0.5, 64).unwrap();
        assert_abs_diff_eq!(r.value, 2.0 / 3.0, epsilon = 1e-12);
        let full = integrate_sqrt_singular_upto(|_| 1.0 / PI, -1.0, 1.0, 1.0, 64).unwrap();
        assert_abs_diff_eq!(full.value, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn smooth_constant() {
        let r = integrate_smooth(|_| 1.0, 0.0, 2.0, 16).unwrap();
        assert_abs_diff_eq!(r.value, 2.0, epsilon = 1e-14);
    }

    #[test]
    fn smooth_odd_function() {
        let r = integrate_smooth(|x| x, -1.0, 1.0, 16).unwrap();
        assert_abs_diff_eq!(r.value, 0.0, epsilon = 1e-15);
    }

    #[test]
    fn smooth_log_integrand() {
        // ∫_{-1}^{1} log(2-x) dx = 3 log 3 - 2
        let r = integrate_smooth(|x| (2.0 - x).ln(), -1.0, 1.0, 64).unwrap();
        assert_abs_diff_eq!(r.value, 3.0 * 3.0f64.ln() - 2.0, epsilon = 1e-13);
    }

    #[test]
    fn doubling_does_not_inflate_error_estimate() {
        // On the smooth corpus, doubling the order must not grow the
        // estimate by more than a factor of 2 (it normally collapses it).
        let cases: Vec<(Box<dyn Fn(f64) -> f64>, f64, f64)> = vec![
            (Box::new(|_| 1.0), 0.0, 2.0),
            (Box::new(|x| x), -1.0, 1.0),
            (Box::new(|x: f64| (2.0 - x).ln()), -1.0, 1.0),
        ];
        for (f, a, b) in cases {
            let lo = integrate_smooth(&f, a, b, 32).unwrap();
            let hi = integrate_smooth(&f, a, b, 64).unwrap();
            assert!(hi.error_estimate <= 2.0 * lo.error_estimate + 1e-15);
        }
    }

    #[test]
    fn inverse_square_tail() {
        let r = integrate_to_infinity(|x| 1.0 / (x * x), 1.0, TailConfig::default()).unwrap();
        assert_abs_diff_eq!(r.value, 1.0, epsilon = 1e-10);
    }

    #[test]
    fn zero_tail() {
        let r = integrate_to_infinity(|_| 0.0, 5.0, TailConfig::default()).unwrap();
        assert_eq!(r.value, 0.0);
    }

    #[test]
    fn green_like_tail() {
        // ∫_1^∞ log(x + sqrt(x^2-1))/x^2 dx = pi/2 (integration by parts).
        let f = |x: f64| (x + (x * x - 1.0).max(0.0).sqrt()).ln() / (x * x);
        let cfg = TailConfig { order: 200, ..TailConfig::default() };
        let r = integrate_to_infinity(f, 1.0, cfg).unwrap();
        assert_abs_diff_eq!(r.value, PI / 2.0, epsilon = 1e-6);
    }

    #[test]
    fn tail_divergence_detected() {
        let err = integrate_to_infinity(|x| 1.0 / x, 1.0, TailConfig::default());
        assert!(matches!(err, Err(Error::DivergenceSuspected { .. })));
    }

    #[test]
    fn bad_bounds_rejected() {
        assert!(integrate_smooth(|_| 1.0, 1.0, 1.0, 8).is_err());
        assert!(integrate_sqrt_singular(|_| 1.0, 2.0, 1.0, 8).is_err());
    }

    #[test]
    fn log_kernel_against_arcsine_weight() {
        // Equilibrium potential of [-1,1]: ∫ log|x0-t| dμ(t) = -log 2 for
        // every x0 in [-1,1].
        for &x0 in &[0.0, 0.5, -0.99, 1.0] {
            let r =
                integrate_log_sqrt_singular(|_| 1.0 / PI, -1.0, 1.0, x0, 200).unwrap();
            assert_abs_diff_eq!(r.value, -std::f64::consts::LN_2, epsilon = 1e-10);
        }
    }

    #[test]
    fn log_kernel_exterior_point() {
        // Outside the interval the potential of the arcsine measure is
        // log|x0 + sqrt(x0^2 - 1)| - log 2.
        for &x0 in &[2.0, -3.5, 1.0 + 1e-8] {
            let r =
                integrate_log_sqrt_singular(|_| 1.0 / PI, -1.0, 1.0, x0, 200).unwrap();
            let expected =
                (x0.abs() + (x0 * x0 - 1.0).sqrt()).ln() - std::f64::consts::LN_2;
            assert_abs_diff_eq!(r.value, expected, epsilon = 1e-10);
        }
    }

    #[test]
    fn log_kernel_polynomial_smooth_part() {
        // Independent oracle: split log|x0-t| integration of t^2 into the
        // plain sqrt-singular rule on [a, x0-eps] and [x0+eps, b] plus a
        // small analytic remainder is awkward; instead compare against a
        // high-order subdivision of the theta integral.
        let (a, b, x0) = (0.0, 3.0, 1.2);
        let f = |t: f64| 0.3 + t * t;
        let direct = integrate_log_sqrt_singular(f, a, b, x0, 400).unwrap().value;
        // Brute force: graded panels toward theta0 in the theta variable.
        let mid = 0.5 * (a + b);
        let half = 0.5 * (b - a);
        let theta0 = ((x0 - mid) / half).acos();
        let g = |theta: f64| f(mid + half * theta.cos()) * (x0 - mid - half * theta.cos()).abs().ln();
        let mut brute = 0.0;
        let mut edges = vec![0.0f64];
        for k in (0..40).rev() {
            let d = theta0 * 0.5f64.powi(k + 1);
            edges.push(theta0 - d);
        }
        edges.push(theta0);
        for k in (0..40).rev() {
            let d = (PI - theta0) * 0.5f64.powi(k + 1);
            edges.push(theta0 + d);
        }
        edges.push(PI);
        edges.sort_by(f64::total_cmp);
        edges.dedup();
        for w in edges.windows(2) {
            if w[1] > w[0] + 1e-300 {
                brute += gauss_legendre_sum(&g, w[0], w[1], 40);
            }
        }
        assert_abs_diff_eq!(direct, brute, epsilon = 1e-9);
    }
}
