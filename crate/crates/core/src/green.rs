//! Logarithmic potential of the equilibrium measure, Robin constant,
//! capacity, the Green's function with pole at infinity, the singular
//! integral `∫ g(x)/(x-x0)^2 dx`, and a half-plane Poisson oracle.
//!
//! Evaluation strategy: on each component `[a_i, b_i]` the potential
//! integrand is `log(z-t)` times a smooth factor against the
//! inverse-square-root weight. The smooth factor is expanded once in cosine
//! modes; the kernel modes `∫ log(z - m - h cos t) cos(k t) dt` have closed
//! forms through the exterior Joukowski variable `v`, so a potential
//! evaluation is a short mode sum whose accuracy is set by the density's
//! smoothness alone — it does not degrade as `z` approaches the set. This
//! is what keeps the finite-difference ladders in the Bernstein module
//! meaningful at heights down to `1e-7`.

use num_complex::Complex64;

use crate::equilibrium::EquilibriumDensity;
use crate::error::{Error, Result};
use crate::quadrature::{
    integrate_log_sqrt_singular, integrate_smooth, integrate_to_infinity,
    joukowski_exterior, QuadratureResult, TailConfig, DEFAULT_ORDER,
};

/// Hard ceiling on the Robin cross-check spread; beyond this the quadrature
/// is considered broken.
pub const ROBIN_SPREAD_LIMIT: f64 = 1e-6;

/// Number of cosine modes kept per component.
const MODES: usize = 2 * DEFAULT_ORDER;

/// Evaluates `g_Ω(z)` and the complex potential for one solved set.
/// Immutable and shareable across threads.
#[derive(Debug, Clone)]
pub struct GreenEvaluator {
    eq: EquilibriumDensity,
    robin: f64,
    robin_crosscheck_spread: f64,
    /// Cosine coefficients of the smooth density part, one vector per
    /// component.
    mode_coeffs: Vec<Vec<f64>>,
}

/// Builds the evaluator: Robin constant at the midpoint of the longest
/// component, cross-checked at the midpoints of all other components and at
/// the quarter point of the longest.
pub fn build_green(eq: &EquilibriumDensity) -> Result<GreenEvaluator> {
    let set = eq.set();
    let mode_coeffs = (0..set.component_count())
        .map(|i| cosine_coefficients(eq, i, MODES))
        .collect();

    let longest = (0..set.component_count())
        .max_by(|&i, &j| {
            set.intervals()[i]
                .length()
                .total_cmp(&set.intervals()[j].length())
        })
        .expect("nonempty set");

    let potential = |x: f64| -> Result<f64> {
        let mut total = 0.0;
        for (i, iv) in set.intervals().iter().enumerate() {
            total += integrate_log_sqrt_singular(
                |t| eq.smooth_density_part(i, t),
                iv.left,
                iv.right,
                x,
                DEFAULT_ORDER,
            )?
            .value;
        }
        Ok(total)
    };

    let robin = potential(set.intervals()[longest].midpoint())?;
    let mut probes: Vec<f64> = Vec::new();
    for (i, iv) in set.intervals().iter().enumerate() {
        if i != longest {
            probes.push(iv.midpoint());
        }
    }
    let quarter = set.intervals()[longest].left + 0.25 * set.intervals()[longest].length();
    probes.push(quarter);

    let mut spread: f64 = 0.0;
    for p in probes {
        spread = spread.max((potential(p)? - robin).abs());
    }
    if spread > ROBIN_SPREAD_LIMIT {
        return Err(Error::RobinInconsistent { spread, tolerance: ROBIN_SPREAD_LIMIT });
    }

    Ok(GreenEvaluator { eq: eq.clone(), robin, robin_crosscheck_spread: spread, mode_coeffs })
}

fn cosine_coefficients(eq: &EquilibriumDensity, i: usize, n: usize) -> Vec<f64> {
    let iv = eq.set().intervals()[i];
    let (mid, half) = (iv.midpoint(), iv.half_width());
    let pi = std::f64::consts::PI;
    let samples: Vec<(f64, f64)> = (1..=n)
        .map(|k| {
            let theta = (2.0 * k as f64 - 1.0) * pi / (2.0 * n as f64);
            (theta, eq.smooth_density_part(i, mid + half * theta.cos()))
        })
        .collect();
    let mut coeffs = Vec::with_capacity(n);
    coeffs.push(samples.iter().map(|&(_, v)| v).sum::<f64>() / n as f64);
    for k in 1..n {
        let kf = k as f64;
        coeffs.push(
            samples
                .iter()
                .map(|&(theta, v)| v * (kf * theta).cos())
                .sum::<f64>()
                * 2.0
                / n as f64,
        );
    }
    coeffs
}

impl GreenEvaluator {
    pub fn equilibrium(&self) -> &EquilibriumDensity {
        &self.eq
    }

    /// `log cap E`.
    pub fn robin(&self) -> f64 {
        self.robin
    }

    pub fn robin_crosscheck_spread(&self) -> f64 {
        self.robin_crosscheck_spread
    }

    /// Logarithmic capacity `exp(robin)`.
    pub fn capacity(&self) -> f64 {
        self.robin.exp()
    }

    /// `∫ log(z-t) dμ_E(t)` with the principal branch; analytic off `E`,
    /// imaginary part in `(0, pi)` for `Im z > 0`.
    pub fn complex_log_potential(&self, z: Complex64) -> Complex64 {
        let mut total = Complex64::new(0.0, 0.0);
        for (i, iv) in self.eq.set().intervals().iter().enumerate() {
            let (mid, half) = (iv.midpoint(), iv.half_width());
            let c = (z - mid) / half;
            let v = joukowski_exterior(c);
            let vinv = v.finv();
            let coeffs = &self.mode_coeffs[i];
            let mut acc = Complex64::new(half.ln(), 0.0) + (v / 2.0).ln();
            acc *= coeffs[0];
            let mut vk = Complex64::new(1.0, 0.0);
            for (k, &gk) in coeffs.iter().enumerate().skip(1) {
                vk *= vinv;
                acc -= gk * vk / k as f64;
            }
            total += std::f64::consts::PI * acc;
        }
        total
    }

    /// Real potential `∫ log|x-t| dμ_E(t)` through the explicit log-singular
    /// quadrature rule. Independent code path from the mode engine; used by
    /// Frostman-style cross checks.
    pub fn potential_on_axis(&self, x: f64) -> Result<f64> {
        let mut total = 0.0;
        for (i, iv) in self.eq.set().intervals().iter().enumerate() {
            total += integrate_log_sqrt_singular(
                |t| self.eq.smooth_density_part(i, t),
                iv.left,
                iv.right,
                x,
                DEFAULT_ORDER,
            )?
            .value;
        }
        Ok(total)
    }

    /// Unclamped `g(z) = ∫ log|z-t| dμ(t) - robin`; on `E` this is
    /// quadrature noise around zero.
    pub fn green_raw(&self, z: Complex64) -> f64 {
        self.complex_log_potential(z).re - self.robin
    }

    /// `g_Ω(z)` clamped to be nonnegative (downstream ratio probes need
    /// nonnegativity; the raw value stays available for diagnostics).
    pub fn green_value(&self, z: Complex64) -> f64 {
        self.green_raw(z).max(0.0)
    }

    /// Lemma-style singular integral `∫_R g(x)/(x-x0)^2 dx`: zero on `E`,
    /// gaps by direct quadrature, rays by geometric window doubling.
    pub fn lemma3_integral(&self, x0: f64) -> Result<QuadratureResult> {
        let set = self.eq.set();
        if !set.contains(x0) {
            return Err(Error::PointNotInSet(x0));
        }
        let hull_len = set.max() - set.min();
        let integrand = |x: f64| {
            let d = x - x0;
            self.green_value(Complex64::new(x, 0.0)) / (d * d)
        };

        let mut value = 0.0;
        let mut estimate = 0.0;
        let mut nodes = 0;
        for gap in set.gaps() {
            let r = integrate_smooth(integrand, gap.left, gap.right, DEFAULT_ORDER)?;
            value += r.value;
            estimate += r.error_estimate;
            nodes += r.nodes_used;
        }
        let tail_cfg = TailConfig {
            first_window: hull_len,
            tolerance: 1e-9,
            max_windows: 64,
            order: DEFAULT_ORDER,
        };
        let right = integrate_to_infinity(|s| integrand(set.max() + s), 0.0, tail_cfg)?;
        let left = integrate_to_infinity(|s| integrand(set.min() - s), 0.0, tail_cfg)?;
        value += right.value + left.value;
        estimate += right.error_estimate + left.error_estimate;
        nodes += right.nodes_used + left.nodes_used;
        Ok(QuadratureResult { value, error_estimate: estimate, nodes_used: nodes })
    }
}

/// Poisson integral of a bounded boundary function on the upper half-plane:
/// `(y/pi) ∫ boundary(x) / ((x-x0)^2 + y^2) dx`.
///
/// The central part substitutes `x = x0 + y tan(phi)`, which absorbs the
/// kernel exactly; the tails use window doubling.
pub fn poisson_halfplane(
    boundary: impl Fn(f64) -> f64,
    x0: f64,
    y: f64,
) -> Result<QuadratureResult> {
    if !(y > 0.0) {
        return Err(Error::InvalidParameter {
            name: "y",
            value: y,
            reason: "must be positive",
        });
    }
    let w = (8.0 * y).max(1.0);
    let phi_max = (w / y).atan();
    let central = integrate_smooth(
        |phi| boundary(x0 + y * phi.tan()),
        -phi_max,
        phi_max,
        DEFAULT_ORDER,
    )?;
    let kernel = |x: f64| {
        let d = x - x0;
        y / (d * d + y * y)
    };
    let tail_cfg = TailConfig {
        first_window: w,
        tolerance: 1e-13,
        max_windows: 64,
        order: 64,
    };
    let right = integrate_to_infinity(|s| boundary(x0 + w + s) * kernel(x0 + w + s), 0.0, tail_cfg)?;
    let left = integrate_to_infinity(|s| boundary(x0 - w - s) * kernel(x0 - w - s), 0.0, tail_cfg)?;
    let pi = std::f64::consts::PI;
    Ok(QuadratureResult {
        value: (central.value + right.value + left.value) / pi,
        error_estimate:
            (central.error_estimate + right.error_estimate + left.error_estimate) / pi,
        nodes_used: central.nodes_used + right.nodes_used + left.nodes_used,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::equilibrium::solve_gap_polynomial;
    use crate::set::RealCompactSet;
    use approx::assert_abs_diff_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    fn evaluator(pairs: Vec<(f64, f64)>) -> GreenEvaluator {
        let set = RealCompactSet::new(pairs).unwrap();
        let eq = solve_gap_polynomial(&set).unwrap();
        build_green(&eq).unwrap()
    }

    #[test]
    fn capacity_of_unit_segment() {
        let g = evaluator(vec![(-1.0, 1.0)]);
        assert_abs_diff_eq!(g.capacity(), 0.5, epsilon = 1e-8);
        assert!(g.robin_crosscheck_spread() <= 1e-7);
    }

    #[test]
    fn capacity_is_quarter_length() {
        let g = evaluator(vec![(0.0, 4.0)]);
        assert_abs_diff_eq!(g.capacity(), 1.0, epsilon = 1e-8);
    }

    #[test]
    fn capacity_symmetric_pair_closed_form() {
        // cap([-1,-a] ∪ [a,1]) = sqrt(1-a^2)/2
        let g = evaluator(vec![(-1.0, -0.5), (0.5, 1.0)]);
        assert_abs_diff_eq!(g.capacity(), 0.75f64.sqrt() / 2.0, epsilon = 1e-6);
        assert!(g.robin_crosscheck_spread() <= 1e-7);
    }

    #[test]
    fn green_matches_segment_closed_form() {
        // g(z) = log|z + sqrt(z^2 - 1)| for E = [-1,1].
        let g = evaluator(vec![(-1.0, 1.0)]);
        assert_abs_diff_eq!(
            g.green_value(Complex64::new(0.0, 1.0)),
            (1.0 + 2.0f64.sqrt()).ln(),
            epsilon = 1e-10
        );
        assert_abs_diff_eq!(
            g.green_value(Complex64::new(2.0, 0.0)),
            (2.0 + 3.0f64.sqrt()).ln(),
            epsilon = 1e-10
        );
    }

    #[test]
    fn green_vanishes_on_set() {
        let g = evaluator(vec![(-1.0, 1.0)]);
        assert_eq!(g.green_value(Complex64::new(0.3, 0.0)), 0.0);
        for &x in &[-0.9, 0.0, 0.77, 1.0] {
            assert!(g.green_raw(Complex64::new(x, 0.0)).abs() <= 1e-10);
        }
    }

    #[test]
    fn frostman_probes_match_robin() {
        let g = evaluator(vec![(-1.0, -0.5), (0.5, 1.0)]);
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..5 {
            let iv = g.eq.set().intervals()[rng.random_range(0..2)];
            let x = iv.left + rng.random_range(0.05..0.95) * iv.length();
            let u = g.potential_on_axis(x).unwrap();
            assert!((u - g.robin()).abs() <= 1e-7, "potential drift at {x}");
        }
    }

    #[test]
    fn asymptotics_at_large_z() {
        let g = evaluator(vec![(0.0, 1.0), (2.0, 4.0)]);
        for &z in &[
            Complex64::new(1e6, 0.0),
            Complex64::new(0.0, 1e6),
            Complex64::new(-7e5, 7e5),
        ] {
            let expected = z.norm().ln() - g.robin();
            assert_abs_diff_eq!(g.green_value(z), expected, epsilon = 1e-5);
        }
    }

    #[test]
    fn reflection_symmetry() {
        let g = evaluator(vec![(0.0, 1.0), (2.0, 4.0)]);
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..50 {
            let z = Complex64::new(rng.random_range(-3.0..6.0), rng.random_range(0.01..3.0));
            assert_abs_diff_eq!(g.green_value(z), g.green_value(z.conj()), epsilon = 1e-12);
        }
    }

    #[test]
    fn positivity_off_set() {
        let g = evaluator(vec![(-1.0, -0.5), (0.5, 1.0)]);
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let mut checked = 0;
        while checked < 100 {
            let z = Complex64::new(rng.random_range(-2.0..2.0), rng.random_range(-1.5..1.5));
            if z.im.abs() < 1e-3 {
                continue;
            }
            assert!(g.green_value(z) > 0.0, "g not positive at {z}");
            checked += 1;
        }
    }

    #[test]
    fn monotone_under_set_growth() {
        let set = RealCompactSet::new(vec![(-1.0, -0.1), (0.1, 1.0)]).unwrap();
        let bigger = set.dilate(0.2, 0.15).unwrap();
        let g_small = build_green(&solve_gap_polynomial(&set).unwrap()).unwrap();
        let g_big = build_green(&solve_gap_polynomial(&bigger).unwrap()).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for _ in 0..100 {
            let z = Complex64::new(rng.random_range(-2.0..2.0), rng.random_range(0.01..2.0));
            assert!(g_big.green_value(z) <= g_small.green_value(z) + 1e-10);
        }
    }

    #[test]
    fn lemma3_classical_value() {
        // ∫ g(x)/x^2 dx over |x|>1 equals pi for E = [-1,1], x0 = 0.
        let g = evaluator(vec![(-1.0, 1.0)]);
        let r = g.lemma3_integral(0.0).unwrap();
        assert_abs_diff_eq!(r.value, PI, epsilon = 1e-3);
    }

    #[test]
    fn lemma3_two_interval_converges() {
        let g = evaluator(vec![(-1.0, -0.5), (0.5, 1.0)]);
        let r = g.lemma3_integral(0.75).unwrap();
        assert!(r.value.is_finite() && r.value > 0.0);
        assert!(r.error_estimate < 1e-4);
    }

    #[test]
    fn lemma3_requires_membership() {
        let g = evaluator(vec![(-1.0, -0.5), (0.5, 1.0)]);
        assert!(matches!(g.lemma3_integral(0.0), Err(Error::PointNotInSet(_))));
    }

    #[test]
    fn poisson_kernel_mass() {
        let r = poisson_halfplane(|_| 1.0, 0.3, 0.7).unwrap();
        assert_abs_diff_eq!(r.value, 1.0, epsilon = 1e-10);
        let zero = poisson_halfplane(|_| 0.0, 0.0, 1.0).unwrap();
        assert_eq!(zero.value, 0.0);
    }

    #[test]
    fn poisson_lorentzian_extension() {
        // Harmonic extension of 1/(1+x^2) is (y+1)/(x^2+(y+1)^2).
        let r = poisson_halfplane(|x| 1.0 / (1.0 + x * x), 0.0, 1.0).unwrap();
        assert_abs_diff_eq!(r.value, 0.5, epsilon = 1e-8);
    }

    #[test]
    fn mode_engine_agrees_with_log_rule_on_axis() {
        // Two code paths for the same potential: cosine-mode engine vs the
        // explicit log-singular quadrature.
        let g = evaluator(vec![(0.0, 1.0), (2.0, 4.0)]);
        for &x in &[0.5, 1.3, 3.0, 4.5, -0.7] {
            let engine = g.complex_log_potential(Complex64::new(x, 0.0)).re;
            let rule = g.potential_on_axis(x).unwrap();
            assert_abs_diff_eq!(engine, rule, epsilon = 1e-11);
        }
    }

    #[test]
    fn near_axis_evaluation_scales_linearly() {
        // g(x0 + iy) ≈ h*y for small y; the mode engine must not lose this
        // under cancellation even at y = 1e-7.
        let g = evaluator(vec![(-1.0, 1.0)]);
        for &y in &[1e-3, 1e-5, 1e-7] {
            let val = g.green_value(Complex64::new(0.0, y));
            assert!((val / y - 1.0).abs() < 1e-3, "g(iy)/y = {} at y={y}", val / y);
        }
    }
}
