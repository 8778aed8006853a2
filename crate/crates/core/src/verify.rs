//! One-shot verification suite: every module invariant with a measured
//! residual against its tolerance. The CLI `verify` command formats this;
//! check failures are report entries, not errors.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::bernstein::{
    bernstein_report, dilation_limit, interior_density_factor, normal_derivative,
};
use crate::equilibrium::solve_gap_polynomial;
use crate::error::{Error, Result};
use crate::extremal::{bernstein_bound_check, Polynomial};
use crate::green::{build_green, poisson_halfplane};
use crate::set::{PointLocation, RealCompactSet};

/// Central tolerance record; CLI flags override individual entries.
#[derive(Debug, Clone, Copy)]
pub struct Tolerances {
    /// Equilibrium mass deviation from 1.
    pub mass: f64,
    /// Robin constant cross-check spread.
    pub robin: f64,
    /// Relative spread between the three h routes.
    pub h_spread: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self { mass: 1e-8, robin: 1e-7, h_spread: 1e-3 }
    }
}

/// One verified invariant.
#[derive(Debug, Clone)]
pub struct CheckResult {
    pub name: String,
    pub residual: f64,
    pub tolerance: f64,
    pub pass: bool,
}

fn check(name: impl Into<String>, residual: f64, tolerance: f64) -> CheckResult {
    CheckResult { name: name.into(), residual, tolerance, pass: residual <= tolerance }
}

/// Runs the full suite on one set with the given interior probe points.
pub fn run_verify(
    set: &RealCompactSet,
    x0_list: &[f64],
    tol: Tolerances,
) -> Result<Vec<CheckResult>> {
    for &x0 in x0_list {
        if set.classify_point(x0).location != PointLocation::Interior {
            return Err(Error::PointNotInterior(x0));
        }
    }
    let eq = solve_gap_polynomial(set)?;
    let green = build_green(&eq)?;
    let hull = set.hull();
    let scale = 0.5 * hull.length();
    let mut results = Vec::new();

    results.push(check("equilibrium-mass", (eq.mass_check() - 1.0).abs(), tol.mass));

    let gap_residual = eq
        .gap_residuals()
        .iter()
        .fold(0.0f64, |acc, r| acc.max(r.abs()));
    results.push(check("gap-conditions", gap_residual, 1e-10));

    results.push(check("robin-crosscheck", green.robin_crosscheck_spread(), tol.robin));

    // Im f(z) = g(z) over seeded upper-half-plane points.
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    let mut identity_residual = 0.0f64;
    for _ in 0..100 {
        let z = Complex64::new(
            rng.random_range(hull.left - scale..hull.right + scale),
            rng.random_range(0.05 * scale..2.0 * scale),
        );
        let w = crate::comb::comb_value(&green, z)?.w;
        identity_residual = identity_residual.max((w.im - green.green_value(z)).abs());
    }
    results.push(check("comb-identity", identity_residual, 1e-8));

    // Reflection symmetry of the Green's function.
    let mut reflection = 0.0f64;
    for _ in 0..100 {
        let z = Complex64::new(
            rng.random_range(hull.left - scale..hull.right + scale),
            rng.random_range(0.01 * scale..2.0 * scale),
        );
        reflection = reflection.max((green.green_value(z) - green.green_value(z.conj())).abs());
    }
    results.push(check("green-reflection", reflection, 1e-12));

    // Three-route agreement at every probe point.
    for &x0 in x0_list {
        let report = bernstein_report(set, x0, &[0.1 * scale, 0.05 * scale])?;
        results.push(check(
            format!("three-route-h(x0={x0})"),
            report.consistency_spread,
            tol.h_spread,
        ));
    }

    // Theorem-2(i) check over random polynomials.
    let mut worst_violation = 0.0f64;
    for &x0 in x0_list {
        let h = interior_density_factor(&eq, x0)?;
        for _ in 0..200 {
            let degree = rng.random_range(1..=20usize);
            let coeffs: Vec<f64> =
                (0..=degree).map(|_| rng.random_range(-1.0..1.0)).collect();
            let p = Polynomial::new((hull.left, hull.right), coeffs);
            let margin = bernstein_bound_check(set, x0, &p, h);
            let norm = crate::extremal::sup_norm(set, &p);
            let normalized = margin / (h * degree as f64 * norm);
            worst_violation = worst_violation.max(-normalized);
        }
    }
    results.push(check("bernstein-bound", worst_violation, 1e-9));

    // Dilation monotonicity at the first probe point.
    if let Some(&x0) = x0_list.first() {
        let min_half = set
            .intervals()
            .iter()
            .map(|iv| iv.half_width())
            .fold(f64::INFINITY, f64::min);
        let deltas: Vec<f64> = [0.4, 0.2, 0.1, 0.05].iter().map(|d| d * min_half).collect();
        let h = normal_derivative(&green, x0)?;
        let table = dilation_limit(set, x0, &deltas)?;
        let mut violation = 0.0f64;
        for &(_, h_delta) in &table {
            violation = violation.max(h_delta - h);
        }
        for w in table.windows(2) {
            violation = violation.max(w[0].1 - w[1].1);
        }
        results.push(check("dilation-monotonicity", violation, 1e-9));
    }

    // Scaling covariance of h under x -> s x + c.
    if let Some(&x0) = x0_list.first() {
        let (s, c) = (2.0, 0.5);
        let scaled_pairs: Vec<(f64, f64)> = set
            .intervals()
            .iter()
            .map(|iv| (s * iv.left + c, s * iv.right + c))
            .collect();
        let scaled = RealCompactSet::new(scaled_pairs)?;
        let scaled_green = build_green(&solve_gap_polynomial(&scaled)?)?;
        let h = normal_derivative(&green, x0)?;
        let h_scaled = normal_derivative(&scaled_green, s * x0 + c)?;
        results.push(check("scaling-covariance", (h_scaled - h / s).abs(), 1e-8));
    }

    // Poisson oracle: harmonic extension of 1/(1+x^2) at i is 1/2.
    let poisson = poisson_halfplane(|x| 1.0 / (1.0 + x * x), 0.0, 1.0)?;
    results.push(check("poisson-oracle", (poisson.value - 0.5).abs(), 1e-8));

    Ok(results)
}
