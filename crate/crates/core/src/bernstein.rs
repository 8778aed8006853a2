//! The Bernstein factor `h(x0, E) = ∂g_Ω(x0)/∂n` by three routes — a
//! finite-difference ladder on the Green's function, the interior density
//! formula `pi ω(x0)`, and the comb-map angular derivative — plus the
//! dilation limit `h(x0, E_δ) → h(x0, E)` and the Lipschitz-condition
//! probe for `limsup g(z)/|z-x0|`.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::comb::angular_derivative_probe;
use crate::equilibrium::{solve_gap_polynomial, EquilibriumDensity};
use crate::error::{Error, Result};
use crate::extrapolate::richardson;
use crate::green::{build_green, GreenEvaluator};
use crate::set::RealCompactSet;

/// Relative Cauchy-tail tolerance for the finite-difference ladder.
pub const LADDER_TAIL_TOLERANCE: f64 = 1e-6;

/// Ceiling on the relative spread between the three `h` routes.
pub const H_SPREAD_TOLERANCE: f64 = 1e-3;

/// Ladder top `y = 1e-2`, halved 16 times (`y_min ≈ 1.5e-7`); three
/// Richardson stages remove the `O(y)` and `O(y^2)` terms.
const LADDER_TOP: f64 = 1e-2;
const LADDER_STEPS: usize = 17;

/// Default radii for the Lipschitz probe and the window width used for the
/// power-law fit.
const PROBE_RADII_TOP: f64 = 1e-1;
const PROBE_RADII_COUNT: usize = 10;
const FIT_WINDOW: usize = 4;
const SLOPE_CONSISTENCY: f64 = 0.15;

/// Verdict of the Lipschitz probe.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LipschitzClass {
    Lipschitz,
    NonLipschitz,
    Inconclusive,
}

impl LipschitzClass {
    pub fn as_str(&self) -> &'static str {
        match self {
            LipschitzClass::Lipschitz => "lipschitz",
            LipschitzClass::NonLipschitz => "non_lipschitz",
            LipschitzClass::Inconclusive => "inconclusive",
        }
    }
}

/// Ratio table `max |z-x0|=r of g(z)/r` per radius, with the fitted growth
/// exponent over the last window.
#[derive(Debug, Clone, PartialEq)]
pub struct LipschitzVerdict {
    pub ratios: Vec<(f64, f64)>,
    pub verdict: LipschitzClass,
    pub exponent_estimate: f64,
}

/// Everything the `bernstein` surface reports for one point.
#[derive(Debug, Clone, PartialEq)]
pub struct BernsteinReport {
    pub x0: f64,
    pub h_normal: f64,
    pub h_density: f64,
    pub h_comb: f64,
    pub consistency_spread: f64,
    pub delta_table: Vec<(f64, f64)>,
    pub lipschitz: LipschitzVerdict,
}

/// Normal derivative of the Green's function at `x0 ∈ E`: Richardson limit
/// of `g(x0+iy)/y` on the geometric ladder. Ladders that do not settle
/// (interval endpoints, non-Lipschitz points) are rejected.
pub fn normal_derivative(green: &GreenEvaluator, x0: f64) -> Result<f64> {
    if !green.equilibrium().set().contains(x0) {
        return Err(Error::PointNotInSet(x0));
    }
    let quotients: Vec<f64> = (0..LADDER_STEPS)
        .map(|k| {
            let y = LADDER_TOP * 0.5f64.powi(k as i32);
            green.green_raw(Complex64::new(x0, y)) / y
        })
        .collect();
    let limit = richardson(&quotients, 2.0, 3);
    if !(limit.tail <= LADDER_TAIL_TOLERANCE) || !limit.value.is_finite() || limit.value <= 0.0 {
        return Err(Error::LadderNotCauchy(limit.tail));
    }
    Ok(limit.value)
}

/// Interior-point route: `h(x0, E) = pi ω(x0)`.
pub fn interior_density_factor(eq: &EquilibriumDensity, x0: f64) -> Result<f64> {
    Ok(std::f64::consts::PI * eq.density(x0)?)
}

/// Re-solves the whole pipeline on each dilation `E_δ = E ∪ [x0-δ, x0+δ]`
/// and returns `(δ, h(x0, E_δ))` in input order. Branches are independent
/// and run in parallel.
pub fn dilation_limit(
    set: &RealCompactSet,
    x0: f64,
    deltas: &[f64],
) -> Result<Vec<(f64, f64)>> {
    if !set.contains(x0) {
        return Err(Error::PointNotInSet(x0));
    }
    deltas
        .par_iter()
        .map(|&delta| {
            let dilated = set.dilate(x0, delta)?;
            let eq = solve_gap_polynomial(&dilated)?;
            let green = build_green(&eq)?;
            Ok((delta, normal_derivative(&green, x0)?))
        })
        .collect()
}

/// Samples `g(z)/|z-x0|` on upper semicircles of the given radii (17 angles
/// each) and classifies the growth: bounded ratios mean `x0` is a Lipschitz
/// point, a consistent negative power law means it is not.
pub fn lipschitz_probe(
    green: &GreenEvaluator,
    x0: f64,
    radii: &[f64],
) -> Result<LipschitzVerdict> {
    if !green.equilibrium().set().contains(x0) {
        return Err(Error::PointNotInSet(x0));
    }
    if radii.len() < 2 || radii.windows(2).any(|w| w[1] >= w[0]) || radii[radii.len() - 1] <= 0.0
    {
        return Err(Error::InvalidParameter {
            name: "radii",
            value: radii.len() as f64,
            reason: "need at least two decreasing positive radii",
        });
    }
    let pi = std::f64::consts::PI;
    let ratios: Vec<(f64, f64)> = radii
        .iter()
        .map(|&r| {
            let max_ratio = (0..17)
                .map(|j| {
                    let theta = pi * j as f64 / 16.0;
                    let z = Complex64::new(x0 + r * theta.cos(), r * theta.sin());
                    green.green_value(z) / r
                })
                .fold(0.0f64, f64::max);
            (r, max_ratio)
        })
        .collect();

    // Growth exponent over the smallest radii: mean of consecutive
    // log-log slopes.
    let window = &ratios[ratios.len().saturating_sub(FIT_WINDOW)..];
    let slopes: Vec<f64> = window
        .windows(2)
        .map(|w| ((w[1].1 / w[0].1).ln()) / ((w[1].0 / w[0].0).ln()))
        .collect();
    let exponent_estimate = slopes.iter().sum::<f64>() / slopes.len() as f64;

    let first = ratios[0].1;
    let last = ratios[ratios.len() - 1].1;
    let verdict = if first > 0.0 && last / first <= 2.0 {
        LipschitzClass::Lipschitz
    } else if exponent_estimate < 0.0
        && slopes
            .iter()
            .all(|s| (s - exponent_estimate).abs() <= SLOPE_CONSISTENCY)
    {
        LipschitzClass::NonLipschitz
    } else {
        LipschitzClass::Inconclusive
    };
    Ok(LipschitzVerdict { ratios, verdict, exponent_estimate })
}

/// Geometric default radii for the probe.
pub fn default_probe_radii() -> Vec<f64> {
    (0..PROBE_RADII_COUNT)
        .map(|k| PROBE_RADII_TOP * 0.5f64.powi(k as i32))
        .collect()
}

/// Assembles the full report: all three `h` routes, their spread, the
/// dilation table and the Lipschitz verdict.
pub fn bernstein_report(
    set: &RealCompactSet,
    x0: f64,
    deltas: &[f64],
) -> Result<BernsteinReport> {
    let eq = solve_gap_polynomial(set)?;
    let green = build_green(&eq)?;
    let lipschitz = lipschitz_probe(&green, x0, &default_probe_radii())?;
    let h_normal = normal_derivative(&green, x0)?;
    let h_density = interior_density_factor(&eq, x0)?;
    let h_comb = angular_derivative_probe(&green, x0, 1e-6, 1e-2, 15)?.extrapolated;
    let hs = [h_normal, h_density, h_comb];
    let max = hs.iter().copied().fold(f64::MIN, f64::max);
    let min = hs.iter().copied().fold(f64::MAX, f64::min);
    let consistency_spread = (max - min) / max;
    let delta_table = dilation_limit(set, x0, deltas)?;
    Ok(BernsteinReport {
        x0,
        h_normal,
        h_density,
        h_comb,
        consistency_spread,
        delta_table,
        lipschitz,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn pipeline(pairs: Vec<(f64, f64)>) -> (EquilibriumDensity, GreenEvaluator) {
        let set = RealCompactSet::new(pairs).unwrap();
        let eq = solve_gap_polynomial(&set).unwrap();
        let green = build_green(&eq).unwrap();
        (eq, green)
    }

    #[test]
    fn classical_weight_on_segment() {
        let (_, green) = pipeline(vec![(-1.0, 1.0)]);
        assert_abs_diff_eq!(normal_derivative(&green, 0.0).unwrap(), 1.0, epsilon = 1e-5);
        assert_abs_diff_eq!(
            normal_derivative(&green, 0.5).unwrap(),
            1.1547005,
            epsilon = 1e-5
        );
    }

    #[test]
    fn density_route_examples() {
        let (eq, _) = pipeline(vec![(-1.0, 1.0)]);
        assert_abs_diff_eq!(interior_density_factor(&eq, 0.0).unwrap(), 1.0, epsilon = 1e-10);
        assert_abs_diff_eq!(
            interior_density_factor(&eq, 0.5).unwrap(),
            1.1547005,
            epsilon = 1e-6
        );
        // Closed form for the symmetric pair at x0 = 3/4: h = 12/sqrt(35).
        let h_expected = 12.0 / 35.0f64.sqrt();
        let (eq2, green2) = pipeline(vec![(-1.0, -0.5), (0.5, 1.0)]);
        assert_abs_diff_eq!(
            interior_density_factor(&eq2, 0.75).unwrap(),
            h_expected,
            epsilon = 1e-9
        );
        assert_abs_diff_eq!(
            normal_derivative(&green2, 0.75).unwrap(),
            h_expected,
            epsilon = 2e-5
        );
    }

    #[test]
    fn ladder_diverges_at_endpoints() {
        for pairs in [vec![(-1.0, 1.0)], vec![(-1.0, -0.5), (0.5, 1.0)]] {
            let (_, green) = pipeline(pairs);
            let endpoints: Vec<f64> = green
                .equilibrium()
                .set()
                .intervals()
                .iter()
                .flat_map(|iv| [iv.left, iv.right])
                .collect();
            for e in endpoints {
                assert!(
                    matches!(normal_derivative(&green, e), Err(Error::LadderNotCauchy(_))),
                    "ladder settled at endpoint {e}"
                );
            }
        }
    }

    #[test]
    fn three_routes_agree() {
        let cases = [
            (vec![(-1.0, 1.0)], 0.3),
            (vec![(-1.0, -0.5), (0.5, 1.0)], 0.75),
            (vec![(0.0, 1.0), (2.0, 4.0)], 3.0),
        ];
        for (pairs, x0) in cases {
            let set = RealCompactSet::new(pairs).unwrap();
            let report = bernstein_report(&set, x0, &[0.05, 0.01]).unwrap();
            assert!(
                report.consistency_spread <= H_SPREAD_TOLERANCE,
                "spread {} at x0={x0}",
                report.consistency_spread
            );
            assert_eq!(report.lipschitz.verdict, LipschitzClass::Lipschitz);
        }
    }

    #[test]
    fn dilation_absorbed_is_identity() {
        let set = RealCompactSet::new(vec![(-1.0, 1.0)]).unwrap();
        let table = dilation_limit(&set, 0.0, &[0.1]).unwrap();
        let (_, green) = pipeline(vec![(-1.0, 1.0)]);
        let h = normal_derivative(&green, 0.0).unwrap();
        assert_abs_diff_eq!(table[0].1, h, epsilon = 1e-12);
    }

    #[test]
    fn dilation_sequence_monotone_and_settling() {
        let set = RealCompactSet::new(vec![(-1.0, -0.1), (0.1, 1.0)]).unwrap();
        let x0 = 0.2;
        let (_, green) = pipeline(vec![(-1.0, -0.1), (0.1, 1.0)]);
        let h = normal_derivative(&green, x0).unwrap();
        let deltas = [0.15, 0.12, 0.11, 0.05];
        let table = dilation_limit(&set, x0, &deltas).unwrap();
        for w in table.windows(2) {
            assert!(w[1].1 >= w[0].1 - 1e-9, "h not nondecreasing as delta shrinks");
        }
        for &(delta, h_delta) in &table {
            assert!(h_delta <= h + 1e-9, "monotonicity violated at delta={delta}");
        }
        // delta = 0.05 is absorbed: exact recomputation of the same set.
        assert_abs_diff_eq!(table[3].1, h, epsilon = 1e-6);
    }

    #[test]
    fn bridged_dilation_strictly_smaller() {
        let set = RealCompactSet::new(vec![(-1.0, -0.5), (0.5, 1.0)]).unwrap();
        let (_, green) = pipeline(vec![(-1.0, -0.5), (0.5, 1.0)]);
        let h = normal_derivative(&green, 0.75).unwrap();
        let table = dilation_limit(&set, 0.75, &[2.0]).unwrap();
        assert!(table[0].1 < h, "strict domain monotonicity failed");
    }

    #[test]
    fn scaling_covariance() {
        // h(s x0 + c, s E + c) = h(x0, E)/s.
        let (_, green) = pipeline(vec![(-1.0, -0.5), (0.5, 1.0)]);
        let h = normal_derivative(&green, 0.75).unwrap();
        let (s, c) = (2.5, 0.7);
        let scaled: Vec<(f64, f64)> = [(-1.0, -0.5), (0.5, 1.0)]
            .iter()
            .map(|&(a, b)| (s * a + c, s * b + c))
            .collect();
        let (_, green_scaled) = pipeline(scaled);
        let h_scaled = normal_derivative(&green_scaled, s * 0.75 + c).unwrap();
        assert_abs_diff_eq!(h_scaled, h / s, epsilon = 1e-8);
    }

    #[test]
    fn lipschitz_interior_points() {
        let (_, green) = pipeline(vec![(-1.0, 1.0)]);
        let verdict = lipschitz_probe(&green, 0.0, &default_probe_radii()).unwrap();
        assert_eq!(verdict.verdict, LipschitzClass::Lipschitz);
        // Ratios hover near h = 1.
        for &(_, ratio) in &verdict.ratios {
            assert!(ratio > 0.5 && ratio < 1.5);
        }
    }

    #[test]
    fn endpoint_is_not_lipschitz() {
        // g(1+t) ~ sqrt(2t) near the right endpoint of [-1,1], so the
        // ratios grow like r^{-1/2}.
        let (_, green) = pipeline(vec![(-1.0, 1.0)]);
        let verdict = lipschitz_probe(&green, 1.0, &default_probe_radii()).unwrap();
        assert_eq!(verdict.verdict, LipschitzClass::NonLipschitz);
        assert!(
            verdict.exponent_estimate > -0.65 && verdict.exponent_estimate < -0.35,
            "exponent {}",
            verdict.exponent_estimate
        );
    }

    #[test]
    fn cantor_component_midpoint_is_lipschitz() {
        let set = RealCompactSet::cantor_generation(1.0 / 3.0, 2, (0.0, 1.0)).unwrap();
        let eq = solve_gap_polynomial(&set).unwrap();
        let green = build_green(&eq).unwrap();
        let verdict = lipschitz_probe(&green, 1.0 / 18.0, &default_probe_radii()).unwrap();
        assert_eq!(verdict.verdict, LipschitzClass::Lipschitz);
    }

    #[test]
    fn probe_requires_membership_and_sane_radii() {
        let (_, green) = pipeline(vec![(-1.0, -0.5), (0.5, 1.0)]);
        assert!(lipschitz_probe(&green, 0.0, &default_probe_radii()).is_err());
        assert!(lipschitz_probe(&green, 0.75, &[0.1]).is_err());
        assert!(lipschitz_probe(&green, 0.75, &[0.1, 0.2]).is_err());
    }
}
