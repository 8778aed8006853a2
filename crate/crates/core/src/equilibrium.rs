//! Equilibrium measure of a finite union of intervals.
//!
//! For `E = ∪ [a_i, b_i]` with `m` components the equilibrium density is
//! `ω(x) = |Q(x)| / (pi sqrt(|R(x)|))` where `R(x) = ∏ (x-a_i)(x-b_i)` and
//! `Q` is the monic polynomial of degree `m-1` fixed by the `m-1` gap
//! conditions `∫_gap Q(t)/sqrt(|R(t)|) dt = 0`. The conditions are linear in
//! the non-leading coefficients, so one dense solve replaces any nonlinear
//! search; total mass 1 is a consequence of monicity and is asserted, not
//! imposed.

use crate::error::{Error, Result};
use crate::linalg;
use crate::quadrature::{
    integrate_sqrt_singular, integrate_sqrt_singular_upto, DEFAULT_ORDER,
};
use crate::set::{PointLocation, RealCompactSet};

/// Tolerance for the build-time mass assertion.
pub const MASS_TOLERANCE: f64 = 1e-8;

/// A solved equilibrium density. Immutable after construction.
#[derive(Debug, Clone)]
pub struct EquilibriumDensity {
    set: RealCompactSet,
    /// Monic `Q` in powers of `s = t - center`, `q_coeffs[j]` multiplying
    /// `s^j`; length `m`, last entry 1.
    q_coeffs: Vec<f64>,
    /// Coefficients are expressed around the hull midpoint for conditioning.
    center: f64,
    interval_masses: Vec<f64>,
    mass_check: f64,
    gap_residuals: Vec<f64>,
}

/// Solves the gap conditions and packages the density.
pub fn solve_gap_polynomial(set: &RealCompactSet) -> Result<EquilibriumDensity> {
    let m = set.component_count();
    let center = set.hull().midpoint();

    let q_coeffs = if m == 1 {
        vec![1.0]
    } else {
        let gaps = set.gaps();
        // moments[k][j] = ∫_{gap k} (t-center)^j / sqrt(|R|) dt
        let mut moments = vec![vec![0.0; m]; m - 1];
        for (k, gap) in gaps.iter().enumerate() {
            for (j, slot) in moments[k].iter_mut().enumerate() {
                let f = |t: f64| {
                    (t - center).powi(j as i32) / rest_abs_sqrt_on_gap(set, k, t)
                };
                *slot = integrate_sqrt_singular(f, gap.left, gap.right, DEFAULT_ORDER)?.value;
            }
        }
        let a: Vec<Vec<f64>> = moments.iter().map(|row| row[..m - 1].to_vec()).collect();
        let b: Vec<f64> = moments.iter().map(|row| -row[m - 1]).collect();
        let mut q = linalg::solve(a, b)?;
        q.push(1.0);
        q
    };

    let mut density = EquilibriumDensity {
        set: set.clone(),
        q_coeffs,
        center,
        interval_masses: Vec::new(),
        mass_check: 0.0,
        gap_residuals: Vec::new(),
    };

    density.interval_masses = (0..m)
        .map(|i| density.interval_mass(i))
        .collect::<Result<Vec<_>>>()?;
    density.mass_check = density.interval_masses.iter().sum();
    if (density.mass_check - 1.0).abs() > MASS_TOLERANCE {
        return Err(Error::MassCheckFailed(density.mass_check));
    }
    density.gap_residuals = density.compute_gap_residuals()?;
    Ok(density)
}

/// `sqrt` of the nonvanishing part of `|R|` on gap `k`: all endpoint factors
/// except the two adjacent to the gap.
fn rest_abs_sqrt_on_gap(set: &RealCompactSet, k: usize, t: f64) -> f64 {
    let mut product = 1.0;
    for (i, iv) in set.intervals().iter().enumerate() {
        if i != k {
            product *= (t - iv.right).abs();
        }
        if i != k + 1 {
            product *= (t - iv.left).abs();
        }
    }
    product.sqrt()
}

impl EquilibriumDensity {
    pub fn set(&self) -> &RealCompactSet {
        &self.set
    }

    /// Monic gap polynomial coefficients in powers of `t - center()`.
    pub fn q_coeffs(&self) -> &[f64] {
        &self.q_coeffs
    }

    pub fn center(&self) -> f64 {
        self.center
    }

    /// Computed total mass (should be 1 up to quadrature noise).
    pub fn mass_check(&self) -> f64 {
        self.mass_check
    }

    /// Residuals of the solved gap conditions.
    pub fn gap_residuals(&self) -> &[f64] {
        &self.gap_residuals
    }

    /// `μ_E` of one component.
    pub fn interval_mass_of(&self, i: usize) -> f64 {
        self.interval_masses[i]
    }

    /// `Q(t)`, Horner in the shifted variable.
    pub fn q_eval(&self, t: f64) -> f64 {
        let s = t - self.center;
        self.q_coeffs.iter().rev().fold(0.0, |acc, &c| acc * s + c)
    }

    /// `sqrt(|∏_{j≠i} (t-a_j)(t-b_j)|)` — the part of the weight that stays
    /// smooth on interval `i`.
    pub fn rest_abs_sqrt_on_interval(&self, i: usize, t: f64) -> f64 {
        let mut product = 1.0;
        for (j, iv) in self.set.intervals().iter().enumerate() {
            if j != i {
                product *= (t - iv.left).abs() * (t - iv.right).abs();
            }
        }
        product.sqrt()
    }

    /// Smooth factor of the density on interval `i`:
    /// `ω(t) = smooth_density_part(i, t) / sqrt((t-a_i)(b_i-t))`.
    pub fn smooth_density_part(&self, i: usize, t: f64) -> f64 {
        self.q_eval(t).abs() / (std::f64::consts::PI * self.rest_abs_sqrt_on_interval(i, t))
    }

    fn interval_mass(&self, i: usize) -> Result<f64> {
        let iv = self.set.intervals()[i];
        Ok(integrate_sqrt_singular(
            |t| self.smooth_density_part(i, t),
            iv.left,
            iv.right,
            DEFAULT_ORDER,
        )?
        .value)
    }

    fn compute_gap_residuals(&self) -> Result<Vec<f64>> {
        self.set
            .gaps()
            .iter()
            .enumerate()
            .map(|(k, gap)| {
                let f = |t: f64| self.q_eval(t) / rest_abs_sqrt_on_gap(&self.set, k, t);
                Ok(integrate_sqrt_singular(f, gap.left, gap.right, DEFAULT_ORDER)?.value)
            })
            .collect()
    }

    /// Pointwise density `ω(x)`; defined for strictly interior `x` only
    /// (it diverges at endpoints and vanishes identically outside).
    pub fn density(&self, x: f64) -> Result<f64> {
        if self.set.classify_point(x).location != PointLocation::Interior {
            return Err(Error::DensityUndefined(x));
        }
        let i = self.set.containing_interval(x).expect("interior point");
        let iv = self.set.intervals()[i];
        Ok(self.smooth_density_part(i, x) / ((x - iv.left) * (iv.right - x)).sqrt())
    }

    /// `μ_E(E ∩ (-∞, x0])`, the equilibrium distribution function.
    pub fn cdf(&self, x0: f64) -> f64 {
        let mut total = 0.0;
        for (i, iv) in self.set.intervals().iter().enumerate() {
            if x0 >= iv.right {
                total += self.interval_masses[i];
            } else if x0 > iv.left {
                // Partial component: clip the cosine substitution at x0.
                let part = integrate_sqrt_singular_upto(
                    |t| self.smooth_density_part(i, t),
                    iv.left,
                    iv.right,
                    x0,
                    DEFAULT_ORDER,
                )
                .expect("clipped bounds are valid here");
                total += part.value;
            }
        }
        total.clamp(0.0, 1.0)
    }

    /// Roots of `Q`, one per gap, located by bisection on the sign change.
    /// Diagnostic representation of the gap polynomial.
    pub fn gap_roots(&self) -> Vec<f64> {
        self.set
            .gaps()
            .iter()
            .filter_map(|gap| {
                let (mut lo, mut hi) = (gap.left, gap.right);
                let (mut flo, fhi) = (self.q_eval(lo), self.q_eval(hi));
                if flo == 0.0 {
                    return Some(lo);
                }
                if fhi == 0.0 {
                    return Some(hi);
                }
                if flo.signum() == fhi.signum() {
                    return None;
                }
                for _ in 0..200 {
                    let mid = 0.5 * (lo + hi);
                    let fmid = self.q_eval(mid);
                    if fmid == 0.0 {
                        return Some(mid);
                    }
                    if fmid.signum() == flo.signum() {
                        lo = mid;
                        flo = fmid;
                    } else {
                        hi = mid;
                    }
                }
                Some(0.5 * (lo + hi))
            })
            .collect()
    }
}
