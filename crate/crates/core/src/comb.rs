//! The conformal map from the upper half-plane onto the comb domain:
//! `f(z) = i (∫ log(z-ζ) dμ_E(ζ) - log cap E)`, its boundary base point at
//! `x0`, and the vertical-ray angular-derivative probe.

use num_complex::Complex64;

use crate::equilibrium::EquilibriumDensity;
use crate::error::{Error, Result};
use crate::extrapolate::richardson;
use crate::green::GreenEvaluator;
use crate::quadrature::{joukowski_exterior, DEFAULT_ORDER};

/// Runtime guard for the identity `Im f(z) = g(z)`.
const IDENTITY_GUARD: f64 = 1e-7;

/// Relative tail tolerance for declaring the probe ladder Cauchy.
const PROBE_TAIL_TOLERANCE: f64 = 1e-5;

/// A point and its image under the comb map. `Im w` equals the Green's
/// function at `z`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CombValue {
    pub z: Complex64,
    pub w: Complex64,
}

/// Vertical-ray difference quotients of the comb map at `x0` and their
/// extrapolated limit (the Bernstein factor when `x0` is a Lipschitz point).
#[derive(Debug, Clone, PartialEq)]
pub struct AngularProbe {
    pub x0: f64,
    pub y_values: Vec<f64>,
    pub quotients: Vec<Complex64>,
    pub extrapolated: f64,
}

/// `f(z)` for `Im z > 0`, principal branch (`arg(z-t)` lands in `(0, pi)`
/// automatically for real `t`).
///
/// Two evaluation routes: away from the set the potential is summed
/// directly over Gauss–Chebyshev nodes with per-node complex logs; close to
/// the set that quadrature loses accuracy and the evaluator's cosine-mode
/// engine takes over. The identity `Im w = g(z)` is asserted on every call,
/// which cross-validates the two routes where they meet.
pub fn comb_value(green: &GreenEvaluator, z: Complex64) -> Result<CombValue> {
    if !(z.im > 0.0) {
        return Err(Error::NotUpperHalfPlane(z.im));
    }
    let potential = if well_separated(green, z) {
        node_log_potential(green, z)
    } else {
        green.complex_log_potential(z)
    };
    let w = Complex64::i() * (potential - green.robin());
    let g = green.green_value(z);
    let mismatch = (w.im - g).abs();
    if mismatch > IDENTITY_GUARD * g.abs().max(1.0) {
        return Err(Error::CombIdentityViolated(mismatch));
    }
    Ok(CombValue { z, w })
}

/// True when every component sees `z` outside a Bernstein ellipse wide
/// enough for the node quadrature to be spectrally converged.
fn well_separated(green: &GreenEvaluator, z: Complex64) -> bool {
    green.equilibrium().set().intervals().iter().all(|iv| {
        let c = (z - iv.midpoint()) / iv.half_width();
        joukowski_exterior(c).norm() >= 1.06
    })
}

fn node_log_potential(green: &GreenEvaluator, z: Complex64) -> Complex64 {
    let eq = green.equilibrium();
    let n = 2 * DEFAULT_ORDER;
    let pi = std::f64::consts::PI;
    let mut total = Complex64::new(0.0, 0.0);
    for (i, iv) in eq.set().intervals().iter().enumerate() {
        let (mid, half) = (iv.midpoint(), iv.half_width());
        let mut acc = Complex64::new(0.0, 0.0);
        for k in 1..=n {
            let theta = (2.0 * k as f64 - 1.0) * pi / (2.0 * n as f64);
            let t = mid + half * theta.cos();
            acc += (z - t).ln() * eq.smooth_density_part(i, t);
        }
        total += acc * pi / n as f64;
    }
    total
}

/// Boundary base point of the comb map at `x0 ∈ E`: the vertical-ray limit
/// `lim_{y→0+} f(x0+iy) = -pi μ_E(E ∩ [x0, +∞))`, computed from the
/// equilibrium distribution function rather than by taking the limit (the
/// ray limit stays available as a cross-check).
pub fn base_point(eq: &EquilibriumDensity, x0: f64) -> Result<f64> {
    if !eq.set().contains(x0) {
        return Err(Error::PointNotInSet(x0));
    }
    Ok(-std::f64::consts::PI * (1.0 - eq.cdf(x0)))
}

/// Samples the quotients `(f(x0+iy_k) - w0)/(i y_k)` on a geometric ladder
/// from `y_max` down to `y_min` and Richardson-extrapolates their real
/// parts. A non-Cauchy tail signals that the angular derivative does not
/// exist (the Lipschitz condition fails at `x0`).
pub fn angular_derivative_probe(
    green: &GreenEvaluator,
    x0: f64,
    y_min: f64,
    y_max: f64,
    levels: usize,
) -> Result<AngularProbe> {
    if !(y_min > 0.0 && y_min < y_max) {
        return Err(Error::InvalidParameter {
            name: "y_min",
            value: y_min,
            reason: "need 0 < y_min < y_max",
        });
    }
    if levels < 3 {
        return Err(Error::InvalidParameter {
            name: "levels",
            value: levels as f64,
            reason: "need at least 3 ladder levels",
        });
    }
    let w0 = base_point(green.equilibrium(), x0)?;
    let ratio = (y_max / y_min).powf(1.0 / (levels as f64 - 1.0));
    let mut y_values = Vec::with_capacity(levels);
    let mut quotients = Vec::with_capacity(levels);
    for k in 0..levels {
        let y = y_max / ratio.powi(k as i32);
        let f = comb_value(green, Complex64::new(x0, y))?.w;
        y_values.push(y);
        quotients.push((f - w0) / Complex64::new(0.0, y));
    }
    let re_parts: Vec<f64> = quotients.iter().map(|q| q.re).collect();
    let limit = richardson(&re_parts, ratio, 3);
    if !(limit.tail <= PROBE_TAIL_TOLERANCE) || !(limit.value > 0.0) {
        return Err(Error::LadderNotCauchy(limit.tail));
    }
    Ok(AngularProbe { x0, y_values, quotients, extrapolated: limit.value })
}
