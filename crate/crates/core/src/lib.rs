//! Potential theory on finite unions of real intervals: equilibrium
//! measures, Green's functions with pole at infinity, the comb-domain
//! conformal map, the pointwise Bernstein factor `h(x0, E)`, and
//! near-extremal polynomials from a discretized semi-infinite linear
//! program.
//!
//! Pipeline: [`set::RealCompactSet`] → [`equilibrium::solve_gap_polynomial`]
//! → [`green::build_green`], then the `comb`, `bernstein` and `extremal`
//! modules evaluate on top of the solved state. Everything is deterministic
//! and value-semantic; evaluators are immutable and thread-shareable.

pub mod bernstein;
pub mod comb;
pub mod equilibrium;
pub mod error;
pub mod extrapolate;
pub mod extremal;
pub mod green;
mod linalg;
pub mod quadrature;
pub mod set;
pub mod simplex;
pub mod verify;

pub use bernstein::{
    bernstein_report, dilation_limit, interior_density_factor, lipschitz_probe,
    normal_derivative, BernsteinReport, LipschitzClass, LipschitzVerdict,
};
pub use comb::{angular_derivative_probe, base_point, comb_value, AngularProbe, CombValue};
pub use equilibrium::{solve_gap_polynomial, EquilibriumDensity};
pub use error::{Error, ErrorKind, Result};
pub use extremal::{
    bernstein_bound_check, extremal_polynomial, sup_norm, ExtremalResult, Polynomial,
};
pub use green::{build_green, poisson_halfplane, GreenEvaluator};
pub use quadrature::QuadratureResult;
pub use set::{PointLocation, RealCompactSet, SetPoint};
pub use verify::{run_verify, CheckResult, Tolerances};
