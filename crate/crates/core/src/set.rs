//! Compact subsets of the real line represented as finite unions of closed
//! intervals.
//!
//! The representation is canonical: intervals are sorted, pairwise disjoint
//! and nondegenerate. Single points are rejected at construction time (they
//! are polar and carry no equilibrium measure), so every representable set
//! is non-polar and regular for the Dirichlet problem.

use serde::Deserialize;

use crate::error::{Error, Result};

/// One closed interval `[left, right]` with `left < right`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    pub left: f64,
    pub right: f64,
}

impl Interval {
    pub fn midpoint(&self) -> f64 {
        0.5 * (self.left + self.right)
    }

    pub fn half_width(&self) -> f64 {
        0.5 * (self.right - self.left)
    }

    pub fn length(&self) -> f64 {
        self.right - self.left
    }

    pub fn contains(&self, x: f64) -> bool {
        self.left <= x && x <= self.right
    }
}

/// A finite union of disjoint nondegenerate closed intervals, kept in
/// canonical (sorted, merged) form.
#[derive(Debug, Clone, PartialEq)]
pub struct RealCompactSet {
    intervals: Vec<Interval>,
}

/// Where a point sits relative to a set.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PointLocation {
    Interior,
    Endpoint,
    Gap,
    OutsideHull,
}

impl PointLocation {
    pub fn as_str(&self) -> &'static str {
        match self {
            PointLocation::Interior => "interior",
            PointLocation::Endpoint => "endpoint",
            PointLocation::Gap => "gap",
            PointLocation::OutsideHull => "outside-hull",
        }
    }
}

/// A classified point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SetPoint {
    pub x: f64,
    pub location: PointLocation,
}

#[derive(Deserialize)]
struct SetDescriptor {
    intervals: Vec<[f64; 2]>,
}

impl RealCompactSet {
    /// Builds a canonical set from raw `(left, right)` pairs. Overlapping or
    /// touching pairs are merged; a pair that stays degenerate after merging
    /// is an error.
    pub fn new(pairs: Vec<(f64, f64)>) -> Result<Self> {
        if pairs.is_empty() {
            return Err(Error::EmptySet);
        }
        let mut raw: Vec<Interval> = Vec::with_capacity(pairs.len());
        for (a, b) in pairs {
            if !a.is_finite() || !b.is_finite() || a > b {
                return Err(Error::InvalidInterval(a, b));
            }
            raw.push(Interval { left: a, right: b });
        }
        raw.sort_by(|p, q| p.left.total_cmp(&q.left));

        let mut merged: Vec<Interval> = Vec::with_capacity(raw.len());
        for iv in raw {
            match merged.last_mut() {
                // Touching intervals merge as well: canonical form keeps
                // every gap open and nonempty.
                Some(last) if iv.left <= last.right => {
                    last.right = last.right.max(iv.right);
                }
                _ => merged.push(iv),
            }
        }
        for iv in &merged {
            if iv.left >= iv.right {
                return Err(Error::DegenerateInterval(iv.left, iv.right));
            }
        }
        Ok(Self { intervals: merged })
    }

    /// Parses the JSON descriptor `{"intervals": [[a,b], ...]}`.
    pub fn parse(text: &str) -> Result<Self> {
        let descriptor: SetDescriptor =
            serde_json::from_str(text).map_err(|e| Error::MalformedJson(e.to_string()))?;
        Self::new(descriptor.intervals.into_iter().map(|p| (p[0], p[1])).collect())
    }

    /// Serializes back to the JSON descriptor, intervals ascending, numbers
    /// with 17 significant digits.
    pub fn to_json(&self) -> String {
        let body: Vec<String> = self
            .intervals
            .iter()
            .map(|iv| format!("[{},{}]", fmt_g17(iv.left), fmt_g17(iv.right)))
            .collect();
        format!("{{\"intervals\":[{}]}}", body.join(","))
    }

    pub fn intervals(&self) -> &[Interval] {
        &self.intervals
    }

    pub fn component_count(&self) -> usize {
        self.intervals.len()
    }

    pub fn min(&self) -> f64 {
        self.intervals[0].left
    }

    pub fn max(&self) -> f64 {
        self.intervals[self.intervals.len() - 1].right
    }

    /// Hull `[min, max]` as an interval.
    pub fn hull(&self) -> Interval {
        Interval { left: self.min(), right: self.max() }
    }

    /// Gaps between consecutive intervals, in order.
    pub fn gaps(&self) -> Vec<Interval> {
        self.intervals
            .windows(2)
            .map(|w| Interval { left: w[0].right, right: w[1].left })
            .collect()
    }

    /// Closed-interval membership, exact comparisons on the stored bounds.
    pub fn contains(&self, x: f64) -> bool {
        self.intervals.iter().any(|iv| iv.contains(x))
    }

    /// Classifies `x` by direct scan.
    pub fn classify_point(&self, x: f64) -> SetPoint {
        let location = if x < self.min() || x > self.max() {
            PointLocation::OutsideHull
        } else if self
            .intervals
            .iter()
            .any(|iv| iv.left == x || iv.right == x)
        {
            PointLocation::Endpoint
        } else if self.intervals.iter().any(|iv| iv.left < x && x < iv.right) {
            PointLocation::Interior
        } else {
            PointLocation::Gap
        };
        SetPoint { x, location }
    }

    /// Index of the interval containing `x`, if any.
    pub fn containing_interval(&self, x: f64) -> Option<usize> {
        self.intervals.iter().position(|iv| iv.contains(x))
    }

    /// The union `E ∪ [x0-delta, x0+delta]` in canonical form.
    pub fn dilate(&self, x0: f64, delta: f64) -> Result<Self> {
        if !self.contains(x0) {
            return Err(Error::PointNotInSet(x0));
        }
        if !(delta > 0.0) {
            return Err(Error::InvalidParameter {
                name: "delta",
                value: delta,
                reason: "must be positive",
            });
        }
        let mut pairs: Vec<(f64, f64)> =
            self.intervals.iter().map(|iv| (iv.left, iv.right)).collect();
        pairs.push((x0 - delta, x0 + delta));
        Self::new(pairs)
    }

    /// Generation-`k` prefix of the Cantor construction with the given
    /// length ratio on `hull = (a, b)`: `2^k` intervals of length
    /// `ratio^k * (b - a)`.
    pub fn cantor_generation(ratio: f64, k: u32, hull: (f64, f64)) -> Result<Self> {
        if !(ratio > 0.0 && ratio < 0.5) {
            return Err(Error::InvalidCantorRatio(ratio));
        }
        let (a, b) = hull;
        if !(a < b) || !a.is_finite() || !b.is_finite() {
            return Err(Error::InvalidInterval(a, b));
        }
        let mut pairs = vec![(a, b)];
        for _ in 0..k {
            pairs = pairs
                .into_iter()
                .flat_map(|(l, r)| {
                    let len = r - l;
                    [(l, l + ratio * len), (r - ratio * len, r)]
                })
                .collect();
        }
        Self::new(pairs)
    }

    /// Distance from `x` to the nearest interval endpoint.
    pub fn distance_to_endpoints(&self, x: f64) -> f64 {
        self.intervals
            .iter()
            .flat_map(|iv| [(x - iv.left).abs(), (x - iv.right).abs()])
            .fold(f64::INFINITY, f64::min)
    }

    /// Set inclusion, interval-wise.
    pub fn is_subset_of(&self, other: &Self) -> bool {
        self.intervals
            .iter()
            .all(|iv| other.intervals.iter().any(|o| o.left <= iv.left && iv.right <= o.right))
    }
}

/// Formats a float with 17 significant digits (round-trip exact for f64).
pub fn fmt_g17(x: f64) -> String {
    if x == x.trunc() && x.abs() < 1e15 {
        // Keep integral values readable; they round-trip exactly.
        format!("{:.1}", x)
    } else {
        format!("{:.16e}", x)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pairs(set: &RealCompactSet) -> Vec<(f64, f64)> {
        set.intervals().iter().map(|iv| (iv.left, iv.right)).collect()
    }

    fn assert_pairs_close(set: &RealCompactSet, expected: &[(f64, f64)]) {
        let got = pairs(set);
        assert_eq!(got.len(), expected.len(), "{got:?} vs {expected:?}");
        for ((gl, gr), (el, er)) in got.iter().zip(expected) {
            assert!((gl - el).abs() < 1e-14 && (gr - er).abs() < 1e-14, "{got:?} vs {expected:?}");
        }
    }

    #[test]
    fn parse_identity_case() {
        let set = RealCompactSet::parse(r#"{"intervals":[[-1,1]]}"#).unwrap();
        assert_eq!(pairs(&set), vec![(-1.0, 1.0)]);
    }

    #[test]
    fn parse_merges_overlap() {
        let set = RealCompactSet::parse(r#"{"intervals":[[0,0.5],[0.4,1]]}"#).unwrap();
        assert_eq!(pairs(&set), vec![(0.0, 1.0)]);
    }

    #[test]
    fn parse_sorts() {
        let set = RealCompactSet::parse(r#"{"intervals":[[0.1,1],[-1,-0.1]]}"#).unwrap();
        assert_eq!(pairs(&set), vec![(-1.0, -0.1), (0.1, 1.0)]);
    }

    #[test]
    fn touching_intervals_merge() {
        let set = RealCompactSet::new(vec![(0.0, 1.0), (1.0, 2.0)]).unwrap();
        assert_eq!(pairs(&set), vec![(0.0, 2.0)]);
    }

    #[test]
    fn degenerate_point_absorbed_by_merge() {
        let set = RealCompactSet::new(vec![(0.0, 1.0), (0.5, 0.5)]).unwrap();
        assert_eq!(pairs(&set), vec![(0.0, 1.0)]);
    }

    #[test]
    fn standalone_point_rejected() {
        assert_eq!(
            RealCompactSet::new(vec![(0.0, 1.0), (2.0, 2.0)]),
            Err(Error::DegenerateInterval(2.0, 2.0))
        );
    }

    #[test]
    fn empty_rejected() {
        assert_eq!(RealCompactSet::new(vec![]), Err(Error::EmptySet));
        assert_eq!(
            RealCompactSet::parse(r#"{"intervals":[]}"#),
            Err(Error::EmptySet)
        );
    }

    #[test]
    fn malformed_json_rejected() {
        assert!(matches!(
            RealCompactSet::parse("not json"),
            Err(Error::MalformedJson(_))
        ));
        assert!(matches!(
            RealCompactSet::parse(r#"{"intrevals":[[0,1]]}"#),
            Err(Error::MalformedJson(_))
        ));
    }

    #[test]
    fn reversed_bounds_rejected() {
        assert_eq!(
            RealCompactSet::new(vec![(1.0, 0.0)]),
            Err(Error::InvalidInterval(1.0, 0.0))
        );
    }

    #[test]
    fn dilate_absorbed() {
        let e = RealCompactSet::new(vec![(-1.0, 1.0)]).unwrap();
        let d = e.dilate(0.0, 0.1).unwrap();
        assert_eq!(d, e);
    }

    #[test]
    fn dilate_extends_interval() {
        let e = RealCompactSet::new(vec![(-1.0, -0.1), (0.1, 1.0)]).unwrap();
        let d = e.dilate(0.2, 0.15).unwrap();
        assert_pairs_close(&d, &[(-1.0, -0.1), (0.05, 1.0)]);
    }

    #[test]
    fn dilate_bridges_gap() {
        let e = RealCompactSet::new(vec![(-1.0, -0.1), (0.1, 1.0)]).unwrap();
        let d = e.dilate(0.2, 0.5).unwrap();
        assert_eq!(pairs(&d), vec![(-1.0, 1.0)]);
    }

    #[test]
    fn dilate_requires_membership() {
        let e = RealCompactSet::new(vec![(-1.0, -0.1), (0.1, 1.0)]).unwrap();
        assert_eq!(e.dilate(0.0, 0.1), Err(Error::PointNotInSet(0.0)));
    }

    #[test]
    fn cantor_first_generation() {
        let c = RealCompactSet::cantor_generation(1.0 / 3.0, 1, (0.0, 1.0)).unwrap();
        assert_pairs_close(&c, &[(0.0, 1.0 / 3.0), (2.0 / 3.0, 1.0)]);
    }

    #[test]
    fn cantor_generation_zero_is_hull() {
        let c = RealCompactSet::cantor_generation(0.3, 0, (0.0, 1.0)).unwrap();
        assert_eq!(pairs(&c), vec![(0.0, 1.0)]);
    }

    #[test]
    fn cantor_lengths() {
        let c = RealCompactSet::cantor_generation(0.4, 2, (0.0, 1.0)).unwrap();
        assert_eq!(c.component_count(), 4);
        for iv in c.intervals() {
            assert!((iv.length() - 0.16).abs() < 1e-15);
        }
    }

    #[test]
    fn cantor_ratio_must_be_proper() {
        assert!(RealCompactSet::cantor_generation(0.5, 1, (0.0, 1.0)).is_err());
        assert!(RealCompactSet::cantor_generation(0.0, 1, (0.0, 1.0)).is_err());
    }

    #[test]
    fn classify_examples() {
        let seg = RealCompactSet::new(vec![(-1.0, 1.0)]).unwrap();
        assert_eq!(seg.classify_point(0.0).location, PointLocation::Interior);
        assert_eq!(seg.classify_point(1.0).location, PointLocation::Endpoint);
        assert_eq!(seg.classify_point(2.0).location, PointLocation::OutsideHull);
        let two = RealCompactSet::new(vec![(-1.0, -0.1), (0.1, 1.0)]).unwrap();
        assert_eq!(two.classify_point(0.0).location, PointLocation::Gap);
    }

    #[test]
    fn json_round_trip() {
        let set = RealCompactSet::new(vec![(0.1, 1.0), (-1.0, -0.25)]).unwrap();
        let back = RealCompactSet::parse(&set.to_json()).unwrap();
        assert_eq!(set, back);
    }
}
