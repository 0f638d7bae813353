
use super::SetOp;
use crate::rational::{self, Q};

/// A finite union of half-open intervals `[lo, hi)` of the unit interval.
///
/// Canonical: intervals are nonempty, sorted, and neither overlap nor touch.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct Section1D {
    intervals: Vec<(Q, Q)>,
}

impl Section1D {
    pub fn empty() -> Self {
        Self::default()
    }

    pub fn interval(lo: Q, hi: Q) -> Self {
        Self::from_intervals(vec![(lo, hi)])
    }

    /// Builds the canonical union of arbitrary (possibly overlapping) intervals.
    pub fn from_intervals(mut raw: Vec<(Q, Q)>) -> Self {
        raw.retain(|(lo, hi)| lo < hi);
        raw.sort();
        let mut out: Vec<(Q, Q)> = Vec::with_capacity(raw.len());
        for (lo, hi) in raw {
            match out.last_mut() {
                Some(last) if lo <= last.1 => {
                    if hi > last.1 {
                        last.1 = hi;
                    }
                }
                _ => out.push((lo, hi)),
            }
        }
        Self { intervals: out }
    }

    pub fn intervals(&self) -> &[(Q, Q)] {
        &self.intervals
    }

    pub fn is_empty(&self) -> bool {
        self.intervals.is_empty()
    }

    pub fn length(&self) -> Q {
        self.intervals
            .iter()
            .fold(rational::zero(), |acc, (lo, hi)| acc + (hi - lo))
    }

    pub fn contains(&self, x: &Q) -> bool {
        self.intervals.iter().any(|(lo, hi)| lo <= x && x < hi)
    }

    pub fn contains_f64(&self, x: f64) -> bool {
        self.intervals
            .iter()
            .any(|(lo, hi)| rational::to_f64(lo) <= x && x < rational::to_f64(hi))
    }

    /// True when `[lo, hi)` lies inside one of the intervals.
    pub fn covers(&self, lo: &Q, hi: &Q) -> bool {
        self.intervals.iter().any(|(a, b)| a <= lo && hi <= b)
    }

    pub fn endpoints(&self) -> impl Iterator<Item = &Q> {
        self.intervals.iter().flat_map(|(lo, hi)| [lo, hi])
    }

    pub fn combine(&self, other: &Self, op: SetOp) -> Self {
        let mut cuts: Vec<Q> = self.endpoints().chain(other.endpoints()).cloned().collect();
        cuts.sort();
        cuts.dedup();
        let mut pieces = Vec::new();
        for w in cuts.windows(2) {
            let inside = op.apply(self.covers(&w[0], &w[1]), other.covers(&w[0], &w[1]));
            if inside {
                pieces.push((w[0].clone(), w[1].clone()));
            }
        }
        Self::from_intervals(pieces)
    }

    /// Intersection with `[lo, hi)`.
    pub fn clip(&self, lo: &Q, hi: &Q) -> Self {
        self.combine(&Self::interval(lo.clone(), hi.clone()), SetOp::Intersect)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::q;

    #[test]
    fn merges_touching_and_overlapping() {
        let s = Section1D::from_intervals(vec![(q(1, 2), q(3, 4)), (q(0, 1), q(1, 2)), (q(1, 4), q(1, 3))]);
        assert_eq!(s.intervals(), &[(q(0, 1), q(3, 4))]);
        assert_eq!(s.length(), q(3, 4));
    }

    #[test]
    fn boolean_ops() {
        let a = Section1D::interval(q(0, 1), q(1, 2));
        let b = Section1D::interval(q(1, 4), q(3, 4));
        assert_eq!(a.combine(&b, SetOp::Union).intervals(), &[(q(0, 1), q(3, 4))]);
        assert_eq!(a.combine(&b, SetOp::Intersect).intervals(), &[(q(1, 4), q(1, 2))]);
        assert_eq!(a.combine(&b, SetOp::Diff).intervals(), &[(q(0, 1), q(1, 4))]);
        assert_eq!(
            a.combine(&b, SetOp::SymDiff).intervals(),
            &[(q(0, 1), q(1, 4)), (q(1, 2), q(3, 4))]
        );
        assert!(a.combine(&a, SetOp::SymDiff).is_empty());
    }
}
