
use super::interval::Section1D;
use super::SetOp;
use crate::error::{Error, Result};
use crate::rational::{self, Q};

/// Half-open rectangle `[x0, x1) × [y0, y1)` inside the unit square.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Rect {
    pub x0: Q,
    pub x1: Q,
    pub y0: Q,
    pub y1: Q,
}

impl Rect {
    pub fn new(x0: Q, x1: Q, y0: Q, y1: Q) -> Result<Self> {
        let (z, o) = (rational::zero(), rational::one());
        let ok = z <= x0 && x0 <= x1 && x1 <= o && z <= y0 && y0 <= y1 && y1 <= o;
        if !ok {
            return Err(Error::Domain(format!(
                "rectangle [{}, {}) x [{}, {}) is not inside the unit square",
                rational::format(&x0),
                rational::format(&x1),
                rational::format(&y0),
                rational::format(&y1)
            )));
        }
        Ok(Self { x0, x1, y0, y1 })
    }

    pub fn area(&self) -> Q {
        (&self.x1 - &self.x0) * (&self.y1 - &self.y0)
    }

    pub fn is_empty(&self) -> bool {
        self.x0 >= self.x1 || self.y0 >= self.y1
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
struct Slab {
    x0: Q,
    x1: Q,
    ys: Section1D,
}

/// A finite union of half-open axis-aligned rectangles in `[0,1)²`.
///
/// Stored as a vertical slab decomposition: slabs are sorted by `x`, pairwise
/// disjoint, nonempty, and adjacent slabs never share the same `y`-set. Two
/// regions are equal as sets iff their representations are equal.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct RectUnion {
    slabs: Vec<Slab>,
}

impl RectUnion {
    pub fn empty() -> Self {
        Self::default()
    }

    pub fn full() -> Self {
        Self::from_rect(Rect { x0: rational::zero(), x1: rational::one(), y0: rational::zero(), y1: rational::one() })
    }

    pub fn from_rect(r: Rect) -> Self {
        Self::from_rects(vec![r])
    }

    /// `[x0, x1) × [y0, y1)`; panics outside the unit square.
    pub fn rect(x0: Q, x1: Q, y0: Q, y1: Q) -> Self {
        Self::from_rect(Rect::new(x0, x1, y0, y1).expect("rectangle inside the unit square"))
    }

    pub fn from_rects(rects: Vec<Rect>) -> Self {
        let rects: Vec<Rect> = rects.into_iter().filter(|r| !r.is_empty()).collect();
        let mut cuts: Vec<Q> = rects.iter().flat_map(|r| [r.x0.clone(), r.x1.clone()]).collect();
        cuts.sort();
        cuts.dedup();
        let slabs = cuts
            .windows(2)
            .map(|w| {
                let ys = rects
                    .iter()
                    .filter(|r| r.x0 <= w[0] && w[1] <= r.x1)
                    .map(|r| (r.y0.clone(), r.y1.clone()))
                    .collect();
                Slab { x0: w[0].clone(), x1: w[1].clone(), ys: Section1D::from_intervals(ys) }
            })
            .collect();
        Self::normalize(slabs)
    }

    fn normalize(slabs: Vec<Slab>) -> Self {
        let mut out: Vec<Slab> = Vec::with_capacity(slabs.len());
        for s in slabs.into_iter().filter(|s| !s.ys.is_empty() && s.x0 < s.x1) {
            match out.last_mut() {
                Some(last) if last.x1 == s.x0 && last.ys == s.ys => last.x1 = s.x1,
                _ => out.push(s),
            }
        }
        Self { slabs: out }
    }

    /// Re-canonicalizes via the rectangle list.
    pub fn canonical(&self) -> Self {
        Self::from_rects(self.rects())
    }

    pub fn is_empty(&self) -> bool {
        self.slabs.is_empty()
    }

    /// The canonical rectangle list, sorted by `x` then `y`.
    pub fn rects(&self) -> Vec<Rect> {
        self.slabs
            .iter()
            .flat_map(|s| {
                s.ys.intervals().iter().map(move |(y0, y1)| Rect {
                    x0: s.x0.clone(),
                    x1: s.x1.clone(),
                    y0: y0.clone(),
                    y1: y1.clone(),
                })
            })
            .collect()
    }

    fn ys_over(&self, lo: &Q, hi: &Q) -> Option<&Section1D> {
        self.slabs.iter().find(|s| &s.x0 <= lo && hi <= &s.x1).map(|s| &s.ys)
    }

    pub fn combine(&self, other: &Self, op: SetOp) -> Self {
        let mut cuts: Vec<Q> = self
            .slabs
            .iter()
            .chain(other.slabs.iter())
            .flat_map(|s| [s.x0.clone(), s.x1.clone()])
            .collect();
        cuts.sort();
        cuts.dedup();
        let empty = Section1D::empty();
        let slabs = cuts
            .windows(2)
            .map(|w| {
                let a = self.ys_over(&w[0], &w[1]).unwrap_or(&empty);
                let b = other.ys_over(&w[0], &w[1]).unwrap_or(&empty);
                Slab { x0: w[0].clone(), x1: w[1].clone(), ys: a.combine(b, op) }
            })
            .collect();
        Self::normalize(slabs)
    }

    pub fn complement(&self) -> Self {
        Self::full().combine(self, SetOp::Diff)
    }

    pub fn area(&self) -> Q {
        self.slabs
            .iter()
            .fold(rational::zero(), |acc, s| acc + (&s.x1 - &s.x0) * s.ys.length())
    }

    pub fn contains(&self, x: &Q, y: &Q) -> bool {
        self.slabs.iter().any(|s| &s.x0 <= x && x < &s.x1 && s.ys.contains(y))
    }

    pub fn contains_f64(&self, x: f64, y: f64) -> bool {
        self.slabs
            .iter()
            .any(|s| rational::to_f64(&s.x0) <= x && x < rational::to_f64(&s.x1) && s.ys.contains_f64(y))
    }

    /// The section `{x : (x, y) ∈ self}`.
    pub fn section_at(&self, y: &Q) -> Result<Section1D> {
        if *y < rational::zero() || *y >= rational::one() {
            return Err(Error::Domain(format!("section height {} outside [0, 1)", rational::format(y))));
        }
        Ok(Section1D::from_intervals(
            self.slabs
                .iter()
                .filter(|s| s.ys.contains(y))
                .map(|s| (s.x0.clone(), s.x1.clone()))
                .collect(),
        ))
    }

    /// Horizontal bands on which the section is constant: `(y0, y1, section)`.
    /// Bands with empty sections are omitted.
    pub fn bands(&self) -> Vec<(Q, Q, Section1D)> {
        let mut cuts: Vec<Q> = self.slabs.iter().flat_map(|s| s.ys.endpoints().cloned()).collect();
        cuts.sort();
        cuts.dedup();
        cuts.windows(2)
            .filter_map(|w| {
                let sec = Section1D::from_intervals(
                    self.slabs
                        .iter()
                        .filter(|s| s.ys.covers(&w[0], &w[1]))
                        .map(|s| (s.x0.clone(), s.x1.clone()))
                        .collect(),
                );
                (!sec.is_empty()).then(|| (w[0].clone(), w[1].clone(), sec))
            })
            .collect()
    }

    /// Intersection with the horizontal strip `[0,1) × [0, tau)`.
    pub fn below(&self, tau: &Q) -> Self {
        let strip = Self::rect(rational::zero(), rational::one(), rational::zero(), rational::min(tau, &rational::one()));
        self.combine(&strip, SetOp::Intersect)
    }

    pub fn is_subset_of(&self, other: &Self) -> bool {
        self.combine(other, SetOp::Diff).is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::q;

    fn r(x0: (i64, i64), x1: (i64, i64), y0: (i64, i64), y1: (i64, i64)) -> RectUnion {
        RectUnion::rect(q(x0.0, x0.1), q(x1.0, x1.1), q(y0.0, y0.1), q(y1.0, y1.1))
    }

    #[test]
    fn union_of_overlapping_strips() {
        let a = r((0, 1), (1, 2), (0, 1), (1, 1));
        let b = r((1, 4), (3, 4), (0, 1), (1, 1));
        let u = a.combine(&b, SetOp::Union);
        assert_eq!(u, r((0, 1), (3, 4), (0, 1), (1, 1)));
        assert_eq!(u.rects().len(), 1);
    }

    #[test]
    fn self_symmetric_difference_is_empty() {
        let a = r((0, 1), (1, 3), (1, 5), (1, 2));
        assert!(a.combine(&a, SetOp::SymDiff).is_empty());
    }

    #[test]
    fn sections() {
        let a = r((0, 1), (1, 4), (0, 1), (1, 1));
        assert_eq!(a.section_at(&q(3, 10)).unwrap(), Section1D::interval(q(0, 1), q(1, 4)));
        assert!(RectUnion::empty().section_at(&q(1, 2)).unwrap().is_empty());
        let d = r((0, 1), (1, 2), (0, 1), (1, 2)).combine(&r((1, 2), (1, 1), (1, 2), (1, 1)), SetOp::Union);
        assert_eq!(d.section_at(&q(7, 10)).unwrap(), Section1D::interval(q(1, 2), q(1, 1)));
        assert!(d.section_at(&q(1, 1)).is_err());
        assert!(d.section_at(&q(-1, 2)).is_err());
    }

    #[test]
    fn areas() {
        assert_eq!(RectUnion::full().area(), q(1, 1));
        assert_eq!(r((0, 1), (1, 4), (0, 1), (1, 1)).area(), q(1, 4));
        let d = r((0, 1), (1, 2), (0, 1), (1, 2)).combine(&r((1, 2), (1, 1), (1, 2), (1, 1)), SetOp::Union);
        assert_eq!(d.area(), q(1, 2));
    }

    #[test]
    fn rejects_out_of_square() {
        assert!(Rect::new(q(0, 1), q(3, 2), q(0, 1), q(1, 1)).is_err());
        assert!(Rect::new(q(1, 2), q(1, 4), q(0, 1), q(1, 1)).is_err());
    }

    #[test]
    fn bands_split_on_y_breakpoints() {
        let d = r((0, 1), (1, 2), (0, 1), (1, 2)).combine(&r((1, 4), (1, 1), (1, 4), (3, 4)), SetOp::Union);
        let bands = d.bands();
        let lens: Vec<Q> = bands.iter().map(|b| b.2.length()).collect();
        assert_eq!(lens, vec![q(1, 2), q(1, 1), q(3, 4)]);
    }
}
