//! Exact set algebra on the two ground universes: finite atom sets and
//! finite unions of half-open rectangles in the unit square.

mod atoms;
mod interval;
pub mod random;
mod rect;

pub use atoms::{AtomSet, MAX_ATOMS};
pub use interval::Section1D;
pub use rect::{Rect, RectUnion};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rational::Q;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SetOp {
    Union,
    Intersect,
    Diff,
    SymDiff,
}

impl SetOp {
    pub fn apply(self, a: bool, b: bool) -> bool {
        match self {
            SetOp::Union => a || b,
            SetOp::Intersect => a && b,
            SetOp::Diff => a && !b,
            SetOp::SymDiff => a != b,
        }
    }
}

/// The ground set `X` a capacity lives on.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Universe {
    Atoms(usize),
    Square,
}

impl Universe {
    pub fn full(self) -> Region {
        match self {
            Universe::Atoms(n) => Region::Atoms(AtomSet::full(n)),
            Universe::Square => Region::Rects(RectUnion::full()),
        }
    }

    pub fn empty(self) -> Region {
        match self {
            Universe::Atoms(n) => Region::Atoms(AtomSet::empty(n)),
            Universe::Square => Region::Rects(RectUnion::empty()),
        }
    }
}

/// A measurable set in one of the two universes.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Region {
    Atoms(AtomSet),
    Rects(RectUnion),
}

impl Region {
    pub fn atoms(universe_size: usize, members: &[usize]) -> Result<Self> {
        AtomSet::from_members(universe_size, members)
            .map(Region::Atoms)
            .ok_or_else(|| Error::Domain(format!("atom list {members:?} not inside a universe of size {universe_size}")))
    }

    pub fn rect(x0: Q, x1: Q, y0: Q, y1: Q) -> Result<Self> {
        Ok(Region::Rects(RectUnion::from_rect(Rect::new(x0, x1, y0, y1)?)))
    }

    pub fn universe(&self) -> Universe {
        match self {
            Region::Atoms(a) => Universe::Atoms(a.universe_size()),
            Region::Rects(_) => Universe::Square,
        }
    }

    pub fn is_empty(&self) -> bool {
        match self {
            Region::Atoms(a) => a.is_empty(),
            Region::Rects(r) => r.is_empty(),
        }
    }

    pub fn combine(&self, other: &Region, op: SetOp) -> Result<Region> {
        match (self, other) {
            (Region::Atoms(a), Region::Atoms(b)) if a.universe_size() == b.universe_size() => {
                Ok(Region::Atoms(a.combine(b, op)))
            }
            (Region::Rects(a), Region::Rects(b)) => Ok(Region::Rects(a.combine(b, op))),
            _ => Err(Error::UniverseMismatch(format!(
                "cannot combine regions over {:?} and {:?}",
                self.universe(),
                other.universe()
            ))),
        }
    }

    pub fn union(&self, other: &Region) -> Result<Region> {
        self.combine(other, SetOp::Union)
    }

    pub fn intersect(&self, other: &Region) -> Result<Region> {
        self.combine(other, SetOp::Intersect)
    }

    pub fn diff(&self, other: &Region) -> Result<Region> {
        self.combine(other, SetOp::Diff)
    }

    pub fn complement(&self) -> Region {
        match self {
            Region::Atoms(a) => Region::Atoms(a.complement()),
            Region::Rects(r) => Region::Rects(r.complement()),
        }
    }

    pub fn is_subset_of(&self, other: &Region) -> Result<bool> {
        Ok(self.diff(other)?.is_empty())
    }

    pub fn as_rects(&self) -> Option<&RectUnion> {
        match self {
            Region::Rects(r) => Some(r),
            Region::Atoms(_) => None,
        }
    }

    pub fn as_atoms(&self) -> Option<&AtomSet> {
        match self {
            Region::Atoms(a) => Some(a),
            Region::Rects(_) => None,
        }
    }

    /// Lebesgue area for rectangle regions, counting measure for atoms.
    pub fn size(&self) -> Q {
        match self {
            Region::Atoms(a) => crate::rational::qi(a.len() as i64),
            Region::Rects(r) => r.area(),
        }
    }
}

/// `λ₂` of a rectangle union.
pub fn lebesgue_area(b: &RectUnion) -> Q {
    b.area()
}

pub fn section_at(b: &RectUnion, y: &Q) -> Result<Section1D> {
    b.section_at(y)
}

pub fn region_combine(a: &Region, b: &Region, op: SetOp) -> Result<Region> {
    a.combine(b, op)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn atom_intersection() {
        let a = Region::atoms(3, &[0, 1]).unwrap();
        let b = Region::atoms(3, &[1, 2]).unwrap();
        assert_eq!(a.intersect(&b).unwrap(), Region::atoms(3, &[1]).unwrap());
    }

    #[test]
    fn mixed_universes_are_rejected() {
        let a = Region::atoms(3, &[0]).unwrap();
        let b = Universe::Square.full();
        assert!(matches!(a.union(&b), Err(Error::UniverseMismatch(_))));
        let c = Region::atoms(4, &[0]).unwrap();
        assert!(matches!(a.union(&c), Err(Error::UniverseMismatch(_))));
    }

    #[test]
    fn out_of_range_atoms() {
        assert!(Region::atoms(2, &[2]).is_err());
    }
}
