use super::Capacity;
use crate::error::{Error, Result};
use crate::rational::Q;
use crate::regions::{AtomSet, Region, Universe};

/// A capacity additive across a fixed finite partition `E₁, …, E_r`:
/// `μ(A) = Σᵢ μᵢ(A ∩ Eᵢ)`. Inside a block the part `μᵢ` is arbitrary.
#[derive(Clone, Debug, PartialEq)]
pub struct PartitionedCapacity {
    universe: Universe,
    blocks: Vec<Region>,
    parts: Vec<Capacity>,
}

impl PartitionedCapacity {
    /// Checks that the blocks are pairwise disjoint, cover the universe and
    /// share it with every part.
    pub fn new(blocks: Vec<Region>, parts: Vec<Capacity>) -> Result<Self> {
        if blocks.is_empty() {
            return Err(Error::Domain("a partition needs at least one block".into()));
        }
        if blocks.len() != parts.len() {
            return Err(Error::Domain(format!("{} blocks but {} part capacities", blocks.len(), parts.len())));
        }
        let universe = blocks[0].universe();
        let mut covered = universe.empty();
        for (i, (b, p)) in blocks.iter().zip(&parts).enumerate() {
            if b.universe() != universe || p.universe() != universe {
                return Err(Error::UniverseMismatch(format!("block {i} lives on a different universe")));
            }
            if !covered.intersect(b)?.is_empty() {
                return Err(Error::Domain(format!("block {i} overlaps an earlier block")));
            }
            covered = covered.union(b)?;
        }
        if covered != universe.full() {
            return Err(Error::Domain("blocks do not cover the universe".into()));
        }
        Ok(PartitionedCapacity { universe, blocks, parts })
    }

    pub fn universe(&self) -> Universe {
        self.universe
    }

    pub fn blocks(&self) -> &[Region] {
        &self.blocks
    }

    pub fn parts(&self) -> &[Capacity] {
        &self.parts
    }

    pub fn len(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }

    pub fn evaluate(&self, a: &Region) -> Result<f64> {
        let mut s = 0.0;
        for i in 0..self.blocks.len() {
            s += self.block_value(i, a)?;
        }
        Ok(s)
    }

    /// `μᵢ(A ∩ Eᵢ)`.
    pub fn block_value(&self, i: usize, a: &Region) -> Result<f64> {
        self.parts[i].evaluate(&a.intersect(&self.blocks[i])?)
    }

    /// `μ(Eᵢ)` for every block.
    pub fn block_masses(&self) -> Vec<f64> {
        (0..self.blocks.len())
            .map(|i| self.block_value(i, &self.blocks[i]).unwrap_or(f64::NAN))
            .collect()
    }

    pub fn exact(&self, a: &AtomSet) -> Option<Q> {
        let mut s = crate::rational::zero();
        for (b, p) in self.blocks.iter().zip(&self.parts) {
            let block = b.as_atoms()?;
            if block.universe_size() != a.universe_size() {
                return None;
            }
            s += p.exact(&AtomSet::new(a.universe_size(), a.bits() & block.bits()))?;
        }
        Some(s)
    }

    /// Index of the block containing an atom.
    pub fn block_of_atom(&self, atom: usize) -> Option<usize> {
        self.blocks.iter().position(|b| b.as_atoms().is_some_and(|s| s.contains(atom)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::capacity::{ExplicitCapacity, ProductSectionCapacity};
    use crate::concave::ConcaveFn;
    use crate::rational::{q, qi};
    use crate::regions::{RectUnion, SetOp};

    fn strips() -> PartitionedCapacity {
        let e1 = Region::Rects(RectUnion::rect(q(0, 1), q(1, 2), qi(0), qi(1)));
        let e2 = e1.complement();
        let p1 = ProductSectionCapacity::on_strip(ConcaveFn::Sqrt, q(0, 1), q(1, 2), 1.0).unwrap();
        let p2 = ProductSectionCapacity::on_strip(ConcaveFn::Sqrt, q(1, 2), q(1, 1), 2.0).unwrap();
        PartitionedCapacity::new(vec![e1, e2], vec![Capacity::ProductSection(p1), Capacity::ProductSection(p2)])
            .unwrap()
    }

    #[test]
    fn block_masses_and_additivity() {
        let mu = strips();
        assert_eq!(mu.block_masses(), vec![1.0, 2.0]);
        assert_eq!(mu.evaluate(&Universe::Square.full()).unwrap(), 3.0);
        let a = Region::Rects(RectUnion::rect(q(1, 4), q(3, 4), qi(0), q(1, 2)));
        let total = mu.evaluate(&a).unwrap();
        let split: f64 = mu
            .blocks()
            .iter()
            .map(|b| mu.evaluate(&a.combine(b, SetOp::Intersect).unwrap()).unwrap())
            .sum();
        assert!((total - split).abs() < 1e-15);
        assert!((total - 1.5 * 0.5f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn rejects_bad_partitions() {
        let a = Region::atoms(3, &[0, 1]).unwrap();
        let b = Region::atoms(3, &[1, 2]).unwrap();
        let part = || Capacity::Explicit(ExplicitCapacity::additive(&[1.0, 1.0, 1.0]).unwrap());
        assert!(PartitionedCapacity::new(vec![a.clone(), b], vec![part(), part()]).is_err());
        assert!(PartitionedCapacity::new(vec![a.clone()], vec![part()]).is_err());
        let c = Region::atoms(3, &[2]).unwrap();
        let ok = PartitionedCapacity::new(vec![a, c], vec![part(), part()]).unwrap();
        assert_eq!(ok.block_of_atom(2), Some(1));
        assert_eq!(ok.exact(&AtomSet::full(3)), None);
    }
}
