
use super::SetOp;

/// Largest finite universe supported by the bitmask representation.
pub const MAX_ATOMS: usize = 63;

/// A subset of the finite universe `{0, …, universe_size − 1}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct AtomSet {
    universe_size: usize,
    bits: u64,
}

impl AtomSet {
    pub fn new(universe_size: usize, bits: u64) -> Self {
        assert!(universe_size <= MAX_ATOMS, "atom universe too large");
        Self { universe_size, bits: bits & Self::full_mask(universe_size) }
    }

    pub fn from_members(universe_size: usize, members: &[usize]) -> Option<Self> {
        let mut bits = 0u64;
        for &m in members {
            if m >= universe_size {
                return None;
            }
            bits |= 1 << m;
        }
        Some(Self::new(universe_size, bits))
    }

    pub fn empty(universe_size: usize) -> Self {
        Self::new(universe_size, 0)
    }

    pub fn full(universe_size: usize) -> Self {
        Self::new(universe_size, Self::full_mask(universe_size))
    }

    pub fn full_mask(universe_size: usize) -> u64 {
        if universe_size == 64 {
            u64::MAX
        } else {
            (1u64 << universe_size) - 1
        }
    }

    pub fn universe_size(&self) -> usize {
        self.universe_size
    }

    pub fn bits(&self) -> u64 {
        self.bits
    }

    pub fn contains(&self, atom: usize) -> bool {
        atom < self.universe_size && self.bits >> atom & 1 == 1
    }

    pub fn members(&self) -> Vec<usize> {
        (0..self.universe_size).filter(|&i| self.contains(i)).collect()
    }

    pub fn len(&self) -> usize {
        self.bits.count_ones() as usize
    }

    pub fn is_empty(&self) -> bool {
        self.bits == 0
    }

    pub fn complement(&self) -> Self {
        Self::new(self.universe_size, !self.bits)
    }

    pub fn combine(&self, other: &Self, op: SetOp) -> Self {
        let bits = match op {
            SetOp::Union => self.bits | other.bits,
            SetOp::Intersect => self.bits & other.bits,
            SetOp::Diff => self.bits & !other.bits,
            SetOp::SymDiff => self.bits ^ other.bits,
        };
        Self::new(self.universe_size, bits)
    }
}
