use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::rational::{self, Q};
use crate::regions::{Region, Universe};

/// One value on one region.
#[derive(Clone, Debug, PartialEq)]
pub struct Piece {
    pub region: Region,
    pub value: Q,
}

/// A finitely-valued function `Σ xᵢ 1_{Aᵢ}` with pairwise disjoint regions
/// covering the universe. Values are stored exactly; a float input is taken
/// at its exact binary value.
#[derive(Clone, Debug, PartialEq)]
pub struct StepFunction {
    universe: Universe,
    pieces: Vec<Piece>,
}

/// Checks disjointness, drops empty regions and fills the uncovered
/// remainder with `fill`.
pub(crate) fn normalize<V: Clone>(universe: Universe, raw: Vec<(Region, V)>, fill: V) -> Result<Vec<(Region, V)>> {
    let mut covered = universe.empty();
    let mut out = Vec::with_capacity(raw.len() + 1);
    for (i, (r, v)) in raw.into_iter().enumerate() {
        if r.universe() != universe {
            return Err(Error::UniverseMismatch(format!("piece {i} lives on a different universe")));
        }
        if r.is_empty() {
            continue;
        }
        if !covered.intersect(&r)?.is_empty() {
            return Err(Error::Domain(format!("piece {i} overlaps an earlier piece")));
        }
        covered = covered.union(&r)?;
        out.push((r, v));
    }
    let rest = covered.complement();
    if !rest.is_empty() {
        out.push((rest, fill));
    }
    Ok(out)
}

impl StepFunction {
    pub fn from_rationals(universe: Universe, pieces: Vec<(Region, Q)>) -> Result<Self> {
        let pieces = normalize(universe, pieces, rational::zero())?
            .into_iter()
            .map(|(region, value)| Piece { region, value })
            .collect();
        Ok(StepFunction { universe, pieces })
    }

    pub fn new(universe: Universe, pieces: Vec<(Region, f64)>) -> Result<Self> {
        if let Some((_, v)) = pieces.iter().find(|(_, v)| !v.is_finite()) {
            return Err(Error::Domain(format!("step value {v} is not finite")));
        }
        Self::from_rationals(universe, pieces.into_iter().map(|(r, v)| (r, rational::from_f64(v))).collect())
    }

    pub fn constant(universe: Universe, c: Q) -> Self {
        StepFunction { universe, pieces: vec![Piece { region: universe.full(), value: c }] }
    }

    /// `1_A`.
    pub fn indicator(a: &Region) -> Self {
        Self::from_rationals(a.universe(), vec![(a.clone(), rational::one())]).expect("a single piece is valid")
    }

    pub fn zero(universe: Universe) -> Self {
        Self::constant(universe, rational::zero())
    }

    pub fn universe(&self) -> Universe {
        self.universe
    }

    pub fn pieces(&self) -> &[Piece] {
        &self.pieces
    }

    pub fn min_value(&self) -> Q {
        self.pieces.iter().map(|p| p.value.clone()).min().expect("pieces cover a nonempty universe")
    }

    pub fn max_value(&self) -> Q {
        self.pieces.iter().map(|p| p.value.clone()).max().expect("pieces cover a nonempty universe")
    }

    pub fn is_nonnegative(&self) -> bool {
        self.pieces.iter().all(|p| !p.value.is_negative())
    }

    /// `v ∘ f` for a float map.
    pub fn map(&self, v: impl Fn(f64) -> f64) -> Result<Self> {
        let pieces = self.pieces.iter().map(|p| (p.region.clone(), v(rational::to_f64(&p.value)))).collect();
        Self::new(self.universe, pieces)
    }

    /// `v ∘ f` for an exact map.
    pub fn map_exact(&self, v: impl Fn(&Q) -> Q) -> Self {
        StepFunction {
            universe: self.universe,
            pieces: self.pieces.iter().map(|p| Piece { region: p.region.clone(), value: v(&p.value) }).collect(),
        }
    }

    pub fn scale(&self, c: &Q) -> Self {
        self.map_exact(|v| v * c)
    }

    pub fn shift(&self, c: &Q) -> Self {
        self.map_exact(|v| v + c)
    }

    pub fn neg(&self) -> Self {
        self.map_exact(|v| -v)
    }

    /// `f · 1_E`.
    pub fn restrict(&self, e: &Region) -> Result<Self> {
        let mut out = Vec::new();
        for p in &self.pieces {
            out.push((p.region.intersect(e)?, p.value.clone()));
        }
        Self::from_rationals(self.universe, out)
    }

    /// Pointwise combination on the common refinement.
    pub fn zip_with(&self, other: &Self, op: impl Fn(&Q, &Q) -> Q) -> Result<Self> {
        if self.universe != other.universe {
            return Err(Error::UniverseMismatch("step functions on different universes".into()));
        }
        let mut out = Vec::new();
        for p in &self.pieces {
            for q in &other.pieces {
                let r = p.region.intersect(&q.region)?;
                if !r.is_empty() {
                    out.push((r, op(&p.value, &q.value)));
                }
            }
        }
        Self::from_rationals(self.universe, out)
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a + b)
    }

    /// Region where the value satisfies `pred`.
    pub fn region_where(&self, pred: impl Fn(&Q) -> bool) -> Result<Region> {
        let mut acc = self.universe.empty();
        for p in self.pieces.iter().filter(|p| pred(&p.value)) {
            acc = acc.union(&p.region)?;
        }
        Ok(acc)
    }

    /// Distinct values in decreasing order, each with the region where
    /// `f ≥ value` (the upper level set).
    pub fn upper_levels(&self) -> Result<Vec<(Q, Region)>> {
        let mut vals: Vec<Q> = self.pieces.iter().map(|p| p.value.clone()).collect();
        vals.sort_by(|a, b| b.cmp(a));
        vals.dedup();
        let mut acc = self.universe.empty();
        let mut out = Vec::with_capacity(vals.len());
        for v in vals {
            for p in self.pieces.iter().filter(|p| p.value == v) {
                acc = acc.union(&p.region)?;
            }
            out.push((v, acc.clone()));
        }
        Ok(out)
    }

    /// Value on a region lying inside a single piece.
    pub fn value_on(&self, r: &Region) -> Option<Q> {
        if r.is_empty() {
            return None;
        }
        self.pieces
            .iter()
            .find(|p| r.is_subset_of(&p.region).unwrap_or(false))
            .map(|p| p.value.clone())
    }

    /// True if every piece meeting `e` has value zero.
    pub fn vanishes_on(&self, e: &Region) -> Result<bool> {
        for p in &self.pieces {
            if !p.value.is_zero() && !p.region.intersect(e)?.is_empty() {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

/// The coarsest partition refining every function's pieces.
pub fn refinement(universe: Universe, fs: &[&StepFunction]) -> Result<Vec<Region>> {
    let mut cells = vec![universe.full()];
    for f in fs {
        let mut next = Vec::new();
        for c in &cells {
            for p in f.pieces() {
                let r = c.intersect(&p.region)?;
                if !r.is_empty() {
                    next.push(r);
                }
            }
        }
        cells = next;
    }
    Ok(cells)
}

/// A vector-valued step function `X → ℝⁿ₊`.
#[derive(Clone, Debug, PartialEq)]
pub struct Allocation {
    universe: Universe,
    dim: usize,
    pieces: Vec<(Region, Vec<Q>)>,
}

impl Allocation {
    pub fn from_rationals(universe: Universe, dim: usize, pieces: Vec<(Region, Vec<Q>)>) -> Result<Self> {
        if let Some((_, v)) = pieces.iter().find(|(_, v)| v.len() != dim) {
            return Err(Error::Domain(format!("bundle of length {} in a {dim}-commodity allocation", v.len())));
        }
        let pieces = normalize(universe, pieces, vec![rational::zero(); dim])?;
        Ok(Allocation { universe, dim, pieces })
    }

    pub fn new(universe: Universe, pieces: Vec<(Region, Vec<f64>)>) -> Result<Self> {
        let dim = pieces.first().map_or(0, |(_, v)| v.len());
        if pieces.iter().flat_map(|(_, v)| v).any(|x| !x.is_finite()) {
            return Err(Error::Domain("allocation values must be finite".into()));
        }
        let pieces = pieces
            .into_iter()
            .map(|(r, v)| (r, v.into_iter().map(rational::from_f64).collect()))
            .collect();
        Self::from_rationals(universe, dim, pieces)
    }

    pub fn constant(universe: Universe, c: &[f64]) -> Self {
        Self::new(universe, vec![(universe.full(), c.to_vec())]).expect("a constant allocation is valid")
    }

    /// Bundle `values[i]` on block `blocks[i]`.
    pub fn block_constant(blocks: &[Region], values: &[Vec<f64>]) -> Result<Self> {
        let universe = blocks
            .first()
            .map(Region::universe)
            .ok_or_else(|| Error::Domain("no blocks given".into()))?;
        Self::new(universe, blocks.iter().cloned().zip(values.iter().cloned()).collect())
    }

    pub fn universe(&self) -> Universe {
        self.universe
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn pieces(&self) -> &[(Region, Vec<Q>)] {
        &self.pieces
    }

    pub fn is_nonnegative(&self) -> bool {
        self.pieces.iter().flat_map(|(_, v)| v).all(|x| !x.is_negative())
    }

    pub fn component(&self, k: usize) -> StepFunction {
        let pieces = self.pieces.iter().map(|(r, v)| (r.clone(), v[k].clone())).collect();
        StepFunction::from_rationals(self.universe, pieces).expect("pieces are already normalized")
    }

    /// `u ∘ f` for a map on bundles.
    pub fn map_scalar(&self, u: impl Fn(&[f64]) -> f64) -> Result<StepFunction> {
        let pieces = self
            .pieces
            .iter()
            .map(|(r, v)| (r.clone(), u(&v.iter().map(rational::to_f64).collect::<Vec<_>>())))
            .collect();
        StepFunction::new(self.universe, pieces)
    }

    /// `p · f`, exact.
    pub fn dot(&self, p: &[Q]) -> StepFunction {
        let pieces = self
            .pieces
            .iter()
            .map(|(r, v)| (r.clone(), v.iter().zip(p).map(|(a, b)| a * b).sum()))
            .collect();
        StepFunction::from_rationals(self.universe, pieces).expect("pieces are already normalized")
    }

    pub fn restrict(&self, e: &Region) -> Result<Self> {
        let mut out = Vec::new();
        for (r, v) in &self.pieces {
            out.push((r.intersect(e)?, v.clone()));
        }
        Self::from_rationals(self.universe, self.dim, out)
    }

    /// Replaces the values on `e` by `v`, keeping the rest.
    pub fn overwrite(&self, e: &Region, v: &[f64]) -> Result<Self> {
        let mut out = Vec::new();
        for (r, w) in &self.pieces {
            out.push((r.diff(e)?, w.clone()));
        }
        out.push((e.clone(), v.iter().map(|&x| rational::from_f64(x)).collect()));
        Self::from_rationals(self.universe, self.dim, out)
    }

    /// The bundle on a region inside a single piece.
    pub fn value_on(&self, r: &Region) -> Option<Vec<f64>> {
        if r.is_empty() {
            return None;
        }
        self.pieces
            .iter()
            .find(|(p, _)| r.is_subset_of(p).unwrap_or(false))
            .map(|(_, v)| v.iter().map(rational::to_f64).collect())
    }

    /// Distinct bundles taken on `e` (pieces meeting it), as floats.
    pub fn values_on(&self, e: &Region) -> Result<Vec<(Region, Vec<f64>)>> {
        let mut out = Vec::new();
        for (r, v) in &self.pieces {
            let part = r.intersect(e)?;
            if !part.is_empty() {
                out.push((part, v.iter().map(rational::to_f64).collect()));
            }
        }
        Ok(out)
    }
}
