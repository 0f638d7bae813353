//! Structural checkers. On a finite universe every check is exhaustive (and
//! exact when the set function carries rational values); on the unit square
//! they sample seeded random rectangle unions.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{ExplicitCapacity, SetFunction, MAX_EXPLICIT_ATOMS};
use crate::error::{Error, Result};
use crate::rational::Q;
use crate::regions::{random, AtomSet, Region, SetOp, Universe};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Property {
    Monotone,
    Subadditive,
    Submodular,
    ZeroSetsUnionStable,
}

impl Property {
    pub const ALL: [Property; 4] =
        [Property::Monotone, Property::Subadditive, Property::Submodular, Property::ZeroSetsUnionStable];

    pub fn name(self) -> &'static str {
        match self {
            Property::Monotone => "monotone",
            Property::Subadditive => "subadditive",
            Property::Submodular => "submodular",
            Property::ZeroSetsUnionStable => "zero_sets_union_stable",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        Property::ALL
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or_else(|| Error::Input(format!("unknown property {s:?}")))
    }
}

#[derive(Clone, Debug)]
pub struct CheckOptions {
    /// Pairs drawn on the unit square.
    pub samples: usize,
    pub seed: u64,
    /// Absolute tolerance; defaults to `1e-12` on tables and `1e-9` on the square.
    pub tol: Option<f64>,
    /// Rectangle corners are drawn from the grid `{k / den}`.
    pub den: i64,
    pub max_rects: usize,
}

impl Default for CheckOptions {
    fn default() -> Self {
        CheckOptions { samples: 1000, seed: 0, tol: None, den: 16, max_rects: 3 }
    }
}

impl CheckOptions {
    fn tol_for(&self, u: Universe) -> f64 {
        self.tol.unwrap_or(match u {
            Universe::Atoms(_) => 1e-12,
            Universe::Square => 1e-9,
        })
    }
}

#[derive(Clone, Debug)]
pub struct PropertyVerdict {
    pub property: Property,
    pub pass: bool,
    /// The violating pair `(A, B)`; for monotonicity `A ⊆ B` with `μ(A) > μ(B)`.
    pub witness: Option<(Region, Region)>,
    /// Size of the violation at the witness, zero on a pass.
    pub violation: f64,
    pub checked: usize,
    pub exhaustive: bool,
    /// Present when the check sampled.
    pub seed: Option<u64>,
}

/// All values of a set function on a finite universe, exact where possible.
struct Table {
    n: usize,
    values: Vec<f64>,
    exact: Option<Vec<Q>>,
}

impl Table {
    fn build<F: SetFunction + ?Sized>(f: &F, n: usize) -> Result<Self> {
        if n > MAX_EXPLICIT_ATOMS {
            return Err(Error::Domain(format!("exhaustive checks are limited to {MAX_EXPLICIT_ATOMS} atoms")));
        }
        let size = 1u64 << n;
        let exact: Option<Vec<Q>> = (0..size).map(|b| f.exact_value(&AtomSet::new(n, b))).collect();
        let values = (0..size)
            .map(|b| f.value(&Region::Atoms(AtomSet::new(n, b))))
            .collect::<Result<Vec<f64>>>()?;
        Ok(Table { n, values, exact })
    }

    /// Signed excess of `Σ lhs` over `Σ rhs` if it exceeds `tol` (exact
    /// comparison when exact values exist).
    fn excess(&self, lhs: &[u64], rhs: &[u64], tol: f64) -> Option<f64> {
        let fl = |idx: &[u64]| idx.iter().map(|&b| self.values[b as usize]).sum::<f64>();
        let diff = fl(lhs) - fl(rhs);
        match &self.exact {
            Some(t) => {
                let ex = |idx: &[u64]| idx.iter().map(|&b| t[b as usize].clone()).sum::<Q>();
                (ex(lhs) > ex(rhs)).then_some(diff)
            }
            None => (diff > tol).then_some(diff),
        }
    }

    fn is_zero(&self, b: u64, tol: f64) -> bool {
        match &self.exact {
            Some(t) => num_traits::Zero::is_zero(&t[b as usize]),
            None => self.values[b as usize].abs() <= tol,
        }
    }

    fn set(&self, b: u64) -> Region {
        Region::Atoms(AtomSet::new(self.n, b))
    }
}

pub fn check_property<F: SetFunction + ?Sized>(f: &F, prop: Property, opts: &CheckOptions) -> Result<PropertyVerdict> {
    let tol = opts.tol_for(f.universe());
    match f.universe() {
        Universe::Atoms(n) => Ok(check_table(&Table::build(f, n)?, prop, tol)),
        Universe::Square => check_sampled(f, prop, opts, tol),
    }
}

fn verdict(property: Property, found: Option<(Region, Region, f64)>, checked: usize, exhaustive: bool, seed: Option<u64>) -> PropertyVerdict {
    match found {
        Some((a, b, v)) => PropertyVerdict { property, pass: false, witness: Some((a, b)), violation: v, checked, exhaustive, seed },
        None => PropertyVerdict { property, pass: true, witness: None, violation: 0.0, checked, exhaustive, seed },
    }
}

fn check_table(t: &Table, prop: Property, tol: f64) -> PropertyVerdict {
    let n = t.n;
    let size = 1u64 << n;
    let mut checked = 0usize;
    let found = match prop {
        Property::Monotone => (|| {
            for b in 0..size {
                for i in 0..n {
                    let bit = 1u64 << i;
                    if b & bit != 0 {
                        continue;
                    }
                    checked += 1;
                    if let Some(v) = t.excess(&[b], &[b | bit], tol) {
                        return Some((t.set(b), t.set(b | bit), v));
                    }
                }
            }
            None
        })(),
        // Local exchange inequalities are equivalent to global submodularity.
        Property::Submodular => (|| {
            for b in 0..size {
                for i in 0..n {
                    for j in i + 1..n {
                        let (bi, bj) = (1u64 << i, 1u64 << j);
                        if b & (bi | bj) != 0 {
                            continue;
                        }
                        checked += 1;
                        if let Some(v) = t.excess(&[b | bi | bj, b], &[b | bi, b | bj], tol) {
                            return Some((t.set(b | bi), t.set(b | bj), v));
                        }
                    }
                }
            }
            None
        })(),
        Property::Subadditive => (|| {
            // All ordered pairs for small universes, disjoint pairs beyond.
            // Both orders agree on monotone functions.
            if n <= 10 {
                for a in 0..size {
                    for b in 0..size {
                        checked += 1;
                        if let Some(v) = t.excess(&[a | b], &[a, b], tol) {
                            return Some((t.set(a), t.set(b), v));
                        }
                    }
                }
            } else {
                for a in 0..size {
                    let rest = !a & (size - 1);
                    let mut b = rest;
                    loop {
                        checked += 1;
                        if let Some(v) = t.excess(&[a | b], &[a, b], tol) {
                            return Some((t.set(a), t.set(b), v));
                        }
                        if b == 0 {
                            break;
                        }
                        b = (b - 1) & rest;
                    }
                }
            }
            None
        })(),
        Property::ZeroSetsUnionStable => (|| {
            // Closed under pairwise unions iff the union of all zero sets is
            // itself a zero set; accumulate and stop at the first failure.
            let mut acc = 0u64;
            for b in 0..size {
                if !t.is_zero(b, tol) {
                    continue;
                }
                checked += 1;
                let next = acc | b;
                if !t.is_zero(next, tol) {
                    return Some((t.set(acc), t.set(b), t.values[next as usize]));
                }
                acc = next;
            }
            None
        })(),
    };
    verdict(prop, found, checked, true, None)
}

fn check_sampled<F: SetFunction + ?Sized>(f: &F, prop: Property, opts: &CheckOptions, tol: f64) -> Result<PropertyVerdict> {
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut checked = 0;
    for _ in 0..opts.samples {
        let a = Region::Rects(random::rect_union(&mut rng, opts.max_rects, opts.den));
        let b = Region::Rects(random::rect_union(&mut rng, opts.max_rects, opts.den));
        checked += 1;
        let (va, vb) = (f.value(&a)?, f.value(&b)?);
        let union = a.combine(&b, SetOp::Union)?;
        let vu = f.value(&union)?;
        let bad = match prop {
            Property::Monotone => {
                let excess = va - vu;
                (excess > tol).then(|| (a.clone(), union.clone(), excess))
            }
            Property::Subadditive => {
                let excess = vu - va - vb;
                (excess > tol).then(|| (a.clone(), b.clone(), excess))
            }
            Property::Submodular => {
                let vi = f.value(&a.combine(&b, SetOp::Intersect)?)?;
                let excess = vu + vi - va - vb;
                (excess > tol).then(|| (a.clone(), b.clone(), excess))
            }
            Property::ZeroSetsUnionStable => {
                (va.abs() <= tol && vb.abs() <= tol && vu.abs() > tol).then(|| (a.clone(), b.clone(), vu))
            }
        };
        if let Some(w) = bad {
            return Ok(verdict(prop, Some(w), checked, false, Some(opts.seed)));
        }
    }
    Ok(verdict(prop, None, checked, false, Some(opts.seed)))
}

#[derive(Clone, Debug)]
pub struct NullVerdict {
    pub pass: bool,
    /// A set `A` with `μ(A ∪ N) ≠ μ(A)`.
    pub witness: Option<Region>,
    pub checked: usize,
    pub seed: Option<u64>,
}

/// Tests `μ(A ∪ N) = μ(A)`: over every `A` on a finite universe (empty set
/// first, so a failure with `A = ∅` means `μ(N) > 0`), and over `∅` plus
/// sampled unions on the square.
pub fn is_null_set<F: SetFunction + ?Sized>(f: &F, null: &Region, opts: &CheckOptions) -> Result<NullVerdict> {
    if null.universe() != f.universe() {
        return Err(Error::UniverseMismatch("candidate null set lives on a different universe".into()));
    }
    let tol = opts.tol_for(f.universe());
    let mut checked = 0;
    let mut test = |a: Region| -> Result<Option<Region>> {
        checked += 1;
        if let (Region::Atoms(sa), Region::Atoms(sn)) = (&a, null) {
            let su = sa.combine(sn, SetOp::Union);
            if let (Some(x), Some(y)) = (f.exact_value(&su), f.exact_value(sa)) {
                return Ok((x != y).then_some(a));
            }
        }
        let diff = f.value(&a.union(null)?)? - f.value(&a)?;
        Ok((diff.abs() > tol).then_some(a))
    };
    match f.universe() {
        Universe::Atoms(n) => {
            if n > MAX_EXPLICIT_ATOMS {
                return Err(Error::Domain(format!("exhaustive checks are limited to {MAX_EXPLICIT_ATOMS} atoms")));
            }
            for b in 0..1u64 << n {
                if let Some(w) = test(Region::Atoms(AtomSet::new(n, b)))? {
                    return Ok(NullVerdict { pass: false, witness: Some(w), checked, seed: None });
                }
            }
            Ok(NullVerdict { pass: true, witness: None, checked, seed: None })
        }
        Universe::Square => {
            let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
            if let Some(w) = test(Universe::Square.empty())? {
                return Ok(NullVerdict { pass: false, witness: Some(w), checked, seed: Some(opts.seed) });
            }
            for _ in 0..opts.samples {
                let a = Region::Rects(random::rect_union(&mut rng, opts.max_rects, opts.den));
                if let Some(w) = test(a)? {
                    return Ok(NullVerdict { pass: false, witness: Some(w), checked, seed: Some(opts.seed) });
                }
            }
            Ok(NullVerdict { pass: true, witness: None, checked, seed: Some(opts.seed) })
        }
    }
}

#[derive(Clone, Debug)]
pub struct SemiconvexReport {
    pub pass: bool,
    /// The first nonempty set with no subset near half its value.
    pub failing_set: Option<AtomSet>,
    /// Best `|μ(F) − μ(E)/2|` achieved for the failing set.
    pub best_gap: f64,
}

/// Approximate semiconvexity on a table: every nonempty `E` should contain
/// some `F` with `|μ(F) − μ(E)/2| ≤ tol`. Finite universes essentially
/// never satisfy this exactly; the report is diagnostic.
pub fn semiconvexity_diagnostic(c: &ExplicitCapacity, tol: f64) -> SemiconvexReport {
    let n = c.universe_size();
    for e in 1..1u64 << n {
        let half = c.value(&AtomSet::new(n, e)) / 2.0;
        let mut best = f64::INFINITY;
        let mut sub = e;
        loop {
            best = best.min((c.value(&AtomSet::new(n, sub)) - half).abs());
            if sub == 0 || best <= tol {
                break;
            }
            sub = (sub - 1) & e;
        }
        if best > tol {
            return SemiconvexReport { pass: false, failing_set: Some(AtomSet::new(n, e)), best_gap: best };
        }
    }
    SemiconvexReport { pass: true, failing_set: None, best_gap: 0.0 }
}
