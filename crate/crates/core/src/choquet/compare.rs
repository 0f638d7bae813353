//! Comparing step functions through their indefinite integrals.
//!
//! Step functions cannot tell apart sets finer than the common refinement
//! of their pieces, so the integral comparisons range over unions of
//! refinement cells.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{choquet_integral, choquet_integral_exact, refinement, StepFunction};
use crate::capacity::{is_null_set, Capacity, CheckOptions};
use crate::error::{Error, Result};
use crate::rational;
use crate::regions::Region;

const EXHAUSTIVE_CELLS: usize = 14;
const TOL: f64 = 1e-12;

/// `lhs − rhs`, exact when both exact integrals exist.
fn integral_gap(mu: &Capacity, f: &StepFunction, g: &StepFunction, e: &Region) -> Result<(f64, Option<std::cmp::Ordering>)> {
    if let (Some(a), Some(b)) = (choquet_integral_exact(mu, f, e)?, choquet_integral_exact(mu, g, e)?) {
        return Ok((rational::to_f64(&(&a - &b)), Some(a.cmp(&b))));
    }
    Ok((choquet_integral(mu, f, e)? - choquet_integral(mu, g, e)?, None))
}

/// Unions of refinement cells to test: all of them for few cells, a seeded
/// sample plus the single cells otherwise.
fn test_sets(cells: &[Region], opts: &CheckOptions) -> Result<Vec<Region>> {
    let union_of = |mask: u64| -> Result<Region> {
        let mut acc = cells[0].universe().empty();
        for (i, c) in cells.iter().enumerate() {
            if mask >> i & 1 == 1 {
                acc = acc.union(c)?;
            }
        }
        Ok(acc)
    };
    if cells.len() <= EXHAUSTIVE_CELLS {
        return (0..1u64 << cells.len()).map(union_of).collect();
    }
    let mut out: Vec<Region> = cells.to_vec();
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    for _ in 0..opts.samples {
        let mut acc = cells[0].universe().empty();
        for c in cells {
            if rng.gen_bool(0.5) {
                acc = acc.union(c)?;
            }
        }
        out.push(acc);
    }
    Ok(out)
}

#[derive(Clone, Debug)]
pub struct ComparisonVerdict {
    /// `μ_f(E) ≤ μ_g(E)` on every tested set.
    pub integrals_le: bool,
    pub integral_witness: Option<Region>,
    /// `{f > g}` is a null set.
    pub pointwise_le_ae: bool,
    pub exceptional: Region,
    /// The two verdicts coincide, as they must for subadditive `μ` with
    /// union-stable zero sets.
    pub agree: bool,
    pub sets_tested: usize,
}

pub fn compare_pointwise_from_integrals(
    mu: &Capacity,
    f: &StepFunction,
    g: &StepFunction,
    opts: &CheckOptions,
) -> Result<ComparisonVerdict> {
    if !f.is_nonnegative() || !g.is_nonnegative() {
        return Err(Error::NegativeIntegrand(rational::to_f64(&rational::min(&f.min_value(), &g.min_value()))));
    }
    let cells = refinement(mu.universe(), &[f, g])?;
    let sets = test_sets(&cells, opts)?;
    let mut integral_witness = None;
    for e in &sets {
        let (gap, exact) = integral_gap(mu, f, g, e)?;
        let bad = match exact {
            Some(o) => o == std::cmp::Ordering::Greater,
            None => gap > TOL,
        };
        if bad {
            integral_witness = Some(e.clone());
            break;
        }
    }
    let mut exceptional = mu.universe().empty();
    for c in &cells {
        if f.value_on(c) > g.value_on(c) {
            exceptional = exceptional.union(c)?;
        }
    }
    let pointwise_le_ae = is_null_set(mu, &exceptional, opts)?.pass;
    let integrals_le = integral_witness.is_none();
    Ok(ComparisonVerdict {
        integrals_le,
        integral_witness,
        pointwise_le_ae,
        exceptional,
        agree: integrals_le == pointwise_le_ae,
        sets_tested: sets.len(),
    })
}

#[derive(Clone, Debug)]
pub struct EqualityVerdict {
    pub integrals_equal: bool,
    pub witness: Option<Region>,
    pub equal_ae: bool,
    pub exceptional: Region,
    pub agree: bool,
}

/// The symmetric version: `μ_f = μ_g` on all tested sets against
/// `{f ≠ g}` being null.
pub fn compare_equal_from_integrals(
    mu: &Capacity,
    f: &StepFunction,
    g: &StepFunction,
    opts: &CheckOptions,
) -> Result<EqualityVerdict> {
    let a = compare_pointwise_from_integrals(mu, f, g, opts)?;
    let b = compare_pointwise_from_integrals(mu, g, f, opts)?;
    let exceptional = a.exceptional.union(&b.exceptional)?;
    let integrals_equal = a.integrals_le && b.integrals_le;
    let equal_ae = is_null_set(mu, &exceptional, opts)?.pass;
    Ok(EqualityVerdict {
        integrals_equal,
        witness: a.integral_witness.or(b.integral_witness),
        equal_ae,
        exceptional,
        agree: integrals_equal == equal_ae,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub enum StrictVerdict {
    /// `μ_f(S) > μ_g(S)` with the given gap.
    Holds { gap: f64 },
    Violated { gap: f64 },
    Inconclusive(String),
}

/// For `g` constant on each block, `f > g` on `S` and `μ(S) > 0`, the
/// integrals over `S` are strictly ordered.
pub fn strict_inequality(mu: &Capacity, f: &StepFunction, g: &StepFunction, s: &Region) -> Result<StrictVerdict> {
    let Some(p) = mu.as_partitioned() else {
        return Ok(StrictVerdict::Inconclusive("capacity is not partitioned".into()));
    };
    for (i, block) in p.blocks().iter().enumerate() {
        let vals: Vec<_> = g
            .pieces()
            .iter()
            .filter(|pc| !pc.region.intersect(block).map(|r| r.is_empty()).unwrap_or(true))
            .map(|pc| pc.value.clone())
            .collect();
        if vals.windows(2).any(|w| w[0] != w[1]) {
            return Ok(StrictVerdict::Inconclusive(format!("g is not constant on block {i}")));
        }
    }
    if mu.evaluate(s)? <= 0.0 {
        return Ok(StrictVerdict::Inconclusive("S has zero capacity".into()));
    }
    for c in refinement(mu.universe(), &[f, g])? {
        let part = c.intersect(s)?;
        if !part.is_empty() && f.value_on(&c) <= g.value_on(&c) {
            return Ok(StrictVerdict::Inconclusive("f does not exceed g everywhere on S".into()));
        }
    }
    if !f.is_nonnegative() || !g.is_nonnegative() {
        return Ok(StrictVerdict::Inconclusive("integrands must be nonnegative".into()));
    }
    let gap = choquet_integral(mu, f, s)? - choquet_integral(mu, g, s)?;
    Ok(if gap > 0.0 { StrictVerdict::Holds { gap } } else { StrictVerdict::Violated { gap } })
}

/// `S ∩ {f < c}` when it has positive capacity.
pub fn find_smaller_witness(mu: &Capacity, f: &StepFunction, c: f64, s: &Region) -> Result<Option<Region>> {
    let c = rational::from_f64(c);
    let below = f.region_where(|v| *v < c)?.intersect(s)?;
    Ok((mu.evaluate(&below)? > 0.0).then_some(below))
}
