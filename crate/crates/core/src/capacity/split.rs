//! Splitting sets into pieces of prescribed capacity by horizontal cuts.
//!
//! For product-section parts, `τ ↦ μ(A ∩ {y < τ})` is continuous and
//! piecewise linear, with kinks only at y-coordinates where some section
//! changes. The cut height is found by locating the bracketing pair of kinks
//! and interpolating, with bisection as a fallback.

use num_bigint::BigInt;

use super::Capacity;
use crate::error::{Error, Result};
use crate::rational::{self, Q};
use crate::regions::{Region, RectUnion};

/// Target accuracy for split masses.
pub const EPS_SPLIT: f64 = 1e-10;

const MAX_BISECTIONS: usize = 60;
const CUT_DENOM_BITS: u32 = 44;

/// A nested family `t ↦ A_t` for the requested values of `t`.
#[derive(Clone, Debug)]
pub struct SplitFamily {
    pub base: Region,
    pub members: Vec<(f64, Region)>,
}

impl SplitFamily {
    pub fn get(&self, t: f64) -> Option<&Region> {
        self.members.iter().find(|(s, _)| *s == t).map(|(_, r)| r)
    }
}

fn rects_of(a: &Region) -> Result<&RectUnion> {
    a.as_rects()
        .ok_or_else(|| Error::UnsupportedCapacity("splitting needs regions in the unit square".into()))
}

fn require_constructive(mu: &Capacity) -> Result<()> {
    if mu.is_constructive() {
        Ok(())
    } else {
        Err(Error::UnsupportedCapacity(
            "splitting needs a product-section capacity or a partition of them".into(),
        ))
    }
}

fn check_fraction(t: f64) -> Result<()> {
    if (0.0..=1.0).contains(&t) {
        Ok(())
    } else {
        Err(Error::Domain(format!("split fraction {t} is outside [0, 1]")))
    }
}

/// Every y-coordinate where a relevant section may change.
fn kinks(mu: &Capacity, sets: &[&RectUnion]) -> Vec<Q> {
    let mut ys = vec![rational::zero(), rational::one()];
    let mut push = |r: &RectUnion| {
        for (y0, y1, _) in r.bands() {
            ys.push(y0);
            ys.push(y1);
        }
    };
    sets.iter().for_each(|r| push(r));
    if let Capacity::Partitioned(p) = mu {
        p.blocks().iter().filter_map(Region::as_rects).for_each(push);
    }
    ys.sort();
    ys.dedup();
    ys
}

fn dyadic(x: f64) -> Q {
    let den = 1u64 << CUT_DENOM_BITS;
    Q::new(BigInt::from((x * den as f64).round() as i64), BigInt::from(den))
}

/// Smallest cut `τ` with `g(τ) ≈ target` for a nondecreasing `g` that is
/// linear between consecutive `kinks`.
fn solve_cut(g: impl Fn(&Q) -> Result<f64>, kinks: &[Q], target: f64) -> Result<Q> {
    let vals = kinks.iter().map(&g).collect::<Result<Vec<f64>>>()?;
    if target <= vals[0] {
        return Ok(kinks[0].clone());
    }
    let k = vals
        .iter()
        .position(|&v| v >= target)
        .ok_or_else(|| Error::Internal(format!("split target {target} lies above the bracket")))?;
    let (lo, hi) = (&kinks[k - 1], &kinks[k]);
    let (glo, ghi) = (vals[k - 1], vals[k]);
    let (flo, fhi) = (rational::to_f64(lo), rational::to_f64(hi));
    let guess = dyadic(flo + (target - glo) / (ghi - glo) * (fhi - flo));
    let guess = rational::max(lo, &rational::min(hi, &guess));
    if (g(&guess)? - target).abs() <= EPS_SPLIT / 4.0 {
        return Ok(guess);
    }
    let (mut a, mut b) = (lo.clone(), hi.clone());
    for _ in 0..MAX_BISECTIONS {
        let mid = (&a + &b) / rational::qi(2);
        let v = g(&mid)?;
        if (v - target).abs() <= EPS_SPLIT / 4.0 {
            return Ok(mid);
        }
        if v < target {
            a = mid;
        } else {
            b = mid;
        }
    }
    Ok(b)
}

/// `A_t ⊆ A` with `μ(A_t) = t·μ(A)` and `μ(A ∖ A_t) = (1−t)·μ(A)`, built as
/// the part of `A` below a horizontal cut. Cuts are monotone in `t`, so the
/// pieces for different `t` are nested.
pub fn split(mu: &Capacity, a: &Region, t: f64) -> Result<Region> {
    require_constructive(mu)?;
    check_fraction(t)?;
    let ar = rects_of(a)?;
    if t == 0.0 {
        return Ok(Region::Rects(RectUnion::empty()));
    }
    if t == 1.0 {
        return Ok(a.clone());
    }
    let target = t * mu.evaluate(a)?;
    let g = |tau: &Q| mu.evaluate(&Region::Rects(ar.below(tau)));
    let tau = solve_cut(g, &kinks(mu, &[ar]), target)?;
    Ok(Region::Rects(ar.below(&tau)))
}

pub fn split_family(mu: &Capacity, a: &Region, ts: &[f64]) -> Result<SplitFamily> {
    let members = ts.iter().map(|&t| Ok((t, split(mu, a, t)?))).collect::<Result<Vec<_>>>()?;
    Ok(SplitFamily { base: a.clone(), members })
}

/// Extends a split of `A ⊆ B` to a split of `B`: returns `B_t` with
/// `B_t ∩ A = A_t` exactly and `μ(B_t) = t·μ(B)`, by cutting `B ∖ A`
/// horizontally and adding it to `A_t`.
pub fn nested_split(mu: &Capacity, a: &Region, b: &Region, t: f64, a_t: &Region) -> Result<Region> {
    require_constructive(mu)?;
    check_fraction(t)?;
    if !a.is_subset_of(b)? {
        return Err(Error::Precondition("nested split needs A ⊆ B".into()));
    }
    if !a_t.is_subset_of(a)? {
        return Err(Error::Precondition("nested split needs A_t ⊆ A".into()));
    }
    if a == b {
        return Ok(a_t.clone());
    }
    if t == 1.0 {
        return Ok(b.clone());
    }
    let rest = b.diff(a)?;
    let (atr, rr) = (rects_of(a_t)?, rects_of(&rest)?);
    let target = t * mu.evaluate(b)?;
    let grown = |s: &Q| -> Result<Region> { Ok(Region::Rects(atr.combine(&rr.below(s), crate::regions::SetOp::Union))) };
    let lo = mu.evaluate(a_t)?;
    let hi = mu.evaluate(&grown(&rational::one())?)?;
    if lo > target + EPS_SPLIT || hi < target - EPS_SPLIT {
        return Err(Error::Internal(format!(
            "nested split bracket [{lo}, {hi}] misses the target {target}"
        )));
    }
    let g = |s: &Q| mu.evaluate(&grown(s)?);
    let s = solve_cut(g, &kinks(mu, &[atr, rr]), target)?;
    grown(&s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::capacity::{ExplicitCapacity, PartitionedCapacity, ProductSectionCapacity};
    use crate::concave::ConcaveFn;
    use crate::rational::{q, qi};
    use crate::regions::Universe;

    fn sq() -> Capacity {
        Capacity::ProductSection(ProductSectionCapacity::sqrt())
    }

    fn rect(x0: Q, x1: Q, y0: Q, y1: Q) -> Region {
        Region::rect(x0, x1, y0, y1).unwrap()
    }

    #[test]
    fn quarter_strip_halves() {
        let a = rect(qi(0), q(1, 4), qi(0), qi(1));
        let h = split(&sq(), &a, 0.5).unwrap();
        assert_eq!(h, rect(qi(0), q(1, 4), qi(0), q(1, 2)));
        assert!((sq().evaluate(&h).unwrap() - 0.25).abs() < 1e-15);
        assert!(split(&sq(), &a, 0.0).unwrap().is_empty());
        assert_eq!(split(&sq(), &a, 1.0).unwrap(), a);
    }

    #[test]
    fn full_square_third() {
        let full = Universe::Square.full();
        let s = split(&sq(), &full, 1.0 / 3.0).unwrap();
        let v = sq().evaluate(&s).unwrap();
        assert!((v - 1.0 / 3.0).abs() < EPS_SPLIT);
        let r = s.as_rects().unwrap().rects();
        assert_eq!(r.len(), 1);
        assert!((rational::to_f64(&r[0].y1) - 1.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn staircase_split_and_nesting() {
        let a = Region::Rects(RectUnion::from_rects(vec![
            crate::regions::Rect::new(qi(0), q(1, 2), qi(0), q(1, 2)).unwrap(),
            crate::regions::Rect::new(q(1, 4), qi(1), q(1, 3), qi(1)).unwrap(),
        ]));
        let mass = sq().evaluate(&a).unwrap();
        let fam = split_family(&sq(), &a, &[0.1, 0.37, 0.5, 0.9]).unwrap();
        for (t, at) in &fam.members {
            assert!((sq().evaluate(at).unwrap() - t * mass).abs() < EPS_SPLIT);
            let rest = a.diff(at).unwrap();
            assert!((sq().evaluate(&rest).unwrap() - (1.0 - t) * mass).abs() < EPS_SPLIT);
        }
        for w in fam.members.windows(2) {
            assert!(w[0].1.is_subset_of(&w[1].1).unwrap());
        }
        assert!(fam.get(0.5).is_some());
    }

    #[test]
    fn nested_split_keeps_a_t() {
        let a = rect(qi(0), q(1, 4), qi(0), qi(1));
        let b = Universe::Square.full();
        let at = split(&sq(), &a, 0.5).unwrap();
        let bt = nested_split(&sq(), &a, &b, 0.5, &at).unwrap();
        assert!((sq().evaluate(&bt).unwrap() - 0.5).abs() < EPS_SPLIT);
        assert_eq!(bt.intersect(&a).unwrap(), at);
        assert_eq!(nested_split(&sq(), &a, &a, 0.5, &at).unwrap(), at);
        assert_eq!(nested_split(&sq(), &a, &b, 1.0, &a).unwrap(), b);
        assert!(nested_split(&sq(), &b, &a, 0.5, &at).is_err());
    }

    #[test]
    fn partitioned_strips_split() {
        let e1 = rect(qi(0), q(1, 3), qi(0), qi(1));
        let e2 = e1.complement();
        let p1 = ProductSectionCapacity::on_strip(ConcaveFn::Sqrt, qi(0), q(1, 3), 1.0).unwrap();
        let p2 = ProductSectionCapacity::on_strip(ConcaveFn::Power(0.3), q(1, 3), qi(1), 2.5).unwrap();
        let mu = Capacity::Partitioned(
            PartitionedCapacity::new(vec![e1, e2], vec![Capacity::ProductSection(p1), Capacity::ProductSection(p2)])
                .unwrap(),
        );
        let a = rect(q(1, 5), q(4, 5), q(1, 7), q(6, 7));
        let m = mu.evaluate(&a).unwrap();
        for t in [0.01, 0.3, 0.77, 0.999] {
            let at = split(&mu, &a, t).unwrap();
            assert!((mu.evaluate(&at).unwrap() - t * m).abs() < EPS_SPLIT, "t = {t}");
        }
    }

    #[test]
    fn unsupported_kinds() {
        let tab = Capacity::Explicit(ExplicitCapacity::additive(&[1.0, 1.0]).unwrap());
        assert!(matches!(
            split(&tab, &Region::atoms(2, &[0]).unwrap(), 0.5),
            Err(Error::UnsupportedCapacity(_))
        ));
        assert!(matches!(split(&sq().conjugate(), &Universe::Square.full(), 0.5), Err(Error::UnsupportedCapacity(_))));
        assert!(split(&sq(), &Universe::Square.full(), 1.5).is_err());
    }
}
