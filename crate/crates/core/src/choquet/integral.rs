use num_traits::{Signed, Zero};

use super::{Allocation, StepFunction};
use crate::capacity::Capacity;
use crate::error::{Error, Result};
use crate::rational::{self, Q};
use crate::regions::{AtomSet, Region};

fn check_universe(mu: &Capacity, f: &StepFunction) -> Result<()> {
    if mu.universe() != f.universe() {
        return Err(Error::UniverseMismatch("integrand and capacity live on different universes".into()));
    }
    Ok(())
}

/// Upper level sets `Sᵢ ∩ E` with the height of the layer above the next
/// lower level (`xᵢ − x_{i+1}`, with `x_{r+1} = 0`), for a nonnegative
/// integrand on `E`.
fn nonneg_layers(f: &StepFunction, e: &Region) -> Result<Vec<(Q, Region)>> {
    for p in f.pieces() {
        if p.value.is_negative() && !p.region.intersect(e)?.is_empty() {
            return Err(Error::NegativeIntegrand(rational::to_f64(&p.value)));
        }
    }
    let levels: Vec<(Q, Region)> = f.upper_levels()?.into_iter().filter(|(v, _)| v.is_positive()).collect();
    let mut out = Vec::with_capacity(levels.len());
    for (i, (v, s)) in levels.iter().enumerate() {
        let next = levels.get(i + 1).map_or_else(rational::zero, |(w, _)| w.clone());
        out.push((v - next, s.intersect(e)?));
    }
    Ok(out)
}

/// `∫_E f dμ = Σᵢ (xᵢ − x_{i+1}) μ(Sᵢ ∩ E)` for `f ≥ 0` on `E`, where
/// `x₁ > x₂ > …` are the values of `f` and `Sᵢ = {f ≥ xᵢ}`.
pub fn choquet_integral(mu: &Capacity, f: &StepFunction, e: &Region) -> Result<f64> {
    check_universe(mu, f)?;
    let mut total = 0.0;
    for (h, s) in nonneg_layers(f, e)? {
        total += rational::to_f64(&h) * mu.evaluate(&s)?;
    }
    Ok(total)
}

/// Integral over the whole universe.
pub fn integral(mu: &Capacity, f: &StepFunction) -> Result<f64> {
    choquet_integral(mu, f, &mu.universe().full())
}

/// The same sum in exact arithmetic, when the capacity has exact values.
pub fn choquet_integral_exact(mu: &Capacity, f: &StepFunction, e: &Region) -> Result<Option<Q>> {
    check_universe(mu, f)?;
    let mut total = rational::zero();
    for (h, s) in nonneg_layers(f, e)? {
        let Some(v) = exact_at(mu, &s) else { return Ok(None) };
        total += h * v;
    }
    Ok(Some(total))
}

fn exact_at(mu: &Capacity, s: &Region) -> Option<Q> {
    match s {
        Region::Atoms(a) => mu.exact(a),
        Region::Rects(_) => None,
    }
}

/// Breakpoints of a signed step function: its values together with 0, in
/// decreasing order, each with the upper level set `{f ≥ b}`.
fn signed_layers(f: &StepFunction) -> Result<Vec<(Q, Q, Region)>> {
    let mut levels = f.upper_levels()?;
    if !levels.iter().any(|(v, _)| v.is_zero()) {
        let pos = levels.iter().position(|(v, _)| v.is_negative()).unwrap_or(levels.len());
        let above = if pos == 0 { f.universe().empty() } else { levels[pos - 1].1.clone() };
        levels.insert(pos, (rational::zero(), above));
    }
    Ok(levels
        .windows(2)
        .map(|w| (w[0].0.clone(), w[1].0.clone(), w[0].1.clone()))
        .collect())
}

/// `∫₀^∞ μ(f > t) dt + ∫_{−∞}^0 [μ(f > t) − μ(X)] dt` in closed form.
///
/// On `t ∈ [lo, hi)` between consecutive breakpoints, `{f > t} = {f ≥ hi}`.
pub fn asymmetric_integral(mu: &Capacity, f: &StepFunction) -> Result<f64> {
    check_universe(mu, f)?;
    let total_mass = mu.total_mass();
    let mut total = 0.0;
    for (hi, lo, u) in signed_layers(f)? {
        let width = rational::to_f64(&(&hi - &lo));
        let mu_u = mu.evaluate(&u)?;
        total += if hi.is_positive() { width * mu_u } else { width * (mu_u - total_mass) };
    }
    Ok(total)
}

pub fn asymmetric_integral_exact(mu: &Capacity, f: &StepFunction) -> Result<Option<Q>> {
    check_universe(mu, f)?;
    let Some(total_mass) = exact_at(mu, &mu.universe().full()) else { return Ok(None) };
    let mut total = rational::zero();
    for (hi, lo, u) in signed_layers(f)? {
        let Some(mu_u) = exact_at(mu, &u) else { return Ok(None) };
        let width = &hi - &lo;
        total += if hi.is_positive() { width * mu_u } else { width * (mu_u - &total_mass) };
    }
    Ok(Some(total))
}

/// Componentwise integral of a nonnegative allocation over `E`.
pub fn vector_integral(mu: &Capacity, g: &Allocation, e: &Region) -> Result<Vec<f64>> {
    (0..g.dim()).map(|k| choquet_integral(mu, &g.component(k), e)).collect()
}

#[derive(Clone, Debug)]
pub struct DualityVerdict {
    pub pass: bool,
    /// `∫ −f dμ` (asymmetric).
    pub lhs: f64,
    /// `−∫ f dμ̄`.
    pub rhs: f64,
}

/// Checks `∫ −f dμ = −∫ f dμ̄` (asymmetric integral on the left).
pub fn conjugate_duality_check(mu: &Capacity, f: &StepFunction) -> Result<DualityVerdict> {
    let bar = mu.conjugate();
    let (lhs, rhs) = if f.is_nonnegative() {
        (asymmetric_integral(mu, &f.neg())?, -integral(&bar, f)?)
    } else {
        (asymmetric_integral(mu, &f.neg())?, -asymmetric_integral(&bar, f)?)
    };
    Ok(DualityVerdict { pass: (lhs - rhs).abs() <= 1e-9, lhs, rhs })
}

#[derive(Clone, Debug)]
pub struct SubadditivityVerdict {
    /// `∫(f+g) − ∫f − ∫g`; positive means the inequality fails.
    pub excess: f64,
    pub holds: bool,
}

/// `∫(f + g) ≤ ∫f + ∫g`, which holds for every pair exactly when `μ` is
/// submodular.
pub fn subadditivity_check(mu: &Capacity, f: &StepFunction, g: &StepFunction) -> Result<SubadditivityVerdict> {
    let excess = integral(mu, &f.add(g)?)? - integral(mu, f)? - integral(mu, g)?;
    Ok(SubadditivityVerdict { excess, holds: excess <= 1e-12 })
}

/// For a table that is not submodular, the first pair of indicators whose
/// integrals violate subadditivity.
pub fn indicator_violation(mu: &Capacity) -> Result<Option<(Region, Region, f64)>> {
    let crate::regions::Universe::Atoms(n) = mu.universe() else {
        return Err(Error::UnsupportedCapacity("indicator search needs a finite universe".into()));
    };
    if n > crate::capacity::MAX_EXPLICIT_ATOMS {
        return Err(Error::Domain("universe too large for an exhaustive indicator search".into()));
    }
    for a in 0..1u64 << n {
        for b in 0..1u64 << n {
            let (ra, rb) = (Region::Atoms(AtomSet::new(n, a)), Region::Atoms(AtomSet::new(n, b)));
            let v = subadditivity_check(mu, &StepFunction::indicator(&ra), &StepFunction::indicator(&rb))?;
            if !v.holds {
                return Ok(Some((ra, rb, v.excess)));
            }
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::capacity::ExplicitCapacity;
    use crate::rational::q;
    use crate::regions::Universe;

    fn pair() -> Capacity {
        Capacity::Explicit(ExplicitCapacity::from_rationals(2, vec![q(0, 1), q(7, 10), q(7, 10), q(1, 1)]).unwrap())
    }

    fn f21() -> StepFunction {
        StepFunction::new(Universe::Atoms(2), vec![(Region::atoms(2, &[0]).unwrap(), 2.0), (Region::atoms(2, &[1]).unwrap(), 1.0)])
            .unwrap()
    }

    #[test]
    fn two_one_integrand() {
        let full = Universe::Atoms(2).full();
        assert!((choquet_integral(&pair(), &f21(), &full).unwrap() - 1.7).abs() < 1e-15);
        assert_eq!(choquet_integral_exact(&pair(), &f21(), &full).unwrap(), Some(q(17, 10)));
        let additive = Capacity::Explicit(ExplicitCapacity::additive_rational(&[q(1, 2), q(1, 2)]).unwrap());
        assert_eq!(choquet_integral_exact(&additive, &f21(), &full).unwrap(), Some(q(3, 2)));
        let one = Region::atoms(2, &[0]).unwrap();
        assert_eq!(choquet_integral_exact(&pair(), &f21(), &one).unwrap(), Some(q(7, 5)));
    }

    #[test]
    fn negative_integrand_is_rejected() {
        let full = Universe::Atoms(2).full();
        assert!(matches!(choquet_integral(&pair(), &f21().neg(), &full), Err(Error::NegativeIntegrand(_))));
    }

    #[test]
    fn asymmetric_examples() {
        let mu = pair();
        assert_eq!(asymmetric_integral_exact(&mu, &f21().neg()).unwrap(), Some(q(-13, 10)));
        assert!((asymmetric_integral(&mu, &f21().neg()).unwrap() + 1.3).abs() < 1e-15);
        assert_eq!(asymmetric_integral_exact(&mu, &f21()).unwrap(), Some(q(17, 10)));
        for c in [q(-3, 2), q(0, 1), q(5, 4)] {
            let k = StepFunction::constant(Universe::Atoms(2), c.clone());
            assert_eq!(asymmetric_integral_exact(&mu, &k).unwrap(), Some(c));
        }
        // mixed signs: f = (1, −1) → ∫₀¹ μ({0}) dt + ∫_{−1}^0 (μ({0}) − 1) dt = 0.7 − 0.3
        let g = StepFunction::new(Universe::Atoms(2), vec![(Region::atoms(2, &[0]).unwrap(), 1.0), (Region::atoms(2, &[1]).unwrap(), -1.0)])
            .unwrap();
        assert_eq!(asymmetric_integral_exact(&mu, &g).unwrap(), Some(q(2, 5)));
    }

    #[test]
    fn duality_instance() {
        let v = conjugate_duality_check(&pair(), &f21()).unwrap();
        assert!(v.pass);
        assert!((v.lhs + 1.3).abs() < 1e-12 && (v.rhs + 1.3).abs() < 1e-12);
    }

    #[test]
    fn indicator_falsifier() {
        assert!(indicator_violation(&pair()).unwrap().is_none());
        let bad = Capacity::Explicit(ExplicitCapacity::from_rationals(2, vec![q(0, 1), q(1, 5), q(1, 5), q(1, 1)]).unwrap());
        let (a, b, ex) = indicator_violation(&bad).unwrap().unwrap();
        assert_eq!((a, b), (Region::atoms(2, &[0]).unwrap(), Region::atoms(2, &[1]).unwrap()));
        assert!((ex - 0.6).abs() < 1e-12);
    }
}
