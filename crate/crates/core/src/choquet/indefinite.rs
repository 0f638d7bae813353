use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{choquet_integral, choquet_integral_exact, StepFunction};
use crate::capacity::{check_property, CheckOptions, Capacity, Property, SetFunction, MAX_EXPLICIT_ATOMS};
use crate::error::{Error, Result};
use crate::rational::{self, Q};
use crate::regions::{random, AtomSet, Region, Universe};

/// `μ_f(E) = ∫_E f dμ` for a nonnegative step function `f`.
#[derive(Clone, Debug)]
pub struct IndefiniteIntegral {
    mu: Capacity,
    f: StepFunction,
}

impl IndefiniteIntegral {
    pub fn new(mu: Capacity, f: StepFunction) -> Result<Self> {
        if mu.universe() != f.universe() {
            return Err(Error::UniverseMismatch("integrand and capacity live on different universes".into()));
        }
        if !f.is_nonnegative() {
            return Err(Error::NegativeIntegrand(rational::to_f64(&f.min_value())));
        }
        Ok(IndefiniteIntegral { mu, f })
    }

    pub fn base(&self) -> &Capacity {
        &self.mu
    }

    pub fn integrand(&self) -> &StepFunction {
        &self.f
    }

    pub fn value(&self, e: &Region) -> Result<f64> {
        choquet_integral(&self.mu, &self.f, e)
    }
}

impl SetFunction for IndefiniteIntegral {
    fn universe(&self) -> Universe {
        self.mu.universe()
    }

    fn value(&self, a: &Region) -> Result<f64> {
        IndefiniteIntegral::value(self, a)
    }

    fn exact_value(&self, a: &AtomSet) -> Option<Q> {
        choquet_integral_exact(&self.mu, &self.f, &Region::Atoms(*a)).ok().flatten()
    }
}

pub fn indefinite(mu: &Capacity, f: &StepFunction) -> Result<IndefiniteIntegral> {
    IndefiniteIntegral::new(mu.clone(), f.clone())
}

#[derive(Clone, Debug)]
pub struct InheritanceRow {
    pub property: Property,
    pub base: bool,
    pub derived: bool,
}

/// Which structural properties `μ` has, and whether `μ_f` has them too.
#[derive(Clone, Debug)]
pub struct InheritanceReport {
    pub rows: Vec<InheritanceRow>,
    /// Every property of `μ` is also a property of `μ_f`.
    pub inherited: bool,
}

pub fn inheritance_report(ind: &IndefiniteIntegral, opts: &CheckOptions) -> Result<InheritanceReport> {
    let mut rows = Vec::new();
    for property in Property::ALL {
        let base = check_property(ind.base(), property, opts)?.pass;
        let derived = check_property(ind, property, opts)?.pass;
        rows.push(InheritanceRow { property, base, derived });
    }
    let inherited = rows.iter().all(|r| !r.base || r.derived);
    Ok(InheritanceReport { rows, inherited })
}

/// `δ = ε / (2·max f)`: any `E` with `μ(E) < δ` has `μ_f(E) ≤ max f · μ(E) < ε`.
/// Returns `+∞` when `f ≡ 0`.
pub fn abs_continuity_modulus(f: &StepFunction, eps: f64) -> f64 {
    let a = rational::to_f64(&f.max_value());
    if a <= 0.0 {
        f64::INFINITY
    } else {
        eps / (2.0 * a)
    }
}

#[derive(Clone, Debug)]
pub struct ContinuityVerdict {
    pub delta: f64,
    pub pass: bool,
    /// A set with `μ(E) < δ` but `μ_f(E) ≥ ε`.
    pub witness: Option<Region>,
    /// Sets with `μ(E) < δ` that were tested.
    pub small_sets: usize,
    pub seed: Option<u64>,
}

/// Verifies the modulus on every set (finite universe) or on sampled sets.
pub fn abs_continuity_check(mu: &Capacity, f: &StepFunction, eps: f64, opts: &CheckOptions) -> Result<ContinuityVerdict> {
    let delta = abs_continuity_modulus(f, eps);
    let ind = indefinite(mu, f)?;
    let mut small_sets = 0;
    let mut test = |e: Region| -> Result<Option<Region>> {
        if mu.evaluate(&e)? < delta {
            small_sets += 1;
            if ind.value(&e)? >= eps {
                return Ok(Some(e));
            }
        }
        Ok(None)
    };
    let (witness, seed) = match mu.universe() {
        Universe::Atoms(n) if n <= MAX_EXPLICIT_ATOMS => {
            let mut w = None;
            for b in 0..1u64 << n {
                if let Some(e) = test(Region::Atoms(AtomSet::new(n, b)))? {
                    w = Some(e);
                    break;
                }
            }
            (w, None)
        }
        Universe::Atoms(_) => return Err(Error::Domain("universe too large for an exhaustive check".into())),
        Universe::Square => {
            let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
            let mut w = None;
            for _ in 0..opts.samples {
                let e = Region::Rects(random::rect_union(&mut rng, opts.max_rects, opts.den));
                if let Some(e) = test(e)? {
                    w = Some(e);
                    break;
                }
            }
            (w, Some(opts.seed))
        }
    };
    Ok(ContinuityVerdict { delta, pass: witness.is_none(), witness, small_sets, seed })
}
