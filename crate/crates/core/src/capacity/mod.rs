//! Capacities (fuzzy measures): monotone set functions vanishing on the empty
//! set with finite total mass.

mod check;
mod explicit;
mod partitioned;
mod product;
mod split;

pub use check::{
    check_property, is_null_set, semiconvexity_diagnostic, CheckOptions, NullVerdict, Property, SemiconvexReport,
    PropertyVerdict,
};
pub use explicit::{ExplicitCapacity, MAX_EXPLICIT_ATOMS};
pub use partitioned::PartitionedCapacity;
pub use product::ProductSectionCapacity;
pub use split::{nested_split, split, split_family, SplitFamily, EPS_SPLIT};

use crate::error::{Error, Result};
use crate::rational::Q;
use crate::regions::{AtomSet, Region, SetOp, Universe};

/// Anything that assigns a number to every region of a universe. Capacities
/// and indefinite integrals both implement it, so the structural checkers
/// apply to either.
pub trait SetFunction {
    fn universe(&self) -> Universe;

    fn value(&self, a: &Region) -> Result<f64>;

    /// Exact value on a finite universe, when the function carries one.
    fn exact_value(&self, _a: &AtomSet) -> Option<Q> {
        None
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Capacity {
    Explicit(ExplicitCapacity),
    ProductSection(ProductSectionCapacity),
    Partitioned(PartitionedCapacity),
    ConjugateOf(Box<Capacity>),
}

impl Capacity {
    pub fn universe(&self) -> Universe {
        match self {
            Capacity::Explicit(c) => Universe::Atoms(c.universe_size()),
            Capacity::ProductSection(_) => Universe::Square,
            Capacity::Partitioned(p) => p.universe(),
            Capacity::ConjugateOf(c) => c.universe(),
        }
    }

    fn check_universe(&self, a: &Region) -> Result<()> {
        if a.universe() != self.universe() {
            return Err(Error::UniverseMismatch(format!(
                "region over {:?} given to a capacity over {:?}",
                a.universe(),
                self.universe()
            )));
        }
        Ok(())
    }

    pub fn evaluate(&self, a: &Region) -> Result<f64> {
        self.check_universe(a)?;
        match (self, a) {
            (Capacity::Explicit(c), Region::Atoms(s)) => Ok(c.value(s)),
            (Capacity::ProductSection(c), Region::Rects(r)) => Ok(c.value(r)),
            (Capacity::Partitioned(p), _) => p.evaluate(a),
            (Capacity::ConjugateOf(c), _) => Ok(c.total_mass() - c.evaluate(&a.complement())?),
            _ => Err(Error::Internal("capacity and region kinds disagree".into())),
        }
    }

    pub fn total_mass(&self) -> f64 {
        self.evaluate(&self.universe().full()).unwrap_or(f64::NAN)
    }

    /// `μ̄(A) = μ(X) − μ(Aᶜ)`. The conjugate of a conjugate unwraps.
    pub fn conjugate(&self) -> Capacity {
        match self {
            Capacity::ConjugateOf(inner) => (**inner).clone(),
            other => Capacity::ConjugateOf(Box::new(other.clone())),
        }
    }

    pub fn exact(&self, a: &AtomSet) -> Option<Q> {
        match self {
            Capacity::Explicit(c) => c.exact(a),
            Capacity::ProductSection(_) => None,
            Capacity::Partitioned(p) => p.exact(a),
            Capacity::ConjugateOf(c) => {
                let full = AtomSet::full(a.universe_size());
                Some(c.exact(&full)? - c.exact(&a.complement())?)
            }
        }
    }

    /// True when sets can be split along horizontal cuts with exactly
    /// additive slab integrals, i.e. every piece is a product-section capacity.
    pub fn is_constructive(&self) -> bool {
        match self {
            Capacity::ProductSection(_) => true,
            Capacity::Partitioned(p) => p.parts().iter().all(Capacity::is_constructive),
            _ => false,
        }
    }

    pub fn as_partitioned(&self) -> Option<&PartitionedCapacity> {
        match self {
            Capacity::Partitioned(p) => Some(p),
            _ => None,
        }
    }

    /// Materializes a capacity on a finite universe into a table.
    pub fn to_explicit(&self) -> Result<ExplicitCapacity> {
        let Universe::Atoms(n) = self.universe() else {
            return Err(Error::UnsupportedCapacity("only finite-universe capacities have tables".into()));
        };
        if n > MAX_EXPLICIT_ATOMS {
            return Err(Error::Domain(format!("universe of {n} atoms is too large for a table")));
        }
        let size = 1usize << n;
        let exact: Option<Vec<Q>> = (0..size).map(|b| self.exact(&AtomSet::new(n, b as u64))).collect();
        match exact {
            Some(tab) => ExplicitCapacity::set_function_exact(n, tab),
            None => {
                let tab = (0..size)
                    .map(|b| self.evaluate(&Region::Atoms(AtomSet::new(n, b as u64))))
                    .collect::<Result<Vec<f64>>>()?;
                ExplicitCapacity::set_function(n, tab)
            }
        }
    }
}

impl SetFunction for Capacity {
    fn universe(&self) -> Universe {
        Capacity::universe(self)
    }

    fn value(&self, a: &Region) -> Result<f64> {
        self.evaluate(a)
    }

    fn exact_value(&self, a: &AtomSet) -> Option<Q> {
        self.exact(a)
    }
}

pub fn evaluate(mu: &Capacity, a: &Region) -> Result<f64> {
    mu.evaluate(a)
}

pub fn conjugate(mu: &Capacity) -> Capacity {
    mu.conjugate()
}

/// `d_μ(E, F) = μ(E Δ F)`.
pub fn pseudometric(mu: &Capacity, e: &Region, f: &Region) -> Result<f64> {
    mu.evaluate(&e.combine(f, SetOp::SymDiff)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::q;
    use crate::regions::RectUnion;

    pub(crate) fn two_atom_pair() -> Capacity {
        Capacity::Explicit(ExplicitCapacity::from_rationals(2, vec![q(0, 1), q(7, 10), q(7, 10), q(1, 1)]).unwrap())
    }

    fn atoms(m: &[usize]) -> Region {
        Region::atoms(2, m).unwrap()
    }

    #[test]
    fn evaluates_tables_and_slabs() {
        let mu = two_atom_pair();
        assert_eq!(mu.evaluate(&atoms(&[0])).unwrap(), 0.7);
        assert_eq!(mu.evaluate(&atoms(&[])).unwrap(), 0.0);
        let sq = Capacity::ProductSection(ProductSectionCapacity::sqrt());
        let b = Region::Rects(RectUnion::rect(q(0, 1), q(1, 4), q(0, 1), q(1, 1)));
        assert!((sq.evaluate(&b).unwrap() - 0.5).abs() < 1e-15);
        assert_eq!(sq.evaluate(&Universe::Square.empty()).unwrap(), 0.0);
        assert!(matches!(mu.evaluate(&b), Err(Error::UniverseMismatch(_))));
    }

    #[test]
    fn conjugate_values() {
        let mu = two_atom_pair();
        let bar = mu.conjugate();
        assert!((bar.evaluate(&atoms(&[0])).unwrap() - 0.3).abs() < 1e-15);
        assert_eq!(bar.exact(&AtomSet::new(2, 1)).unwrap(), q(3, 10));
        assert_eq!(bar.total_mass(), mu.total_mass());
        assert_eq!(bar.conjugate(), mu);
        let additive = Capacity::Explicit(ExplicitCapacity::additive_rational(&[q(1, 4), q(3, 4)]).unwrap());
        let abar = additive.conjugate();
        for b in 0..4u64 {
            let s = AtomSet::new(2, b);
            assert_eq!(abar.exact(&s), additive.exact(&s));
        }
    }

    #[test]
    fn pseudometric_examples() {
        let mu = two_atom_pair();
        assert_eq!(pseudometric(&mu, &atoms(&[0]), &atoms(&[0])).unwrap(), 0.0);
        let d = pseudometric(&mu, &atoms(&[0]), &atoms(&[1])).unwrap();
        assert_eq!(d, 1.0);
        assert!(d >= (0.7f64 - 0.7).abs());
    }
}
