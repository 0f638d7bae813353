use num_traits::Zero;

use crate::error::{Error, Result};
use crate::rational::{self, Q};
use crate::regions::AtomSet;

/// Largest universe an explicit table may cover (`2^20` entries).
pub const MAX_EXPLICIT_ATOMS: usize = 20;

const TABLE_TOL: f64 = 1e-12;

/// A set function on `{0, …, n−1}` stored as a table indexed by subset
/// bitmask. Tables built from rationals keep the exact values alongside the
/// floating ones, and every structural check then runs exactly.
#[derive(Clone, Debug, PartialEq)]
pub struct ExplicitCapacity {
    n: usize,
    values: Vec<f64>,
    exact: Option<Vec<Q>>,
}

impl ExplicitCapacity {
    /// A validated capacity from exact values.
    pub fn from_rationals(n: usize, table: Vec<Q>) -> Result<Self> {
        let c = Self::set_function_exact(n, table)?;
        c.validate()?;
        Ok(c)
    }

    /// A validated capacity from floating values (tolerance `1e-12`).
    pub fn from_values(n: usize, table: Vec<f64>) -> Result<Self> {
        let c = Self::set_function(n, table)?;
        c.validate()?;
        Ok(c)
    }

    /// Wraps an arbitrary table without checking the capacity axioms. Meant
    /// for falsifiers, which need non-monotone or non-normalized inputs.
    pub fn set_function(n: usize, table: Vec<f64>) -> Result<Self> {
        check_shape(n, table.len())?;
        if let Some(i) = table.iter().position(|v| !v.is_finite()) {
            return Err(Error::Domain(format!("table entry {i} is not finite")));
        }
        Ok(ExplicitCapacity { n, values: table, exact: None })
    }

    pub fn set_function_exact(n: usize, table: Vec<Q>) -> Result<Self> {
        check_shape(n, table.len())?;
        let values = table.iter().map(rational::to_f64).collect();
        Ok(ExplicitCapacity { n, values, exact: Some(table) })
    }

    /// Builds the table of `f` over all subsets.
    pub fn from_fn(n: usize, f: impl Fn(&AtomSet) -> f64) -> Result<Self> {
        check_shape(n, 1usize << n.min(63))?;
        let table = (0..1u64 << n).map(|b| f(&AtomSet::new(n, b))).collect();
        Self::from_values(n, table)
    }

    /// The counting-style additive measure with the given atom weights.
    pub fn additive(weights: &[f64]) -> Result<Self> {
        let n = weights.len();
        Self::from_fn(n, |s| s.members().iter().map(|&i| weights[i]).sum())
    }

    pub fn additive_rational(weights: &[Q]) -> Result<Self> {
        let n = weights.len();
        check_shape(n, 1usize << n.min(63))?;
        let table = (0..1u64 << n)
            .map(|b| AtomSet::new(n, b).members().iter().map(|&i| weights[i].clone()).sum())
            .collect();
        Self::from_rationals(n, table)
    }

    pub fn universe_size(&self) -> usize {
        self.n
    }

    pub fn value(&self, a: &AtomSet) -> f64 {
        self.values[a.bits() as usize]
    }

    pub fn exact(&self, a: &AtomSet) -> Option<Q> {
        self.exact.as_ref().map(|t| t[a.bits() as usize].clone())
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn exact_values(&self) -> Option<&[Q]> {
        self.exact.as_deref()
    }

    pub fn total_mass(&self) -> f64 {
        *self.values.last().expect("tables are never empty")
    }

    /// Checks `μ(∅) = 0` and monotonicity along single-atom extensions.
    pub fn validate(&self) -> Result<()> {
        if let Some(t) = &self.exact {
            if !t[0].is_zero() {
                return Err(Error::Precondition(format!("μ(∅) = {} is not zero", rational::format(&t[0]))));
            }
        } else if self.values[0].abs() > TABLE_TOL {
            return Err(Error::Precondition(format!("μ(∅) = {} is not zero", self.values[0])));
        }
        for b in 0..self.values.len() {
            for i in 0..self.n {
                let bit = 1usize << i;
                if b & bit != 0 {
                    continue;
                }
                let bad = match &self.exact {
                    Some(t) => t[b | bit] < t[b],
                    None => self.values[b | bit] < self.values[b] - TABLE_TOL,
                };
                if bad {
                    return Err(Error::Precondition(format!(
                        "table is not monotone: adding atom {i} to {:?} lowers the value",
                        AtomSet::new(self.n, b as u64).members()
                    )));
                }
            }
        }
        Ok(())
    }
}

fn check_shape(n: usize, len: usize) -> Result<()> {
    if n > MAX_EXPLICIT_ATOMS {
        return Err(Error::Domain(format!("explicit tables are limited to {MAX_EXPLICIT_ATOMS} atoms, got {n}")));
    }
    if len != 1usize << n {
        return Err(Error::Domain(format!("a table over {n} atoms needs {} entries, got {len}", 1usize << n)));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::q;

    #[test]
    fn rejects_bad_tables() {
        assert!(ExplicitCapacity::from_values(2, vec![0.0, 0.5, 0.5]).is_err());
        assert!(ExplicitCapacity::from_values(2, vec![0.1, 0.5, 0.5, 1.0]).is_err());
        assert!(ExplicitCapacity::from_values(2, vec![0.0, 0.5, 0.9, 0.8]).is_err());
        assert!(ExplicitCapacity::from_rationals(1, vec![q(0, 1), q(-1, 2)]).is_err());
        assert!(ExplicitCapacity::set_function(2, vec![0.0, 0.5, 0.9, 0.8]).is_ok());
        assert!(ExplicitCapacity::set_function(21, vec![]).is_err());
    }

    #[test]
    fn additive_tables() {
        let c = ExplicitCapacity::additive_rational(&[q(1, 2), q(1, 3), q(1, 6)]).unwrap();
        assert_eq!(c.exact(&AtomSet::full(3)).unwrap(), q(1, 1));
        assert_eq!(c.exact(&AtomSet::new(3, 0b101)).unwrap(), q(2, 3));
        let f = ExplicitCapacity::additive(&[0.25, 0.75]).unwrap();
        assert_eq!(f.total_mass(), 1.0);
        assert!(f.exact(&AtomSet::full(2)).is_none());
    }
}
