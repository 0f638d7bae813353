//! Pure exchange economies whose agents form finitely many blocks of a
//! partitioned capacity: feasibility, budgets, the improvement oracle and
//! the core and Walras checks.

mod core;
pub mod instances;
mod oracle;
mod upper;
mod walras;

pub use self::core::{characterize_core, core_check_simple, CoreCharacterization, CoreSimpleVerdict};
pub use oracle::{improvement_oracle, verify_improvement, CoreStatus, CoreVerdict, FoundBy, Mode, EPS_STRICT};
pub use upper::{cobb_douglas_level_samples, polyhedral_vertices, upper_set, COBB_DOUGLAS_SAMPLES};
pub use walras::{
    preferred_gap_cone,
    budget_max, lc_to_walras, walras_check, BlockEvidence, BudgetOutcome, LcToWalras, WalrasCertificate,
};

use serde::Serialize;

use crate::capacity::{Capacity, PartitionedCapacity};
use crate::choquet::{average_allocation, is_block_constant, vector_integral, Allocation};
use crate::error::{Error, Result};
use crate::regions::Region;
use crate::utility::{CobbDouglas, PolyhedralUtility};

/// How an agent ranks bundles.
#[derive(Clone, Debug, PartialEq)]
pub enum Preference {
    Polyhedral(PolyhedralUtility),
    CobbDouglas(CobbDouglas),
    /// `u(x) = c·x` with `c ≥ 0`.
    Linear(Vec<f64>),
    /// `x ≻ y` iff `xⱼ > yⱼ` for every listed coordinate (0-based).
    CoordinateList(Vec<usize>),
}

impl Preference {
    pub fn linear(c: Vec<f64>) -> Result<Self> {
        if c.is_empty() || c.iter().any(|v| !(v.is_finite() && *v >= 0.0)) {
            return Err(Error::MalformedUtility("linear weights must be finite and nonnegative".into()));
        }
        Ok(Preference::Linear(c))
    }

    pub fn coordinate_list(mut j: Vec<usize>) -> Result<Self> {
        j.sort_unstable();
        j.dedup();
        if j.is_empty() {
            return Err(Error::UnsupportedPreference("a coordinate list needs at least one coordinate".into()));
        }
        Ok(Preference::CoordinateList(j))
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Preference::Polyhedral(_) => "polyhedral_utility",
            Preference::CobbDouglas(_) => "cobb_douglas",
            Preference::Linear(_) => "linear",
            Preference::CoordinateList(_) => "coordinate_list",
        }
    }

    fn check_dim(&self, n: usize) -> Result<()> {
        let ok = match self {
            Preference::Polyhedral(u) => u.dim() == n,
            Preference::CobbDouglas(u) => u.dim() == n,
            Preference::Linear(c) => c.len() == n,
            Preference::CoordinateList(j) => j.iter().all(|&k| k < n),
        };
        if ok {
            Ok(())
        } else {
            Err(Error::Domain(format!("{} preference does not fit {n} commodities", self.kind())))
        }
    }

    /// Utility value, or `None` for a coordinate list.
    pub fn utility(&self, x: &[f64]) -> Option<f64> {
        match self {
            Preference::Polyhedral(u) => Some(u.eval(x)),
            Preference::CobbDouglas(u) => Some(u.eval(x)),
            Preference::Linear(c) => Some(c.iter().zip(x).map(|(a, b)| a * b).sum()),
            Preference::CoordinateList(_) => None,
        }
    }

    pub fn has_utility(&self) -> bool {
        !matches!(self, Preference::CoordinateList(_))
    }

    /// Strict preference `x ≻ y`.
    pub fn prefers(&self, x: &[f64], y: &[f64]) -> bool {
        match self {
            Preference::CoordinateList(j) => j.iter().all(|&k| x[k] > y[k]),
            _ => self.utility(x) > self.utility(y),
        }
    }

    /// Positively homogeneous of degree one.
    pub fn is_homogeneous(&self) -> bool {
        match self {
            Preference::Polyhedral(u) => u.is_homogeneous(),
            Preference::CobbDouglas(_) | Preference::Linear(_) => true,
            Preference::CoordinateList(_) => false,
        }
    }
}

/// Result of the feasibility test `μ_f(X) = μ_e(X)`.
#[derive(Clone, Debug, Serialize)]
pub struct FeasibilityVerdict {
    pub pass: bool,
    pub aggregate: Vec<f64>,
    pub endowment_aggregate: Vec<f64>,
    /// `μ_f(X) − μ_e(X)` per commodity.
    pub residual: Vec<f64>,
}

/// An exchange economy over the blocks of a partitioned capacity. Each
/// block carries one endowment bundle and one preference.
#[derive(Clone, Debug)]
pub struct Economy {
    capacity: Capacity,
    endowments: Vec<Vec<f64>>,
    preferences: Vec<Preference>,
    masses: Vec<f64>,
    dim: usize,
}

impl Economy {
    pub fn new(capacity: Capacity, endowments: Vec<Vec<f64>>, preferences: Vec<Preference>) -> Result<Self> {
        let part = capacity
            .as_partitioned()
            .ok_or_else(|| Error::UnsupportedCapacity("an economy needs a partitioned capacity".into()))?;
        let r = part.len();
        if endowments.len() != r || preferences.len() != r {
            return Err(Error::Domain(format!(
                "{r} blocks but {} endowments and {} preferences",
                endowments.len(),
                preferences.len()
            )));
        }
        let dim = endowments[0].len();
        if dim == 0 {
            return Err(Error::Domain("bundles need at least one commodity".into()));
        }
        for (i, e) in endowments.iter().enumerate() {
            if e.len() != dim {
                return Err(Error::Domain(format!("endowment {i} has {} commodities, expected {dim}", e.len())));
            }
            if e.iter().any(|v| !(v.is_finite() && *v > 0.0)) {
                return Err(Error::Domain(format!("endowment {i} must be strictly positive")));
            }
        }
        for p in &preferences {
            p.check_dim(dim)?;
        }
        let lists: Vec<&Vec<usize>> = preferences
            .iter()
            .filter_map(|p| if let Preference::CoordinateList(j) = p { Some(j) } else { None })
            .collect();
        if !lists.is_empty() {
            if lists.len() != r {
                return Err(Error::UnsupportedPreference(
                    "coordinate lists cannot be mixed with utility preferences".into(),
                ));
            }
            if common_coordinates(&lists).is_empty() {
                return Err(Error::UnsupportedPreference("the coordinate lists have no common coordinate".into()));
            }
        }
        let masses = part.block_masses();
        if let Some(i) = masses.iter().position(|m| !(*m > 0.0)) {
            return Err(Error::ZeroMeasureBlock(i));
        }
        Ok(Economy { capacity, endowments, preferences, masses, dim })
    }

    pub fn capacity(&self) -> &Capacity {
        &self.capacity
    }

    pub fn partition(&self) -> &PartitionedCapacity {
        self.capacity.as_partitioned().expect("checked at construction")
    }

    pub fn blocks(&self) -> &[Region] {
        self.partition().blocks()
    }

    pub fn len(&self) -> usize {
        self.masses.len()
    }

    pub fn is_empty(&self) -> bool {
        self.masses.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn masses(&self) -> &[f64] {
        &self.masses
    }

    pub fn endowment(&self, i: usize) -> &[f64] {
        &self.endowments[i]
    }

    pub fn endowments(&self) -> &[Vec<f64>] {
        &self.endowments
    }

    pub fn preference(&self, i: usize) -> &Preference {
        &self.preferences[i]
    }

    pub fn preferences(&self) -> &[Preference] {
        &self.preferences
    }

    /// Coordinates shared by every coordinate list, when all preferences
    /// are of that kind.
    pub fn common_coordinates(&self) -> Option<Vec<usize>> {
        let lists: Vec<&Vec<usize>> = self
            .preferences
            .iter()
            .filter_map(|p| if let Preference::CoordinateList(j) = p { Some(j) } else { None })
            .collect();
        (lists.len() == self.len()).then(|| common_coordinates(&lists))
    }

    pub fn endowment_allocation(&self) -> Allocation {
        self.simple_allocation(&self.endowments).expect("endowments fit the blocks")
    }

    /// The allocation giving `bundles[i]` to every agent of block `i`.
    pub fn simple_allocation(&self, bundles: &[Vec<f64>]) -> Result<Allocation> {
        if bundles.len() != self.len() || bundles.iter().any(|b| b.len() != self.dim) {
            return Err(Error::Domain(format!("expected {} bundles of {} commodities", self.len(), self.dim)));
        }
        Allocation::block_constant(self.blocks(), bundles)
    }

    /// `Σᵢ μ(Eᵢ)·eᵢ`, the aggregate endowment.
    pub fn total_endowment(&self) -> Vec<f64> {
        (0..self.dim).map(|j| self.endowments.iter().zip(&self.masses).map(|(e, m)| e[j] * m).sum()).collect()
    }

    pub fn aggregate(&self, f: &Allocation) -> Result<Vec<f64>> {
        vector_integral(&self.capacity, f, &self.capacity.universe().full())
    }

    pub fn feasibility(&self, f: &Allocation) -> Result<FeasibilityVerdict> {
        if !f.is_nonnegative() {
            return Err(Error::Domain("allocations must be nonnegative".into()));
        }
        let aggregate = self.aggregate(f)?;
        let endowment_aggregate = self.aggregate(&self.endowment_allocation())?;
        let residual: Vec<f64> = aggregate.iter().zip(&endowment_aggregate).map(|(a, b)| a - b).collect();
        let pass = residual
            .iter()
            .zip(&endowment_aggregate)
            .all(|(d, b)| d.abs() <= 1e-12 * (1.0 + b.abs()));
        Ok(FeasibilityVerdict { pass, aggregate, endowment_aggregate, residual })
    }

    pub fn average(&self, f: &Allocation) -> Result<Allocation> {
        average_allocation(&self.capacity, f)
    }

    pub fn is_simple(&self, f: &Allocation) -> Result<bool> {
        is_block_constant(self.partition(), f)
    }

    /// Block bundles of a simple allocation.
    pub fn bundles(&self, f: &Allocation) -> Result<Vec<Vec<f64>>> {
        if !self.is_simple(f)? {
            return Err(Error::Precondition("allocation is not simple; average it first".into()));
        }
        Ok(self
            .blocks()
            .iter()
            .map(|b| f.values_on(b).map(|v| v.first().map(|(_, x)| x.clone()).unwrap_or_else(|| vec![0.0; self.dim])))
            .collect::<Result<Vec<_>>>()?)
    }
}

fn common_coordinates(lists: &[&Vec<usize>]) -> Vec<usize> {
    let mut out: Vec<usize> = lists[0].clone();
    for l in &lists[1..] {
        out.retain(|k| l.contains(k));
    }
    out
}
