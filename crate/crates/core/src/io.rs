//! JSON descriptors for scenarios: capacities, regions, step functions,
//! economies and the list of checks to run. Numbers may be JSON numbers or
//! exact strings such as `"7/10"`.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::capacity::{Capacity, ExplicitCapacity, PartitionedCapacity, ProductSectionCapacity, Property};
use crate::choquet::{Allocation, StepFunction};
use crate::concave::ConcaveFn;
use crate::economy::instances::{atomic_capacity, strip_capacity};
use crate::economy::{Economy, Mode, Preference};
use crate::error::{Error, Result};
use crate::rational::{self, Q};
use crate::regions::{Rect, RectUnion, Region, Universe};
use crate::utility::{CobbDouglas, PolyhedralUtility};

/// A number given either as a JSON number or as a rational string.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Num {
    Float(f64),
    Text(String),
}

impl Num {
    pub fn exact(&self) -> Result<Q> {
        match self {
            Num::Float(x) if x.is_finite() => Ok(rational::from_f64(*x)),
            Num::Float(x) => Err(Error::Input(format!("{x} is not a finite number"))),
            Num::Text(s) => rational::parse(s),
        }
    }

    pub fn value(&self) -> Result<f64> {
        match self {
            Num::Float(x) => self.exact().map(|_| *x),
            Num::Text(_) => self.exact().map(|q| rational::to_f64(&q)),
        }
    }
}

fn floats(v: &[Num]) -> Result<Vec<f64>> {
    v.iter().map(Num::value).collect()
}

fn at<T>(path: &str, r: Result<T>) -> Result<T> {
    r.map_err(|e| match e {
        Error::Input(m) => Error::Parse { path: path.to_string(), msg: m },
        Error::Parse { path: inner, msg } => Error::Parse { path: format!("{path}.{inner}"), msg },
        other => Error::Parse { path: path.to_string(), msg: other.to_string() },
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum GammaSpec {
    Sqrt,
    Log1p,
    Power(f64),
    Linear(f64),
    PiecewiseLinear(Vec<(f64, f64)>),
}

impl GammaSpec {
    pub fn build(&self) -> Result<ConcaveFn> {
        let g = match self {
            GammaSpec::Sqrt => ConcaveFn::Sqrt,
            GammaSpec::Log1p => ConcaveFn::Log1p,
            GammaSpec::Power(p) => ConcaveFn::Power(*p),
            GammaSpec::Linear(c) => ConcaveFn::Linear(*c),
            GammaSpec::PiecewiseLinear(pts) => ConcaveFn::PiecewiseLinear(pts.clone()),
        };
        g.validate().map_err(|e| Error::Input(e.to_string()))?;
        Ok(g)
    }
}

/// `{"atoms": [0, 2]}` or `{"rects": [[x0, x1, y0, y1], …]}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum RegionSpec {
    Atoms(Vec<usize>),
    Rects(Vec<[Num; 4]>),
}

impl RegionSpec {
    pub fn build(&self, universe: Universe) -> Result<Region> {
        match (self, universe) {
            (RegionSpec::Atoms(m), Universe::Atoms(n)) => Region::atoms(n, m).map_err(|e| Error::Input(e.to_string())),
            (RegionSpec::Rects(rs), Universe::Square) => {
                let rects = rs
                    .iter()
                    .map(|[a, b, c, d]| {
                        Rect::new(a.exact()?, b.exact()?, c.exact()?, d.exact()?).map_err(|e| Error::Input(e.to_string()))
                    })
                    .collect::<Result<Vec<_>>>()?;
                Ok(Region::Rects(RectUnion::from_rects(rects)))
            }
            _ => Err(Error::Input("region does not live on the capacity's universe".into())),
        }
    }
}

pub fn region_json(r: &Region) -> Value {
    match r {
        Region::Atoms(a) => json!({ "atoms": a.members() }),
        Region::Rects(u) => {
            let rects: Vec<Value> = u
                .rects()
                .iter()
                .map(|r| json!([rational::format(&r.x0), rational::format(&r.x1), rational::format(&r.y0), rational::format(&r.y1)]))
                .collect();
            json!({ "rects": rects })
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum CapacitySpec {
    /// Values keyed by the bitmask of the set, atoms numbered from 0.
    Explicit { n: usize, table: BTreeMap<String, Num> },
    ProductSection {
        gamma: GammaSpec,
        #[serde(default)]
        strip: Option<[Num; 2]>,
        #[serde(default)]
        weight: Option<f64>,
    },
    Partitioned { blocks: Vec<RegionSpec>, parts: Vec<CapacitySpec> },
    Conjugate { of: Box<CapacitySpec> },
}

impl CapacitySpec {
    pub fn build(&self) -> Result<Capacity> {
        match self {
            CapacitySpec::Explicit { n, table } => {
                if *n > crate::capacity::MAX_EXPLICIT_ATOMS {
                    return Err(Error::Input(format!("{n} atoms exceed the explicit limit")));
                }
                let size = 1usize << n;
                let mut values: Vec<Option<Q>> = vec![None; size];
                for (k, v) in table {
                    let idx: usize = k.parse().map_err(|_| Error::Input(format!("table key {k:?} is not a bitmask")))?;
                    if idx >= size {
                        return Err(Error::Input(format!("table key {idx} is outside {n} atoms")));
                    }
                    values[idx] = Some(at(&format!("table.{k}"), v.exact())?);
                }
                let values = values
                    .into_iter()
                    .enumerate()
                    .map(|(i, v)| v.ok_or_else(|| Error::Input(format!("table misses set {i}"))))
                    .collect::<Result<Vec<_>>>()?;
                ExplicitCapacity::from_rationals(*n, values)
                    .map(Capacity::Explicit)
                    .map_err(|e| Error::Input(e.to_string()))
            }
            CapacitySpec::ProductSection { gamma, strip, weight } => {
                let g = at("gamma", gamma.build())?;
                let (x0, x1) = match strip {
                    Some([a, b]) => (a.exact()?, b.exact()?),
                    None => (rational::zero(), rational::one()),
                };
                ProductSectionCapacity::on_strip(g, x0, x1, weight.unwrap_or(1.0))
                    .map(Capacity::ProductSection)
                    .map_err(|e| Error::Input(e.to_string()))
            }
            CapacitySpec::Partitioned { blocks, parts } => {
                let parts = parts
                    .iter()
                    .enumerate()
                    .map(|(i, p)| at(&format!("parts[{i}]"), p.build()))
                    .collect::<Result<Vec<_>>>()?;
                let universe = parts.first().map(Capacity::universe).ok_or_else(|| Error::Input("no parts".into()))?;
                let blocks = blocks
                    .iter()
                    .enumerate()
                    .map(|(i, b)| at(&format!("blocks[{i}]"), b.build(universe)))
                    .collect::<Result<Vec<_>>>()?;
                PartitionedCapacity::new(blocks, parts)
                    .map(Capacity::Partitioned)
                    .map_err(|e| Error::Input(e.to_string()))
            }
            CapacitySpec::Conjugate { of } => Ok(at("of", of.build())?.conjugate()),
        }
    }
}

/// A scalar or a bundle.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ValueSpec {
    Scalar(Num),
    Vector(Vec<Num>),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PieceSpec {
    pub region: RegionSpec,
    pub value: ValueSpec,
}

/// Pieces on disjoint regions; the rest of the universe is 0.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StepSpec {
    pub pieces: Vec<PieceSpec>,
}

impl StepSpec {
    pub fn scalar(&self, universe: Universe) -> Result<StepFunction> {
        let pieces = self
            .pieces
            .iter()
            .enumerate()
            .map(|(i, p)| {
                let path = format!("pieces[{i}]");
                let v = match &p.value {
                    ValueSpec::Scalar(x) => at(&path, x.exact())?,
                    ValueSpec::Vector(_) => return at(&path, Err(Error::Input("expected a scalar value".into()))),
                };
                Ok((at(&path, p.region.build(universe))?, v))
            })
            .collect::<Result<Vec<_>>>()?;
        StepFunction::from_rationals(universe, pieces).map_err(|e| Error::Input(e.to_string()))
    }

    pub fn vector(&self, universe: Universe, dim: usize) -> Result<Allocation> {
        let pieces = self
            .pieces
            .iter()
            .enumerate()
            .map(|(i, p)| {
                let path = format!("pieces[{i}]");
                let v = match &p.value {
                    ValueSpec::Vector(v) => v.iter().map(Num::exact).collect::<Result<Vec<_>>>(),
                    ValueSpec::Scalar(x) if dim == 1 => x.exact().map(|q| vec![q]),
                    ValueSpec::Scalar(_) => Err(Error::Input("expected a bundle".into())),
                };
                Ok((at(&path, p.region.build(universe))?, at(&path, v)?))
            })
            .collect::<Result<Vec<_>>>()?;
        Allocation::from_rationals(universe, dim, pieces).map_err(|e| Error::Input(e.to_string()))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PieceUtilitySpec {
    pub slope: Vec<Num>,
    #[serde(default)]
    pub constant: Option<Num>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum PreferenceSpec {
    CobbDouglas { alpha: Vec<Num> },
    PolyhedralUtility { pieces: Vec<PieceUtilitySpec> },
    #[serde(alias = "common_linear_on_span")]
    Linear { c: Vec<Num> },
    /// Goods numbered from 0.
    CoordinateList { coords: Vec<usize> },
}

impl PreferenceSpec {
    pub fn build(&self) -> Result<Preference> {
        let p = match self {
            PreferenceSpec::CobbDouglas { alpha } => CobbDouglas::new(floats(alpha)?).map(Preference::CobbDouglas),
            PreferenceSpec::PolyhedralUtility { pieces } => {
                let m = pieces
                    .iter()
                    .map(|p| Ok((floats(&p.slope)?, p.constant.as_ref().map_or(Ok(0.0), Num::value)?)))
                    .collect::<Result<Vec<_>>>()?;
                PolyhedralUtility::new(m).map(Preference::Polyhedral)
            }
            PreferenceSpec::Linear { c } => Preference::linear(floats(c)?),
            PreferenceSpec::CoordinateList { coords } => Preference::coordinate_list(coords.clone()),
        };
        p.map_err(|e| Error::Input(e.to_string()))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BlockSpec {
    pub mass: Num,
    pub endowment: Vec<Num>,
    pub preference: PreferenceSpec,
}

/// How each block's capacity is built: a strip of the square carrying a
/// section distortion, or a handful of atoms carrying `m·γ(share)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum BlockCapacitySpec {
    ProductSection { gamma: GammaSpec },
    Atomic { atoms: usize, gamma: GammaSpec },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EconomySpec {
    pub blocks: Vec<BlockSpec>,
    pub capacity_per_block: BlockCapacitySpec,
}

impl EconomySpec {
    pub fn build(&self) -> Result<Economy> {
        if self.blocks.is_empty() {
            return Err(Error::Parse { path: "economy.blocks".into(), msg: "no blocks".into() });
        }
        let mut masses = Vec::new();
        let mut endowments = Vec::new();
        let mut prefs = Vec::new();
        for (i, b) in self.blocks.iter().enumerate() {
            let path = format!("economy.blocks[{i}]");
            masses.push(at(&format!("{path}.mass"), b.mass.value())?);
            endowments.push(at(&format!("{path}.endowment"), floats(&b.endowment))?);
            prefs.push(at(&format!("{path}.preference"), b.preference.build())?);
        }
        let mu = match &self.capacity_per_block {
            BlockCapacitySpec::ProductSection { gamma } => strip_capacity(&masses, at("economy.capacity_per_block", gamma.build())?),
            BlockCapacitySpec::Atomic { atoms, gamma } => {
                if *atoms == 0 || atoms * masses.len() > crate::capacity::MAX_EXPLICIT_ATOMS {
                    return Err(Error::Parse {
                        path: "economy.capacity_per_block.atoms".into(),
                        msg: format!("{atoms} atoms per block do not fit the explicit limit"),
                    });
                }
                atomic_capacity(&masses, *atoms, at("economy.capacity_per_block", gamma.build())?)
            }
        };
        let mu = at("economy.capacity_per_block", mu.map_err(|e| Error::Input(e.to_string())))?;
        at("economy", Economy::new(mu, endowments, prefs).map_err(|e| Error::Input(e.to_string())))
    }
}

/// Block bundles, or a step allocation over the ground set.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum AllocationSpec {
    Bundles(Vec<Vec<Num>>),
    Step(StepSpec),
}

impl AllocationSpec {
    pub fn build(&self, eco: &Economy) -> Result<Allocation> {
        match self {
            AllocationSpec::Bundles(b) => {
                let b = b.iter().map(|x| floats(x)).collect::<Result<Vec<_>>>()?;
                eco.simple_allocation(&b).map_err(|e| Error::Input(e.to_string()))
            }
            AllocationSpec::Step(s) => s.vector(eco.capacity().universe(), eco.dim()),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModeSpec {
    Weak,
    Strong,
}

impl From<ModeSpec> for Mode {
    fn from(m: ModeSpec) -> Mode {
        match m {
            ModeSpec::Weak => Mode::Weak,
            ModeSpec::Strong => Mode::Strong,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "kebab-case", deny_unknown_fields)]
pub enum CheckSpec {
    CapacityCheck {
        #[serde(default)]
        property: Option<Property>,
        #[serde(default)]
        samples: Option<usize>,
    },
    SubmodularPair { a: RegionSpec, b: RegionSpec },
    Split {
        #[serde(default)]
        region: Option<RegionSpec>,
        t: Num,
    },
    Integrate {
        #[serde(default)]
        over: Option<RegionSpec>,
        #[serde(default)]
        expected: Option<Num>,
        #[serde(default)]
        asymmetric: bool,
    },
    Jensen { phi: GammaSpec },
    Feasibility {
        #[serde(default)]
        allocation: Option<AllocationSpec>,
    },
    CoreCheck {
        #[serde(default)]
        allocation: Option<AllocationSpec>,
    },
    Walras {
        #[serde(default)]
        allocation: Option<AllocationSpec>,
        #[serde(default)]
        price: Option<Vec<Num>>,
    },
    Oracle {
        #[serde(default)]
        allocation: Option<AllocationSpec>,
        #[serde(default)]
        mode: Option<ModeSpec>,
        #[serde(default)]
        grid: Option<usize>,
    },
    LcToWalras {
        #[serde(default)]
        allocation: Option<AllocationSpec>,
    },
    Characterize {},
}

impl CheckSpec {
    pub fn name(&self) -> &'static str {
        match self {
            CheckSpec::CapacityCheck { .. } => "capacity-check",
            CheckSpec::SubmodularPair { .. } => "submodular-pair",
            CheckSpec::Split { .. } => "split",
            CheckSpec::Integrate { .. } => "integrate",
            CheckSpec::Jensen { .. } => "jensen",
            CheckSpec::Feasibility { .. } => "feasibility",
            CheckSpec::CoreCheck { .. } => "core-check",
            CheckSpec::Walras { .. } => "walras",
            CheckSpec::Oracle { .. } => "oracle",
            CheckSpec::LcToWalras { .. } => "lc-to-walras",
            CheckSpec::Characterize {} => "characterize",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub version: String,
    #[serde(default)]
    pub seed: Option<u64>,
    #[serde(default)]
    pub capacity: Option<CapacitySpec>,
    #[serde(default)]
    pub function: Option<StepSpec>,
    #[serde(default)]
    pub economy: Option<EconomySpec>,
    #[serde(default)]
    pub checks: Vec<CheckSpec>,
}

impl Scenario {
    /// Parses a scenario, reporting the JSON path of the first schema error.
    pub fn from_json(text: &str) -> Result<Self> {
        let de = &mut serde_json::Deserializer::from_str(text);
        serde_path_to_error::deserialize(de).map_err(|e| Error::Parse {
            path: e.path().to_string(),
            msg: e.inner().to_string(),
        })
    }

    pub fn from_path(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Input(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    /// The scenario's capacity, or the one underlying its economy.
    pub fn capacity(&self) -> Result<Capacity> {
        match (&self.capacity, &self.economy) {
            (Some(c), _) => at("capacity", c.build()),
            (None, Some(e)) => Ok(e.build()?.capacity().clone()),
            (None, None) => Err(Error::Input("scenario has no capacity".into())),
        }
    }

    pub fn economy(&self) -> Result<Economy> {
        self.economy.as_ref().ok_or_else(|| Error::Input("scenario has no economy".into()))?.build()
    }

    pub fn function(&self, universe: Universe) -> Result<StepFunction> {
        let f = self.function.as_ref().ok_or_else(|| Error::Input("scenario has no function".into()))?;
        at("function", f.scalar(universe))
    }
}
