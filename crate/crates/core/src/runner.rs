//! Executes the checks listed in a scenario and collects a report.

use std::time::Instant;

use serde_json::{json, Value};

use crate::capacity::{check_property, split, CheckOptions, Property};
use crate::choquet::{
    asymmetric_integral, asymmetric_integral_exact, choquet_integral, choquet_integral_exact, jensen_scalar, Allocation,
};
use crate::convexsep::Price;
use crate::economy::{
    characterize_core, core_check_simple, improvement_oracle, lc_to_walras, walras_check, CoreVerdict, Economy, LcToWalras,
    Mode, WalrasCertificate,
};
use crate::error::{Error, Result};
use crate::io::{region_json, AllocationSpec, CheckSpec, Num, RegionSpec, Scenario};
use crate::rational;
use crate::report::{exact, exacts, matrix, num, nums, obj, CheckReport, Report, Verdict};

pub const DEFAULT_GRID: usize = 16;

/// Command-line overrides applied to every check.
#[derive(Clone, Debug, Default)]
pub struct RunOptions {
    pub seed: Option<u64>,
    pub grid: Option<usize>,
    pub tol: Option<f64>,
}

struct Ctx<'a> {
    scenario: &'a Scenario,
    seed: u64,
    grid: usize,
    tol: Option<f64>,
}

struct Outcome {
    pass: bool,
    tag: &'static str,
    values: Value,
    witness: Option<Value>,
    seeded: bool,
}

impl Outcome {
    fn new(pass: bool, tag: &'static str, values: Value, witness: Value) -> Self {
        Outcome { pass, tag, values, witness: (!pass).then_some(witness), seeded: false }
    }

    fn seeded(mut self) -> Self {
        self.seeded = true;
        self
    }
}

pub fn run_scenario(scenario: &Scenario, opts: &RunOptions) -> Result<Report> {
    let ctx = Ctx {
        scenario,
        seed: opts.seed.or(scenario.seed).unwrap_or(0),
        grid: opts.grid.unwrap_or(DEFAULT_GRID),
        tol: opts.tol,
    };
    let mut checks = Vec::with_capacity(scenario.checks.len());
    for (i, spec) in scenario.checks.iter().enumerate() {
        let start = Instant::now();
        let out = run_check(&ctx, spec).map_err(|e| match e {
            Error::Input(msg) => Error::Parse { path: format!("checks[{i}]"), msg },
            other => other,
        })?;
        checks.push(CheckReport {
            name: spec.name().to_string(),
            verdict: Verdict::from_pass(out.pass),
            tag: out.tag.to_string(),
            witness: out.witness,
            values: out.values,
            seed: out.seeded.then_some(ctx.seed),
            elapsed_ms: (start.elapsed().as_secs_f64() * 1e6).round() / 1e3,
        });
    }
    Ok(Report::new(checks))
}

fn run_check(ctx: &Ctx, spec: &CheckSpec) -> Result<Outcome> {
    match spec {
        CheckSpec::CapacityCheck { property, samples } => capacity_check(ctx, *property, *samples),
        CheckSpec::SubmodularPair { a, b } => submodular_pair(ctx, a, b),
        CheckSpec::Split { region, t } => split_check(ctx, region.as_ref(), t),
        CheckSpec::Integrate { over, expected, asymmetric } => integrate(ctx, over.as_ref(), expected.as_ref(), *asymmetric),
        CheckSpec::Jensen { phi } => {
            let mu = ctx.scenario.capacity()?;
            let f = ctx.scenario.function(mu.universe())?;
            let v = jensen_scalar(&mu, &f, &phi.build()?)?;
            Ok(Outcome::new(
                v.pass,
                "jensen-inequality",
                obj([
                    ("lhs", num(v.lhs)),
                    ("rhs", num(v.rhs)),
                    ("slack", num(v.slack)),
                    ("normalization", num(v.normalization)),
                ]),
                obj([("slack", num(v.slack))]),
            ))
        }
        CheckSpec::Feasibility { allocation } => {
            let eco = ctx.scenario.economy()?;
            let f = allocation_of(&eco, allocation.as_ref())?;
            let v = eco.feasibility(&f)?;
            Ok(Outcome::new(
                v.pass,
                "feasibility",
                obj([
                    ("aggregate", nums(&v.aggregate)),
                    ("endowment_aggregate", nums(&v.endowment_aggregate)),
                    ("residual", nums(&v.residual)),
                ]),
                obj([("residual", nums(&v.residual))]),
            ))
        }
        CheckSpec::CoreCheck { allocation } => {
            let eco = ctx.scenario.economy()?;
            let f = allocation_of(&eco, allocation.as_ref())?;
            let v = core_check_simple(&eco, &f)?;
            let witness = match v.worse {
                Some(i) => obj([
                    ("worse_block", json!(i)),
                    ("utility", num(v.utilities[i])),
                    ("endowment_utility", num(v.endowment_utilities[i])),
                ]),
                None => obj([("reason", json!("no block is exactly as well off as at its endowment"))]),
            };
            Ok(Outcome::new(
                v.pass,
                "simple-core-test",
                obj([
                    ("utilities", nums(&v.utilities)),
                    ("endowment_utilities", nums(&v.endowment_utilities)),
                    ("equal_blocks", json!(v.equal)),
                ]),
                witness,
            ))
        }
        CheckSpec::Walras { allocation, price } => {
            let eco = ctx.scenario.economy()?;
            let f = allocation_of(&eco, allocation.as_ref())?;
            match price {
                Some(p) => {
                    let p = parse_price(p, eco.dim())?;
                    let c = walras_check(&eco, &f, &p)?;
                    Ok(Outcome::new(c.pass, "walras-equilibrium", certificate_json(&c), failure_json(&c)))
                }
                None => {
                    let l = lc_to_walras(&eco, &f, ctx.grid)?;
                    Ok(lc_outcome(&l, "walras-equilibrium"))
                }
            }
        }
        CheckSpec::Oracle { allocation, mode, grid } => {
            let eco = ctx.scenario.economy()?;
            let f = allocation_of(&eco, allocation.as_ref())?;
            let mode: Mode = mode.map_or(Mode::Weak, Into::into);
            let v = improvement_oracle(&eco, &f, mode, grid.unwrap_or(ctx.grid))?;
            let pass = !v.is_improved();
            let values = verdict_json(&v);
            Ok(Outcome::new(pass, "coalition-improvement", values.clone(), values))
        }
        CheckSpec::LcToWalras { allocation } => {
            let eco = ctx.scenario.economy()?;
            let f = allocation_of(&eco, allocation.as_ref())?;
            Ok(lc_outcome(&lc_to_walras(&eco, &f, ctx.grid)?, "large-core-to-walras"))
        }
        CheckSpec::Characterize {} => {
            let eco = ctx.scenario.economy()?;
            let c = characterize_core(&eco, ctx.seed)?;
            let prices: Vec<Value> = c
                .certificates
                .iter()
                .map(|l| l.price.as_ref().map_or(Value::Null, price_json))
                .collect();
            let failing = c.certificates.iter().position(|l| !l.pass);
            let witness = match failing {
                Some(k) => obj([
                    ("member", matrix(&c.members[k])),
                    ("failure", json!(c.certificates[k].failure)),
                ]),
                None => obj([("reason", json!("no core member was found"))]),
            };
            Ok(Outcome::new(
                c.pass(),
                "core-equals-walras",
                obj([
                    ("description", json!(c.description)),
                    ("unique", json!(c.unique)),
                    ("members", Value::Array(c.members.iter().map(|m| matrix(m)).collect())),
                    ("prices", Value::Array(prices)),
                    ("non_members_rejected", json!(c.non_members_rejected)),
                ]),
                witness,
            )
            .seeded())
        }
    }
}

fn capacity_check(ctx: &Ctx, property: Option<Property>, samples: Option<usize>) -> Result<Outcome> {
    let mu = ctx.scenario.capacity()?;
    let mut opts = CheckOptions { seed: ctx.seed, tol: ctx.tol, ..CheckOptions::default() };
    if let Some(s) = samples {
        opts.samples = s;
    }
    let props: Vec<Property> = property.map_or_else(|| Property::ALL.to_vec(), |p| vec![p]);
    let mut values = serde_json::Map::new();
    let mut witness = None;
    let mut sampled = false;
    for p in props {
        let v = check_property(&mu, p, &opts)?;
        sampled |= v.seed.is_some();
        values.insert(
            p.name().to_string(),
            obj([("pass", json!(v.pass)), ("checked", json!(v.checked)), ("exhaustive", json!(v.exhaustive))]),
        );
        if witness.is_none() {
            if let Some((a, b)) = &v.witness {
                witness = Some(obj([
                    ("property", json!(p.name())),
                    ("a", region_json(a)),
                    ("b", region_json(b)),
                    ("violation", num(v.violation)),
                ]));
            }
        }
    }
    let pass = witness.is_none();
    let mut out = Outcome::new(pass, "capacity-properties", Value::Object(values), witness.unwrap_or(Value::Null));
    out.seeded = sampled;
    Ok(out)
}

fn submodular_pair(ctx: &Ctx, a: &RegionSpec, b: &RegionSpec) -> Result<Outcome> {
    let mu = ctx.scenario.capacity()?;
    let (a, b) = (a.build(mu.universe())?, b.build(mu.universe())?);
    let (union, inter) = (a.union(&b)?, a.intersect(&b)?);
    let lhs = mu.evaluate(&union)? + mu.evaluate(&inter)?;
    let rhs = mu.evaluate(&a)? + mu.evaluate(&b)?;
    let tol = ctx.tol.unwrap_or(1e-12) * rhs.abs().max(1.0);
    Ok(Outcome::new(
        lhs <= rhs + tol,
        "submodular-pair",
        obj([("union_plus_intersection", num(lhs)), ("sum", num(rhs)), ("gap", num(rhs - lhs))]),
        obj([("a", region_json(&a)), ("b", region_json(&b)), ("excess", num(lhs - rhs))]),
    ))
}

fn split_check(ctx: &Ctx, region: Option<&RegionSpec>, t: &Num) -> Result<Outcome> {
    let mu = ctx.scenario.capacity()?;
    let a = match region {
        Some(r) => r.build(mu.universe())?,
        None => mu.universe().full(),
    };
    let t_val = t.value()?;
    let a_t = split(&mu, &a, t_val)?;
    let (whole, part) = (mu.evaluate(&a)?, mu.evaluate(&a_t)?);
    let target = t_val * whole;
    let error = (part - target).abs();
    let tol = ctx.tol.unwrap_or(crate::capacity::EPS_SPLIT) * whole.max(1.0);
    let inside = a_t.is_subset_of(&a)?;
    Ok(Outcome::new(
        inside && error <= tol,
        "semiconvex-split",
        obj([
            ("t", num(t_val)),
            ("measure", num(whole)),
            ("split_measure", num(part)),
            ("target", num(target)),
            ("error", num(error)),
            ("split", region_json(&a_t)),
        ]),
        obj([("error", num(error)), ("inside", json!(inside)), ("split", region_json(&a_t))]),
    ))
}

fn integrate(ctx: &Ctx, over: Option<&RegionSpec>, expected: Option<&Num>, asymmetric: bool) -> Result<Outcome> {
    let mu = ctx.scenario.capacity()?;
    let f = ctx.scenario.function(mu.universe())?;
    let (value, exact_value) = if asymmetric {
        if over.is_some() {
            return Err(Error::Input("the asymmetric integral is taken over the whole space".into()));
        }
        (asymmetric_integral(&mu, &f)?, asymmetric_integral_exact(&mu, &f)?)
    } else {
        let e = match over {
            Some(r) => r.build(mu.universe())?,
            None => mu.universe().full(),
        };
        (choquet_integral(&mu, &f, &e)?, choquet_integral_exact(&mu, &f, &e)?)
    };
    let mut values = obj([("value", num(value))]);
    if let Some(q) = &exact_value {
        values["exact"] = exact(q);
    }
    let (pass, witness) = match expected {
        None => (true, Value::Null),
        Some(x) => {
            let want = x.exact()?;
            let pass = match &exact_value {
                Some(q) if ctx.tol.is_none() => *q == want,
                _ => {
                    let w = rational::to_f64(&want);
                    (value - w).abs() <= ctx.tol.unwrap_or(1e-12) * w.abs().max(1.0)
                }
            };
            values["expected"] = exact(&want);
            (pass, obj([("value", num(value)), ("expected", exact(&want))]))
        }
    };
    Ok(Outcome::new(pass, "choquet-integral", values, witness))
}

fn allocation_of(eco: &Economy, spec: Option<&AllocationSpec>) -> Result<Allocation> {
    match spec {
        Some(s) => s.build(eco),
        None => Ok(eco.endowment_allocation()),
    }
}

fn parse_price(p: &[Num], dim: usize) -> Result<Price> {
    if p.len() != dim {
        return Err(Error::Input(format!("price has {} coordinates, the economy has {dim} goods", p.len())));
    }
    let q = p.iter().map(Num::exact).collect::<Result<Vec<_>>>()?;
    Price::from_exact(q).map_err(|e| Error::Input(e.to_string()))
}

fn price_json(p: &Price) -> Value {
    match &p.exact {
        Some(q) => obj([("p", nums(&p.p)), ("exact", exacts(q))]),
        None => obj([("p", nums(&p.p))]),
    }
}

fn certificate_json(c: &WalrasCertificate) -> Value {
    let blocks: Vec<Value> = c
        .blocks
        .iter()
        .map(|b| {
            obj([
                ("spent", num(b.spent)),
                ("limit", num(b.limit)),
                ("best", b.best.map_or(Value::Null, num)),
                ("current", b.current.map_or(Value::Null, num)),
                ("gap", num(b.gap)),
                ("pass", json!(b.pass)),
            ])
        })
        .collect();
    obj([
        ("price", price_json(&c.price)),
        ("bundles", matrix(&c.bundles)),
        ("feasibility_residual", num(c.feasibility_residual)),
        ("averaged", json!(c.averaged)),
        ("blocks", Value::Array(blocks)),
    ])
}

fn failure_json(c: &WalrasCertificate) -> Value {
    let worst = c
        .blocks
        .iter()
        .enumerate()
        .filter(|(_, b)| !b.pass)
        .max_by(|x, y| x.1.gap.total_cmp(&y.1.gap))
        .map(|(i, b)| obj([("block", json!(i)), ("gap", num(b.gap))]));
    obj([("failure", json!(c.failure)), ("worst_block", worst.unwrap_or(Value::Null))])
}

fn verdict_json(v: &CoreVerdict) -> Value {
    let improving: Vec<Value> = v.improving.iter().map(|g| g.as_ref().map_or(Value::Null, |x| nums(x))).collect();
    obj([
        ("mode", json!(v.mode.name())),
        ("grid", json!(v.grid)),
        ("improved", json!(v.is_improved())),
        ("masses", nums(&v.masses)),
        ("improving", Value::Array(improving)),
        (
            "found_by",
            json!(v.found_by.map(|f| match f {
                crate::economy::FoundBy::Grid => "grid",
                crate::economy::FoundBy::OffGrid => "off_grid",
            })),
        ),
        ("strong_witness", json!(v.strong_witness)),
        ("coalition", v.coalition.as_ref().map_or(Value::Null, region_json)),
        ("verified", json!(v.verified)),
    ])
}

fn lc_outcome(l: &LcToWalras, tag: &'static str) -> Outcome {
    let mut values = obj([
        ("price", l.price.as_ref().map_or(Value::Null, price_json)),
        ("min_slack", l.min_slack.map_or(Value::Null, num)),
        ("gammas", l.gamma.as_ref().map_or(Value::Null, |g| nums(&g.gammas))),
        ("balance_gaps", nums(&l.balance_gaps)),
    ]);
    if let Some(c) = &l.certificate {
        values["certificate"] = certificate_json(c);
    }
    let mut witness = obj([("failure", json!(l.failure))]);
    if let Some(w) = &l.witness {
        witness["negative_point"] = nums(w);
    }
    if let Some(v) = &l.improvement {
        witness["improvement"] = verdict_json(v);
    }
    if let Some(c) = l.certificate.as_ref().filter(|c| !c.pass) {
        witness["certificate"] = failure_json(c);
    }
    Outcome::new(l.pass, tag, values, witness)
}

