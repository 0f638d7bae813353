//! Command-line front end. Every subcommand assembles a scenario, runs it
//! and prints the report; exit codes are 0 (all checks pass), 1 (some check
//! fails), 2 (bad input) and 3 (internal invariant breach).

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::de::DeserializeOwned;
use serde_json::{Map, Value};

use crate::error::{Error, Result};
use crate::io::{CheckSpec, Scenario};
use crate::report::Report;
use crate::runner::{run_scenario, RunOptions};

#[derive(Debug, Parser)]
#[command(name = "choquet-core", version, about = "Choquet integrals, cores and Walras equilibria on capacities")]
pub struct Cli {
    /// Seed for every randomized check.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Mass grid resolution for the coalition search.
    #[arg(long, global = true)]
    pub grid: Option<usize>,
    /// Absolute tolerance override for numeric comparisons.
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    /// Print a human-readable report instead of JSON.
    #[arg(long, global = true, conflicts_with = "json")]
    pub pretty: bool,
    /// Print the report as JSON (the default).
    #[arg(long, global = true)]
    pub json: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run every check listed in a scenario file.
    Run { scenario: PathBuf },
    #[command(subcommand)]
    Capacity(CapacityCmd),
    #[command(subcommand)]
    Choquet(ChoquetCmd),
    #[command(subcommand)]
    Economy(EconomyCmd),
    /// Run a bundled scenario; `demo list` prints the registry.
    Demo { name: String },
}

/// Where the objects come from: a scenario file, separate files, or both
/// (separate files override the scenario's payloads).
#[derive(Debug, Args)]
pub struct Sources {
    #[arg(long)]
    pub scenario: Option<PathBuf>,
    #[arg(long)]
    pub capacity: Option<PathBuf>,
    #[arg(long)]
    pub function: Option<PathBuf>,
    #[arg(long)]
    pub economy: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum CapacityCmd {
    /// Check monotonicity, subadditivity, submodularity and null-set stability.
    Check {
        #[command(flatten)]
        sources: Sources,
        #[arg(long)]
        property: Option<String>,
        #[arg(long)]
        samples: Option<usize>,
    },
    /// Find A_t ⊆ A with μ(A_t) = t·μ(A).
    Split {
        #[command(flatten)]
        sources: Sources,
        #[arg(long)]
        t: String,
        /// Region as JSON, e.g. '{"atoms":[0,1]}'.
        #[arg(long)]
        region: Option<String>,
    },
}

#[derive(Debug, Subcommand)]
pub enum ChoquetCmd {
    Integrate {
        #[command(flatten)]
        sources: Sources,
        #[arg(long)]
        region: Option<String>,
        #[arg(long)]
        expected: Option<String>,
        #[arg(long)]
        asymmetric: bool,
    },
    Jensen {
        #[command(flatten)]
        sources: Sources,
        /// `sqrt`, `log1p`, or JSON such as '{"power":0.5}'.
        #[arg(long, default_value = "sqrt")]
        phi: String,
    },
}

#[derive(Debug, Subcommand)]
pub enum EconomyCmd {
    CoreCheck {
        #[command(flatten)]
        sources: Sources,
        /// Block bundles as JSON; defaults to the endowment.
        #[arg(long)]
        allocation: Option<String>,
    },
    Walras {
        #[command(flatten)]
        sources: Sources,
        #[arg(long)]
        allocation: Option<String>,
        /// Price as JSON; derived from the allocation when absent.
        #[arg(long)]
        price: Option<String>,
    },
    Characterize {
        #[command(flatten)]
        sources: Sources,
    },
    Oracle {
        #[command(flatten)]
        sources: Sources,
        #[arg(long)]
        allocation: Option<String>,
        #[arg(long, default_value = "weak")]
        mode: String,
    },
}

pub struct Demo {
    pub name: &'static str,
    pub about: &'static str,
    pub scenario: &'static str,
}

pub const DEMOS: &[Demo] = &[
    Demo {
        name: "sqrt-section",
        about: "square-root section capacity: submodularity and splitting",
        scenario: include_str!("demos/sqrt-section.json"),
    },
    Demo {
        name: "collinear-core",
        about: "two Cobb-Douglas blocks with collinear endowments: the core is the endowment",
        scenario: include_str!("demos/collinear-core.json"),
    },
    Demo {
        name: "coordinate-list",
        about: "blocks caring only about listed goods, supported by a common-good price",
        scenario: include_str!("demos/coordinate-list.json"),
    },
];

pub fn demo(name: &str) -> Result<Scenario> {
    let d = DEMOS.iter().find(|d| d.name == name).ok_or_else(|| {
        let names: Vec<&str> = DEMOS.iter().map(|d| d.name).collect();
        Error::Input(format!("unknown demo {name:?}; available: {}", names.join(", ")))
    })?;
    Scenario::from_json(d.scenario)
}

fn parse_file<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Input(format!("cannot read {}: {e}", path.display())))?;
    let de = &mut serde_json::Deserializer::from_str(&text);
    serde_path_to_error::deserialize(de).map_err(|e| Error::Parse {
        path: format!("{}:{}", path.display(), e.path()),
        msg: e.inner().to_string(),
    })
}

fn load(sources: &Sources) -> Result<Scenario> {
    let mut s = match &sources.scenario {
        Some(p) => Scenario::from_path(p)?,
        None => Scenario { version: "1".into(), seed: None, capacity: None, function: None, economy: None, checks: vec![] },
    };
    s.checks.clear();
    if let Some(p) = &sources.capacity {
        s.capacity = Some(parse_file(p)?);
    }
    if let Some(p) = &sources.function {
        s.function = Some(parse_file(p)?);
    }
    if let Some(p) = &sources.economy {
        s.economy = Some(parse_file(p)?);
    }
    Ok(s)
}

/// A flag value given as JSON, or as a bare word taken to be a string.
fn json_arg(flag: &str, raw: &str) -> Result<Value> {
    match serde_json::from_str(raw) {
        Ok(v) => Ok(v),
        Err(_) if raw.chars().all(|c| c.is_ascii_alphanumeric() || "/_-.".contains(c)) => Ok(Value::String(raw.into())),
        Err(e) => Err(Error::Parse { path: format!("--{flag}"), msg: e.to_string() }),
    }
}

fn check(name: &str, fields: Vec<(&str, Option<Value>)>) -> Result<CheckSpec> {
    let mut m = Map::new();
    m.insert("name".into(), Value::String(name.into()));
    for (k, v) in fields {
        if let Some(v) = v {
            m.insert(k.into(), v);
        }
    }
    serde_path_to_error::deserialize(Value::Object(m)).map_err(|e| Error::Parse {
        path: format!("--{}", e.path()),
        msg: e.inner().to_string(),
    })
}

fn opt_json(flag: &str, raw: &Option<String>) -> Result<Option<Value>> {
    raw.as_deref().map(|r| json_arg(flag, r)).transpose()
}

/// Builds the scenario a command line asks for.
pub fn scenario_for(command: &Command) -> Result<Scenario> {
    let (sources, spec) = match command {
        Command::Run { scenario } => return Scenario::from_path(scenario),
        Command::Demo { name } => return demo(name),
        Command::Capacity(CapacityCmd::Check { sources, property, samples }) => (
            sources,
            check(
                "capacity-check",
                vec![("property", property.clone().map(Value::String)), ("samples", samples.map(Value::from))],
            )?,
        ),
        Command::Capacity(CapacityCmd::Split { sources, t, region }) => {
            (sources, check("split", vec![("t", Some(json_arg("t", t)?)), ("region", opt_json("region", region)?)])?)
        }
        Command::Choquet(ChoquetCmd::Integrate { sources, region, expected, asymmetric }) => (
            sources,
            check(
                "integrate",
                vec![
                    ("over", opt_json("region", region)?),
                    ("expected", opt_json("expected", expected)?),
                    ("asymmetric", Some(Value::Bool(*asymmetric))),
                ],
            )?,
        ),
        Command::Choquet(ChoquetCmd::Jensen { sources, phi }) => {
            (sources, check("jensen", vec![("phi", Some(json_arg("phi", phi)?))])?)
        }
        Command::Economy(EconomyCmd::CoreCheck { sources, allocation }) => {
            (sources, check("core-check", vec![("allocation", opt_json("allocation", allocation)?)])?)
        }
        Command::Economy(EconomyCmd::Walras { sources, allocation, price }) => (
            sources,
            check(
                "walras",
                vec![("allocation", opt_json("allocation", allocation)?), ("price", opt_json("price", price)?)],
            )?,
        ),
        Command::Economy(EconomyCmd::Characterize { sources }) => (sources, check("characterize", vec![])?),
        Command::Economy(EconomyCmd::Oracle { sources, allocation, mode }) => (
            sources,
            check(
                "oracle",
                vec![("allocation", opt_json("allocation", allocation)?), ("mode", Some(Value::String(mode.clone())))],
            )?,
        ),
    };
    let mut s = load(sources)?;
    s.checks.push(spec);
    Ok(s)
}

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Internal(_) => 3,
        _ => 2,
    }
}

/// Runs a parsed command line; returns the report text and exit code, or
/// the error text and exit code.
pub fn execute(cli: &Cli) -> (String, i32) {
    if let Command::Demo { name } = &cli.command {
        if name == "list" {
            let lines: Vec<String> = DEMOS.iter().map(|d| format!("{:<16} {}", d.name, d.about)).collect();
            return (lines.join("\n") + "\n", 0);
        }
    }
    let opts = RunOptions { seed: cli.seed, grid: cli.grid, tol: cli.tol };
    let report: Result<Report> = scenario_for(&cli.command).and_then(|s| run_scenario(&s, &opts));
    match report {
        Ok(r) => {
            let text = if cli.pretty { r.to_text() } else { r.to_json(false) + "\n" };
            (text, if r.pass { 0 } else { 1 })
        }
        Err(e) => (format!("error: {e}\n"), exit_code(&e)),
    }
}
