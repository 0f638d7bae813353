//! Choquet integration with respect to capacities, and core / Walras
//! equilibrium computations for exchange economies whose agent space carries
//! a non-additive measure.

pub mod capacity;
pub mod cli;
pub mod choquet;
pub mod concave;
pub mod convexsep;
pub mod economy;
pub mod error;
pub mod io;
pub mod lp;
pub mod rational;
pub mod regions;
pub mod report;
pub mod runner;
pub mod utility;

pub use error::{Error, Result};
