//! Sectoral economy with firms that learn their returns to scale from their own production.
//!
//! Modules cover the primitives and configuration ([`model`]), market clearing
//! ([`equilibrium`]), belief updates ([`belief`]), distributional analysis of beliefs
//! ([`moments`]), multi-input elasticity learning ([`highdim`]), Monte Carlo simulation
//! ([`sim`]), named scenarios and output files ([`scenario`], [`output`]) and the command-line
//! front end ([`cli`]).

pub mod belief;
pub mod cli;
pub mod equilibrium;
pub mod error;
pub mod highdim;
pub mod model;
pub mod moments;
pub mod normal;
pub mod output;
pub mod scenario;
pub mod sim;

pub use error::{Error, Result};
pub use model::{EconomyConfig, LearningMode, Schedule, SectorParams};
