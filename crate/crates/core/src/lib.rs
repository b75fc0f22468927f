//! Participatory budgeting with pooled resources: welfare-maximising project
//! selection under weak participation, with exact, approximate, and
//! brute-force solvers, hardness gadgets, and an experiment harness.

pub mod cli;
pub mod error;
pub mod experiment;
pub mod fixtures;
pub mod genio;
pub mod knapsack;
pub mod model;
pub mod oracle;
pub mod rational;
pub mod reductions;
pub mod solvers;

pub use error::{Error, Result};
pub use model::{Agent, Instance, Outcome, Project, ProjectSet, SolveReport, Valuation};
pub use rational::Rational;
