//! Instance text format, Pabulib election ingestion, and synthetic
//! instance families.

mod json;
mod pabulib;
mod synthetic;

pub use json::{load_instance, save_instance};
pub use pabulib::{pabulib_to_instance, parse_pabulib, PabulibElection, PabulibProject, PabulibVote};
pub use synthetic::{gen_synthetic, Family, SyntheticConfig, QUANTUM};
