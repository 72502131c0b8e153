//! Property checks for the rating method: random and constructed profiles,
//! brute-force oracles, and named suites with counterexample dumps.

pub mod checks;
pub mod generator;
pub mod oracle;
pub mod suite;

pub use checks::{Outcome, Verdict};
pub use generator::{case_rng, ProfileGenerator};
pub use oracle::oracle_paths;
pub use suite::{run_suite, Failure, Suite, SuiteReport};
