//! Independent checks of the solvers: Monte Carlo play of the protocol,
//! brute-force envelopes, a divisibility checker, a search for two-step gaps,
//! and the named verification suites built from them.

pub mod oracle;
pub mod sim;
pub mod suites;

pub use oracle::{
    brute_force_cav, check_divisibility, receiver_coordinate_interim, search_conjecture_gap,
    DivisibilityReport, GapReport, GapWitness,
};
pub use sim::{simulate, BeliefPath, SimConfig, SimResult, SimStrategy};
pub use suites::{run_suite, Check, Suite, SuiteReport};
