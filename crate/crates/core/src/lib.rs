//! A CDCL SAT solver whose phase selection can weigh each decision by the
//! static weight of the literals it implies, with a small benchmark harness.

pub mod cnf;
pub mod engine;
pub mod harness;
pub mod oracle;
pub mod phase;
pub mod weights;

pub use cnf::{parse_dimacs, Formula, Lit, Var};
pub use engine::{solve, SolveOutcome, SolveStatus, Solver, SolverConfig};
pub use phase::{PhaseConfig, Scheme, SchedulerKind};
