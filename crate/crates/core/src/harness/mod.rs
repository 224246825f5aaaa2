//! Seeded generators, the property suites and their reports.

pub mod exec;
pub mod gen;
pub mod report;
pub mod suites;

pub use exec::{run_suite, run_suite_with, Execution};
pub use gen::Seed;
pub use report::{CaseCtx, CheckSummary, Failure, SuiteReport};
pub use suites::{find_suite, suite_names, SuiteDef, SUITES};
