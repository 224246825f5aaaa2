//! Running suites: cases fan out over a rayon pool when the `parallel`
//! feature is on, and run in index order otherwise.

use std::time::Instant;

use super::gen::Seed;
use super::report::{CaseCtx, CaseOutcome, SuiteReport};
use super::suites::{find_suite, SuiteDef};
use crate::error::Result;
use crate::linalg::Tolerance;
use crate::urep::nhilb_obstruction_demo;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Execution {
    Sequential,
    /// Falls back to sequential execution when built without `parallel`.
    Parallel,
}

impl Default for Execution {
    fn default() -> Self {
        if cfg!(feature = "parallel") {
            Execution::Parallel
        } else {
            Execution::Sequential
        }
    }
}

fn run_case(def: &SuiteDef, seed: Seed, index: usize, tol: &Tolerance) -> CaseOutcome {
    let mut cx = CaseCtx::new(index, seed.derive(index as u64));
    if let Err(e) = (def.case)(&mut cx, tol) {
        cx.fail("error", e.to_string());
    }
    cx.finish()
}

fn run_cases(def: &SuiteDef, seed: Seed, count: usize, tol: &Tolerance, exec: Execution) -> Vec<CaseOutcome> {
    match exec {
        #[cfg(feature = "parallel")]
        Execution::Parallel => {
            use rayon::prelude::*;
            (0..count)
                .into_par_iter()
                .map(|i| run_case(def, seed, i, tol))
                .collect()
        }
        _ => (0..count).map(|i| run_case(def, seed, i, tol)).collect(),
    }
}

/// Runs `count` cases of the named suite (its default count when `None`).
pub fn run_suite_with(
    name: &str,
    seed: Seed,
    count: Option<usize>,
    tol: &Tolerance,
    exec: Execution,
) -> Result<SuiteReport> {
    let def = find_suite(name)?;
    let count = count.unwrap_or(def.default_count);
    let start = Instant::now();
    let outcomes = run_cases(def, seed, count, tol, exec);
    let mut report = SuiteReport::merge(def.name, seed, outcomes, 0.0);
    if def.name == "nhilb-demo" && count > 0 {
        report.nhilb_table = Some(nhilb_obstruction_demo(count)?);
    }
    report.wall_time_s = start.elapsed().as_secs_f64();
    Ok(report)
}

pub fn run_suite(name: &str, seed: Seed, count: Option<usize>, tol: &Tolerance) -> Result<SuiteReport> {
    run_suite_with(name, seed, count, tol, Execution::default())
}
