//! Acceptance run: every criterion at its stated case count and threshold.
//! Prints one PASS/FAIL line per criterion and exits nonzero on any failure.

use std::process::ExitCode;

use hilbstar::harness::{run_suite, Seed, SuiteReport};
use hilbstar::linalg::Tolerance;

const DEFAULT_SEED: u64 = 0x5eed_0001;

struct Criterion {
    id: u32,
    title: &'static str,
    suites: &'static [(&'static str, usize)],
}

const CRITERIA: &[Criterion] = &[
    Criterion {
        id: 1,
        title: "dagger and biproduct laws",
        suites: &[("dagger-laws", 1000)],
    },
    Criterion {
        id: 2,
        title: "order-module inequalities",
        suites: &[("order-module", 500)],
    },
    Criterion {
        id: 3,
        title: "supremum calculus",
        suites: &[("sup-calculus", 200)],
    },
    Criterion {
        id: 4,
        title: "Douglas factorization",
        suites: &[("douglas", 200)],
    },
    Criterion {
        id: 5,
        title: "codilations and codilator universality",
        suites: &[("codilation", 200)],
    },
    Criterion {
        id: 6,
        title: "order sums",
        suites: &[("order-sums", 300)],
    },
    Criterion {
        id: 7,
        title: "l2-products",
        suites: &[("l2-products", 200)],
    },
    Criterion {
        id: 8,
        title: "l2-limits",
        suites: &[("l2-limits", 200)],
    },
    Criterion {
        id: 9,
        title: "directed colimits of isometries",
        suites: &[("colimits", 200)],
    },
    Criterion {
        id: 10,
        title: "representations and the unbounded-norm demo",
        suites: &[("urep", 200), ("nhilb-demo", 50)],
    },
];

fn nhilb_exact(r: &SuiteReport) -> bool {
    match &r.nhilb_table {
        Some(rows) => {
            rows.len() == 50
                && rows
                    .iter()
                    .enumerate()
                    .all(|(i, row)| row.n == i as u64 + 1 && row.norm == row.n)
        }
        None => true,
    }
}

fn main() -> ExitCode {
    let seed = std::env::var("HILBSTAR_SEED")
        .ok()
        .and_then(|s| s.parse().ok())
        .unwrap_or(DEFAULT_SEED);
    let tol = Tolerance::default();
    let mut all = true;
    for c in CRITERIA {
        let mut ok = true;
        let mut notes = Vec::new();
        for &(suite, count) in c.suites {
            match run_suite(suite, Seed(seed), Some(count), &tol) {
                Ok(r) => {
                    ok &= r.passed() && r.cases == count && nhilb_exact(&r);
                    let worst = r.checks.values().map(|s| s.max_ratio).fold(0.0, f64::max);
                    notes.push(format!(
                        "{suite}: {} cases, {} failures, worst ratio {worst:.2e}, {:.2}s",
                        r.cases,
                        r.failures.len(),
                        r.wall_time_s
                    ));
                    if !r.passed() {
                        eprint!("{}", r.to_text());
                    }
                }
                Err(e) => {
                    ok = false;
                    notes.push(format!("{suite}: {e}"));
                }
            }
        }
        all &= ok;
        println!(
            "{} criterion {:>2} ({}): {}",
            if ok { "PASS" } else { "FAIL" },
            c.id,
            c.title,
            notes.join("; ")
        );
    }
    if all {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
