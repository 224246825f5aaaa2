use hilbstar::harness::{run_suite_with, suite_names, Execution, Seed, SuiteReport};
use hilbstar::linalg::Tolerance;

fn strip_time(mut r: SuiteReport) -> SuiteReport {
    r.wall_time_s = 0.0;
    r
}

#[test]
fn parallel_and_sequential_reports_agree() {
    let tol = Tolerance::default();
    for name in suite_names() {
        let seq = run_suite_with(name, Seed(21), Some(6), &tol, Execution::Sequential).unwrap();
        let par = run_suite_with(name, Seed(21), Some(6), &tol, Execution::Parallel).unwrap();
        assert_eq!(strip_time(seq), strip_time(par), "{name}");
    }
}

#[test]
fn reruns_are_identical() {
    let tol = Tolerance::default();
    let a = run_suite_with("douglas", Seed(4), Some(10), &tol, Execution::default()).unwrap();
    let b = run_suite_with("douglas", Seed(4), Some(10), &tol, Execution::default()).unwrap();
    assert_eq!(strip_time(a), strip_time(b));
}

#[test]
fn unknown_suite_is_an_error() {
    let err = run_suite_with("nope", Seed(0), None, &Tolerance::default(), Execution::Sequential).unwrap_err();
    assert!(matches!(err, hilbstar::Error::UnknownSuite(_)));
}

#[test]
fn nhilb_demo_table() {
    let r = run_suite_with(
        "nhilb-demo",
        Seed(0),
        Some(5),
        &Tolerance::default(),
        Execution::Sequential,
    )
    .unwrap();
    let rows: Vec<(u64, u64)> = r.nhilb_table.unwrap().iter().map(|row| (row.n, row.norm)).collect();
    assert_eq!(rows, vec![(1, 1), (2, 2), (3, 3), (4, 4), (5, 5)]);
}
