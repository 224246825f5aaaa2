//! Per-case check records and the merged suite report.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use sha2::{Digest, Sha256};

use super::gen::Seed;
use crate::linalg::{FieldTag, Mat};
use crate::urep::NhilbRow;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CheckRecord {
    pub name: String,
    pub residual: f64,
    pub threshold: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

impl CheckRecord {
    pub fn passed(&self) -> bool {
        self.error.is_none() && self.residual <= self.threshold
    }
}

/// The state of one running case: its seed, a digest of its inputs and the checks made so far.
pub struct CaseCtx {
    pub index: usize,
    pub seed: Seed,
    hasher: Sha256,
    checks: Vec<CheckRecord>,
}

impl CaseCtx {
    pub fn new(index: usize, seed: Seed) -> Self {
        CaseCtx {
            index,
            seed,
            hasher: Sha256::new(),
            checks: Vec::new(),
        }
    }

    pub fn rng(&self) -> ChaCha8Rng {
        self.seed.rng()
    }

    /// Alternates the scalar field by case index.
    pub fn field(&self) -> FieldTag {
        if self.index.is_multiple_of(2) {
            FieldTag::Real
        } else {
            FieldTag::Complex
        }
    }

    /// Feeds matrices into the inputs digest.
    pub fn digest(&mut self, mats: &[&Mat]) {
        for m in mats {
            self.hasher.update((m.rows() as u64).to_le_bytes());
            self.hasher.update((m.cols() as u64).to_le_bytes());
            for z in m.data() {
                self.hasher.update(z.re.to_bits().to_le_bytes());
                self.hasher.update(z.im.to_bits().to_le_bytes());
            }
        }
    }

    /// Records `residual <= threshold`. NaN residuals fail.
    pub fn check(&mut self, name: &str, residual: f64, threshold: f64) {
        let residual = if residual.is_nan() { f64::INFINITY } else { residual };
        self.checks.push(CheckRecord {
            name: name.to_string(),
            residual,
            threshold,
            error: None,
        });
    }

    /// Records a boolean condition as residual 0 or 1 against threshold 0.
    pub fn check_flag(&mut self, name: &str, ok: bool) {
        self.check(name, if ok { 0.0 } else { 1.0 }, 0.0);
    }

    pub fn fail(&mut self, name: &str, error: String) {
        self.checks.push(CheckRecord {
            name: name.to_string(),
            residual: f64::INFINITY,
            threshold: 0.0,
            error: Some(error),
        });
    }

    pub fn finish(self) -> CaseOutcome {
        let digest = self.hasher.finalize();
        let mut hex = String::with_capacity(16);
        for b in &digest[..8] {
            let _ = write!(hex, "{b:02x}");
        }
        CaseOutcome {
            index: self.index,
            seed: self.seed,
            inputs_digest: hex,
            checks: self.checks,
        }
    }
}

#[derive(Clone, Debug)]
pub struct CaseOutcome {
    pub index: usize,
    pub seed: Seed,
    pub inputs_digest: String,
    pub checks: Vec<CheckRecord>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Failure {
    pub case: usize,
    pub seed: u64,
    pub inputs_digest: String,
    pub check: String,
    pub residual: f64,
    pub threshold: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

/// Worst observed residual of one named check across all cases.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CheckSummary {
    pub count: usize,
    pub max_residual: f64,
    /// Largest `residual / threshold` (with `0/0 = 0`).
    pub max_ratio: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SuiteReport {
    pub suite: String,
    pub seed: u64,
    pub cases: usize,
    pub checks: BTreeMap<String, CheckSummary>,
    pub failures: Vec<Failure>,
    pub wall_time_s: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub nhilb_table: Option<Vec<NhilbRow>>,
}

impl SuiteReport {
    /// Merges case outcomes in index order, whatever order they finished in.
    pub fn merge(suite: &str, seed: Seed, mut outcomes: Vec<CaseOutcome>, wall_time_s: f64) -> Self {
        outcomes.sort_by_key(|o| o.index);
        let mut checks: BTreeMap<String, CheckSummary> = BTreeMap::new();
        let mut failures = Vec::new();
        for o in &outcomes {
            for c in &o.checks {
                let ratio = if c.residual == 0.0 {
                    0.0
                } else {
                    c.residual / c.threshold
                };
                let e = checks.entry(c.name.clone()).or_insert(CheckSummary {
                    count: 0,
                    max_residual: 0.0,
                    max_ratio: 0.0,
                });
                e.count += 1;
                e.max_residual = e.max_residual.max(c.residual);
                e.max_ratio = e.max_ratio.max(ratio);
                if !c.passed() {
                    failures.push(Failure {
                        case: o.index,
                        seed: o.seed.0,
                        inputs_digest: o.inputs_digest.clone(),
                        check: c.name.clone(),
                        residual: c.residual,
                        threshold: c.threshold,
                        error: c.error.clone(),
                    });
                }
            }
        }
        SuiteReport {
            suite: suite.to_string(),
            seed: seed.0,
            cases: outcomes.len(),
            checks,
            failures,
            wall_time_s,
            nhilb_table: None,
        }
    }

    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let status = if self.passed() { "PASS" } else { "FAIL" };
        let _ = writeln!(
            s,
            "{status} {} (seed {}, {} cases, {} failures, {:.2}s)",
            self.suite,
            self.seed,
            self.cases,
            self.failures.len(),
            self.wall_time_s
        );
        for (name, c) in &self.checks {
            let _ = writeln!(
                s,
                "  {name:<28} n={:<6} max residual {:.3e}  max ratio {:.3e}",
                c.count, c.max_residual, c.max_ratio
            );
        }
        for f in self.failures.iter().take(20) {
            let _ = write!(
                s,
                "  failure: case {} seed {} digest {} check {} residual {:.3e} > {:.3e}",
                f.case, f.seed, f.inputs_digest, f.check, f.residual, f.threshold
            );
            if let Some(e) = &f.error {
                let _ = write!(s, " ({e})");
            }
            s.push('\n');
        }
        if self.failures.len() > 20 {
            let _ = writeln!(s, "  ... {} more failures", self.failures.len() - 20);
        }
        if let Some(rows) = &self.nhilb_table {
            let _ = writeln!(s, "  n  norm");
            for r in rows {
                let _ = writeln!(s, "  {} {}", r.n, r.norm);
            }
        }
        s
    }
}
