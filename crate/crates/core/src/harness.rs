//! Benchmark harness: single runs with model verification, directory
//! suites written as CSV, Table-style summaries and the oracle fuzzer.

use std::fmt::{self, Write as _};
use std::fs;
use std::io::{self, Read, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::cnf::{self, Formula, ParseError};
use crate::engine::{SolveOutcome, SolveStatus, Solver, SolverConfig};
use crate::oracle::{self, BruteForce, RandomCnfSpec};
use crate::phase::ActiveScheme;

pub const CSV_COLUMNS: [&str; 8] = [
    "instance",
    "status",
    "wall_time_s",
    "conflicts",
    "decisions",
    "propagations",
    "restarts",
    "scheme_digest",
];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum RunStatus {
    Sat,
    Unsat,
    Unknown,
    Error,
}

impl From<SolveStatus> for RunStatus {
    fn from(status: SolveStatus) -> RunStatus {
        match status {
            SolveStatus::Sat => RunStatus::Sat,
            SolveStatus::Unsat => RunStatus::Unsat,
            SolveStatus::Unknown => RunStatus::Unknown,
        }
    }
}

impl RunStatus {
    pub fn is_solved(self) -> bool {
        matches!(self, RunStatus::Sat | RunStatus::Unsat)
    }
}

/// One row of a benchmark CSV.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub instance: String,
    pub status: RunStatus,
    pub wall_time_s: f64,
    pub conflicts: u64,
    pub decisions: u64,
    pub propagations: u64,
    pub restarts: u64,
    #[serde(rename = "scheme_digest")]
    pub scheme_digest: String,
}

impl RunRecord {
    fn error(instance: String) -> RunRecord {
        RunRecord {
            instance,
            status: RunStatus::Error,
            wall_time_s: 0.0,
            conflicts: 0,
            decisions: 0,
            propagations: 0,
            restarts: 0,
            scheme_digest: String::new(),
        }
    }
}

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("{path}: {source}")]
    Parse { path: PathBuf, source: ParseError },
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: io::Error },
    #[error("{path}: model falsifies clause {clause}")]
    ModelVerificationFailed { path: PathBuf, clause: usize },
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error(
        "mismatch on seed {seed} under {config}: solver says {solver}, brute force says {oracle}"
    )]
    MismatchFound {
        seed: u64,
        config: String,
        solver: String,
        oracle: String,
    },
}

/// First 16 hex digits of SHA-256 over the per-period scheme sequence.
pub fn scheme_digest(log: &[ActiveScheme]) -> String {
    let codes: Vec<u8> = log.iter().map(|s| s.code()).collect();
    let hash = Sha256::digest(&codes);
    hash.iter().take(8).fold(String::new(), |mut out, b| {
        let _ = write!(out, "{b:02x}");
        out
    })
}

/// Checks a model against the formula with a plain clause-by-clause scan.
pub fn verify_model(formula: &Formula, model: &[bool]) -> Result<(), usize> {
    match cnf::first_falsified_clause(formula, model) {
        None => Ok(()),
        Some(clause) => Err(clause),
    }
}

#[derive(Clone, Debug)]
pub struct RunOutput {
    pub record: RunRecord,
    pub outcome: SolveOutcome,
    pub stats: crate::engine::Stats,
}

/// Solves an already parsed formula and verifies any model it returns.
pub fn run_formula(
    instance: &str,
    formula: &Formula,
    config: &SolverConfig,
) -> Result<RunOutput, HarnessError> {
    let started = Instant::now();
    let mut solver = Solver::new(formula, config.clone());
    let outcome = solver.solve();
    let wall_time_s = started.elapsed().as_secs_f64();
    if let Some(model) = outcome.model() {
        verify_model(formula, model).map_err(|clause| HarnessError::ModelVerificationFailed {
            path: PathBuf::from(instance),
            clause,
        })?;
    }
    let stats = solver.stats();
    let record = RunRecord {
        instance: instance.to_string(),
        status: outcome.status().into(),
        wall_time_s,
        conflicts: stats.conflicts,
        decisions: stats.decisions,
        propagations: stats.propagations,
        restarts: stats.restarts,
        scheme_digest: scheme_digest(solver.phase().scheme_log()),
    };
    Ok(RunOutput {
        record,
        outcome,
        stats,
    })
}

pub fn read_formula(path: &Path) -> Result<Formula, HarnessError> {
    let text = fs::read_to_string(path).map_err(|source| HarnessError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    cnf::parse_dimacs(&text).map_err(|source| HarnessError::Parse {
        path: path.to_path_buf(),
        source,
    })
}

/// Parses, solves and verifies one DIMACS file.
pub fn run_one(path: &Path, config: &SolverConfig) -> Result<RunOutput, HarnessError> {
    let formula = read_formula(path)?;
    run_formula(&path.display().to_string(), &formula, config)
}

/// `.cnf` files directly inside `dir`, sorted by path.
pub fn list_instances(dir: &Path) -> Result<Vec<PathBuf>, HarnessError> {
    let io_err = |source| HarnessError::Io {
        path: dir.to_path_buf(),
        source,
    };
    let mut paths = Vec::new();
    for entry in fs::read_dir(dir).map_err(io_err)? {
        let path = entry.map_err(io_err)?.path();
        if path.is_file() && path.extension().is_some_and(|e| e == "cnf") {
            paths.push(path);
        }
    }
    paths.sort();
    Ok(paths)
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct SuiteSummary {
    pub instances: usize,
    pub solved: usize,
    pub sat: usize,
    pub unsat: usize,
    /// Mean wall time over solved instances; 0 when nothing was solved.
    pub average_time_s: f64,
}

impl SuiteSummary {
    pub fn from_records(records: &[RunRecord]) -> SuiteSummary {
        let solved: Vec<&RunRecord> = records.iter().filter(|r| r.status.is_solved()).collect();
        let total: f64 = solved.iter().map(|r| r.wall_time_s).sum();
        SuiteSummary {
            instances: records.len(),
            solved: solved.len(),
            sat: records.iter().filter(|r| r.status == RunStatus::Sat).count(),
            unsat: records.iter().filter(|r| r.status == RunStatus::Unsat).count(),
            average_time_s: if solved.is_empty() {
                0.0
            } else {
                total / solved.len() as f64
            },
        }
    }
}

impl fmt::Display for SuiteSummary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "solved={}/{} sat={} unsat={} avg_time_s={:.4}",
            self.solved, self.instances, self.sat, self.unsat, self.average_time_s
        )
    }
}

#[derive(Clone, Debug)]
pub struct SuiteReport {
    pub records: Vec<RunRecord>,
    pub summary: SuiteSummary,
}

/// Runs every `.cnf` file of `dir` on up to `jobs` workers. Rows come back in
/// path order whatever the completion order. Unreadable or malformed files
/// become `ERROR` rows; a model that fails verification aborts the suite.
pub fn run_suite(dir: &Path, config: &SolverConfig, jobs: usize) -> Result<SuiteReport, HarnessError> {
    let paths = list_instances(dir)?;
    let run = |path: &PathBuf| -> Result<RunRecord, HarnessError> {
        match run_one(path, config) {
            Ok(out) => Ok(out.record),
            Err(err @ HarnessError::ModelVerificationFailed { .. }) => Err(err),
            Err(err) => {
                log::warn!("{err}");
                Ok(RunRecord::error(path.display().to_string()))
            }
        }
    };
    let records = if jobs <= 1 {
        paths.iter().map(run).collect::<Result<Vec<_>, _>>()?
    } else {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build()
            .expect("thread pool");
        pool.install(|| paths.par_iter().map(run).collect::<Result<Vec<_>, _>>())?
    };
    let summary = SuiteSummary::from_records(&records);
    Ok(SuiteReport { records, summary })
}

/// Writes the header, one row per record and a `#`-prefixed summary footer.
pub fn write_csv<W: Write>(out: W, records: &[RunRecord]) -> Result<(), HarnessError> {
    let mut writer = csv::WriterBuilder::new().has_headers(false).from_writer(out);
    writer.write_record(CSV_COLUMNS)?;
    for record in records {
        writer.serialize(record)?;
    }
    writer.flush().map_err(csv::Error::from)?;
    let mut out = writer.into_inner().map_err(|e| csv::Error::from(e.into_error()))?;
    let summary = SuiteSummary::from_records(records);
    writeln!(out, "# {summary}").map_err(csv::Error::from)?;
    Ok(())
}

/// Reads a harness CSV back; summary lines are skipped.
pub fn read_csv<R: Read>(input: R) -> Result<Vec<RunRecord>, HarnessError> {
    let mut reader = csv::ReaderBuilder::new().comment(Some(b'#')).from_reader(input);
    let header = reader.headers()?.clone();
    if header.iter().ne(CSV_COLUMNS) {
        return Err(HarnessError::Csv(csv::Error::from(io::Error::new(
            io::ErrorKind::InvalidData,
            format!("unexpected CSV header {header:?}"),
        ))));
    }
    Ok(reader.deserialize().collect::<Result<Vec<RunRecord>, _>>()?)
}

/// Side-by-side solved counts and mean solve times of two runs over the
/// same suite.
pub fn comparison_table(runs: &[(&str, &[RunRecord])]) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "{:<24} {:>16} {:>22}",
        "Solver", "Instances Solved", "Average time (s)"
    );
    for (label, records) in runs {
        let s = SuiteSummary::from_records(records);
        let _ = writeln!(
            out,
            "{:<24} {:>16} {:>22.4}",
            label,
            format!("{}/{}", s.solved, s.instances),
            s.average_time_s
        );
    }
    out
}

/// Parameters of a fuzz campaign.
#[derive(Clone, Debug, PartialEq)]
pub struct FuzzSpec {
    pub count: usize,
    pub min_vars: usize,
    pub max_vars: usize,
    /// Clause-to-variable ratio range.
    pub min_ratio: f64,
    pub max_ratio: f64,
    pub seed: u64,
}

impl Default for FuzzSpec {
    fn default() -> FuzzSpec {
        FuzzSpec {
            count: 2000,
            min_vars: 5,
            max_vars: 20,
            min_ratio: 3.0,
            max_ratio: 5.0,
            seed: 0,
        }
    }
}

impl FuzzSpec {
    /// The random 3-CNF spec of instance `index`.
    pub fn instance(&self, index: usize) -> RandomCnfSpec {
        let seed = self.seed.wrapping_add(index as u64);
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x9e37_79b9_7f4a_7c15);
        let num_vars = rng.gen_range(self.min_vars..=self.max_vars);
        let ratio = rng.gen_range(self.min_ratio..=self.max_ratio);
        let num_clauses = ((num_vars as f64 * ratio).round() as usize).max(1);
        RandomCnfSpec {
            num_vars,
            num_clauses,
            clause_len: 3,
            seed,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct FuzzReport {
    pub instances: usize,
    pub sat: usize,
    pub unsat: usize,
    pub runs: usize,
}

impl fmt::Display for FuzzReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} instances ({} sat, {} unsat), {} solver runs, 0 mismatches",
            self.instances, self.sat, self.unsat, self.runs
        )
    }
}

/// Cross-checks `solve` against brute force on every generated instance
/// under every labelled config. Stops at the lowest-index mismatch.
pub fn fuzz_with<F>(
    spec: &FuzzSpec,
    configs: &[(String, SolverConfig)],
    solve: F,
) -> Result<FuzzReport, HarnessError>
where
    F: Fn(&Formula, &SolverConfig) -> SolveOutcome + Sync,
{
    let check = |index: usize| -> Result<bool, HarnessError> {
        let rspec = spec.instance(index);
        let formula = oracle::generate(&rspec).map_err(|e| HarnessError::MismatchFound {
            seed: rspec.seed,
            config: "generator".into(),
            solver: e.to_string(),
            oracle: String::new(),
        })?;
        let truth = oracle::brute_force(&formula).expect("generator respects the oracle cap");
        for (label, config) in configs {
            let outcome = solve(&formula, config);
            let agrees = match (&outcome, &truth) {
                (SolveOutcome::Sat(model), BruteForce::Sat(_)) => {
                    verify_model(&formula, model).is_ok()
                }
                (SolveOutcome::Unsat, BruteForce::Unsat) => true,
                _ => false,
            };
            if !agrees {
                let solver = match &outcome {
                    SolveOutcome::Sat(m) if verify_model(&formula, m).is_err() => {
                        "SAT with an invalid model".to_string()
                    }
                    other => other.status().to_string(),
                };
                return Err(HarnessError::MismatchFound {
                    seed: rspec.seed,
                    config: label.clone(),
                    solver,
                    oracle: if truth.is_sat() { "SAT" } else { "UNSAT" }.to_string(),
                });
            }
        }
        Ok(truth.is_sat())
    };
    let results: Vec<Result<bool, HarnessError>> =
        (0..spec.count).into_par_iter().map(check).collect();
    let mut report = FuzzReport {
        instances: spec.count,
        runs: spec.count * configs.len(),
        ..FuzzReport::default()
    };
    for result in results {
        if result? {
            report.sat += 1;
        } else {
            report.unsat += 1;
        }
    }
    Ok(report)
}

/// [`fuzz_with`] using the real solver.
pub fn fuzz(spec: &FuzzSpec, configs: &[(String, SolverConfig)]) -> Result<FuzzReport, HarnessError> {
    fuzz_with(spec, configs, |f, c| crate::engine::solve(f, c.clone()))
}
