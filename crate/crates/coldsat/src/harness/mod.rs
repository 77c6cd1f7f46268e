//! Experiment harness: run-time-variation studies, PAR2 and CV metrics,
//! benchmark-suite execution with cutoffs, and report structures.
//!
//! Metric conventions: PAR2 charges an unsolved run twice the cutoff; CV is
//! the population standard deviation divided by the mean. Wall time is
//! measured around each solve call, excluding parse time.

pub mod gen;
pub mod report;

use crate::engine::{SolveStats, Solver, SolverConfig, SolverHooks, Status};
use crate::formula::{check_model, parse_dimacs, Formula};
use crate::rng::SplitMix64;
use serde::{Deserialize, Serialize};
use std::fs::File;
use std::io::{self, BufRead, BufReader};
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicBool, AtomicUsize, Ordering};
use std::sync::{Arc, Mutex};
use std::time::{Duration, Instant};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum MetricsError {
    #[error("no records to score")]
    EmptyRecords,
    #[error("coefficient of variation needs at least 2 samples (got {0})")]
    TooFewSamples(usize),
    #[error("coefficient of variation is undefined for zero mean")]
    ZeroMean,
    #[error("paired run-time lists differ in length ({0} vs {1})")]
    UnpairedRecords(usize, usize),
    #[error("no eligible instances for speedup (need both-solved pairs above 1 s)")]
    NoEligibleInstances,
}

/// Outcome of one timed run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum RunStatus {
    Sat,
    Unsat,
    Timeout,
    Unknown,
    Error,
}

impl RunStatus {
    pub fn solved(self) -> bool {
        matches!(self, RunStatus::Sat | RunStatus::Unsat)
    }
}

impl std::fmt::Display for RunStatus {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            RunStatus::Sat => "SAT",
            RunStatus::Unsat => "UNSAT",
            RunStatus::Timeout => "TIMEOUT",
            RunStatus::Unknown => "UNKNOWN",
            RunStatus::Error => "ERROR",
        };
        write!(f, "{s}")
    }
}

/// One solver run on one instance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub instance: String,
    pub config_digest: String,
    pub seed: u64,
    pub status: RunStatus,
    pub wall_time_s: f64,
    pub conflicts: u64,
    pub decisions: u64,
    pub warm_restarts: u64,
    pub cold_restarts: u64,
}

/// Stable 64-bit FNV-1a digest of the solver configuration, so records from
/// different configurations cannot be silently mixed.
pub fn config_digest(cfg: &SolverConfig) -> String {
    let text = format!("{cfg:?}");
    let mut hash: u64 = 0xcbf2_9ce4_8422_2325;
    for byte in text.bytes() {
        hash ^= byte as u64;
        hash = hash.wrapping_mul(0x0000_0100_0000_01b3);
    }
    format!("{hash:016x}")
}

// -- metrics ------------------------------------------------------------------

/// Penalized average run time: solved runs contribute their wall time,
/// anything else twice the cutoff.
pub fn par2(records: &[RunRecord], cutoff_s: f64) -> Result<f64, MetricsError> {
    if records.is_empty() {
        return Err(MetricsError::EmptyRecords);
    }
    let total: f64 = records
        .iter()
        .map(|r| if r.status.solved() { r.wall_time_s } else { 2.0 * cutoff_s })
        .sum();
    Ok(total / records.len() as f64)
}

/// Coefficient of variation: population standard deviation over mean.
pub fn cv(times: &[f64]) -> Result<f64, MetricsError> {
    if times.len() < 2 {
        return Err(MetricsError::TooFewSamples(times.len()));
    }
    let mean = times.iter().sum::<f64>() / times.len() as f64;
    if mean == 0.0 {
        return Err(MetricsError::ZeroMean);
    }
    let variance = times.iter().map(|t| (t - mean).powi(2)).sum::<f64>() / times.len() as f64;
    Ok(variance.sqrt() / mean)
}

// -- variation study ------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum VariationMode {
    Order,
    Phase,
}

impl std::fmt::Display for VariationMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", if *self == VariationMode::Order { "order" } else { "phase" })
    }
}

/// Fractions of sample runs reaching each speedup (or slowdown) ratio
/// against the baseline, with all samples in the denominator.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct SpeedupFractions {
    pub ge_2x: f64,
    pub ge_4x: f64,
    pub ge_10x: f64,
    pub ge_32x: f64,
    pub le_half: f64,
    pub le_quarter: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VariationReport {
    pub instance: String,
    pub mode: VariationMode,
    pub cutoff_s: f64,
    pub baseline: RunRecord,
    pub samples: Vec<RunRecord>,
    /// Baseline time over sample time, per sample; `None` when either side
    /// is unsolved.
    pub ratios: Vec<Option<f64>>,
    pub failed_fraction: f64,
    /// CV over the solved samples' run times; `None` below 2 solved samples.
    pub cv: Option<f64>,
    pub fractions: SpeedupFractions,
}

impl VariationReport {
    pub fn solved_ratios(&self) -> Vec<f64> {
        self.ratios.iter().flatten().copied().collect()
    }
}

struct StopHooks {
    stop: Arc<AtomicBool>,
}

impl SolverHooks for StopHooks {
    fn should_stop(&self) -> bool {
        self.stop.load(Ordering::Relaxed)
    }
}

fn timed_run_with_stop(
    f: &Formula,
    cfg: &SolverConfig,
    instance: &str,
    cutoff: Duration,
    stop: Option<&Arc<AtomicBool>>,
) -> RunRecord {
    let mut cfg = cfg.clone();
    cfg.time_budget = Some(cutoff);
    let start = Instant::now();
    let mut solver = Solver::new(f, cfg.clone());
    if let Some(stop) = stop {
        solver.set_hooks(Box::new(StopHooks { stop: Arc::clone(stop) }));
    }
    let result = solver.solve();
    let elapsed = start.elapsed();
    if result.status == Status::Sat {
        let model = result.model.as_ref().expect("SAT carries a model");
        assert!(check_model(f, model).expect("model is total"));
    }
    let status = match result.status {
        Status::Sat => RunStatus::Sat,
        Status::Unsat => RunStatus::Unsat,
        Status::Unknown if elapsed >= cutoff => RunStatus::Timeout,
        Status::Unknown => RunStatus::Unknown,
    };
    record_from(instance, &cfg, status, elapsed, &result.stats)
}

fn record_from(
    instance: &str,
    cfg: &SolverConfig,
    status: RunStatus,
    elapsed: Duration,
    stats: &SolveStats,
) -> RunRecord {
    RunRecord {
        instance: instance.to_string(),
        config_digest: config_digest(cfg),
        seed: cfg.seed,
        status,
        wall_time_s: elapsed.as_secs_f64(),
        conflicts: stats.conflicts,
        decisions: stats.decisions,
        warm_restarts: stats.warm_restarts,
        cold_restarts: stats.cold_restarts,
    }
}

/// Runs the baseline configuration once, then `num_seeds` randomized runs
/// (initial order or initial phases, per `mode`) with distinct seeds, and
/// summarizes the run-time variation.
pub fn run_variation_study(
    f: &Formula,
    base_cfg: &SolverConfig,
    num_seeds: usize,
    mode: VariationMode,
    cutoff: Duration,
    instance: &str,
) -> VariationReport {
    run_variation_study_with_stop(f, base_cfg, num_seeds, mode, cutoff, instance, None)
}

/// Like [`run_variation_study`], but an external stop flag (e.g. a SIGINT
/// handler) aborts in-flight runs and truncates the sample list, so partial
/// reports can still be flushed.
#[allow(clippy::too_many_arguments)]
pub fn run_variation_study_with_stop(
    f: &Formula,
    base_cfg: &SolverConfig,
    num_seeds: usize,
    mode: VariationMode,
    cutoff: Duration,
    instance: &str,
    stop: Option<&Arc<AtomicBool>>,
) -> VariationReport {
    assert!(num_seeds >= 2, "a variation study needs at least 2 seeds");
    let stopped = || stop.is_some_and(|s| s.load(Ordering::Relaxed));
    let baseline = timed_run_with_stop(f, base_cfg, instance, cutoff, stop);

    let mut seed_gen = SplitMix64::new(base_cfg.seed ^ 0x5eed_5eed_5eed_5eed);
    let samples: Vec<RunRecord> = (0..num_seeds)
        .map_while(|_| {
            if stopped() {
                return None;
            }
            let mut cfg = base_cfg.clone();
            cfg.seed = seed_gen.next_u64();
            match mode {
                VariationMode::Order => cfg.random_initial_order = true,
                VariationMode::Phase => cfg.random_initial_phase = true,
            }
            Some(timed_run_with_stop(f, &cfg, instance, cutoff, stop))
        })
        .collect();

    let baseline_solved = baseline.status.solved();
    let ratios: Vec<Option<f64>> = samples
        .iter()
        .map(|s| {
            (baseline_solved && s.status.solved()).then(|| baseline.wall_time_s / s.wall_time_s)
        })
        .collect();
    let failed = samples.iter().filter(|s| !s.status.solved()).count();
    let solved_times: Vec<f64> =
        samples.iter().filter(|s| s.status.solved()).map(|s| s.wall_time_s).collect();
    let n = samples.len().max(1) as f64;
    let frac = |pred: &dyn Fn(f64) -> bool| {
        ratios.iter().flatten().filter(|&&r| pred(r)).count() as f64 / n
    };
    VariationReport {
        instance: instance.to_string(),
        mode,
        cutoff_s: cutoff.as_secs_f64(),
        fractions: SpeedupFractions {
            ge_2x: frac(&|r| r >= 2.0),
            ge_4x: frac(&|r| r >= 4.0),
            ge_10x: frac(&|r| r >= 10.0),
            ge_32x: frac(&|r| r >= 32.0),
            le_half: frac(&|r| r <= 0.5),
            le_quarter: frac(&|r| r <= 0.25),
        },
        baseline,
        samples,
        ratios,
        failed_fraction: failed as f64 / n,
        cv: cv(&solved_times).ok(),
    }
}

// -- suite runner ----------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SuiteInstance {
    pub path: PathBuf,
    /// Expected status annotation from the manifest ("sat"/"unsat").
    pub expected: Option<Status>,
}

/// Reads a manifest: one instance path per line, optionally followed by
/// "sat" or "unsat". Blank lines and `#` comments are skipped.
pub fn parse_manifest(path: &Path) -> io::Result<Vec<SuiteInstance>> {
    let file = File::open(path)?;
    let mut out = Vec::new();
    for line in BufReader::new(file).lines() {
        let line = line?;
        let text = line.trim();
        if text.is_empty() || text.starts_with('#') {
            continue;
        }
        let mut fields = text.split_whitespace();
        let p = fields.next().expect("nonempty line has a first field");
        let expected = match fields.next() {
            Some(tag) if tag.eq_ignore_ascii_case("sat") => Some(Status::Sat),
            Some(tag) if tag.eq_ignore_ascii_case("unsat") => Some(Status::Unsat),
            Some(tag) => {
                return Err(io::Error::new(
                    io::ErrorKind::InvalidData,
                    format!("unknown status annotation {tag:?} for {p}"),
                ))
            }
            None => None,
        };
        out.push(SuiteInstance { path: PathBuf::from(p), expected });
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct SuiteSummary {
    pub num_sat: usize,
    pub num_unsat: usize,
    /// Always `num_sat + num_unsat`.
    pub num_solved: usize,
    pub num_timeout: usize,
    pub num_unknown: usize,
    pub num_error: usize,
    /// PAR2 over non-error records; `None` when there are none.
    pub par2: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub cutoff_s: f64,
    pub records: Vec<RunRecord>,
    pub summary: SuiteSummary,
    /// Instances whose solved status contradicted their annotation.
    pub violations: Vec<String>,
    /// Unreadable instances and other non-fatal problems.
    pub warnings: Vec<String>,
}

/// Solves every instance under the cutoff, running up to `workers` instances
/// concurrently, and aggregates the competition-style summary.
pub fn run_suite(
    instances: &[SuiteInstance],
    cfg: &SolverConfig,
    cutoff: Duration,
    workers: usize,
) -> SuiteReport {
    run_suite_with_stop(instances, cfg, cutoff, workers, None)
}

type SuiteSlot = Mutex<Option<(RunRecord, Option<String>)>>;

/// Like [`run_suite`], but an external stop flag aborts in-flight solves and
/// skips unstarted instances; the report covers what completed.
pub fn run_suite_with_stop(
    instances: &[SuiteInstance],
    cfg: &SolverConfig,
    cutoff: Duration,
    workers: usize,
    stop: Option<&Arc<AtomicBool>>,
) -> SuiteReport {
    assert!(workers >= 1);
    let next = AtomicUsize::new(0);
    let slots: Vec<SuiteSlot> = instances.iter().map(|_| Mutex::new(None)).collect();
    let stopped = || stop.is_some_and(|s| s.load(Ordering::Relaxed));

    std::thread::scope(|scope| {
        for _ in 0..workers.min(instances.len()) {
            scope.spawn(|| loop {
                if stopped() {
                    break;
                }
                let i = next.fetch_add(1, Ordering::Relaxed);
                if i >= instances.len() {
                    break;
                }
                let inst = &instances[i];
                let label = inst.path.display().to_string();
                let outcome = match load_instance(&inst.path) {
                    Ok(f) => (timed_run_with_stop(&f, cfg, &label, cutoff, stop), None),
                    Err(err) => (
                        record_from(
                            &label,
                            cfg,
                            RunStatus::Error,
                            Duration::ZERO,
                            &SolveStats::default(),
                        ),
                        Some(format!("{label}: {err}")),
                    ),
                };
                *slots[i].lock().expect("slot lock") = Some(outcome);
            });
        }
    });

    let mut completed = Vec::with_capacity(instances.len());
    let mut records = Vec::with_capacity(instances.len());
    let mut warnings = Vec::new();
    for (i, slot) in slots.into_iter().enumerate() {
        let Some((record, warning)) = slot.into_inner().expect("slot lock") else { continue };
        if let Some(w) = warning {
            warnings.push(w);
        }
        completed.push(i);
        records.push(record);
    }
    if records.len() < instances.len() {
        warnings.push(format!(
            "interrupted: {} of {} instances completed",
            records.len(),
            instances.len()
        ));
    }

    let mut violations = Vec::new();
    for (&i, record) in completed.iter().zip(&records) {
        let inst = &instances[i];
        if let Some(expected) = inst.expected {
            let got = match record.status {
                RunStatus::Sat => Some(Status::Sat),
                RunStatus::Unsat => Some(Status::Unsat),
                _ => None,
            };
            if let Some(got) = got {
                if got != expected {
                    violations.push(format!(
                        "{}: expected {expected}, solver answered {got}",
                        record.instance
                    ));
                }
            }
        }
    }

    let scored: Vec<RunRecord> =
        records.iter().filter(|r| r.status != RunStatus::Error).cloned().collect();
    let summary = SuiteSummary {
        num_sat: records.iter().filter(|r| r.status == RunStatus::Sat).count(),
        num_unsat: records.iter().filter(|r| r.status == RunStatus::Unsat).count(),
        num_solved: records.iter().filter(|r| r.status.solved()).count(),
        num_timeout: records.iter().filter(|r| r.status == RunStatus::Timeout).count(),
        num_unknown: records.iter().filter(|r| r.status == RunStatus::Unknown).count(),
        num_error: records.iter().filter(|r| r.status == RunStatus::Error).count(),
        par2: par2(&scored, cutoff.as_secs_f64()).ok(),
    };
    SuiteReport { cutoff_s: cutoff.as_secs_f64(), records, summary, violations, warnings }
}

fn load_instance(path: &Path) -> io::Result<Formula> {
    let file = File::open(path)?;
    let parsed = parse_dimacs(BufReader::new(file))
        .map_err(|e| io::Error::new(io::ErrorKind::InvalidData, e.to_string()))?;
    Ok(parsed.formula)
}
