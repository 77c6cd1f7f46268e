//! Parallel portfolio: independent engine instances diversified by seed, a
//! first-definitive-answer-wins coordinator, and optional clause sharing.
//!
//! Sharing uses a broadcast bus with one inbound queue per worker. A freshly
//! learnt clause is exported when its LBD is within the configured bound and
//! the exporting worker still has literal budget in the current wall-clock
//! window; accepted clauses debit the budget by their length and are pushed
//! to every other worker, which drains its queue at restart poll-points
//! (decision level 0). Every worker is individually sound, so the first SAT
//! or UNSAT answer wins; SAT models are re-verified centrally against the
//! original formula.

use crate::engine::{
    ImportedClause, SolveResult, SolveStats, Solver, SolverConfig, SolverHooks, Status,
};
use crate::formula::{check_model, Formula, Literal, Model};
use crate::rng::SplitMix64;
use serde::{Deserialize, Serialize};
use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::{mpsc, Arc, Mutex};
use std::time::{Duration, Instant};
use thiserror::Error;

pub const MAX_WORKERS: usize = 64;
pub const DEFAULT_BUDGET_LITERALS: usize = 1500;
pub const DEFAULT_BUDGET_WINDOW: Duration = Duration::from_millis(750);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SharePolicy {
    Off,
    /// Share learnt clauses with LBD at most this bound (2 or 3).
    LbdAtMost(u32),
}

#[derive(Debug, Clone)]
pub struct PortfolioConfig {
    /// Number of engine instances (1..=64).
    pub workers: usize,
    /// Per-worker configuration template; the seed field is overridden by
    /// the worker's derived seed.
    pub base: SolverConfig,
    pub sharing: SharePolicy,
    /// Literal budget per worker per window.
    pub budget_literals: usize,
    /// Budget window length.
    pub budget_window: Duration,
    pub base_seed: u64,
    /// External cancellation (e.g. a SIGINT handler); when set, all workers
    /// stop and the portfolio returns `Unknown`.
    pub stop_flag: Option<Arc<AtomicBool>>,
}

impl Default for PortfolioConfig {
    fn default() -> PortfolioConfig {
        PortfolioConfig {
            workers: 1,
            base: SolverConfig::default(),
            sharing: SharePolicy::Off,
            budget_literals: DEFAULT_BUDGET_LITERALS,
            budget_window: DEFAULT_BUDGET_WINDOW,
            base_seed: 0,
            stop_flag: None,
        }
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PortfolioError {
    #[error("worker count {0} outside 1..={MAX_WORKERS}")]
    InvalidWorkerCount(usize),
    #[error("sharing LBD bound {0} unsupported (use 2 or 3)")]
    InvalidLbdBound(u32),
}

/// A learnt clause in flight between workers.
#[derive(Debug, Clone)]
pub struct ShareMessage {
    pub origin: usize,
    pub literals: Vec<Literal>,
    pub lbd: u32,
}

/// Per-worker sharing instrumentation.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ShareStats {
    pub exported_clauses: u64,
    pub exported_literals: u64,
    pub rejected_lbd: u64,
    pub rejected_budget: u64,
    /// Highest literal total reached in any single budget window.
    pub max_window_literals: usize,
    /// Highest LBD ever accepted for export.
    pub max_exported_lbd: u32,
}

#[derive(Debug, Clone)]
pub struct PortfolioResult {
    pub status: Status,
    pub model: Option<Model>,
    /// Worker that produced the first definitive answer.
    pub winner: Option<usize>,
    pub worker_stats: Vec<SolveStats>,
    pub share_stats: Vec<ShareStats>,
    pub wall_time: Duration,
}

/// Deterministic worker seed from `(base_seed, worker index)`.
pub fn derive_worker_seed(base_seed: u64, worker: usize) -> u64 {
    let mut mix = SplitMix64::new(base_seed ^ (worker as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15));
    mix.next_u64()
}

struct BudgetWindow {
    start: Instant,
    used: usize,
    stats: ShareStats,
}

struct Bus {
    lbd_max: u32,
    budget_literals: usize,
    window: Duration,
    inboxes: Vec<Mutex<Vec<ShareMessage>>>,
    budgets: Vec<Mutex<BudgetWindow>>,
}

impl Bus {
    fn new(workers: usize, lbd_max: u32, budget_literals: usize, window: Duration) -> Bus {
        let start = Instant::now();
        Bus {
            lbd_max,
            budget_literals,
            window,
            inboxes: (0..workers).map(|_| Mutex::new(Vec::new())).collect(),
            budgets: (0..workers)
                .map(|_| Mutex::new(BudgetWindow { start, used: 0, stats: ShareStats::default() }))
                .collect(),
        }
    }

    /// Offers a freshly learnt clause for publication; returns acceptance.
    fn export(&self, origin: usize, literals: &[Literal], lbd: u32) -> bool {
        let mut budget = self.budgets[origin].lock().expect("budget lock");
        if lbd > self.lbd_max {
            budget.stats.rejected_lbd += 1;
            return false;
        }
        let now = Instant::now();
        let elapsed = now.duration_since(budget.start);
        if elapsed >= self.window {
            // Windows are contiguous fixed-length intervals; refill at each
            // boundary the clock has crossed.
            let crossed = elapsed.as_nanos() / self.window.as_nanos();
            budget.start += self.window * crossed as u32;
            budget.used = 0;
        }
        if budget.used + literals.len() > self.budget_literals {
            budget.stats.rejected_budget += 1;
            return false;
        }
        budget.used += literals.len();
        budget.stats.exported_clauses += 1;
        budget.stats.exported_literals += literals.len() as u64;
        budget.stats.max_window_literals = budget.stats.max_window_literals.max(budget.used);
        budget.stats.max_exported_lbd = budget.stats.max_exported_lbd.max(lbd);
        drop(budget);

        debug_assert!(lbd <= self.lbd_max);
        for (i, inbox) in self.inboxes.iter().enumerate() {
            if i != origin {
                inbox.lock().expect("inbox lock").push(ShareMessage {
                    origin,
                    literals: literals.to_vec(),
                    lbd,
                });
            }
        }
        true
    }

    fn drain(&self, worker: usize) -> Vec<ShareMessage> {
        std::mem::take(&mut *self.inboxes[worker].lock().expect("inbox lock"))
    }

    fn stats(&self) -> Vec<ShareStats> {
        self.budgets.iter().map(|b| b.lock().expect("budget lock").stats).collect()
    }
}

struct WorkerHooks {
    id: usize,
    cancel: Arc<AtomicBool>,
    external_stop: Option<Arc<AtomicBool>>,
    bus: Option<Arc<Bus>>,
}

impl SolverHooks for WorkerHooks {
    fn on_learnt(&mut self, literals: &[Literal], lbd: u32) {
        if let Some(bus) = &self.bus {
            bus.export(self.id, literals, lbd);
        }
    }

    fn should_stop(&self) -> bool {
        self.cancel.load(Ordering::Relaxed)
            || self.external_stop.as_ref().is_some_and(|s| s.load(Ordering::Relaxed))
    }

    fn take_imports(&mut self) -> Vec<ImportedClause> {
        match &self.bus {
            None => Vec::new(),
            Some(bus) => bus
                .drain(self.id)
                .into_iter()
                .map(|m| ImportedClause { literals: m.literals, lbd: m.lbd })
                .collect(),
        }
    }
}

/// Runs `cfg.workers` diversified engine instances on `f`; the first
/// definitive answer wins and the rest are cancelled. Returns `Unknown` only
/// when every worker exhausted its budgets.
pub fn run_portfolio(
    f: &Formula,
    cfg: &PortfolioConfig,
) -> Result<PortfolioResult, PortfolioError> {
    if cfg.workers == 0 || cfg.workers > MAX_WORKERS {
        return Err(PortfolioError::InvalidWorkerCount(cfg.workers));
    }
    let bus = match cfg.sharing {
        SharePolicy::Off => None,
        SharePolicy::LbdAtMost(bound) => {
            if !(2..=3).contains(&bound) {
                return Err(PortfolioError::InvalidLbdBound(bound));
            }
            Some(Arc::new(Bus::new(cfg.workers, bound, cfg.budget_literals, cfg.budget_window)))
        }
    };

    let start = Instant::now();
    let cancel = Arc::new(AtomicBool::new(false));
    let (tx, rx) = mpsc::channel::<(usize, SolveResult)>();

    let (results, winner) = std::thread::scope(|scope| {
        for id in 0..cfg.workers {
            let mut worker_cfg = cfg.base.clone();
            worker_cfg.seed = derive_worker_seed(cfg.base_seed, id);
            let tx = tx.clone();
            let hooks = WorkerHooks {
                id,
                cancel: Arc::clone(&cancel),
                external_stop: cfg.stop_flag.clone(),
                bus: bus.clone(),
            };
            scope.spawn(move || {
                let mut solver = Solver::new(f, worker_cfg);
                solver.set_hooks(Box::new(hooks));
                let result = solver.solve();
                let _ = tx.send((id, result));
            });
        }
        drop(tx);

        let mut results: Vec<Option<SolveResult>> = (0..cfg.workers).map(|_| None).collect();
        let mut winner = None;
        while let Ok((id, result)) = rx.recv() {
            if winner.is_none() && matches!(result.status, Status::Sat | Status::Unsat) {
                winner = Some(id);
                cancel.store(true, Ordering::Relaxed);
            }
            results[id] = Some(result);
        }
        (results, winner)
    });

    let results: Vec<SolveResult> =
        results.into_iter().map(|r| r.expect("every worker reports")).collect();
    let status = winner.map_or(Status::Unknown, |w| results[w].status);
    let model = winner.and_then(|w| results[w].model.clone());
    if status == Status::Sat {
        let model = model.as_ref().expect("SAT winner carries a model");
        assert!(
            check_model(f, model).expect("model is total"),
            "portfolio winner produced a bad model"
        );
    }
    // Individually sound workers can never disagree on a definitive status.
    debug_assert!(results
        .iter()
        .filter(|r| r.status != Status::Unknown)
        .all(|r| r.status == status));
    Ok(PortfolioResult {
        status,
        model,
        winner,
        worker_stats: results.iter().map(|r| r.stats).collect(),
        share_stats: bus.map_or_else(|| vec![ShareStats::default(); cfg.workers], |b| b.stats()),
        wall_time: start.elapsed(),
    })
}

/// Per-instance and mean speedup of a multi-core run over a single-core run.
/// `None` marks an unsolved instance. Eligible instances were solved on both
/// sides, under the cutoff, and not trivially (`max(t1, tk) > 1 s`).
pub fn aggregate_speedup(
    times_single: &[Option<f64>],
    times_multi: &[Option<f64>],
    cutoff_s: f64,
) -> Result<SpeedupReport, crate::harness::MetricsError> {
    use crate::harness::MetricsError;
    if times_single.len() != times_multi.len() {
        return Err(MetricsError::UnpairedRecords(times_single.len(), times_multi.len()));
    }
    let mut per_instance = Vec::new();
    for (index, (t1, tk)) in times_single.iter().zip(times_multi).enumerate() {
        let (Some(t1), Some(tk)) = (*t1, *tk) else { continue };
        if t1 >= cutoff_s || tk >= cutoff_s {
            continue;
        }
        if t1.max(tk) <= 1.0 {
            continue; // too easy to time meaningfully
        }
        per_instance.push(SpeedupEntry { index, t_single: t1, t_multi: tk, speedup: t1 / tk });
    }
    if per_instance.is_empty() {
        return Err(MetricsError::NoEligibleInstances);
    }
    let mean = per_instance.iter().map(|e| e.speedup).sum::<f64>() / per_instance.len() as f64;
    Ok(SpeedupReport { per_instance, mean })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpeedupEntry {
    pub index: usize,
    pub t_single: f64,
    pub t_multi: f64,
    pub speedup: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpeedupReport {
    pub per_instance: Vec<SpeedupEntry>,
    pub mean: f64,
}
