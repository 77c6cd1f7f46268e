//! The CDCL search engine.
//!
//! Single-worker conflict-driven search: two-watched-literal unit
//! propagation, first-UIP conflict analysis with LBD computation,
//! non-chronological backjumping, exponential VSIDS branching, and phase
//! saving. Warm restarts follow the configured policy; at each warm trigger
//! the cold scheduler may replace the restart with a cold one that forgets
//! branching order, phases, learnt clauses, or any combination.
//!
//! A solver instance is strictly sequential. The portfolio drives instances
//! through [`SolverHooks`]: learnt clauses stream out through `on_learnt`,
//! and at every restart (decision level 0) the solver drains `take_imports`
//! and checks `should_stop`.

pub mod varorder;

use crate::clausedb::{ClauseDb, ClauseRef, LearntInfo, UsageKind, UsageReport, Watcher};
use crate::formula::{check_model, Formula, Literal, Model};
use crate::restart::{forget_order, forget_phases, ColdScheduler, WarmPolicy, WarmRestart};
use crate::rng::Xoshiro256StarStar;
use serde::{Deserialize, Serialize};
use std::time::{Duration, Instant};

/// Which kinds of learned information a cold restart forgets.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct ColdPolicies {
    pub forget_order: bool,
    pub forget_phases: bool,
    pub forget_clauses: bool,
}

impl ColdPolicies {
    pub const NONE: ColdPolicies =
        ColdPolicies { forget_order: false, forget_phases: false, forget_clauses: false };
    pub const FO: ColdPolicies =
        ColdPolicies { forget_order: true, forget_phases: false, forget_clauses: false };
    pub const FP: ColdPolicies =
        ColdPolicies { forget_order: false, forget_phases: true, forget_clauses: false };
    pub const FC: ColdPolicies =
        ColdPolicies { forget_order: false, forget_phases: false, forget_clauses: true };

    pub fn combined(mut self, other: ColdPolicies) -> ColdPolicies {
        self.forget_order |= other.forget_order;
        self.forget_phases |= other.forget_phases;
        self.forget_clauses |= other.forget_clauses;
        self
    }

    pub fn is_empty(&self) -> bool {
        !(self.forget_order || self.forget_phases || self.forget_clauses)
    }

    /// Short label like "fo+fc", or "none".
    pub fn label(&self) -> String {
        let mut parts = Vec::new();
        if self.forget_order {
            parts.push("fo");
        }
        if self.forget_phases {
            parts.push("fp");
        }
        if self.forget_clauses {
            parts.push("fc");
        }
        if parts.is_empty() {
            "none".to_string()
        } else {
            parts.join("+")
        }
    }

    /// All eight subsets, warm-only first.
    pub fn all_combinations() -> [ColdPolicies; 8] {
        let mut out = [ColdPolicies::NONE; 8];
        for (i, slot) in out.iter_mut().enumerate() {
            *slot = ColdPolicies {
                forget_order: i & 1 != 0,
                forget_phases: i & 2 != 0,
                forget_clauses: i & 4 != 0,
            };
        }
        out
    }
}

pub const DEFAULT_COLD_INTERVAL: u64 = 400_000;
pub const VSIDS_DECAY: f64 = 0.95;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    pub warm: WarmPolicy,
    pub cold: ColdPolicies,
    /// Interval parameter `p`, in conflicts.
    pub cold_interval: u64,
    /// FC deletes learnt clauses with LBD strictly above this threshold;
    /// 0 deletes everything unlocked.
    pub fc_lbd_threshold: u32,
    pub seed: u64,
    pub conflict_budget: Option<u64>,
    /// Wall-clock cutoff per `solve` call; exceeding it yields `Unknown`.
    pub time_budget: Option<Duration>,
    /// Draw initial activities uniformly from `[0, 1)` instead of all-zero.
    pub random_initial_order: bool,
    /// Draw initial phases as fair coins instead of all-false.
    pub random_initial_phase: bool,
    /// Validate engine invariants after every cold restart (slow; for tests).
    pub check_invariants: bool,
}

impl Default for SolverConfig {
    fn default() -> SolverConfig {
        SolverConfig {
            warm: WarmPolicy::ema_default(),
            cold: ColdPolicies::FO,
            cold_interval: DEFAULT_COLD_INTERVAL,
            fc_lbd_threshold: 0,
            seed: 0,
            conflict_budget: None,
            time_budget: None,
            random_initial_order: false,
            random_initial_phase: false,
            check_invariants: false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Status {
    Sat,
    Unsat,
    Unknown,
}

impl std::fmt::Display for Status {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Status::Sat => "SATISFIABLE",
            Status::Unsat => "UNSATISFIABLE",
            Status::Unknown => "UNKNOWN",
        };
        write!(f, "{s}")
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SolveStats {
    pub conflicts: u64,
    pub decisions: u64,
    /// Implied assignments made by unit propagation.
    pub propagations: u64,
    pub warm_restarts: u64,
    pub cold_restarts: u64,
    /// Learnt clauses stored in the database (units are consumed directly).
    pub learnt_clauses: u64,
    pub deleted_clauses: u64,
    pub imported_clauses: u64,
}

#[derive(Debug, Clone)]
pub struct SolveResult {
    pub status: Status,
    pub model: Option<Model>,
    pub stats: SolveStats,
}

/// A clause received from another portfolio worker.
#[derive(Debug, Clone)]
pub struct ImportedClause {
    pub literals: Vec<Literal>,
    pub lbd: u32,
}

/// Portfolio-side callbacks; see the module docs for the calling contract.
pub trait SolverHooks: Send {
    fn on_learnt(&mut self, _literals: &[Literal], _lbd: u32) {}
    fn should_stop(&self) -> bool {
        false
    }
    fn take_imports(&mut self) -> Vec<ImportedClause> {
        Vec::new()
    }
}

/// Saved polarities, updated whenever a variable is unassigned.
struct PhaseStore {
    saved: Vec<bool>,
}

impl PhaseStore {
    fn new(num_vars: u32) -> PhaseStore {
        PhaseStore { saved: vec![false; num_vars as usize] }
    }

    fn get(&self, var: u32) -> bool {
        self.saved[(var - 1) as usize]
    }

    fn save(&mut self, var: u32, value: bool) {
        self.saved[(var - 1) as usize] = value;
    }
}

/// Number of distinct values in the iterator; used for LBD.
fn distinct_levels<I: IntoIterator<Item = u32>>(levels: I) -> u32 {
    let mut seen: Vec<u32> = levels.into_iter().collect();
    seen.sort_unstable();
    seen.dedup();
    seen.len() as u32
}

pub struct Solver {
    num_vars: u32,
    cfg: SolverConfig,
    db: ClauseDb,
    values: Vec<Option<bool>>,      // by var - 1
    level: Vec<u32>,                // by var - 1
    reason: Vec<Option<ClauseRef>>, // by var - 1
    trail: Vec<Literal>,
    trail_lim: Vec<usize>,
    queue_head: usize,
    order: varorder::VarOrder,
    phases: PhaseStore,
    warm: WarmRestart,
    cold: Option<ColdScheduler>,
    cold_rng: Xoshiro256StarStar,
    seen: Vec<bool>, // analyze scratch, by var - 1
    stats: SolveStats,
    unsat: bool,
    finished: Option<Status>,
    model: Option<Model>,
    hooks: Option<Box<dyn SolverHooks>>,
    deadline: Option<Instant>,
}

// rng stream layout under the solver seed
const STREAM_INITIAL_ORDER: u64 = 0;
const STREAM_INITIAL_PHASE: u64 = 1;
const STREAM_COLD_RESTART: u64 = 2;

impl Solver {
    pub fn new(f: &Formula, cfg: SolverConfig) -> Solver {
        assert!(
            cfg.cold.is_empty() || cfg.cold_interval >= 1,
            "cold_interval must be >= 1 when cold policies are enabled"
        );
        let n = f.num_vars();
        let mut order = varorder::VarOrder::new(n, VSIDS_DECAY);
        if cfg.random_initial_order {
            let mut rng = Xoshiro256StarStar::derived(cfg.seed, STREAM_INITIAL_ORDER);
            order.randomize_activities(&mut rng);
            order.rebuild(1..=n);
        }
        let mut phases = PhaseStore::new(n);
        if cfg.random_initial_phase {
            let mut rng = Xoshiro256StarStar::derived(cfg.seed, STREAM_INITIAL_PHASE);
            forget_phases(&mut phases.saved, &mut rng);
        }
        let mut solver = Solver {
            num_vars: n,
            db: ClauseDb::new(n),
            values: vec![None; n as usize],
            level: vec![0; n as usize],
            reason: vec![None; n as usize],
            trail: Vec::with_capacity(n as usize),
            trail_lim: Vec::new(),
            queue_head: 0,
            order,
            phases,
            warm: WarmRestart::new(cfg.warm),
            cold: (!cfg.cold.is_empty()).then(|| ColdScheduler::new(cfg.cold_interval)),
            cold_rng: Xoshiro256StarStar::derived(cfg.seed, STREAM_COLD_RESTART),
            seen: vec![false; n as usize],
            stats: SolveStats::default(),
            unsat: false,
            finished: None,
            model: None,
            hooks: None,
            deadline: None,
            cfg,
        };
        for clause in f.clauses() {
            solver.load_clause(clause.literals());
        }
        solver
    }

    pub fn set_hooks(&mut self, hooks: Box<dyn SolverHooks>) {
        self.hooks = Some(hooks);
    }

    pub fn set_conflict_budget(&mut self, budget: Option<u64>) {
        self.cfg.conflict_budget = budget;
    }

    pub fn stats(&self) -> &SolveStats {
        &self.stats
    }

    pub fn num_vars(&self) -> u32 {
        self.num_vars
    }

    pub fn activities(&self) -> &[f64] {
        self.order.activities()
    }

    pub fn saved_phases(&self) -> &[bool] {
        &self.phases.saved
    }

    pub fn learnt_infos(&self) -> Vec<LearntInfo> {
        self.db.learnt_infos()
    }

    pub fn usage_report(&self) -> UsageReport {
        self.db.usage_report()
    }

    /// Clauses currently serving as the reason of a trail entry.
    pub fn locked_refs(&self) -> Vec<ClauseRef> {
        self.trail.iter().filter_map(|lit| self.reason[(lit.var() - 1) as usize]).collect()
    }

    fn decision_level(&self) -> u32 {
        self.trail_lim.len() as u32
    }

    #[inline]
    fn value_lit(&self, lit: Literal) -> Option<bool> {
        self.values[(lit.var() - 1) as usize].map(|v| v == lit.is_positive())
    }

    fn load_clause(&mut self, literals: &[Literal]) {
        if self.unsat {
            return;
        }
        let mut lits = literals.to_vec();
        let mut sorted = lits.clone();
        sorted.sort_unstable();
        if sorted.windows(2).any(|w| w[0] == !w[1]) {
            return; // tautology
        }
        sorted.dedup();
        if sorted.len() < lits.len() {
            let mut kept = Vec::with_capacity(sorted.len());
            for &l in &lits {
                if !kept.contains(&l) {
                    kept.push(l);
                }
            }
            lits = kept;
        }
        match lits.len() {
            0 => self.unsat = true,
            1 => self.assign_root(lits[0]),
            _ => {
                self.db.add_original(lits);
            }
        }
    }

    /// Level-0 fact; contradicting an existing fact makes the formula UNSAT.
    fn assign_root(&mut self, lit: Literal) {
        debug_assert_eq!(self.decision_level(), 0);
        match self.value_lit(lit) {
            Some(true) => {}
            Some(false) => self.unsat = true,
            None => self.assign(lit, None),
        }
    }

    fn assign(&mut self, lit: Literal, reason: Option<ClauseRef>) {
        let v = (lit.var() - 1) as usize;
        debug_assert!(self.values[v].is_none(), "double assignment of {lit}");
        self.values[v] = Some(lit.is_positive());
        self.level[v] = self.decision_level();
        self.reason[v] = reason;
        self.trail.push(lit);
    }

    // -- propagation ---------------------------------------------------------

    /// Runs unit propagation to fixpoint; returns the first conflicting
    /// clause, if any.
    fn propagate(&mut self) -> Option<ClauseRef> {
        while self.queue_head < self.trail.len() {
            let lit = self.trail[self.queue_head];
            self.queue_head += 1;
            let false_lit = !lit;
            let mut watchers = self.db.take_watchers(false_lit);
            let mut i = 0;
            while i < watchers.len() {
                let w = watchers[i];
                if self.value_lit(w.blocker) == Some(true) {
                    i += 1;
                    continue;
                }
                let cref = w.cref;
                {
                    let lits = self.db.lits_mut(cref);
                    if lits[0] == false_lit {
                        lits.swap(0, 1);
                    }
                    debug_assert_eq!(lits[1], false_lit);
                }
                let first = self.db.lits(cref)[0];
                if self.value_lit(first) == Some(true) {
                    watchers[i].blocker = first;
                    i += 1;
                    continue;
                }
                let replacement = {
                    let lits = self.db.lits(cref);
                    (2..lits.len()).find(|&k| self.value_lit(lits[k]) != Some(false))
                };
                if let Some(k) = replacement {
                    let lits = self.db.lits_mut(cref);
                    lits.swap(1, k);
                    let new_watch = lits[1];
                    self.db.push_watcher(new_watch, Watcher { cref, blocker: first });
                    watchers.swap_remove(i);
                    continue;
                }
                // No replacement: the clause is unit on `first`, or in conflict.
                if self.value_lit(first) == Some(false) {
                    self.db.put_watchers(false_lit, watchers);
                    self.queue_head = self.trail.len();
                    return Some(cref);
                }
                self.stats.propagations += 1;
                if self.db.is_learnt(cref) {
                    self.db.record_usage(cref, UsageKind::Propagation);
                }
                self.assign(first, Some(cref));
                i += 1;
            }
            self.db.put_watchers(false_lit, watchers);
        }
        None
    }

    // -- conflict analysis ---------------------------------------------------

    /// First-UIP analysis. Returns the asserting clause (asserting literal in
    /// position 0, a backjump-level literal in position 1), the backjump
    /// level, and the clause's LBD.
    fn analyze(&mut self, conflict: ClauseRef) -> (Vec<Literal>, u32, u32) {
        let current = self.decision_level();
        debug_assert!(current >= 1);
        let mut learnt: Vec<Literal> = vec![Literal::from_index(0)]; // slot 0 = asserting literal
        let mut pending = 0usize; // seen-but-unresolved variables at the current level
        let mut trail_idx = self.trail.len();
        let mut cref = conflict;
        let mut skip_first = false;

        loop {
            if self.db.is_learnt(cref) {
                self.db.record_usage(cref, UsageKind::Conflict);
            }
            let start = usize::from(skip_first);
            // Indexed walk: bumping borrows the order while the db holds the
            // clause, so re-fetch the literal each iteration.
            for idx in start..self.db.lits(cref).len() {
                let lit = self.db.lits(cref)[idx];
                let v = (lit.var() - 1) as usize;
                if !self.seen[v] && self.level[v] > 0 {
                    self.seen[v] = true;
                    self.order.bump(lit.var());
                    if self.level[v] >= current {
                        pending += 1;
                    } else {
                        learnt.push(lit);
                    }
                }
            }
            loop {
                trail_idx -= 1;
                if self.seen[(self.trail[trail_idx].var() - 1) as usize] {
                    break;
                }
            }
            let resolved = self.trail[trail_idx];
            self.seen[(resolved.var() - 1) as usize] = false;
            pending -= 1;
            if pending == 0 {
                learnt[0] = !resolved;
                break;
            }
            cref = self.reason[(resolved.var() - 1) as usize]
                .expect("non-decision current-level literal has a reason");
            skip_first = true; // position 0 of a reason is the propagated literal
        }

        let backjump_level = if learnt.len() == 1 {
            0
        } else {
            let mut max_i = 1;
            for i in 2..learnt.len() {
                if self.level_of(learnt[i]) > self.level_of(learnt[max_i]) {
                    max_i = i;
                }
            }
            learnt.swap(1, max_i);
            self.level_of(learnt[1])
        };
        let lbd = distinct_levels(learnt.iter().map(|&l| self.level_of(l)));
        for &l in &learnt {
            self.seen[(l.var() - 1) as usize] = false;
        }
        (learnt, backjump_level, lbd)
    }

    fn level_of(&self, lit: Literal) -> u32 {
        self.level[(lit.var() - 1) as usize]
    }

    // -- backjumping and decisions -------------------------------------------

    /// Unassigns everything above `target` in reverse trail order, saving
    /// phases and re-inserting variables into the order.
    fn backjump(&mut self, target: u32) {
        if target >= self.decision_level() {
            return;
        }
        let keep = self.trail_lim[target as usize];
        for i in (keep..self.trail.len()).rev() {
            let lit = self.trail[i];
            let v = (lit.var() - 1) as usize;
            self.phases.save(lit.var(), lit.is_positive());
            self.values[v] = None;
            self.reason[v] = None;
            self.order.insert(lit.var());
        }
        self.trail.truncate(keep);
        self.trail_lim.truncate(target as usize);
        self.queue_head = self.trail.len();
    }

    /// Picks the highest-activity unassigned variable with its saved phase
    /// and opens a new decision level. Returns the decision literal.
    fn decide(&mut self) -> Option<Literal> {
        let values = &self.values;
        let var = self.order.pop_max(|v| values[(v - 1) as usize].is_none())?;
        self.stats.decisions += 1;
        self.trail_lim.push(self.trail.len());
        let lit = Literal::new(var, self.phases.get(var));
        self.assign(lit, None);
        Some(lit)
    }

    // -- restarts --------------------------------------------------------------

    /// Performs the restart due at a warm trigger point: cold when the
    /// scheduler says so, warm otherwise. Afterwards polls the portfolio
    /// hooks for imports.
    fn restart(&mut self) {
        let is_cold = self.cold.as_ref().is_some_and(|c| c.due());
        self.backjump(0);
        if is_cold {
            self.execute_cold_restart();
        } else {
            self.stats.warm_restarts += 1;
        }
        self.warm.restarted();
        self.poll_imports();
    }

    /// Applies the enabled forgetting actions, in FO, FP, FC order.
    fn execute_cold_restart(&mut self) {
        debug_assert_eq!(self.decision_level(), 0);
        let snapshot = self
            .cfg
            .check_invariants
            .then(|| (self.order.activities().to_vec(), self.phases.saved.clone()));
        if self.cfg.cold.forget_order {
            let values = &self.values;
            let unassigned: Vec<u32> =
                (1..=self.num_vars).filter(|&v| values[(v - 1) as usize].is_none()).collect();
            forget_order(&mut self.order, unassigned, &mut self.cold_rng);
        }
        if self.cfg.cold.forget_phases {
            forget_phases(&mut self.phases.saved, &mut self.cold_rng);
        }
        if self.cfg.cold.forget_clauses {
            let locked = self.locked_refs();
            self.stats.deleted_clauses += self.db.forget(self.cfg.fc_lbd_threshold, &locked) as u64;
        }
        if let Some(c) = self.cold.as_mut() {
            c.fired();
        }
        self.stats.cold_restarts += 1;
        if let Some((acts_before, phases_before)) = snapshot {
            self.assert_cold_invariants(&acts_before, &phases_before);
        }
    }

    /// Forces a cold restart right now, regardless of the schedule; intended
    /// for experiments and invariant tests.
    pub fn force_cold_restart(&mut self) {
        self.backjump(0);
        self.execute_cold_restart();
    }

    fn assert_cold_invariants(&self, acts_before: &[f64], phases_before: &[bool]) {
        let p = &self.cfg.cold;
        if p.forget_order {
            assert!(
                self.order.activities().iter().all(|a| (0.0..1.0).contains(a)),
                "FO must leave every activity in [0, 1)"
            );
        } else {
            assert_eq!(self.order.activities(), acts_before, "only FO may change activities");
        }
        if !p.forget_phases {
            assert_eq!(self.phases.saved, *phases_before, "only FP may change phases");
        }
        if p.forget_clauses {
            let locked = self.locked_refs();
            for info in self.db.learnt_infos() {
                assert!(
                    info.lbd <= self.cfg.fc_lbd_threshold || locked.contains(&info.cref),
                    "unlocked learnt clause with lbd {} survived forget({})",
                    info.lbd,
                    self.cfg.fc_lbd_threshold
                );
            }
        }
        self.db.validate_watches().expect("watch lists consistent after cold restart");
        self.validate_watch_values().expect("watch invariant after cold restart");
    }

    /// Value-level watch invariant: every live clause that is not satisfied
    /// has two non-false watched literals. Only meaningful at a propagation
    /// fixpoint.
    pub fn validate_watch_values(&self) -> Result<(), String> {
        for info in self.db.learnt_infos() {
            self.check_clause_watches(info.cref)?;
        }
        Ok(())
    }

    fn check_clause_watches(&self, cref: ClauseRef) -> Result<(), String> {
        let lits = self.db.lits(cref);
        if lits.iter().any(|&l| self.value_lit(l) == Some(true)) {
            return Ok(());
        }
        for &w in &lits[..2] {
            if self.value_lit(w) == Some(false) {
                return Err(format!("unsatisfied clause {lits:?} has false watch {w}"));
            }
        }
        Ok(())
    }

    /// Structural watch-list validation, delegated to the database.
    pub fn validate_watches(&self) -> Result<(), String> {
        self.db.validate_watches()
    }

    fn poll_imports(&mut self) {
        let Some(mut hooks) = self.hooks.take() else { return };
        for imported in hooks.take_imports() {
            self.import_clause(&imported.literals, imported.lbd);
        }
        self.hooks = Some(hooks);
    }

    /// Adds a foreign learnt clause at decision level 0, keeping its
    /// export-time LBD. Literals already false at level 0 are dropped;
    /// a clause satisfied at level 0 is ignored.
    pub fn import_clause(&mut self, literals: &[Literal], lbd: u32) {
        assert_eq!(self.decision_level(), 0, "imports happen at restart poll-points");
        let mut kept = Vec::with_capacity(literals.len());
        for &lit in literals {
            match self.value_lit(lit) {
                Some(true) => return,
                Some(false) => {}
                None => kept.push(lit),
            }
        }
        self.stats.imported_clauses += 1;
        match kept.len() {
            0 => self.unsat = true,
            1 => self.assign_root(kept[0]),
            _ => {
                self.db.add_learnt(kept, lbd.max(2));
            }
        }
    }

    // -- main loop -------------------------------------------------------------

    fn should_stop(&self) -> bool {
        if let Some(budget) = self.cfg.conflict_budget {
            if self.stats.conflicts >= budget {
                return true;
            }
        }
        if let Some(deadline) = self.deadline {
            if Instant::now() >= deadline {
                return true;
            }
        }
        self.hooks.as_ref().is_some_and(|h| h.should_stop())
    }

    fn result(&self, status: Status) -> SolveResult {
        SolveResult {
            status,
            model: if status == Status::Sat { self.model.clone() } else { None },
            stats: self.stats,
        }
    }

    fn finish(&mut self, status: Status) -> SolveResult {
        if status != Status::Unknown {
            self.finished = Some(status);
        }
        self.result(status)
    }

    /// Runs the CDCL search to SAT, UNSAT, or budget exhaustion. A solver
    /// that stopped with `Unknown` resumes where it left off when called
    /// again (raise the budget first).
    pub fn solve(&mut self) -> SolveResult {
        if let Some(status) = self.finished {
            return self.result(status);
        }
        self.deadline = self.cfg.time_budget.map(|d| Instant::now() + d);
        if self.unsat {
            return self.finish(Status::Unsat);
        }
        loop {
            if let Some(conflict) = self.propagate() {
                self.stats.conflicts += 1;
                if let Some(c) = self.cold.as_mut() {
                    c.on_conflict();
                }
                if self.decision_level() == 0 {
                    return self.finish(Status::Unsat);
                }
                let (learnt, backjump_level, lbd) = self.analyze(conflict);
                self.warm.on_conflict(lbd);
                self.backjump(backjump_level);
                if learnt.len() == 1 {
                    self.assign_root(learnt[0]);
                    if self.unsat {
                        return self.finish(Status::Unsat);
                    }
                } else {
                    let cref = self.db.add_learnt(learnt.clone(), lbd);
                    self.stats.learnt_clauses += 1;
                    self.assign(learnt[0], Some(cref));
                }
                if let Some(hooks) = self.hooks.as_mut() {
                    hooks.on_learnt(&learnt, lbd);
                }
                self.order.decay();
                if self.should_stop() {
                    return self.finish(Status::Unknown);
                }
                if self.db.reduce_due(self.stats.conflicts) {
                    let locked = self.locked_refs();
                    self.stats.deleted_clauses +=
                        self.db.reduce(&locked, self.stats.conflicts) as u64;
                    if self.cfg.check_invariants {
                        self.db.validate_watches().expect("watch lists consistent after reduce");
                    }
                }
            } else if self.warm.due() {
                self.restart();
                if self.unsat {
                    return self.finish(Status::Unsat);
                }
                if self.should_stop() {
                    return self.finish(Status::Unknown);
                }
            } else if self.decide().is_none() {
                let values: Vec<bool> =
                    self.values.iter().map(|v| v.expect("all variables assigned")).collect();
                let model = Model::new(values);
                self.model = Some(model);
                return self.finish(Status::Sat);
            } else if self.stats.decisions.is_multiple_of(1024) && self.should_stop() {
                return self.finish(Status::Unknown);
            }
        }
    }
}

/// One-shot convenience wrapper around [`Solver`].
pub fn solve_formula(f: &Formula, cfg: SolverConfig) -> SolveResult {
    let mut solver = Solver::new(f, cfg);
    let result = solver.solve();
    if result.status == Status::Sat {
        let model = result.model.as_ref().expect("SAT result carries a model");
        assert!(
            check_model(f, model).expect("model is total"),
            "solver returned a model that does not satisfy the formula"
        );
    }
    result
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::{brute_force_solve, Formula};

    fn lit(i: i32) -> Literal {
        Literal::from_dimacs(i)
    }

    fn quiet_cfg() -> SolverConfig {
        SolverConfig { cold: ColdPolicies::NONE, ..SolverConfig::default() }
    }

    #[test]
    fn pure_unit_propagation_sat() {
        let f = Formula::from_dimacs_clauses(2, &[&[1], &[-1, 2]]);
        let result = solve_formula(&f, quiet_cfg());
        assert_eq!(result.status, Status::Sat);
        let m = result.model.unwrap();
        assert!(m.value(1) && m.value(2));
        assert_eq!(result.stats.decisions, 0);
    }

    #[test]
    fn complete_two_var_contradiction_is_unsat() {
        let f = Formula::from_dimacs_clauses(2, &[&[1, 2], &[1, -2], &[-1, 2], &[-1, -2]]);
        assert_eq!(solve_formula(&f, quiet_cfg()).status, Status::Unsat);
    }

    #[test]
    fn propagation_chain_assigns_everything() {
        let f = Formula::from_dimacs_clauses(3, &[&[1], &[-1, 2], &[-2, 3]]);
        let result = solve_formula(&f, quiet_cfg());
        assert_eq!(result.status, Status::Sat);
        let m = result.model.unwrap();
        assert!(m.value(1) && m.value(2) && m.value(3));
        assert_eq!(result.stats.propagations, 2);
    }

    #[test]
    fn unit_level_conflict_is_unsat_without_decisions() {
        let f = Formula::from_dimacs_clauses(2, &[&[1], &[-1, 2], &[-1, -2]]);
        let result = solve_formula(&f, quiet_cfg());
        assert_eq!(result.status, Status::Unsat);
        assert_eq!(result.stats.decisions, 0);
    }

    #[test]
    fn empty_clause_short_circuits() {
        let f = Formula::new(2, vec![crate::formula::Clause::default()]).unwrap();
        let result = solve_formula(&f, quiet_cfg());
        assert_eq!(result.status, Status::Unsat);
        assert_eq!(result.stats.conflicts, 0);
    }

    #[test]
    fn tautologies_are_dropped_and_duplicates_merged() {
        let f = Formula::from_dimacs_clauses(2, &[&[1, -1], &[2, 2]]);
        let result = solve_formula(&f, quiet_cfg());
        assert_eq!(result.status, Status::Sat);
        assert!(result.model.unwrap().value(2));
    }

    /// Hand-traced first-UIP example: decide x1, propagate x2 and x3, the
    /// clause (¬x2 ∨ ¬x3) conflicts, and the first UIP is the decision
    /// itself, so the learnt clause is the unit (¬x1).
    #[test]
    fn analyze_learns_the_decision_negation() {
        let f = Formula::from_dimacs_clauses(3, &[&[-1, 2], &[-1, 3], &[-2, -3]]);
        let mut s = Solver::new(&f, quiet_cfg());
        s.trail_lim.push(s.trail.len());
        s.assign(lit(1), None);
        let conflict = s.propagate().expect("the hand trace ends in a conflict");
        let (learnt, backjump_level, lbd) = s.analyze(conflict);
        assert_eq!(learnt, vec![lit(-1)]);
        assert_eq!(backjump_level, 0);
        assert_eq!(lbd, 1);
    }

    #[test]
    fn lbd_counts_distinct_levels() {
        assert_eq!(distinct_levels([2u32, 2, 5, 7]), 3);
        assert_eq!(distinct_levels([1u32]), 1);
        assert_eq!(distinct_levels(std::iter::empty::<u32>()), 0);
    }

    #[test]
    fn decide_takes_max_activity_with_saved_phase() {
        let f = Formula::from_dimacs_clauses(2, &[]);
        let mut s = Solver::new(&f, quiet_cfg());
        s.order.bump(1);
        s.order.bump(1);
        s.order.bump(2);
        let decision = s.decide().unwrap();
        assert_eq!(decision, lit(-1), "x1 has top activity, saved phase false");
        assert_eq!(s.decide().unwrap(), lit(-2));
    }

    #[test]
    fn equal_activities_break_ties_to_lowest_index() {
        let f = Formula::from_dimacs_clauses(3, &[]);
        let mut s = Solver::new(&f, quiet_cfg());
        assert_eq!(s.decide().unwrap().var(), 1);
        assert_eq!(s.decide().unwrap().var(), 2);
    }

    #[test]
    fn backjump_saves_phases_and_restores_order() {
        let f = Formula::from_dimacs_clauses(3, &[&[-1, 2]]);
        let mut s = Solver::new(&f, quiet_cfg());
        s.trail_lim.push(s.trail.len());
        s.assign(lit(1), None);
        assert!(s.propagate().is_none());
        s.trail_lim.push(s.trail.len());
        s.assign(lit(-3), None);
        s.backjump(0);
        assert_eq!(s.trail.len(), 0);
        assert!(s.saved_phases()[0], "x1 was true when unassigned");
        assert!(s.saved_phases()[1], "x2 was true when unassigned");
        assert!(!s.saved_phases()[2], "x3 was false when unassigned");
        // Every variable is poppable again, and none is assigned.
        let mut vars = Vec::new();
        while let Some(l) = s.decide() {
            vars.push(l.var());
        }
        assert_eq!(vars.len(), 3);
    }

    #[test]
    fn random_initial_order_is_seed_deterministic() {
        let f = Formula::from_dimacs_clauses(8, &[]);
        let cfg =
            SolverConfig { random_initial_order: true, random_initial_phase: true, ..quiet_cfg() };
        let a = Solver::new(&f, cfg.clone());
        let b = Solver::new(&f, cfg);
        assert_eq!(a.activities(), b.activities());
        assert_eq!(a.saved_phases(), b.saved_phases());
        assert!(a.activities().iter().all(|x| (0.0..1.0).contains(x)));
    }

    #[test]
    fn default_order_decides_variable_one_first() {
        let f = Formula::from_dimacs_clauses(5, &[]);
        let mut s = Solver::new(&f, quiet_cfg());
        assert_eq!(s.decide().unwrap().var(), 1);
    }

    #[test]
    fn conflict_budget_yields_unknown_and_can_resume() {
        // Hard enough to not finish within 3 conflicts.
        let f = crate::harness::gen::random_3sat(26, 111, 77);
        let mut s = Solver::new(&f, SolverConfig { conflict_budget: Some(3), ..quiet_cfg() });
        let r = s.solve();
        assert_eq!(r.status, Status::Unknown);
        assert_eq!(r.stats.conflicts, 3);
        s.set_conflict_budget(None);
        let r = s.solve();
        assert_ne!(r.status, Status::Unknown);
        let oracle = brute_force_solve(&f).unwrap();
        assert_eq!(r.status == Status::Sat, oracle.is_sat());
    }

    #[test]
    fn identical_configs_produce_identical_stats() {
        let f = crate::harness::gen::random_3sat(25, 106, 3);
        let cfg = SolverConfig {
            warm: WarmPolicy::Luby { unit: 20 },
            cold: ColdPolicies { forget_order: true, forget_phases: true, forget_clauses: true },
            cold_interval: 40,
            random_initial_order: true,
            seed: 99,
            ..SolverConfig::default()
        };
        let a = solve_formula(&f, cfg.clone());
        let b = solve_formula(&f, cfg);
        assert_eq!(a.status, b.status);
        assert_eq!(a.stats, b.stats);
    }

    #[test]
    fn cold_restarts_fire_and_keep_invariants() {
        let f = crate::harness::gen::random_3sat(60, 256, 11);
        for cold in ColdPolicies::all_combinations() {
            let cfg = SolverConfig {
                warm: WarmPolicy::Luby { unit: 5 },
                cold,
                cold_interval: 5,
                check_invariants: true,
                ..SolverConfig::default()
            };
            let result = solve_formula(&f, cfg);
            assert_ne!(result.status, Status::Unknown);
            if !cold.is_empty() {
                assert!(result.stats.cold_restarts > 0, "policy {} never fired", cold.label());
            }
        }
    }

    #[test]
    fn import_clause_filters_against_root_facts() {
        let f = Formula::from_dimacs_clauses(3, &[&[1]]);
        let mut s = Solver::new(&f, quiet_cfg());
        // satisfied at level 0: ignored
        s.import_clause(&[lit(1), lit(2)], 2);
        assert_eq!(s.stats().imported_clauses, 0);
        // shrinks to a unit: assigned at level 0
        s.import_clause(&[lit(-1), lit(3)], 2);
        assert_eq!(s.stats().imported_clauses, 1);
        assert_eq!(s.value_lit(lit(3)), Some(true));
        // stored as a learnt clause
        s.import_clause(&[lit(2), lit(-3), lit(-2)], 3);
        assert_eq!(s.learnt_infos().len(), 1);
        let r = s.solve();
        assert_eq!(r.status, Status::Sat);
    }

    #[test]
    fn forced_cold_restart_isolation() {
        let f = crate::harness::gen::random_3sat(20, 60, 5);
        for (cold, expect_phase_change_possible) in
            [(ColdPolicies::FO, false), (ColdPolicies::FP, true), (ColdPolicies::FC, false)]
        {
            let mut s = Solver::new(
                &f,
                SolverConfig {
                    cold,
                    cold_interval: 1,
                    conflict_budget: Some(30),
                    check_invariants: true,
                    ..SolverConfig::default()
                },
            );
            s.solve();
            // First forced restart lands the solver at level 0 (the backjump
            // itself saves phases); snapshots around the second one observe
            // the forgetting actions in isolation.
            s.force_cold_restart();
            let acts_before = s.activities().to_vec();
            let phases_before = s.saved_phases().to_vec();
            s.force_cold_restart();
            if cold.forget_order {
                assert!(s.activities().iter().all(|a| (0.0..1.0).contains(a)));
            } else {
                assert_eq!(s.activities(), &acts_before[..]);
            }
            if !expect_phase_change_possible {
                assert_eq!(s.saved_phases(), &phases_before[..]);
            }
        }
    }
}
