//! Clause storage: original and learnt clauses, two-watched-literal lists,
//! usage accounting, periodic reduction, and threshold-based forgetting.
//!
//! Slots are recycled through a free list, so a [`ClauseRef`] is only valid
//! while its clause is alive; deletion detaches the clause's two watchers and
//! folds its usage counters into the histogram, which keeps per-LBD totals
//! stable across deletions.

use crate::formula::Literal;
use serde::{Deserialize, Serialize};

/// Index of a clause slot in the database.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ClauseRef(u32);

impl ClauseRef {
    fn idx(self) -> usize {
        self.0 as usize
    }
}

#[derive(Debug, Clone, Copy)]
pub struct Watcher {
    pub cref: ClauseRef,
    pub blocker: Literal,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UsageKind {
    Propagation,
    Conflict,
}

/// Snapshot of one live learnt clause, for instrumentation and tests.
#[derive(Debug, Clone)]
pub struct LearntInfo {
    pub cref: ClauseRef,
    pub lbd: u32,
    pub len: usize,
    pub used_in_propagation: u64,
    pub used_in_conflict: u64,
}

struct ClauseSlot {
    lits: Vec<Literal>,
    alive: bool,
    learnt: bool,
    lbd: u32,
    used_in_propagation: u64,
    used_in_conflict: u64,
}

/// LBD buckets 2..=7 plus an "8+" overflow bucket.
pub const USAGE_BUCKETS: usize = 7;
pub const USAGE_BUCKET_LABELS: [&str; USAGE_BUCKETS] = ["2", "3", "4", "5", "6", "7", "8+"];

fn bucket(lbd: u32) -> usize {
    (lbd.clamp(2, 8) - 2) as usize
}

/// Per-bucket usage totals for learnt clauses, plus the same totals divided
/// by the LBD=2 bucket (`None` when that bucket is zero).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UsageReport {
    pub propagation_raw: [u64; USAGE_BUCKETS],
    pub conflict_raw: [u64; USAGE_BUCKETS],
    pub propagation_normalized: [Option<f64>; USAGE_BUCKETS],
    pub conflict_normalized: [Option<f64>; USAGE_BUCKETS],
}

fn normalize(raw: &[u64; USAGE_BUCKETS]) -> [Option<f64>; USAGE_BUCKETS] {
    let base = raw[0];
    if base == 0 {
        return [None; USAGE_BUCKETS];
    }
    raw.map(|v| Some(v as f64 / base as f64))
}

pub struct ClauseDb {
    slots: Vec<ClauseSlot>,
    free: Vec<u32>,
    learnts: Vec<ClauseRef>,
    watches: Vec<Vec<Watcher>>,
    // usage counters of deleted clauses, folded in at deletion time
    folded_propagation: [u64; USAGE_BUCKETS],
    folded_conflict: [u64; USAGE_BUCKETS],
    reductions: u64,
    conflicts_at_last_reduce: u64,
}

const REDUCE_BASE_INTERVAL: u64 = 2000;
const REDUCE_INTERVAL_GROWTH: u64 = 300;
/// Learnt clauses at or below this LBD form the core tier and are never
/// removed by periodic reduction.
pub const CORE_TIER_LBD: u32 = 3;

impl ClauseDb {
    pub fn new(num_vars: u32) -> ClauseDb {
        ClauseDb {
            slots: Vec::new(),
            free: Vec::new(),
            learnts: Vec::new(),
            watches: vec![Vec::new(); num_vars as usize * 2],
            folded_propagation: [0; USAGE_BUCKETS],
            folded_conflict: [0; USAGE_BUCKETS],
            reductions: 0,
            conflicts_at_last_reduce: 0,
        }
    }

    fn alloc(&mut self, slot: ClauseSlot) -> ClauseRef {
        match self.free.pop() {
            Some(i) => {
                self.slots[i as usize] = slot;
                ClauseRef(i)
            }
            None => {
                self.slots.push(slot);
                ClauseRef((self.slots.len() - 1) as u32)
            }
        }
    }

    /// Stores an original (problem) clause and installs its watchers.
    pub fn add_original(&mut self, lits: Vec<Literal>) -> ClauseRef {
        debug_assert!(lits.len() >= 2, "unit and empty clauses are not stored");
        let cref = self.alloc(ClauseSlot {
            lits,
            alive: true,
            learnt: false,
            lbd: 0,
            used_in_propagation: 0,
            used_in_conflict: 0,
        });
        self.attach(cref);
        cref
    }

    /// Stores a learnt clause with its creation-time LBD and installs its
    /// watchers. Unit learnt clauses (LBD 1) never reach the database; the
    /// caller assigns them at level 0 instead.
    pub fn add_learnt(&mut self, lits: Vec<Literal>, lbd: u32) -> ClauseRef {
        assert!(lbd >= 2, "stored learnt clauses have LBD >= 2 (got {lbd})");
        debug_assert!(lits.len() >= 2);
        let cref = self.alloc(ClauseSlot {
            lits,
            alive: true,
            learnt: true,
            lbd,
            used_in_propagation: 0,
            used_in_conflict: 0,
        });
        self.learnts.push(cref);
        self.attach(cref);
        cref
    }

    pub fn lits(&self, cref: ClauseRef) -> &[Literal] {
        let slot = &self.slots[cref.idx()];
        debug_assert!(slot.alive, "access to deleted clause");
        &slot.lits
    }

    pub fn lits_mut(&mut self, cref: ClauseRef) -> &mut [Literal] {
        let slot = &mut self.slots[cref.idx()];
        debug_assert!(slot.alive, "access to deleted clause");
        &mut slot.lits
    }

    pub fn is_learnt(&self, cref: ClauseRef) -> bool {
        self.slots[cref.idx()].learnt
    }

    pub fn lbd(&self, cref: ClauseRef) -> u32 {
        self.slots[cref.idx()].lbd
    }

    pub fn record_usage(&mut self, cref: ClauseRef, kind: UsageKind) {
        let slot = &mut self.slots[cref.idx()];
        debug_assert!(slot.alive && slot.learnt);
        match kind {
            UsageKind::Propagation => slot.used_in_propagation += 1,
            UsageKind::Conflict => slot.used_in_conflict += 1,
        }
    }

    pub fn num_learnts(&self) -> usize {
        self.learnts.len()
    }

    pub fn learnt_infos(&self) -> Vec<LearntInfo> {
        self.learnts
            .iter()
            .map(|&cref| {
                let s = &self.slots[cref.idx()];
                LearntInfo {
                    cref,
                    lbd: s.lbd,
                    len: s.lits.len(),
                    used_in_propagation: s.used_in_propagation,
                    used_in_conflict: s.used_in_conflict,
                }
            })
            .collect()
    }

    // -- watch lists --------------------------------------------------------

    fn attach(&mut self, cref: ClauseRef) {
        let (l0, l1) = {
            let lits = &self.slots[cref.idx()].lits;
            (lits[0], lits[1])
        };
        self.watches[l0.index()].push(Watcher { cref, blocker: l1 });
        self.watches[l1.index()].push(Watcher { cref, blocker: l0 });
    }

    fn detach(&mut self, cref: ClauseRef) {
        let (l0, l1) = {
            let lits = &self.slots[cref.idx()].lits;
            (lits[0], lits[1])
        };
        for lit in [l0, l1] {
            let list = &mut self.watches[lit.index()];
            let pos = list
                .iter()
                .position(|w| w.cref == cref)
                .expect("watcher of a live clause is present");
            list.swap_remove(pos);
        }
    }

    /// Takes a literal's watcher list for in-place processing by propagation.
    pub fn take_watchers(&mut self, lit: Literal) -> Vec<Watcher> {
        std::mem::take(&mut self.watches[lit.index()])
    }

    pub fn put_watchers(&mut self, lit: Literal, list: Vec<Watcher>) {
        debug_assert!(self.watches[lit.index()].is_empty());
        self.watches[lit.index()] = list;
    }

    pub fn push_watcher(&mut self, lit: Literal, w: Watcher) {
        self.watches[lit.index()].push(w);
    }

    // -- deletion -----------------------------------------------------------

    fn delete(&mut self, cref: ClauseRef) {
        self.detach(cref);
        let slot = &mut self.slots[cref.idx()];
        debug_assert!(slot.alive);
        if slot.learnt {
            let b = bucket(slot.lbd);
            self.folded_propagation[b] += slot.used_in_propagation;
            self.folded_conflict[b] += slot.used_in_conflict;
        }
        slot.alive = false;
        slot.lits = Vec::new();
        self.free.push(cref.0);
    }

    /// True once the next scheduled reduction point has been reached; the
    /// interval starts at 2000 conflicts and grows by 300 per reduction.
    pub fn reduce_due(&self, total_conflicts: u64) -> bool {
        let interval = REDUCE_BASE_INTERVAL + REDUCE_INTERVAL_GROWTH * self.reductions;
        total_conflicts >= self.conflicts_at_last_reduce + interval
    }

    /// Periodic reduction: the core tier (LBD <= 3) and locked clauses are
    /// kept; the rest are sorted by (LBD ascending, conflict uses descending)
    /// and the worst half is deleted. Returns the number of deletions.
    pub fn reduce(&mut self, locked: &[ClauseRef], total_conflicts: u64) -> usize {
        self.reductions += 1;
        self.conflicts_at_last_reduce = total_conflicts;

        let locked_flags = self.locked_flags(locked);
        let mut candidates: Vec<ClauseRef> = self
            .learnts
            .iter()
            .copied()
            .filter(|&cref| {
                let s = &self.slots[cref.idx()];
                s.lbd > CORE_TIER_LBD && !locked_flags[cref.idx()]
            })
            .collect();
        candidates.sort_by(|&a, &b| {
            let sa = &self.slots[a.idx()];
            let sb = &self.slots[b.idx()];
            sa.lbd.cmp(&sb.lbd).then(sb.used_in_conflict.cmp(&sa.used_in_conflict))
        });
        let doomed = candidates.split_off(candidates.len() - candidates.len() / 2);
        self.remove_learnts(&doomed)
    }

    /// Cold-restart forgetting: deletes every unlocked learnt clause whose
    /// LBD exceeds `threshold`. A threshold of 0 deletes all unlocked learnt
    /// clauses. Returns the number of deletions.
    pub fn forget(&mut self, threshold: u32, locked: &[ClauseRef]) -> usize {
        let locked_flags = self.locked_flags(locked);
        let doomed: Vec<ClauseRef> = self
            .learnts
            .iter()
            .copied()
            .filter(|&cref| {
                let s = &self.slots[cref.idx()];
                s.lbd > threshold && !locked_flags[cref.idx()]
            })
            .collect();
        self.remove_learnts(&doomed)
    }

    fn locked_flags(&self, locked: &[ClauseRef]) -> Vec<bool> {
        let mut flags = vec![false; self.slots.len()];
        for &cref in locked {
            flags[cref.idx()] = true;
        }
        flags
    }

    fn remove_learnts(&mut self, doomed: &[ClauseRef]) -> usize {
        if doomed.is_empty() {
            return 0;
        }
        for &cref in doomed {
            self.delete(cref);
        }
        let mut learnts = std::mem::take(&mut self.learnts);
        learnts.retain(|&cref| self.slots[cref.idx()].alive);
        self.learnts = learnts;
        doomed.len()
    }

    // -- usage report -------------------------------------------------------

    /// Totals over all learnt clauses ever created, live counters plus folded
    /// counters of deleted clauses, bucketed by creation-time LBD.
    pub fn usage_report(&self) -> UsageReport {
        let mut prop = self.folded_propagation;
        let mut confl = self.folded_conflict;
        for &cref in &self.learnts {
            let s = &self.slots[cref.idx()];
            let b = bucket(s.lbd);
            prop[b] += s.used_in_propagation;
            confl[b] += s.used_in_conflict;
        }
        UsageReport {
            propagation_normalized: normalize(&prop),
            conflict_normalized: normalize(&confl),
            propagation_raw: prop,
            conflict_raw: confl,
        }
    }

    /// Structural watch-list validation: every live clause is watched exactly
    /// at its first two literals, and no watcher references a dead clause.
    pub fn validate_watches(&self) -> Result<(), String> {
        for (li, list) in self.watches.iter().enumerate() {
            let lit = Literal::from_index(li);
            for w in list {
                let slot = &self.slots[w.cref.idx()];
                if !slot.alive {
                    return Err(format!("watcher on {lit} references a dead clause"));
                }
                if slot.lits[0] != lit && slot.lits[1] != lit {
                    return Err(format!(
                        "watcher on {lit} but clause watches {:?}/{:?}",
                        slot.lits[0], slot.lits[1]
                    ));
                }
            }
        }
        for (i, slot) in self.slots.iter().enumerate() {
            if !slot.alive {
                continue;
            }
            let cref = ClauseRef(i as u32);
            for lit in [slot.lits[0], slot.lits[1]] {
                let count = self.watches[lit.index()].iter().filter(|w| w.cref == cref).count();
                if count != 1 {
                    return Err(format!("clause {i} watched {count} times at {lit}"));
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lit(i: i32) -> Literal {
        Literal::from_dimacs(i)
    }

    fn db_with(lbds: &[u32]) -> (ClauseDb, Vec<ClauseRef>) {
        // Distinct variables per clause keep watch lists independent.
        let mut db = ClauseDb::new(2 * lbds.len() as u32 + 2);
        let refs = lbds
            .iter()
            .enumerate()
            .map(|(i, &lbd)| {
                let a = (2 * i + 1) as i32;
                db.add_learnt(vec![lit(a), lit(-(a + 1))], lbd)
            })
            .collect();
        (db, refs)
    }

    #[test]
    fn add_learnt_stores_metadata_and_watchers() {
        let (db, refs) = db_with(&[2]);
        assert_eq!(db.num_learnts(), 1);
        let info = &db.learnt_infos()[0];
        assert_eq!(info.lbd, 2);
        assert_eq!((info.used_in_propagation, info.used_in_conflict), (0, 0));
        assert_eq!(db.lits(refs[0]).len(), 2);
        db.validate_watches().unwrap();
    }

    #[test]
    #[should_panic(expected = "LBD >= 2")]
    fn unit_lbd_clauses_are_rejected() {
        let mut db = ClauseDb::new(4);
        db.add_learnt(vec![lit(1), lit(2)], 1);
    }

    #[test]
    fn reduce_keeps_core_tier_and_deletes_worst_half() {
        let (mut db, _) = db_with(&[2, 6, 6]);
        let deleted = db.reduce(&[], 2000);
        assert_eq!(deleted, 1);
        assert_eq!(db.num_learnts(), 2);
        let lbds: Vec<u32> = db.learnt_infos().iter().map(|i| i.lbd).collect();
        assert!(lbds.contains(&2));
        db.validate_watches().unwrap();
    }

    #[test]
    fn reduce_prefers_deleting_low_usage_clauses() {
        let (mut db, refs) = db_with(&[5, 5, 5, 5]);
        db.record_usage(refs[2], UsageKind::Conflict);
        db.record_usage(refs[3], UsageKind::Conflict);
        db.reduce(&[], 2000);
        let survivors: Vec<ClauseRef> = db.learnt_infos().iter().map(|i| i.cref).collect();
        assert!(survivors.contains(&refs[2]) && survivors.contains(&refs[3]));
    }

    #[test]
    fn reduce_spares_locked_clauses() {
        let (mut db, refs) = db_with(&[6, 6]);
        let deleted = db.reduce(&refs.clone(), 2000);
        assert_eq!(deleted, 0);
        assert_eq!(db.num_learnts(), 2);
    }

    #[test]
    fn reduce_leaves_pure_core_db_unchanged() {
        let (mut db, _) = db_with(&[2, 3, 3, 2]);
        assert_eq!(db.reduce(&[], 2000), 0);
        assert_eq!(db.num_learnts(), 4);
    }

    #[test]
    fn reduce_schedule_grows_linearly() {
        let mut db = ClauseDb::new(4);
        assert!(!db.reduce_due(1999));
        assert!(db.reduce_due(2000));
        db.reduce(&[], 2000);
        assert!(!db.reduce_due(4299));
        assert!(db.reduce_due(4300));
        db.reduce(&[], 4300);
        assert!(db.reduce_due(4300 + 2600));
    }

    #[test]
    fn forget_respects_threshold() {
        let (mut db, refs) = db_with(&[2, 4]);
        assert_eq!(db.forget(3, &[]), 1);
        let survivors: Vec<ClauseRef> = db.learnt_infos().iter().map(|i| i.cref).collect();
        assert_eq!(survivors, vec![refs[0]]);
        db.validate_watches().unwrap();
    }

    #[test]
    fn forget_zero_empties_unlocked_learnts() {
        let (mut db, _) = db_with(&[2, 3, 7, 9]);
        assert_eq!(db.forget(0, &[]), 4);
        assert_eq!(db.num_learnts(), 0);
        db.validate_watches().unwrap();
    }

    #[test]
    fn forget_is_a_noop_below_threshold() {
        let (mut db, _) = db_with(&[2, 5, 4]);
        assert_eq!(db.forget(5, &[]), 0);
        assert_eq!(db.num_learnts(), 3);
        // and on an empty database
        let mut empty = ClauseDb::new(4);
        assert_eq!(empty.forget(0, &[]), 0);
    }

    #[test]
    fn forget_spares_locked_high_lbd_clauses() {
        let (mut db, refs) = db_with(&[6, 6]);
        assert_eq!(db.forget(0, &[refs[1]]), 1);
        let survivors: Vec<ClauseRef> = db.learnt_infos().iter().map(|i| i.cref).collect();
        assert_eq!(survivors, vec![refs[1]]);
    }

    #[test]
    fn usage_totals_are_conserved_across_deletion() {
        let (mut db, refs) = db_with(&[2, 4, 4]);
        db.record_usage(refs[0], UsageKind::Propagation);
        for _ in 0..3 {
            db.record_usage(refs[1], UsageKind::Conflict);
        }
        db.record_usage(refs[2], UsageKind::Propagation);
        let before = db.usage_report();
        db.forget(0, &[]);
        let after = db.usage_report();
        assert_eq!(before.propagation_raw, after.propagation_raw);
        assert_eq!(before.conflict_raw, after.conflict_raw);
        assert_eq!(after.propagation_raw[0], 1); // lbd 2 bucket
        assert_eq!(after.conflict_raw[2], 3); // lbd 4 bucket
        assert_eq!(after.propagation_raw[2], 1);
    }

    #[test]
    fn normalization_divides_by_the_lbd2_bucket() {
        let (mut db, refs) = db_with(&[2, 3]);
        for _ in 0..1000 {
            db.record_usage(refs[0], UsageKind::Propagation);
        }
        for _ in 0..190 {
            db.record_usage(refs[1], UsageKind::Propagation);
        }
        let report = db.usage_report();
        assert_eq!(report.propagation_normalized[0], Some(1.0));
        assert_eq!(report.propagation_normalized[1], Some(0.19));
        // conflict row has an all-zero LBD=2 bucket: undefined
        assert_eq!(report.conflict_normalized, [None; USAGE_BUCKETS]);
    }

    #[test]
    fn empty_history_reports_all_undefined() {
        let db = ClauseDb::new(4);
        let report = db.usage_report();
        assert_eq!(report.propagation_normalized, [None; USAGE_BUCKETS]);
        assert_eq!(report.conflict_normalized, [None; USAGE_BUCKETS]);
        assert_eq!(report.propagation_raw, [0; USAGE_BUCKETS]);
    }

    #[test]
    fn slots_are_recycled_after_deletion() {
        let (mut db, refs) = db_with(&[4]);
        let old = refs[0];
        db.forget(0, &[]);
        let new = db.add_learnt(vec![lit(1), lit(2)], 2);
        assert_eq!(new, old, "freed slot is reused");
        db.validate_watches().unwrap();
    }
}
