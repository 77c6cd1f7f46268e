//! Activity-ordered branching (exponential VSIDS).
//!
//! Bumping adds the current increment to a variable's activity; instead of
//! decaying every score after each conflict, the increment itself grows by
//! `1 / decay`, and everything is rescaled when it threatens to overflow.
//! The heap keeps a superset of the unassigned variables: assigned entries
//! are skipped lazily on pop, unassigned variables re-enter eagerly when the
//! trail shrinks. Ties are broken towards the lowest variable index.

use crate::rng::Xoshiro256StarStar;

const RESCALE_LIMIT: f64 = 1e100;
const RESCALE_FACTOR: f64 = 1e-100;

pub struct VarOrder {
    activity: Vec<f64>, // indexed by var - 1
    increment: f64,
    decay: f64,
    heap: Vec<u32>, // 1-based variable indices
    pos: Vec<u32>,  // position in `heap` or ABSENT, indexed by var - 1
}

const ABSENT: u32 = u32::MAX;

impl VarOrder {
    pub fn new(num_vars: u32, decay: f64) -> VarOrder {
        assert!(decay > 0.0 && decay < 1.0);
        let mut order = VarOrder {
            activity: vec![0.0; num_vars as usize],
            increment: 1.0,
            decay,
            heap: Vec::with_capacity(num_vars as usize),
            pos: vec![ABSENT; num_vars as usize],
        };
        order.rebuild(1..=num_vars);
        order
    }

    pub fn activity(&self, var: u32) -> f64 {
        self.activity[(var - 1) as usize]
    }

    pub fn activities(&self) -> &[f64] {
        &self.activity
    }

    /// Replaces every activity with a uniform draw in `[0, 1)`.
    pub fn randomize_activities(&mut self, rng: &mut Xoshiro256StarStar) {
        for a in self.activity.iter_mut() {
            *a = rng.next_f64();
        }
    }

    pub fn reset_increment(&mut self) {
        self.increment = 1.0;
    }

    /// Rebuilds the heap to contain exactly the given variables.
    pub fn rebuild<I: IntoIterator<Item = u32>>(&mut self, vars: I) {
        self.heap.clear();
        self.pos.fill(ABSENT);
        for var in vars {
            self.pos[(var - 1) as usize] = self.heap.len() as u32;
            self.heap.push(var);
        }
        // Bottom-up heapify.
        for i in (0..self.heap.len() / 2).rev() {
            self.sift_down(i);
        }
    }

    /// True if `a` outranks `b`: higher activity, ties to the lower index.
    #[inline]
    fn beats(&self, a: u32, b: u32) -> bool {
        let (aa, ab) = (self.activity[(a - 1) as usize], self.activity[(b - 1) as usize]);
        aa > ab || (aa == ab && a < b)
    }

    pub fn in_heap(&self, var: u32) -> bool {
        self.pos[(var - 1) as usize] != ABSENT
    }

    /// Re-inserts an unassigned variable (no-op if already present).
    pub fn insert(&mut self, var: u32) {
        if self.in_heap(var) {
            return;
        }
        self.pos[(var - 1) as usize] = self.heap.len() as u32;
        self.heap.push(var);
        self.sift_up(self.heap.len() - 1);
    }

    /// Pops the highest-activity variable for which `unassigned` holds,
    /// discarding stale assigned entries on the way.
    pub fn pop_max<F: Fn(u32) -> bool>(&mut self, unassigned: F) -> Option<u32> {
        while let Some(var) = self.pop_root() {
            if unassigned(var) {
                return Some(var);
            }
        }
        None
    }

    fn pop_root(&mut self) -> Option<u32> {
        let root = *self.heap.first()?;
        let last = self.heap.pop().expect("heap is nonempty");
        self.pos[(root - 1) as usize] = ABSENT;
        if !self.heap.is_empty() {
            self.heap[0] = last;
            self.pos[(last - 1) as usize] = 0;
            self.sift_down(0);
        }
        Some(root)
    }

    /// Adds the current increment to a variable's activity.
    pub fn bump(&mut self, var: u32) {
        let idx = (var - 1) as usize;
        self.activity[idx] += self.increment;
        if self.activity[idx] > RESCALE_LIMIT {
            self.rescale();
        }
        if let Some(p) = self.heap_pos(var) {
            self.sift_up(p);
        }
    }

    fn heap_pos(&self, var: u32) -> Option<usize> {
        let p = self.pos[(var - 1) as usize];
        (p != ABSENT).then_some(p as usize)
    }

    /// Grows the increment by `1 / decay`, equivalent to decaying all scores.
    pub fn decay(&mut self) {
        self.increment /= self.decay;
        if self.increment > RESCALE_LIMIT {
            self.rescale();
        }
    }

    fn rescale(&mut self) {
        for a in self.activity.iter_mut() {
            *a *= RESCALE_FACTOR;
        }
        self.increment *= RESCALE_FACTOR;
    }

    fn sift_up(&mut self, mut i: usize) {
        while i > 0 {
            let parent = (i - 1) / 2;
            if self.beats(self.heap[i], self.heap[parent]) {
                self.swap(i, parent);
                i = parent;
            } else {
                break;
            }
        }
    }

    fn sift_down(&mut self, mut i: usize) {
        loop {
            let (l, r) = (2 * i + 1, 2 * i + 2);
            let mut best = i;
            if l < self.heap.len() && self.beats(self.heap[l], self.heap[best]) {
                best = l;
            }
            if r < self.heap.len() && self.beats(self.heap[r], self.heap[best]) {
                best = r;
            }
            if best == i {
                return;
            }
            self.swap(i, best);
            i = best;
        }
    }

    fn swap(&mut self, i: usize, j: usize) {
        self.heap.swap(i, j);
        self.pos[(self.heap[i] - 1) as usize] = i as u32;
        self.pos[(self.heap[j] - 1) as usize] = j as u32;
    }

    #[cfg(test)]
    fn heap_is_valid(&self) -> bool {
        (1..self.heap.len()).all(|i| !self.beats(self.heap[i], self.heap[(i - 1) / 2]))
            && self.heap.iter().enumerate().all(|(i, &v)| self.pos[(v - 1) as usize] == i as u32)
    }
}
