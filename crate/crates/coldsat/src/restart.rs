//! Restart policies.
//!
//! Warm restarts cancel the current assignment but keep branching scores,
//! phases, and learnt clauses; they follow either a Luby schedule or a
//! Glucose-style trigger on exponential moving averages of learnt-clause LBD.
//!
//! Cold restarts replace a warm restart and additionally forget part of the
//! learned state. With `r` the conflicts since the last cold restart and `n`
//! the number of cold restarts performed, a cold restart fires at a warm
//! trigger point once `r >= p * (n + 1)`, giving intervals `p, 2p, 3p, ...`
//! whose linear growth preserves completeness.

use crate::engine::varorder::VarOrder;
use crate::rng::Xoshiro256StarStar;
use serde::{Deserialize, Serialize};

/// The i-th element of the Luby sequence 1, 1, 2, 1, 1, 2, 4, ... (1-based):
/// `2^(k-1)` when `i = 2^k - 1`, otherwise the value at `i - 2^(k-1) + 1`
/// where `2^(k-1) <= i < 2^k - 1`.
pub fn luby(index: u64) -> u64 {
    assert!(index >= 1, "the Luby sequence is 1-based");
    let mut i = index;
    loop {
        let bits = 64 - i.leading_zeros() as u64; // 2^(bits-1) <= i < 2^bits
        let full = (1u64 << bits) - 1;
        if i == full {
            return 1u64 << (bits - 1);
        }
        i -= (1u64 << (bits - 1)) - 1;
    }
}

/// When warm restarts fire.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum WarmPolicy {
    /// Restart after `unit * luby(k)` conflicts, k counting restarts.
    Luby { unit: u64 },
    /// Restart when the fast LBD average exceeds `margin` times the slow one.
    GlucoseEma { fast_rate: f64, slow_rate: f64, margin: f64, min_conflicts: u64 },
}

pub const DEFAULT_LUBY_UNIT: u64 = 100;
pub const DEFAULT_EMA_FAST_RATE: f64 = 1.0 / 32.0; // 2^-5
pub const DEFAULT_EMA_SLOW_RATE: f64 = 1.0 / 16384.0; // 2^-14
pub const DEFAULT_EMA_MARGIN: f64 = 1.25;
pub const DEFAULT_EMA_MIN_CONFLICTS: u64 = 50;

impl WarmPolicy {
    pub fn luby_default() -> WarmPolicy {
        WarmPolicy::Luby { unit: DEFAULT_LUBY_UNIT }
    }

    pub fn ema_default() -> WarmPolicy {
        WarmPolicy::GlucoseEma {
            fast_rate: DEFAULT_EMA_FAST_RATE,
            slow_rate: DEFAULT_EMA_SLOW_RATE,
            margin: DEFAULT_EMA_MARGIN,
            min_conflicts: DEFAULT_EMA_MIN_CONFLICTS,
        }
    }
}

/// Exponential moving average, primed with its first sample so a constant
/// input stream keeps fast and slow averages exactly equal.
#[derive(Debug, Clone)]
pub struct Ema {
    value: f64,
    rate: f64,
    primed: bool,
}

impl Ema {
    pub fn new(rate: f64) -> Ema {
        Ema { value: 0.0, rate, primed: false }
    }

    pub fn update(&mut self, sample: f64) {
        if self.primed {
            self.value += self.rate * (sample - self.value);
        } else {
            self.value = sample;
            self.primed = true;
        }
    }

    pub fn get(&self) -> f64 {
        self.value
    }
}

/// Warm-restart trigger state; fed one learnt-clause LBD per conflict.
#[derive(Debug, Clone)]
pub struct WarmRestart {
    policy: WarmPolicy,
    luby_index: u64,
    ema_fast: Ema,
    ema_slow: Ema,
    conflicts_since_restart: u64,
}

impl WarmRestart {
    pub fn new(policy: WarmPolicy) -> WarmRestart {
        let (fast, slow) = match policy {
            WarmPolicy::GlucoseEma { fast_rate, slow_rate, .. } => (fast_rate, slow_rate),
            WarmPolicy::Luby { .. } => (DEFAULT_EMA_FAST_RATE, DEFAULT_EMA_SLOW_RATE),
        };
        WarmRestart {
            policy,
            luby_index: 1,
            ema_fast: Ema::new(fast),
            ema_slow: Ema::new(slow),
            conflicts_since_restart: 0,
        }
    }

    /// Records a conflict and the LBD of the clause it produced.
    pub fn on_conflict(&mut self, lbd: u32) {
        self.conflicts_since_restart += 1;
        self.ema_fast.update(lbd as f64);
        self.ema_slow.update(lbd as f64);
    }

    pub fn due(&self) -> bool {
        match self.policy {
            WarmPolicy::Luby { unit } => {
                self.conflicts_since_restart >= unit * luby(self.luby_index)
            }
            WarmPolicy::GlucoseEma { margin, min_conflicts, .. } => {
                self.conflicts_since_restart >= min_conflicts
                    && self.ema_fast.get() > margin * self.ema_slow.get()
            }
        }
    }

    /// Resets the interval after a restart (warm or cold). EMA state is
    /// deliberately kept: a cold restart only runs its forgetting actions.
    pub fn restarted(&mut self) {
        self.luby_index += 1;
        self.conflicts_since_restart = 0;
    }

    pub fn conflicts_since_restart(&self) -> u64 {
        self.conflicts_since_restart
    }

    pub fn emas(&self) -> (f64, f64) {
        (self.ema_fast.get(), self.ema_slow.get())
    }
}

/// The `r >= p * (n + 1)` cold-restart schedule.
#[derive(Debug, Clone)]
pub struct ColdScheduler {
    interval: u64,
    performed: u64,
    since_last: u64,
}

impl ColdScheduler {
    pub fn new(interval: u64) -> ColdScheduler {
        assert!(interval >= 1, "cold-restart interval must be positive");
        ColdScheduler { interval, performed: 0, since_last: 0 }
    }

    pub fn on_conflict(&mut self) {
        self.since_last += 1;
    }

    /// Consulted only at warm-restart trigger points; when true, the warm
    /// restart is replaced by a cold one.
    pub fn due(&self) -> bool {
        self.since_last >= self.interval * (self.performed + 1)
    }

    pub fn fired(&mut self) {
        self.performed += 1;
        self.since_last = 0;
    }

    pub fn performed(&self) -> u64 {
        self.performed
    }

    pub fn since_last(&self) -> u64 {
        self.since_last
    }
}

/// FO: every activity becomes a fresh uniform draw in `[0, 1)` and the bump
/// increment returns to its initial value, so scores accumulated before the
/// cold restart stop mattering after a few conflicts.
pub fn forget_order<I>(order: &mut VarOrder, unassigned: I, rng: &mut Xoshiro256StarStar)
where
    I: IntoIterator<Item = u32>,
{
    order.randomize_activities(rng);
    order.reset_increment();
    order.rebuild(unassigned);
}

/// FP: every saved phase becomes an independent fair coin flip.
pub fn forget_phases(phases: &mut [bool], rng: &mut Xoshiro256StarStar) {
    for phase in phases.iter_mut() {
        *phase = rng.next_bool();
    }
}
