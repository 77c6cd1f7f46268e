//! Instance generation for experiments and tests.

use crate::formula::{Clause, Formula, Literal};
use crate::rng::Xoshiro256StarStar;

/// Uniform random 3-SAT: each clause picks three distinct variables and
/// negates each with probability 1/2. Deterministic in `seed`.
pub fn random_3sat(num_vars: u32, num_clauses: usize, seed: u64) -> Formula {
    assert!(num_vars >= 3, "3-SAT needs at least three variables");
    let mut rng = Xoshiro256StarStar::seeded(seed);
    let clauses = (0..num_clauses)
        .map(|_| {
            let mut vars = [0u32; 3];
            for i in 0..3 {
                loop {
                    let v = 1 + rng.below(num_vars as u64) as u32;
                    if !vars[..i].contains(&v) {
                        vars[i] = v;
                        break;
                    }
                }
            }
            vars.iter().map(|&v| Literal::new(v, rng.next_bool())).collect::<Clause>()
        })
        .collect();
    Formula::new(num_vars, clauses).expect("generated literals are in range")
}

/// The clause/variable ratio at the random 3-SAT phase transition.
pub const PHASE_TRANSITION_RATIO: f64 = 4.26;

/// Random 3-SAT at the phase-transition ratio.
pub fn random_3sat_at_ratio(num_vars: u32, ratio: f64, seed: u64) -> Formula {
    let num_clauses = (ratio * num_vars as f64).round() as usize;
    random_3sat(num_vars, num_clauses, seed)
}

/// Pigeonhole principle: `pigeons` pigeons into `holes` holes, injectively.
/// Unsatisfiable iff `pigeons > holes`. Variable `x_{p,h}` ("pigeon p sits in
/// hole h") is numbered `(p - 1) * holes + h`.
pub fn pigeonhole(pigeons: u32, holes: u32) -> Formula {
    assert!(pigeons >= 1 && holes >= 1);
    let var = |p: u32, h: u32| Literal::new((p - 1) * holes + h, true);
    let mut clauses = Vec::new();
    for p in 1..=pigeons {
        clauses.push((1..=holes).map(|h| var(p, h)).collect::<Clause>());
    }
    for h in 1..=holes {
        for p in 1..=pigeons {
            for q in (p + 1)..=pigeons {
                clauses.push(Clause::new(vec![!var(p, h), !var(q, h)]));
            }
        }
    }
    Formula::new(pigeons * holes, clauses).expect("generated literals are in range")
}

/// The mixed-size random 3-SAT family used by the oracle test suites:
/// 18–24 variables at clause/variable ratios spread over 3.0–5.0, all
/// reproducible from `master_seed`.
pub fn oracle_suite(count: usize, master_seed: u64) -> Vec<Formula> {
    let mut rng = Xoshiro256StarStar::derived(master_seed, 0x0ac1e);
    (0..count)
        .map(|_| {
            let num_vars = 18 + rng.below(7) as u32; // 18..=24
            let ratio = 3.0 + 2.0 * rng.next_f64(); // [3.0, 5.0)
            let num_clauses = (ratio * num_vars as f64).round() as usize;
            random_3sat(num_vars, num_clauses, rng.next_u64())
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::{brute_force_solve, check_model};

    #[test]
    fn random_3sat_is_deterministic_and_well_formed() {
        let a = random_3sat(20, 85, 7);
        let b = random_3sat(20, 85, 7);
        assert_eq!(a, b);
        assert_ne!(a, random_3sat(20, 85, 8));
        assert_eq!(a.num_clauses(), 85);
        for c in a.clauses() {
            assert_eq!(c.len(), 3);
            let mut vars: Vec<u32> = c.iter().map(|l| l.var()).collect();
            vars.sort_unstable();
            vars.dedup();
            assert_eq!(vars.len(), 3, "variables within a clause are distinct");
        }
    }

    #[test]
    fn pigeonhole_sat_and_unsat_sides() {
        assert_eq!(pigeonhole(3, 2).num_vars(), 6);
        assert!(!brute_force_solve(&pigeonhole(3, 2)).unwrap().is_sat());
        let fits = pigeonhole(3, 3);
        let result = brute_force_solve(&fits).unwrap();
        assert!(check_model(&fits, result.model().unwrap()).unwrap());
        assert!(brute_force_solve(&pigeonhole(2, 4)).unwrap().is_sat());
    }

    #[test]
    fn oracle_suite_is_reproducible_and_in_range() {
        let a = oracle_suite(20, 42);
        let b = oracle_suite(20, 42);
        assert_eq!(a, b);
        for f in &a {
            assert!((18..=24).contains(&f.num_vars()));
            let ratio = f.num_clauses() as f64 / f.num_vars() as f64;
            assert!((2.9..5.2).contains(&ratio), "ratio {ratio}");
        }
    }
}
