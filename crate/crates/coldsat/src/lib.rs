//! A CDCL SAT solver built to study what search information is worth keeping
//! across restarts.
//!
//! On top of a conventional engine (two-watched-literal propagation, first-UIP
//! learning, VSIDS branching, phase saving, Luby or LBD-EMA warm restarts),
//! the solver layers *cold restarts*: scheduled restarts that deliberately
//! forget part of the learned state — the branching order (FO), the saved
//! phases (FP), the learnt clauses (FC), or any combination. A linear-growth
//! schedule keeps cold restarts rare enough to preserve completeness.
//!
//! The crate also ships a seed-diversified parallel portfolio with budgeted,
//! LBD-bounded clause sharing, and an experiment harness for run-time
//! variation studies, PAR2 scoring, and clause-utilization reports.

pub mod clausedb;
pub mod engine;
pub mod formula;
pub mod harness;
pub mod parallel;
pub mod restart;
pub mod rng;

pub use engine::{
    solve_formula, ColdPolicies, SolveResult, SolveStats, Solver, SolverConfig, Status,
};
pub use formula::{
    brute_force_solve, check_model, parse_dimacs, parse_dimacs_str, write_dimacs,
    write_dimacs_string, Clause, Formula, Literal, Model,
};
pub use parallel::{run_portfolio, PortfolioConfig, PortfolioResult, SharePolicy};
pub use restart::{luby, WarmPolicy};
