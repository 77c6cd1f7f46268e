//! `coldsat` command line: solve, portfolio, suite, and variation commands.
//!
//! Output follows the usual SAT solver conventions: an `s SATISFIABLE` /
//! `s UNSATISFIABLE` / `s UNKNOWN` status line, `v` lines with the model as
//! signed integers terminated by 0, statistics in `c` comment lines, and
//! process exit codes 10 (SAT), 20 (UNSAT), 0 (unknown/timeout), 1 (errors).

use clap::{Args, Parser, Subcommand, ValueEnum};
use coldsat::harness::{self, report, RunStatus, VariationMode};
use coldsat::{
    parse_dimacs, ColdPolicies, Formula, PortfolioConfig, SharePolicy, SolveStats, SolverConfig,
    Status, WarmPolicy,
};
use std::fs::File;
use std::io::{BufReader, BufWriter};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::Arc;
use std::time::Duration;

const EXIT_SAT: u8 = 10;
const EXIT_UNSAT: u8 = 20;
const EXIT_UNKNOWN: u8 = 0;
const EXIT_ERROR: u8 = 1;

#[derive(Parser)]
#[command(
    name = "coldsat",
    version,
    about = "CDCL SAT solver with cold-restart policies (forget order / phases / clauses)"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve a DIMACS CNF file with a single engine.
    Solve(SolveArgs),
    /// Solve with a seed-diversified parallel portfolio.
    Portfolio(PortfolioArgs),
    /// Run a manifest of instances and report #SAT/#UNS/PAR2.
    Suite(SuiteArgs),
    /// Run a run-time-variation study on one instance.
    Variation(VariationArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum WarmFlag {
    Luby,
    Ema,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ColdFlag {
    None,
    Fo,
    Fp,
    Fc,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ShareFlag {
    Off,
    #[value(name = "2")]
    Lbd2,
    #[value(name = "3")]
    Lbd3,
}

#[derive(Args, Clone)]
struct SolverFlags {
    /// Master seed for all randomized behaviour.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Cold-restart policies, e.g. "fo", "fo,fc", or "none".
    #[arg(long, value_delimiter = ',', default_value = "fo")]
    cold: Vec<ColdFlag>,
    /// Cold-restart interval parameter p, in conflicts.
    #[arg(long, default_value_t = 400_000)]
    cold_interval: u64,
    /// FC keeps learnt clauses with LBD at most this threshold (0 = delete all).
    #[arg(long, default_value_t = 0)]
    fc_lbd: u32,
    /// Warm-restart policy.
    #[arg(long, value_enum, default_value_t = WarmFlag::Ema)]
    warm: WarmFlag,
    /// Luby base interval in conflicts (only with --warm luby).
    #[arg(long)]
    luby_unit: Option<u64>,
    /// Draw initial branching scores uniformly from [0, 1).
    #[arg(long)]
    random_init_order: bool,
    /// Draw initial phases as fair coins.
    #[arg(long)]
    random_init_phase: bool,
    /// Stop with UNKNOWN after this many conflicts.
    #[arg(long)]
    conflict_budget: Option<u64>,
    /// Stop with UNKNOWN after this many seconds.
    #[arg(long)]
    time_limit: Option<f64>,
}

impl SolverFlags {
    fn to_config(&self) -> Result<SolverConfig, String> {
        let warm = match self.warm {
            WarmFlag::Luby => WarmPolicy::Luby {
                unit: self.luby_unit.unwrap_or(coldsat::restart::DEFAULT_LUBY_UNIT),
            },
            WarmFlag::Ema => {
                if self.luby_unit.is_some() {
                    return Err("--luby-unit conflicts with --warm ema".into());
                }
                WarmPolicy::ema_default()
            }
        };
        let mut cold = ColdPolicies::NONE;
        for flag in &self.cold {
            match flag {
                ColdFlag::None => {
                    if self.cold.len() > 1 {
                        return Err("--cold none cannot be combined with fo/fp/fc".into());
                    }
                }
                ColdFlag::Fo => cold.forget_order = true,
                ColdFlag::Fp => cold.forget_phases = true,
                ColdFlag::Fc => cold.forget_clauses = true,
            }
        }
        if !cold.is_empty() && self.cold_interval == 0 {
            return Err("--cold-interval must be at least 1".into());
        }
        Ok(SolverConfig {
            warm,
            cold,
            cold_interval: self.cold_interval.max(1),
            fc_lbd_threshold: self.fc_lbd,
            seed: self.seed,
            conflict_budget: self.conflict_budget,
            time_budget: self.time_limit.map(Duration::from_secs_f64),
            random_initial_order: self.random_init_order,
            random_initial_phase: self.random_init_phase,
            check_invariants: false,
        })
    }
}

#[derive(Args)]
struct SolveArgs {
    /// DIMACS CNF file.
    path: PathBuf,
    #[command(flatten)]
    solver: SolverFlags,
    /// Write the learnt-clause usage table as CSV.
    #[arg(long)]
    usage_csv: Option<PathBuf>,
    /// Write the learnt-clause usage table as JSON.
    #[arg(long)]
    usage_json: Option<PathBuf>,
}

#[derive(Args)]
struct PortfolioArgs {
    /// DIMACS CNF file.
    path: PathBuf,
    #[command(flatten)]
    solver: SolverFlags,
    /// Number of workers (1..=64).
    #[arg(long, default_value_t = 1)]
    workers: usize,
    /// Clause sharing: off, or an LBD bound of 2 or 3.
    #[arg(long, value_enum, default_value_t = ShareFlag::Off)]
    share: ShareFlag,
    /// Literal budget per worker per sharing window.
    #[arg(long, default_value_t = coldsat::parallel::DEFAULT_BUDGET_LITERALS)]
    budget_literals: usize,
    /// Sharing window length in milliseconds.
    #[arg(long, default_value_t = 750)]
    budget_window_ms: u64,
    /// Write per-worker statistics as JSON.
    #[arg(long)]
    json: Option<PathBuf>,
}

#[derive(Args)]
struct SuiteArgs {
    /// Manifest file: one instance path per line, optional sat/unsat annotation.
    manifest: PathBuf,
    #[command(flatten)]
    solver: SolverFlags,
    /// Per-instance cutoff in seconds.
    #[arg(long, default_value_t = 60.0)]
    cutoff: f64,
    /// Instances to run concurrently.
    #[arg(long, default_value_t = 1)]
    jobs: usize,
    /// Write per-run records as CSV.
    #[arg(long)]
    csv: Option<PathBuf>,
    /// Write the full report as JSON.
    #[arg(long)]
    json: Option<PathBuf>,
}

#[derive(Args)]
struct VariationArgs {
    /// DIMACS CNF file.
    path: PathBuf,
    #[command(flatten)]
    solver: SolverFlags,
    /// Number of randomized sample runs.
    #[arg(long, default_value_t = 20)]
    seeds: usize,
    /// What the samples randomize: the initial order or the initial phases.
    #[arg(long, value_enum, default_value_t = ModeFlag::Order)]
    mode: ModeFlag,
    /// Per-run cutoff in seconds.
    #[arg(long, default_value_t = 60.0)]
    cutoff: f64,
    /// Write per-run records as CSV.
    #[arg(long)]
    csv: Option<PathBuf>,
    /// Write the full report as JSON.
    #[arg(long)]
    json: Option<PathBuf>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ModeFlag {
    Order,
    Phase,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let cancel = Arc::new(AtomicBool::new(false));
    {
        let cancel = Arc::clone(&cancel);
        // A second interrupt kills the process the hard way.
        let _ = ctrlc::set_handler(move || {
            if cancel.swap(true, Ordering::SeqCst) {
                std::process::exit(130);
            }
        });
    }
    let code = match cli.command {
        Command::Solve(args) => cmd_solve(args, &cancel),
        Command::Portfolio(args) => cmd_portfolio(args, &cancel),
        Command::Suite(args) => cmd_suite(args, &cancel),
        Command::Variation(args) => cmd_variation(args, &cancel),
    };
    match code {
        Ok(code) => ExitCode::from(code),
        Err(message) => {
            eprintln!("error: {message}");
            ExitCode::from(EXIT_ERROR)
        }
    }
}

fn load_formula(path: &Path) -> Result<Formula, String> {
    let file = File::open(path).map_err(|e| format!("{}: {e}", path.display()))?;
    let parsed =
        parse_dimacs(BufReader::new(file)).map_err(|e| format!("{}: {e}", path.display()))?;
    for warning in &parsed.warnings {
        println!("c warning: {warning}");
    }
    Ok(parsed.formula)
}

fn print_stats(stats: &SolveStats) {
    println!(
        "c stats conflicts={} decisions={} propagations={} warm_restarts={} \
         cold_restarts={} learnt={} deleted={} imported={}",
        stats.conflicts,
        stats.decisions,
        stats.propagations,
        stats.warm_restarts,
        stats.cold_restarts,
        stats.learnt_clauses,
        stats.deleted_clauses,
        stats.imported_clauses
    );
}

fn print_answer(status: Status, model: Option<&coldsat::Model>) -> u8 {
    println!("s {status}");
    match status {
        Status::Sat => {
            let model = model.expect("SAT answers carry a model");
            let ints = model.to_dimacs();
            for chunk in ints.chunks(16) {
                let line: Vec<String> = chunk.iter().map(|i| i.to_string()).collect();
                println!("v {}", line.join(" "));
            }
            println!("v 0");
            EXIT_SAT
        }
        Status::Unsat => EXIT_UNSAT,
        Status::Unknown => EXIT_UNKNOWN,
    }
}

struct CancelHooks {
    cancel: Arc<AtomicBool>,
}

impl coldsat::engine::SolverHooks for CancelHooks {
    fn should_stop(&self) -> bool {
        self.cancel.load(Ordering::Relaxed)
    }
}

fn cmd_solve(args: SolveArgs, cancel: &Arc<AtomicBool>) -> Result<u8, String> {
    let cfg = args.solver.to_config()?;
    let formula = load_formula(&args.path)?;
    let mut solver = coldsat::Solver::new(&formula, cfg);
    solver.set_hooks(Box::new(CancelHooks { cancel: Arc::clone(cancel) }));
    let result = solver.solve();
    if result.status == Status::Sat {
        let model = result.model.as_ref().expect("SAT carries a model");
        if !coldsat::check_model(&formula, model).expect("model is total") {
            return Err("internal error: model verification failed".into());
        }
    }
    print_stats(&result.stats);
    if let Some(path) = &args.usage_csv {
        let mut out = file_writer(path)?;
        report::write_usage_csv(&mut out, &solver.usage_report()).map_err(|e| e.to_string())?;
    }
    if let Some(path) = &args.usage_json {
        let mut out = file_writer(path)?;
        report::write_json(&mut out, &solver.usage_report()).map_err(|e| e.to_string())?;
    }
    Ok(print_answer(result.status, result.model.as_ref()))
}

fn cmd_portfolio(args: PortfolioArgs, cancel: &Arc<AtomicBool>) -> Result<u8, String> {
    if args.workers == 0 {
        return Err("--workers must be at least 1".into());
    }
    let base = args.solver.to_config()?;
    let formula = load_formula(&args.path)?;
    let cfg = PortfolioConfig {
        workers: args.workers,
        base,
        sharing: match args.share {
            ShareFlag::Off => SharePolicy::Off,
            ShareFlag::Lbd2 => SharePolicy::LbdAtMost(2),
            ShareFlag::Lbd3 => SharePolicy::LbdAtMost(3),
        },
        budget_literals: args.budget_literals,
        budget_window: Duration::from_millis(args.budget_window_ms),
        base_seed: args.solver.seed,
        stop_flag: Some(Arc::clone(cancel)),
    };
    let result = coldsat::run_portfolio(&formula, &cfg).map_err(|e| e.to_string())?;
    match result.winner {
        Some(winner) => println!("c winner {winner}"),
        None => println!("c winner none"),
    }
    for (i, stats) in result.worker_stats.iter().enumerate() {
        let share = &result.share_stats[i];
        println!(
            "c worker {i} conflicts={} decisions={} warm_restarts={} cold_restarts={} \
             imported={} exported_clauses={} exported_literals={}",
            stats.conflicts,
            stats.decisions,
            stats.warm_restarts,
            stats.cold_restarts,
            stats.imported_clauses,
            share.exported_clauses,
            share.exported_literals
        );
    }
    println!("c wall_time_ms {}", result.wall_time.as_millis());
    if let Some(path) = &args.json {
        let value = serde_json::json!({
            "status": result.status.to_string(),
            "winner": result.winner,
            "wall_time_ms": result.wall_time.as_millis() as u64,
            "worker_stats": result.worker_stats,
            "share_stats": result.share_stats,
        });
        let mut out = file_writer(path)?;
        report::write_json(&mut out, &value).map_err(|e| e.to_string())?;
    }
    Ok(print_answer(result.status, result.model.as_ref()))
}

fn file_writer(path: &Path) -> Result<BufWriter<File>, String> {
    File::create(path).map(BufWriter::new).map_err(|e| format!("{}: {e}", path.display()))
}

fn cmd_suite(args: SuiteArgs, cancel: &Arc<AtomicBool>) -> Result<u8, String> {
    let cfg = args.solver.to_config()?;
    let instances = harness::parse_manifest(&args.manifest)
        .map_err(|e| format!("{}: {e}", args.manifest.display()))?;
    if instances.is_empty() {
        return Err("manifest lists no instances".into());
    }
    let report = harness::run_suite_with_stop(
        &instances,
        &cfg,
        Duration::from_secs_f64(args.cutoff),
        args.jobs.max(1),
        Some(cancel),
    );
    for warning in &report.warnings {
        println!("c warning: {warning}");
    }
    for record in &report.records {
        println!(
            "c run {} status={} time={:.3} conflicts={}",
            record.instance, record.status, record.wall_time_s, record.conflicts
        );
    }
    let s = &report.summary;
    println!(
        "c summary sat={} unsat={} solved={} timeout={} unknown={} error={} par2={}",
        s.num_sat,
        s.num_unsat,
        s.num_solved,
        s.num_timeout,
        s.num_unknown,
        s.num_error,
        s.par2.map_or("undefined".into(), |p| format!("{p:.3}"))
    );
    if let Some(path) = &args.csv {
        let mut out = file_writer(path)?;
        report::write_suite_csv(&mut out, &report).map_err(|e| e.to_string())?;
    }
    if let Some(path) = &args.json {
        let mut out = file_writer(path)?;
        report::write_json(&mut out, &report).map_err(|e| e.to_string())?;
    }
    if !report.violations.is_empty() {
        for v in &report.violations {
            eprintln!("violation: {v}");
        }
        return Err(format!("{} expected-status annotation(s) violated", report.violations.len()));
    }
    Ok(EXIT_UNKNOWN)
}

fn cmd_variation(args: VariationArgs, cancel: &Arc<AtomicBool>) -> Result<u8, String> {
    if args.seeds < 2 {
        return Err("--seeds must be at least 2".into());
    }
    let cfg = args.solver.to_config()?;
    let formula = load_formula(&args.path)?;
    let mode = match args.mode {
        ModeFlag::Order => VariationMode::Order,
        ModeFlag::Phase => VariationMode::Phase,
    };
    let report = harness::run_variation_study_with_stop(
        &formula,
        &cfg,
        args.seeds,
        mode,
        Duration::from_secs_f64(args.cutoff),
        &args.path.display().to_string(),
        Some(cancel),
    );
    println!(
        "c baseline status={} time={:.3}",
        report.baseline.status, report.baseline.wall_time_s
    );
    let f = &report.fractions;
    println!(
        "c variation mode={} failed={:.4} cv={} ge2x={:.4} ge4x={:.4} ge10x={:.4} \
         ge32x={:.4} le0.5x={:.4} le0.25x={:.4}",
        report.mode,
        report.failed_fraction,
        report.cv.map_or("undefined".into(), |c| format!("{c:.4}")),
        f.ge_2x,
        f.ge_4x,
        f.ge_10x,
        f.ge_32x,
        f.le_half,
        f.le_quarter
    );
    if let Some(path) = &args.csv {
        let mut out = file_writer(path)?;
        report::write_variation_csv(&mut out, &report).map_err(|e| e.to_string())?;
    }
    if let Some(path) = &args.json {
        let mut out = file_writer(path)?;
        report::write_json(&mut out, &report).map_err(|e| e.to_string())?;
    }
    let baseline_failed = !matches!(report.baseline.status, RunStatus::Sat | RunStatus::Unsat);
    if baseline_failed {
        println!("c note: baseline unsolved; speedup ratios are undefined");
    }
    Ok(EXIT_UNKNOWN)
}
