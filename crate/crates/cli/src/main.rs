use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use pats_core::asp::{solve_incremental, AspError, AspLimits, SolverJob, SOLVER_ENV};
use pats_core::atam::{verify_solution, TileSystem};
use pats_core::ktam::{reliability, PhysicalParams};
use pats_core::pattern::{binary_counter, sierpinski, Pattern};
use pats_core::search::{
    psbb_solve, psh_parallel, HeuristicConfig, SearchConfig, SearchTrace, Traversal,
};

mod bench;
mod manifest;

use manifest::{digest, Manifest};

/// Exit codes.
pub mod exit {
    pub const OK: u8 = 0;
    pub const FAILURE: u8 = 1;
    pub const VERIFY_FAILED: u8 = 2;
    pub const BUDGET_EXHAUSTED: u8 = 3;
    pub const SOLVER_UNAVAILABLE: u8 = 4;
    pub const BAD_INPUT: u8 = 5;
}

#[derive(Parser, Debug)]
#[command(name = "pats", version, about = "Tile-set synthesis for coloured patterns")]
struct Cli {
    /// Directory for solutions, traces, reports and run manifests.
    #[arg(long, global = true, default_value = "pats-out")]
    out_dir: PathBuf,
    /// Write 0 in every elapsed-time column so reruns are byte-identical.
    #[arg(long, global = true)]
    no_timing: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Write a generated pattern file.
    Gen(GenArgs),
    /// Search for a small tile system.
    Solve(SolveArgs),
    /// Check a tile system against a pattern.
    Verify(VerifyArgs),
    /// Kinetic reliability report of a tile system.
    Reliability(ReliabilityArgs),
    /// Run an experiment grid described by a TOML file.
    Bench(BenchArgs),
}

#[derive(Clone, Copy, Debug, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum PatternKind {
    Sierpinski,
    Counter,
}

#[derive(Args, Debug, Serialize)]
struct GenArgs {
    kind: PatternKind,
    width: usize,
    height: usize,
    out: PathBuf,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Algorithm {
    /// Exact branch-and-bound.
    Bb,
    /// Heuristic search, one seeded run per worker.
    H,
    /// Answer-set programming with an external solver.
    Asp,
}

#[derive(Clone, Copy, Debug, Default, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
enum TraversalArg {
    #[default]
    Dfs,
    BestFirst,
}

#[derive(Args, Debug, Serialize)]
struct SolveArgs {
    algorithm: Algorithm,
    pattern: PathBuf,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Heuristic workers.
    #[arg(long, default_value_t = 1)]
    workers: usize,
    /// Merge steps; per worker for the heuristic. Unlimited for bb, 100000
    /// for h when omitted.
    #[arg(long)]
    step_budget: Option<u64>,
    /// Seconds.
    #[arg(long)]
    time_budget: Option<f64>,
    /// Steps between periodic trace records; 0 records improvements only.
    #[arg(long, default_value_t = 1000)]
    report_every: u64,
    #[arg(long, value_enum, default_value_t)]
    traversal: TraversalArg,
    /// Solver command line, e.g. `clingo` or `python3 -m clingo`.
    #[arg(long, env = SOLVER_ENV)]
    solver_cmd: Option<String>,
    /// Seconds per solver call.
    #[arg(long, default_value_t = 600.0)]
    timeout: f64,
    #[arg(long)]
    max_tiles: Option<usize>,
    #[arg(long)]
    glue_cap: Option<usize>,
    #[arg(long)]
    no_symmetry_breaking: bool,
}

#[derive(Args, Debug, Serialize)]
struct VerifyArgs {
    system: PathBuf,
    pattern: PathBuf,
}

#[derive(Args, Debug, Serialize)]
struct ReliabilityArgs {
    system: PathBuf,
    pattern: PathBuf,
    /// Assembly time in seconds.
    #[arg(long, default_value_t = 3600.0)]
    time: f64,
    /// Kelvin.
    #[arg(long, default_value_t = 298.0)]
    temperature: f64,
}

#[derive(Args, Debug, Serialize)]
struct BenchArgs {
    config: PathBuf,
    #[arg(long, env = SOLVER_ENV)]
    solver_cmd: Option<String>,
}

/// Input the user must fix; exits with [`exit::BAD_INPUT`].
#[derive(Debug)]
struct BadInput(anyhow::Error);

impl std::fmt::Display for BadInput {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{:#}", self.0)
    }
}

impl std::error::Error for BadInput {}

fn bad_input(e: impl Into<anyhow::Error>) -> anyhow::Error {
    BadInput(e.into()).into()
}

pub(crate) fn load_pattern(path: &Path) -> Result<(Pattern, String)> {
    let text = fs::read_to_string(path)
        .with_context(|| format!("reading {}", path.display()))
        .map_err(bad_input)?;
    let pattern = Pattern::parse(&text)
        .with_context(|| format!("parsing pattern {}", path.display()))
        .map_err(bad_input)?;
    Ok((pattern, text))
}

fn load_system(path: &Path) -> Result<TileSystem> {
    let text = fs::read_to_string(path)
        .with_context(|| format!("reading {}", path.display()))
        .map_err(bad_input)?;
    TileSystem::parse(&text)
        .with_context(|| format!("parsing tile system {}", path.display()))
        .map_err(bad_input)
}

pub(crate) fn write(path: &Path, contents: &str) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    }
    fs::write(path, contents).with_context(|| format!("writing {}", path.display()))
}

pub(crate) fn solver_job(cmd: Option<&str>, timeout: Duration) -> Option<SolverJob> {
    match cmd {
        Some(cmd) => {
            let command: Vec<String> = cmd.split_whitespace().map(String::from).collect();
            (!command.is_empty()).then(|| SolverJob::new(command, timeout))
        }
        None => SolverJob::discover(timeout),
    }
}

struct Run<'a> {
    out_dir: &'a Path,
    timing: bool,
    manifest: Manifest,
}

impl Run<'_> {
    fn output(&mut self, name: &str, contents: &str) -> Result<PathBuf> {
        let path = self.out_dir.join(name);
        write(&path, contents)?;
        self.manifest.outputs.push(name.to_string());
        Ok(path)
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let (name, flags) = match &cli.command {
        Command::Gen(a) => ("gen", serde_json::to_value(a)),
        Command::Solve(a) => ("solve", serde_json::to_value(a)),
        Command::Verify(a) => ("verify", serde_json::to_value(a)),
        Command::Reliability(a) => ("reliability", serde_json::to_value(a)),
        Command::Bench(a) => ("bench", serde_json::to_value(a)),
    };
    let mut flags = flags.expect("arguments serialize");
    flags["out_dir"] = serde_json::json!(cli.out_dir);
    flags["no_timing"] = serde_json::json!(cli.no_timing);
    let mut run = Run {
        out_dir: &cli.out_dir,
        timing: !cli.no_timing,
        manifest: Manifest::start(name, flags),
    };
    let result = match &cli.command {
        Command::Gen(a) => cmd_gen(&mut run, a),
        Command::Solve(a) => cmd_solve(&mut run, a),
        Command::Verify(a) => cmd_verify(&mut run, a),
        Command::Reliability(a) => cmd_reliability(&mut run, a),
        Command::Bench(a) => bench::cmd_bench(&mut run, a),
    };
    let code = match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            if e.downcast_ref::<BadInput>().is_some() {
                exit::BAD_INPUT
            } else {
                exit::FAILURE
            }
        }
    };
    run.manifest.exit_code = code;
    let path = cli.out_dir.join(format!("{name}.manifest.json"));
    if let Err(e) = write(&path, &run.manifest.finish(run.timing)) {
        eprintln!("error: {e:#}");
        return ExitCode::from(exit::FAILURE);
    }
    ExitCode::from(code)
}

fn cmd_gen(run: &mut Run, args: &GenArgs) -> Result<u8> {
    if args.width == 0 || args.height == 0 {
        return Err(bad_input(anyhow::anyhow!("dimensions must be positive")));
    }
    let pattern = match args.kind {
        PatternKind::Sierpinski => sierpinski(args.width, args.height),
        PatternKind::Counter => binary_counter(args.width, args.height),
    };
    let text = pattern.to_text();
    write(&args.out, &text)?;
    let d = digest(&text);
    println!("{d}  {}", args.out.display());
    run.manifest.pattern_digest = Some(d);
    run.manifest.outputs.push(args.out.display().to_string());
    Ok(exit::OK)
}

fn write_solution(run: &mut Run, prefix: &str, trace: &SearchTrace) -> Result<()> {
    run.output(&format!("{prefix}.tiles"), &trace.best.to_text())?;
    run.output(&format!("{prefix}.csv"), &trace.to_csv(run.timing))?;
    Ok(())
}

fn cmd_solve(run: &mut Run, args: &SolveArgs) -> Result<u8> {
    let (pattern, text) = load_pattern(&args.pattern)?;
    run.manifest.pattern_digest = Some(digest(&text));
    run.manifest.rng_seeds = vec![args.seed];
    let time_budget = args.time_budget.map(Duration::from_secs_f64);
    let trace = match args.algorithm {
        Algorithm::Bb => {
            let config = SearchConfig {
                step_budget: args.step_budget.unwrap_or(u64::MAX),
                rng_seed: args.seed,
                traversal: match args.traversal {
                    TraversalArg::Dfs => Traversal::DepthFirst,
                    TraversalArg::BestFirst => Traversal::BestFirst,
                },
                report_every: args.report_every,
                time_budget,
            };
            let trace = psbb_solve(&pattern, &config);
            write_solution(run, "solution", &trace)?;
            trace
        }
        Algorithm::H => {
            if args.workers == 0 {
                return Err(bad_input(anyhow::anyhow!("--workers must be at least 1")));
            }
            let config = HeuristicConfig {
                workers: args.workers,
                seed: args.seed,
                step_budget: args.step_budget.unwrap_or(HeuristicConfig::default().step_budget),
                time_budget,
                report_every: args.report_every,
            };
            let out = psh_parallel(&pattern, &config);
            for (i, w) in out.workers.iter().enumerate() {
                write_solution(run, &format!("worker-{i}"), w)?;
                let hit = w
                    .records
                    .iter()
                    .find(|r| r.best_size == w.best_size)
                    .map_or(0, |r| r.steps);
                println!("worker {i}: best_size={} first_reached_at={hit} steps={}", w.best_size, w.steps);
            }
            write_solution(run, "solution", &out.merged)?;
            out.merged
        }
        Algorithm::Asp => return solve_asp(run, args, &pattern),
    };
    let verdict = verify_solution(&trace.best, &pattern);
    println!("best_size={}", trace.best_size);
    println!("optimal={}", trace.optimal);
    println!("steps={}", trace.steps);
    if !verdict.is_ok() {
        eprintln!("solution failed verification: {verdict}");
        return Ok(exit::VERIFY_FAILED);
    }
    if !trace.optimal && trace.best_size == pattern.len() {
        eprintln!("budget exhausted without improving on {} tiles", pattern.len());
        return Ok(exit::BUDGET_EXHAUSTED);
    }
    Ok(exit::OK)
}

fn solve_asp(run: &mut Run, args: &SolveArgs, pattern: &Pattern) -> Result<u8> {
    if !args.timeout.is_finite() || args.timeout <= 0.0 {
        return Err(bad_input(anyhow::anyhow!("--timeout must be positive")));
    }
    let Some(job) = solver_job(args.solver_cmd.as_deref(), Duration::from_secs_f64(args.timeout))
    else {
        eprintln!("skipped: no answer-set solver found (set {SOLVER_ENV} or --solver-cmd)");
        return Ok(exit::SOLVER_UNAVAILABLE);
    };
    run.manifest.solver = Some(job.command.join(" "));
    let limits = AspLimits {
        max_tiles: args.max_tiles,
        glue_cap: args.glue_cap,
        symmetry_breaking: !args.no_symmetry_breaking,
    };
    let start = Instant::now();
    let solution = match solve_incremental(pattern, &limits, &job) {
        Ok(s) => s,
        Err(e @ (AspError::Timeout { .. } | AspError::TileLimit(_))) => {
            eprintln!("{e}");
            return Ok(exit::BUDGET_EXHAUSTED);
        }
        Err(e @ AspError::BudgetBelowColours { .. }) => return Err(bad_input(e)),
        Err(AspError::Io(e)) if e.kind() == std::io::ErrorKind::NotFound => {
            eprintln!("skipped: solver command `{}` not found", job.command[0]);
            return Ok(exit::SOLVER_UNAVAILABLE);
        }
        Err(e) => return Err(e.into()),
    };
    let mut csv = String::from("tiles,glues,satisfiable,elapsed_ms\n");
    for s in &solution.steps {
        let ms = if run.timing { s.elapsed.as_millis() } else { 0 };
        csv.push_str(&format!("{},{},{},{ms}\n", s.tiles, s.glues, s.satisfiable));
    }
    run.output("solution.tiles", &solution.system.to_text())?;
    run.output("asp_steps.csv", &csv)?;
    log::info!("asp finished in {:?}", start.elapsed());
    println!("best_size={}", solution.system.tiles.len());
    println!("optimal=true");
    println!("tile_budget={} glue_budget={}", solution.tiles, solution.glues);
    let verdict = verify_solution(&solution.system, pattern);
    if !verdict.is_ok() {
        eprintln!("solution failed verification: {verdict}");
        return Ok(exit::VERIFY_FAILED);
    }
    Ok(exit::OK)
}

fn cmd_verify(run: &mut Run, args: &VerifyArgs) -> Result<u8> {
    let system = load_system(&args.system)?;
    let (pattern, text) = load_pattern(&args.pattern)?;
    run.manifest.pattern_digest = Some(digest(&text));
    let verdict = verify_solution(&system, &pattern);
    println!("{verdict}");
    Ok(if verdict.is_ok() {
        exit::OK
    } else {
        exit::VERIFY_FAILED
    })
}

fn cmd_reliability(run: &mut Run, args: &ReliabilityArgs) -> Result<u8> {
    let system = load_system(&args.system)?;
    let (pattern, text) = load_pattern(&args.pattern)?;
    run.manifest.pattern_digest = Some(digest(&text));
    let verdict = verify_solution(&system, &pattern);
    if !verdict.is_ok() {
        eprintln!("{verdict}");
        return Ok(exit::VERIFY_FAILED);
    }
    let params = PhysicalParams::default()
        .with_time(args.time)
        .with_temperature(args.temperature);
    let r = reliability(&system, &pattern, &params).map_err(bad_input)?;
    let mut report = String::from("i,j,M1,M2,p_site\n");
    for (((x, y), m1, m2), p) in r.profile.iter().zip(&r.site_probs) {
        report.push_str(&format!("{x},{y},{m1},{m2},{p:e}\n"));
    }
    report.push_str(&format!("G_mc={}\n", r.model.g_mc));
    report.push_str(&format!("G_se={}\n", r.model.g_se));
    report.push_str(&format!("r_star={:e}\n", r.model.r_star));
    report.push_str(&format!("log_reliability={}\n", r.log_reliability));
    match r.reliability {
        Some(v) => report.push_str(&format!("reliability={v}\n")),
        None => report.push_str("reliability=underflow\n"),
    }
    run.output("reliability.csv", &report)?;
    print!("{report}");
    Ok(exit::OK)
}
