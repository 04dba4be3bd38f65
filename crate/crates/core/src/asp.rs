//! Answer-set encoding of the synthesis problem and a driver for an external
//! grounder/solver such as clingo.
//!
//! The solver runs as a subprocess, one per `(tiles, glues)` budget, reading
//! the program from standard input.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::io::{Read, Write};
use std::process::{Command, ExitStatus, Stdio};
use std::thread;
use std::time::{Duration, Instant};

use thiserror::Error;
use wait_timeout::ChildExt;

use crate::atam::{Glue, TileSystem, TileType};
use crate::error::AssemblyError;
use crate::pattern::{Colour, Pattern};

/// Environment variable holding the default solver command line.
pub const SOLVER_ENV: &str = "PATS_SOLVER_CMD";

#[derive(Debug, Error)]
pub enum AspError {
    #[error("tile budget {tiles} is below the colour count {colours}")]
    BudgetBelowColours { tiles: usize, colours: usize },
    #[error("glue budget must be at least 1")]
    NoGlues,
    #[error("no answer-set solver found (set {SOLVER_ENV} or install clingo)")]
    SolverUnavailable,
    #[error("solver timed out after {timeout:?} at {tiles} tiles, {glues} glues")]
    Timeout {
        tiles: usize,
        glues: usize,
        timeout: Duration,
    },
    #[error("solver exited with {status}: {stderr}")]
    Crash { status: String, stderr: String },
    #[error("malformed solver output: {0}")]
    Malformed(String),
    #[error("unknown atom in answer: {0}")]
    UnknownAtom(String),
    #[error("answer does not form a tile system: {0}")]
    Inconsistent(#[from] AssemblyError),
    #[error("no solution with at most {0} tiles")]
    TileLimit(usize),
    #[error("solver I/O: {0}")]
    Io(#[from] std::io::Error),
}

/// A self-contained program for fixed tile and glue budgets.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AspEncoding {
    pub program: String,
    pub tiles: usize,
    pub glues: usize,
}

/// Predicates used by the encoding: `assign(X,Y,T)` places tile `T` at cell
/// `(X,Y)`, `north/east/south/west(T,G)` give tile sides, `tcol(T,C)` tile
/// colours, and `col(X,Y,C)` the pattern.
pub const SHOWN_PREDICATES: [&str; 6] = ["assign", "north", "east", "south", "west", "tcol"];

const RULES: &str = "\
cell(X,Y) :- col(X,Y,_).
1 { assign(X,Y,T) : tile(T) } 1 :- cell(X,Y).
1 { north(T,G) : glue(G) } 1 :- tile(T).
1 { east(T,G) : glue(G) } 1 :- tile(T).
1 { south(T,G) : glue(G) } 1 :- tile(T).
1 { west(T,G) : glue(G) } 1 :- tile(T).
1 { tcol(T,C) : colour(C) } 1 :- tile(T).
:- assign(X,Y,T), col(X,Y,C), not tcol(T,C).
:- assign(X,Y,T), assign(X+1,Y,U), east(T,G), not west(U,G).
:- assign(X,Y,T), assign(X,Y+1,U), north(T,G), not south(U,G).
used(T) :- assign(_,_,T).
:- used(T1), used(T2), T1 < T2, south(T1,S), south(T2,S), west(T1,W), west(T2,W).
";

const SYMMETRY_BREAKING: &str = "\
:- tile(T1), tile(T2), T1 < T2, used(T2), not used(T1).
:- used(T1), used(T2), T1 < T2, south(T1,S1), west(T1,W1), south(T2,S2), west(T2,W2), (S1,W1) > (S2,W2).
:- tile(T), not used(T), north(T,G), G != 0.
:- tile(T), not used(T), east(T,G), G != 0.
:- tile(T), not used(T), south(T,G), G != 0.
:- tile(T), not used(T), west(T,G), G != 0.
";

/// Emits the program. With `symmetry_breaking`, used tiles come first and
/// are ordered by their `(south, west)` glues.
pub fn emit_program(
    pattern: &Pattern,
    tiles: usize,
    glues: usize,
    symmetry_breaking: bool,
) -> Result<AspEncoding, AspError> {
    if tiles < pattern.colour_count() {
        return Err(AspError::BudgetBelowColours {
            tiles,
            colours: pattern.colour_count(),
        });
    }
    if glues == 0 {
        return Err(AspError::NoGlues);
    }
    let mut p = String::with_capacity(16 * pattern.len() + 1024);
    for y in 1..=pattern.height() {
        for x in 1..=pattern.width() {
            write!(p, "col({x},{y},{}). ", pattern.colour(x, y)).unwrap();
        }
        p.push('\n');
    }
    writeln!(
        p,
        "tile(1..{tiles}). glue(0..{}). colour(0..{}).",
        glues - 1,
        pattern.colour_count() - 1
    )
    .unwrap();
    p.push_str(RULES);
    if symmetry_breaking {
        p.push_str(SYMMETRY_BREAKING);
    }
    p.push_str("#show assign/3.\n#show north/2.\n#show east/2.\n#show south/2.\n#show west/2.\n#show tcol/2.\n");
    Ok(AspEncoding {
        program: p,
        tiles,
        glues,
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum AspAnswer {
    Sat(TileSystem),
    Unsat,
}

fn parse_atom(atom: &str) -> Result<(&str, Vec<u64>), AspError> {
    let bad = || AspError::Malformed(format!("atom `{atom}`"));
    let (name, rest) = atom.split_once('(').ok_or_else(bad)?;
    let args = rest.strip_suffix(')').ok_or_else(bad)?;
    let args = args
        .split(',')
        .map(|a| a.trim().parse::<u64>().map_err(|_| bad()))
        .collect::<Result<Vec<_>, _>>()?;
    Ok((name, args))
}

/// Reads the last answer set from solver output in the default witness
/// format (`Answer: n` followed by atoms, then `SATISFIABLE`).
pub fn parse_answer(output: &str, pattern: &Pattern) -> Result<AspAnswer, AspError> {
    let mut atoms: Option<Vec<&str>> = None;
    let mut in_answer = false;
    let mut verdict = None;
    for line in output.lines().map(str::trim) {
        if line.starts_with("Answer:") {
            atoms = Some(Vec::new());
            in_answer = true;
        } else if matches!(line, "SATISFIABLE" | "UNSATISFIABLE" | "UNKNOWN" | "OPTIMUM FOUND") {
            verdict = Some(line);
            in_answer = false;
        } else if in_answer {
            atoms.as_mut().unwrap().extend(line.split_whitespace());
        }
    }
    match verdict {
        Some("UNSATISFIABLE") => return Ok(AspAnswer::Unsat),
        Some("SATISFIABLE" | "OPTIMUM FOUND") => {}
        Some(_) => return Err(AspError::Malformed("solver reported UNKNOWN".into())),
        None => return Err(AspError::Malformed("no result line".into())),
    }
    let atoms = atoms.ok_or_else(|| AspError::Malformed("satisfiable without an answer".into()))?;

    let (w, h) = (pattern.width(), pattern.height());
    let mut cells: Vec<Option<u64>> = vec![None; w * h];
    let mut sides: BTreeMap<u64, [Option<Glue>; 4]> = BTreeMap::new();
    let mut colours: BTreeMap<u64, Colour> = BTreeMap::new();
    for atom in atoms {
        let (name, args) = parse_atom(atom)?;
        match (name, args.as_slice()) {
            ("assign", &[x, y, t]) => {
                let (x, y) = (x as usize, y as usize);
                if !(1..=w).contains(&x) || !(1..=h).contains(&y) {
                    return Err(AspError::Malformed(format!("cell outside the grid: {atom}")));
                }
                cells[pattern.index(x, y)] = Some(t);
            }
            ("north", &[t, g]) => sides.entry(t).or_default()[0] = Some(g as Glue),
            ("east", &[t, g]) => sides.entry(t).or_default()[1] = Some(g as Glue),
            ("south", &[t, g]) => sides.entry(t).or_default()[2] = Some(g as Glue),
            ("west", &[t, g]) => sides.entry(t).or_default()[3] = Some(g as Glue),
            ("tcol", &[t, c]) => {
                colours.insert(t, c as Colour);
            }
            _ => return Err(AspError::UnknownAtom(atom.to_string())),
        }
    }
    let tiles = cells
        .iter()
        .enumerate()
        .map(|(cell, t)| {
            let t = t.ok_or_else(|| {
                let (x, y) = pattern.coords(cell);
                AspError::Malformed(format!("no tile at ({x}, {y})"))
            })?;
            let glues = sides
                .get(&t)
                .and_then(|s| Some([s[0]?, s[1]?, s[2]?, s[3]?]))
                .ok_or_else(|| AspError::Malformed(format!("tile {t} lacks a glue")))?;
            let colour = *colours
                .get(&t)
                .ok_or_else(|| AspError::Malformed(format!("tile {t} lacks a colour")))?;
            Ok(TileType::new(glues, colour))
        })
        .collect::<Result<Vec<_>, AspError>>()?;
    Ok(AspAnswer::Sat(TileSystem::from_cell_tiles(w, h, &tiles)?))
}

/// Captured result of one solver process.
#[derive(Clone, Debug)]
pub struct SolverRun {
    pub stdout: String,
    pub stderr: String,
    pub status: ExitStatus,
    pub elapsed: Duration,
}

/// An external solver invocation: command line and per-run timeout.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SolverJob {
    pub command: Vec<String>,
    pub timeout: Duration,
}

impl SolverJob {
    pub fn new(command: Vec<String>, timeout: Duration) -> Self {
        assert!(!command.is_empty(), "empty solver command");
        assert!(!timeout.is_zero(), "timeout must be positive");
        Self { command, timeout }
    }

    /// Finds a solver: `$PATS_SOLVER_CMD`, then `clingo`, then the Python
    /// module `python3 -m clingo`.
    pub fn discover(timeout: Duration) -> Option<Self> {
        if let Ok(cmd) = std::env::var(SOLVER_ENV) {
            let command: Vec<String> = cmd.split_whitespace().map(String::from).collect();
            return (!command.is_empty()).then(|| Self::new(command, timeout));
        }
        [&["clingo"][..], &["python3", "-m", "clingo"]]
            .into_iter()
            .map(|c| c.iter().map(|s| s.to_string()).collect::<Vec<_>>())
            .find(|c| responds(c))
            .map(|c| Self::new(c, timeout))
    }

    /// Runs the solver on `input` via standard input. Returns `None` on
    /// timeout, after killing the process.
    pub fn run(&self, input: &str) -> Result<Option<SolverRun>, AspError> {
        let start = Instant::now();
        let mut child = Command::new(&self.command[0])
            .args(&self.command[1..])
            .stdin(Stdio::piped())
            .stdout(Stdio::piped())
            .stderr(Stdio::piped())
            .spawn()?;
        let mut stdin = child.stdin.take().expect("piped");
        let input = input.to_owned();
        // A solver that exits early closes the pipe; the error is irrelevant.
        let writer = thread::spawn(move || {
            let _ = stdin.write_all(input.as_bytes());
        });
        let mut stdout = child.stdout.take().expect("piped");
        let mut stderr = child.stderr.take().expect("piped");
        let out = thread::spawn(move || {
            let mut s = String::new();
            stdout.read_to_string(&mut s).map(|_| s)
        });
        let err = thread::spawn(move || {
            let mut s = String::new();
            stderr.read_to_string(&mut s).map(|_| s)
        });
        let status = match child.wait_timeout(self.timeout)? {
            Some(status) => status,
            None => {
                child.kill()?;
                child.wait()?;
                let _ = (writer.join(), out.join(), err.join());
                return Ok(None);
            }
        };
        let _ = writer.join();
        let stdout = out.join().expect("reader thread")?;
        let stderr = err.join().expect("reader thread")?;
        Ok(Some(SolverRun {
            stdout,
            stderr,
            status,
            elapsed: start.elapsed(),
        }))
    }

    /// Solves one encoding.
    pub fn solve(&self, encoding: &AspEncoding, pattern: &Pattern) -> Result<AspAnswer, AspError> {
        let run = self.run(&encoding.program)?.ok_or(AspError::Timeout {
            tiles: encoding.tiles,
            glues: encoding.glues,
            timeout: self.timeout,
        })?;
        // clingo exits with 10 (SAT), 20 (UNSAT) or 30 (SAT, exhausted);
        // the Python entry point exits with 0.
        if !matches!(run.status.code(), Some(0 | 10 | 20 | 30)) {
            return Err(AspError::Crash {
                status: run.status.to_string(),
                stderr: run.stderr.trim().to_string(),
            });
        }
        parse_answer(&run.stdout, pattern).map_err(|e| match e {
            AspError::Malformed(_) if !run.stderr.trim().is_empty() => AspError::Crash {
                status: run.status.to_string(),
                stderr: run.stderr.trim().to_string(),
            },
            e => e,
        })
    }
}

fn responds(command: &[String]) -> bool {
    Command::new(&command[0])
        .args(&command[1..])
        .arg("--version")
        .stdin(Stdio::null())
        .stdout(Stdio::null())
        .stderr(Stdio::null())
        .status()
        .is_ok_and(|s| s.success())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct AspLimits {
    /// Largest tile budget tried; defaults to the cell count.
    pub max_tiles: Option<usize>,
    /// Upper limit on the glue budget, applied on top of `4 * tiles`.
    pub glue_cap: Option<usize>,
    pub symmetry_breaking: bool,
}

impl Default for AspLimits {
    fn default() -> Self {
        Self {
            max_tiles: None,
            glue_cap: None,
            symmetry_breaking: true,
        }
    }
}

/// One `(tiles, glues)` step of the incremental loop.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct AspStep {
    pub tiles: usize,
    pub glues: usize,
    pub satisfiable: bool,
    pub elapsed: Duration,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AspSolution {
    pub system: TileSystem,
    /// Tile budget of the first satisfiable step: the minimum tile count
    /// under the glue cap.
    pub tiles: usize,
    pub glues: usize,
    pub steps: Vec<AspStep>,
}

/// Raises the tile budget from the colour count, and for each tile budget
/// the glue budget from 1 to `min(4 t, glue_cap)`, until a step is
/// satisfiable.
pub fn solve_incremental(
    pattern: &Pattern,
    limits: &AspLimits,
    job: &SolverJob,
) -> Result<AspSolution, AspError> {
    let max_tiles = limits.max_tiles.unwrap_or(pattern.len());
    let mut steps = Vec::new();
    for tiles in pattern.colour_count()..=max_tiles {
        let top = limits.glue_cap.map_or(4 * tiles, |cap| cap.min(4 * tiles));
        for glues in 1..=top {
            let encoding = emit_program(pattern, tiles, glues, limits.symmetry_breaking)?;
            let start = Instant::now();
            let answer = job.solve(&encoding, pattern)?;
            let satisfiable = matches!(answer, AspAnswer::Sat(_));
            steps.push(AspStep {
                tiles,
                glues,
                satisfiable,
                elapsed: start.elapsed(),
            });
            log::debug!("asp t={tiles} g={glues} sat={satisfiable}");
            if let AspAnswer::Sat(system) = answer {
                return Ok(AspSolution {
                    system,
                    tiles,
                    glues,
                    steps,
                });
            }
        }
    }
    Err(AspError::TileLimit(max_tiles))
}
