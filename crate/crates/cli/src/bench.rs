//! Experiment grids: each `[[run]]` table solves a family of instances and
//! appends one row per instance to `bench.csv`.

use std::fmt::Write as _;
use std::fs;
use std::time::{Duration, Instant};

use anyhow::{Context, Result};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Deserialize;

use pats_core::asp::{solve_incremental, AspLimits};
use pats_core::atam::verify_solution;
use pats_core::pattern::{binary_counter, random, sierpinski, Pattern};
use pats_core::search::{psbb_solve, psh_parallel, HeuristicConfig, SearchConfig};

use crate::manifest::digest;
use crate::{bad_input, exit, load_pattern, solver_job, Algorithm, BenchArgs, Run};

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BenchConfig {
    #[serde(rename = "run")]
    pub runs: Vec<RunSpec>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunSpec {
    pub name: String,
    pub algorithm: Algorithm,
    /// `sierpinski`, `counter`, `random`, or a pattern file path.
    pub pattern: String,
    #[serde(default)]
    pub width: usize,
    #[serde(default)]
    pub height: usize,
    #[serde(default = "two")]
    pub colours: usize,
    #[serde(default = "one")]
    pub instances: usize,
    #[serde(default)]
    pub seed: u64,
    pub step_budget: Option<u64>,
    pub time_budget: Option<f64>,
    #[serde(default = "one")]
    pub workers: usize,
    #[serde(default)]
    pub report_every: u64,
    /// Seconds per solver call.
    #[serde(default = "ten_minutes")]
    pub timeout: f64,
}

fn one() -> usize {
    1
}

fn two() -> usize {
    2
}

fn ten_minutes() -> f64 {
    600.0
}

impl RunSpec {
    /// Instance `i`; random instances are drawn from `seed + i`.
    fn pattern(&self, instance: usize) -> Result<Pattern> {
        let dims_ok = self.width > 0 && self.height > 0;
        let need_dims = || bad_input(anyhow::anyhow!("run `{}` needs width and height", self.name));
        Ok(match self.pattern.as_str() {
            "sierpinski" if dims_ok => sierpinski(self.width, self.height),
            "counter" if dims_ok => binary_counter(self.width, self.height),
            "random" if dims_ok => {
                if !(1..=self.width * self.height).contains(&self.colours) {
                    return Err(bad_input(anyhow::anyhow!(
                        "run `{}`: colour count out of range",
                        self.name
                    )));
                }
                let mut rng = ChaCha8Rng::seed_from_u64(self.seed.wrapping_add(instance as u64));
                random(self.width, self.height, self.colours, &mut rng)
            }
            "sierpinski" | "counter" | "random" => return Err(need_dims()),
            path => load_pattern(path.as_ref())?.0,
        })
    }
}

pub fn parse_config(text: &str) -> Result<BenchConfig> {
    toml::from_str(text).context("parsing bench config").map_err(bad_input)
}

pub fn cmd_bench(run: &mut Run, args: &BenchArgs) -> Result<u8> {
    let text = fs::read_to_string(&args.config)
        .with_context(|| format!("reading {}", args.config.display()))
        .map_err(bad_input)?;
    let config = parse_config(&text)?;
    run.manifest.pattern_digest = Some(digest(&text));
    let mut csv = String::from(
        "run,instance,algorithm,width,height,colours,seed,best_size,optimal,steps,verified,elapsed_ms\n",
    );
    let mut code = exit::OK;
    for spec in &config.runs {
        run.manifest.rng_seeds.push(spec.seed);
        for i in 0..spec.instances {
            let pattern = spec.pattern(i)?;
            let seed = spec.seed.wrapping_add(i as u64);
            let start = Instant::now();
            let time_budget = spec.time_budget.map(Duration::from_secs_f64);
            let (best, optimal, steps, system) = match spec.algorithm {
                Algorithm::Bb => {
                    let t = psbb_solve(
                        &pattern,
                        &SearchConfig {
                            step_budget: spec.step_budget.unwrap_or(u64::MAX),
                            rng_seed: seed,
                            report_every: spec.report_every,
                            time_budget,
                            ..Default::default()
                        },
                    );
                    run.output(&format!("{}-{i}.csv", spec.name), &t.to_csv(run.timing))?;
                    (t.best_size, t.optimal, t.steps, t.best)
                }
                Algorithm::H => {
                    let out = psh_parallel(
                        &pattern,
                        &HeuristicConfig {
                            workers: spec.workers.max(1),
                            seed,
                            step_budget: spec
                                .step_budget
                                .unwrap_or(HeuristicConfig::default().step_budget),
                            time_budget,
                            report_every: spec.report_every,
                        },
                    );
                    let t = out.merged;
                    run.output(&format!("{}-{i}.csv", spec.name), &t.to_csv(run.timing))?;
                    (t.best_size, t.optimal, t.steps, t.best)
                }
                Algorithm::Asp => {
                    let Some(job) = solver_job(
                        args.solver_cmd.as_deref(),
                        Duration::from_secs_f64(spec.timeout),
                    ) else {
                        eprintln!("{}: skipped, no answer-set solver found", spec.name);
                        code = exit::SOLVER_UNAVAILABLE;
                        break;
                    };
                    let s = solve_incremental(&pattern, &AspLimits::default(), &job)?;
                    (s.system.tiles.len(), true, s.steps.len() as u64, s.system)
                }
            };
            let verified = verify_solution(&system, &pattern).is_ok();
            if !verified {
                code = exit::VERIFY_FAILED;
            }
            run.output(&format!("{}-{i}.tiles", spec.name), &system.to_text())?;
            let ms = if run.timing { start.elapsed().as_millis() } else { 0 };
            writeln!(
                csv,
                "{},{i},{:?},{},{},{},{seed},{best},{optimal},{steps},{verified},{ms}",
                spec.name,
                spec.algorithm,
                pattern.width(),
                pattern.height(),
                pattern.colour_count(),
            )
            .unwrap();
            println!("{} #{i}: best_size={best} optimal={optimal} steps={steps}", spec.name);
        }
    }
    run.output("bench.csv", &csv)?;
    Ok(code)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_a_grid() {
        let config = parse_config(
            r#"
            [[run]]
            name = "bb-random"
            algorithm = "bb"
            pattern = "random"
            width = 5
            height = 5
            instances = 3
            step_budget = 1000

            [[run]]
            name = "h-sierpinski"
            algorithm = "h"
            pattern = "sierpinski"
            width = 8
            height = 8
            workers = 4
            "#,
        )
        .unwrap();
        assert_eq!(config.runs.len(), 2);
        assert_eq!(config.runs[0].colours, 2);
        assert_eq!(config.runs[1].algorithm, Algorithm::H);
        let a = config.runs[0].pattern(1).unwrap();
        let b = config.runs[0].pattern(1).unwrap();
        assert_eq!(a, b);
        assert_ne!(config.runs[0].pattern(0).unwrap(), a);
    }

    #[test]
    fn rejects_unknown_keys_and_missing_sizes() {
        assert!(parse_config("[[run]]\nname='a'\nalgorithm='bb'\npattern='random'\nfoo=1\n").is_err());
        let config = parse_config("[[run]]\nname='a'\nalgorithm='bb'\npattern='counter'\n").unwrap();
        assert!(config.runs[0].pattern(0).is_err());
    }
}
