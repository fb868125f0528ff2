mod bench;
mod play;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use clap::{Args, Parser, Subcommand, ValueEnum};
use pushworld::generator::{augment, generate_one, write_split, Variant, VariantSpec};
use pushworld::io::pddl::{export_pddl, ExportOptions};
use pushworld::io::sas::export_sas;
use pushworld::io::load_puzzle;
use pushworld::search::{gbf_search, validate_plan, HeuristicKind, Limits, SearchConfig, Status};
use pushworld::{validate_puzzle, Direction};
use rayon::prelude::*;

#[derive(Parser)]
#[command(name = "pushworld", version, about = "Solve, benchmark, generate and play PushWorld puzzles")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone, Copy)]
struct SearchArgs {
    #[arg(long, default_value = "novelty-rgd", value_parser = parse_heuristic)]
    heuristic: HeuristicKind,
    /// Seconds per puzzle.
    #[arg(long, default_value_t = 60.0)]
    time_limit: f64,
    /// Megabytes per puzzle.
    #[arg(long, default_value_t = 4096)]
    memory_limit: u64,
}

impl SearchArgs {
    fn config(&self) -> SearchConfig {
        SearchConfig::new(self.heuristic).with_limits(limits(self.time_limit, self.memory_limit))
    }
}

fn limits(seconds: f64, megabytes: u64) -> Limits {
    Limits::new(Some(Duration::from_secs_f64(seconds.max(0.0))), Some(megabytes << 20))
}

fn parse_heuristic(s: &str) -> Result<HeuristicKind, String> {
    s.parse()
}

fn parse_variant(s: &str) -> Result<Variant, String> {
    s.parse()
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Pddl,
    Sas,
}

#[derive(Subcommand)]
enum Command {
    /// Solve one puzzle; prints the plan, one action letter per line.
    Solve {
        file: PathBuf,
        #[command(flatten)]
        search: SearchArgs,
        /// Also write the plan to this file.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run planners over a directory of puzzles and write CSV, JSON and
    /// solved-vs-time curve files.
    Bench {
        /// Defaults to $PUSHWORLD_PUZZLE_DIR.
        #[arg(env = "PUSHWORLD_PUZZLE_DIR")]
        dir: PathBuf,
        /// Comma-separated planner list.
        #[arg(long, default_value = "novelty-rgd", value_delimiter = ',', value_parser = parse_heuristic)]
        heuristic: Vec<HeuristicKind>,
        #[arg(long, default_value_t = 60.0)]
        time_limit: f64,
        #[arg(long, default_value_t = 4096)]
        memory_limit: u64,
        #[arg(long, default_value_t = 1)]
        jobs: usize,
        /// Also time export to this format, reported separately.
        #[arg(long, value_enum)]
        format: Option<Format>,
        /// Output prefix: writes PREFIX.csv, PREFIX.json and PREFIX.curve.csv.
        #[arg(long, default_value = "results")]
        out: PathBuf,
    },
    /// Generate a train/test puzzle set as `<out>/<variant>/<split>/<i>.pwp`.
    Gen {
        #[arg(value_parser = parse_variant)]
        variant: Variant,
        #[arg(long, default_value_t = 2000)]
        train: usize,
        #[arg(long, default_value_t = 200)]
        test: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1)]
        jobs: usize,
        /// Add all eight rotations and reflections of each puzzle, padded
        /// with walls to the largest size in the set.
        #[arg(long)]
        augment: bool,
        #[arg(long, default_value = "puzzles")]
        out: PathBuf,
    },
    /// Write a PDDL domain and problem, or a SAS+ task.
    Export {
        file: PathBuf,
        #[arg(long, value_enum)]
        format: Format,
        /// Directory for PDDL; file for SAS+ (stdout when omitted).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Longest push group, counting the agent.
        #[arg(long, default_value_t = 3)]
        max_chain: usize,
    },
    /// Check a puzzle file and optionally a plan for it.
    Validate { file: PathBuf, plan: Option<PathBuf> },
    /// Play in the terminal.
    Play {
        file: PathBuf,
        /// Accept commands from a non-terminal stdin.
        #[arg(long)]
        scripted: bool,
    },
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Solve { file, search, out } => solve(&file, &search, out.as_deref()),
        Command::Bench {
            dir,
            heuristic,
            time_limit,
            memory_limit,
            jobs,
            format,
            out,
        } => bench::run(&bench::BenchOptions {
            dir,
            heuristics: heuristic,
            limits: limits(time_limit, memory_limit),
            jobs,
            format: format.map(|f| matches!(f, Format::Sas)),
            out,
        })
        .map(|_| ExitCode::SUCCESS),
        Command::Gen {
            variant,
            train,
            test,
            seed,
            jobs,
            augment,
            out,
        } => gen(variant, train, test, seed, jobs, augment, &out),
        Command::Export {
            file,
            format,
            out,
            max_chain,
        } => export(&file, format, out.as_deref(), max_chain),
        Command::Validate { file, plan } => validate(&file, plan.as_deref()),
        Command::Play { file, scripted } => play::run(&file, scripted),
    };
    result.unwrap_or_else(|e| {
        eprintln!("error: {e}");
        ExitCode::from(1)
    })
}

type CmdResult = Result<ExitCode, String>;

fn solve(file: &Path, search: &SearchArgs, out: Option<&Path>) -> CmdResult {
    let (puzzle, state) = load_puzzle(file).map_err(|e| e.to_string())?;
    let r = gbf_search(&puzzle, &state, &search.config());
    eprintln!("status: {}", r.status);
    eprintln!("heuristic: {}", search.heuristic);
    eprintln!("plan_length: {}", r.actions.len());
    eprintln!("time_s: {:.6}", r.stats.elapsed.as_secs_f64());
    eprintln!("generated: {}", r.stats.generated);
    eprintln!("expanded: {}", r.stats.expanded);
    eprintln!("heuristic_evals: {}", r.stats.heuristic_evals);
    match r.status {
        Status::Solved => {
            if !validate_plan(&puzzle, &state, &r.actions) {
                return Err("planner returned an invalid plan".into());
            }
            let text: String = r.actions.iter().map(|a| format!("{}\n", a.letter())).collect();
            print!("{text}");
            if let Some(path) = out {
                fs::write(path, &text).map_err(|e| format!("{}: {e}", path.display()))?;
            }
            Ok(ExitCode::SUCCESS)
        }
        Status::TimeLimit | Status::MemoryLimit => Ok(ExitCode::from(2)),
        Status::Exhausted => {
            eprintln!("no plan exists");
            Ok(ExitCode::from(1))
        }
    }
}

fn gen(variant: Variant, train: usize, test: usize, seed: u64, jobs: usize, aug: bool, out: &Path) -> CmdResult {
    let spec = VariantSpec::new(variant, seed);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()
        .map_err(|e| e.to_string())?;
    let started = Instant::now();
    let all = pool
        .install(|| {
            (0..train + test)
                .into_par_iter()
                .map(|i| generate_one(&spec, i))
                .collect::<Result<Vec<_>, _>>()
        })
        .map_err(|e| e.to_string())?;
    let (mut train_set, test_set) = (all[..train].to_vec(), all[train..].to_vec());
    if aug {
        let w = all.iter().map(|(p, _)| p.width().max(p.height())).max().unwrap_or(1);
        train_set = augment(&train_set, w, w, seed).map_err(|e| e.to_string())?;
    }
    write_split(out, variant.name(), &train_set, &test_set).map_err(|e| e.to_string())?;
    eprintln!(
        "wrote {} train and {} test puzzles to {} in {:.1?}",
        train_set.len(),
        test_set.len(),
        out.join(variant.name()).display(),
        started.elapsed()
    );
    Ok(ExitCode::SUCCESS)
}

fn export(file: &Path, format: Format, out: Option<&Path>, max_chain: usize) -> CmdResult {
    let (puzzle, state) = load_puzzle(file).map_err(|e| e.to_string())?;
    let opts = ExportOptions {
        max_chain,
        ..ExportOptions::default()
    };
    let started = Instant::now();
    let report = match format {
        Format::Pddl => {
            let x = export_pddl(&puzzle, &state, &opts).map_err(|e| e.to_string())?;
            let dir = out.ok_or("PDDL export needs --out DIR")?;
            fs::create_dir_all(dir).map_err(|e| e.to_string())?;
            fs::write(dir.join("domain.pddl"), x.domain).map_err(|e| e.to_string())?;
            fs::write(dir.join("problem.pddl"), x.problem).map_err(|e| e.to_string())?;
            x.report
        }
        Format::Sas => {
            let x = export_sas(&puzzle, &state, &opts).map_err(|e| e.to_string())?;
            match out {
                Some(path) => fs::write(path, x.text).map_err(|e| e.to_string())?,
                None => print!("{}", x.text),
            }
            x.report
        }
    };
    eprintln!("actions: {}", report.actions);
    eprintln!("translation_time_s: {:.6}", started.elapsed().as_secs_f64());
    if report.chain_limited {
        log::warn!("some pushes move more than {max_chain} objects and are not in the model");
    }
    Ok(ExitCode::SUCCESS)
}

/// Plan files hold action letters; whitespace and case are ignored.
fn parse_plan(text: &str) -> Result<Vec<Direction>, String> {
    text.chars()
        .filter(|c| !c.is_whitespace())
        .map(|c| Direction::from_letter(c).ok_or_else(|| format!("bad action {c:?} in plan")))
        .collect()
}

fn validate(file: &Path, plan: Option<&Path>) -> CmdResult {
    let (puzzle, state) = load_puzzle(file).map_err(|e| e.to_string())?;
    validate_puzzle(&puzzle, &state).map_err(|v| format!("{v:?}"))?;
    println!("puzzle ok: {} ({}x{}, {} objects)", puzzle.name(), puzzle.width(), puzzle.height(), puzzle.num_objects());
    let Some(plan) = plan else {
        return Ok(ExitCode::SUCCESS);
    };
    let text = fs::read_to_string(plan).map_err(|e| format!("{}: {e}", plan.display()))?;
    let actions = parse_plan(&text)?;
    if validate_plan(&puzzle, &state, &actions) {
        println!("plan ok: {} actions", actions.len());
        Ok(ExitCode::SUCCESS)
    } else {
        println!("plan does not reach the goal");
        Ok(ExitCode::from(1))
    }
}
