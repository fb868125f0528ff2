use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use pushworld::io::pddl::{export_pddl, ExportOptions};
use pushworld::io::sas::export_sas;
use pushworld::io::load_puzzle;
use pushworld::search::{gbf_search, validate_plan, HeuristicKind, Limits, SearchConfig, Status};
use pushworld::{Puzzle, State};
use rayon::prelude::*;
use serde::Serialize;

/// Bumped whenever a column is added, removed or changes meaning.
pub const SCHEMA_VERSION: u32 = 1;

pub struct BenchOptions {
    pub dir: PathBuf,
    pub heuristics: Vec<HeuristicKind>,
    pub limits: Limits,
    pub jobs: usize,
    /// `Some(true)` times SAS+ export, `Some(false)` PDDL.
    pub format: Option<bool>,
    pub out: PathBuf,
}

#[derive(Debug, Clone, Serialize)]
pub struct Row {
    pub schema_version: u32,
    pub puzzle: String,
    pub heuristic: String,
    pub status: String,
    pub plan_length: Option<usize>,
    pub time_s: f64,
    pub generated: u64,
    pub expanded: u64,
    pub heuristic_evals: u64,
    pub peak_memory_bytes: u64,
    pub translation_time_s: Option<f64>,
}

fn collect(dir: &Path, out: &mut Vec<PathBuf>) -> std::io::Result<()> {
    for entry in fs::read_dir(dir)? {
        let path = entry?.path();
        if path.is_dir() {
            collect(&path, out)?;
        } else if path.extension().is_some_and(|e| e == "pwp") {
            out.push(path);
        }
    }
    Ok(())
}

/// Puzzles under `dir`, named by their path relative to it without the
/// extension. Unreadable or malformed files are skipped with a warning.
pub fn load_corpus(dir: &Path) -> Result<Vec<(String, Puzzle, State)>, String> {
    let mut paths = Vec::new();
    collect(dir, &mut paths).map_err(|e| format!("{}: {e}", dir.display()))?;
    paths.sort();
    let mut out = Vec::new();
    for path in paths {
        match load_puzzle(&path) {
            Ok((p, s)) => {
                let rel = path.strip_prefix(dir).unwrap_or(&path).with_extension("");
                out.push((rel.to_string_lossy().replace('\\', "/"), p, s));
            }
            Err(e) => log::warn!("skipping {}: {e}", path.display()),
        }
    }
    Ok(out)
}

/// Seconds to translate into the requested format, or `None` when the
/// puzzle is outside what the exporter handles.
fn translation_time(name: &str, puzzle: &Puzzle, state: &State, sas: bool) -> Option<f64> {
    let started = Instant::now();
    let export = ExportOptions::default();
    let ok = if sas {
        export_sas(puzzle, state, &export).map(|_| ()).map_err(|e| e.to_string())
    } else {
        export_pddl(puzzle, state, &export).map(|_| ()).map_err(|e| e.to_string())
    };
    let elapsed = started.elapsed().as_secs_f64();
    match ok {
        Ok(()) => Some(elapsed),
        Err(e) => {
            log::warn!("{name}: export failed: {e}");
            None
        }
    }
}

fn run_one(name: &str, puzzle: &Puzzle, state: &State, kind: HeuristicKind, limits: Limits) -> Row {
    let r = gbf_search(puzzle, state, &SearchConfig::new(kind).with_limits(limits));
    let mut status = r.status.name();
    let mut plan_length = None;
    if r.status == Status::Solved {
        if validate_plan(puzzle, state, &r.actions) {
            plan_length = Some(r.actions.len());
        } else {
            log::error!("{name}: {kind} returned a plan that does not reach the goal");
            status = "invalid_plan";
        }
    }
    log::info!("{name} {kind}: {status}");
    Row {
        schema_version: SCHEMA_VERSION,
        puzzle: name.to_string(),
        heuristic: kind.name().to_string(),
        status: status.to_string(),
        plan_length,
        time_s: r.stats.elapsed.as_secs_f64(),
        generated: r.stats.generated,
        expanded: r.stats.expanded,
        heuristic_evals: r.stats.heuristic_evals,
        peak_memory_bytes: r.stats.peak_memory_estimate(puzzle.num_objects()),
        translation_time_s: None,
    }
}

/// One row per (puzzle, heuristic), sorted by puzzle then by the order the
/// heuristics were given in.
pub fn bench(opts: &BenchOptions) -> Result<Vec<Row>, String> {
    let corpus = load_corpus(&opts.dir)?;
    let jobs: Vec<(usize, usize)> = (0..corpus.len())
        .flat_map(|i| (0..opts.heuristics.len()).map(move |h| (i, h)))
        .collect();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(opts.jobs.max(1))
        .build()
        .map_err(|e| e.to_string())?;
    let translations: Vec<Option<f64>> = match opts.format {
        Some(sas) => pool.install(|| {
            corpus
                .par_iter()
                .map(|(name, p, s)| translation_time(name, p, s, sas))
                .collect()
        }),
        None => vec![None; corpus.len()],
    };
    // par_iter keeps input order, which is already puzzle-major
    let rows = pool.install(|| {
        jobs.par_iter()
            .map(|&(i, h)| {
                let (name, p, s) = &corpus[i];
                let mut row = run_one(name, p, s, opts.heuristics[h], opts.limits);
                row.translation_time_s = translations[i];
                row
            })
            .collect()
    });
    Ok(rows)
}

/// Cumulative number of solved puzzles against time, one step per solve.
pub fn curve(rows: &[Row], heuristics: &[HeuristicKind]) -> Vec<(String, f64, usize)> {
    let mut out = Vec::new();
    for kind in heuristics {
        let mut times: Vec<f64> = rows
            .iter()
            .filter(|r| r.heuristic == kind.name() && r.plan_length.is_some())
            .map(|r| r.time_s)
            .collect();
        times.sort_by(f64::total_cmp);
        out.extend(times.into_iter().enumerate().map(|(i, t)| (kind.name().to_string(), t, i + 1)));
    }
    out
}

fn with_suffix(prefix: &Path, suffix: &str) -> PathBuf {
    let mut s = prefix.as_os_str().to_owned();
    s.push(suffix);
    PathBuf::from(s)
}

pub fn run(opts: &BenchOptions) -> Result<(), String> {
    let rows = bench(opts)?;
    if let Some(parent) = opts.out.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent).map_err(|e| e.to_string())?;
    }
    let csv_path = with_suffix(&opts.out, ".csv");
    let mut w = csv::Writer::from_path(&csv_path).map_err(|e| e.to_string())?;
    if rows.is_empty() {
        w.write_record([
            "schema_version",
            "puzzle",
            "heuristic",
            "status",
            "plan_length",
            "time_s",
            "generated",
            "expanded",
            "heuristic_evals",
            "peak_memory_bytes",
            "translation_time_s",
        ])
        .map_err(|e| e.to_string())?;
    }
    for r in &rows {
        w.serialize(r).map_err(|e| e.to_string())?;
    }
    w.flush().map_err(|e| e.to_string())?;

    let json = serde_json::to_string_pretty(&rows).map_err(|e| e.to_string())?;
    fs::write(with_suffix(&opts.out, ".json"), json).map_err(|e| e.to_string())?;

    let mut c = csv::Writer::from_path(with_suffix(&opts.out, ".curve.csv")).map_err(|e| e.to_string())?;
    c.write_record(["heuristic", "time_s", "solved"]).map_err(|e| e.to_string())?;
    for (h, t, n) in curve(&rows, &opts.heuristics) {
        c.write_record([h, format!("{t:.6}"), n.to_string()]).map_err(|e| e.to_string())?;
    }
    c.flush().map_err(|e| e.to_string())?;

    let puzzles = rows.len() / opts.heuristics.len().max(1);
    for kind in &opts.heuristics {
        let solved = rows.iter().filter(|r| r.heuristic == kind.name() && r.plan_length.is_some()).count();
        eprintln!("{kind}: solved {solved}/{puzzles}");
    }
    eprintln!("wrote {}", csv_path.display());
    Ok(())
}
