//! PDDL export (STRIPS with typing and negative preconditions).
//!
//! Cells are objects of type `cell`; puzzle objects are domain constants
//! `o0` (the agent), `o1`, ... Fluents are `(at ?o ?c)` for anchors and
//! `(occupied ?c)` for covered cells. Static facts give each object's
//! wall-free steps and the fixed cell offsets the schemas rely on.
//!
//! There is one action schema per direction and rigid push group (see
//! [`group_configs`]). A schema binds the agent anchor, ties every other
//! parameter to it through offset facts, and requires the cells the group
//! enters to be unoccupied. Pushes that move more than `max_chain` objects
//! have no schema; the export report flags puzzles where that can happen.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use thiserror::Error;

use super::groups::{group_configs, GroupConfig};
use crate::model::{Direction, Position, Puzzle, State};
use crate::motion::MovementGraph;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ExportOptions {
    /// Largest push group (agent included) given an action.
    pub max_chain: usize,
    /// Grounding blow-up guard.
    pub max_objects: usize,
    /// SAS+ only: cap on grounded operators.
    pub max_operators: usize,
}

impl Default for ExportOptions {
    fn default() -> Self {
        Self {
            max_chain: 3,
            max_objects: 8,
            max_operators: 2_000_000,
        }
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ExportError {
    #[error("puzzle has {found} objects; the export cap is {cap}")]
    TooManyObjects { found: usize, cap: usize },
    #[error("puzzle needs at least one object besides the agent")]
    NoMovableObjects,
    #[error("max_chain must be at least 1")]
    BadChainLimit,
    #[error("grounding exceeds {cap} operators")]
    TooManyOperators { cap: usize },
}

/// Summary returned alongside exported text.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExportReport {
    /// Number of action schemas (PDDL) or grounded operators (SAS+).
    pub actions: usize,
    /// Some pushes may involve more than `max_chain` objects and are
    /// missing from the model.
    pub chain_limited: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PddlExport {
    pub domain: String,
    pub problem: String,
    pub report: ExportReport,
}

pub(crate) fn check(puzzle: &Puzzle, opts: &ExportOptions) -> Result<(), ExportError> {
    if opts.max_chain == 0 {
        return Err(ExportError::BadChainLimit);
    }
    if puzzle.num_objects() < 2 {
        return Err(ExportError::NoMovableObjects);
    }
    if puzzle.num_objects() > opts.max_objects {
        return Err(ExportError::TooManyObjects {
            found: puzzle.num_objects(),
            cap: opts.max_objects,
        });
    }
    Ok(())
}

pub fn cell_name(c: Position) -> String {
    format!("c_{}_{}", c.x, c.y)
}

pub fn object_name(index: usize) -> String {
    format!("o{index}")
}

fn offset_predicate(d: Position) -> String {
    let part = |v: i32| {
        if v < 0 {
            format!("n{}", -v)
        } else {
            v.to_string()
        }
    };
    format!("offset-x{}-y{}", part(d.x), part(d.y))
}

fn sanitize(name: &str) -> String {
    let s: String = name
        .chars()
        .map(|c| if c.is_ascii_alphanumeric() { c.to_ascii_lowercase() } else { '-' })
        .collect();
    if s.is_empty() {
        "puzzle".into()
    } else {
        format!("p-{s}")
    }
}

/// Cells that exist in the model: in bounds and not a wall.
pub(crate) fn open_cells(puzzle: &Puzzle) -> Vec<Position> {
    (0..puzzle.height())
        .flat_map(|y| (0..puzzle.width()).map(move |x| Position::new(x, y)))
        .filter(|&c| !puzzle.is_wall(c))
        .collect()
}

struct Schema {
    text: String,
    offsets: BTreeSet<(i32, i32)>,
}

fn schema(puzzle: &Puzzle, config: &GroupConfig, index: usize) -> Schema {
    let dir = config.dir;
    let mut params: Vec<String> = Vec::new();
    let mut pre: Vec<String> = Vec::new();
    let mut eff: Vec<String> = Vec::new();
    let mut offsets = BTreeSet::new();
    let mut bind = |name: String, d: Position, pre: &mut Vec<String>, params: &mut Vec<String>| {
        params.push(name.clone());
        if d != Position::default() {
            offsets.insert((d.x, d.y));
            pre.push(format!("({} ?p0 {name})", offset_predicate(d)));
        } else if name != "?p0" {
            // identical to the agent anchor
            offsets.insert((0, 0));
            pre.push(format!("({} ?p0 {name})", offset_predicate(d)));
        }
    };
    for (k, (&m, &off)) in config.members.iter().zip(&config.offsets).enumerate() {
        let p = format!("?p{k}");
        let q = format!("?q{k}");
        bind(p.clone(), off, &mut pre, &mut params);
        params.push(q.clone());
        pre.push(format!("(at {} {p})", object_name(m)));
        pre.push(format!("(step-{} {} {p} {q})", dir.name(), object_name(m)));
        eff.push(format!("(not (at {} {p}))", object_name(m)));
        eff.push(format!("(at {} {q})", object_name(m)));
    }
    for (k, &e) in config.entered.iter().enumerate() {
        let v = format!("?e{k}");
        bind(v.clone(), e, &mut pre, &mut params);
        pre.push(format!("(not (occupied {v}))"));
        eff.push(format!("(occupied {v})"));
    }
    for (k, &c) in config.vacated.iter().enumerate() {
        let v = format!("?v{k}");
        bind(v.clone(), c, &mut pre, &mut params);
        eff.push(format!("(not (occupied {v}))"));
    }
    let name = format!("push-{}-{}-{}", dir.name(), config.members.len(), index);
    let members: Vec<String> = config
        .members
        .iter()
        .zip(&config.offsets)
        .map(|(&m, o)| format!("{}@{},{}", puzzle.objects()[m].id, o.x, o.y))
        .collect();
    let mut text = String::new();
    let _ = writeln!(text, "  ; moves {}", members.join(" "));
    let _ = writeln!(text, "  (:action {name}");
    let _ = writeln!(text, "    :parameters ({} - cell)", params.join(" "));
    let _ = writeln!(text, "    :precondition (and");
    for l in &pre {
        let _ = writeln!(text, "      {l}");
    }
    let _ = writeln!(text, "    )");
    let _ = writeln!(text, "    :effect (and");
    for l in &eff {
        let _ = writeln!(text, "      {l}");
    }
    let _ = writeln!(text, "    )");
    let _ = writeln!(text, "  )");
    Schema {
        text,
        offsets,
    }
}

/// Domain and problem text for `puzzle` starting from `state`.
pub fn export_pddl(
    puzzle: &Puzzle,
    state: &State,
    opts: &ExportOptions,
) -> Result<PddlExport, ExportError> {
    check(puzzle, opts)?;
    let configs = group_configs(puzzle, opts.max_chain);
    let schemas: Vec<Schema> = configs
        .iter()
        .enumerate()
        .map(|(i, c)| schema(puzzle, c, i))
        .collect();
    let offsets: BTreeSet<(i32, i32)> = schemas.iter().flat_map(|s| s.offsets.iter().copied()).collect();
    let n = puzzle.num_objects();
    let domain_name = sanitize(puzzle.name());

    let mut d = String::new();
    let _ = writeln!(d, "; PushWorld domain generated for {:?}", puzzle.name());
    for (i, o) in puzzle.objects().iter().enumerate() {
        let role = if i == 0 { " (agent)" } else { "" };
        let _ = writeln!(d, "; {} = {}{role}", object_name(i), o.id);
    }
    let _ = writeln!(d, "(define (domain {domain_name})");
    let _ = writeln!(d, "  (:requirements :strips :typing :negative-preconditions)");
    let _ = writeln!(d, "  (:types movable cell)");
    let consts: Vec<String> = (0..n).map(object_name).collect();
    let _ = writeln!(d, "  (:constants {} - movable)", consts.join(" "));
    let _ = writeln!(d, "  (:predicates");
    let _ = writeln!(d, "    (at ?o - movable ?c - cell)");
    let _ = writeln!(d, "    (occupied ?c - cell)");
    for dir in Direction::ALL {
        let _ = writeln!(d, "    (step-{} ?o - movable ?from ?to - cell)", dir.name());
    }
    for &(x, y) in &offsets {
        let _ = writeln!(d, "    ({} ?from ?to - cell)", offset_predicate(Position::new(x, y)));
    }
    let _ = writeln!(d, "  )");
    for s in &schemas {
        d.push_str(&s.text);
    }
    let _ = writeln!(d, ")");

    let cells = open_cells(puzzle);
    let mut p = String::new();
    let _ = writeln!(p, "(define (problem {domain_name}-problem)");
    let _ = writeln!(p, "  (:domain {domain_name})");
    let _ = writeln!(p, "  (:objects");
    for row in cells.chunks(12) {
        let names: Vec<String> = row.iter().map(|&c| cell_name(c)).collect();
        let _ = writeln!(p, "    {}", names.join(" "));
    }
    let _ = writeln!(p, "    - cell)");
    let _ = writeln!(p, "  (:init");
    for i in 0..n {
        let _ = writeln!(p, "    (at {} {})", object_name(i), cell_name(state.position(i)));
    }
    let mut occupied: Vec<Position> = (0..n)
        .flat_map(|i| puzzle.shape(i).cells_at(state.position(i)).collect::<Vec<_>>())
        .collect();
    occupied.sort_by_key(|c| c.row_major());
    for c in occupied {
        let _ = writeln!(p, "    (occupied {})", cell_name(c));
    }
    for i in 0..n {
        let graph = MovementGraph::build(puzzle, i);
        for from in graph.nodes() {
            for dir in Direction::ALL {
                let to = from + dir.offset();
                if graph.contains(to) {
                    let _ = writeln!(
                        p,
                        "    (step-{} {} {} {})",
                        dir.name(),
                        object_name(i),
                        cell_name(from),
                        cell_name(to)
                    );
                }
            }
        }
    }
    for &(x, y) in &offsets {
        let delta = Position::new(x, y);
        let pred = offset_predicate(delta);
        for &c in &cells {
            let t = c + delta;
            if puzzle.in_bounds(t) && !puzzle.is_wall(t) {
                let _ = writeln!(p, "    ({pred} {} {})", cell_name(c), cell_name(t));
            }
        }
    }
    let _ = writeln!(p, "  )");
    let _ = writeln!(p, "  (:goal (and");
    for &(o, g) in puzzle.goal() {
        let _ = writeln!(p, "    (at {} {})", object_name(o), cell_name(g));
    }
    let _ = writeln!(p, "  ))");
    let _ = writeln!(p, ")");

    Ok(PddlExport {
        domain: d,
        problem: p,
        report: ExportReport {
            actions: schemas.len(),
            chain_limited: n > opts.max_chain,
        },
    })
}
