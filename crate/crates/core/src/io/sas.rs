//! SAS+ export in the translator's version-3 text format.
//!
//! One variable per object whose values are the object's movement-graph
//! nodes in row-major order. Operators are grounded per push group and
//! agent anchor. A multi-valued task has no "cell is free" condition, so an
//! object that could block the group's entered cells is pinned by a prevail
//! condition to each of its non-blocking positions in turn. That product is
//! what makes the grounding expensive; `max_operators` bounds it.

use std::fmt::Write as _;

use super::groups::group_configs;
use super::pddl::{cell_name, check, object_name, ExportError, ExportOptions, ExportReport};
use crate::model::{Position, Puzzle, State};
use crate::motion::MovementGraph;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SasExport {
    pub text: String,
    pub report: ExportReport,
}

struct Grid {
    width: i32,
    cells: Vec<u8>,
}

impl Grid {
    fn new(puzzle: &Puzzle) -> Grid {
        Grid {
            width: puzzle.width(),
            cells: vec![0; (puzzle.width() * puzzle.height()) as usize],
        }
    }

    fn idx(&self, c: Position) -> usize {
        (c.y * self.width + c.x) as usize
    }

    fn hits(&self, puzzle: &Puzzle, object: usize, at: Position) -> bool {
        puzzle.shape(object).cells_at(at).any(|c| self.cells[self.idx(c)] > 0)
    }

    fn mark(&mut self, puzzle: &Puzzle, object: usize, at: Position, add: bool) {
        for c in puzzle.shape(object).cells_at(at) {
            let i = self.idx(c);
            if add {
                self.cells[i] += 1;
            } else {
                self.cells[i] -= 1;
            }
        }
    }
}

struct Operator {
    name: String,
    prevail: Vec<(usize, u32)>,
    effects: Vec<(usize, u32, u32)>,
}

/// Extends `chosen` with one allowed value per blocker; each full choice
/// is a set of prevail conditions.
fn product(
    puzzle: &Puzzle,
    blockers: &[(usize, Vec<(Position, u32)>)],
    grid: &mut Grid,
    chosen: &mut Vec<(usize, u32)>,
    out: &mut Vec<Vec<(usize, u32)>>,
    cap: usize,
) -> Result<(), ()> {
    let Some(((k, allowed), rest)) = blockers.split_first() else {
        if out.len() >= cap {
            return Err(());
        }
        out.push(chosen.clone());
        return Ok(());
    };
    for &(at, value) in allowed {
        if grid.hits(puzzle, *k, at) {
            continue;
        }
        grid.mark(puzzle, *k, at, true);
        chosen.push((*k, value));
        let r = product(puzzle, rest, grid, chosen, out, cap);
        chosen.pop();
        grid.mark(puzzle, *k, at, false);
        r?;
    }
    Ok(())
}

pub fn export_sas(
    puzzle: &Puzzle,
    state: &State,
    opts: &ExportOptions,
) -> Result<SasExport, ExportError> {
    check(puzzle, opts)?;
    let n = puzzle.num_objects();
    let graphs: Vec<MovementGraph> = (0..n).map(|i| MovementGraph::build(puzzle, i)).collect();
    let nodes: Vec<Vec<Position>> = graphs.iter().map(|g| g.nodes().collect()).collect();
    let value = |k: usize, p: Position| -> u32 {
        nodes[k]
            .binary_search_by_key(&p.row_major(), |q| q.row_major())
            .expect("position is a graph node") as u32
    };

    let too_many = ExportError::TooManyOperators {
        cap: opts.max_operators,
    };
    let mut ops: Vec<Operator> = Vec::new();
    let mut entered_grid = Grid::new(puzzle);
    let mut occupied = Grid::new(puzzle);
    for config in group_configs(puzzle, opts.max_chain) {
        let u = config.dir.offset();
        let is_member = |k: usize| config.members.contains(&k);
        'anchor: for &a in &nodes[0] {
            let mut effects = Vec::with_capacity(config.members.len());
            for (&m, &off) in config.members.iter().zip(&config.offsets) {
                let from = a + off;
                if !graphs[m].contains(from) || !graphs[m].contains(from + u) {
                    continue 'anchor;
                }
                effects.push((m, value(m, from), value(m, from + u)));
            }
            let entered: Vec<Position> = config.entered.iter().map(|&e| a + e).collect();
            for &e in &entered {
                let i = entered_grid.idx(e);
                entered_grid.cells[i] = 1;
            }
            for (&m, &off) in config.members.iter().zip(&config.offsets) {
                occupied.mark(puzzle, m, a + off, true);
            }
            let mut blockers = Vec::new();
            let mut dead = false;
            for k in (0..n).filter(|&k| !is_member(k)) {
                let mut blocked = false;
                let allowed: Vec<(Position, u32)> = nodes[k]
                    .iter()
                    .enumerate()
                    .filter(|&(_, &p)| {
                        if entered_grid.hits(puzzle, k, p) {
                            blocked = true;
                            false
                        } else {
                            !occupied.hits(puzzle, k, p)
                        }
                    })
                    .map(|(v, &p)| (p, v as u32))
                    .collect();
                if allowed.is_empty() {
                    dead = true;
                }
                if blocked {
                    blockers.push((k, allowed));
                }
            }
            let mut choices = Vec::new();
            let result = if dead {
                Ok(())
            } else {
                let cap = opts.max_operators.saturating_sub(ops.len());
                product(puzzle, &blockers, &mut occupied, &mut Vec::new(), &mut choices, cap)
            };
            for &e in &entered {
                let i = entered_grid.idx(e);
                entered_grid.cells[i] = 0;
            }
            for (&m, &off) in config.members.iter().zip(&config.offsets) {
                occupied.mark(puzzle, m, a + off, false);
            }
            if result.is_err() {
                return Err(too_many);
            }
            let group: Vec<String> = config.members.iter().map(|&m| object_name(m)).collect();
            for prevail in choices {
                ops.push(Operator {
                    name: format!(
                        "push-{} {} {}",
                        config.dir.name(),
                        group.join("+"),
                        cell_name(a)
                    ),
                    prevail,
                    effects: effects.clone(),
                });
            }
        }
    }

    let mut t = String::new();
    let _ = writeln!(t, "begin_version\n3\nend_version");
    let _ = writeln!(t, "begin_metric\n0\nend_metric");
    let _ = writeln!(t, "{n}");
    for (k, ns) in nodes.iter().enumerate() {
        let _ = writeln!(t, "begin_variable\nvar{k}\n-1\n{}", ns.len());
        for &p in ns {
            let _ = writeln!(t, "Atom at({}, {})", object_name(k), cell_name(p));
        }
        let _ = writeln!(t, "end_variable");
    }
    let _ = writeln!(t, "0");
    let _ = writeln!(t, "begin_state");
    for k in 0..n {
        let _ = writeln!(t, "{}", value(k, state.position(k)));
    }
    let _ = writeln!(t, "end_state");
    let _ = writeln!(t, "begin_goal\n{}", puzzle.goal().len());
    for &(o, g) in puzzle.goal() {
        let _ = writeln!(t, "{o} {}", value(o, g));
    }
    let _ = writeln!(t, "end_goal");
    let _ = writeln!(t, "{}", ops.len());
    for op in &ops {
        let _ = writeln!(t, "begin_operator\n{}\n{}", op.name, op.prevail.len());
        for &(k, v) in &op.prevail {
            let _ = writeln!(t, "{k} {v}");
        }
        let _ = writeln!(t, "{}", op.effects.len());
        for &(k, from, to) in &op.effects {
            let _ = writeln!(t, "0 {k} {from} {to}");
        }
        let _ = writeln!(t, "1\nend_operator");
    }
    let _ = writeln!(t, "0");
    Ok(SasExport {
        text: t,
        report: ExportReport {
            actions: ops.len(),
            chain_limited: n > opts.max_chain,
        },
    })
}
