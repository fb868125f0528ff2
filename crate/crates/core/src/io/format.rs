//! The line-based `.pwp` puzzle format.
//!
//! ```text
//! PUSHWORLD 1
//! # comment
//! SIZE 5 5
//! WALL 3,1 3,2
//! AGENTWALL 0,4
//! OBJECT A 0,0
//! OBJECT R 2,0 2,1
//! GOAL R 2,3
//! ```
//!
//! `OBJECT` lists the absolute cells of the initial placement; `GOAL` gives
//! the goal anchor. The header line is optional on input and always written.

use std::fmt::Write as _;
use std::path::Path;

use thiserror::Error;

use crate::model::{validate_puzzle, Object, Position, Puzzle, Shape, State, Violation};

pub const FORMAT_VERSION: u32 = 1;
pub const AGENT_ID: &str = "A";

#[derive(Debug, Error)]
pub enum FormatError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("invalid puzzle: {}", join_violations(.0))]
    Invalid(Vec<Violation>),
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

fn join_violations(v: &[Violation]) -> String {
    v.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; ")
}

fn syntax(line: usize, message: impl Into<String>) -> FormatError {
    FormatError::Syntax {
        line,
        message: message.into(),
    }
}

fn parse_cell(token: &str, line: usize) -> Result<Position, FormatError> {
    let (x, y) = token
        .split_once(',')
        .ok_or_else(|| syntax(line, format!("expected x,y but found {token:?}")))?;
    let parse = |s: &str| {
        s.parse::<i32>()
            .map_err(|_| syntax(line, format!("bad coordinate {s:?} in {token:?}")))
    };
    Ok(Position::new(parse(x)?, parse(y)?))
}

fn parse_cells<'a>(
    tokens: impl Iterator<Item = &'a str>,
    line: usize,
) -> Result<Vec<Position>, FormatError> {
    tokens.map(|t| parse_cell(t, line)).collect()
}

/// Parses a document into a validated puzzle and its initial state. The
/// puzzle name is left empty; [`load_puzzle`] fills it from the file stem.
pub fn parse_puzzle(text: &str) -> Result<(Puzzle, State), FormatError> {
    let mut size: Option<(i32, i32)> = None;
    let mut walls = Vec::new();
    let mut agent_walls = Vec::new();
    // (id, cells, line)
    let mut objects: Vec<(String, Vec<Position>, usize)> = Vec::new();
    let mut goals: Vec<(String, Position, usize)> = Vec::new();
    let mut seen_directive = false;

    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("");
        let mut tokens = content.split_whitespace();
        let Some(keyword) = tokens.next() else {
            continue;
        };
        match keyword {
            "PUSHWORLD" => {
                if seen_directive {
                    return Err(syntax(line, "PUSHWORLD header must come first"));
                }
                let version = tokens
                    .next()
                    .ok_or_else(|| syntax(line, "missing format version"))?;
                if version != FORMAT_VERSION.to_string() {
                    return Err(syntax(line, format!("unsupported format version {version}")));
                }
                if tokens.next().is_some() {
                    return Err(syntax(line, "trailing tokens after version"));
                }
            }
            "SIZE" => {
                if size.is_some() {
                    return Err(syntax(line, "duplicate SIZE"));
                }
                let dims: Vec<&str> = tokens.collect();
                if dims.len() != 2 {
                    return Err(syntax(line, "SIZE takes a width and a height"));
                }
                let parse = |s: &str| {
                    s.parse::<i32>()
                        .ok()
                        .filter(|&v| v > 0)
                        .ok_or_else(|| syntax(line, format!("bad dimension {s:?}")))
                };
                size = Some((parse(dims[0])?, parse(dims[1])?));
            }
            "WALL" => walls.extend(parse_cells(tokens, line)?),
            "AGENTWALL" => agent_walls.extend(parse_cells(tokens, line)?),
            "OBJECT" => {
                let id = tokens
                    .next()
                    .ok_or_else(|| syntax(line, "OBJECT needs an id"))?;
                if id.contains(',') {
                    return Err(syntax(line, format!("bad object id {id:?}")));
                }
                if objects.iter().any(|(o, _, _)| o == id) {
                    return Err(syntax(line, format!("duplicate object {id}")));
                }
                let cells = parse_cells(tokens, line)?;
                if cells.is_empty() {
                    return Err(syntax(line, format!("object {id} has no cells")));
                }
                objects.push((id.to_string(), cells, line));
            }
            "GOAL" => {
                let id = tokens.next().ok_or_else(|| syntax(line, "GOAL needs an id"))?;
                let cell = tokens
                    .next()
                    .ok_or_else(|| syntax(line, "GOAL needs an anchor position"))?;
                let cell = parse_cell(cell, line)?;
                if tokens.next().is_some() {
                    return Err(syntax(line, "GOAL takes exactly one position"));
                }
                if goals.iter().any(|(g, _, _)| g == id) {
                    return Err(syntax(line, format!("duplicate goal for {id}")));
                }
                goals.push((id.to_string(), cell, line));
            }
            other => return Err(syntax(line, format!("unknown directive {other:?}"))),
        }
        seen_directive = true;
    }

    let (width, height) = size.ok_or_else(|| syntax(0, "missing SIZE"))?;
    let agent_pos = objects
        .iter()
        .position(|(id, _, _)| id == AGENT_ID)
        .ok_or_else(|| syntax(0, "missing OBJECT A (the agent)"))?;
    let agent = objects.remove(agent_pos);
    objects.insert(0, agent);

    let mut built = Vec::with_capacity(objects.len());
    let mut anchors = Vec::with_capacity(objects.len());
    for (id, cells, _) in objects {
        let (shape, anchor) = Shape::from_absolute(cells);
        built.push(Object::new(id, shape));
        anchors.push(anchor);
    }
    let mut goal = Vec::with_capacity(goals.len());
    for (id, cell, line) in goals {
        let index = built
            .iter()
            .position(|o| o.id == id)
            .ok_or_else(|| syntax(line, format!("unknown object in GOAL: {id}")))?;
        goal.push((index, cell));
    }

    let puzzle = Puzzle::new("", width, height, walls, agent_walls, built, goal);
    let state = State::new(anchors);
    validate_puzzle(&puzzle, &state).map_err(FormatError::Invalid)?;
    Ok((puzzle, state))
}

const CELLS_PER_LINE: usize = 16;

fn write_cells(out: &mut String, keyword: &str, cells: &[Position]) {
    for chunk in cells.chunks(CELLS_PER_LINE) {
        out.push_str(keyword);
        for c in chunk {
            let _ = write!(out, " {c}");
        }
        out.push('\n');
    }
}

/// Canonical text for a puzzle: header, size, walls and agent walls in
/// row-major order, objects in index order, goals in object order.
pub fn serialize_puzzle(puzzle: &Puzzle, state: &State) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "PUSHWORLD {FORMAT_VERSION}");
    let _ = writeln!(out, "SIZE {} {}", puzzle.width(), puzzle.height());
    write_cells(&mut out, "WALL", puzzle.walls());
    write_cells(&mut out, "AGENTWALL", puzzle.agent_walls());
    for (i, obj) in puzzle.objects().iter().enumerate() {
        out.push_str("OBJECT ");
        out.push_str(&obj.id);
        for c in obj.shape.cells_at(state.position(i)) {
            let _ = write!(out, " {c}");
        }
        out.push('\n');
    }
    for &(o, g) in puzzle.goal() {
        let _ = writeln!(out, "GOAL {} {g}", puzzle.objects()[o].id);
    }
    out
}

/// Reads and parses a `.pwp` file, naming the puzzle after the file stem.
pub fn load_puzzle(path: impl AsRef<Path>) -> Result<(Puzzle, State), FormatError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|source| FormatError::Io {
        path: path.display().to_string(),
        source,
    })?;
    let (puzzle, state) = parse_puzzle(&text)?;
    let name = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    Ok((puzzle.with_name(name), state))
}

pub fn save_puzzle(
    path: impl AsRef<Path>,
    puzzle: &Puzzle,
    state: &State,
) -> Result<(), FormatError> {
    let path = path.as_ref();
    std::fs::write(path, serialize_puzzle(puzzle, state)).map_err(|source| FormatError::Io {
        path: path.display().to_string(),
        source,
    })
}
