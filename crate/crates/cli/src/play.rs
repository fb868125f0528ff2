use std::collections::HashMap;
use std::io::{self, BufRead, IsTerminal, Write};
use std::path::Path;
use std::process::ExitCode;

use pushworld::io::load_puzzle;
use pushworld::{apply_action, is_goal, Direction, Position, Puzzle, State};

const HELP: &str = "commands: l r u d (also a, w, s for left, up, down), z undo, x reset, q quit";

/// Three characters per cell: the occupant in the middle, brackets around
/// goal cells.
pub fn render(puzzle: &Puzzle, state: &State) -> String {
    let mut occupant: HashMap<Position, char> = HashMap::new();
    for c in puzzle.walls() {
        occupant.insert(*c, '#');
    }
    for c in puzzle.agent_walls() {
        occupant.insert(*c, '+');
    }
    for (i, o) in puzzle.objects().iter().enumerate() {
        let ch = o.id.chars().next().unwrap_or('?');
        for c in o.shape.cells_at(state.position(i)) {
            occupant.insert(c, ch);
        }
    }
    let goal_cells: Vec<Position> = puzzle
        .goal()
        .iter()
        .flat_map(|&(o, g)| puzzle.shape(o).cells_at(g))
        .collect();
    let mut out = String::new();
    for y in 0..puzzle.height() {
        for x in 0..puzzle.width() {
            let c = Position::new(x, y);
            let mid = occupant.get(&c).copied().unwrap_or('.');
            if goal_cells.contains(&c) {
                out.push('[');
                out.push(mid);
                out.push(']');
            } else {
                out.push(' ');
                out.push(mid);
                out.push(' ');
            }
        }
        out.push('\n');
    }
    out
}

fn command(word: &str) -> Option<char> {
    match word {
        "l" | "a" | "left" => Some('L'),
        "r" | "right" => Some('R'),
        "u" | "w" | "up" => Some('U'),
        "d" | "s" | "down" => Some('D'),
        "z" | "undo" => Some('z'),
        "x" | "reset" => Some('x'),
        "q" | "quit" => Some('q'),
        _ => None,
    }
}

pub fn run(file: &Path, scripted: bool) -> Result<ExitCode, String> {
    let stdin = io::stdin();
    if !scripted && !stdin.is_terminal() {
        eprintln!("play needs a terminal; pass --scripted to read commands from a pipe");
        eprintln!("{HELP}");
        return Ok(ExitCode::from(2));
    }
    let (puzzle, initial) = load_puzzle(file).map_err(|e| e.to_string())?;
    let mut history = vec![initial.clone()];
    let mut out = io::stdout().lock();
    let show = |out: &mut io::StdoutLock, s: &State, moves: usize| {
        let _ = write!(out, "{}moves: {moves}\n> ", render(&puzzle, s));
        let _ = out.flush();
    };
    let _ = writeln!(out, "{}\n{HELP}", puzzle.name());
    show(&mut out, &initial, 0);
    for line in stdin.lock().lines() {
        let line = line.map_err(|e| e.to_string())?;
        for word in line.split_whitespace() {
            let current = history.last().unwrap().clone();
            match command(&word.to_ascii_lowercase()) {
                Some('q') => return Ok(ExitCode::SUCCESS),
                Some('z') => {
                    if history.len() > 1 {
                        history.pop();
                    }
                }
                Some('x') => history.truncate(1),
                Some(letter) => {
                    let dir = Direction::from_letter(letter).expect("movement letter");
                    let next = apply_action(&puzzle, &current, dir);
                    if next == current {
                        let _ = writeln!(out, "blocked");
                    } else {
                        history.push(next);
                    }
                }
                None => {
                    let _ = writeln!(out, "unknown command {word:?}; {HELP}");
                }
            }
        }
        let s = history.last().unwrap();
        if is_goal(&puzzle, s) {
            let _ = writeln!(out, "{}", render(&puzzle, s));
            let _ = writeln!(out, "*** solved in {} moves ***", history.len() - 1);
            return Ok(ExitCode::SUCCESS);
        }
        show(&mut out, s, history.len() - 1);
    }
    let _ = writeln!(out);
    Ok(ExitCode::SUCCESS)
}
