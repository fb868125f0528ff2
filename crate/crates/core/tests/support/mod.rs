#![allow(dead_code)]

//! Independent oracles shared by the integration tests.

pub mod export_check;
pub mod pddl_sim;
pub mod rgd_oracle;
pub mod sas_sim;

use std::collections::HashSet;
use std::path::PathBuf;

use pushworld::io::load_puzzle;
use pushworld::{Direction, Object, Position, Puzzle, Shape, State};
use rand::seq::SliceRandom;
use rand::Rng;

pub fn mini_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../puzzles/mini")
}

pub fn load_mini(name: &str) -> (Puzzle, State) {
    load_puzzle(mini_dir().join(format!("{name}.pwp"))).expect("bundled puzzle loads")
}

/// Naive push semantics: grow the moving set until no object outside it
/// overlaps a translated member, then check every moved cell.
pub fn naive_step(puzzle: &Puzzle, state: &State, dir: Direction) -> State {
    let u = dir.offset();
    let n = puzzle.num_objects();
    let cells = |i: usize, at: Position| -> HashSet<Position> {
        puzzle.objects()[i].shape.cells().iter().map(|&c| c + at).collect()
    };
    let mut moving = vec![false; n];
    moving[0] = true;
    loop {
        let mut grew = false;
        for j in 0..n {
            if moving[j] {
                continue;
            }
            let here = cells(j, state.position(j));
            let hit = (0..n)
                .filter(|&i| moving[i])
                .any(|i| !cells(i, state.position(i) + u).is_disjoint(&here));
            if hit {
                moving[j] = true;
                grew = true;
            }
        }
        if !grew {
            break;
        }
    }
    for i in (0..n).filter(|&i| moving[i]) {
        for c in cells(i, state.position(i) + u) {
            let outside = c.x < 0 || c.y < 0 || c.x >= puzzle.width() || c.y >= puzzle.height();
            let agent_blocked = i == 0 && puzzle.agent_walls().contains(&c);
            if outside || puzzle.walls().contains(&c) || agent_blocked {
                return state.clone();
            }
        }
    }
    let positions = (0..n)
        .map(|i| state.position(i) + if moving[i] { u } else { Position::default() })
        .collect();
    State::new(positions)
}

/// Number of objects that move, 0 if the action is blocked.
pub fn moved_count(before: &State, after: &State) -> usize {
    before
        .positions()
        .iter()
        .zip(after.positions())
        .filter(|(a, b)| a != b)
        .count()
}

fn random_shape<R: Rng>(rng: &mut R, max_cells: usize) -> Shape {
    let p = Position::new;
    let options = [
        Shape::unit(),
        Shape::rect(2, 1),
        Shape::rect(1, 2),
        Shape::from_offsets([p(0, 0), p(0, 1), p(1, 1)]),
        Shape::from_offsets([p(1, 0), p(0, 1), p(1, 1)]),
    ];
    let pool: Vec<&Shape> = options.iter().filter(|s| s.len() <= max_cells).collect();
    (*pool.choose(rng).unwrap()).clone()
}

/// Random valid puzzle with the given bounds; walls, agent walls and
/// shapes are all random. Goals may be unreachable.
pub fn random_puzzle<R: Rng>(
    rng: &mut R,
    max_side: i32,
    max_objects: usize,
    max_cells: usize,
) -> (Puzzle, State) {
    loop {
        let w = rng.gen_range(3..=max_side);
        let h = rng.gen_range(3..=max_side);
        let n = rng.gen_range(2..=max_objects);
        let cells: Vec<Position> = (0..h)
            .flat_map(|y| (0..w).map(move |x| Position::new(x, y)))
            .collect();
        let wall_count = rng.gen_range(0..=(w * h / 5) as usize);
        let walls: Vec<Position> = cells
            .choose_multiple(rng, wall_count)
            .copied()
            .collect();
        let agent_walls: Vec<Position> = cells
            .iter()
            .copied()
            .filter(|c| !walls.contains(c) && rng.gen_bool(0.08))
            .collect();
        let ids = ["A", "R", "B", "C", "D"];
        let objects: Vec<Object> = (0..n)
            .map(|i| {
                let cells = if i == 0 { max_cells.min(2) } else { max_cells };
                Object::new(ids[i], random_shape(rng, cells))
            })
            .collect();
        let frame = Puzzle::new("", w, h, walls.clone(), agent_walls.clone(), objects.clone(), []);
        let mut taken: HashSet<Position> = HashSet::new();
        let mut positions = Vec::new();
        for i in 0..n {
            let options: Vec<Position> = cells
                .iter()
                .copied()
                .filter(|&a| {
                    frame.fits(i, a) && frame.shape(i).cells_at(a).all(|c| !taken.contains(&c))
                })
                .collect();
            let Some(&a) = options.choose(rng) else { break };
            taken.extend(frame.shape(i).cells_at(a));
            positions.push(a);
        }
        if positions.len() < n {
            continue;
        }
        let goal_options: Vec<Position> = cells.iter().copied().filter(|&a| frame.fits(1, a)).collect();
        let goal = *goal_options.choose(rng).unwrap();
        let puzzle = Puzzle::new("random", w, h, walls, agent_walls, objects, [(1, goal)]);
        return (puzzle, State::new(positions));
    }
}
