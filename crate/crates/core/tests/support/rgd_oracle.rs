//! Straight transcription of the recursive graph distance with no caches:
//! plain BFS per distance query, pushing offsets by window scan.

use std::collections::{HashSet, VecDeque};

use pushworld::motion::{Cost, INFINITY};
use pushworld::{Direction, Position, Puzzle, Shape, State};

pub fn fits(puzzle: &Puzzle, object: usize, at: Position) -> bool {
    puzzle.shape(object).cells_at(at).all(|c| {
        c.x >= 0
            && c.y >= 0
            && c.x < puzzle.width()
            && c.y < puzzle.height()
            && !puzzle.walls().contains(&c)
            && !(object == 0 && puzzle.agent_walls().contains(&c))
    })
}

pub fn bfs(puzzle: &Puzzle, object: usize, from: Position, to: Position) -> Cost {
    if !fits(puzzle, object, from) || !fits(puzzle, object, to) {
        return INFINITY;
    }
    let mut seen = HashSet::from([from]);
    let mut queue = VecDeque::from([(from, 0)]);
    while let Some((p, d)) = queue.pop_front() {
        if p == to {
            return d;
        }
        for dir in Direction::ALL {
            let q = p + dir.offset();
            if fits(puzzle, object, q) && seen.insert(q) {
                queue.push_back((q, d + 1));
            }
        }
    }
    INFINITY
}

/// Offsets by scanning every candidate in a window around the pushee.
pub fn pushing_offsets(pushee: &Shape, pusher: &Shape, dir: Direction) -> Vec<Position> {
    let u = dir.offset();
    let span = 8;
    let mut out = Vec::new();
    for dy in -span..=span {
        for dx in -span..=span {
            let d = Position::new(dx, dy);
            let before: HashSet<Position> = pusher.cells().iter().map(|&c| c + d).collect();
            let after: HashSet<Position> = pusher.cells().iter().map(|&c| c + d + u).collect();
            let body: HashSet<Position> = pushee.cells().iter().copied().collect();
            if before.is_disjoint(&body) && !after.is_disjoint(&body) {
                out.push(d);
            }
        }
    }
    out.sort_by_key(|d| (d.y, d.x));
    out
}

fn successors(puzzle: &Puzzle, object: usize, p: Position) -> Vec<Position> {
    if !fits(puzzle, object, p) {
        return Vec::new();
    }
    Direction::ALL
        .into_iter()
        .map(|d| p + d.offset())
        .filter(|&q| fits(puzzle, object, q))
        .collect()
}

fn sub(bound: Cost, d: Cost) -> Cost {
    if bound == INFINITY {
        INFINITY
    } else {
        bound - d
    }
}

fn add(a: Cost, b: Cost) -> Cost {
    a.saturating_add(b)
}

pub struct Oracle<'a> {
    pub puzzle: &'a Puzzle,
    pub max_depth: usize,
}

impl Oracle<'_> {
    pub fn cost(&self, state: &State) -> Cost {
        let mut c = 0;
        for &(o, g) in self.puzzle.goal() {
            c = add(c, self.reach(o, g, state));
            if c == INFINITY {
                break;
            }
        }
        c
    }

    pub fn reach(&self, object: usize, goal: Position, state: &State) -> Cost {
        let p = state.position(object);
        if p == goal {
            return 0;
        }
        let mut c_min = INFINITY;
        for p_next in successors(self.puzzle, object, p) {
            let d = bfs(self.puzzle, object, p_next, goal);
            if d < c_min {
                c_min = add(d, self.pushing(object, p_next, &[object], state, sub(c_min, d), 1));
            }
        }
        c_min
    }

    fn pushing(
        &self,
        object: usize,
        p_next: Position,
        used: &[usize],
        state: &State,
        bound: Cost,
        depth: usize,
    ) -> Cost {
        if object == 0 {
            return bound.min(1);
        }
        if depth > self.max_depth {
            return bound;
        }
        let mut c_min = bound;
        let p = state.position(object);
        let dir = Direction::from_offset(p_next - p).unwrap();
        let u = dir.offset();
        for pusher in 0..self.puzzle.num_objects() {
            if used.contains(&pusher) {
                continue;
            }
            let at = state.position(pusher);
            for next in successors(self.puzzle, pusher, at) {
                let mut d_min = INFINITY;
                for delta in pushing_offsets(self.puzzle.shape(object), self.puzzle.shape(pusher), dir) {
                    let start = p + delta;
                    let end = start + u;
                    if !(fits(self.puzzle, pusher, start) && fits(self.puzzle, pusher, end)) {
                        continue;
                    }
                    let d = if start == at && end == next {
                        0
                    } else {
                        add(bfs(self.puzzle, pusher, next, start), 1)
                    };
                    d_min = d_min.min(d);
                    if d == 0 {
                        break;
                    }
                }
                if pusher == 0 {
                    c_min = c_min.min(add(d_min, 1));
                } else if d_min < c_min {
                    let mut used = used.to_vec();
                    used.push(pusher);
                    c_min = add(d_min, self.pushing(pusher, next, &used, state, sub(c_min, d_min), depth + 1));
                }
            }
        }
        c_min
    }
}

/// Estimate with the incremental depth schedule.
pub fn incremental(puzzle: &Puzzle, state: &State) -> Cost {
    let n = puzzle.num_objects();
    let mut depth = 1;
    loop {
        let c = Oracle { puzzle, max_depth: depth }.cost(state);
        if c != INFINITY || depth >= n {
            return c;
        }
        depth += 1;
    }
}
