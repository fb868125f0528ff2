//! Movement graphs, resumable shortest-path queries and pushing geometry.
//!
//! A movement graph holds every anchor at which an object avoids the walls
//! it respects, with an edge between anchors one step apart. Movable objects
//! are ignored, so a graph depends only on the puzzle and is built once.

use std::collections::VecDeque;
use std::sync::Arc;

use rustc_hash::FxHashMap;

use crate::model::{Direction, Position, Puzzle, Shape};

pub type Cost = u32;

/// Unreachable / no finite estimate.
pub const INFINITY: Cost = Cost::MAX;

#[derive(Debug, Clone)]
pub struct MovementGraph {
    object: usize,
    width: i32,
    height: i32,
    nodes: Vec<bool>,
    node_count: usize,
}

impl MovementGraph {
    pub fn build(puzzle: &Puzzle, object: usize) -> MovementGraph {
        let (width, height) = (puzzle.width(), puzzle.height());
        let mut nodes = vec![false; (width * height) as usize];
        let mut node_count = 0;
        if !puzzle.shape(object).is_empty() {
            for y in 0..height {
                for x in 0..width {
                    if puzzle.fits(object, Position::new(x, y)) {
                        nodes[(y * width + x) as usize] = true;
                        node_count += 1;
                    }
                }
            }
        }
        MovementGraph {
            object,
            width,
            height,
            nodes,
            node_count,
        }
    }

    pub fn object(&self) -> usize {
        self.object
    }

    pub fn width(&self) -> i32 {
        self.width
    }

    pub fn height(&self) -> i32 {
        self.height
    }

    pub fn node_count(&self) -> usize {
        self.node_count
    }

    /// Dense index of an in-bounds anchor.
    pub fn index(&self, p: Position) -> Option<u32> {
        (p.x >= 0 && p.y >= 0 && p.x < self.width && p.y < self.height)
            .then(|| (p.y * self.width + p.x) as u32)
    }

    pub fn position(&self, index: u32) -> Position {
        let i = index as i32;
        Position::new(i % self.width, i / self.width)
    }

    pub fn contains(&self, p: Position) -> bool {
        self.index(p).is_some_and(|i| self.nodes[i as usize])
    }

    /// Nodes in row-major order.
    pub fn nodes(&self) -> impl Iterator<Item = Position> + '_ {
        self.nodes
            .iter()
            .enumerate()
            .filter(|(_, &n)| n)
            .map(|(i, _)| self.position(i as u32))
    }

    pub fn has_edge(&self, from: Position, to: Position) -> bool {
        Direction::from_offset(to - from).is_some() && self.contains(from) && self.contains(to)
    }

    /// Neighbours of `p` in direction order left, right, up, down.
    pub fn successors(&self, p: Position) -> impl Iterator<Item = Position> + '_ {
        let valid = self.contains(p);
        Direction::ALL
            .into_iter()
            .map(move |d| p + d.offset())
            .filter(move |&q| valid && self.contains(q))
    }

    /// Undirected adjacency count.
    pub fn edge_count(&self) -> usize {
        self.nodes()
            .map(|p| {
                [Direction::Right, Direction::Down]
                    .into_iter()
                    .filter(|d| self.contains(p + d.offset()))
                    .count()
            })
            .sum()
    }
}

#[derive(Debug, Default, Clone)]
struct Frontier {
    dist: FxHashMap<u32, Cost>,
    queue: VecDeque<u32>,
}

/// Resumable backward breadth-first expansions, one per (object, target).
///
/// Edges are symmetric, so expanding from the target yields distances to it.
/// A query for a source that is not labelled yet continues the expansion
/// until the source is labelled or the component is exhausted.
#[derive(Debug, Default, Clone)]
pub struct PathLengthCache {
    frontiers: FxHashMap<(usize, u32), Frontier>,
    expansions: u64,
}

impl PathLengthCache {
    pub fn new() -> Self {
        Self::default()
    }

    /// Number of cached targets.
    pub fn len(&self) -> usize {
        self.frontiers.len()
    }

    pub fn is_empty(&self) -> bool {
        self.frontiers.is_empty()
    }

    /// Total nodes popped across all expansions.
    pub fn expansions(&self) -> u64 {
        self.expansions
    }

    /// Distance already known for `from`, without expanding further.
    pub fn peek(&self, graph: &MovementGraph, from: Position, to: Position) -> Option<Cost> {
        let to = graph.index(to)?;
        let from = graph.index(from)?;
        self.frontiers
            .get(&(graph.object(), to))?
            .dist
            .get(&from)
            .copied()
    }

    pub fn shortest_path_length(
        &mut self,
        graph: &MovementGraph,
        from: Position,
        to: Position,
    ) -> Cost {
        if !graph.contains(from) || !graph.contains(to) {
            return INFINITY;
        }
        if from == to {
            return 0;
        }
        let (Some(src), Some(dst)) = (graph.index(from), graph.index(to)) else {
            return INFINITY;
        };
        let frontier = self
            .frontiers
            .entry((graph.object(), dst))
            .or_insert_with(|| {
                let mut f = Frontier::default();
                f.dist.insert(dst, 0);
                f.queue.push_back(dst);
                f
            });
        if let Some(&d) = frontier.dist.get(&src) {
            return d;
        }
        while let Some(v) = frontier.queue.pop_front() {
            self.expansions += 1;
            let dv = frontier.dist[&v];
            for q in graph.successors(graph.position(v)) {
                let qi = graph.index(q).expect("successor in bounds");
                frontier.dist.entry(qi).or_insert_with(|| {
                    frontier.queue.push_back(qi);
                    dv + 1
                });
            }
            if let Some(&d) = frontier.dist.get(&src) {
                return d;
            }
        }
        INFINITY
    }
}

/// Offsets `Δ` (pusher anchor minus pushee anchor) from which the pusher,
/// moving one step in `dir`, makes contact with the pushee without
/// overlapping it beforehand. Sorted row-major.
pub fn relative_pushing_positions(
    pushee: &Shape,
    pusher: &Shape,
    dir: Direction,
) -> Vec<Position> {
    let u = dir.offset();
    let mut out: Vec<Position> = pushee
        .cells()
        .iter()
        .flat_map(|&q| pusher.cells().iter().map(move |&c| q - c - u))
        .filter(|&delta| !pusher.cells().iter().any(|&c| pushee.contains(c + delta)))
        .collect();
    out.sort_by_key(|d| d.row_major());
    out.dedup();
    out
}

/// Memo for [`relative_pushing_positions`] keyed on the two shapes.
#[derive(Debug, Default, Clone)]
pub struct PushingPositionMemo {
    table: FxHashMap<(Shape, Shape, Direction), Arc<[Position]>>,
}

impl PushingPositionMemo {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn get(&mut self, pushee: &Shape, pusher: &Shape, dir: Direction) -> Arc<[Position]> {
        self.table
            .entry((pushee.clone(), pusher.clone(), dir))
            .or_insert_with(|| relative_pushing_positions(pushee, pusher, dir).into())
            .clone()
    }

    pub fn len(&self) -> usize {
        self.table.len()
    }

    pub fn is_empty(&self) -> bool {
        self.table.is_empty()
    }
}
