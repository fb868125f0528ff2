//! Recursive graph distance heuristic.
//!
//! The estimate for a goal object is the graph distance left after one step
//! plus the cost of getting some pusher into a position that performs that
//! step. A pusher other than the agent must itself be pushed, so the cost
//! recurses through chains of pushers, each object appearing at most once
//! per chain. Costs are threaded through the recursion as upper bounds:
//! [`HeuristicContext::pushing_cost`] returns the bound it was given when
//! nothing cheaper exists.
//!
//! Every cache in the context holds values that depend only on the puzzle,
//! never on the state being evaluated, so reusing a context across the states
//! of one search gives the same numbers as a fresh context would.

use std::sync::Arc;

use rustc_hash::FxHashMap;

use crate::model::{Direction, Position, Puzzle, State, AGENT};
use crate::motion::{Cost, MovementGraph, PathLengthCache, PushingPositionMemo, INFINITY};

/// Used-object sets are bitmasks.
pub const MAX_OBJECTS: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
struct PushKey {
    pusher: u16,
    pushee: u16,
    dir: u8,
    // the pusher's next step is itself the push
    simultaneous: bool,
    pushee_at: u32,
    pusher_next: u32,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DepthPolicy {
    /// Start at depth 1 and deepen while the estimate is infinite.
    Incremental,
    /// Always evaluate with this maximum pusher-chain depth.
    Fixed(usize),
}

/// All caches for one search over one puzzle.
#[derive(Debug, Clone)]
pub struct HeuristicContext {
    goal: Vec<(usize, Position)>,
    graphs: Vec<MovementGraph>,
    paths: PathLengthCache,
    memo: PushingPositionMemo,
    // [pushee][pusher][direction]
    pushing: Vec<Arc<[Position]>>,
    push_cache: FxHashMap<PushKey, Cost>,
    policy: DepthPolicy,
    num_objects: usize,
    width: i32,
    evaluations: u64,
}

fn minus(bound: Cost, d: Cost) -> Cost {
    if bound == INFINITY {
        INFINITY
    } else {
        bound - d
    }
}

impl HeuristicContext {
    pub fn new(puzzle: &Puzzle) -> HeuristicContext {
        Self::with_policy(puzzle, DepthPolicy::Incremental)
    }

    pub fn with_policy(puzzle: &Puzzle, policy: DepthPolicy) -> HeuristicContext {
        let n = puzzle.num_objects();
        assert!(n <= MAX_OBJECTS, "at most {MAX_OBJECTS} objects supported");
        let graphs = (0..n).map(|i| MovementGraph::build(puzzle, i)).collect();
        let mut memo = PushingPositionMemo::new();
        let mut pushing = Vec::with_capacity(n * n * 4);
        for pushee in 0..n {
            for pusher in 0..n {
                for dir in Direction::ALL {
                    pushing.push(memo.get(puzzle.shape(pushee), puzzle.shape(pusher), dir));
                }
            }
        }
        HeuristicContext {
            goal: puzzle.goal().to_vec(),
            graphs,
            paths: PathLengthCache::new(),
            memo,
            pushing,
            push_cache: FxHashMap::default(),
            policy,
            num_objects: n,
            width: puzzle.width(),
            evaluations: 0,
        }
    }

    pub fn graphs(&self) -> &[MovementGraph] {
        &self.graphs
    }

    pub fn graph(&self, object: usize) -> &MovementGraph {
        &self.graphs[object]
    }

    pub fn path_cache(&self) -> &PathLengthCache {
        &self.paths
    }

    pub fn pushing_memo(&self) -> &PushingPositionMemo {
        &self.memo
    }

    pub fn policy(&self) -> DepthPolicy {
        self.policy
    }

    /// Number of full heuristic evaluations performed.
    pub fn evaluations(&self) -> u64 {
        self.evaluations
    }

    pub fn shortest_path_length(&mut self, object: usize, from: Position, to: Position) -> Cost {
        self.paths
            .shortest_path_length(&self.graphs[object], from, to)
    }

    /// Estimate for the puzzle's own goal.
    pub fn estimate(&mut self, state: &State) -> Cost {
        let goal = std::mem::take(&mut self.goal);
        let h = self.rgd_cost(state, &goal);
        self.goal = goal;
        h
    }

    /// Sum of per-object estimates, stopping at the first infinity. Depth is
    /// chosen by the context's [`DepthPolicy`].
    pub fn rgd_cost(&mut self, state: &State, goal: &[(usize, Position)]) -> Cost {
        self.evaluations += 1;
        match self.policy {
            DepthPolicy::Fixed(depth) => self.cost_at_depth(state, goal, depth),
            DepthPolicy::Incremental => {
                let mut depth = 1;
                loop {
                    let c = self.cost_at_depth(state, goal, depth);
                    if c != INFINITY || depth >= self.num_objects {
                        return c;
                    }
                    depth += 1;
                }
            }
        }
    }

    /// Estimate with a fixed maximum pusher-chain depth.
    pub fn cost_at_depth(
        &mut self,
        state: &State,
        goal: &[(usize, Position)],
        max_depth: usize,
    ) -> Cost {
        let mut c: Cost = 0;
        for &(object, target) in goal {
            c = c.saturating_add(self.cost_to_reach_position(object, target, state, max_depth));
            if c == INFINITY {
                break;
            }
        }
        c
    }

    fn successors(&self, object: usize, p: Position) -> ([Position; 4], usize) {
        let mut out = [Position::default(); 4];
        let mut n = 0;
        for q in self.graphs[object].successors(p) {
            out[n] = q;
            n += 1;
        }
        (out, n)
    }

    /// Estimated actions to bring `object` to anchor `target`.
    pub fn cost_to_reach_position(
        &mut self,
        object: usize,
        target: Position,
        state: &State,
        max_depth: usize,
    ) -> Cost {
        let p = state.position(object);
        if p == target {
            return 0;
        }
        let mut c_min = INFINITY;
        let used = 1u64 << object;
        let (next, count) = self.successors(object, p);
        for &p_next in &next[..count] {
            let d = self.shortest_path_length(object, p_next, target);
            if d < c_min {
                let push = self.pushing_cost(object, p_next, used, state, minus(c_min, d), 1, max_depth);
                c_min = d.saturating_add(push);
            }
        }
        c_min
    }

    /// Cheapest way to have some unused pusher move `object` one step to
    /// `p_next`, or `bound` when nothing beats it. Calls nested deeper than
    /// `max_depth` find nothing.
    #[allow(clippy::too_many_arguments)]
    pub fn pushing_cost(
        &mut self,
        object: usize,
        p_next: Position,
        used: u64,
        state: &State,
        bound: Cost,
        depth: usize,
        max_depth: usize,
    ) -> Cost {
        if object == AGENT {
            // the agent moves itself
            return bound.min(1);
        }
        if depth > max_depth {
            return bound;
        }
        let mut c_min = bound;
        let p = state.position(object);
        let Some(dir) = Direction::from_offset(p_next - p) else {
            return bound;
        };
        for pusher in 0..self.num_objects {
            if used & (1 << pusher) != 0 {
                continue;
            }
            let pusher_at = state.position(pusher);
            let next_used = used | (1 << pusher);
            let (next, count) = self.successors(pusher, pusher_at);
            for &pusher_next in &next[..count] {
                let d_min = self.approach_cost(pusher, object, p, pusher_at, pusher_next, dir);
                if pusher == AGENT {
                    c_min = c_min.min(d_min.saturating_add(1));
                } else if d_min < c_min {
                    let sub = self.pushing_cost(
                        pusher,
                        pusher_next,
                        next_used,
                        state,
                        minus(c_min, d_min),
                        depth + 1,
                        max_depth,
                    );
                    c_min = d_min.saturating_add(sub);
                }
            }
        }
        c_min
    }

    /// Minimum over pushing positions of the pusher's path length from
    /// `pusher_next` to the position plus the push itself; zero when the
    /// pusher's next step already performs the push.
    fn approach_cost(
        &mut self,
        pusher: usize,
        pushee: usize,
        pushee_at: Position,
        pusher_at: Position,
        pusher_next: Position,
        dir: Direction,
    ) -> Cost {
        let u = dir.offset();
        let simultaneous = pusher_next == pusher_at + u;
        let key = PushKey {
            pusher: pusher as u16,
            pushee: pushee as u16,
            dir: dir as u8,
            simultaneous,
            pushee_at: (pushee_at.y * self.width + pushee_at.x) as u32,
            pusher_next: (pusher_next.y * self.width + pusher_next.x) as u32,
        };
        if let Some(&c) = self.push_cache.get(&key) {
            return c;
        }
        let offsets = self.pushing[(pushee * self.num_objects + pusher) * 4 + dir.index()].clone();
        let mut d_min = INFINITY;
        for &delta in offsets.iter() {
            let start = pushee_at + delta;
            let end = start + u;
            if !self.graphs[pusher].has_edge(start, end) {
                continue;
            }
            if start == pusher_at && end == pusher_next {
                d_min = 0;
                break;
            }
            let d = self.shortest_path_length(pusher, pusher_next, start).saturating_add(1);
            d_min = d_min.min(d);
        }
        self.push_cache.insert(key, d_min);
        d_min
    }
}
