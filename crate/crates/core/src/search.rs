//! Greedy best-first search, breadth-first optimal search and plan checks.

use std::cmp::Reverse;
use std::collections::{BinaryHeap, VecDeque};
use std::fmt;
use std::str::FromStr;
use std::time::{Duration, Instant};

use rustc_hash::FxHashSet;

use crate::model::{apply_action, is_goal, try_apply, Direction, Puzzle, State};
use crate::motion::{Cost, INFINITY};
use crate::novelty::NoveltyArchive;
use crate::rgd::{DepthPolicy, HeuristicContext};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum HeuristicKind {
    /// Breadth-first order (every key equal, FIFO).
    Blind,
    Rgd,
    /// Novelty first, then RGD.
    NoveltyRgd,
}

impl HeuristicKind {
    pub fn name(self) -> &'static str {
        match self {
            HeuristicKind::Blind => "blind",
            HeuristicKind::Rgd => "rgd",
            HeuristicKind::NoveltyRgd => "novelty-rgd",
        }
    }
}

impl fmt::Display for HeuristicKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for HeuristicKind {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "blind" => Ok(HeuristicKind::Blind),
            "rgd" => Ok(HeuristicKind::Rgd),
            "novelty-rgd" | "novelty_rgd" => Ok(HeuristicKind::NoveltyRgd),
            other => Err(format!("unknown heuristic {other:?}")),
        }
    }
}

/// Resource limits. `None` means unlimited.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Limits {
    pub time: Option<Duration>,
    /// Bytes. Enforced as a node-count watermark.
    pub memory: Option<u64>,
}

impl Limits {
    pub fn new(time: Option<Duration>, memory: Option<u64>) -> Self {
        Self { time, memory }
    }

    fn node_budget(&self, num_objects: usize) -> u64 {
        match self.memory {
            Some(bytes) => (bytes / node_bytes(num_objects)).max(1),
            None => u64::MAX,
        }
    }
}

/// Rough per-node footprint: the state is stored in the node table and in
/// the duplicate set, plus the node record and its open-list entry.
pub fn node_bytes(num_objects: usize) -> u64 {
    let state = 16 + 8 * num_objects as u64;
    2 * state + 24 + 32
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SearchConfig {
    pub heuristic: HeuristicKind,
    pub limits: Limits,
    pub depth_policy: DepthPolicy,
    /// Keep the priority key of every expanded node in the result.
    pub log_expansions: bool,
}

impl SearchConfig {
    pub fn new(heuristic: HeuristicKind) -> Self {
        Self {
            heuristic,
            limits: Limits::default(),
            depth_policy: DepthPolicy::Incremental,
            log_expansions: false,
        }
    }

    pub fn with_limits(mut self, limits: Limits) -> Self {
        self.limits = limits;
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Status {
    Solved,
    Exhausted,
    TimeLimit,
    MemoryLimit,
}

impl Status {
    pub fn name(self) -> &'static str {
        match self {
            Status::Solved => "solved",
            Status::Exhausted => "exhausted",
            Status::TimeLimit => "time_limit",
            Status::MemoryLimit => "memory_limit",
        }
    }
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SearchStats {
    pub generated: u64,
    pub expanded: u64,
    pub peak_open: u64,
    pub heuristic_evals: u64,
    pub elapsed: Duration,
}

impl SearchStats {
    pub fn peak_memory_estimate(&self, num_objects: usize) -> u64 {
        self.generated.saturating_add(1) * node_bytes(num_objects)
    }
}

/// Priority of a node: novelty, heuristic, generation order.
pub type PriorityKey = (u8, Cost, u64);

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PlanResult {
    pub status: Status,
    pub actions: Vec<Direction>,
    pub stats: SearchStats,
    /// Keys of expanded nodes in expansion order, when requested.
    pub expansion_log: Vec<PriorityKey>,
}

impl PlanResult {
    pub fn solved(&self) -> bool {
        self.status == Status::Solved
    }
}

const NO_PARENT: u32 = u32::MAX;

struct Node {
    state: State,
    parent: u32,
    action: Option<Direction>,
}

fn extract_plan(nodes: &[Node], mut index: u32) -> Vec<Direction> {
    let mut plan = Vec::new();
    while index != NO_PARENT {
        let node = &nodes[index as usize];
        if let Some(a) = node.action {
            plan.push(a);
        }
        index = node.parent;
    }
    plan.reverse();
    plan
}

struct Evaluator {
    kind: HeuristicKind,
    rgd: Option<HeuristicContext>,
    novelty: Option<NoveltyArchive>,
}

impl Evaluator {
    fn new(puzzle: &Puzzle, config: &SearchConfig) -> Self {
        let rgd = matches!(config.heuristic, HeuristicKind::Rgd | HeuristicKind::NoveltyRgd)
            .then(|| HeuristicContext::with_policy(puzzle, config.depth_policy));
        let novelty = (config.heuristic == HeuristicKind::NoveltyRgd)
            .then(|| NoveltyArchive::new(puzzle.width(), puzzle.height()));
        Self {
            kind: config.heuristic,
            rgd,
            novelty,
        }
    }

    fn key(&mut self, state: &State, seq: u64) -> PriorityKey {
        let w = self.novelty.as_mut().map_or(0, |a| a.evaluate(state));
        let h = self.rgd.as_mut().map_or(0, |ctx| ctx.estimate(state));
        if h == INFINITY {
            // enqueued last rather than pruned, so the search stays complete
            (u8::MAX, INFINITY, seq)
        } else {
            (w, h, seq)
        }
    }

    fn evaluations(&self) -> u64 {
        match self.kind {
            HeuristicKind::Blind => 0,
            _ => self.rgd.as_ref().map_or(0, |c| c.evaluations()),
        }
    }
}

/// Greedy best-first search ordered by `(novelty, h, FIFO)`. Successors are
/// evaluated and goal-tested when generated; duplicates are dropped on
/// generation so no state is expanded twice.
pub fn gbf_search(puzzle: &Puzzle, initial: &State, config: &SearchConfig) -> PlanResult {
    let start = Instant::now();
    let mut stats = SearchStats::default();
    let mut log = Vec::new();
    let finish = |status, actions, mut stats: SearchStats, log, eval: &Evaluator| {
        stats.elapsed = start.elapsed();
        stats.heuristic_evals = eval.evaluations();
        PlanResult {
            status,
            actions,
            stats,
            expansion_log: log,
        }
    };

    let mut eval = Evaluator::new(puzzle, config);
    if is_goal(puzzle, initial) {
        return finish(Status::Solved, Vec::new(), stats, log, &eval);
    }
    let budget = config.limits.node_budget(puzzle.num_objects());

    let mut nodes = vec![Node {
        state: initial.clone(),
        parent: NO_PARENT,
        action: None,
    }];
    let mut seen: FxHashSet<State> = FxHashSet::default();
    seen.insert(initial.clone());
    let mut open: BinaryHeap<Reverse<(PriorityKey, u32)>> = BinaryHeap::new();
    let mut seq = 0u64;
    open.push(Reverse((eval.key(initial, seq), 0)));
    stats.peak_open = 1;

    while let Some(Reverse((key, index))) = open.pop() {
        stats.expanded += 1;
        if config.log_expansions {
            log.push(key);
        }
        let current = nodes[index as usize].state.clone();
        for dir in Direction::ALL {
            let Some(next) = try_apply(puzzle, &current, dir) else {
                continue;
            };
            if seen.contains(&next) {
                continue;
            }
            stats.generated += 1;
            seen.insert(next.clone());
            let child = nodes.len() as u32;
            let goal = is_goal(puzzle, &next);
            nodes.push(Node {
                state: next,
                parent: index,
                action: Some(dir),
            });
            if goal {
                let plan = extract_plan(&nodes, child);
                return finish(Status::Solved, plan, stats, log, &eval);
            }
            seq += 1;
            let key = eval.key(&nodes[child as usize].state, seq);
            open.push(Reverse((key, child)));
        }
        stats.peak_open = stats.peak_open.max(open.len() as u64);
        if nodes.len() as u64 >= budget {
            return finish(Status::MemoryLimit, Vec::new(), stats, log, &eval);
        }
        if let Some(limit) = config.limits.time {
            if start.elapsed() >= limit {
                return finish(Status::TimeLimit, Vec::new(), stats, log, &eval);
            }
        }
    }
    finish(Status::Exhausted, Vec::new(), stats, log, &eval)
}

/// Shortest plan by breadth-first search over full states.
pub fn optimal_plan_bfs(puzzle: &Puzzle, initial: &State, limits: &Limits) -> PlanResult {
    let start = Instant::now();
    let mut stats = SearchStats::default();
    let done = |status, actions, mut stats: SearchStats| {
        stats.elapsed = start.elapsed();
        PlanResult {
            status,
            actions,
            stats,
            expansion_log: Vec::new(),
        }
    };
    if is_goal(puzzle, initial) {
        return done(Status::Solved, Vec::new(), stats);
    }
    let budget = limits.node_budget(puzzle.num_objects());
    let mut nodes = vec![Node {
        state: initial.clone(),
        parent: NO_PARENT,
        action: None,
    }];
    let mut seen: FxHashSet<State> = FxHashSet::default();
    seen.insert(initial.clone());
    let mut queue = VecDeque::from([0u32]);
    while let Some(index) = queue.pop_front() {
        stats.expanded += 1;
        let current = nodes[index as usize].state.clone();
        for dir in Direction::ALL {
            let Some(next) = try_apply(puzzle, &current, dir) else {
                continue;
            };
            if !seen.insert(next.clone()) {
                continue;
            }
            stats.generated += 1;
            let child = nodes.len() as u32;
            let goal = is_goal(puzzle, &next);
            nodes.push(Node {
                state: next,
                parent: index,
                action: Some(dir),
            });
            if goal {
                let plan = extract_plan(&nodes, child);
                return done(Status::Solved, plan, stats);
            }
            queue.push_back(child);
        }
        stats.peak_open = stats.peak_open.max(queue.len() as u64);
        if nodes.len() as u64 >= budget {
            return done(Status::MemoryLimit, Vec::new(), stats);
        }
        if let Some(limit) = limits.time {
            if stats.expanded % 256 == 0 && start.elapsed() >= limit {
                return done(Status::TimeLimit, Vec::new(), stats);
            }
        }
    }
    done(Status::Exhausted, Vec::new(), stats)
}

/// Every state reachable from `initial`, in breadth-first order, or `None`
/// if there are more than `max_states`.
pub fn reachable_states(puzzle: &Puzzle, initial: &State, max_states: usize) -> Option<Vec<State>> {
    let mut seen: FxHashSet<State> = FxHashSet::default();
    seen.insert(initial.clone());
    let mut order = vec![initial.clone()];
    let mut head = 0;
    while head < order.len() {
        let current = order[head].clone();
        head += 1;
        for dir in Direction::ALL {
            if let Some(next) = try_apply(puzzle, &current, dir) {
                if seen.insert(next.clone()) {
                    if order.len() >= max_states {
                        return None;
                    }
                    order.push(next);
                }
            }
        }
    }
    Some(order)
}

/// Final state after replaying `actions`.
pub fn replay(puzzle: &Puzzle, initial: &State, actions: &[Direction]) -> State {
    actions
        .iter()
        .fold(initial.clone(), |s, &a| apply_action(puzzle, &s, a))
}

pub fn validate_plan(puzzle: &Puzzle, initial: &State, actions: &[Direction]) -> bool {
    is_goal(puzzle, &replay(puzzle, initial, actions))
}
