//! Puzzle representation and exact push physics.
//!
//! Coordinates are 0-based with x growing rightward and y growing downward.
//! Everything outside `[0, width) x [0, height)` behaves as a wall. Objects
//! are rigid shapes addressed by an anchor: the row-major minimum occupied
//! cell, so offset `(0, 0)` is always part of a non-empty shape.

use std::fmt;
use std::ops::{Add, Neg, Sub};

use thiserror::Error;

/// Index of the agent in [`Puzzle::objects`] and [`State::positions`].
pub const AGENT: usize = 0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Position {
    pub x: i32,
    pub y: i32,
}

impl Position {
    pub const fn new(x: i32, y: i32) -> Self {
        Self { x, y }
    }

    /// Row-major ordering key, `(y, x)`.
    pub fn row_major(self) -> (i32, i32) {
        (self.y, self.x)
    }
}

impl Add for Position {
    type Output = Position;
    fn add(self, rhs: Position) -> Position {
        Position::new(self.x + rhs.x, self.y + rhs.y)
    }
}

impl Sub for Position {
    type Output = Position;
    fn sub(self, rhs: Position) -> Position {
        Position::new(self.x - rhs.x, self.y - rhs.y)
    }
}

impl Neg for Position {
    type Output = Position;
    fn neg(self) -> Position {
        Position::new(-self.x, -self.y)
    }
}

impl fmt::Display for Position {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{},{}", self.x, self.y)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Direction {
    Left,
    Right,
    Up,
    Down,
}

impl Direction {
    /// Fixed iteration order used everywhere a deterministic order matters.
    pub const ALL: [Direction; 4] = [
        Direction::Left,
        Direction::Right,
        Direction::Up,
        Direction::Down,
    ];

    pub fn offset(self) -> Position {
        match self {
            Direction::Left => Position::new(-1, 0),
            Direction::Right => Position::new(1, 0),
            Direction::Up => Position::new(0, -1),
            Direction::Down => Position::new(0, 1),
        }
    }

    pub fn from_offset(offset: Position) -> Option<Direction> {
        Direction::ALL.into_iter().find(|d| d.offset() == offset)
    }

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn opposite(self) -> Direction {
        match self {
            Direction::Left => Direction::Right,
            Direction::Right => Direction::Left,
            Direction::Up => Direction::Down,
            Direction::Down => Direction::Up,
        }
    }

    pub fn letter(self) -> char {
        match self {
            Direction::Left => 'L',
            Direction::Right => 'R',
            Direction::Up => 'U',
            Direction::Down => 'D',
        }
    }

    pub fn from_letter(c: char) -> Option<Direction> {
        match c.to_ascii_uppercase() {
            'L' => Some(Direction::Left),
            'R' => Some(Direction::Right),
            'U' => Some(Direction::Up),
            'D' => Some(Direction::Down),
            _ => None,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Direction::Left => "left",
            Direction::Right => "right",
            Direction::Up => "up",
            Direction::Down => "down",
        }
    }
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.letter())
    }
}

/// Occupied cells of an object relative to its anchor.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Shape {
    // sorted row-major, deduplicated, first element (0,0) unless empty
    cells: Vec<Position>,
}

impl Shape {
    /// Builds a shape from absolute cells and returns it with the anchor
    /// those cells imply. An empty input yields an empty shape anchored at
    /// the origin.
    pub fn from_absolute<I: IntoIterator<Item = Position>>(cells: I) -> (Shape, Position) {
        let mut cells: Vec<Position> = cells.into_iter().collect();
        cells.sort_by_key(|c| c.row_major());
        cells.dedup();
        let anchor = cells.first().copied().unwrap_or_default();
        for c in &mut cells {
            *c = *c - anchor;
        }
        (Shape { cells }, anchor)
    }

    /// Builds a shape from offsets, re-anchoring if the offsets do not
    /// already have their row-major minimum at the origin.
    pub fn from_offsets<I: IntoIterator<Item = Position>>(offsets: I) -> Shape {
        Shape::from_absolute(offsets).0
    }

    /// A single cell.
    pub fn unit() -> Shape {
        Shape {
            cells: vec![Position::new(0, 0)],
        }
    }

    /// Solid `width x height` rectangle.
    pub fn rect(width: i32, height: i32) -> Shape {
        Shape::from_offsets(
            (0..height).flat_map(|y| (0..width).map(move |x| Position::new(x, y))),
        )
    }

    pub fn cells(&self) -> &[Position] {
        &self.cells
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn contains(&self, offset: Position) -> bool {
        self.cells
            .binary_search_by_key(&offset.row_major(), |c| c.row_major())
            .is_ok()
    }

    /// Absolute cells when anchored at `anchor`.
    pub fn cells_at(&self, anchor: Position) -> impl Iterator<Item = Position> + '_ {
        self.cells.iter().map(move |&c| c + anchor)
    }

    /// Cells entered when the shape translates one step in `dir`:
    /// `Z(p + u) \ Z(p)`, as offsets from the pre-move anchor.
    pub fn front(&self, dir: Direction) -> Vec<Position> {
        let u = dir.offset();
        self.cells
            .iter()
            .map(|&c| c + u)
            .filter(|&c| !self.contains(c))
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Object {
    pub id: String,
    pub shape: Shape,
}

impl Object {
    pub fn new(id: impl Into<String>, shape: Shape) -> Self {
        Self {
            id: id.into(),
            shape,
        }
    }
}

/// Immutable world description. Object 0 is the agent.
#[derive(Debug, Clone)]
pub struct Puzzle {
    name: String,
    width: i32,
    height: i32,
    walls: Vec<Position>,
    agent_walls: Vec<Position>,
    objects: Vec<Object>,
    goal: Vec<(usize, Position)>,
    wall_grid: Vec<bool>,
    agent_wall_grid: Vec<bool>,
    // fronts[object][direction]
    fronts: Vec<[Vec<Position>; 4]>,
}

impl PartialEq for Puzzle {
    fn eq(&self, other: &Self) -> bool {
        self.name == other.name
            && self.width == other.width
            && self.height == other.height
            && self.walls == other.walls
            && self.agent_walls == other.agent_walls
            && self.objects == other.objects
            && self.goal == other.goal
    }
}

impl Eq for Puzzle {}

fn canonical_cells<I: IntoIterator<Item = Position>>(cells: I) -> Vec<Position> {
    let mut v: Vec<Position> = cells.into_iter().collect();
    v.sort_by_key(|c| c.row_major());
    v.dedup();
    v
}

impl Puzzle {
    /// Assembles a puzzle. No validation happens here; see [`validate_puzzle`].
    /// Goals are stored sorted by object index; a later goal for the same
    /// object replaces an earlier one.
    pub fn new(
        name: impl Into<String>,
        width: i32,
        height: i32,
        walls: impl IntoIterator<Item = Position>,
        agent_walls: impl IntoIterator<Item = Position>,
        objects: Vec<Object>,
        goal: impl IntoIterator<Item = (usize, Position)>,
    ) -> Puzzle {
        let walls = canonical_cells(walls);
        let agent_walls = canonical_cells(agent_walls);
        let mut goal_map = std::collections::BTreeMap::new();
        for (o, p) in goal {
            goal_map.insert(o, p);
        }
        let size = (width.max(0) * height.max(0)) as usize;
        let mut wall_grid = vec![false; size];
        let mut agent_wall_grid = vec![false; size];
        let in_bounds = |c: &Position| c.x >= 0 && c.y >= 0 && c.x < width && c.y < height;
        for c in walls.iter().filter(|c| in_bounds(c)) {
            wall_grid[(c.y * width + c.x) as usize] = true;
        }
        for c in agent_walls.iter().filter(|c| in_bounds(c)) {
            agent_wall_grid[(c.y * width + c.x) as usize] = true;
        }
        let fronts = objects
            .iter()
            .map(|o| Direction::ALL.map(|d| o.shape.front(d)))
            .collect();
        Puzzle {
            name: name.into(),
            width,
            height,
            walls,
            agent_walls,
            objects,
            goal: goal_map.into_iter().collect(),
            wall_grid,
            agent_wall_grid,
            fronts,
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Puzzle {
        self.name = name.into();
        self
    }

    pub fn width(&self) -> i32 {
        self.width
    }

    pub fn height(&self) -> i32 {
        self.height
    }

    pub fn walls(&self) -> &[Position] {
        &self.walls
    }

    pub fn agent_walls(&self) -> &[Position] {
        &self.agent_walls
    }

    pub fn objects(&self) -> &[Object] {
        &self.objects
    }

    pub fn num_objects(&self) -> usize {
        self.objects.len()
    }

    pub fn shape(&self, object: usize) -> &Shape {
        &self.objects[object].shape
    }

    pub fn object_index(&self, id: &str) -> Option<usize> {
        self.objects.iter().position(|o| o.id == id)
    }

    /// Goal anchors, sorted by object index.
    pub fn goal(&self) -> &[(usize, Position)] {
        &self.goal
    }

    pub fn goal_of(&self, object: usize) -> Option<Position> {
        self.goal
            .iter()
            .find(|(o, _)| *o == object)
            .map(|&(_, p)| p)
    }

    pub fn in_bounds(&self, cell: Position) -> bool {
        cell.x >= 0 && cell.y >= 0 && cell.x < self.width && cell.y < self.height
    }

    fn cell_index(&self, cell: Position) -> usize {
        (cell.y * self.width + cell.x) as usize
    }

    /// True for explicit walls and everything out of bounds.
    pub fn is_wall(&self, cell: Position) -> bool {
        !self.in_bounds(cell) || self.wall_grid[self.cell_index(cell)]
    }

    pub fn is_agent_wall(&self, cell: Position) -> bool {
        self.in_bounds(cell) && self.agent_wall_grid[self.cell_index(cell)]
    }

    /// Whether `cell` stops `object`: walls for everyone, agent walls for
    /// the agent only.
    pub fn blocks(&self, object: usize, cell: Position) -> bool {
        self.is_wall(cell) || (object == AGENT && self.is_agent_wall(cell))
    }

    /// Whether `object` anchored at `anchor` avoids every wall it respects.
    pub fn fits(&self, object: usize, anchor: Position) -> bool {
        self.objects[object]
            .shape
            .cells_at(anchor)
            .all(|c| !self.blocks(object, c))
    }

    pub(crate) fn front(&self, object: usize, dir: Direction) -> &[Position] {
        &self.fronts[object][dir.index()]
    }
}

/// Anchor positions of every object, index-aligned with [`Puzzle::objects`].
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct State {
    positions: Box<[Position]>,
}

impl State {
    pub fn new(positions: Vec<Position>) -> State {
        State {
            positions: positions.into_boxed_slice(),
        }
    }

    pub fn positions(&self) -> &[Position] {
        &self.positions
    }

    pub fn position(&self, object: usize) -> Position {
        self.positions[object]
    }

    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    pub fn agent(&self) -> Position {
        self.positions[AGENT]
    }
}

/// Objects set in motion by one action.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PushSet {
    /// Moving objects, ascending. Always contains the agent.
    pub objects: Vec<usize>,
    /// Some member would enter a wall (the wall sentinel is in the set).
    pub blocked: bool,
}

fn overlaps_at(shape: &Shape, anchor: Position, cell: Position) -> bool {
    shape.contains(cell - anchor)
}

/// Contact closure: `stop_on_block` returns as soon as a wall is hit.
fn propagate(
    puzzle: &Puzzle,
    state: &State,
    dir: Direction,
    stop_on_block: bool,
) -> (Vec<bool>, bool) {
    let n = puzzle.num_objects();
    let mut moving = vec![false; n];
    let mut stack = vec![AGENT];
    moving[AGENT] = true;
    let mut blocked = false;
    while let Some(m) = stack.pop() {
        let pm = state.positions[m];
        for &off in puzzle.front(m, dir) {
            let cell = pm + off;
            if puzzle.blocks(m, cell) {
                blocked = true;
                if stop_on_block {
                    return (moving, true);
                }
                continue;
            }
            for j in 0..n {
                if !moving[j] && overlaps_at(puzzle.shape(j), state.positions[j], cell) {
                    moving[j] = true;
                    stack.push(j);
                }
            }
        }
    }
    (moving, blocked)
}

/// The set of objects an action pushes, and whether a wall stops them.
pub fn push_set(puzzle: &Puzzle, state: &State, action: Direction) -> PushSet {
    let (moving, blocked) = propagate(puzzle, state, action, false);
    PushSet {
        objects: moving
            .iter()
            .enumerate()
            .filter_map(|(i, &m)| m.then_some(i))
            .collect(),
        blocked,
    }
}

/// Applies an action. Returns `None` when the push is blocked (the state
/// would be unchanged).
pub fn try_apply(puzzle: &Puzzle, state: &State, action: Direction) -> Option<State> {
    let (moving, blocked) = propagate(puzzle, state, action, true);
    if blocked {
        return None;
    }
    let u = action.offset();
    let positions = state
        .positions
        .iter()
        .zip(&moving)
        .map(|(&p, &m)| if m { p + u } else { p })
        .collect();
    Some(State::new(positions))
}

/// Deterministic transition function. Blocked pushes leave the state as is.
pub fn apply_action(puzzle: &Puzzle, state: &State, action: Direction) -> State {
    try_apply(puzzle, state, action).unwrap_or_else(|| state.clone())
}

pub fn is_goal(puzzle: &Puzzle, state: &State) -> bool {
    puzzle
        .goal
        .iter()
        .all(|&(o, g)| state.positions.get(o) == Some(&g))
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Violation {
    #[error("puzzle has no objects (an agent is required)")]
    NoAgent,
    #[error("grid size {width}x{height} is not positive")]
    BadSize { width: i32, height: i32 },
    #[error("state has {found} positions but the puzzle has {expected} objects")]
    StateSizeMismatch { expected: usize, found: usize },
    #[error("object {object} has an empty shape")]
    EmptyShape { object: String },
    #[error("wall cell {cell} is out of bounds")]
    WallOutOfBounds { cell: Position },
    #[error("object {object} occupies out-of-bounds cell {cell}")]
    OutOfBounds { object: String, cell: Position },
    #[error("object {object} overlaps a wall at {cell}")]
    InWall { object: String, cell: Position },
    #[error("objects {first} and {second} overlap at {cell}")]
    Overlap {
        first: String,
        second: String,
        cell: Position,
    },
    #[error("puzzle has no goal")]
    NoGoal,
    #[error("goal references unknown object index {object}")]
    UnknownGoalObject { object: usize },
    #[error("goal for {object} places a cell out of bounds at {cell}")]
    GoalOutOfBounds { object: String, cell: Position },
    #[error("goal for {object} places a cell inside a wall at {cell}")]
    GoalInWall { object: String, cell: Position },
}

impl Violation {
    /// Short machine-readable category.
    pub fn kind(&self) -> &'static str {
        match self {
            Violation::NoAgent => "no-agent",
            Violation::BadSize { .. } => "bad-size",
            Violation::StateSizeMismatch { .. } => "state-size",
            Violation::EmptyShape { .. } => "empty-shape",
            Violation::WallOutOfBounds { .. } => "wall-out-of-bounds",
            Violation::OutOfBounds { .. } => "out-of-bounds",
            Violation::InWall { .. } => "in-wall",
            Violation::Overlap { .. } => "overlap",
            Violation::NoGoal => "no-goal",
            Violation::UnknownGoalObject { .. } => "unknown-goal-object",
            Violation::GoalOutOfBounds { .. } => "goal-out-of-bounds",
            Violation::GoalInWall { .. } => "goal-in-wall",
        }
    }
}

/// Checks every puzzle and state invariant, collecting all violations.
pub fn validate_puzzle(puzzle: &Puzzle, initial: &State) -> Result<(), Vec<Violation>> {
    let mut out = Vec::new();
    if puzzle.width <= 0 || puzzle.height <= 0 {
        out.push(Violation::BadSize {
            width: puzzle.width,
            height: puzzle.height,
        });
        return Err(out);
    }
    if puzzle.objects.is_empty() {
        out.push(Violation::NoAgent);
    }
    if initial.len() != puzzle.num_objects() {
        out.push(Violation::StateSizeMismatch {
            expected: puzzle.num_objects(),
            found: initial.len(),
        });
        return Err(out);
    }
    for &c in puzzle.walls.iter().chain(&puzzle.agent_walls) {
        if !puzzle.in_bounds(c) {
            out.push(Violation::WallOutOfBounds { cell: c });
        }
    }

    let mut owner: Vec<Option<usize>> = vec![None; (puzzle.width * puzzle.height) as usize];
    for (i, obj) in puzzle.objects.iter().enumerate() {
        if obj.shape.is_empty() {
            out.push(Violation::EmptyShape {
                object: obj.id.clone(),
            });
            continue;
        }
        for c in obj.shape.cells_at(initial.position(i)) {
            if !puzzle.in_bounds(c) {
                out.push(Violation::OutOfBounds {
                    object: obj.id.clone(),
                    cell: c,
                });
                continue;
            }
            if puzzle.blocks(i, c) {
                out.push(Violation::InWall {
                    object: obj.id.clone(),
                    cell: c,
                });
            }
            let slot = &mut owner[puzzle.cell_index(c)];
            match *slot {
                Some(j) => out.push(Violation::Overlap {
                    first: puzzle.objects[j].id.clone(),
                    second: obj.id.clone(),
                    cell: c,
                }),
                None => *slot = Some(i),
            }
        }
    }

    if puzzle.goal.is_empty() {
        out.push(Violation::NoGoal);
    }
    for &(o, g) in &puzzle.goal {
        let Some(obj) = puzzle.objects.get(o) else {
            out.push(Violation::UnknownGoalObject { object: o });
            continue;
        };
        for c in obj.shape.cells_at(g) {
            if !puzzle.in_bounds(c) {
                out.push(Violation::GoalOutOfBounds {
                    object: obj.id.clone(),
                    cell: c,
                });
            } else if puzzle.blocks(o, c) {
                out.push(Violation::GoalInWall {
                    object: obj.id.clone(),
                    cell: c,
                });
            }
        }
    }

    if out.is_empty() {
        Ok(())
    } else {
        Err(out)
    }
}
