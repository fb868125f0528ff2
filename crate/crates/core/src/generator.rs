//! Level-0 puzzle generation, symmetry augmentation and the corridor
//! scaling family.

use std::fmt;
use std::fs;
use std::io;
use std::path::Path;
use std::str::FromStr;
use std::time::Duration;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::io::serialize_puzzle;
use crate::motion::{MovementGraph, PushingPositionMemo};
use crate::model::{is_goal, AGENT, validate_puzzle, Direction, Object, Position, Puzzle, Shape, State};
use crate::search::{gbf_search, optimal_plan_bfs, HeuristicKind, Limits, SearchConfig, Status};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Variant {
    Base,
    Larger,
    MoreWalls,
    MoreObstacles,
    MoreShapes,
    MultipleGoals,
    All,
    Corridor,
}

impl Variant {
    pub const ALL: [Variant; 8] = [
        Variant::Base,
        Variant::Larger,
        Variant::MoreWalls,
        Variant::MoreObstacles,
        Variant::MoreShapes,
        Variant::MultipleGoals,
        Variant::All,
        Variant::Corridor,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Variant::Base => "base",
            Variant::Larger => "larger",
            Variant::MoreWalls => "more_walls",
            Variant::MoreObstacles => "more_obstacles",
            Variant::MoreShapes => "more_shapes",
            Variant::MultipleGoals => "multiple_goals",
            Variant::All => "all",
            Variant::Corridor => "corridor",
        }
    }

    /// Sampling ranges, inclusive.
    pub fn params(self) -> VariantParams {
        let base = VariantParams {
            width: (5, 5),
            height: (5, 5),
            walls: (3, 3),
            obstacles: (1, 1),
            goal_objects: (1, 1),
            polyominoes: false,
        };
        match self {
            Variant::Base | Variant::Corridor => base,
            Variant::Larger => VariantParams {
                width: (5, 10),
                height: (5, 10),
                ..base
            },
            Variant::MoreWalls => VariantParams {
                walls: (3, 5),
                ..base
            },
            Variant::MoreObstacles => VariantParams {
                obstacles: (2, 2),
                ..base
            },
            Variant::MoreShapes => VariantParams {
                polyominoes: true,
                ..base
            },
            Variant::MultipleGoals => VariantParams {
                goal_objects: (2, 2),
                ..base
            },
            Variant::All => VariantParams {
                width: (5, 10),
                height: (5, 10),
                walls: (3, 5),
                obstacles: (1, 2),
                goal_objects: (1, 2),
                polyominoes: true,
            },
        }
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Variant {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let key = s.replace('-', "_");
        Variant::ALL
            .into_iter()
            .find(|v| v.name() == key)
            .ok_or_else(|| format!("unknown variant {s:?}"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct VariantParams {
    pub width: (i32, i32),
    pub height: (i32, i32),
    pub walls: (usize, usize),
    pub obstacles: (usize, usize),
    pub goal_objects: (usize, usize),
    /// Agent, goal objects and obstacles get random 1-3 cell polyominoes;
    /// otherwise everything is 1x1 (except the second goal object, 1x2).
    pub polyominoes: bool,
}

/// Solvability check applied to every generated puzzle.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Certification {
    pub planner_time: Duration,
    pub oracle_time: Duration,
    pub memory: u64,
    /// Rejected draws tolerated per requested instance.
    pub max_rejections: usize,
}

impl Default for Certification {
    fn default() -> Self {
        Self {
            planner_time: Duration::from_secs(5),
            oracle_time: Duration::from_secs(30),
            memory: 1 << 30,
            max_rejections: 1000,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct VariantSpec {
    pub variant: Variant,
    pub seed: u64,
    pub certification: Certification,
}

impl VariantSpec {
    pub fn new(variant: Variant, seed: u64) -> Self {
        Self {
            variant,
            seed,
            certification: Certification::default(),
        }
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GenerateError {
    #[error("instance {index}: no solvable puzzle after {attempts} draws")]
    GaveUp { index: usize, attempts: usize },
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum AugmentError {
    #[error("puzzle {name:?} is {width}x{height}, larger than the {target_width}x{target_height} target in some orientation")]
    TargetTooSmall {
        name: String,
        width: i32,
        height: i32,
        target_width: i32,
        target_height: i32,
    },
}

/// Free polyominoes with up to three cells, grouped by size.
fn free_polyominoes(cells: usize) -> Vec<Shape> {
    let p = Position::new;
    match cells {
        1 => vec![Shape::unit()],
        2 => vec![Shape::rect(2, 1)],
        3 => vec![
            Shape::rect(3, 1),
            Shape::from_offsets([p(0, 0), p(0, 1), p(1, 1)]),
        ],
        _ => Vec::new(),
    }
}

/// Uniform size in 1..=3, uniform free polyomino of that size, then one of
/// the eight symmetries.
pub fn random_polyomino<R: Rng>(rng: &mut R) -> Shape {
    let size = rng.gen_range(1..=3);
    let shapes = free_polyominoes(size);
    let shape = shapes.choose(rng).expect("sizes 1-3 exist");
    let sym = Symmetry(rng.gen_range(0..8));
    sym.shape(shape)
}

/// One of the eight symmetries of the square: four rotations, each
/// optionally preceded by a horizontal flip.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Symmetry(pub u8);

impl Symmetry {
    pub const ALL: [Symmetry; 8] = [
        Symmetry(0),
        Symmetry(1),
        Symmetry(2),
        Symmetry(3),
        Symmetry(4),
        Symmetry(5),
        Symmetry(6),
        Symmetry(7),
    ];

    fn swaps_axes(self) -> bool {
        self.0 % 2 == 1
    }

    /// Grid size after the transform.
    pub fn dims(self, width: i32, height: i32) -> (i32, i32) {
        if self.swaps_axes() {
            (height, width)
        } else {
            (width, height)
        }
    }

    /// Maps a cell of a `width x height` grid.
    pub fn cell(self, c: Position, width: i32, height: i32) -> Position {
        let (mut x, mut y, mut w, mut h) = (c.x, c.y, width, height);
        if self.0 >= 4 {
            x = w - 1 - x;
        }
        for _ in 0..self.0 % 4 {
            // quarter turn clockwise
            (x, y) = (h - 1 - y, x);
            (w, h) = (h, w);
        }
        Position::new(x, y)
    }

    pub fn direction(self, d: Direction) -> Direction {
        let origin = self.cell(Position::new(1, 1), 3, 3);
        let moved = self.cell(Position::new(1, 1) + d.offset(), 3, 3);
        Direction::from_offset(moved - origin).expect("unit offsets map to unit offsets")
    }

    fn shape(self, shape: &Shape) -> Shape {
        // any grid large enough works; only relative offsets matter
        Shape::from_absolute(shape.cells().iter().map(|&c| self.cell(c, 8, 8))).0
    }

    fn placed(self, shape: &Shape, anchor: Position, w: i32, h: i32) -> (Shape, Position) {
        Shape::from_absolute(shape.cells_at(anchor).map(|c| self.cell(c, w, h)))
    }

    /// Transformed puzzle and state.
    pub fn apply(self, puzzle: &Puzzle, state: &State) -> (Puzzle, State) {
        let (w, h) = (puzzle.width(), puzzle.height());
        let (nw, nh) = self.dims(w, h);
        let map = |c: &Position| self.cell(*c, w, h);
        let mut objects = Vec::new();
        let mut positions = Vec::new();
        for (i, o) in puzzle.objects().iter().enumerate() {
            let (shape, anchor) = self.placed(&o.shape, state.position(i), w, h);
            objects.push(Object::new(o.id.clone(), shape));
            positions.push(anchor);
        }
        let goal = puzzle
            .goal()
            .iter()
            .map(|&(o, g)| (o, self.placed(puzzle.shape(o), g, w, h).1));
        let out = Puzzle::new(
            puzzle.name(),
            nw,
            nh,
            puzzle.walls().iter().map(map),
            puzzle.agent_walls().iter().map(map),
            objects,
            goal,
        );
        (out, State::new(positions))
    }
}

/// Puzzle shifted by `offset` inside a `width x height` grid whose extra
/// cells are walls.
pub fn pad(puzzle: &Puzzle, state: &State, width: i32, height: i32, offset: Position) -> (Puzzle, State) {
    let inside = |c: Position| {
        let r = c - offset;
        r.x >= 0 && r.y >= 0 && r.x < puzzle.width() && r.y < puzzle.height()
    };
    let border = (0..height)
        .flat_map(|y| (0..width).map(move |x| Position::new(x, y)))
        .filter(|&c| !inside(c));
    let walls: Vec<Position> = puzzle.walls().iter().map(|&c| c + offset).chain(border).collect();
    let out = Puzzle::new(
        puzzle.name(),
        width,
        height,
        walls,
        puzzle.agent_walls().iter().map(|&c| c + offset),
        puzzle.objects().to_vec(),
        puzzle.goal().iter().map(|&(o, g)| (o, g + offset)),
    );
    let positions = state.positions().iter().map(|&p| p + offset).collect();
    (out, State::new(positions))
}

/// All eight symmetry images of every input, each padded to the target
/// size at a random offset. Output order: input-major, symmetry-minor.
pub fn augment(
    puzzles: &[(Puzzle, State)],
    target_width: i32,
    target_height: i32,
    seed: u64,
) -> Result<Vec<(Puzzle, State)>, AugmentError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(puzzles.len() * 8);
    for (puzzle, state) in puzzles {
        let side = puzzle.width().max(puzzle.height());
        if side > target_width || side > target_height {
            return Err(AugmentError::TargetTooSmall {
                name: puzzle.name().to_string(),
                width: puzzle.width(),
                height: puzzle.height(),
                target_width,
                target_height,
            });
        }
        for sym in Symmetry::ALL {
            let (p, s) = sym.apply(puzzle, state);
            let offset = Position::new(
                rng.gen_range(0..=target_width - p.width()),
                rng.gen_range(0..=target_height - p.height()),
            );
            let (p, s) = pad(&p, &s, target_width, target_height, offset);
            let name = format!("{}_s{}", puzzle.name(), sym.0);
            out.push((p.with_name(name), s));
        }
    }
    Ok(out)
}

/// Open `n x n` room. The agent starts in the top-left corner, the object
/// one cell in from the bottom-right corner, and its goal one cell in from
/// the bottom-left corner.
pub fn corridor_puzzle(n: i32) -> (Puzzle, State) {
    assert!(n >= 4, "corridor puzzles need n >= 4");
    let objects = vec![Object::new("A", Shape::unit()), Object::new("R", Shape::unit())];
    let puzzle = Puzzle::new(
        format!("corridor_{n}"),
        n,
        n,
        [],
        [],
        objects,
        [(1, Position::new(1, n - 2))],
    );
    let state = State::new(vec![Position::new(0, 0), Position::new(n - 2, n - 2)]);
    (puzzle, state)
}

fn uniform<R: Rng>(rng: &mut R, (lo, hi): (usize, usize)) -> usize {
    rng.gen_range(lo..=hi)
}

/// One random draw for `variant`, before any solvability check. Returns
/// `None` when the objects or goals cannot be placed.
pub fn sample_candidate<R: Rng>(variant: Variant, rng: &mut R) -> Option<(Puzzle, State)> {
    let p = variant.params();
    let width = rng.gen_range(p.width.0..=p.width.1);
    let height = rng.gen_range(p.height.0..=p.height.1);
    let walls_n = uniform(rng, p.walls);
    let obstacles = uniform(rng, p.obstacles);
    let goals = uniform(rng, p.goal_objects);

    let cells: Vec<Position> = (0..height)
        .flat_map(|y| (0..width).map(move |x| Position::new(x, y)))
        .collect();
    let walls: Vec<Position> = cells.choose_multiple(rng, walls_n).copied().collect();

    let shape = |rng: &mut R, second_goal: bool| {
        if p.polyominoes {
            random_polyomino(rng)
        } else if second_goal {
            Shape::rect(1, 2)
        } else {
            Shape::unit()
        }
    };
    let mut objects = vec![Object::new("A", shape(rng, false))];
    for g in 0..goals {
        objects.push(Object::new(["R", "S"][g], shape(rng, g == 1)));
    }
    for b in 0..obstacles {
        objects.push(Object::new(["B", "C"][b], shape(rng, false)));
    }

    let frame = Puzzle::new("", width, height, walls.clone(), [], objects.clone(), []);
    let mut taken = vec![false; cells.len()];
    let idx = |c: Position| (c.y * width + c.x) as usize;
    let place = |object: usize, taken: &mut Vec<bool>, rng: &mut R| -> Option<Position> {
        let options: Vec<Position> = cells
            .iter()
            .copied()
            .filter(|&a| {
                frame.fits(object, a) && frame.shape(object).cells_at(a).all(|c| !taken[idx(c)])
            })
            .collect();
        let &a = options.choose(rng)?;
        for c in frame.shape(object).cells_at(a) {
            taken[idx(c)] = true;
        }
        Some(a)
    };
    let mut positions = Vec::with_capacity(objects.len());
    for i in 0..objects.len() {
        positions.push(place(i, &mut taken, rng)?);
    }
    let mut goal_taken = vec![false; cells.len()];
    let mut goal = Vec::with_capacity(goals);
    for g in 1..=goals {
        goal.push((g, place(g, &mut goal_taken, rng)?));
    }
    let puzzle = Puzzle::new("", width, height, walls, [], objects, goal);
    Some((puzzle, State::new(positions)))
}

/// Anchors each object could ever occupy, over-approximated: an object may
/// step in a direction when some other object could stand at a pushing
/// position for it with room to follow. The agent moves on its own.
/// Every reachable state places each object inside its set.
pub fn relaxed_reachable(puzzle: &Puzzle, state: &State) -> Vec<Vec<bool>> {
    let n = puzzle.num_objects();
    let graphs: Vec<MovementGraph> = (0..n).map(|k| MovementGraph::build(puzzle, k)).collect();
    let cell = |g: &MovementGraph, p: Position| g.index(p).map(|i| i as usize);
    let mut reach: Vec<Vec<bool>> = graphs
        .iter()
        .map(|g| vec![false; (g.width() * g.height()) as usize])
        .collect();
    for k in 0..n {
        let p = state.position(k);
        if graphs[k].contains(p) {
            reach[k][cell(&graphs[k], p).unwrap()] = true;
        }
    }
    let mut memo = PushingPositionMemo::new();
    loop {
        let mut grew = false;
        for k in 0..n {
            // revisit every known anchor: pushers may have spread since
            let mut stack: Vec<Position> = graphs[k].nodes().filter(|&p| reach[k][cell(&graphs[k], p).unwrap()]).collect();
            while let Some(x) = stack.pop() {
                for dir in Direction::ALL {
                    let u = dir.offset();
                    let y = x + u;
                    if !graphs[k].contains(y) || reach[k][cell(&graphs[k], y).unwrap()] {
                        continue;
                    }
                    let pushed = k == AGENT
                        || (0..n).filter(|&j| j != k).any(|j| {
                            memo.get(puzzle.shape(k), puzzle.shape(j), dir).iter().any(|&d| {
                                let at = x + d;
                                graphs[j].contains(at)
                                    && reach[j][cell(&graphs[j], at).unwrap()]
                                    && graphs[j].contains(at + u)
                            })
                        });
                    if pushed {
                        reach[k][cell(&graphs[k], y).unwrap()] = true;
                        stack.push(y);
                        grew = true;
                    }
                }
            }
        }
        if !grew {
            return reach;
        }
    }
}

fn goals_reachable(puzzle: &Puzzle, state: &State) -> bool {
    let reach = relaxed_reachable(puzzle, state);
    puzzle.goal().iter().all(|&(o, g)| {
        g.x >= 0
            && g.y >= 0
            && g.x < puzzle.width()
            && g.y < puzzle.height()
            && reach[o][(g.y * puzzle.width() + g.x) as usize]
    })
}

/// True when the puzzle is valid, not already solved and provably solvable
/// within the certification budget.
pub fn certify(puzzle: &Puzzle, state: &State, cert: &Certification) -> bool {
    if validate_puzzle(puzzle, state).is_err()
        || is_goal(puzzle, state)
        || !goals_reachable(puzzle, state)
    {
        return false;
    }
    let limits = Limits::new(Some(cert.planner_time), Some(cert.memory));
    let config = SearchConfig::new(HeuristicKind::NoveltyRgd).with_limits(limits);
    match gbf_search(puzzle, state, &config).status {
        Status::Solved => true,
        Status::Exhausted => false,
        Status::TimeLimit | Status::MemoryLimit => {
            let limits = Limits::new(Some(cert.oracle_time), Some(cert.memory));
            optimal_plan_bfs(puzzle, state, &limits).solved()
        }
    }
}

/// Instance `index` of a puzzle set; independent of every other index.
pub fn generate_one(spec: &VariantSpec, index: usize) -> Result<(Puzzle, State), GenerateError> {
    let name = format!("{}_{index}", spec.variant.name());
    if spec.variant == Variant::Corridor {
        let (p, s) = corridor_puzzle(4 + index as i32);
        return Ok((p.with_name(name), s));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed.wrapping_add(index as u64));
    for _ in 0..spec.certification.max_rejections {
        if let Some((p, s)) = sample_candidate(spec.variant, &mut rng) {
            if certify(&p, &s, &spec.certification) {
                return Ok((p.with_name(name), s));
            }
        }
    }
    Err(GenerateError::GaveUp {
        index,
        attempts: spec.certification.max_rejections,
    })
}

pub fn generate(spec: &VariantSpec, count: usize) -> Result<Vec<(Puzzle, State)>, GenerateError> {
    (0..count).map(|i| generate_one(spec, i)).collect()
}

/// Writes `<dir>/<set>/<train|test>/<index>.pwp`.
pub fn write_split(
    dir: &Path,
    set: &str,
    train: &[(Puzzle, State)],
    test: &[(Puzzle, State)],
) -> io::Result<()> {
    for (split, items) in [("train", train), ("test", test)] {
        let out = dir.join(set).join(split);
        fs::create_dir_all(&out)?;
        for (i, (p, s)) in items.iter().enumerate() {
            fs::write(out.join(format!("{i}.pwp")), serialize_puzzle(p, s))?;
        }
    }
    Ok(())
}
