//! PushWorld: a grid environment where an agent pushes rigid objects, with
//! the recursive graph distance heuristic and planners built on it.
//!
//! - [`model`]: puzzles, states and the transition function.
//! - [`io`]: the `.pwp` format plus PDDL and SAS+ exporters.
//! - [`motion`]: movement graphs and cached path lengths.
//! - [`rgd`]: the recursive graph distance heuristic.
//! - [`novelty`]: tuple novelty up to size three.
//! - [`search`]: greedy best-first and breadth-first planners.
//! - [`generator`]: procedural puzzle sets and augmentation.

pub mod generator;
pub mod io;
pub mod model;
pub mod motion;
pub mod novelty;
pub mod rgd;
pub mod search;

pub use model::{
    apply_action, is_goal, push_set, try_apply, validate_puzzle, Direction, Object, Position,
    PushSet, Puzzle, Shape, State, Violation, AGENT,
};
pub use motion::{Cost, INFINITY};
