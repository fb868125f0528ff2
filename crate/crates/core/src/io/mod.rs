//! Puzzle files and exports for external planners.

mod format;
mod groups;
pub mod pddl;
pub mod sas;

pub use format::{
    load_puzzle, parse_puzzle, save_puzzle, serialize_puzzle, FormatError, AGENT_ID,
    FORMAT_VERSION,
};
