//! Rigid push groups shared by the exporters.
//!
//! A group is a set of objects containing the agent that moves together in
//! one action. Given the members and their anchors relative to the agent,
//! the cells the group enters and vacates are fixed, so an exported action
//! needs only the agent anchor plus "entered cells are free".

use std::collections::BTreeSet;

use crate::model::{Direction, Position, Puzzle, AGENT};
use crate::motion::relative_pushing_positions;

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct GroupConfig {
    pub dir: Direction,
    /// Ascending, first is the agent.
    pub members: Vec<usize>,
    /// Member anchor minus agent anchor, aligned with `members`.
    pub offsets: Vec<Position>,
    /// Cells that must be free, relative to the agent anchor.
    pub entered: Vec<Position>,
    /// Cells freed by the move, relative to the agent anchor.
    pub vacated: Vec<Position>,
}

fn cells(puzzle: &Puzzle, members: &[usize], offsets: &[Position]) -> BTreeSet<(i32, i32)> {
    members
        .iter()
        .zip(offsets)
        .flat_map(|(&m, &o)| puzzle.shape(m).cells_at(o).map(|c| c.row_major()))
        .collect()
}

fn place(
    puzzle: &Puzzle,
    dir: Direction,
    members: &[usize],
    placed: &mut Vec<Option<Position>>,
    out: &mut BTreeSet<Vec<Position>>,
) {
    if placed.iter().all(Option::is_some) {
        out.insert(placed.iter().map(|o| o.unwrap()).collect());
        return;
    }
    for j in 0..members.len() {
        if placed[j].is_some() {
            continue;
        }
        for i in 0..members.len() {
            let Some(base) = placed[i] else { continue };
            let pushee = puzzle.shape(members[j]);
            let pusher = puzzle.shape(members[i]);
            for delta in relative_pushing_positions(pushee, pusher, dir) {
                let candidate = base - delta;
                let overlaps = pushee.cells_at(candidate).any(|c| {
                    placed.iter().enumerate().any(|(k, o)| {
                        o.is_some_and(|ok| puzzle.shape(members[k]).contains(c - ok))
                    })
                });
                if overlaps {
                    continue;
                }
                placed[j] = Some(candidate);
                place(puzzle, dir, members, placed, out);
                placed[j] = None;
            }
        }
    }
}

fn subsets(n: usize, max_extra: usize) -> Vec<Vec<usize>> {
    let mut out = vec![vec![AGENT]];
    let mut frontier = vec![vec![AGENT]];
    for _ in 0..max_extra {
        let mut next = Vec::new();
        for s in &frontier {
            let last = *s.last().unwrap();
            for j in (last.max(AGENT) + 1)..n {
                let mut t = s.clone();
                t.push(j);
                next.push(t);
            }
        }
        out.extend(next.iter().cloned());
        frontier = next;
    }
    out
}

/// Every rigid configuration of at most `max_chain` objects (agent
/// included) that one action can move as a connected push group.
pub(crate) fn group_configs(puzzle: &Puzzle, max_chain: usize) -> Vec<GroupConfig> {
    let n = puzzle.num_objects();
    let groups = subsets(n, max_chain.saturating_sub(1));
    let mut out = Vec::new();
    for dir in Direction::ALL {
        let u = dir.offset();
        for members in &groups {
            let mut placed = vec![None; members.len()];
            placed[0] = Some(Position::default());
            let mut found = BTreeSet::new();
            place(puzzle, dir, members, &mut placed, &mut found);
            for offsets in found {
                let before = cells(puzzle, members, &offsets);
                let moved: Vec<Position> = offsets.iter().map(|&o| o + u).collect();
                let after = cells(puzzle, members, &moved);
                let to_pos = |&(y, x): &(i32, i32)| Position::new(x, y);
                out.push(GroupConfig {
                    dir,
                    members: members.clone(),
                    offsets,
                    entered: after.difference(&before).map(to_pos).collect(),
                    vacated: before.difference(&after).map(to_pos).collect(),
                });
            }
        }
    }
    out
}
