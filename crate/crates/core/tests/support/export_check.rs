//! Exported models checked against the native engine by exhaustive
//! enumeration.

use std::collections::{BTreeSet, HashSet, VecDeque};

use pushworld::io::pddl::{export_pddl, ExportOptions};
use pushworld::io::sas::export_sas;
use pushworld::search::reachable_states;
use pushworld::{apply_action, try_apply, Direction, Position, Puzzle, State};

use super::{moved_count, pddl_sim, sas_sim};

pub fn parse_cell(name: &str) -> Position {
    let mut parts = name.trim_start_matches("c_").split('_');
    let x = parts.next().unwrap().parse().unwrap();
    let y = parts.next().unwrap().parse().unwrap();
    Position::new(x, y)
}

pub fn object_index(name: &str) -> usize {
    name.trim_start_matches('o').parse().unwrap()
}

/// Native state encoded by a PDDL state; also checks that the occupancy
/// facts agree with the object positions.
pub fn pddl_to_native(puzzle: &Puzzle, facts: &BTreeSet<pddl_sim::Fact>) -> State {
    let mut positions = vec![None; puzzle.num_objects()];
    let mut occupied = HashSet::new();
    for f in facts {
        match f[0].as_str() {
            "at" => {
                let slot = &mut positions[object_index(&f[1])];
                assert!(slot.is_none(), "object placed twice");
                *slot = Some(parse_cell(&f[2]));
            }
            "occupied" => {
                occupied.insert(parse_cell(&f[1]));
            }
            other => panic!("unexpected fluent {other}"),
        }
    }
    let state = State::new(positions.into_iter().map(|p| p.expect("object placed")).collect());
    let covered: HashSet<Position> = (0..puzzle.num_objects())
        .flat_map(|i| puzzle.shape(i).cells_at(state.position(i)).collect::<Vec<_>>())
        .collect();
    assert_eq!(occupied, covered, "occupancy facts disagree with anchors");
    state
}

pub fn sas_to_native(task: &sas_sim::Task, values: &[u32]) -> State {
    let positions = values
        .iter()
        .enumerate()
        .map(|(v, &x)| {
            let atom = &task.domains[v][x as usize];
            let inner = atom.trim_start_matches("Atom at(").trim_end_matches(')');
            let (obj, cell) = inner.split_once(", ").unwrap();
            assert_eq!(object_index(obj), v);
            parse_cell(cell)
        })
        .collect();
    State::new(positions)
}

/// Native successors whose push moves at most `max_chain` objects.
pub fn native_successors(puzzle: &Puzzle, state: &State, max_chain: usize) -> BTreeSet<Vec<(i32, i32)>> {
    Direction::ALL
        .into_iter()
        .filter_map(|d| try_apply(puzzle, state, d))
        .filter(|next| moved_count(state, next) <= max_chain)
        .map(|s| key(&s))
        .collect()
}

pub fn key(state: &State) -> Vec<(i32, i32)> {
    state.positions().iter().map(|p| (p.x, p.y)).collect()
}

/// Breadth-first enumeration of the PDDL model; checks every state's
/// successors against the native ones and returns the reached states.
pub fn check_pddl(puzzle: &Puzzle, initial: &State, opts: &ExportOptions) -> HashSet<Vec<(i32, i32)>> {
    let out = export_pddl(puzzle, initial, opts).unwrap();
    let task = pddl_sim::load(&out.domain, &out.problem);
    let mut seen = HashSet::new();
    let mut seen_facts = HashSet::new();
    let mut queue = VecDeque::from([task.init.clone()]);
    seen_facts.insert(task.init.clone());
    while let Some(facts) = queue.pop_front() {
        let native = pddl_to_native(puzzle, &facts);
        assert!(seen.insert(key(&native)), "two PDDL states map to one native state");
        let succ = task.successors(&facts);
        let mapped: Vec<Vec<(i32, i32)>> = succ.iter().map(|(_, f)| key(&pddl_to_native(puzzle, f))).collect();
        let unique: BTreeSet<_> = mapped.iter().cloned().collect();
        assert_eq!(unique.len(), mapped.len(), "duplicate ground actions");
        assert_eq!(unique, native_successors(puzzle, &native, opts.max_chain));
        assert_eq!(task.is_goal(&facts), pushworld::is_goal(puzzle, &native));
        for (_, f) in succ {
            if seen_facts.insert(f.clone()) {
                queue.push_back(f);
            }
        }
    }
    seen
}

pub fn check_sas(puzzle: &Puzzle, initial: &State, opts: &ExportOptions) -> HashSet<Vec<(i32, i32)>> {
    let out = export_sas(puzzle, initial, opts).unwrap();
    let task = sas_sim::load(&out.text);
    assert_eq!(task.version, 3);
    let mut seen = HashSet::new();
    let mut queue = VecDeque::from([task.init.clone()]);
    let mut seen_values = HashSet::from([task.init.clone()]);
    while let Some(values) = queue.pop_front() {
        let native = sas_to_native(&task, &values);
        assert!(seen.insert(key(&native)));
        let succ = task.successors(&values);
        let mapped: Vec<_> = succ.iter().map(|(_, v)| key(&sas_to_native(&task, v))).collect();
        let unique: BTreeSet<_> = mapped.iter().cloned().collect();
        assert_eq!(unique.len(), mapped.len(), "duplicate operators");
        assert_eq!(unique, native_successors(puzzle, &native, opts.max_chain));
        assert_eq!(task.is_goal(&values), pushworld::is_goal(puzzle, &native));
        for (_, v) in succ {
            if seen_values.insert(v.clone()) {
                queue.push_back(v);
            }
        }
    }
    seen
}

pub fn native_reachable(puzzle: &Puzzle, initial: &State) -> HashSet<Vec<(i32, i32)>> {
    reachable_states(puzzle, initial, 1_000_000)
        .unwrap()
        .iter()
        .map(key)
        .collect()
}

/// Follows a native plan through the PDDL model, one matching ground
/// action per step; true if the model's goal holds at the end.
pub fn replay_pddl(puzzle: &Puzzle, state: &State, plan: &[Direction], opts: &ExportOptions) -> bool {
    let out = export_pddl(puzzle, state, opts).unwrap();
    let task = pddl_sim::load(&out.domain, &out.problem);
    let mut facts = task.init.clone();
    let mut native = state.clone();
    for &a in plan {
        native = apply_action(puzzle, &native, a);
        let Some(next) = task
            .successors(&facts)
            .into_iter()
            .map(|(_, f)| f)
            .find(|f| pddl_to_native(puzzle, f) == native)
        else {
            return false;
        };
        facts = next;
    }
    task.is_goal(&facts)
}

pub fn replay_sas(puzzle: &Puzzle, state: &State, plan: &[Direction], opts: &ExportOptions) -> bool {
    let sas = sas_sim::load(&export_sas(puzzle, state, opts).unwrap().text);
    let mut values = sas.init.clone();
    let mut native = state.clone();
    for &a in plan {
        native = apply_action(puzzle, &native, a);
        let Some(next) = sas
            .successors(&values)
            .into_iter()
            .map(|(_, v)| v)
            .find(|v| sas_to_native(&sas, v) == native)
        else {
            return false;
        };
        values = next;
    }
    sas.is_goal(&values)
}
