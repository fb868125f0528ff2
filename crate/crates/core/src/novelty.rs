//! Novelty over object-position tuples, capped at tuples of size three.

use rustc_hash::FxHashSet;

use crate::model::{Position, State};

/// Returned when every 1-, 2- and 3-tuple of a state has been seen.
pub const NOT_NOVEL: u8 = 4;

const ATOM_BITS: u32 = 21;
const ATOM_LIMIT: u64 = 1 << ATOM_BITS;

/// Seen (object, anchor) tuples of size 1, 2 and 3. Tuples are stored with
/// object indices ascending.
#[derive(Debug, Clone)]
pub struct NoveltyArchive {
    width: i32,
    height: i32,
    singles: FxHashSet<u64>,
    pairs: FxHashSet<u64>,
    triples: FxHashSet<u64>,
}

impl NoveltyArchive {
    /// Anchors are assumed to lie in `[0, width) x [0, height)`.
    pub fn new(width: i32, height: i32) -> Self {
        Self {
            width,
            height,
            singles: FxHashSet::default(),
            pairs: FxHashSet::default(),
            triples: FxHashSet::default(),
        }
    }

    fn atom(&self, object: usize, p: Position) -> u64 {
        debug_assert!(p.x >= 0 && p.y >= 0 && p.x < self.width && p.y < self.height);
        let cells = (self.width * self.height) as u64;
        let a = object as u64 * cells + (p.y * self.width + p.x) as u64;
        assert!(a < ATOM_LIMIT, "too many (object, position) atoms for the archive");
        a
    }

    fn atoms(&self, state: &State) -> Vec<u64> {
        state
            .positions()
            .iter()
            .enumerate()
            .map(|(i, &p)| self.atom(i, p))
            .collect()
    }

    fn pair(a: u64, b: u64) -> u64 {
        (a << ATOM_BITS) | b
    }

    fn triple(a: u64, b: u64, c: u64) -> u64 {
        (a << (2 * ATOM_BITS)) | (b << ATOM_BITS) | c
    }

    /// Size of the smallest tuple of `state` not seen in any recorded state,
    /// or [`NOT_NOVEL`].
    pub fn novelty(&self, state: &State) -> u8 {
        let atoms = self.atoms(state);
        if atoms.iter().any(|a| !self.singles.contains(a)) {
            return 1;
        }
        let n = atoms.len();
        for i in 0..n {
            for j in i + 1..n {
                if !self.pairs.contains(&Self::pair(atoms[i], atoms[j])) {
                    return 2;
                }
            }
        }
        for i in 0..n {
            for j in i + 1..n {
                for k in j + 1..n {
                    if !self.triples.contains(&Self::triple(atoms[i], atoms[j], atoms[k])) {
                        return 3;
                    }
                }
            }
        }
        NOT_NOVEL
    }

    /// Inserts every 1-, 2- and 3-tuple of `state`.
    pub fn record(&mut self, state: &State) {
        let atoms = self.atoms(state);
        let n = atoms.len();
        for i in 0..n {
            self.singles.insert(atoms[i]);
            for j in i + 1..n {
                self.pairs.insert(Self::pair(atoms[i], atoms[j]));
                for k in j + 1..n {
                    self.triples
                        .insert(Self::triple(atoms[i], atoms[j], atoms[k]));
                }
            }
        }
    }

    /// Novelty of `state`, then records it.
    pub fn evaluate(&mut self, state: &State) -> u8 {
        let w = self.novelty(state);
        if w != NOT_NOVEL {
            self.record(state);
        }
        w
    }

    /// Distinct tuples stored for sizes 1, 2 and 3.
    pub fn sizes(&self) -> [usize; 3] {
        [self.singles.len(), self.pairs.len(), self.triples.len()]
    }
}
