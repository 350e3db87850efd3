//! Synchronous multitape automata over the padded convolution alphabet.
//!
//! An automaton with `k` tracks reads one letter per step; a letter is a
//! `k`-tuple of column symbols or padding, never all padding. Transitions are
//! stored sparsely per state and sorted by letter, so missing letters lead to
//! an implicit dead state.
//!
//! Minimization uses Moore-style partition refinement by transition
//! signatures, followed by a breadth-first renumbering. Two minimized
//! automata for the same language are therefore identical as values.

mod letter;
mod ops;
mod query;
mod text;

pub use letter::{convolve, mask, mask_of, Letter, TrackWord, MAX_TRACKS, PAD};
pub use ops::{join, Universe};
pub use query::Enumeration;

use std::cell::Cell;

use crate::numeration::Base;

thread_local! {
    static STATE_BUDGET: Cell<usize> = const { Cell::new(1_000_000) };
}

/// Current limit on states created by a single construction on this thread.
pub fn state_budget() -> usize {
    STATE_BUDGET.with(Cell::get)
}

/// Change the limit on states created by a single construction on this
/// thread.
pub fn set_state_budget(n: usize) {
    STATE_BUDGET.with(|b| b.set(n.max(1)));
}

pub type StateId = u32;

/// A nondeterministic (or deterministic) synchronous k-tape automaton.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SyncAutomaton {
    pub(crate) base: Base,
    pub(crate) tracks: usize,
    pub(crate) initial: Vec<StateId>,
    pub(crate) accepting: Vec<bool>,
    pub(crate) trans: Vec<Vec<(Letter, StateId)>>,
    pub(crate) deterministic: bool,
}

impl SyncAutomaton {
    /// The automaton of the empty language.
    pub fn empty(base: Base, tracks: usize) -> Self {
        assert!((1..=MAX_TRACKS).contains(&tracks));
        SyncAutomaton {
            base,
            tracks,
            initial: vec![0],
            accepting: vec![false],
            trans: vec![Vec::new()],
            deterministic: true,
        }
    }

    /// Assemble from raw parts; transitions are sorted and deduplicated.
    pub fn from_parts(
        base: Base,
        tracks: usize,
        initial: Vec<StateId>,
        accepting: Vec<bool>,
        mut trans: Vec<Vec<(Letter, StateId)>>,
    ) -> Self {
        assert_eq!(accepting.len(), trans.len());
        assert!((1..=MAX_TRACKS).contains(&tracks));
        for row in &mut trans {
            row.sort_unstable();
            row.dedup();
        }
        let mut a = SyncAutomaton { base, tracks, initial, accepting, trans, deterministic: false };
        a.initial.sort_unstable();
        a.initial.dedup();
        a.deterministic = a.check_deterministic();
        a
    }

    fn check_deterministic(&self) -> bool {
        self.initial.len() == 1
            && self.trans.iter().all(|row| row.windows(2).all(|w| w[0].0 != w[1].0))
    }

    /// The automaton accepting exactly the given words.
    pub fn from_words(base: Base, tracks: usize, words: &[TrackWord]) -> Self {
        let mut trans: Vec<Vec<(Letter, StateId)>> = vec![Vec::new()];
        let mut accepting = vec![false];
        for w in words {
            assert_eq!(w.tracks, tracks, "word arity differs from automaton arity");
            let mut s = 0usize;
            for &l in &w.letters {
                let next = trans[s].iter().find(|(x, _)| *x == l).map(|&(_, t)| t as usize);
                s = match next {
                    Some(t) => t,
                    None => {
                        trans.push(Vec::new());
                        accepting.push(false);
                        let t = trans.len() - 1;
                        trans[s].push((l, t as StateId));
                        t
                    }
                };
            }
            accepting[s] = true;
        }
        Self::from_parts(base, tracks, vec![0], accepting, trans)
    }

    pub fn base(&self) -> Base {
        self.base
    }

    pub fn tracks(&self) -> usize {
        self.tracks
    }

    pub fn num_states(&self) -> usize {
        self.accepting.len()
    }

    pub fn num_transitions(&self) -> usize {
        self.trans.iter().map(Vec::len).sum()
    }

    pub fn is_deterministic(&self) -> bool {
        self.deterministic
    }

    pub fn initial_states(&self) -> &[StateId] {
        &self.initial
    }

    pub fn is_accepting(&self, s: StateId) -> bool {
        self.accepting[s as usize]
    }

    pub fn transitions(&self, s: StateId) -> &[(Letter, StateId)] {
        &self.trans[s as usize]
    }

    /// Successor of a deterministic state on `l`.
    pub fn step(&self, s: StateId, l: Letter) -> Option<StateId> {
        let row = &self.trans[s as usize];
        match row.binary_search_by(|(x, _)| x.cmp(&l)) {
            Ok(i) => Some(row[i].1),
            Err(_) => None,
        }
    }

    /// Run on a word; true iff some run ends in an accepting state.
    pub fn accepts(&self, w: &TrackWord) -> bool {
        if w.tracks != self.tracks {
            return false;
        }
        let mut cur: Vec<StateId> = self.initial.clone();
        for &l in &w.letters {
            let mut next = Vec::new();
            for &s in &cur {
                let row = &self.trans[s as usize];
                let start = row.partition_point(|(x, _)| *x < l);
                for &(x, t) in &row[start..] {
                    if x != l {
                        break;
                    }
                    next.push(t);
                }
            }
            next.sort_unstable();
            next.dedup();
            if next.is_empty() {
                return false;
            }
            cur = next;
        }
        cur.iter().any(|&s| self.accepting[s as usize])
    }

    /// Checked variant of [`accepts`](Self::accepts).
    pub fn try_accepts(&self, w: &TrackWord) -> crate::Result<bool> {
        if w.tracks != self.tracks {
            return Err(crate::Error::AlphabetMismatch(format!(
                "word has {} tracks, automaton {}",
                w.tracks, self.tracks
            )));
        }
        Ok(self.accepts(w))
    }
}
