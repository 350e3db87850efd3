use std::collections::{HashMap, VecDeque};

use super::letter::{Letter, TrackWord};
use super::{StateId, SyncAutomaton};
use crate::error::Result;

/// Result of [`SyncAutomaton::enumerate`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Enumeration {
    /// Accepted words in length-lexicographic order.
    pub words: Vec<TrackWord>,
    /// True when `words` is the whole language.
    pub exhausted: bool,
}

impl SyncAutomaton {
    /// True iff no accepting state is reachable.
    pub fn is_empty(&self) -> bool {
        let mut seen = vec![false; self.num_states()];
        let mut stack: Vec<StateId> = self.initial.clone();
        for &s in &stack {
            seen[s as usize] = true;
        }
        while let Some(s) = stack.pop() {
            if self.accepting[s as usize] {
                return false;
            }
            for &(_, t) in &self.trans[s as usize] {
                if !seen[t as usize] {
                    seen[t as usize] = true;
                    stack.push(t);
                }
            }
        }
        true
    }

    /// Language equality, decided on the product of the two determinized
    /// automata (the symmetric difference is empty).
    pub fn are_equivalent(&self, other: &SyncAutomaton) -> Result<bool> {
        self.same_alphabet(other)?;
        Ok(self.distinguishing_word(other)?.is_none())
    }

    /// A shortest word in the symmetric difference, if any.
    pub fn distinguishing_word(&self, other: &SyncAutomaton) -> Result<Option<TrackWord>> {
        self.same_alphabet(other)?;
        let a = self.determinize()?;
        let b = other.determinize()?;
        type P = (Option<StateId>, Option<StateId>);
        let acc = |p: &P| {
            p.0.map(|s| a.accepting[s as usize]).unwrap_or(false)
                != p.1.map(|s| b.accepting[s as usize]).unwrap_or(false)
        };
        let start: P = (Some(a.initial[0]), Some(b.initial[0]));
        let mut parent: HashMap<P, Option<(P, Letter)>> = HashMap::new();
        parent.insert(start, None);
        let mut queue = VecDeque::from([start]);
        while let Some(p) = queue.pop_front() {
            if acc(&p) {
                let mut letters = Vec::new();
                let mut cur = p;
                while let Some(&Some((prev, l))) = parent.get(&cur) {
                    letters.push(l);
                    cur = prev;
                }
                letters.reverse();
                return Ok(Some(TrackWord { tracks: self.tracks, letters }));
            }
            let mut moves: Vec<Letter> = Vec::new();
            if let Some(s) = p.0 {
                moves.extend(a.trans[s as usize].iter().map(|&(l, _)| l));
            }
            if let Some(s) = p.1 {
                moves.extend(b.trans[s as usize].iter().map(|&(l, _)| l));
            }
            moves.sort_unstable();
            moves.dedup();
            for l in moves {
                let q: P = (p.0.and_then(|s| a.step(s, l)), p.1.and_then(|s| b.step(s, l)));
                if q == (None, None) {
                    continue;
                }
                if let std::collections::hash_map::Entry::Vacant(e) = parent.entry(q) {
                    e.insert(Some((p, l)));
                    queue.push_back(q);
                }
            }
        }
        Ok(None)
    }

    /// The length-lexicographically least accepted word.
    pub fn shortest_word(&self) -> Option<TrackWord> {
        let n = self.num_states();
        let mut parent: Vec<Option<(StateId, Letter)>> = vec![None; n];
        let mut seen = vec![false; n];
        let mut queue = VecDeque::new();
        for &s in &self.initial {
            seen[s as usize] = true;
            queue.push_back(s);
        }
        while let Some(s) = queue.pop_front() {
            if self.accepting[s as usize] {
                let mut letters = Vec::new();
                let mut cur = s;
                while let Some((prev, l)) = parent[cur as usize] {
                    letters.push(l);
                    cur = prev;
                }
                letters.reverse();
                return Some(TrackWord { tracks: self.tracks, letters });
            }
            for &(l, t) in &self.trans[s as usize] {
                if !seen[t as usize] {
                    seen[t as usize] = true;
                    parent[t as usize] = Some((s, l));
                    queue.push_back(t);
                }
            }
        }
        None
    }

    /// List accepted words in length-lexicographic order, at most
    /// `max_count` of them and none longer than `max_len`.
    pub fn enumerate(&self, max_count: usize, max_len: usize) -> Result<Enumeration> {
        let d = self.trim().determinize()?;
        let n = d.num_states();
        if max_count == 0 {
            return Ok(Enumeration { words: Vec::new(), exhausted: d.is_empty() });
        }
        if d.is_empty() {
            return Ok(Enumeration { words: Vec::new(), exhausted: true });
        }
        // exact-length search with reachability pruning, shortest lengths first
        let mut reach: Vec<Vec<bool>> = vec![d.accepting.clone()];
        for k in 1..=max_len {
            let prev = &reach[k - 1];
            let cur: Vec<bool> =
                (0..n).map(|s| d.trans[s].iter().any(|&(_, t)| prev[t as usize])).collect();
            reach.push(cur);
        }
        let mut words = Vec::new();
        'outer: for len in 0..=max_len {
            let mut stack = vec![(d.initial[0], Vec::<Letter>::new())];
            while let Some((s, w)) = stack.pop() {
                let left = len - w.len();
                if !reach[left][s as usize] {
                    continue;
                }
                if left == 0 {
                    words.push(TrackWord { tracks: d.tracks, letters: w });
                    if words.len() >= max_count {
                        break 'outer;
                    }
                    continue;
                }
                for &(l, t) in d.trans[s as usize].iter().rev() {
                    if reach[left - 1][t as usize] {
                        let mut w2 = w.clone();
                        w2.push(l);
                        stack.push((t, w2));
                    }
                }
            }
        }
        let exhausted = match d.count_words()? {
            Some(total) => total == words.len() as u128,
            None => false,
        };
        Ok(Enumeration { words, exhausted })
    }

    /// Every word of a finite language in length-lexicographic order, found
    /// by a depth-first walk of the trimmed automaton; `None` when the
    /// language is infinite. Fails once more than `max_paths` accepting
    /// paths have been walked.
    pub fn finite_words(&self, max_paths: usize) -> Result<Option<Vec<TrackWord>>> {
        let t = self.trim();
        if topological_order(&t).is_none() {
            return Ok(None);
        }
        // path tree with parent pointers, so each step costs O(1)
        let mut nodes: Vec<(usize, Letter)> = Vec::new();
        let mut words = Vec::new();
        let mut stack: Vec<(StateId, usize)> = t.initial.iter().map(|&s| (s, usize::MAX)).collect();
        while let Some((s, node)) = stack.pop() {
            if t.accepting[s as usize] {
                if words.len() >= max_paths {
                    return Err(crate::Error::Resource(format!("more than {max_paths} accepting paths")));
                }
                let mut letters = Vec::new();
                let mut cur = node;
                while cur != usize::MAX {
                    letters.push(nodes[cur].1);
                    cur = nodes[cur].0;
                }
                letters.reverse();
                words.push(TrackWord { tracks: t.tracks, letters });
            }
            for &(l, n) in &t.trans[s as usize] {
                nodes.push((node, l));
                stack.push((n, nodes.len() - 1));
            }
        }
        words.sort_by(|a, b| (a.len(), &a.letters).cmp(&(b.len(), &b.letters)));
        words.dedup();
        Ok(Some(words))
    }

    /// Number of accepted words when the language is finite.
    pub fn count_words(&self) -> Result<Option<u128>> {
        let d = self.trim().determinize()?;
        if d.is_empty() {
            return Ok(Some(0));
        }
        let Some(order) = topological_order(&d) else { return Ok(None) };
        let mut count = vec![0u128; d.num_states()];
        for &s in order.iter().rev() {
            let mut c = d.accepting[s as usize] as u128;
            for &(_, t) in &d.trans[s as usize] {
                c = c.saturating_add(count[t as usize]);
            }
            count[s as usize] = c;
        }
        Ok(Some(count[d.initial[0] as usize]))
    }

    /// True iff the trimmed automaton has no cycle.
    pub fn is_finite(&self) -> bool {
        topological_order(&self.trim()).is_some()
    }
}

fn topological_order(a: &SyncAutomaton) -> Option<Vec<StateId>> {
    let n = a.num_states();
    let mut indeg = vec![0usize; n];
    for row in &a.trans {
        for &(_, t) in row {
            indeg[t as usize] += 1;
        }
    }
    let mut queue: VecDeque<StateId> =
        (0..n).filter(|&s| indeg[s] == 0).map(|s| s as StateId).collect();
    let mut order = Vec::with_capacity(n);
    while let Some(s) = queue.pop_front() {
        order.push(s);
        for &(_, t) in &a.trans[s as usize] {
            indeg[t as usize] -= 1;
            if indeg[t as usize] == 0 {
                queue.push_back(t);
            }
        }
    }
    (order.len() == n).then_some(order)
}
