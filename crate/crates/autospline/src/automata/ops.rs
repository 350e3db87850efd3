use std::collections::{HashMap, VecDeque};

use super::letter::{mask, mask_of, Letter};
use super::{state_budget, StateId, SyncAutomaton};
use crate::error::{Error, Result};

const FIN: StateId = StateId::MAX;

/// A deterministic, possibly implicit, universe language used as the
/// reference set for complementation.
pub trait Universe {
    fn tracks(&self) -> usize;
    fn start(&self) -> u64;
    fn step(&self, state: u64, l: Letter) -> Option<u64>;
    fn accepting(&self, state: u64) -> bool;
    /// All letters with a successor from `state`.
    fn letters(&self, state: u64) -> Vec<Letter>;
}

/// An explicit deterministic automaton viewed as a universe.
struct ExplicitUniverse<'a>(&'a SyncAutomaton);

impl Universe for ExplicitUniverse<'_> {
    fn tracks(&self) -> usize {
        self.0.tracks
    }
    fn start(&self) -> u64 {
        self.0.initial[0] as u64
    }
    fn step(&self, s: u64, l: Letter) -> Option<u64> {
        self.0.step(s as StateId, l).map(|t| t as u64)
    }
    fn accepting(&self, s: u64) -> bool {
        self.0.accepting[s as usize]
    }
    fn letters(&self, s: u64) -> Vec<Letter> {
        self.0.trans[s as usize].iter().map(|&(l, _)| l).collect()
    }
}

fn budget_check(n: usize) -> Result<()> {
    let b = state_budget();
    if n > b {
        Err(Error::StateBudget(b))
    } else {
        Ok(())
    }
}

/// Natural join of two relations on shared track positions.
///
/// Track `i` of `a` lands on result track `amap[i]`, track `j` of `b` on
/// `bmap[j]`; every one of the `k` result tracks must be covered. A word is
/// accepted iff its restriction to `a`'s positions (with trailing all-padding
/// letters dropped) is accepted by `a`, and likewise for `b`. Only reachable
/// state pairs are built.
pub fn join(
    a: &SyncAutomaton,
    amap: &[usize],
    b: &SyncAutomaton,
    bmap: &[usize],
    k: usize,
) -> Result<SyncAutomaton> {
    if a.base != b.base {
        return Err(Error::AlphabetMismatch("join of automata over different bases".into()));
    }
    if amap.len() != a.tracks || bmap.len() != b.tracks {
        return Err(Error::AlphabetMismatch("track map arity".into()));
    }
    let ma = mask_of(amap);
    let mb = mask_of(bmap);
    let full = mask(k);
    if ma | mb != full || amap.iter().chain(bmap).any(|&t| t >= k) {
        return Err(Error::AlphabetMismatch("join does not cover all result tracks".into()));
    }
    let shared = ma & mb;
    let pad_a = Letter(ma);
    let pad_b = Letter(mb);

    let mut ids: HashMap<(StateId, StateId), StateId> = HashMap::new();
    let mut queue: VecDeque<(StateId, StateId)> = VecDeque::new();
    let mut trans: Vec<Vec<(Letter, StateId)>> = Vec::new();
    let mut accepting: Vec<bool> = Vec::new();
    let mut initial = Vec::new();

    let acc_a = |s: StateId| s == FIN || a.accepting[s as usize];
    let acc_b = |s: StateId| s == FIN || b.accepting[s as usize];

    let intern = |p: (StateId, StateId),
                      ids: &mut HashMap<(StateId, StateId), StateId>,
                      queue: &mut VecDeque<(StateId, StateId)>,
                      trans: &mut Vec<Vec<(Letter, StateId)>>,
                      accepting: &mut Vec<bool>|
     -> Result<StateId> {
        if let Some(&id) = ids.get(&p) {
            return Ok(id);
        }
        let id = trans.len() as StateId;
        budget_check(trans.len() + 1)?;
        ids.insert(p, id);
        trans.push(Vec::new());
        accepting.push(acc_a(p.0) && acc_b(p.1));
        queue.push_back(p);
        Ok(id)
    };

    for &ia in &a.initial {
        for &ib in &b.initial {
            let id = intern((ia, ib), &mut ids, &mut queue, &mut trans, &mut accepting)?;
            initial.push(id);
        }
    }

    let options = |m: &SyncAutomaton, map: &[usize], s: StateId, pad: Letter, acc: bool| {
        let mut out: Vec<(Letter, StateId)> = Vec::new();
        if s != FIN {
            out.extend(m.trans[s as usize].iter().map(|&(l, t)| (l.remap(map), t)));
        }
        if acc {
            out.push((pad, FIN));
        }
        out
    };

    while let Some((sa, sb)) = queue.pop_front() {
        let from = ids[&(sa, sb)];
        let oa = options(a, amap, sa, pad_a, acc_a(sa));
        let ob = options(b, bmap, sb, pad_b, acc_b(sb));
        let mut index: HashMap<u128, Vec<usize>> = HashMap::new();
        for (i, &(l, _)) in ob.iter().enumerate() {
            index.entry(l.0 & shared).or_default().push(i);
        }
        let mut row = Vec::new();
        for &(la, ta) in &oa {
            if let Some(list) = index.get(&(la.0 & shared)) {
                for &i in list {
                    let (lb, tb) = ob[i];
                    let l = Letter(la.0 | lb.0);
                    if l.0 & full == full {
                        continue;
                    }
                    let to = intern((ta, tb), &mut ids, &mut queue, &mut trans, &mut accepting)?;
                    row.push((l, to));
                }
            }
        }
        trans[from as usize] = row;
    }
    Ok(SyncAutomaton::from_parts(a.base, k, initial, accepting, trans))
}

impl SyncAutomaton {
    /// Language union (same track count).
    pub fn union(&self, other: &SyncAutomaton) -> Result<SyncAutomaton> {
        self.same_alphabet(other)?;
        let off = self.num_states() as StateId;
        let mut trans = self.trans.clone();
        trans.extend(
            other.trans.iter().map(|row| row.iter().map(|&(l, t)| (l, t + off)).collect()),
        );
        let mut accepting = self.accepting.clone();
        accepting.extend_from_slice(&other.accepting);
        let mut initial = self.initial.clone();
        initial.extend(other.initial.iter().map(|&s| s + off));
        Ok(SyncAutomaton::from_parts(self.base, self.tracks, initial, accepting, trans))
    }

    /// Language intersection (product construction).
    pub fn intersect(&self, other: &SyncAutomaton) -> Result<SyncAutomaton> {
        self.same_alphabet(other)?;
        let id: Vec<usize> = (0..self.tracks).collect();
        join(self, &id, other, &id, self.tracks)
    }

    pub(crate) fn same_alphabet(&self, other: &SyncAutomaton) -> Result<()> {
        if self.base != other.base || self.tracks != other.tracks {
            return Err(Error::AlphabetMismatch(format!(
                "base {} / {} tracks vs base {} / {} tracks",
                self.base, self.tracks, other.base, other.tracks
            )));
        }
        Ok(())
    }

    /// Complement relative to an implicit universe.
    pub fn complement_in<U: Universe>(&self, universe: &U) -> Result<SyncAutomaton> {
        if universe.tracks() != self.tracks {
            return Err(Error::AlphabetMismatch("universe arity".into()));
        }
        let d = self.determinize()?;
        let start = (Some(d.initial[0]), universe.start());
        let mut ids: HashMap<(Option<StateId>, u64), StateId> = HashMap::new();
        let mut queue = VecDeque::new();
        let mut trans: Vec<Vec<(Letter, StateId)>> = Vec::new();
        let mut accepting = Vec::new();
        let accept_of = |p: &(Option<StateId>, u64)| {
            universe.accepting(p.1) && !p.0.map(|s| d.accepting[s as usize]).unwrap_or(false)
        };
        ids.insert(start, 0);
        trans.push(Vec::new());
        accepting.push(accept_of(&start));
        queue.push_back(start);
        while let Some(p) = queue.pop_front() {
            let from = ids[&p];
            let mut row = Vec::new();
            for l in universe.letters(p.1) {
                let Some(u2) = universe.step(p.1, l) else { continue };
                let d2 = p.0.and_then(|s| d.step(s, l));
                let q = (d2, u2);
                let to = match ids.get(&q) {
                    Some(&t) => t,
                    None => {
                        let t = trans.len() as StateId;
                        budget_check(trans.len() + 1)?;
                        ids.insert(q, t);
                        trans.push(Vec::new());
                        accepting.push(accept_of(&q));
                        queue.push_back(q);
                        t
                    }
                };
                row.push((l, to));
            }
            trans[from as usize] = row;
        }
        Ok(SyncAutomaton::from_parts(self.base, self.tracks, vec![0], accepting, trans))
    }

    /// Complement relative to an explicit universe automaton.
    pub fn complement_within(&self, universe: &SyncAutomaton) -> Result<SyncAutomaton> {
        self.same_alphabet(universe)?;
        let u = universe.determinize()?;
        self.complement_in(&ExplicitUniverse(&u))
    }

    /// `self ∩ universe`, following only the transitions of `self`.
    pub fn restrict_to<U: Universe>(&self, universe: &U) -> Result<SyncAutomaton> {
        if universe.tracks() != self.tracks {
            return Err(Error::AlphabetMismatch("universe arity".into()));
        }
        let mut ids: HashMap<(StateId, u64), StateId> = HashMap::new();
        let mut queue = VecDeque::new();
        let mut trans: Vec<Vec<(Letter, StateId)>> = Vec::new();
        let mut accepting = Vec::new();
        let mut initial = Vec::new();
        let mut intern = |p: (StateId, u64),
                          ids: &mut HashMap<(StateId, u64), StateId>,
                          queue: &mut VecDeque<(StateId, u64)>,
                          trans: &mut Vec<Vec<(Letter, StateId)>>|
         -> Result<StateId> {
            if let Some(&id) = ids.get(&p) {
                return Ok(id);
            }
            let id = trans.len() as StateId;
            budget_check(trans.len() + 1)?;
            ids.insert(p, id);
            trans.push(Vec::new());
            accepting.push(self.accepting[p.0 as usize] && universe.accepting(p.1));
            queue.push_back(p);
            Ok(id)
        };
        for &s in &self.initial {
            initial.push(intern((s, universe.start()), &mut ids, &mut queue, &mut trans)?);
        }
        while let Some((s, u)) = queue.pop_front() {
            let from = ids[&(s, u)];
            let mut row = Vec::new();
            for &(l, t) in &self.trans[s as usize] {
                if let Some(v) = universe.step(u, l) {
                    row.push((l, intern((t, v), &mut ids, &mut queue, &mut trans)?));
                }
            }
            trans[from as usize] = row;
        }
        Ok(SyncAutomaton::from_parts(self.base, self.tracks, initial, accepting, trans))
    }

    /// `self \ other`, computed as `self ∩ complement(other, self)`.
    pub fn difference(&self, other: &SyncAutomaton) -> Result<SyncAutomaton> {
        self.same_alphabet(other)?;
        let d = other.determinize()?;
        let s = self.determinize()?;
        let mut ids: HashMap<(StateId, Option<StateId>), StateId> = HashMap::new();
        let mut queue = VecDeque::new();
        let mut trans: Vec<Vec<(Letter, StateId)>> = Vec::new();
        let mut accepting = Vec::new();
        let acc = |p: &(StateId, Option<StateId>)| {
            s.accepting[p.0 as usize] && !p.1.map(|x| d.accepting[x as usize]).unwrap_or(false)
        };
        let start = (s.initial[0], Some(d.initial[0]));
        ids.insert(start, 0);
        trans.push(Vec::new());
        accepting.push(acc(&start));
        queue.push_back(start);
        while let Some(p) = queue.pop_front() {
            let from = ids[&p];
            let mut row = Vec::new();
            for &(l, t) in &s.trans[p.0 as usize] {
                let q = (t, p.1.and_then(|x| d.step(x, l)));
                let to = match ids.get(&q) {
                    Some(&x) => x,
                    None => {
                        let x = trans.len() as StateId;
                        budget_check(trans.len() + 1)?;
                        ids.insert(q, x);
                        trans.push(Vec::new());
                        accepting.push(acc(&q));
                        queue.push_back(q);
                        x
                    }
                };
                row.push((l, to));
            }
            trans[from as usize] = row;
        }
        Ok(SyncAutomaton::from_parts(self.base, self.tracks, vec![0], accepting, trans))
    }

    /// Existential projection onto the listed tracks (in the listed order).
    ///
    /// Letters that become entirely padding can only form a suffix of a
    /// well-formed word; they are removed by folding their acceptance into
    /// the states that reach them.
    pub fn project(&self, keep: &[usize]) -> Result<SyncAutomaton> {
        if keep.is_empty() {
            return Err(Error::Usage("projection onto no tracks".into()));
        }
        if keep.iter().any(|&t| t >= self.tracks) {
            return Err(Error::Usage("projection track out of range".into()));
        }
        let k = keep.len();
        let n = self.num_states();
        let mut eps_rev: Vec<Vec<StateId>> = vec![Vec::new(); n];
        let mut trans: Vec<Vec<(Letter, StateId)>> = vec![Vec::new(); n];
        for (s, row) in self.trans.iter().enumerate() {
            for &(l, t) in row {
                let p = l.select(keep);
                if p.is_all_pad(k) {
                    eps_rev[t as usize].push(s as StateId);
                } else {
                    trans[s].push((p, t));
                }
            }
        }
        let mut accepting = self.accepting.clone();
        let mut stack: Vec<StateId> =
            (0..n).filter(|&s| accepting[s]).map(|s| s as StateId).collect();
        while let Some(t) = stack.pop() {
            for &s in &eps_rev[t as usize] {
                if !accepting[s as usize] {
                    accepting[s as usize] = true;
                    stack.push(s);
                }
            }
        }
        Ok(SyncAutomaton::from_parts(self.base, k, self.initial.clone(), accepting, trans))
    }

    /// Permute tracks: result track `i` is input track `perm[i]`.
    pub fn reorder(&self, perm: &[usize]) -> Result<SyncAutomaton> {
        let mut seen = vec![false; self.tracks];
        if perm.len() != self.tracks {
            return Err(Error::Usage("reorder needs a full permutation".into()));
        }
        for &p in perm {
            if p >= self.tracks || seen[p] {
                return Err(Error::Usage("reorder needs a full permutation".into()));
            }
            seen[p] = true;
        }
        let trans = self
            .trans
            .iter()
            .map(|row| row.iter().map(|&(l, t)| (l.select(perm), t)).collect())
            .collect();
        Ok(SyncAutomaton::from_parts(
            self.base,
            self.tracks,
            self.initial.clone(),
            self.accepting.clone(),
            trans,
        ))
    }

    /// Add unconstrained tracks by joining with `free`, whose tracks land on
    /// `free_map`; the existing tracks land on `map`.
    pub fn cylindrify(
        &self,
        k: usize,
        map: &[usize],
        free: &SyncAutomaton,
        free_map: &[usize],
    ) -> Result<SyncAutomaton> {
        join(self, map, free, free_map, k)
    }

    /// Universal projection: `∀` over the dropped tracks, computed as
    /// `¬ ∃ ¬` relative to the given universes for the full and kept tracks.
    pub fn universal_project<U: Universe, V: Universe>(
        &self,
        keep: &[usize],
        full: &U,
        kept: &V,
    ) -> Result<SyncAutomaton> {
        let neg = self.complement_in(full)?;
        let ex = neg.project(keep)?;
        ex.complement_in(kept)?.minimize()
    }

    /// Rabin-Scott subset construction, bounded by the state budget.
    pub fn determinize(&self) -> Result<SyncAutomaton> {
        if self.deterministic {
            return Ok(self.clone());
        }
        let mut start = self.initial.clone();
        start.sort_unstable();
        start.dedup();
        let mut ids: HashMap<Vec<StateId>, StateId> = HashMap::new();
        let mut sets: Vec<Vec<StateId>> = Vec::new();
        let mut trans: Vec<Vec<(Letter, StateId)>> = Vec::new();
        let mut accepting = Vec::new();
        ids.insert(start.clone(), 0);
        accepting.push(start.iter().any(|&s| self.accepting[s as usize]));
        sets.push(start);
        trans.push(Vec::new());
        let mut i = 0;
        let mut moves: Vec<(Letter, StateId)> = Vec::new();
        while i < sets.len() {
            moves.clear();
            for &s in &sets[i] {
                moves.extend_from_slice(&self.trans[s as usize]);
            }
            moves.sort_unstable();
            moves.dedup();
            let mut row = Vec::new();
            let mut j = 0;
            while j < moves.len() {
                let l = moves[j].0;
                let mut target = Vec::new();
                while j < moves.len() && moves[j].0 == l {
                    target.push(moves[j].1);
                    j += 1;
                }
                let to = match ids.get(&target) {
                    Some(&t) => t,
                    None => {
                        let t = sets.len() as StateId;
                        budget_check(sets.len() + 1)?;
                        accepting.push(target.iter().any(|&s| self.accepting[s as usize]));
                        ids.insert(target.clone(), t);
                        sets.push(target);
                        trans.push(Vec::new());
                        t
                    }
                };
                row.push((l, to));
            }
            trans[i] = row;
            i += 1;
        }
        let mut d = SyncAutomaton::from_parts(self.base, self.tracks, vec![0], accepting, trans);
        d.deterministic = true;
        Ok(d)
    }

    /// Remove states that are unreachable or cannot reach acceptance.
    pub fn trim(&self) -> SyncAutomaton {
        let n = self.num_states();
        let mut reach = vec![false; n];
        let mut stack: Vec<StateId> = self.initial.clone();
        for &s in &stack {
            reach[s as usize] = true;
        }
        while let Some(s) = stack.pop() {
            for &(_, t) in &self.trans[s as usize] {
                if !reach[t as usize] {
                    reach[t as usize] = true;
                    stack.push(t);
                }
            }
        }
        let mut rev: Vec<Vec<StateId>> = vec![Vec::new(); n];
        for (s, row) in self.trans.iter().enumerate() {
            for &(_, t) in row {
                rev[t as usize].push(s as StateId);
            }
        }
        let mut co = vec![false; n];
        let mut stack: Vec<StateId> =
            (0..n).filter(|&s| self.accepting[s]).map(|s| s as StateId).collect();
        for &s in &stack {
            co[s as usize] = true;
        }
        while let Some(t) = stack.pop() {
            for &s in &rev[t as usize] {
                if !co[s as usize] {
                    co[s as usize] = true;
                    stack.push(s);
                }
            }
        }
        let keep: Vec<bool> = (0..n).map(|s| reach[s] && co[s]).collect();
        if !self.initial.iter().any(|&s| keep[s as usize]) {
            return SyncAutomaton::empty(self.base, self.tracks);
        }
        let mut new_id = vec![StateId::MAX; n];
        let mut count = 0;
        for s in 0..n {
            if keep[s] {
                new_id[s] = count;
                count += 1;
            }
        }
        let mut trans = Vec::with_capacity(count as usize);
        let mut accepting = Vec::with_capacity(count as usize);
        for s in 0..n {
            if keep[s] {
                accepting.push(self.accepting[s]);
                trans.push(
                    self.trans[s]
                        .iter()
                        .filter(|&&(_, t)| keep[t as usize])
                        .map(|&(l, t)| (l, new_id[t as usize]))
                        .collect(),
                );
            }
        }
        let initial = self
            .initial
            .iter()
            .filter(|&&s| keep[s as usize])
            .map(|&s| new_id[s as usize])
            .collect();
        SyncAutomaton::from_parts(self.base, self.tracks, initial, accepting, trans)
    }

    /// Determinize (if needed) and minimize; the result is canonical.
    pub fn minimize(&self) -> Result<SyncAutomaton> {
        let d = self.determinize()?.trim();
        let n = d.num_states();
        if n == 0 || !d.accepting.iter().any(|&a| a) {
            return Ok(SyncAutomaton::empty(self.base, self.tracks));
        }
        let mut class: Vec<u32> = d.accepting.iter().map(|&a| a as u32).collect();
        let mut count = {
            let mut c = class.clone();
            c.sort_unstable();
            c.dedup();
            c.len()
        };
        loop {
            let mut sig_ids: HashMap<(u32, Vec<(Letter, u32)>), u32> = HashMap::new();
            let mut next = vec![0u32; n];
            for s in 0..n {
                let sig: Vec<(Letter, u32)> =
                    d.trans[s].iter().map(|&(l, t)| (l, class[t as usize])).collect();
                let key = (class[s], sig);
                let len = sig_ids.len() as u32;
                next[s] = *sig_ids.entry(key).or_insert(len);
            }
            let new_count = sig_ids.len();
            class = next;
            if new_count == count {
                break;
            }
            count = new_count;
        }
        // breadth-first renumbering from the initial class
        let mut order: HashMap<u32, StateId> = HashMap::new();
        let mut repr: Vec<usize> = Vec::new();
        let mut queue = VecDeque::new();
        let s0 = d.initial[0] as usize;
        order.insert(class[s0], 0);
        repr.push(s0);
        queue.push_back(s0);
        while let Some(s) = queue.pop_front() {
            for &(_, t) in &d.trans[s] {
                let c = class[t as usize];
                if let std::collections::hash_map::Entry::Vacant(e) = order.entry(c) {
                    e.insert(repr.len() as StateId);
                    repr.push(t as usize);
                    queue.push_back(t as usize);
                }
            }
        }
        let trans = repr
            .iter()
            .map(|&s| d.trans[s].iter().map(|&(l, t)| (l, order[&class[t as usize]])).collect())
            .collect();
        let accepting = repr.iter().map(|&s| d.accepting[s]).collect();
        let mut m = SyncAutomaton::from_parts(self.base, self.tracks, vec![0], accepting, trans);
        m.deterministic = true;
        Ok(m)
    }
}
