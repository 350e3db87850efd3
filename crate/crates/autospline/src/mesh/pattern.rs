use std::collections::{HashMap, VecDeque};

use num_bigint::BigInt;
use num_traits::{One, ToPrimitive};

use super::{track_product, Cell};
use crate::automata::{convolve, Letter, StateId, SyncAutomaton};
use crate::error::{Error, Result};
use crate::numeration::{encode_point, valid_encoding_automaton, Base};
use crate::Q;

/// Digits of a finite base-`b` fraction `num / 2^bits`, most significant
/// first.
fn fraction_digits(mut num: u128, bits: u32, b: u128) -> Vec<u8> {
    let den = 1u128 << bits;
    let mut out = Vec::new();
    while num != 0 {
        num *= b;
        out.push((num / den) as u8);
        num %= den;
    }
    out
}

#[derive(Default)]
struct TrieNode {
    children: [Option<usize>; 16],
    /// `k` when the path spells the fraction `(2k+1)/2^(l+1)`.
    terminal: Option<u64>,
}

#[derive(Clone, Copy, PartialEq, Eq, Hash)]
enum Frac {
    Node(usize),
    Done(u64),
}

/// One-track automaton of the barycentres of level-`level` cells whose index
/// `i` satisfies `accept(i >= 0, i mod period)`.
///
/// The index of `z = ±(n + f)` is `n 2^l + k` for `z > 0` and
/// `-(n 2^l + k) - 1` for `z < 0`, where `f = (2k+1)/2^(l+1)`. The automaton
/// tracks `n mod period` while reading the integer digits and identifies `f`
/// through a trie of its finitely many expansions.
pub fn cell_class_automaton(
    base: Base,
    level: u32,
    period: u64,
    accept: impl Fn(bool, u64) -> bool,
) -> Result<SyncAutomaton> {
    if level > 40 || period == 0 {
        return Err(Error::Usage(format!("level {level} or period {period} unsupported")));
    }
    let b = base.get() as u64;
    let mut trie = vec![TrieNode::default()];
    for k in 0..1u64 << level {
        let digits = fraction_digits(2 * k as u128 + 1, level + 1, b as u128);
        let mut node = 0;
        for &dg in &digits {
            node = match trie[node].children[dg as usize] {
                Some(c) => c,
                None => {
                    trie.push(TrieNode::default());
                    let c = trie.len() - 1;
                    trie[node].children[dg as usize] = Some(c);
                    c
                }
            };
        }
        trie[node].terminal = Some(k);
    }
    let scale = ((1u128 << level) % period as u128) as u64;

    type Key = (bool, Frac, u64, u64);
    let mut ids: HashMap<Key, StateId> = HashMap::new();
    let mut queue: VecDeque<Key> = VecDeque::new();
    let mut trans: Vec<Vec<(Letter, StateId)>> = vec![Vec::new()];
    let mut accepting = vec![false];
    let mut intern = |key: Key,
                      trans: &mut Vec<Vec<(Letter, StateId)>>,
                      accepting: &mut Vec<bool>,
                      queue: &mut VecDeque<Key>|
     -> StateId {
        *ids.entry(key).or_insert_with(|| {
            let (neg, frac, res, _) = key;
            let k = match frac {
                Frac::Node(n) => trie[n].terminal,
                Frac::Done(k) => Some(k),
            };
            let acc = k.is_some_and(|k| {
                let x = (res * scale + k) % period;
                let r = if neg { (2 * period - x - 1) % period } else { x };
                accept(!neg, r)
            });
            trans.push(Vec::new());
            accepting.push(acc);
            queue.push_back(key);
            (trans.len() - 1) as StateId
        })
    };
    for (sign, neg) in [(base.plus_sign(), false), (base.minus_sign(), true)] {
        let s = intern((neg, Frac::Node(0), 0, 1 % period), &mut trans, &mut accepting, &mut queue);
        trans[0].push((Letter::from_symbols(&[sign]), s));
    }
    let mut order: Vec<Key> = Vec::new();
    while let Some(key) = queue.pop_front() {
        order.push(key);
        let (neg, frac, res, w) = key;
        let mut row = Vec::new();
        for alpha in 0..b {
            let res2 = (res + alpha * w) % period;
            let w2 = (w * b) % period;
            for beta in 0..b {
                let mut next = Vec::new();
                match frac {
                    Frac::Node(n) => {
                        if let Some(c) = trie[n].children[beta as usize] {
                            next.push(Frac::Node(c));
                        }
                        if beta == 0 {
                            if let Some(k) = trie[n].terminal {
                                next.push(Frac::Done(k));
                            }
                        }
                    }
                    Frac::Done(k) => {
                        if beta == 0 {
                            next.push(Frac::Done(k));
                        }
                    }
                }
                let l = Letter::from_symbols(&[base.column(alpha as u8, beta as u8)]);
                for f in next {
                    let t = intern((neg, f, res2, w2), &mut trans, &mut accepting, &mut queue);
                    row.push((l, t));
                }
            }
        }
        // states after the start state are numbered in queue order
        trans[order.len()] = row;
    }
    let nfa = SyncAutomaton::from_parts(base, 1, vec![0], accepting, trans);
    nfa.intersect(&valid_encoding_automaton(base, 1)?)?.minimize()
}

/// A generator for the cells of one mesh level.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Pattern {
    /// Cells inside the closed box `prod [lo_k, hi_k]`.
    Box { lo: Vec<Q>, hi: Vec<Q> },
    /// The listed cells, given by barycentres.
    Cells(Vec<Vec<Q>>),
    /// Cells whose index modulo `period` is one of the residue tuples.
    Periodic { period: u64, residues: Vec<Vec<u64>> },
    /// Like `Periodic` for indices `>= 0`, mirrored through the origin on
    /// each axis: a negative index `i` is tested as `-i-1`.
    Symmetric { period: u64, residues: Vec<Vec<u64>> },
}

fn floor_scaled(x: &Q, level: u32) -> BigInt {
    (x * Q::from_integer(BigInt::one() << level)).floor().to_integer()
}

fn ceil_scaled(x: &Q, level: u32) -> BigInt {
    (x * Q::from_integer(BigInt::one() << level)).ceil().to_integer()
}

impl Pattern {
    pub fn dim(&self) -> Option<usize> {
        match self {
            Pattern::Box { lo, .. } => Some(lo.len()),
            Pattern::Cells(cs) => cs.first().map(Vec::len),
            Pattern::Periodic { residues, .. } | Pattern::Symmetric { residues, .. } => {
                residues.first().map(Vec::len)
            }
        }
    }

    /// Direct membership test for a cell, without automata.
    pub fn contains(&self, c: &Cell) -> bool {
        match self {
            Pattern::Box { lo, hi } => c.index.iter().enumerate().all(|(k, &i)| {
                let i = BigInt::from(i);
                ceil_scaled(&lo[k], c.level) <= i && i < floor_scaled(&hi[k], c.level)
            }),
            Pattern::Cells(cs) => {
                let z = c.barycentre();
                cs.contains(&z)
            }
            Pattern::Periodic { period, residues } => {
                let p = *period as i64;
                let r: Vec<u64> = c.index.iter().map(|i| i.rem_euclid(p) as u64).collect();
                residues.contains(&r)
            }
            Pattern::Symmetric { period, residues } => {
                let p = *period as i64;
                let r: Vec<u64> = c
                    .index
                    .iter()
                    .map(|&i| if i >= 0 { i % p } else { (-i - 1) % p } as u64)
                    .collect();
                residues.contains(&r)
            }
        }
    }

    /// The barycentres of the level-`level` cells of the pattern.
    pub fn automaton(&self, base: Base, d: usize, level: u32) -> Result<SyncAutomaton> {
        if self.dim().is_some_and(|x| x != d) {
            return Err(Error::Usage("pattern dimension differs from mesh dimension".into()));
        }
        match self {
            Pattern::Box { lo, hi } => {
                let mut ranges = Vec::with_capacity(d);
                for k in 0..d {
                    let a = ceil_scaled(&lo[k], level).to_i64();
                    let b = floor_scaled(&hi[k], level).to_i64();
                    let (Some(a), Some(b)) = (a, b) else {
                        return Err(Error::Usage("box bounds too large".into()));
                    };
                    ranges.push(a..b);
                }
                let count: u128 = ranges.iter().map(|r| r.clone().count() as u128).product();
                if count > 2_000_000 {
                    return Err(Error::Resource(format!("box with {count} cells")));
                }
                let mut words = Vec::new();
                let mut idx: Vec<i64> = ranges.iter().map(|r| r.start).collect();
                if ranges.iter().any(|r| r.is_empty()) {
                    return Ok(SyncAutomaton::empty(base, d));
                }
                loop {
                    let z = Cell::new(level, idx.clone()).barycentre();
                    words.push(convolve(&encode_point(&z, base)?));
                    let mut k = 0;
                    loop {
                        if k == d {
                            return SyncAutomaton::from_words(base, d, &words).minimize();
                        }
                        idx[k] += 1;
                        if idx[k] < ranges[k].end {
                            break;
                        }
                        idx[k] = ranges[k].start;
                        k += 1;
                    }
                }
            }
            Pattern::Cells(cs) => {
                let mut words = Vec::new();
                for z in cs {
                    let c = Cell::from_barycentre(z)?;
                    if c.level != level {
                        return Err(Error::Usage(format!("{c} listed for level {level}")));
                    }
                    words.push(convolve(&encode_point(z, base)?));
                }
                SyncAutomaton::from_words(base, d, &words).minimize()
            }
            Pattern::Periodic { period, residues } | Pattern::Symmetric { period, residues } => {
                let mirrored = matches!(self, Pattern::Symmetric { .. });
                let mut acc = SyncAutomaton::empty(base, d);
                for tuple in residues {
                    let mut parts = Vec::with_capacity(d);
                    for &r in tuple {
                        let p = *period;
                        parts.push(cell_class_automaton(base, level, p, move |nonneg, x| {
                            if mirrored && !nonneg {
                                x == (p - 1 - r % p) % p
                            } else {
                                x == r % p
                            }
                        })?);
                    }
                    acc = acc.union(&track_product(&parts)?)?;
                }
                acc.minimize()
            }
        }
    }
}
