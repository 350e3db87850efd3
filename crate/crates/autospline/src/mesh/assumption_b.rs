use std::collections::{HashMap, VecDeque};

use num_bigint::BigInt;
use num_traits::One;

use super::connectivity::{cells_connected, offset_range, DEFAULT_ATOM_BUDGET};
use super::{level_filter_automaton, Cell, HierarchicalMesh};
use crate::automata::{join, state_budget, Letter, StateId, SyncAutomaton};
use crate::error::{Error, Result};
use crate::numeration::{decode_point, translation_automaton};
use crate::Q;

/// How the intersection of a closed support with the ring is formed.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Connectivity {
    /// The exact set: the closed support meets the ring in the support cells
    /// outside the next domain and in the boundary points it shares with
    /// outside cells around it.
    #[default]
    ClosedSupport,
    /// Only the closed support cells outside the next domain.
    CellUnion,
}

/// Outcome of [`check_assumption_b`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AssumptionBReport {
    pub holds: bool,
    /// On failure: the level and the anchor cell of a basis function whose
    /// closed support meets the ring in a disconnected set.
    pub witness: Option<(usize, Cell)>,
}

/// Geometry of one level check, in units of level-`l` cells relative to the
/// anchor cell.
struct Window {
    d: usize,
    lo: i64,
    hi: i64,
    /// Offsets that are probed, in lexicographic order.
    offsets: Vec<Vec<i64>>,
    /// Bits of `offsets` lying in `I_m`.
    support_mask: u64,
    mode: Connectivity,
}

impl Window {
    fn new(d: usize, m: u32, mode: Connectivity) -> Window {
        let (lo, hi) = offset_range(m);
        let (a, b) = match mode {
            Connectivity::ClosedSupport => (lo - 1, hi + 1),
            Connectivity::CellUnion => (lo, hi),
        };
        let mut offsets = vec![Vec::new()];
        for _ in 0..d {
            offsets = offsets
                .into_iter()
                .flat_map(|p| {
                    (a..=b).map(move |i| {
                        let mut q = p.clone();
                        q.push(i);
                        q
                    })
                })
                .collect();
        }
        let mut support_mask = 0u64;
        for (k, o) in offsets.iter().enumerate() {
            if o.iter().all(|&i| lo <= i && i <= hi) {
                support_mask |= 1 << k;
            }
        }
        Window { d, lo, hi, offsets, support_mask, mode }
    }

    /// `outside` has a bit per probed cell that is not in the next domain.
    fn violates(&self, outside: u64) -> bool {
        if outside & self.support_mask == 0 {
            return false;
        }
        match self.mode {
            Connectivity::CellUnion => {
                let cells: Vec<Vec<i64>> = self
                    .offsets
                    .iter()
                    .enumerate()
                    .filter(|(k, _)| outside >> k & 1 == 1)
                    .map(|(_, o)| o.clone())
                    .collect();
                !cells_connected(&cells)
            }
            Connectivity::ClosedSupport => {
                // each outside cell meets the closed support in a box
                let boxes: Vec<Vec<(i64, i64)>> = self
                    .offsets
                    .iter()
                    .enumerate()
                    .filter(|(k, _)| outside >> k & 1 == 1)
                    .map(|(_, o)| {
                        o.iter().map(|&i| (i.max(self.lo), (i + 1).min(self.hi + 1))).collect()
                    })
                    .collect();
                let n = boxes.len();
                let mut parent: Vec<usize> = (0..n).collect();
                fn find(p: &mut [usize], mut x: usize) -> usize {
                    while p[x] != x {
                        p[x] = p[p[x]];
                        x = p[x];
                    }
                    x
                }
                for i in 0..n {
                    for j in i + 1..n {
                        let meet = (0..self.d).all(|k| {
                            boxes[i][k].0.max(boxes[j][k].0) <= boxes[i][k].1.min(boxes[j][k].1)
                        });
                        if meet {
                            let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                            parent[a] = b;
                        }
                    }
                }
                let root = find(&mut parent, 0);
                (1..n).any(|i| find(&mut parent, i) != root)
            }
        }
    }
}

/// `{u : u + c ∈ L}` as a minimal automaton.
pub(crate) fn shifted_membership(l: &SyncAutomaton, c: &[Q]) -> Result<SyncAutomaton> {
    let d = c.len();
    let t = translation_automaton(c, l.base())?;
    let all: Vec<usize> = (0..2 * d).collect();
    let second: Vec<usize> = (d..2 * d).collect();
    let keep: Vec<usize> = (0..d).collect();
    join(&t, &all, l, &second, 2 * d)?.project(&keep)?.minimize()
}

/// Anchors of level-`level` basis functions violating the connectivity
/// condition against `Omega^(level+1)`, for `0 <= level <= N-2`.
///
/// One deterministic product runs the level filter together with the
/// automata `{u : u + t_i ∈ L_(level+1)}` for all probed offsets `i`; its
/// accepting states are those whose pattern of outside cells is relevant and
/// disconnected.
pub fn assumption_b_violations(
    mesh: &HierarchicalMesh,
    level: usize,
    mode: Connectivity,
) -> Result<SyncAutomaton> {
    let d = mesh.dim();
    let m = mesh.degree();
    let atoms = (m as usize + 1).checked_pow(d as u32).unwrap_or(usize::MAX);
    if atoms > DEFAULT_ATOM_BUDGET {
        return Err(Error::Resource(format!(
            "(m+1)^d = {atoms} exceeds the budget of {DEFAULT_ATOM_BUDGET}"
        )));
    }
    if level + 1 >= mesh.num_levels() {
        return Err(Error::Usage(format!("no domain above level {level}")));
    }
    let win = Window::new(d, m, mode);
    let next = mesh.domain(level + 1);
    let den = BigInt::one() << level;
    let parts: Vec<SyncAutomaton> = win
        .offsets
        .iter()
        .map(|o| {
            let c: Vec<Q> = o.iter().map(|&i| Q::new(i.into(), den.clone())).collect();
            shifted_membership(next, &c)?.determinize()
        })
        .collect::<Result<_>>()?;
    let filter = level_filter_automaton(d, level as u32, mesh.base())?;

    type Key = (StateId, Vec<Option<StateId>>);
    let mut ids: HashMap<Key, StateId> = HashMap::new();
    let mut queue: VecDeque<Key> = VecDeque::new();
    let mut trans: Vec<Vec<(Letter, StateId)>> = Vec::new();
    let mut accepting: Vec<bool> = Vec::new();
    let mut verdicts: HashMap<u64, bool> = HashMap::new();
    let budget = state_budget();

    let mut intern = |key: Key,
                      queue: &mut VecDeque<Key>,
                      trans: &mut Vec<Vec<(Letter, StateId)>>,
                      accepting: &mut Vec<bool>|
     -> Result<StateId> {
        if let Some(&id) = ids.get(&key) {
            return Ok(id);
        }
        if trans.len() >= budget {
            return Err(Error::StateBudget(budget));
        }
        let acc = filter.is_accepting(key.0) && {
            let mut outside = 0u64;
            for (k, s) in key.1.iter().enumerate() {
                if !s.is_some_and(|s| parts[k].is_accepting(s)) {
                    outside |= 1 << k;
                }
            }
            *verdicts.entry(outside).or_insert_with(|| win.violates(outside))
        };
        let id = trans.len() as StateId;
        ids.insert(key.clone(), id);
        trans.push(Vec::new());
        accepting.push(acc);
        queue.push_back(key);
        Ok(id)
    };

    let start: Key = (filter.initial_states()[0], parts.iter().map(|p| Some(p.initial_states()[0])).collect());
    intern(start, &mut queue, &mut trans, &mut accepting)?;
    let mut next_id = 0usize;
    while let Some((fs, states)) = queue.pop_front() {
        let mut row = Vec::new();
        for &(l, ft) in filter.transitions(fs) {
            let succ: Vec<Option<StateId>> = states
                .iter()
                .zip(&parts)
                .map(|(s, p)| s.and_then(|s| p.step(s, l)))
                .collect();
            let t = intern((ft, succ), &mut queue, &mut trans, &mut accepting)?;
            row.push((l, t));
        }
        trans[next_id] = row;
        next_id += 1;
    }
    SyncAutomaton::from_parts(mesh.base(), d, vec![0], accepting, trans).trim().minimize()
}

/// Decide the connectivity condition for every level `0..N-2`. A failing
/// level yields the anchor cell of the shortest violating basis function.
pub fn check_assumption_b(mesh: &HierarchicalMesh) -> Result<AssumptionBReport> {
    check_assumption_b_with(mesh, Connectivity::ClosedSupport)
}

pub fn check_assumption_b_with(
    mesh: &HierarchicalMesh,
    mode: Connectivity,
) -> Result<AssumptionBReport> {
    for level in 0..mesh.num_levels().saturating_sub(1) {
        let bad = assumption_b_violations(mesh, level, mode)?;
        if let Some(w) = bad.shortest_word() {
            let z = decode_point(&w.unconvolve(), mesh.base())?;
            return Ok(AssumptionBReport {
                holds: false,
                witness: Some((level, Cell::from_barycentre(&z)?)),
            });
        }
    }
    Ok(AssumptionBReport { holds: true, witness: None })
}
