//! Dyadic cells, hierarchical meshes given by regular languages of cell
//! barycentres, and the two geometric checks on them: nestedness of the
//! domains and connectivity of basis supports against the complement rings.
//!
//! A level-`l` cell with index `i` is the cube `prod [i_k/2^l, (i_k+1)/2^l]`;
//! it is named by its barycentre `(2i_k+1)/2^(l+1)`. A mesh with `N` levels
//! stores `L_1..L_(N-1)`, where `L_l` lists the level-`(l-1)` cells composing
//! the domain `Omega^l`.

mod assumption_b;
mod connectivity;
mod nested;
mod pattern;
mod spec;


pub use assumption_b::{
    assumption_b_violations, check_assumption_b, check_assumption_b_with, AssumptionBReport,
    Connectivity,
};
pub use connectivity::{
    cells_connected, connected_subsets, index_set, ConnectivityPattern, SubsetFamily,
    DEFAULT_ATOM_BUDGET,
};
pub use nested::{check_nested, shift_constants, NestedReport};
pub use pattern::{cell_class_automaton, Pattern};
pub use spec::{parse_pattern, LevelSource, MeshSpec};

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive};

use crate::automata::{join, SyncAutomaton};
use crate::error::{Error, Result};
use crate::numeration::{valid_encoding_automaton, Base};
use crate::Q;

/// A closed cube of the level-`level` grid.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Cell {
    pub level: u32,
    pub index: Vec<i64>,
}

impl Cell {
    pub fn new(level: u32, index: Vec<i64>) -> Cell {
        Cell { level, index }
    }

    pub fn dim(&self) -> usize {
        self.index.len()
    }

    /// The cell whose barycentre is `z`; every coordinate must be an odd
    /// multiple of the same `1/2^(l+1)`.
    pub fn from_barycentre(z: &[Q]) -> Result<Cell> {
        let mut level = None;
        let mut index = Vec::with_capacity(z.len());
        for c in z {
            let den = c.denom();
            let bits = den.bits();
            if bits < 2 || *den != BigInt::one() << (bits - 1) || c.numer().is_even() {
                return Err(Error::Usage(format!("{c} is not a cell barycentre coordinate")));
            }
            let l = (bits - 2) as u32;
            if level.is_some_and(|x| x != l) {
                return Err(Error::Usage("barycentre coordinates of different levels".into()));
            }
            level = Some(l);
            let i: BigInt = (c.numer() - BigInt::one()) / 2;
            index.push(i.to_i64().ok_or_else(|| Error::Usage("cell index too large".into()))?);
        }
        let level = level.ok_or_else(|| Error::Usage("empty point".into()))?;
        Ok(Cell { level, index })
    }

    pub fn barycentre(&self) -> Vec<Q> {
        barycentre(self)
    }

    /// The level-`(l-1)` cell containing this one.
    pub fn parent(&self) -> Option<Cell> {
        (self.level > 0).then(|| Cell {
            level: self.level - 1,
            index: self.index.iter().map(|i| i.div_euclid(2)).collect(),
        })
    }

    /// The cell of the coarser grid `level <= self.level` containing this one.
    pub fn ancestor(&self, level: u32) -> Cell {
        let k = self.level - level;
        Cell { level, index: self.index.iter().map(|i| i >> k).collect() }
    }

    /// The `2^d` level-`(l+1)` cells inside this one.
    pub fn children(&self) -> Vec<Cell> {
        let d = self.dim();
        (0..1u32 << d)
            .map(|bits| Cell {
                level: self.level + 1,
                index: (0..d).map(|k| 2 * self.index[k] + ((bits >> k) & 1) as i64).collect(),
            })
            .collect()
    }

    /// Translate by an integer offset on the same grid.
    pub fn offset(&self, by: &[i64]) -> Cell {
        Cell { level: self.level, index: self.index.iter().zip(by).map(|(a, b)| a + b).collect() }
    }

    /// Lower and upper corner.
    pub fn bounds(&self) -> (Vec<Q>, Vec<Q>) {
        let den = BigInt::one() << self.level;
        let lo = self.index.iter().map(|&i| Q::new(i.into(), den.clone())).collect();
        let hi = self.index.iter().map(|&i| Q::new((i + 1).into(), den.clone())).collect();
        (lo, hi)
    }
}

impl fmt::Display for Cell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let z: Vec<String> = self.barycentre().iter().map(|c| c.to_string()).collect();
        write!(f, "level {} cell at ({})", self.level, z.join(", "))
    }
}

/// A box `[lo, hi]` of the level-0 grid bounding explicit enumeration.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Window {
    pub lo: Vec<i64>,
    pub hi: Vec<i64>,
}

impl Window {
    /// `hi_k > lo_k` in every coordinate.
    pub fn new(lo: Vec<i64>, hi: Vec<i64>) -> Result<Window> {
        if lo.is_empty() || lo.len() != hi.len() || lo.iter().zip(&hi).any(|(a, b)| a >= b) {
            return Err(Error::Usage("window must be a nonempty box".into()));
        }
        Ok(Window { lo, hi })
    }

    pub fn dim(&self) -> usize {
        self.lo.len()
    }

    /// Level-`level` cells inside the window, in lexicographic order.
    pub fn cells(&self, level: u32) -> Vec<Cell> {
        let s = 1i64 << level;
        let mut out = vec![Vec::new()];
        for k in 0..self.dim() {
            out = out
                .into_iter()
                .flat_map(|p: Vec<i64>| {
                    (self.lo[k] * s..self.hi[k] * s).map(move |i| {
                        let mut q = p.clone();
                        q.push(i);
                        q
                    })
                })
                .collect();
        }
        out.into_iter().map(|index| Cell { level, index }).collect()
    }

    pub fn contains(&self, c: &Cell) -> bool {
        let s = 1i64 << c.level;
        c.index.iter().enumerate().all(|(k, &i)| self.lo[k] * s <= i && i < self.hi[k] * s)
    }
}

/// `z_k = (2 i_k + 1) / 2^(l+1)`.
pub fn barycentre(c: &Cell) -> Vec<Q> {
    let den = BigInt::one() << (c.level + 1);
    c.index.iter().map(|&i| Q::new((2 * i + 1).into(), den.clone())).collect()
}

/// Coordinatewise product of one-track automata, track `k` from `parts[k]`.
pub(crate) fn track_product(parts: &[SyncAutomaton]) -> Result<SyncAutomaton> {
    let mut acc = parts[0].clone();
    for (k, p) in parts.iter().enumerate().skip(1) {
        let amap: Vec<usize> = (0..k).collect();
        acc = join(&acc, &amap, p, &[k], k + 1)?.minimize()?;
    }
    Ok(acc)
}

/// All barycentres of level-`level` cells in `d` dimensions.
///
/// A barycentre coordinate has fractional part `(2k+1)/2^(l+1)`. In base 2
/// its fraction digits are `r 1` with `|r| = l`. For other even bases the
/// finite base-`b` expansions of these fractions are collected into a trie
/// and the integer part is left free.
pub fn level_filter_automaton(d: usize, level: u32, base: Base) -> Result<SyncAutomaton> {
    let one = cell_class_automaton(base, level, 1, |_, _| true)?;
    track_product(&vec![one; d])
}

/// Split `l` into its per-level parts `L ∩ filter(l-1)` for `l = 1..n-1`.
pub fn decompose_by_level(l: &SyncAutomaton, n: usize) -> Result<Vec<SyncAutomaton>> {
    (1..n)
        .map(|lev| {
            let f = level_filter_automaton(l.tracks(), (lev - 1) as u32, l.base())?;
            l.intersect(&f)?.minimize()
        })
        .collect()
}

/// Levels `0..N-1`, with `L_1..L_(N-1)` as automata over `d` tracks.
#[derive(Clone, Debug)]
pub struct HierarchicalMesh {
    base: Base,
    dim: usize,
    degree: u32,
    levels: Vec<SyncAutomaton>,
}

impl HierarchicalMesh {
    /// `levels[k]` is `L_(k+1)`; each must contain only barycentres of
    /// level-`k` cells.
    pub fn new(base: Base, dim: usize, degree: u32, levels: Vec<SyncAutomaton>) -> Result<Self> {
        let valid = valid_encoding_automaton(base, dim)?;
        let mut out = Vec::with_capacity(levels.len());
        for (k, l) in levels.into_iter().enumerate() {
            if l.tracks() != dim || l.base() != base {
                return Err(Error::AlphabetMismatch(format!("level {} automaton", k + 1)));
            }
            let filter = level_filter_automaton(dim, k as u32, base)?;
            let l = l.intersect(&valid)?.minimize()?;
            if let Some(w) = l.difference(&filter)?.shortest_word() {
                return Err(Error::Inconsistent(format!(
                    "level {} language contains {:?}, not a level-{} barycentre",
                    k + 1,
                    crate::numeration::decode_point(&w.unconvolve(), base)
                        .map(|p| p.iter().map(|c| c.to_string()).collect::<Vec<_>>()),
                    k
                )));
            }
            out.push(l);
        }
        Ok(HierarchicalMesh { base, dim, degree, levels: out })
    }

    /// The uniform mesh with a single level.
    pub fn uniform(base: Base, dim: usize, degree: u32) -> Self {
        HierarchicalMesh { base, dim, degree, levels: Vec::new() }
    }

    pub fn base(&self) -> Base {
        self.base
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn with_degree(&self, degree: u32) -> Self {
        HierarchicalMesh { degree, ..self.clone() }
    }

    /// Number of levels `N`.
    pub fn num_levels(&self) -> usize {
        self.levels.len() + 1
    }

    /// `L_l` for `1 <= l <= N-1`.
    pub fn domain(&self, l: usize) -> &SyncAutomaton {
        &self.levels[l - 1]
    }

    pub fn domains(&self) -> &[SyncAutomaton] {
        &self.levels
    }

    /// Whether the level-`(l-1)` cell `c` lies in `Omega^l`.
    pub fn contains_cell(&self, l: usize, c: &Cell) -> bool {
        if l == 0 {
            return true;
        }
        if l >= self.num_levels() || c.level as usize + 1 != l {
            return false;
        }
        let syms = crate::numeration::encode_point(&c.barycentre(), self.base)
            .expect("barycentres are representable for even bases");
        self.levels[l - 1].accepts(&crate::automata::convolve(&syms))
    }

    /// A spec naming one automaton file `<stem>_L<k>.aut` per level.
    pub fn to_spec(&self, stem: &str) -> MeshSpec {
        let levels = self
            .levels
            .iter()
            .enumerate()
            .map(|(k, a)| LevelSource::Automaton(format!("{stem}_L{}.aut", k + 1).into(), a.clone()))
            .collect();
        MeshSpec { base: self.base, dim: self.dim, degree: self.degree, levels }
    }

    /// This mesh with one more level appended.
    pub fn push_level(&self, l_new: SyncAutomaton) -> Result<Self> {
        let mut levels = self.levels.clone();
        levels.push(l_new);
        HierarchicalMesh::new(self.base, self.dim, self.degree, levels)
    }
}
