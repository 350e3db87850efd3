use crate::error::{Error, Result};

/// Default bound on `(m+1)^d`, the number of cells in a basis support.
pub const DEFAULT_ATOM_BUDGET: usize = 25;

/// Largest family that [`SubsetFamily::patterns`] will materialize.
const MATERIALIZE_LIMIT: usize = 16;

/// The offsets `I_m` of the cells of a support relative to its anchor cell,
/// in lexicographic order: `-m/2..m/2` per axis for even `m`,
/// `-(m+1)/2..(m-1)/2` for odd `m`.
pub fn index_set(d: usize, m: u32) -> Vec<Vec<i64>> {
    let (lo, hi) = offset_range(m);
    let mut out = vec![Vec::new()];
    for _ in 0..d {
        out = out
            .into_iter()
            .flat_map(|p| {
                (lo..=hi).map(move |i| {
                    let mut q = p.clone();
                    q.push(i);
                    q
                })
            })
            .collect();
    }
    out
}

/// Inclusive per-axis range of `I_m`.
pub(crate) fn offset_range(m: u32) -> (i64, i64) {
    let m = m as i64;
    if m % 2 == 0 {
        (-m / 2, m / 2)
    } else {
        (-(m + 1) / 2, (m - 1) / 2)
    }
}

/// A subset `J` of `I_m` with the connectivity of the union of its closed
/// unit cells.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConnectivityPattern {
    pub degree: u32,
    pub dim: usize,
    pub subset: Vec<Vec<i64>>,
    pub connected: bool,
}

fn find(parent: &mut [usize], mut x: usize) -> usize {
    while parent[x] != x {
        parent[x] = parent[parent[x]];
        x = parent[x];
    }
    x
}

/// Closed unit cells at the given integer offsets form a connected set iff
/// their touching graph (cells whose closures share a point) is connected.
pub fn cells_connected(cells: &[Vec<i64>]) -> bool {
    let n = cells.len();
    let mut parent: Vec<usize> = (0..n).collect();
    for i in 0..n {
        for j in i + 1..n {
            if cells[i].iter().zip(&cells[j]).all(|(a, b)| (a - b).abs() <= 1) {
                let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                parent[a] = b;
            }
        }
    }
    n > 0 && (0..n).all(|i| find(&mut parent, i) == find(&mut parent, 0))
}

/// All nonempty subsets of `I_m`, indexed by bit masks over [`index_set`].
#[derive(Clone, Debug)]
pub struct SubsetFamily {
    pub degree: u32,
    pub dim: usize,
    cells: Vec<Vec<i64>>,
}

impl SubsetFamily {
    pub fn index_set(&self) -> &[Vec<i64>] {
        &self.cells
    }

    /// Number of nonempty subsets.
    pub fn len(&self) -> u64 {
        (1u64 << self.cells.len()) - 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Bit mask of a subset given by offsets; `None` if an offset lies
    /// outside `I_m`.
    pub fn mask_of(&self, subset: &[Vec<i64>]) -> Option<u64> {
        subset.iter().try_fold(0u64, |m, c| {
            self.cells.iter().position(|x| x == c).map(|p| m | 1 << p)
        })
    }

    pub fn pattern(&self, mask: u64) -> ConnectivityPattern {
        let subset: Vec<Vec<i64>> = self
            .cells
            .iter()
            .enumerate()
            .filter(|(i, _)| mask >> i & 1 == 1)
            .map(|(_, c)| c.clone())
            .collect();
        let connected = cells_connected(&subset);
        ConnectivityPattern { degree: self.degree, dim: self.dim, subset, connected }
    }

    /// Membership of `J` in the family of connected subsets.
    pub fn is_connected(&self, mask: u64) -> bool {
        mask != 0 && self.pattern(mask).connected
    }

    /// Every nonempty subset with its flag, lazily.
    pub fn iter(&self) -> impl Iterator<Item = ConnectivityPattern> + '_ {
        (1..=self.len()).map(|m| self.pattern(m))
    }

    /// Every nonempty subset with its flag; refused above `2^16` subsets.
    pub fn patterns(&self) -> Result<Vec<ConnectivityPattern>> {
        if self.cells.len() > MATERIALIZE_LIMIT {
            return Err(Error::Resource(format!(
                "2^{} subsets are too many to list",
                self.cells.len()
            )));
        }
        Ok(self.iter().collect())
    }
}

/// The family of nonempty subsets `J ⊆ I_m` with their connectivity, for
/// `(m+1)^d` up to [`DEFAULT_ATOM_BUDGET`].
pub fn connected_subsets(d: usize, m: u32) -> Result<SubsetFamily> {
    let atoms = (m as usize + 1).checked_pow(d as u32).unwrap_or(usize::MAX);
    if d == 0 || atoms > DEFAULT_ATOM_BUDGET {
        return Err(Error::Resource(format!(
            "(m+1)^d = {atoms} exceeds the budget of {DEFAULT_ATOM_BUDGET}"
        )));
    }
    Ok(SubsetFamily { degree: m, dim: d, cells: index_set(d, m) })
}
