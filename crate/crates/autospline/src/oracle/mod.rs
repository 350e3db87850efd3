//! Brute-force geometry and arithmetic over explicit cells in a bounded
//! window. Nothing here runs an automaton: domains are queried through
//! [`Domains`], and B-splines are evaluated by the plain recursion.

use std::collections::{BTreeSet, HashMap, VecDeque};

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::kraft::BasisFunctionId;
use crate::mesh::{Cell, LevelSource, MeshSpec, Window};
use crate::Q;

/// Explicit membership of cells in the domains `Omega^1..Omega^(N-1)`.
pub trait Domains {
    fn dim(&self) -> usize;
    fn num_levels(&self) -> usize;
    /// Whether the level-`(l-1)` cell `c` lies in `Omega^l`, `1 <= l <= N-1`.
    fn contains(&self, l: usize, c: &Cell) -> bool;

    /// Whether an arbitrary cell of level `>= l-1` lies in `Omega^l`
    /// (`Omega^0` is everything).
    fn covers(&self, l: usize, c: &Cell) -> bool {
        if l == 0 {
            return true;
        }
        if l >= self.num_levels() {
            return false;
        }
        let k = c.level - (l as u32 - 1);
        let up = Cell::new(l as u32 - 1, c.index.iter().map(|i| i.div_euclid(1 << k)).collect());
        self.contains(l, &up)
    }
}

impl Domains for MeshSpec {
    fn dim(&self) -> usize {
        self.dim
    }

    fn num_levels(&self) -> usize {
        MeshSpec::num_levels(self)
    }

    fn contains(&self, l: usize, c: &Cell) -> bool {
        match &self.levels[l - 1] {
            LevelSource::Patterns(ps) => ps.iter().any(|p| p.contains(c)),
            LevelSource::Automaton(..) => self.contains_cell(l, c),
        }
    }
}

/// Domains listed cell by cell; `levels[k]` holds the cells of `Omega^(k+1)`.
#[derive(Clone, Debug, Default)]
pub struct CellSets {
    pub dim: usize,
    pub levels: Vec<BTreeSet<Cell>>,
}

impl Domains for CellSets {
    fn dim(&self) -> usize {
        self.dim
    }

    fn num_levels(&self) -> usize {
        self.levels.len() + 1
    }

    fn contains(&self, l: usize, c: &Cell) -> bool {
        self.levels[l - 1].contains(c)
    }
}

/// First level `l` and level-`(l-1)` cell of `Omega^l` in the window whose
/// parent is not in `Omega^(l-1)`.
pub fn oracle_nested_violation(dom: &dyn Domains, w: &Window) -> Option<(usize, Cell)> {
    for l in 2..dom.num_levels() {
        for c in w.cells(l as u32 - 1) {
            if dom.contains(l, &c) && !dom.covers(l - 1, &c) {
                return Some((l, c));
            }
        }
    }
    None
}

pub fn oracle_nested(dom: &dyn Domains, w: &Window) -> bool {
    oracle_nested_violation(dom, w).is_none()
}

/// Closed unit cubes at integer positions, tested through a breadth-first
/// search over pairs sharing a boundary point.
pub fn oracle_connected(cells: &[Vec<i64>]) -> bool {
    if cells.is_empty() {
        return false;
    }
    let touch = |a: &[i64], b: &[i64]| a.iter().zip(b).all(|(x, y)| (x - y).abs() <= 1);
    let mut seen = vec![false; cells.len()];
    let mut queue = VecDeque::from([0usize]);
    seen[0] = true;
    while let Some(i) = queue.pop_front() {
        for j in 0..cells.len() {
            if !seen[j] && touch(&cells[i], &cells[j]) {
                seen[j] = true;
                queue.push_back(j);
            }
        }
    }
    seen.into_iter().all(|s| s)
}

/// First knot index of the support of `N_{i,m}` anchored at `a`.
fn first_knot(anchor: i64, m: u32) -> i64 {
    anchor - (m as i64 + 1) / 2
}

fn product<T: Clone>(ranges: &[Vec<T>]) -> Vec<Vec<T>> {
    let mut out = vec![Vec::new()];
    for r in ranges {
        out = out
            .into_iter()
            .flat_map(|p: Vec<T>| {
                r.iter().map(move |x| {
                    let mut q = p.clone();
                    q.push(x.clone());
                    q
                })
            })
            .collect();
    }
    out
}

fn support_cells(f: &BasisFunctionId) -> Vec<Cell> {
    let m = f.degree as i64;
    let ranges: Vec<Vec<i64>> = f
        .anchor
        .index
        .iter()
        .map(|&a| {
            let i = first_knot(a, f.degree);
            (i..=i + m).collect()
        })
        .collect();
    product(&ranges).into_iter().map(|ix| Cell::new(f.anchor.level, ix)).collect()
}

/// Whether the closed support of `f` meets the closure of the complement of
/// `Omega^(l+1)` in a disconnected set, for a function that meets the ring.
///
/// The closed support is cut into vertices and edges of the level-`l` grid;
/// a vertex or edge belongs to the set iff one of the cells around it lies
/// outside `Omega^(l+1)`. The set is connected iff this graph is.
fn support_ring_disconnected(dom: &dyn Domains, f: &BasisFunctionId) -> bool {
    let l = f.level() as usize;
    let d = f.dim();
    let outside = |ix: &[i64]| !dom.covers(l + 1, &Cell::new(l as u32, ix.to_vec()));
    if !support_cells(f).iter().any(|c| outside(&c.index)) {
        return false;
    }
    let m = f.degree as i64;
    let first: Vec<i64> = f.anchor.index.iter().map(|&a| first_knot(a, f.degree)).collect();
    let verts = product(&first.iter().map(|&i| (i..=i + m + 1).collect::<Vec<_>>()).collect::<Vec<_>>());
    // the cells around a face: each free coordinate may step down by one
    let around = |p: &[i64], fixed: Option<usize>| -> bool {
        let choices: Vec<Vec<i64>> = (0..d)
            .map(|k| if Some(k) == fixed { vec![p[k]] } else { vec![p[k] - 1, p[k]] })
            .collect();
        product(&choices).iter().any(|c| outside(c))
    };
    let ids: HashMap<Vec<i64>, usize> =
        verts.iter().filter(|v| around(v, None)).cloned().enumerate().map(|(i, v)| (v, i)).collect();
    let mut adj = vec![Vec::new(); ids.len()];
    for (v, &i) in &ids {
        for k in 0..d {
            let mut u = v.clone();
            u[k] += 1;
            if let Some(&j) = ids.get(&u) {
                // edge from v along axis k: the cells around it keep coordinate k at v[k]
                if around(v, Some(k)) {
                    adj[i].push(j);
                    adj[j].push(i);
                }
            }
        }
    }
    let mut seen = vec![false; ids.len()];
    let mut queue = VecDeque::from([0usize]);
    seen[0] = true;
    while let Some(i) = queue.pop_front() {
        for &j in &adj[i] {
            if !seen[j] {
                seen[j] = true;
                queue.push_back(j);
            }
        }
    }
    !seen.into_iter().all(|s| s)
}

/// Level `l` and anchor of the first function anchored in the window that
/// violates the connectivity condition, for `l = 0..N-2`.
pub fn oracle_assumption_b_violation(
    dom: &dyn Domains,
    degree: u32,
    w: &Window,
) -> Option<(usize, Cell)> {
    for l in 0..dom.num_levels().saturating_sub(1) {
        for c in w.cells(l as u32) {
            if support_ring_disconnected(dom, &BasisFunctionId::new(degree, c.clone())) {
                return Some((l, c));
            }
        }
    }
    None
}

/// All level-`l` functions anchored in the window whose closed support meets
/// the ring in a disconnected set.
pub fn oracle_assumption_b_level(dom: &dyn Domains, degree: u32, l: usize, w: &Window) -> Vec<Cell> {
    w.cells(l as u32)
        .into_iter()
        .filter(|c| support_ring_disconnected(dom, &BasisFunctionId::new(degree, c.clone())))
        .collect()
}

pub fn oracle_assumption_b(dom: &dyn Domains, degree: u32, w: &Window) -> bool {
    oracle_assumption_b_violation(dom, degree, w).is_none()
}

/// Selected functions per level among those anchored in the window: support
/// inside `Omega^l` and not inside `Omega^(l+1)`.
pub fn oracle_kraft(dom: &dyn Domains, degree: u32, w: &Window) -> Vec<BTreeSet<BasisFunctionId>> {
    (0..dom.num_levels())
        .map(|l| {
            w.cells(l as u32)
                .into_iter()
                .map(|c| BasisFunctionId::new(degree, c))
                .filter(|f| oracle_selected(dom, f))
                .collect()
        })
        .collect()
}

/// Whether `f` is selected at its level: support inside `Omega^l` and not
/// inside `Omega^(l+1)`.
pub fn oracle_selected(dom: &dyn Domains, f: &BasisFunctionId) -> bool {
    let l = f.level() as usize;
    let cells = support_cells(f);
    cells.iter().all(|c| dom.covers(l, c)) && !cells.iter().all(|c| dom.covers(l + 1, c))
}

/// `N_{i,m}^l(t)` over the knots `k/2^l` by the Cox-de Boor recursion, with
/// half-open pieces `[t_k, t_(k+1))` at degree 0.
pub fn oracle_bspline(m: u32, level: u32, i: i64, t: &Q) -> Q {
    let den = BigInt::one() << level;
    let knot = |k: i64| Q::new(k.into(), den.clone());
    fn rec(m: u32, i: i64, t: &Q, knot: &dyn Fn(i64) -> Q) -> Q {
        if m == 0 {
            return if knot(i) <= *t && *t < knot(i + 1) { Q::one() } else { Q::zero() };
        }
        let mi = m as i64;
        let left = (t - knot(i)) / (knot(i + mi) - knot(i)) * rec(m - 1, i, t, knot);
        let right = (knot(i + mi + 1) - t) / (knot(i + mi + 1) - knot(i + 1)) * rec(m - 1, i + 1, t, knot);
        left + right
    }
    rec(m, i, t, &knot)
}

/// Tensor product of [`oracle_bspline`] over the coordinates.
pub fn oracle_basis_value(f: &BasisFunctionId, x: &[Q]) -> Q {
    f.anchor
        .index
        .iter()
        .zip(x)
        .map(|(&a, t)| oracle_bspline(f.degree, f.level(), first_knot(a, f.degree), t))
        .product()
}

/// `sum c_f N_f(x)` over the levels `0..levels`, visiting every function
/// whose closed support contains `x`; `coeff` returns the coefficient of a
/// selected function and `None` for the others.
pub fn oracle_eval(
    degree: u32,
    levels: usize,
    x: &[Q],
    coeff: &dyn Fn(&BasisFunctionId) -> Option<Q>,
) -> Q {
    let m = degree as i64;
    let mut total = Q::zero();
    for l in 0..levels as u32 {
        let scale = Q::from_integer(BigInt::one() << l);
        let ranges: Vec<Vec<i64>> = x
            .iter()
            .map(|t| {
                let k: i64 = (t * &scale).floor().to_integer().try_into().expect("point too large");
                (k - m..=k).collect()
            })
            .collect();
        for first in product(&ranges) {
            let f = BasisFunctionId::new(
                degree,
                Cell::new(l, first.iter().map(|i| i + (m + 1) / 2).collect()),
            );
            if let Some(c) = coeff(&f) {
                let v = oracle_basis_value(&f, x);
                if !v.is_zero() {
                    total += c * v;
                }
            }
        }
    }
    total
}
