use num_traits::{One, Zero};

use super::RegularSpline;
use crate::automata::{join, SyncAutomaton};
use crate::error::{Error, Result};
use crate::kraft::{build_kraft_languages, build_kraft_languages_unverified};
use crate::mesh::{
    cell_class_automaton, level_filter_automaton, HierarchicalMesh, LevelSource, MeshSpec, Pattern,
};
use crate::numeration::{
    addition_automaton, scalar_multiple_automaton, singleton_automaton, translation_automaton, Base,
};
use crate::Q;

fn q(n: i64, d: i64) -> Q {
    Q::new(n.into(), d.into())
}

/// `anchors × {c}` over `d + 1` tracks.
fn constant_relation(anchors: &SyncAutomaton, c: &Q) -> Result<SyncAutomaton> {
    let d = anchors.tracks();
    let single = singleton_automaton(std::slice::from_ref(c), anchors.base())?;
    let map: Vec<usize> = (0..d).collect();
    join(anchors, &map, &single, &[d], d + 1)?.minimize()
}

/// Every anchor of the language related to the coefficient 0.
pub fn zero_relation(anchors: &SyncAutomaton) -> Result<SyncAutomaton> {
    constant_relation(anchors, &Q::zero())
}

/// The two-track relation `c = mu * y + c0`.
pub fn affine_relation(mu: &Q, c0: &Q, base: Base) -> Result<SyncAutomaton> {
    let mul = scalar_multiple_automaton(mu, base)?;
    let shift = translation_automaton(std::slice::from_ref(c0), base)?;
    join(&mul, &[0, 1], &shift, &[1, 2], 3)?.project(&[0, 2])?.minimize()
}

/// The spline `sum_k alpha_k x_k + alpha_0` on the single-level mesh of
/// degree `m`. The coefficient at the anchor barycentre `y` is
/// `sum_k alpha_k (y_k - delta) + alpha_0` with `delta = 1/2` for odd `m`
/// and `0` for even `m`; in one dimension this is `c_i = i + (m+1)/2` for
/// `f(t) = t`.
pub fn linear_spline(alpha: &[Q], alpha0: &Q, m: u32, base: Base) -> Result<RegularSpline> {
    let d = alpha.len();
    if d == 0 {
        return Err(Error::Usage("linear spline needs at least one coordinate".into()));
    }
    let delta = if m % 2 == 1 { q(1, 2) } else { Q::zero() };
    let add = addition_automaton(base, 1)?;
    // tracks y_0..y_(k-1), s with s = sum alpha_j y_j
    let mut acc = scalar_multiple_automaton(&alpha[0], base)?;
    for (k, a) in alpha.iter().enumerate().skip(1) {
        let mul = scalar_multiple_automaton(a, base)?;
        let mut amap: Vec<usize> = (0..k).collect();
        amap.push(k + 1);
        let with = join(&acc, &amap, &mul, &[k, k + 2], k + 3)?;
        let all: Vec<usize> = (0..k + 3).collect();
        let summed = join(&with, &all, &add, &[k + 1, k + 2, k + 3], k + 4)?;
        let mut keep: Vec<usize> = (0..=k).collect();
        keep.push(k + 3);
        acc = summed.project(&keep)?.minimize()?;
    }
    let c0 = alpha0 - alpha.iter().sum::<Q>() * &delta;
    let shift = translation_automaton(&[c0], base)?;
    let all: Vec<usize> = (0..=d).collect();
    let mut keep: Vec<usize> = (0..d).collect();
    keep.push(d + 1);
    let rel = join(&acc, &all, &shift, &[d, d + 1], d + 2)?.project(&keep)?;
    let filter = level_filter_automaton(d, 0, base)?;
    let ymap: Vec<usize> = (0..d).collect();
    let rel = join(&rel, &all, &filter, &ymap, d + 1)?.minimize()?;
    let mesh = HierarchicalMesh::uniform(base, d, m);
    let basis = build_kraft_languages(&mesh)?;
    let spec = MeshSpec { base, dim: d, degree: m, levels: Vec::new() };
    Ok(RegularSpline::assemble(basis, vec![rel])?.with_mesh_spec(spec))
}

/// The constant `lambda` as a spline of degree `m` on the single-level mesh.
pub fn constant_spline(lambda: &Q, d: usize, m: u32, base: Base) -> Result<RegularSpline> {
    linear_spline(&vec![Q::zero(); d], lambda, m, base)
}

/// Level-`level` anchors in one dimension with cell index `i`, where
/// `i mod p` is `pos` for `i >= 0` and `neg` for `i < 0`.
fn classes(base: Base, level: u32, p: u64, pos: u64, neg: u64) -> Result<SyncAutomaton> {
    cell_class_automaton(base, level, p, |nonneg, x| if nonneg { x == pos } else { x == neg })
}

/// `g = sum_j c_j N^0_{4j,3}` with `c_j = (-1)^j`, in base 6.
///
/// The function `N^0_{4j,3}` is anchored at cell `4j + 2`, so the
/// coefficient is `1` on cells `2 mod 8`, `-1` on cells `6 mod 8` and `0`
/// elsewhere.
pub fn builtin_g() -> Result<RegularSpline> {
    let base = Base::new(6)?;
    let mesh = HierarchicalMesh::uniform(base, 1, 3);
    let basis = build_kraft_languages(&mesh)?;
    let plus = classes(base, 0, 8, 2, 2)?;
    let minus = classes(base, 0, 8, 6, 6)?;
    let rest = basis.language(0).difference(&plus.union(&minus)?)?;
    let rel = constant_relation(&plus, &Q::one())?
        .union(&constant_relation(&minus, &-Q::one())?)?
        .union(&zero_relation(&rest)?)?
        .minimize()?;
    let spec = MeshSpec { base, dim: 1, degree: 3, levels: Vec::new() };
    Ok(RegularSpline::assemble(basis, vec![rel])?.with_mesh_spec(spec))
}

/// The three-level mesh of `h`: `Omega^1 = Omega^2` is the union of the
/// cells `[2i, 2i+1]` and `[-2i-1, -2i]`, `i >= 0`.
pub fn h_mesh_spec() -> Result<MeshSpec> {
    Ok(MeshSpec {
        base: Base::new(6)?,
        dim: 1,
        degree: 3,
        levels: vec![
            LevelSource::Patterns(vec![Pattern::Symmetric { period: 2, residues: vec![vec![0]] }]),
            LevelSource::Patterns(vec![Pattern::Symmetric { period: 4, residues: vec![vec![0], vec![1]] }]),
        ],
    })
}

/// `h = sum_(j>=0) (j+1) N^2_{8j,3} + sum_(j<=-1) (-j) N^2_{8j+4,3}`, in
/// base 6 on [`h_mesh_spec`].
///
/// The mesh fails Assumption B (the level-0 support `[0, 4]` meets the ring
/// in `[1, 2] ∪ [3, 4]`), so the basis is built unverified.
///
/// `N^2_{8j,3}` is anchored at the level-2 cell `8j + 2` with barycentre
/// `y = (16j + 5)/8`, so `j + 1 = y/2 + 11/16`. `N^2_{8j+4,3}` is anchored
/// at `8j + 6` with `y = (16j + 13)/8`, so `-j = -y/2 + 13/16`. Levels 0
/// and 1 carry zero coefficients.
pub fn builtin_h() -> Result<RegularSpline> {
    let spec = h_mesh_spec()?;
    let base = spec.base;
    let basis = build_kraft_languages_unverified(&spec.build()?)?;
    let right = classes(base, 2, 8, 2, u64::MAX)?;
    let left = classes(base, 2, 8, u64::MAX, 6)?;
    let up = join(&right, &[0], &affine_relation(&q(1, 2), &q(11, 16), base)?, &[0, 1], 2)?;
    let down = join(&left, &[0], &affine_relation(&q(-1, 2), &q(13, 16), base)?, &[0, 1], 2)?;
    let rest = basis.language(2).difference(&right.union(&left)?)?;
    let top = up.union(&down)?.union(&zero_relation(&rest)?)?.minimize()?;
    let relations = vec![zero_relation(basis.language(0))?, zero_relation(basis.language(1))?, top];
    Ok(RegularSpline::assemble(basis, relations)?.with_mesh_spec(spec))
}

/// `(g, h)`.
pub fn builtin_examples() -> Result<(RegularSpline, RegularSpline)> {
    Ok((builtin_g()?, builtin_h()?))
}
