//! One refinement step: append `Omega^N` to a mesh and transfer spline
//! coefficients through the two-scale relation
//! `N^(l)_{i,m} = sum_j binom(m+1, j)/2^m N^(l+1)_{2i+j,m}`.

use num_bigint::BigInt;
use num_integer::binomial;
use num_traits::One;

use crate::automata::{join, set_state_budget, state_budget, SyncAutomaton};
use crate::error::{Error, Result};
use crate::kraft::{kraft_level, KraftBasis};
use crate::mesh::{check_assumption_b, check_nested, LevelSource};
use crate::numeration::{translation_automaton, valid_encoding_automaton};
use crate::spline::{same_mesh, scale_relation, sum_relations, zero_relation, RegularSpline};
use crate::Q;


/// Tensor-product subdivision weights `prod_k binom(m+1, j_k)/2^m` over
/// `j` in `{0..m+1}^d`, in lexicographic order of `j`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SubdivisionStencil {
    pub degree: u32,
    pub dim: usize,
    pub weights: Vec<(Vec<u32>, Q)>,
}

/// `binom(m+1, j)/2^m` for `j = 0..m+1`.
pub fn stencil_1d(m: u32) -> Vec<Q> {
    let den = BigInt::one() << m;
    (0..=m + 1).map(|j| Q::new(binomial(BigInt::from(m + 1), BigInt::from(j)), den.clone())).collect()
}

pub fn subdivision_stencil(m: u32, d: usize) -> SubdivisionStencil {
    let one = stencil_1d(m);
    let mut weights: Vec<(Vec<u32>, Q)> = vec![(Vec::new(), Q::one())];
    for _ in 0..d {
        weights = weights
            .into_iter()
            .flat_map(|(j, w)| {
                one.iter().enumerate().map(move |(k, l)| {
                    let mut j = j.clone();
                    j.push(k as u32);
                    (j, &w * l)
                })
            })
            .collect();
    }
    SubdivisionStencil { degree: m, dim: d, weights }
}

/// `z_delta - z_beta` for a level-`level` child `beta` with first knot
/// `2i + j` and its level-`(level-1)` parent `delta` with first knot `i`.
pub fn parent_offset(m: u32, level: usize, j: &[u32]) -> Vec<Q> {
    let k = if m % 2 == 1 { m + 2 } else { m + 1 };
    let half = Q::new(k.into(), BigInt::one() << (level + 1));
    j.iter().map(|&jk| &half - Q::new(jk.into(), BigInt::one() << level)).collect()
}

/// A mesh with one more level and its recomputed basis.
#[derive(Clone, Debug)]
pub struct RefinedMesh {
    parent: KraftBasis,
    level: SyncAutomaton,
    basis: KraftBasis,
}

impl RefinedMesh {
    pub fn parent(&self) -> &KraftBasis {
        &self.parent
    }

    /// `L_N`, the level-`(N-1)` cells of the new domain.
    pub fn new_level(&self) -> &SyncAutomaton {
        &self.level
    }

    pub fn basis(&self) -> &KraftBasis {
        &self.basis
    }
}

/// Append `L_N` (barycentres of level-`(N-1)` cells) to the mesh of `basis`.
///
/// Levels below `N-1` keep their languages; `N-1` and `N` are selected again
/// on the refined mesh. Nestedness is always checked; Assumption B is
/// checked when the parent basis was verified.
pub fn refine_mesh(basis: &KraftBasis, l_new: &SyncAutomaton) -> Result<RefinedMesh> {
    let n = basis.num_levels();
    let mesh = basis.mesh().push_level(l_new.clone())?;
    if let Some((l, c)) = check_nested(&mesh)?.witness {
        return Err(Error::Inconsistent(format!("refinement not nested at level {l}: {c}")));
    }
    let verified = basis.verified();
    if verified {
        if let Some((l, c)) = check_assumption_b(&mesh)?.witness {
            return Err(Error::Inconsistent(format!(
                "refined mesh: support of the level-{l} function anchored at {c} meets the ring in a disconnected set"
            )));
        }
    }
    let budget = state_budget();
    let (top, new) = std::thread::scope(|sc| {
        let m = &mesh;
        let a = sc.spawn(move || {
            set_state_budget(budget);
            kraft_level(m, n - 1)
        });
        let b = sc.spawn(move || {
            set_state_budget(budget);
            kraft_level(m, n)
        });
        (a.join().expect("level build panicked"), b.join().expect("level build panicked"))
    });
    let (top, new) = (top?, new?);
    let mut languages = basis.languages()[..n - 1].to_vec();
    let mut formulas: Vec<String> = (0..n - 1).map(|l| basis.formula(l).to_string()).collect();
    for (a, f) in [top, new] {
        languages.push(a);
        formulas.push(f);
    }
    let refined = KraftBasis::from_parts(mesh, languages, formulas)?.with_verified(verified);
    Ok(RefinedMesh { parent: basis.clone(), level: l_new.clone(), basis: refined })
}

/// The same function over the refined mesh.
///
/// Levels below `N-1` are copied, `S^(N-1)` is restricted to the retained
/// functions, and a new child `beta` gets `sum_j lambda_j c(z_beta + q_j)`
/// where `c` is the coefficient of a removed parent and `0` otherwise.
pub fn refine_spline(f: &RegularSpline, rm: &RefinedMesh) -> Result<RegularSpline> {
    if !same_mesh(f.mesh(), rm.parent.mesh())? {
        return Err(Error::Inconsistent("spline does not live on the parent mesh".into()));
    }
    let n = f.num_levels();
    let d = f.dim();
    let m = f.degree();
    let base = f.base();
    let u: Vec<usize> = (0..d).collect();
    let uc: Vec<usize> = (0..=d).collect();

    let kept = rm.basis.language(n - 1);
    let removed = rm.parent.language(n - 1).difference(kept)?.minimize()?;
    let s_top = f.relation(n - 1);
    let restricted = join(s_top, &uc, kept, &u, d + 1)?.minimize()?;
    let from_removed = join(s_top, &uc, &removed, &u, d + 1)?;
    let elsewhere = valid_encoding_automaton(base, d)?.difference(&removed)?;
    let parents = from_removed.union(&zero_relation(&elsewhere)?)?.minimize()?;

    let children = rm.basis.language(n);
    let stencil = subdivision_stencil(m, d);
    let budget = state_budget();
    let terms: Vec<Result<SyncAutomaton>> = std::thread::scope(|sc| {
        let handles: Vec<_> = stencil
            .weights
            .iter()
            .map(|(j, lambda)| {
                let parents = &parents;
                let u = &u;
                sc.spawn(move || -> Result<SyncAutomaton> {
                    set_state_budget(budget);
                    let shift = translation_automaton(&parent_offset(m, n, j), base)?;
                    let both: Vec<usize> = (0..2 * d).collect();
                    let pairs = join(children, u, &shift, &both, 2 * d)?;
                    let parent_tracks: Vec<usize> = (d..=2 * d).collect();
                    let mut keep = u.clone();
                    keep.push(2 * d);
                    let pulled = join(&pairs, &both, parents, &parent_tracks, 2 * d + 1)?
                        .project(&keep)?
                        .minimize()?;
                    if lambda.is_one() {
                        Ok(pulled)
                    } else {
                        scale_relation(lambda, &pulled, d)
                    }
                })
            })
            .collect();
        handles.into_iter().map(|h| h.join().expect("stencil term panicked")).collect()
    });
    let mut acc: Option<SyncAutomaton> = None;
    for t in terms {
        let t = t?;
        acc = Some(match acc {
            None => t,
            Some(a) => sum_relations(&a, &t, d)?,
        });
    }
    let s_new = acc.expect("stencil is nonempty");

    let mut relations: Vec<SyncAutomaton> = f.relations()[..n - 1].to_vec();
    relations.push(restricted);
    relations.push(s_new);
    let mut g = RegularSpline::assemble(rm.basis.clone(), relations)?;
    if let Some(spec) = f.mesh_spec() {
        let mut spec = spec.clone();
        spec.levels.push(LevelSource::Automaton(format!("refined_L{n}.aut").into(), rm.level.clone()));
        g = g.with_mesh_spec(spec);
    }
    Ok(g)
}
