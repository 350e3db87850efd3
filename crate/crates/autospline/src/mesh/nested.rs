use num_bigint::BigInt;
use num_traits::One;

use super::{Cell, HierarchicalMesh};
use crate::error::Result;
use crate::logic::Structure;
use crate::numeration::decode_point;
use crate::Q;

/// Outcome of [`check_nested`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NestedReport {
    pub holds: bool,
    /// On failure: the level `l` whose domain leaves `Omega^(l-1)`, and a
    /// level-`(l-1)` cell of `Omega^l` outside it.
    pub witness: Option<(usize, Cell)>,
}

/// The `2^d` vectors `(±1/2^l, ..., ±1/2^l)`.
pub fn shift_constants(d: usize, l: usize) -> Vec<Vec<Q>> {
    let h = Q::new(BigInt::one(), BigInt::one() << l);
    (0..1u32 << d)
        .map(|bits| (0..d).map(|k| if bits >> k & 1 == 1 { -h.clone() } else { h.clone() }).collect())
        .collect()
}

/// The formula `(in u L_l) -> Phi_l`, with `Phi_l` the disjunction over the
/// shifts `s_j` of `(in (add u s_j) L_(l-1))`.
pub(crate) fn upsilon_body(d: usize) -> String {
    let disj: Vec<String> = (0..1usize << d).map(|j| format!("(in (add u s{j}) Lprev)")).collect();
    format!("(imp (in u Lcur) (or {}))", disj.join(" "))
}

/// Decide `Omega^1 ⊇ ... ⊇ Omega^(N-1)` by evaluating, for each
/// `l = 2..N-1`, the sentence `forall u ((in u L_l) -> Phi_l)`. A failing
/// level yields the shortest cell of `L_l` violating the implication.
pub fn check_nested(mesh: &HierarchicalMesh) -> Result<NestedReport> {
    let d = mesh.dim();
    for l in 2..mesh.num_levels() {
        let mut s = Structure::new(mesh.base(), d)?;
        s.add_predicate("Lcur", mesh.domain(l).clone())?;
        s.add_predicate("Lprev", mesh.domain(l - 1).clone())?;
        for (j, c) in shift_constants(d, l).into_iter().enumerate() {
            s.add_constant(&format!("s{j}"), c)?;
        }
        let negated = s.parse(&format!("(not {})", upsilon_body(d)))?;
        let bad = s.compile(&negated)?.into_automaton()?;
        if let Some(w) = bad.shortest_word() {
            let z = decode_point(&w.unconvolve(), mesh.base())?;
            return Ok(NestedReport { holds: false, witness: Some((l, Cell::from_barycentre(&z)?)) });
        }
    }
    Ok(NestedReport { holds: true, witness: None })
}
