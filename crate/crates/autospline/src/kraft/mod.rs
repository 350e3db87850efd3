//! Kraft selection of a hierarchical B-spline basis.
//!
//! A level-`l` basis function of degree `m` is named by its anchor cell: the
//! central cell of its support for odd `m+1`, and the cell whose lower-left
//! corner is the central vertex for even `m+1`. Its support cells are the
//! anchor shifted by `i/2^l` for `i` in `I_m`. The selected functions at
//! level `l` are those whose support lies in `Omega^l` but not in
//! `Omega^(l+1)`; each level is the language of a first-order formula over
//! the mesh automata.

use std::fmt::Write as _;
use std::path::Path;

use num_bigint::BigInt;
use num_traits::One;

use crate::automata::{convolve, set_state_budget, state_budget, SyncAutomaton};
use crate::error::{Error, Result};
use crate::logic::Structure;
use crate::mesh::{
    check_assumption_b, check_nested, index_set, level_filter_automaton, shift_constants, Cell,
    HierarchicalMesh, Window,
};
use crate::numeration::encode_point;
use crate::Q;


/// A tensor-product B-spline of the hierarchy, named by its anchor cell.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BasisFunctionId {
    pub degree: u32,
    pub anchor: Cell,
}

impl BasisFunctionId {
    pub fn new(degree: u32, anchor: Cell) -> BasisFunctionId {
        BasisFunctionId { degree, anchor }
    }

    /// The function `N_{i,m}^l` (per coordinate) whose support starts at the
    /// knot `i/2^l`.
    pub fn from_knot_index(level: u32, degree: u32, first: &[i64]) -> BasisFunctionId {
        let lo = first_offset(degree);
        BasisFunctionId { degree, anchor: Cell::new(level, first.iter().map(|i| i - lo).collect()) }
    }

    pub fn level(&self) -> u32 {
        self.anchor.level
    }

    pub fn dim(&self) -> usize {
        self.anchor.dim()
    }

    /// Index `i` of the first knot in each coordinate.
    pub fn knot_index(&self) -> Vec<i64> {
        let lo = first_offset(self.degree);
        self.anchor.index.iter().map(|a| a + lo).collect()
    }

    /// The `(m+1)^d` cells of the support.
    pub fn support_cells(&self) -> Vec<Cell> {
        index_set(self.dim(), self.degree).iter().map(|o| self.anchor.offset(o)).collect()
    }

    /// Corners of the support box.
    pub fn support(&self) -> (Vec<Q>, Vec<Q>) {
        let den = BigInt::one() << self.level();
        let m = self.degree as i64;
        let first = self.knot_index();
        let lo = first.iter().map(|&i| Q::new(i.into(), den.clone())).collect();
        let hi = first.iter().map(|&i| Q::new((i + m + 1).into(), den.clone())).collect();
        (lo, hi)
    }
}

/// Smallest offset of `I_m`: support cell `i` is the anchor shifted by this.
fn first_offset(m: u32) -> i64 {
    -(m as i64 + 1) / 2
}

/// The translation constants of the level-`l` formulas.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AnchorOffsets {
    /// `I_m` in lexicographic order.
    pub index_set: Vec<Vec<i64>>,
    /// `t_i = i / 2^l`, one per element of `I_m`.
    pub t: Vec<Vec<Q>>,
    /// `r_ij = t_i + s_j` with `s_j = (±1/2^(l+1), ...)`.
    pub r: Vec<Vec<Vec<Q>>>,
}

pub fn anchor_offsets(m: u32, d: usize, level: u32) -> AnchorOffsets {
    let idx = index_set(d, m);
    let den = BigInt::one() << level;
    let t: Vec<Vec<Q>> =
        idx.iter().map(|o| o.iter().map(|&i| Q::new(i.into(), den.clone())).collect()).collect();
    let s = shift_constants(d, level as usize + 1);
    let r = t
        .iter()
        .map(|ti| s.iter().map(|sj| ti.iter().zip(sj).map(|(a, b)| a + b).collect()).collect())
        .collect();
    AnchorOffsets { index_set: idx, t, r }
}

/// The selected languages `L^_0 .. L^_(N-1)` of a mesh.
#[derive(Clone, Debug)]
pub struct KraftBasis {
    mesh: HierarchicalMesh,
    languages: Vec<SyncAutomaton>,
    formulas: Vec<String>,
    verified: bool,
}

impl KraftBasis {
    /// Assemble from precomputed per-level languages.
    pub fn from_parts(
        mesh: HierarchicalMesh,
        languages: Vec<SyncAutomaton>,
        formulas: Vec<String>,
    ) -> Result<KraftBasis> {
        if languages.len() != mesh.num_levels() || formulas.len() != languages.len() {
            return Err(Error::Inconsistent("one basis language per mesh level expected".into()));
        }
        Ok(KraftBasis { mesh, languages, formulas, verified: false })
    }

    /// Whether nestedness and Assumption B were checked before the build.
    pub fn verified(&self) -> bool {
        self.verified
    }

    pub(crate) fn with_verified(mut self, verified: bool) -> KraftBasis {
        self.verified = verified;
        self
    }

    pub fn mesh(&self) -> &HierarchicalMesh {
        &self.mesh
    }

    pub fn degree(&self) -> u32 {
        self.mesh.degree()
    }

    pub fn num_levels(&self) -> usize {
        self.languages.len()
    }

    /// `L^_l` over `d` tracks.
    pub fn language(&self, level: usize) -> &SyncAutomaton {
        &self.languages[level]
    }

    pub fn languages(&self) -> &[SyncAutomaton] {
        &self.languages
    }

    /// The formula text that defined `L^_l`.
    pub fn formula(&self, level: usize) -> &str {
        &self.formulas[level]
    }

    pub fn contains(&self, f: &BasisFunctionId) -> bool {
        let l = f.level() as usize;
        if l >= self.languages.len() || f.degree != self.degree() {
            return false;
        }
        let syms = encode_point(&f.anchor.barycentre(), self.mesh.base())
            .expect("barycentres are representable for even bases");
        self.languages[l].accepts(&convolve(&syms))
    }

    /// Selected level-`l` functions anchored inside `w`.
    pub fn functions_in(&self, level: usize, w: &Window) -> Vec<BasisFunctionId> {
        w.cells(level as u32)
            .into_iter()
            .map(|c| BasisFunctionId::new(self.degree(), c))
            .filter(|f| self.contains(f))
            .collect()
    }

    /// Write `basis_<l>.aut` per level and `basis.manifest` into `dir`.
    pub fn save(&self, dir: &Path) -> Result<()> {
        std::fs::create_dir_all(dir)?;
        let mut s = String::new();
        let _ = writeln!(s, "kind = basis");
        let _ = writeln!(s, "dimension = {}", self.mesh.dim());
        let _ = writeln!(s, "degree = {}", self.degree());
        let _ = writeln!(s, "base = {}", self.mesh.base());
        let _ = writeln!(s, "levels = {}", self.num_levels());
        for (l, (a, f)) in self.languages.iter().zip(&self.formulas).enumerate() {
            let name = format!("basis_{l}.aut");
            a.save(&dir.join(&name))?;
            let _ = writeln!(s, "[level {l}]");
            let _ = writeln!(s, "automaton = {name}");
            let _ = writeln!(s, "formula = {f}");
        }
        std::fs::write(dir.join("basis.manifest"), s)?;
        Ok(())
    }
}

/// The formula selecting level `l`, with its structure. Predicates: `Filt`
/// (level-`l` barycentres), `Lcur` = `L_l`, `Lnext` = `L_(l+1)`.
fn level_structure(mesh: &HierarchicalMesh, level: usize) -> Result<(Structure, String)> {
    let d = mesh.dim();
    let n = mesh.num_levels();
    let off = anchor_offsets(mesh.degree(), d, level as u32);
    let mut s = Structure::new(mesh.base(), d)?;
    s.add_predicate("Filt", level_filter_automaton(d, level as u32, mesh.base())?)?;
    let mut parts = vec!["(in u Filt)".to_string()];
    if level + 1 < n {
        s.add_predicate("Lnext", mesh.domain(level + 1).clone())?;
        let psi: Vec<String> = (0..off.t.len()).map(|i| format!("(not (in (add u t{i}) Lnext))")).collect();
        parts.push(format!("(or {})", psi.join(" ")));
    }
    if level >= 1 {
        s.add_predicate("Lcur", mesh.domain(level).clone())?;
        let inside: Vec<String> = off
            .r
            .iter()
            .enumerate()
            .map(|(i, ri)| {
                let any: Vec<String> =
                    (0..ri.len()).map(|j| format!("(in (add u r{i}_{j}) Lcur)")).collect();
                format!("(or {})", any.join(" "))
            })
            .collect();
        parts.push(format!("(and {})", inside.join(" ")));
    }
    for (i, ti) in off.t.iter().enumerate() {
        s.add_constant(&format!("t{i}"), ti.clone())?;
        for (j, rij) in off.r[i].iter().enumerate() {
            s.add_constant(&format!("r{i}_{j}"), rij.clone())?;
        }
    }
    Ok((s, format!("(and {})", parts.join(" "))))
}

/// `L^_l` for one level, with the formula text that defines it.
pub fn kraft_level(mesh: &HierarchicalMesh, level: usize) -> Result<(SyncAutomaton, String)> {
    if level >= mesh.num_levels() {
        return Err(Error::Usage(format!("mesh has no level {level}")));
    }
    let (s, text) = level_structure(mesh, level)?;
    let f = s.parse(&text)?;
    let a = s.compile_ordered(&f, &["u".to_string()])?.into_automaton()?;
    Ok((a, text))
}

/// Build the basis after checking nestedness and the connectivity condition.
pub fn build_kraft_languages(mesh: &HierarchicalMesh) -> Result<KraftBasis> {
    let nested = check_nested(mesh)?;
    if let Some((l, c)) = nested.witness {
        return Err(Error::Inconsistent(format!("domains not nested at level {l}: {c}")));
    }
    let b = check_assumption_b(mesh)?;
    if let Some((l, c)) = b.witness {
        return Err(Error::Inconsistent(format!(
            "support of the level-{l} function anchored at {c} meets the ring in a disconnected set"
        )));
    }
    let mut basis = build_kraft_languages_unverified(mesh)?;
    basis.verified = true;
    Ok(basis)
}

/// Build the basis without the mesh checks; coefficients of a spline in this
/// basis need not be unique.
pub fn build_kraft_languages_unverified(mesh: &HierarchicalMesh) -> Result<KraftBasis> {
    let budget = state_budget();
    let results: Vec<Result<(SyncAutomaton, String)>> = std::thread::scope(|sc| {
        let handles: Vec<_> = (0..mesh.num_levels())
            .map(|l| {
                sc.spawn(move || {
                    set_state_budget(budget);
                    kraft_level(mesh, l)
                })
            })
            .collect();
        handles.into_iter().map(|h| h.join().expect("level build panicked")).collect()
    });
    let (languages, formulas) = results.into_iter().collect::<Result<Vec<_>>>()?.into_iter().unzip();
    KraftBasis::from_parts(mesh.clone(), languages, formulas)
}
