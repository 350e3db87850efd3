//! Regular splines: per level, a relation between anchor barycentres of the
//! selected basis functions and their coefficients in `Z[1/b]`, with exact
//! point evaluation and the module operations.

mod basis;
mod build;
mod eval;

#[cfg(test)]
mod tests;

pub use basis::{basis_value, bspline_value, cardinal_bspline, degree_supported};
pub use build::{
    affine_relation, builtin_examples, builtin_g, builtin_h, constant_spline, h_mesh_spec,
    linear_spline, zero_relation,
};
pub use eval::{Evaluation, Match};

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::sync::OnceLock;

use crate::automata::{convolve, join, SyncAutomaton};
use crate::error::{Error, Result};
use crate::kraft::{build_kraft_languages, build_kraft_languages_unverified, BasisFunctionId, KraftBasis};
use crate::logic::Structure;
use crate::mesh::{HierarchicalMesh, LevelSource, MeshSpec};
use crate::numeration::{
    addition_automaton, decode_point, encode_point, scalar_multiple_automaton, singleton_automaton,
    Base,
};
use crate::Q;

/// A spline over a hierarchical mesh, given by coefficient relations
/// `S^0..S^(N-1)`. Each relation has `d + 1` tracks: the anchor barycentre,
/// then the coefficient.
#[derive(Clone, Debug)]
pub struct RegularSpline {
    basis: KraftBasis,
    relations: Vec<SyncAutomaton>,
    spec: Option<MeshSpec>,
    bands: Vec<OnceLock<SyncAutomaton>>,
}

impl RegularSpline {
    /// Check shape, functionality and domain exactness of the relations.
    pub fn new(basis: KraftBasis, relations: Vec<SyncAutomaton>) -> Result<RegularSpline> {
        let f = RegularSpline::assemble(basis, relations)?;
        f.check_invariants()?;
        Ok(f)
    }

    /// Like [`RegularSpline::new`] without the language checks; for
    /// relations produced by operations that preserve them.
    pub(crate) fn assemble(basis: KraftBasis, relations: Vec<SyncAutomaton>) -> Result<RegularSpline> {
        let mesh = basis.mesh();
        if !degree_supported(mesh.degree(), mesh.base().get()) {
            return Err(Error::Usage(format!(
                "degree {} needs every prime up to it to divide the base {}",
                mesh.degree(),
                mesh.base()
            )));
        }
        if relations.len() != basis.num_levels() {
            return Err(Error::Inconsistent(format!(
                "{} coefficient relations for {} levels",
                relations.len(),
                basis.num_levels()
            )));
        }
        for (l, r) in relations.iter().enumerate() {
            if r.tracks() != mesh.dim() + 1 || r.base() != mesh.base() {
                return Err(Error::AlphabetMismatch(format!("coefficient relation of level {l}")));
            }
        }
        let bands = (0..relations.len()).map(|_| OnceLock::new()).collect();
        Ok(RegularSpline { basis, relations, spec: None, bands })
    }

    /// Every anchor of `L^_l` has exactly one coefficient, and no other
    /// anchor has any.
    pub fn check_invariants(&self) -> Result<()> {
        let d = self.dim();
        for (l, r) in self.relations.iter().enumerate() {
            let mut s = Structure::new(self.base(), d)?;
            s.add_predicate_with_widths("S", r.clone(), vec![d, 1])?;
            let two = s.parse("(exists u (exists a (exists c (and (in (u a) S) (in (u c) S) (not (= a c))))))")?;
            if s.evaluate_sentence(&two)? {
                return Err(Error::Inconsistent(format!("level {l}: an anchor has two coefficients")));
            }
            let keep: Vec<usize> = (0..d).collect();
            let dom = r.project(&keep)?;
            if let Some(w) = dom.distinguishing_word(self.basis.language(l))? {
                let z = decode_point(&w.unconvolve(), self.base())?;
                return Err(Error::Inconsistent(format!(
                    "level {l}: coefficient domain differs from the basis at ({})",
                    z.iter().map(|c| c.to_string()).collect::<Vec<_>>().join(", ")
                )));
            }
        }
        Ok(())
    }

    /// The zero spline over a basis.
    pub fn zero(basis: KraftBasis) -> Result<RegularSpline> {
        let relations = basis.languages().iter().map(zero_relation).collect::<Result<Vec<_>>>()?;
        RegularSpline::assemble(basis, relations)
    }

    pub fn basis(&self) -> &KraftBasis {
        &self.basis
    }

    pub fn mesh(&self) -> &HierarchicalMesh {
        self.basis.mesh()
    }

    pub fn base(&self) -> Base {
        self.mesh().base()
    }

    pub fn dim(&self) -> usize {
        self.mesh().dim()
    }

    pub fn degree(&self) -> u32 {
        self.mesh().degree()
    }

    pub fn num_levels(&self) -> usize {
        self.relations.len()
    }

    /// `S^l`.
    pub fn relation(&self, level: usize) -> &SyncAutomaton {
        &self.relations[level]
    }

    pub fn relations(&self) -> &[SyncAutomaton] {
        &self.relations
    }

    /// The mesh description this spline was built from, if any.
    pub fn mesh_spec(&self) -> Option<&MeshSpec> {
        self.spec.as_ref()
    }

    pub fn with_mesh_spec(mut self, spec: MeshSpec) -> RegularSpline {
        self.spec = Some(spec);
        self
    }

    /// The coefficient of one basis function; `None` when it is not
    /// selected.
    pub fn coefficient(&self, f: &BasisFunctionId) -> Result<Option<Q>> {
        let l = f.level() as usize;
        if l >= self.num_levels() {
            return Ok(None);
        }
        let d = self.dim();
        let anchor = singleton_automaton(&f.anchor.barycentre(), self.base())?;
        let map: Vec<usize> = (0..d).collect();
        let all: Vec<usize> = (0..=d).collect();
        let hit = join(&anchor, &map, &self.relations[l], &all, d + 1)?.project(&[d])?;
        let words = hit.finite_words(2)?.unwrap_or_default();
        match words.as_slice() {
            [] => Ok(None),
            [w] => Ok(Some(decode_point(&w.unconvolve(), self.base())?.remove(0))),
            _ => Err(Error::Inconsistent(format!("two coefficients for {}", f.anchor))),
        }
    }

    /// Whether `(anchor, c)` is in `S^l`.
    pub fn has_coefficient(&self, f: &BasisFunctionId, c: &Q) -> Result<bool> {
        let l = f.level() as usize;
        let mut z = f.anchor.barycentre();
        z.push(c.clone());
        Ok(l < self.num_levels() && self.relations[l].accepts(&convolve(&encode_point(&z, self.base())?)))
    }

    /// Write the manifest at `path`, with the mesh spec and every automaton
    /// next to it, named after the manifest's file stem.
    pub fn save(&self, path: &Path) -> Result<()> {
        let dir = path.parent().unwrap_or(Path::new("."));
        let stem = path
            .file_stem()
            .and_then(|s| s.to_str())
            .ok_or_else(|| Error::Usage(format!("bad manifest path {}", path.display())))?;
        let spec = match &self.spec {
            Some(s) => {
                let mut s = s.clone();
                for (k, src) in s.levels.iter_mut().enumerate() {
                    if let LevelSource::Automaton(p, _) = src {
                        *p = format!("{stem}_L{}.aut", k + 1).into();
                    }
                }
                s
            }
            None => self.mesh().to_spec(stem),
        };
        let mesh_name = format!("{stem}.mesh");
        spec.save(&dir.join(&mesh_name))?;
        let mut s = String::new();
        let _ = writeln!(s, "kind = spline");
        let _ = writeln!(s, "dimension = {}", self.dim());
        let _ = writeln!(s, "degree = {}", self.degree());
        let _ = writeln!(s, "base = {}", self.base());
        let _ = writeln!(s, "levels = {}", self.num_levels());
        let _ = writeln!(s, "mesh = {mesh_name}");
        if !self.basis.verified() {
            let _ = writeln!(s, "verified = false");
        }
        for (l, r) in self.relations.iter().enumerate() {
            let name = format!("{stem}_S{l}.aut");
            r.save(&dir.join(&name))?;
            let _ = writeln!(s, "[level {l}]");
            let _ = writeln!(s, "relation = {name}");
        }
        std::fs::write(path, s)?;
        Ok(())
    }

    /// Read a manifest written by [`RegularSpline::save`]; the basis is
    /// rebuilt from the mesh and the relations are checked against it.
    pub fn load(path: &Path) -> Result<RegularSpline> {
        let dir = path.parent().unwrap_or(Path::new("."));
        let text = std::fs::read_to_string(path)?;
        let mut mesh: Option<PathBuf> = None;
        let mut header: Vec<(String, String)> = Vec::new();
        let mut rels: Vec<(usize, PathBuf)> = Vec::new();
        let mut section = None;
        let mut verified = true;
        for (no, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap().trim();
            if line.is_empty() {
                continue;
            }
            let err = |m: &str| Error::Parse(format!("{}:{}: {m}", path.display(), no + 1));
            if let Some(inner) = line.strip_prefix("[level").and_then(|l| l.strip_suffix(']')) {
                section = Some(inner.trim().parse::<usize>().map_err(|_| err("bad level header"))?);
                continue;
            }
            let (k, v) = line.split_once('=').ok_or_else(|| err("expected key = value"))?;
            let (k, v) = (k.trim(), v.trim());
            match k {
                "kind" if v == "spline" => {}
                "kind" => return Err(err("not a spline manifest")),
                "mesh" => mesh = Some(PathBuf::from(v)),
                "verified" => verified = v.parse().map_err(|_| err("verified must be true or false"))?,
                "relation" => rels.push((section.ok_or_else(|| err("relation outside a level"))?, v.into())),
                "dimension" | "degree" | "base" | "levels" => header.push((k.into(), v.into())),
                _ => return Err(err(&format!("unknown key `{k}`"))),
            }
        }
        let spec = MeshSpec::load(&dir.join(mesh.ok_or_else(|| Error::Parse("missing mesh".into()))?))?;
        for (k, v) in &header {
            let want = match k.as_str() {
                "dimension" => spec.dim.to_string(),
                "degree" => spec.degree.to_string(),
                "base" => spec.base.to_string(),
                _ => spec.num_levels().to_string(),
            };
            if *v != want {
                return Err(Error::Inconsistent(format!("manifest {k} = {v} but the mesh has {want}")));
            }
        }
        rels.sort_by_key(|r| r.0);
        if rels.iter().enumerate().any(|(i, r)| r.0 != i) || rels.len() != spec.num_levels() {
            return Err(Error::Parse("one relation per level 0..N-1 expected".into()));
        }
        let relations = rels
            .iter()
            .map(|(_, p)| SyncAutomaton::load(&dir.join(p)))
            .collect::<Result<Vec<_>>>()?;
        let mesh = spec.build()?;
        let basis = if verified { build_kraft_languages(&mesh)? } else { build_kraft_languages_unverified(&mesh)? };
        Ok(RegularSpline::new(basis, relations)?.with_mesh_spec(spec))
    }
}

pub(crate) fn same_mesh(a: &HierarchicalMesh, b: &HierarchicalMesh) -> Result<bool> {
    if a.base() != b.base() || a.dim() != b.dim() || a.degree() != b.degree() || a.num_levels() != b.num_levels() {
        return Ok(false);
    }
    for (x, y) in a.domains().iter().zip(b.domains()) {
        if !x.are_equivalent(y)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// `{(u, a + c) | (u, a) in r, (u, c) in t}` over `d + 1` tracks.
pub(crate) fn sum_relations(r: &SyncAutomaton, t: &SyncAutomaton, d: usize) -> Result<SyncAutomaton> {
    let u: Vec<usize> = (0..d).collect();
    let add = addition_automaton(r.base(), 1)?;
    let mut am = u.clone();
    am.push(d);
    let mut bm = u.clone();
    bm.push(d + 1);
    let both = join(r, &am, t, &bm, d + 2)?;
    let all: Vec<usize> = (0..d + 2).collect();
    let sum = join(&both, &all, &add, &[d, d + 1, d + 2], d + 3)?;
    let mut keep = u;
    keep.push(d + 2);
    sum.project(&keep)?.minimize()
}

/// `{(u, mu c) | (u, c) in r}` over `d + 1` tracks.
pub(crate) fn scale_relation(mu: &Q, r: &SyncAutomaton, d: usize) -> Result<SyncAutomaton> {
    let mul = scalar_multiple_automaton(mu, r.base())?;
    let all: Vec<usize> = (0..=d).collect();
    let mut keep: Vec<usize> = (0..d).collect();
    keep.push(d + 1);
    join(r, &all, &mul, &[d, d + 1], d + 2)?.project(&keep)?.minimize()
}

/// Coefficientwise sum: `S^l_(f+g)` joins both relations on the anchor and
/// adds the coefficient tracks.
pub fn add_splines(f: &RegularSpline, g: &RegularSpline) -> Result<RegularSpline> {
    if !same_mesh(f.mesh(), g.mesh())? {
        return Err(Error::Inconsistent("splines live on different meshes or degrees".into()));
    }
    let out = f
        .relations
        .iter()
        .zip(&g.relations)
        .map(|(a, b)| sum_relations(a, b, f.dim()))
        .collect::<Result<Vec<_>>>()?;
    let mut h = RegularSpline::assemble(f.basis.clone(), out)?;
    h.spec = f.spec.clone();
    Ok(h)
}

/// `mu * f` for `mu` in `Z[1/b]`.
pub fn scale_spline(mu: &Q, f: &RegularSpline) -> Result<RegularSpline> {
    let out = f.relations.iter().map(|r| scale_relation(mu, r, f.dim())).collect::<Result<Vec<_>>>()?;
    let mut h = RegularSpline::assemble(f.basis.clone(), out)?;
    h.spec = f.spec.clone();
    Ok(h)
}
