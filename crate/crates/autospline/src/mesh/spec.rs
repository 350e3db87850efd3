use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use super::{Cell, HierarchicalMesh, Pattern};
use crate::automata::SyncAutomaton;
use crate::error::{Error, Result};
use crate::numeration::{parse_value, Base};
use crate::Q;

/// Where the cells of one level come from.
#[derive(Clone, Debug)]
pub enum LevelSource {
    /// An automaton file, with the path as written in the spec.
    Automaton(PathBuf, SyncAutomaton),
    /// The union of generated patterns.
    Patterns(Vec<Pattern>),
}

/// A mesh description: header values plus one source per refined level.
///
/// ```text
/// dimension = 1
/// degree = 2
/// base = 2
/// levels = 2
/// [level 1]
/// pattern = box 0..4
/// ```
///
/// Pattern lines are `box a..b ...` (one range per axis), `cells z ...`
/// (barycentres, coordinates separated by commas), `periodic p r ...` and
/// `symmetric p r ...` (residue tuples, comma separated). A level may instead
/// name an automaton file: `automaton = level1.aut`. A top-level pattern line
/// may carry its level as a suffix: `pattern = box 0..4 @1`.
#[derive(Clone, Debug)]
pub struct MeshSpec {
    pub base: Base,
    pub dim: usize,
    pub degree: u32,
    /// `levels[k]` describes `Omega^(k+1)`.
    pub levels: Vec<LevelSource>,
}

/// One pattern line as in a mesh spec, for example `box 0..4 1/2..3`.
pub fn parse_pattern(text: &str, base: Base, dim: usize) -> Result<Pattern> {
    let mut words = text.split_whitespace();
    let kind = words.next().ok_or_else(|| Error::Parse("empty pattern".into()))?;
    let rest: Vec<&str> = words.collect();
    let tuple = |s: &str| -> Result<Vec<u64>> {
        let v: Vec<u64> = s
            .split(',')
            .map(|x| x.trim().parse::<u64>().map_err(|_| Error::Parse(format!("bad residue `{x}`"))))
            .collect::<Result<_>>()?;
        if v.len() != dim {
            return Err(Error::Parse(format!("residue tuple `{s}` has wrong arity")));
        }
        Ok(v)
    };
    let p = match kind {
        "box" => {
            if rest.len() != dim {
                return Err(Error::Parse(format!("box needs {dim} ranges")));
            }
            let mut lo = Vec::new();
            let mut hi = Vec::new();
            for r in rest {
                let (a, b) = r
                    .split_once("..")
                    .ok_or_else(|| Error::Parse(format!("bad range `{r}`")))?;
                lo.push(parse_value(a, base)?);
                hi.push(parse_value(b, base)?);
            }
            Pattern::Box { lo, hi }
        }
        "cells" => {
            let mut cs = Vec::new();
            for z in rest {
                let p: Vec<Q> = z.split(',').map(|c| parse_value(c, base)).collect::<Result<_>>()?;
                if p.len() != dim {
                    return Err(Error::Parse(format!("cell `{z}` has wrong arity")));
                }
                cs.push(p);
            }
            Pattern::Cells(cs)
        }
        "periodic" | "symmetric" => {
            let (p, tuples) =
                rest.split_first().ok_or_else(|| Error::Parse("missing period".into()))?;
            let period: u64 =
                p.parse().ok().filter(|&x| x > 0).ok_or_else(|| Error::Parse(format!("bad period `{p}`")))?;
            let residues = tuples.iter().map(|t| tuple(t)).collect::<Result<Vec<_>>>()?;
            if kind == "periodic" {
                Pattern::Periodic { period, residues }
            } else {
                Pattern::Symmetric { period, residues }
            }
        }
        other => return Err(Error::Parse(format!("unknown pattern `{other}`"))),
    };
    Ok(p)
}

fn pattern_text(p: &Pattern) -> String {
    let join = |v: &[Q]| v.iter().map(|c| c.to_string()).collect::<Vec<_>>().join(",");
    let tuples = |rs: &[Vec<u64>]| {
        rs.iter()
            .map(|t| t.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(","))
            .collect::<Vec<_>>()
            .join(" ")
    };
    match p {
        Pattern::Box { lo, hi } => {
            let r: Vec<String> = lo.iter().zip(hi).map(|(a, b)| format!("{a}..{b}")).collect();
            format!("box {}", r.join(" "))
        }
        Pattern::Cells(cs) => {
            format!("cells {}", cs.iter().map(|z| join(z)).collect::<Vec<_>>().join(" "))
        }
        Pattern::Periodic { period, residues } => format!("periodic {period} {}", tuples(residues)),
        Pattern::Symmetric { period, residues } => format!("symmetric {period} {}", tuples(residues)),
    }
}

impl MeshSpec {
    /// Parse a spec; automaton paths are resolved against `dir`.
    pub fn parse(text: &str, dir: &Path) -> Result<MeshSpec> {
        let mut dim = None;
        let mut degree = None;
        let mut base = None;
        let mut count = None;
        let mut section: Option<usize> = None;
        let mut entries: Vec<(usize, String, String)> = Vec::new();
        for (no, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap().trim();
            if line.is_empty() {
                continue;
            }
            let err = |m: &str| Error::Parse(format!("line {}: {m}", no + 1));
            if let Some(inner) = line.strip_prefix('[').and_then(|l| l.strip_suffix(']')) {
                let n = inner
                    .strip_prefix("level")
                    .and_then(|x| x.trim().parse::<usize>().ok())
                    .filter(|&n| n >= 1)
                    .ok_or_else(|| err("expected [level N] with N >= 1"))?;
                section = Some(n);
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| err("expected key = value"))?;
            let (key, value) = (key.trim(), value.trim());
            let num = || value.parse::<u32>().map_err(|_| err("expected a number"));
            match key {
                "dimension" => dim = Some(num()? as usize),
                "degree" => degree = Some(num()?),
                "base" => base = Some(Base::new(num()?)?),
                "levels" => count = Some(num()? as usize),
                "kind" if value == "mesh" => {}
                "pattern" | "automaton" => {
                    let (value, level) = match value.rsplit_once('@') {
                        Some((v, l)) => (
                            v.trim(),
                            Some(l.trim().parse::<usize>().map_err(|_| err("bad @level"))?),
                        ),
                        None => (value, None),
                    };
                    let level = level.or(section).ok_or_else(|| err("pattern outside a level"))?;
                    entries.push((level, key.to_string(), value.to_string()));
                }
                _ => return Err(err(&format!("unknown key `{key}`"))),
            }
        }
        let dim = dim.ok_or_else(|| Error::Parse("missing dimension".into()))?;
        let base = base.ok_or_else(|| Error::Parse("missing base".into()))?;
        let degree = degree.ok_or_else(|| Error::Parse("missing degree".into()))?;
        let count = count.ok_or_else(|| Error::Parse("missing levels".into()))?;
        if count == 0 {
            return Err(Error::Parse("levels must be at least 1".into()));
        }
        let mut levels: Vec<Option<LevelSource>> = vec![None; count - 1];
        for (level, key, value) in entries {
            if level >= count {
                return Err(Error::Parse(format!("level {level} beyond levels = {count}")));
            }
            let slot = &mut levels[level - 1];
            if key == "automaton" {
                if slot.is_some() {
                    return Err(Error::Parse(format!("level {level} defined twice")));
                }
                let path = PathBuf::from(&value);
                let a = SyncAutomaton::load(&dir.join(&path))?;
                *slot = Some(LevelSource::Automaton(path, a));
            } else {
                let p = parse_pattern(&value, base, dim)?;
                match slot {
                    None => *slot = Some(LevelSource::Patterns(vec![p])),
                    Some(LevelSource::Patterns(ps)) => ps.push(p),
                    Some(LevelSource::Automaton(..)) => {
                        return Err(Error::Parse(format!("level {level} mixes automaton and patterns")))
                    }
                }
            }
        }
        let levels = levels
            .into_iter()
            .map(|s| s.unwrap_or(LevelSource::Patterns(Vec::new())))
            .collect();
        Ok(MeshSpec { base, dim, degree, levels })
    }

    pub fn load(path: &Path) -> Result<MeshSpec> {
        let text = std::fs::read_to_string(path)?;
        MeshSpec::parse(&text, path.parent().unwrap_or(Path::new(".")))
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "kind = mesh");
        let _ = writeln!(s, "dimension = {}", self.dim);
        let _ = writeln!(s, "degree = {}", self.degree);
        let _ = writeln!(s, "base = {}", self.base);
        let _ = writeln!(s, "levels = {}", self.levels.len() + 1);
        for (k, src) in self.levels.iter().enumerate() {
            let _ = writeln!(s, "[level {}]", k + 1);
            match src {
                LevelSource::Automaton(p, _) => {
                    let _ = writeln!(s, "automaton = {}", p.display());
                }
                LevelSource::Patterns(ps) => {
                    for p in ps {
                        let _ = writeln!(s, "pattern = {}", pattern_text(p));
                    }
                }
            }
        }
        s
    }

    /// Write the spec and any automaton levels into `dir`.
    pub fn save(&self, path: &Path) -> Result<()> {
        let dir = path.parent().unwrap_or(Path::new("."));
        for src in &self.levels {
            if let LevelSource::Automaton(p, a) = src {
                a.save(&dir.join(p))?;
            }
        }
        std::fs::write(path, self.to_text())?;
        Ok(())
    }

    pub fn num_levels(&self) -> usize {
        self.levels.len() + 1
    }

    /// Compile every level to an automaton.
    pub fn build(&self) -> Result<HierarchicalMesh> {
        let mut levels = Vec::with_capacity(self.levels.len());
        for (k, src) in self.levels.iter().enumerate() {
            levels.push(match src {
                LevelSource::Automaton(_, a) => a.clone(),
                LevelSource::Patterns(ps) => {
                    let mut acc = SyncAutomaton::empty(self.base, self.dim);
                    for p in ps {
                        acc = acc.union(&p.automaton(self.base, self.dim, k as u32)?)?;
                    }
                    acc.minimize()?
                }
            });
        }
        HierarchicalMesh::new(self.base, self.dim, self.degree, levels)
    }

    /// Whether the level-`(l-1)` cell `c` belongs to `Omega^l`, decided from
    /// the pattern geometry (or by running the level automaton).
    pub fn contains_cell(&self, l: usize, c: &Cell) -> bool {
        if l == 0 {
            return true;
        }
        if l > self.levels.len() || c.level as usize + 1 != l {
            return false;
        }
        match &self.levels[l - 1] {
            LevelSource::Patterns(ps) => ps.iter().any(|p| p.contains(c)),
            LevelSource::Automaton(_, a) => {
                let syms = crate::numeration::encode_point(&c.barycentre(), self.base)
                    .expect("barycentres are representable for even bases");
                a.accepts(&crate::automata::convolve(&syms))
            }
        }
    }
}
