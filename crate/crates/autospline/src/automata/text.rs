//! Plain-text automaton format.
//!
//! ```text
//! base=2
//! tracks=2
//! deterministic=true
//! state 0 initial
//! state 1 accepting
//! trans 0 0/0|1/1 1
//! trans 1 1/0|# 1
//! ```
//!
//! A letter lists one entry per track separated by `|`; an entry is
//! `alpha/beta` (integer-row digit over fraction-row digit) or `#` for
//! padding. Sign columns are written as `0/0` and `1/1`.

use std::fmt::Write as _;
use std::path::Path;

use super::letter::{Letter, PAD};
use super::{StateId, SyncAutomaton};
use crate::error::{Error, Result};
use crate::numeration::Base;

impl SyncAutomaton {
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "base={}", self.base);
        let _ = writeln!(out, "tracks={}", self.tracks);
        let _ = writeln!(out, "deterministic={}", self.deterministic);
        for s in 0..self.num_states() {
            let _ = write!(out, "state {s}");
            if self.initial.contains(&(s as StateId)) {
                out.push_str(" initial");
            }
            if self.accepting[s] {
                out.push_str(" accepting");
            }
            out.push('\n');
        }
        for (s, row) in self.trans.iter().enumerate() {
            for &(l, t) in row {
                let _ = writeln!(out, "trans {s} {} {t}", self.letter_text(l));
            }
        }
        out
    }

    fn letter_text(&self, l: Letter) -> String {
        (0..self.tracks)
            .map(|t| match l.get(t) {
                PAD => "#".to_string(),
                s => {
                    let (a, b) = self.base.split(s);
                    format!("{a}/{b}")
                }
            })
            .collect::<Vec<_>>()
            .join("|")
    }

    pub fn from_text(text: &str) -> Result<SyncAutomaton> {
        let mut base = None;
        let mut tracks = None;
        let mut deterministic = None;
        let mut states: Vec<(usize, bool, bool)> = Vec::new();
        let mut edges: Vec<(usize, String, usize, usize)> = Vec::new();
        for (no, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with("//") {
                continue;
            }
            let bad = |m: &str| Error::Parse(format!("line {}: {m}", no + 1));
            if let Some(v) = line.strip_prefix("base=") {
                let b: u32 = v.trim().parse().map_err(|_| bad("bad base"))?;
                base = Some(Base::new(b)?);
            } else if let Some(v) = line.strip_prefix("tracks=") {
                tracks = Some(v.trim().parse::<usize>().map_err(|_| bad("bad track count"))?);
            } else if let Some(v) = line.strip_prefix("deterministic=") {
                deterministic = Some(v.trim().parse::<bool>().map_err(|_| bad("bad flag"))?);
            } else if let Some(rest) = line.strip_prefix("state ") {
                let mut parts = rest.split_whitespace();
                let id: usize =
                    parts.next().and_then(|x| x.parse().ok()).ok_or_else(|| bad("bad state id"))?;
                let (mut init, mut acc) = (false, false);
                for p in parts {
                    match p {
                        "initial" => init = true,
                        "accepting" => acc = true,
                        _ => return Err(bad("unknown state attribute")),
                    }
                }
                states.push((id, init, acc));
            } else if let Some(rest) = line.strip_prefix("trans ") {
                let parts: Vec<&str> = rest.split_whitespace().collect();
                if parts.len() != 3 {
                    return Err(bad("expected `trans src letter dst`"));
                }
                let src = parts[0].parse().map_err(|_| bad("bad source"))?;
                let dst = parts[2].parse().map_err(|_| bad("bad target"))?;
                edges.push((src, parts[1].to_string(), dst, no + 1));
            } else {
                return Err(bad("unrecognised line"));
            }
        }
        let base = base.ok_or_else(|| Error::Parse("missing base".into()))?;
        let tracks = tracks.ok_or_else(|| Error::Parse("missing tracks".into()))?;
        if tracks == 0 || tracks > super::MAX_TRACKS {
            return Err(Error::Parse(format!("track count {tracks} out of range")));
        }
        let n = states.iter().map(|s| s.0 + 1).max().unwrap_or(0);
        if n == 0 {
            return Err(Error::Parse("no states".into()));
        }
        let mut accepting = vec![false; n];
        let mut initial = Vec::new();
        let mut declared = vec![false; n];
        for &(id, init, acc) in &states {
            if declared[id] {
                return Err(Error::Parse(format!("state {id} declared twice")));
            }
            declared[id] = true;
            accepting[id] = acc;
            if init {
                initial.push(id as StateId);
            }
        }
        if declared.iter().any(|&d| !d) {
            return Err(Error::Parse("state ids must be contiguous from 0".into()));
        }
        let mut trans: Vec<Vec<(Letter, StateId)>> = vec![Vec::new(); n];
        for (src, letter, dst, no) in edges {
            if src >= n || dst >= n {
                return Err(Error::Parse(format!("line {no}: undeclared state")));
            }
            let l = parse_letter(&letter, base, tracks)
                .map_err(|e| Error::Parse(format!("line {no}: {e}")))?;
            trans[src].push((l, dst as StateId));
        }
        let a = SyncAutomaton::from_parts(base, tracks, initial, accepting, trans);
        if deterministic == Some(true) && !a.deterministic {
            return Err(Error::Parse("declared deterministic but is not".into()));
        }
        Ok(a)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_text())?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<SyncAutomaton> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        Self::from_text(&text)
    }
}

fn parse_letter(text: &str, base: Base, tracks: usize) -> std::result::Result<Letter, String> {
    let entries: Vec<&str> = text.split('|').collect();
    if entries.len() != tracks {
        return Err(format!("letter `{text}` has {} entries, expected {tracks}", entries.len()));
    }
    let mut syms = Vec::with_capacity(tracks);
    for e in entries {
        if e == "#" {
            syms.push(PAD);
            continue;
        }
        let (a, b) = e.split_once('/').ok_or_else(|| format!("bad entry `{e}`"))?;
        let a: u32 = a.parse().map_err(|_| format!("bad digit in `{e}`"))?;
        let b: u32 = b.parse().map_err(|_| format!("bad digit in `{e}`"))?;
        if a >= base.get() || b >= base.get() {
            return Err(format!("entry `{e}` outside base {base}"));
        }
        syms.push(base.column(a as u8, b as u8));
    }
    let l = Letter::from_symbols(&syms);
    if l.is_all_pad(tracks) {
        return Err("all-padding letter".into());
    }
    Ok(l)
}
