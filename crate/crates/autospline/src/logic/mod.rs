//! First-order formulas over an automatic structure, compiled to automata.
//!
//! The domain is the valid-encoding language of `Z[1/b]^d`. Predicates are
//! named automata whose tracks split into argument groups; terms are
//! variables, constant vectors, and sums of a term with a constant. Each
//! variable owns a contiguous group of tracks, and free variables are laid
//! out in order of first occurrence unless an explicit order is requested.
//!
//! Negation complements relative to the valid encodings of the free
//! variables of the negated subformula; `forall` is `not exists not`.

mod syntax;

pub use syntax::{Const, Formula, Term};

use std::cell::{OnceCell, RefCell};
use std::collections::HashMap;

use crate::automata::{join, SyncAutomaton, MAX_TRACKS};
use crate::error::{Error, Result};
use crate::numeration::{
    addition_automaton, equality_automaton, singleton_automaton, translation_automaton,
    valid_encoding_automaton, Base, ValidityTracker,
};
use crate::Q;

/// A named relation of the structure.
#[derive(Clone, Debug)]
pub struct Predicate {
    pub automaton: SyncAutomaton,
    /// Track count of each argument.
    pub widths: Vec<usize>,
}

/// An automatic structure: base, dimension, predicates and constants.
#[derive(Debug)]
pub struct Structure {
    base: Base,
    dim: usize,
    predicates: HashMap<String, Predicate>,
    constants: HashMap<String, Vec<Q>>,
    translations: RefCell<HashMap<Vec<Q>, SyncAutomaton>>,
    add: OnceCell<Predicate>,
}

impl Structure {
    /// A structure with the addition predicate `Add` (three `d`-track
    /// arguments) preinstalled.
    pub fn new(base: Base, dim: usize) -> Result<Structure> {
        if dim == 0 || 3 * dim > MAX_TRACKS {
            return Err(Error::Usage(format!("dimension {dim} unsupported")));
        }
        let s = Structure {
            base,
            dim,
            predicates: HashMap::new(),
            constants: HashMap::new(),
            translations: RefCell::new(HashMap::new()),
            add: OnceCell::new(),
        };
        Ok(s)
    }

    pub fn base(&self) -> Base {
        self.base
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Register a predicate whose arguments are all `d`-track points.
    pub fn add_predicate(&mut self, name: &str, automaton: SyncAutomaton) -> Result<()> {
        let k = automaton.tracks();
        if !k.is_multiple_of(self.dim) {
            return Err(Error::AlphabetMismatch(format!(
                "predicate {name} has {k} tracks, not a multiple of {}",
                self.dim
            )));
        }
        self.add_predicate_with_widths(name, automaton, vec![self.dim; k / self.dim])
    }

    /// Register a predicate with explicit argument widths. The automaton is
    /// intersected with the valid encodings.
    pub fn add_predicate_with_widths(
        &mut self,
        name: &str,
        automaton: SyncAutomaton,
        widths: Vec<usize>,
    ) -> Result<()> {
        if automaton.base() != self.base {
            return Err(Error::AlphabetMismatch(format!("predicate {name} uses another base")));
        }
        if widths.iter().sum::<usize>() != automaton.tracks() || widths.contains(&0) {
            return Err(Error::AlphabetMismatch(format!("predicate {name}: widths do not match tracks")));
        }
        let valid = valid_encoding_automaton(self.base, automaton.tracks())?;
        let automaton = automaton.intersect(&valid)?.minimize()?;
        self.predicates.insert(name.to_string(), Predicate { automaton, widths });
        Ok(())
    }

    pub fn add_constant(&mut self, name: &str, value: Vec<Q>) -> Result<()> {
        for c in &value {
            if !self.base.contains(c) {
                return Err(Error::NotRepresentable(c.to_string(), self.base.get()));
            }
        }
        self.constants.insert(name.to_string(), value);
        Ok(())
    }

    pub fn predicate(&self, name: &str) -> Option<&Predicate> {
        self.lookup(name).ok()
    }

    /// `Add` is built on first use; over several tracks it is large.
    fn lookup(&self, name: &str) -> Result<&Predicate> {
        if let Some(p) = self.predicates.get(name) {
            return Ok(p);
        }
        if name != "Add" {
            return Err(Error::Unbound(name.to_string()));
        }
        if let Some(p) = self.add.get() {
            return Ok(p);
        }
        let automaton = addition_automaton(self.base, self.dim)?;
        Ok(self.add.get_or_init(|| Predicate { automaton, widths: vec![self.dim; 3] }))
    }

    pub fn constant_names(&self) -> Vec<String> {
        let mut v: Vec<String> = self.constants.keys().cloned().collect();
        v.sort();
        v
    }

    /// Parse a formula, treating registered constant names as constants.
    pub fn parse(&self, text: &str) -> Result<Formula> {
        Formula::parse(text, &self.constant_names(), self.base)
    }

    /// Compile with free variables in order of first occurrence.
    pub fn compile(&self, f: &Formula) -> Result<Compiled> {
        self.compile_ordered(f, &f.free_vars())
    }

    /// Compile with the free variables laid out in `order`.
    pub fn compile_ordered(&self, f: &Formula, order: &[String]) -> Result<Compiled> {
        let free = f.free_vars();
        if free.len() != order.len() || free.iter().any(|v| !order.contains(v)) {
            return Err(Error::Usage(format!(
                "output order {order:?} does not list the free variables {free:?}"
            )));
        }
        let widths = self.infer_widths(f)?;
        let mut cx = Cx { s: self, widths: &widths, next_id: 0, env: Vec::new() };
        let mut ids = Vec::new();
        for v in order {
            let id = cx.fresh();
            cx.env.push((v.clone(), id));
            ids.push(id);
        }
        let r = cx.formula(f)?;
        let vars: Vec<(String, usize)> =
            order.iter().map(|v| (v.clone(), *widths.get(v).unwrap_or(&self.dim))).collect();
        let mut target = Vec::new();
        for (i, &id) in ids.iter().enumerate() {
            target.extend(Cx::group(id, vars[i].1));
        }
        let value = if target.is_empty() {
            match r.aut {
                None => Value::Bool(r.truth),
                Some(_) => return Err(Error::Inconsistent("sentence compiled to a relation".into())),
            }
        } else {
            let r = if r.aut.is_none() && !r.truth {
                NRel { aut: Some(SyncAutomaton::empty(self.base, target.len())), names: target.clone(), truth: true }
            } else {
                let missing: Vec<Name> = target.iter().filter(|n| !r.names.contains(n)).copied().collect();
                if missing.is_empty() { r } else { cx.njoin(r, cx.universe(&missing)?)? }
            };
            let perm: Vec<usize> = target
                .iter()
                .map(|n| r.names.iter().position(|m| m == n))
                .collect::<Option<_>>()
                .ok_or_else(|| Error::Inconsistent("bound variable escaped its scope".into()))?;
            Value::Automaton(r.aut.unwrap().reorder(&perm)?.minimize()?)
        };
        Ok(Compiled { vars, value })
    }

    /// Decide a sentence.
    pub fn evaluate_sentence(&self, f: &Formula) -> Result<bool> {
        if !f.free_vars().is_empty() {
            return Err(Error::Usage(format!("not a sentence: free variables {:?}", f.free_vars())));
        }
        match self.compile(f)?.value {
            Value::Bool(b) => Ok(b),
            Value::Automaton(_) => Err(Error::Inconsistent("sentence compiled to a relation".into())),
        }
    }

    fn const_value(&self, c: &Const) -> Result<Vec<Q>> {
        match c {
            Const::Literal(v) => {
                for x in v {
                    if !self.base.contains(x) {
                        return Err(Error::NotRepresentable(x.to_string(), self.base.get()));
                    }
                }
                Ok(v.clone())
            }
            Const::Named(n) => self.constants.get(n).cloned().ok_or_else(|| Error::Unbound(n.clone())),
        }
    }

    fn translation(&self, c: &[Q]) -> Result<SyncAutomaton> {
        if let Some(a) = self.translations.borrow().get(c) {
            return Ok(a.clone());
        }
        let a = translation_automaton(c, self.base)?;
        self.translations.borrow_mut().insert(c.to_vec(), a.clone());
        Ok(a)
    }

    fn infer_widths(&self, f: &Formula) -> Result<HashMap<String, usize>> {
        let mut w: HashMap<String, usize> = HashMap::new();
        let mut changed = true;
        while changed {
            changed = false;
            self.widths_pass(f, &mut w, &mut changed)?;
        }
        Ok(w)
    }

    fn term_width(&self, t: &Term, w: &HashMap<String, usize>) -> Result<Option<usize>> {
        Ok(match t {
            Term::Var(v) => w.get(v).copied(),
            Term::Const(c) => Some(self.const_value(c)?.len()),
            Term::Add(_, c) => Some(self.const_value(c)?.len()),
        })
    }

    fn set_width(
        t: &Term,
        width: usize,
        w: &mut HashMap<String, usize>,
        changed: &mut bool,
    ) -> Result<()> {
        match t {
            Term::Var(v) => match w.get(v) {
                Some(&x) if x != width => {
                    Err(Error::Usage(format!("variable {v} used with widths {x} and {width}")))
                }
                Some(_) => Ok(()),
                None => {
                    w.insert(v.clone(), width);
                    *changed = true;
                    Ok(())
                }
            },
            Term::Const(_) => Ok(()),
            Term::Add(inner, _) => Self::set_width(inner, width, w, changed),
        }
    }

    fn widths_pass(&self, f: &Formula, w: &mut HashMap<String, usize>, ch: &mut bool) -> Result<()> {
        match f {
            Formula::True | Formula::False => Ok(()),
            Formula::In(ts, p) => {
                let pred = self.lookup(p)?;
                if pred.widths.len() != ts.len() {
                    return Err(Error::Usage(format!(
                        "predicate {p} takes {} arguments, got {}",
                        pred.widths.len(),
                        ts.len()
                    )));
                }
                for (t, &k) in ts.iter().zip(&pred.widths) {
                    Self::set_width(t, k, w, ch)?;
                    if let Some(tw) = self.term_width(t, w)? {
                        if tw != k {
                            return Err(Error::Usage(format!("argument {t} of {p} has width {tw}, expected {k}")));
                        }
                    }
                }
                Ok(())
            }
            Formula::Eq(a, b) => {
                if let Some(k) = self.term_width(a, w)? {
                    Self::set_width(b, k, w, ch)?;
                }
                if let Some(k) = self.term_width(b, w)? {
                    Self::set_width(a, k, w, ch)?;
                }
                Ok(())
            }
            Formula::Not(x) | Formula::Exists(_, x) | Formula::Forall(_, x) => self.widths_pass(x, w, ch),
            Formula::And(fs) | Formula::Or(fs) => fs.iter().try_for_each(|x| self.widths_pass(x, w, ch)),
            Formula::Imp(a, b) => {
                self.widths_pass(a, w, ch)?;
                self.widths_pass(b, w, ch)
            }
        }
    }
}

/// The result of compiling a formula.
#[derive(Clone, Debug)]
pub struct Compiled {
    /// Free variables with their track counts, in track order.
    pub vars: Vec<(String, usize)>,
    pub value: Value,
}

#[derive(Clone, Debug)]
pub enum Value {
    Bool(bool),
    Automaton(SyncAutomaton),
}

impl Compiled {
    /// The relation automaton; an error for sentences.
    pub fn automaton(&self) -> Result<&SyncAutomaton> {
        match &self.value {
            Value::Automaton(a) => Ok(a),
            Value::Bool(_) => Err(Error::Usage("formula has no free variables".into())),
        }
    }

    pub fn into_automaton(self) -> Result<SyncAutomaton> {
        match self.value {
            Value::Automaton(a) => Ok(a),
            Value::Bool(_) => Err(Error::Usage("formula has no free variables".into())),
        }
    }
}

type Name = (u32, usize);

/// A relation whose tracks are named by (variable id, coordinate).
#[derive(Clone, Debug)]
struct NRel {
    names: Vec<Name>,
    aut: Option<SyncAutomaton>,
    truth: bool,
}

impl NRel {
    fn boolean(b: bool) -> NRel {
        NRel { names: Vec::new(), aut: None, truth: b }
    }
}

struct Cx<'a> {
    s: &'a Structure,
    widths: &'a HashMap<String, usize>,
    next_id: u32,
    env: Vec<(String, u32)>,
}

impl Cx<'_> {
    fn fresh(&mut self) -> u32 {
        self.next_id += 1;
        self.next_id - 1
    }

    fn lookup(&self, v: &str) -> Result<u32> {
        self.env
            .iter()
            .rev()
            .find(|(n, _)| n == v)
            .map(|&(_, id)| id)
            .ok_or_else(|| Error::Unbound(v.to_string()))
    }

    fn width(&self, v: &str) -> usize {
        *self.widths.get(v).unwrap_or(&self.s.dim)
    }

    fn group(id: u32, w: usize) -> Vec<Name> {
        (0..w).map(|c| (id, c)).collect()
    }

    fn njoin(&self, a: NRel, b: NRel) -> Result<NRel> {
        match (&a.aut, &b.aut) {
            (None, _) => return Ok(if a.truth { b } else { self.empty_like(&b) }),
            (_, None) => return Ok(if b.truth { a } else { self.empty_like(&a) }),
            _ => {}
        }
        let mut names = a.names.clone();
        for n in &b.names {
            if !names.contains(n) {
                names.push(*n);
            }
        }
        if names.len() > MAX_TRACKS {
            return Err(Error::Resource(format!("formula needs {} tracks", names.len())));
        }
        let amap: Vec<usize> = (0..a.names.len()).collect();
        let bmap: Vec<usize> =
            b.names.iter().map(|n| names.iter().position(|m| m == n).unwrap()).collect();
        let aut =
            join(a.aut.as_ref().unwrap(), &amap, b.aut.as_ref().unwrap(), &bmap, names.len())?.minimize()?;
        Ok(NRel { names, aut: Some(aut), truth: true })
    }

    fn empty_like(&self, r: &NRel) -> NRel {
        match &r.aut {
            None => NRel::boolean(false),
            Some(_) => NRel {
                names: r.names.clone(),
                aut: Some(SyncAutomaton::empty(self.s.base, r.names.len())),
                truth: true,
            },
        }
    }

    fn drop_names(&self, r: NRel, drop: &[Name]) -> Result<NRel> {
        let Some(aut) = r.aut else { return Ok(r) };
        let keep: Vec<usize> = (0..r.names.len()).filter(|&i| !drop.contains(&r.names[i])).collect();
        if keep.len() == r.names.len() {
            return Ok(NRel { names: r.names, aut: Some(aut), truth: true });
        }
        if keep.is_empty() {
            return Ok(NRel::boolean(!aut.is_empty()));
        }
        let names = keep.iter().map(|&i| r.names[i]).collect();
        Ok(NRel { names, aut: Some(aut.project(&keep)?.minimize()?), truth: true })
    }

    fn universe(&self, names: &[Name]) -> Result<NRel> {
        if names.is_empty() {
            return Ok(NRel::boolean(true));
        }
        Ok(NRel {
            names: names.to_vec(),
            aut: Some(valid_encoding_automaton(self.s.base, names.len())?),
            truth: true,
        })
    }

    fn negate(&self, r: NRel) -> Result<NRel> {
        match r.aut {
            None => Ok(NRel::boolean(!r.truth)),
            Some(aut) => {
                let u = ValidityTracker::new(self.s.base, r.names.len());
                let c = aut.complement_in(&u)?.minimize()?;
                Ok(NRel { names: r.names, aut: Some(c), truth: true })
            }
        }
    }

    fn union(&self, a: NRel, b: NRel) -> Result<NRel> {
        let mut names = a.names.clone();
        for n in &b.names {
            if !names.contains(n) {
                names.push(*n);
            }
        }
        if a.aut.is_none() && b.aut.is_none() {
            return Ok(NRel::boolean(a.truth || b.truth));
        }
        if (a.aut.is_none() && a.truth) || (b.aut.is_none() && b.truth) {
            return self.universe(&names);
        }
        if a.aut.is_none() {
            return Ok(b);
        }
        if b.aut.is_none() {
            return Ok(a);
        }
        let widen = |r: NRel| -> Result<NRel> {
            let missing: Vec<Name> = names.iter().filter(|n| !r.names.contains(n)).copied().collect();
            if missing.is_empty() {
                return Ok(r);
            }
            self.njoin(r, self.universe(&missing)?)
        };
        let a = widen(a)?;
        let b = widen(b)?;
        let perm: Vec<usize> =
            a.names.iter().map(|n| b.names.iter().position(|m| m == n).unwrap()).collect();
        let bb = b.aut.unwrap().reorder(&perm)?;
        let aut = a.aut.unwrap().union(&bb)?.minimize()?;
        Ok(NRel { names: a.names, aut: Some(aut), truth: true })
    }

    fn formula(&mut self, f: &Formula) -> Result<NRel> {
        match f {
            Formula::True => Ok(NRel::boolean(true)),
            Formula::False => Ok(NRel::boolean(false)),
            Formula::In(ts, p) => {
                let pred = self.s.lookup(p)?;
                self.atom(ts, &pred.automaton.clone(), &pred.widths.clone())
            }
            Formula::Eq(a, b) => {
                let w = match (flatten(a), flatten(b)) {
                    ((Some(v), _), _) | (_, (Some(v), _)) => self.width(v),
                    ((None, cs), _) => self.s.const_value(cs[0])?.len(),
                };
                let eq = equality_automaton(self.s.base, w)?;
                self.atom(&[a.clone(), b.clone()], &eq, &[w, w])
            }
            Formula::Not(x) => {
                let r = self.formula(x)?;
                self.negate(r)
            }
            Formula::And(fs) => {
                let mut acc = NRel::boolean(true);
                for x in fs {
                    let r = self.formula(x)?;
                    acc = self.njoin(acc, r)?;
                }
                Ok(acc)
            }
            Formula::Or(fs) => {
                let mut acc = NRel::boolean(false);
                for x in fs {
                    let r = self.formula(x)?;
                    acc = self.union(acc, r)?;
                }
                Ok(acc)
            }
            Formula::Imp(a, b) => {
                let na = self.formula(a)?;
                let na = self.negate(na)?;
                let rb = self.formula(b)?;
                self.union(na, rb)
            }
            Formula::Exists(vs, x) => {
                let mut drop = Vec::new();
                for v in vs {
                    let id = self.fresh();
                    self.env.push((v.clone(), id));
                    drop.extend(Self::group(id, self.width(v)));
                }
                let r = self.formula(x);
                self.env.truncate(self.env.len() - vs.len());
                self.drop_names(r?, &drop)
            }
            Formula::Forall(vs, x) => {
                let inner = Formula::Exists(vs.clone(), Box::new(Formula::not((**x).clone())));
                let r = self.formula(&inner)?;
                self.negate(r)
            }
        }
    }

    fn atom(&mut self, ts: &[Term], pred: &SyncAutomaton, widths: &[usize]) -> Result<NRel> {
        // slots start as temporaries
        let mut names = Vec::new();
        let mut slots = Vec::new();
        for &w in widths {
            let id = self.fresh();
            slots.push(id);
            names.extend(Self::group(id, w));
        }
        let mut rel = NRel { names, aut: Some(pred.clone()), truth: true };
        let mut drop = Vec::new();
        for (i, t) in ts.iter().enumerate() {
            let w = widths[i];
            let slot = slots[i];
            match flatten(t) {
                (Some(v), consts) if consts.is_empty() => {
                    let id = self.lookup(v)?;
                    let target = Self::group(id, w);
                    if rel.names.contains(&target[0]) {
                        let eq = equality_automaton(self.s.base, w)?;
                        let mut n = Self::group(slot, w);
                        n.extend(target);
                        rel = self.njoin(rel, NRel { names: n, aut: Some(eq), truth: true })?;
                        drop.extend(Self::group(slot, w));
                    } else {
                        for n in rel.names.iter_mut() {
                            if n.0 == slot {
                                n.0 = id;
                            }
                        }
                    }
                }
                (Some(v), consts) => {
                    let c = self.sum_consts(&consts, w)?;
                    let id = self.lookup(v)?;
                    let tr = self.s.translation(&c)?;
                    let mut n = Self::group(id, w);
                    n.extend(Self::group(slot, w));
                    rel = self.njoin(rel, NRel { names: n, aut: Some(tr), truth: true })?;
                    drop.extend(Self::group(slot, w));
                }
                (None, consts) => {
                    let c = self.sum_consts(&consts, w)?;
                    let single = singleton_automaton(&c, self.s.base)?;
                    rel = self.njoin(
                        rel,
                        NRel { names: Self::group(slot, w), aut: Some(single), truth: true },
                    )?;
                    drop.extend(Self::group(slot, w));
                }
            }
        }
        self.drop_names(rel, &drop)
    }

    fn sum_consts(&self, consts: &[&Const], w: usize) -> Result<Vec<Q>> {
        let mut acc = vec![Q::from_integer(0.into()); w];
        for c in consts {
            let v = self.s.const_value(c)?;
            if v.len() != w {
                return Err(Error::Usage(format!("constant {c} has {} coordinates, expected {w}", v.len())));
            }
            for (a, x) in acc.iter_mut().zip(v) {
                *a += x;
            }
        }
        Ok(acc)
    }
}

/// Split a term into its variable (if any) and the constants added to it.
fn flatten(t: &Term) -> (Option<&str>, Vec<&Const>) {
    match t {
        Term::Var(v) => (Some(v.as_str()), Vec::new()),
        Term::Const(c) => (None, vec![c]),
        Term::Add(inner, c) => {
            let (v, mut cs) = flatten(inner);
            cs.push(c);
            (v, cs)
        }
    }
}
