use std::fmt;

use crate::error::{Error, Result};
use crate::numeration::{parse_value, Base};
use crate::Q;

/// A term: a variable, a constant, or a constant added to a term.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Term {
    Var(String),
    Const(Const),
    Add(Box<Term>, Const),
}

/// A constant vector, either literal or named in the structure.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Const {
    Named(String),
    Literal(Vec<Q>),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Formula {
    True,
    False,
    /// `(t_1, ..., t_n) ∈ L`
    In(Vec<Term>, String),
    Eq(Term, Term),
    Not(Box<Formula>),
    And(Vec<Formula>),
    Or(Vec<Formula>),
    Imp(Box<Formula>, Box<Formula>),
    Exists(Vec<String>, Box<Formula>),
    Forall(Vec<String>, Box<Formula>),
}

impl Term {
    pub fn var(name: &str) -> Term {
        Term::Var(name.to_string())
    }

    pub fn add(self, c: Const) -> Term {
        Term::Add(Box::new(self), c)
    }

    fn collect_vars(&self, out: &mut Vec<String>) {
        match self {
            Term::Var(v) => {
                if !out.contains(v) {
                    out.push(v.clone())
                }
            }
            Term::Const(_) => {}
            Term::Add(t, _) => t.collect_vars(out),
        }
    }
}

impl Formula {
    pub fn atom(terms: Vec<Term>, pred: &str) -> Formula {
        Formula::In(terms, pred.to_string())
    }

    pub fn not(f: Formula) -> Formula {
        Formula::Not(Box::new(f))
    }

    pub fn imp(a: Formula, b: Formula) -> Formula {
        Formula::Imp(Box::new(a), Box::new(b))
    }

    pub fn exists(vars: &[&str], f: Formula) -> Formula {
        Formula::Exists(vars.iter().map(|v| v.to_string()).collect(), Box::new(f))
    }

    pub fn forall(vars: &[&str], f: Formula) -> Formula {
        Formula::Forall(vars.iter().map(|v| v.to_string()).collect(), Box::new(f))
    }

    /// Free variables in order of first occurrence.
    pub fn free_vars(&self) -> Vec<String> {
        let mut out = Vec::new();
        self.collect_free(&mut Vec::new(), &mut out);
        out
    }

    fn collect_free(&self, bound: &mut Vec<String>, out: &mut Vec<String>) {
        let push_terms = |terms: &[&Term], bound: &Vec<String>, out: &mut Vec<String>| {
            let mut vs = Vec::new();
            for t in terms {
                t.collect_vars(&mut vs);
            }
            for v in vs {
                if !bound.contains(&v) && !out.contains(&v) {
                    out.push(v);
                }
            }
        };
        match self {
            Formula::True | Formula::False => {}
            Formula::In(ts, _) => push_terms(&ts.iter().collect::<Vec<_>>(), bound, out),
            Formula::Eq(a, b) => push_terms(&[a, b], bound, out),
            Formula::Not(f) => f.collect_free(bound, out),
            Formula::And(fs) | Formula::Or(fs) => {
                for f in fs {
                    f.collect_free(bound, out)
                }
            }
            Formula::Imp(a, b) => {
                a.collect_free(bound, out);
                b.collect_free(bound, out);
            }
            Formula::Exists(vs, f) | Formula::Forall(vs, f) => {
                let n = bound.len();
                bound.extend(vs.iter().cloned());
                f.collect_free(bound, out);
                bound.truncate(n);
            }
        }
    }

    /// Parse the s-expression syntax.
    ///
    /// ```text
    /// formula := true | false
    ///          | (in term NAME) | (in (term ...) NAME) | (= term term)
    ///          | (not f) | (and f ...) | (or f ...) | (imp f f)
    ///          | (exists v f) | (exists (v ...) f) | (forall ...)
    /// term    := VAR | const | (add term const)
    /// const   := NAME | [q ...]
    /// ```
    ///
    /// A bare name is a constant when listed in `constants`, otherwise a
    /// variable. Literal numbers are `p/q`, integers, or `@`-prefixed digit
    /// rows in `base`.
    pub fn parse(text: &str, constants: &[String], base: Base) -> Result<Formula> {
        let sexp = parse_sexp(text)?;
        Parser { constants, base }.formula(&sexp)
    }
}

#[derive(Clone, Debug)]
enum Sexp {
    Atom(String),
    List(Vec<Sexp>),
    Vector(Vec<String>),
}

fn parse_sexp(text: &str) -> Result<Sexp> {
    let mut tokens = Vec::new();
    let mut cur = String::new();
    for ch in text.chars() {
        match ch {
            '(' | ')' | '[' | ']' => {
                if !cur.is_empty() {
                    tokens.push(std::mem::take(&mut cur));
                }
                tokens.push(ch.to_string());
            }
            c if c.is_whitespace() || c == ',' => {
                if !cur.is_empty() {
                    tokens.push(std::mem::take(&mut cur));
                }
            }
            c => cur.push(c),
        }
    }
    if !cur.is_empty() {
        tokens.push(cur);
    }
    let mut pos = 0;
    let s = read(&tokens, &mut pos)?;
    if pos != tokens.len() {
        return Err(Error::Parse("trailing input after formula".into()));
    }
    Ok(s)
}

fn read(tokens: &[String], pos: &mut usize) -> Result<Sexp> {
    let tok = tokens.get(*pos).ok_or_else(|| Error::Parse("unexpected end of formula".into()))?;
    *pos += 1;
    match tok.as_str() {
        "(" => {
            let mut items = Vec::new();
            loop {
                match tokens.get(*pos).map(String::as_str) {
                    Some(")") => {
                        *pos += 1;
                        return Ok(Sexp::List(items));
                    }
                    Some(_) => items.push(read(tokens, pos)?),
                    None => return Err(Error::Parse("unbalanced `(`".into())),
                }
            }
        }
        "[" => {
            let mut items = Vec::new();
            loop {
                match tokens.get(*pos).map(String::as_str) {
                    Some("]") => {
                        *pos += 1;
                        return Ok(Sexp::Vector(items));
                    }
                    Some("(") | Some(")") | Some("[") => {
                        return Err(Error::Parse("only numbers may appear in `[...]`".into()))
                    }
                    Some(t) => {
                        items.push(t.to_string());
                        *pos += 1;
                    }
                    None => return Err(Error::Parse("unbalanced `[`".into())),
                }
            }
        }
        ")" | "]" => Err(Error::Parse(format!("unexpected `{tok}`"))),
        _ => Ok(Sexp::Atom(tok.clone())),
    }
}

struct Parser<'a> {
    constants: &'a [String],
    base: Base,
}

impl Parser<'_> {
    fn formula(&self, s: &Sexp) -> Result<Formula> {
        let items = match s {
            Sexp::Atom(a) if a == "true" => return Ok(Formula::True),
            Sexp::Atom(a) if a == "false" => return Ok(Formula::False),
            Sexp::List(items) if !items.is_empty() => items,
            _ => return Err(Error::Parse(format!("expected a formula, found {s:?}"))),
        };
        let head = match &items[0] {
            Sexp::Atom(h) => h.as_str(),
            _ => return Err(Error::Parse("formula head must be a keyword".into())),
        };
        let args = &items[1..];
        let arity = |n: usize| -> Result<()> {
            if args.len() != n {
                Err(Error::Parse(format!("`{head}` takes {n} arguments")))
            } else {
                Ok(())
            }
        };
        match head {
            "in" => {
                arity(2)?;
                let name = match &args[1] {
                    Sexp::Atom(n) => n.clone(),
                    _ => return Err(Error::Parse("predicate name expected".into())),
                };
                let terms = match &args[0] {
                    Sexp::List(ts) if !is_add(ts) => {
                        ts.iter().map(|t| self.term(t)).collect::<Result<Vec<_>>>()?
                    }
                    t => vec![self.term(t)?],
                };
                Ok(Formula::In(terms, name))
            }
            "=" => {
                arity(2)?;
                Ok(Formula::Eq(self.term(&args[0])?, self.term(&args[1])?))
            }
            "not" => {
                arity(1)?;
                Ok(Formula::not(self.formula(&args[0])?))
            }
            "and" => Ok(Formula::And(args.iter().map(|a| self.formula(a)).collect::<Result<_>>()?)),
            "or" => Ok(Formula::Or(args.iter().map(|a| self.formula(a)).collect::<Result<_>>()?)),
            "imp" => {
                arity(2)?;
                Ok(Formula::imp(self.formula(&args[0])?, self.formula(&args[1])?))
            }
            "exists" | "forall" => {
                arity(2)?;
                let vars = match &args[0] {
                    Sexp::Atom(v) => vec![v.clone()],
                    Sexp::List(vs) => vs
                        .iter()
                        .map(|v| match v {
                            Sexp::Atom(v) => Ok(v.clone()),
                            _ => Err(Error::Parse("quantified variable expected".into())),
                        })
                        .collect::<Result<_>>()?,
                    _ => return Err(Error::Parse("quantified variable expected".into())),
                };
                let body = Box::new(self.formula(&args[1])?);
                Ok(if head == "exists" { Formula::Exists(vars, body) } else { Formula::Forall(vars, body) })
            }
            _ => Err(Error::Parse(format!("unknown connective `{head}`"))),
        }
    }

    fn term(&self, s: &Sexp) -> Result<Term> {
        match s {
            Sexp::Atom(a) if self.constants.contains(a) => Ok(Term::Const(Const::Named(a.clone()))),
            Sexp::Atom(a) => {
                if a.chars().next().map(|c| c.is_ascii_digit() || c == '-').unwrap_or(true) {
                    return Err(Error::Parse(format!("`{a}` is not a variable name")));
                }
                Ok(Term::Var(a.clone()))
            }
            Sexp::Vector(_) => Ok(Term::Const(self.constant(s)?)),
            Sexp::List(items) if is_add(items) && items.len() == 3 => {
                Ok(Term::Add(Box::new(self.term(&items[1])?), self.constant(&items[2])?))
            }
            _ => Err(Error::Parse(format!("bad term {s:?}"))),
        }
    }

    fn constant(&self, s: &Sexp) -> Result<Const> {
        match s {
            Sexp::Atom(a) if self.constants.contains(a) => Ok(Const::Named(a.clone())),
            Sexp::Vector(items) => Ok(Const::Literal(
                items.iter().map(|t| parse_value(t, self.base)).collect::<Result<_>>()?,
            )),
            _ => Err(Error::Parse(format!("expected a constant, found {s:?}"))),
        }
    }
}

fn is_add(items: &[Sexp]) -> bool {
    matches!(items.first(), Some(Sexp::Atom(h)) if h == "add")
}

impl fmt::Display for Const {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Const::Named(n) => f.write_str(n),
            Const::Literal(v) => {
                let parts: Vec<String> = v.iter().map(|q| q.to_string()).collect();
                write!(f, "[{}]", parts.join(" "))
            }
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Var(v) => f.write_str(v),
            Term::Const(c) => write!(f, "{c}"),
            Term::Add(t, c) => write!(f, "(add {t} {c})"),
        }
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let join = |fs: &[Formula]| fs.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" ");
        match self {
            Formula::True => f.write_str("true"),
            Formula::False => f.write_str("false"),
            Formula::In(ts, p) if ts.len() == 1 => write!(f, "(in {} {p})", ts[0]),
            Formula::In(ts, p) => {
                let parts: Vec<String> = ts.iter().map(|t| t.to_string()).collect();
                write!(f, "(in ({}) {p})", parts.join(" "))
            }
            Formula::Eq(a, b) => write!(f, "(= {a} {b})"),
            Formula::Not(x) => write!(f, "(not {x})"),
            Formula::And(fs) => write!(f, "(and {})", join(fs)),
            Formula::Or(fs) => write!(f, "(or {})", join(fs)),
            Formula::Imp(a, b) => write!(f, "(imp {a} {b})"),
            Formula::Exists(vs, x) => write!(f, "(exists ({}) {x})", vs.join(" ")),
            Formula::Forall(vs, x) => write!(f, "(forall ({}) {x})", vs.join(" ")),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_print() {
        let b = Base::new(2).unwrap();
        let consts = vec!["s1".to_string()];
        let text = "(forall u (imp (in u L2) (or (in (add u s1) L1) (in (add u [1/4 -1/4]) L1))))";
        let f = Formula::parse(text, &consts, b).unwrap();
        assert_eq!(
            f.to_string(),
            "(forall (u) (imp (in u L2) (or (in (add u s1) L1) (in (add u [1/4 -1/4]) L1))))"
        );
        assert!(f.free_vars().is_empty());
        let g = Formula::parse(&f.to_string(), &consts, b).unwrap();
        assert_eq!(f, g);
    }

    #[test]
    fn tuples_and_free_variables() {
        let b = Base::new(2).unwrap();
        let f = Formula::parse("(exists v (and (in (u v w) Add) (= w x)))", &[], b).unwrap();
        assert_eq!(f.free_vars(), vec!["u", "w", "x"]);
    }

    #[test]
    fn parse_errors() {
        let b = Base::new(2).unwrap();
        assert!(Formula::parse("(in u", &[], b).is_err());
        assert!(Formula::parse("(frob u)", &[], b).is_err());
        assert!(Formula::parse("(in 3 L)", &[], b).is_err());
        assert!(Formula::parse("(not a b)", &[], b).is_err());
    }
}
