//! Shared helpers for the integration tests: random automata with an
//! independent word model, random dyadic rationals, and a CLI runner.
#![allow(dead_code)]

use autospline::automata::{Letter, SyncAutomaton, TrackWord, PAD};
use autospline::numeration::Base;
use autospline::Q;
use num_bigint::BigInt;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub fn q(n: i64, d: i64) -> Q {
    Q::new(n.into(), d.into())
}

/// A dyadic `n / 2^e` with `|n| < 2^bits`.
pub fn random_dyadic(rng: &mut ChaCha8Rng, bits: u32, max_exp: u32) -> Q {
    let n: i64 = rng.gen_range(-(1i64 << bits) + 1..1i64 << bits);
    let e = rng.gen_range(0..=max_exp);
    Q::new(n.into(), BigInt::from(1) << e)
}

/// A dyadic in `[lo, hi)` on the grid `1/2^e`.
pub fn random_in(rng: &mut ChaCha8Rng, lo: i64, hi: i64, e: u32) -> Q {
    let s = 1i64 << e;
    Q::new(rng.gen_range(lo * s..hi * s).into(), s.into())
}

/// Letters of the test alphabet: symbols `{0, 1}` per track, plus padding on
/// two tracks, never all padding.
pub fn alphabet(tracks: usize) -> Vec<Vec<u8>> {
    match tracks {
        1 => vec![vec![0], vec![1]],
        2 => {
            let s = [0u8, 1, PAD];
            let mut v = Vec::new();
            for a in s {
                for b in s {
                    if !(a == PAD && b == PAD) {
                        v.push(vec![a, b]);
                    }
                }
            }
            v
        }
        _ => panic!("one or two tracks"),
    }
}

/// An explicit NFA over [`alphabet`], simulated without the library.
#[derive(Clone, Debug)]
pub struct Nfa {
    pub tracks: usize,
    pub initial: Vec<usize>,
    pub accepting: Vec<bool>,
    /// `edges[s]` lists `(letter index, target)`.
    pub edges: Vec<Vec<(usize, usize)>>,
}

impl Nfa {
    pub fn random(rng: &mut ChaCha8Rng, tracks: usize, max_states: usize) -> Nfa {
        let n = rng.gen_range(1..=max_states);
        let letters = alphabet(tracks).len();
        let density = rng.gen_range(0.1..0.45);
        let mut edges = vec![Vec::new(); n];
        for row in edges.iter_mut() {
            for a in 0..letters {
                for t in 0..n {
                    if rng.gen_bool(density) {
                        row.push((a, t));
                    }
                }
            }
        }
        let mut initial: Vec<usize> = (0..n).filter(|_| rng.gen_bool(0.3)).collect();
        if initial.is_empty() {
            initial.push(0);
        }
        let accepting = (0..n).map(|_| rng.gen_bool(0.4)).collect();
        Nfa { tracks, initial, accepting, edges }
    }

    pub fn to_automaton(&self) -> SyncAutomaton {
        let alpha = alphabet(self.tracks);
        let trans = self
            .edges
            .iter()
            .map(|row| row.iter().map(|&(a, t)| (Letter::from_symbols(&alpha[a]), t as u32)).collect())
            .collect();
        let init = self.initial.iter().map(|&s| s as u32).collect();
        SyncAutomaton::from_parts(Base::new(2).unwrap(), self.tracks, init, self.accepting.clone(), trans)
    }

    pub fn step(&self, cur: &[bool], a: usize) -> Vec<bool> {
        let mut next = vec![false; cur.len()];
        for (s, _) in cur.iter().enumerate().filter(|(_, &on)| on) {
            for &(x, t) in &self.edges[s] {
                if x == a {
                    next[t] = true;
                }
            }
        }
        next
    }

    pub fn start(&self) -> Vec<bool> {
        let mut v = vec![false; self.edges.len()];
        for &s in &self.initial {
            v[s] = true;
        }
        v
    }

    pub fn accepts_set(&self, cur: &[bool]) -> bool {
        cur.iter().zip(&self.accepting).any(|(&c, &a)| c && a)
    }

    /// Acceptance of a word given as letter indices.
    pub fn accepts(&self, word: &[usize]) -> bool {
        let mut cur = self.start();
        for &a in word {
            cur = self.step(&cur, a);
        }
        self.accepts_set(&cur)
    }

    /// Acceptance of a word given as symbol tuples; unknown letters reject.
    pub fn accepts_symbols(&self, word: &[Vec<u8>]) -> bool {
        let alpha = alphabet(self.tracks);
        let mut idx = Vec::with_capacity(word.len());
        for l in word {
            match alpha.iter().position(|x| x == l) {
                Some(i) => idx.push(i),
                None => return false,
            }
        }
        self.accepts(&idx)
    }
}

const DEAD: u64 = u64::MAX;

/// Incremental simulation over a fixed alphabet: a state id for
/// deterministic automata, a bit set of states otherwise.
pub struct Runner {
    det: bool,
    succ: Vec<Vec<u64>>,
    initial: u64,
    accepting: Vec<bool>,
    accept_mask: u64,
}

impl Runner {
    pub fn new(a: &SyncAutomaton, alpha: &[Vec<u8>]) -> Runner {
        let letters: Vec<Letter> = alpha.iter().map(|s| Letter::from_symbols(s)).collect();
        let n = a.num_states();
        let det = a.is_deterministic();
        assert!(det || n <= 64, "nondeterministic automaton with {n} states");
        let mut succ = vec![vec![if det { DEAD } else { 0 }; letters.len()]; n];
        for (s, row) in succ.iter_mut().enumerate() {
            for &(l, t) in a.transitions(s as u32) {
                if let Some(i) = letters.iter().position(|&x| x == l) {
                    if det {
                        row[i] = t as u64;
                    } else {
                        row[i] |= 1 << t;
                    }
                }
            }
        }
        let accepting: Vec<bool> = (0..n).map(|s| a.is_accepting(s as u32)).collect();
        let initial = if det {
            a.initial_states()[0] as u64
        } else {
            a.initial_states().iter().fold(0, |m, &s| m | 1 << s)
        };
        let accept_mask = if det { 0 } else { mask(&accepting) };
        Runner { det, succ, initial, accept_mask, accepting }
    }

    /// The model automaton itself, with letter `i` read as `perm[i]`.
    pub fn from_nfa(a: &Nfa, perm: &[usize]) -> Runner {
        let n = a.edges.len();
        let mut succ = vec![vec![0u64; perm.len()]; n];
        for (s, row) in a.edges.iter().enumerate() {
            for &(x, t) in row {
                for (i, &p) in perm.iter().enumerate() {
                    if p == x {
                        succ[s][i] |= 1 << t;
                    }
                }
            }
        }
        let initial = a.initial.iter().fold(0, |m, &s| m | 1 << s);
        Runner { det: false, succ, initial, accept_mask: mask(&a.accepting), accepting: a.accepting.clone() }
    }

    pub fn start(&self) -> u64 {
        self.initial
    }

    pub fn step(&self, cur: u64, a: usize) -> u64 {
        if self.det {
            return if cur == DEAD { DEAD } else { self.succ[cur as usize][a] };
        }
        let mut next = 0;
        let mut rest = cur;
        while rest != 0 {
            let s = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            next |= self.succ[s][a];
        }
        next
    }

    pub fn accepting(&self, cur: u64) -> bool {
        if self.det {
            cur != DEAD && self.accepting[cur as usize]
        } else {
            cur & self.accept_mask != 0
        }
    }
}

fn mask(bits: &[bool]) -> u64 {
    bits.iter().enumerate().filter(|(_, &b)| b).fold(0, |m, (i, _)| m | 1 << i)
}

/// Visit every word of length `<= max_len` over `letters` letters, calling
/// `check(word, accepted)` with the acceptance of each runner.
pub fn for_all_words(
    runners: &[&Runner],
    letters: usize,
    max_len: usize,
    check: &mut dyn FnMut(&[usize], &[bool]) -> Result<(), String>,
) -> Result<(), String> {
    fn go(
        runners: &[&Runner],
        letters: usize,
        max_len: usize,
        word: &mut Vec<usize>,
        states: &[u64],
        check: &mut dyn FnMut(&[usize], &[bool]) -> Result<(), String>,
    ) -> Result<(), String> {
        let acc: Vec<bool> = runners.iter().zip(states).map(|(r, &s)| r.accepting(s)).collect();
        check(word, &acc)?;
        if word.len() == max_len {
            return Ok(());
        }
        for a in 0..letters {
            let next: Vec<u64> = runners.iter().zip(states).map(|(r, &s)| r.step(s, a)).collect();
            word.push(a);
            go(runners, letters, max_len, word, &next, check)?;
            word.pop();
        }
        Ok(())
    }
    let start: Vec<u64> = runners.iter().map(|r| r.start()).collect();
    go(runners, letters, max_len, &mut Vec::new(), &start, check)
}

/// Check the Boolean and quantifier constructions on random automata
/// against the explicit word model, on all words up to `max_len`.
pub fn closure_laws(seed: u64, max_len: usize) -> Result<(), String> {
    use rand::SeedableRng;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let e = |r: autospline::Result<SyncAutomaton>| r.map_err(|e| e.to_string());
    let a = Nfa::random(&mut rng, 2, 4);
    let b = Nfa::random(&mut rng, 2, 4);
    let (aa, ba) = (a.to_automaton(), b.to_automaton());
    let alpha2 = alphabet(2);
    let swap: Vec<usize> =
        alpha2.iter().map(|l| alpha2.iter().position(|x| *x == vec![l[1], l[0]]).unwrap()).collect();

    let results = [
        e(aa.union(&ba))?,
        e(aa.intersect(&ba))?,
        e(aa.difference(&ba))?,
        e(aa.complement_within(&ba))?,
        e(aa.determinize())?,
        e(aa.minimize())?,
        e(aa.reorder(&[1, 0]))?,
    ];
    let names = ["union", "intersection", "difference", "complement", "determinize", "minimize", "reorder"];
    let mut runners: Vec<Runner> = results.iter().map(|r| Runner::new(r, &alpha2)).collect();
    let ident: Vec<usize> = (0..alpha2.len()).collect();
    runners.push(Runner::from_nfa(&a, &ident));
    runners.push(Runner::from_nfa(&b, &ident));
    runners.push(Runner::from_nfa(&a, &swap));
    let refs: Vec<&Runner> = runners.iter().collect();
    let k = results.len();
    for_all_words(&refs, alpha2.len(), max_len, &mut |w, got| {
        let (x, y, z) = (got[k], got[k + 1], got[k + 2]);
        let want = [x || y, x && y, x && !y, y && !x, x, x, z];
        for i in 0..k {
            if want[i] != got[i] {
                return Err(format!("seed {seed}: {} differs on {w:?}", names[i]));
            }
        }
        Ok(())
    })?;

    // existential projection onto each track
    for keep in 0..2 {
        let p = e(aa.project(&[keep]))?;
        let r = Runner::new(&p, &alphabet(1));
        for_all_words(&[&r], 2, max_len, &mut |w, got| {
            let want = projection_model(&a, keep, w);
            if want != got[0] {
                return Err(format!("seed {seed}: projection onto {keep} differs on {w:?}"));
            }
            Ok(())
        })?;
    }

    // cylindrification: a 1-track language joined with a 1-track language
    let c = Nfa::random(&mut rng, 1, 4);
    let d = Nfa::random(&mut rng, 1, 4);
    let j = e(autospline::automata::join(&c.to_automaton(), &[0], &d.to_automaton(), &[1], 2))?;
    let r = Runner::new(&j, &alpha2);
    for_all_words(&[&r], alpha2.len(), max_len, &mut |w, got| {
        let track = |t: usize| -> Vec<Vec<u8>> {
            let mut s: Vec<Vec<u8>> = w.iter().map(|&i| vec![alpha2[i][t]]).collect();
            while s.last().is_some_and(|l| l[0] == PAD) {
                s.pop();
            }
            s
        };
        let want = c.accepts_symbols(&track(0)) && d.accepts_symbols(&track(1));
        if want != got[0] {
            return Err(format!("seed {seed}: join differs on {w:?}"));
        }
        Ok(())
    })?;
    Ok(())
}

/// Whether some word of `a` restricts on track `keep` to `p` followed by
/// padding. The prefix is enumerated outright; the padded tail is a search
/// over states.
fn projection_model(a: &Nfa, keep: usize, p: &[usize]) -> bool {
    let alpha = alphabet(2);
    let other = [0u8, 1, PAD];
    let mut sets = vec![a.start()];
    for &sym in p {
        let mut next = Vec::new();
        for cur in &sets {
            for &o in &other {
                let mut l = vec![0u8; 2];
                l[keep] = sym as u8;
                l[1 - keep] = o;
                let i = alpha.iter().position(|x| *x == l).unwrap();
                next.push(a.step(cur, i));
            }
        }
        sets = next;
    }
    let tail: Vec<usize> = alpha.iter().enumerate().filter(|(_, l)| l[keep] == PAD).map(|(i, _)| i).collect();
    let n = a.edges.len();
    let mut seen = vec![false; n];
    let mut stack: Vec<usize> = Vec::new();
    for cur in &sets {
        for (s, &on) in cur.iter().enumerate() {
            if on && !seen[s] {
                seen[s] = true;
                stack.push(s);
            }
        }
    }
    while let Some(s) = stack.pop() {
        if a.accepting[s] {
            return true;
        }
        for &(x, t) in &a.edges[s] {
            if tail.contains(&x) && !seen[t] {
                seen[t] = true;
                stack.push(t);
            }
        }
    }
    false
}

/// Build a word from symbol tuples.
pub fn word(letters: &[Vec<u8>]) -> TrackWord {
    TrackWord { tracks: letters[0].len(), letters: letters.iter().map(|l| Letter::from_symbols(l)).collect() }
}

/// Run the CLI in-process; returns `(exit code, stdout)`.
pub fn cli(args: &[&str]) -> (i32, String) {
    let mut out = Vec::new();
    let mut argv = vec!["autospline"];
    argv.extend_from_slice(args);
    let code = autospline::cli::run(argv, &mut out);
    (code, String::from_utf8(out).unwrap())
}
