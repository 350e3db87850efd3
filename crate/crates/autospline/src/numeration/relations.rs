use std::collections::HashMap;
use std::sync::{Mutex, OnceLock};

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use super::{Base, DyadicRational};
use crate::automata::{convolve, join, Letter, StateId, SyncAutomaton, Universe, PAD};
use crate::error::{Error, Result};
use crate::Q;

// Per-track validity states.
const START: u64 = 0;
const POS_SIGN: u64 = 1;
const NEG_SIGN: u64 = 2;
const NONZERO: u64 = 3;
const ZERO_COL: u64 = 4;
const PADDED: u64 = 5;
const BITS: u32 = 3;

/// The universe `L_b^k` of well-formed k-track encodings, as an implicit
/// deterministic automaton.
#[derive(Clone, Copy, Debug)]
pub struct ValidityTracker {
    base: Base,
    tracks: usize,
}

impl ValidityTracker {
    pub fn new(base: Base, tracks: usize) -> Self {
        assert!((1..=crate::automata::MAX_TRACKS).contains(&tracks));
        ValidityTracker { base, tracks }
    }

    fn track_state(s: u64, t: usize) -> u64 {
        (s >> (BITS as usize * t)) & 0b111
    }

    fn track_accepting(s: u64) -> bool {
        matches!(s, POS_SIGN | NONZERO | PADDED)
    }

    fn track_step(&self, s: u64, sym: u8) -> Option<u64> {
        let b = self.base;
        match s {
            START if sym == b.plus_sign() => Some(POS_SIGN),
            START if sym == b.minus_sign() => Some(NEG_SIGN),
            START => None,
            PADDED => (sym == PAD).then_some(PADDED),
            _ if sym == PAD => Self::track_accepting(s).then_some(PADDED),
            _ if sym >= b.symbols() => None,
            _ if sym == 0 => Some(ZERO_COL),
            _ => Some(NONZERO),
        }
    }

    fn track_symbols(&self, s: u64) -> Vec<u8> {
        let b = self.base;
        match s {
            START => vec![b.plus_sign(), b.minus_sign()],
            PADDED => vec![PAD],
            _ => {
                let mut v: Vec<u8> = (0..b.symbols()).collect();
                if Self::track_accepting(s) {
                    v.push(PAD);
                }
                v
            }
        }
    }
}

impl Universe for ValidityTracker {
    fn tracks(&self) -> usize {
        self.tracks
    }

    fn start(&self) -> u64 {
        0
    }

    fn step(&self, state: u64, l: Letter) -> Option<u64> {
        if l.is_all_pad(self.tracks) {
            return None;
        }
        let mut out = 0u64;
        for t in 0..self.tracks {
            let s = self.track_step(Self::track_state(state, t), l.get(t))?;
            out |= s << (BITS as usize * t);
        }
        Some(out)
    }

    fn accepting(&self, state: u64) -> bool {
        (0..self.tracks).all(|t| Self::track_accepting(Self::track_state(state, t)))
    }

    fn letters(&self, state: u64) -> Vec<Letter> {
        let per: Vec<Vec<u8>> =
            (0..self.tracks).map(|t| self.track_symbols(Self::track_state(state, t))).collect();
        let mut out = vec![Letter(0)];
        for (t, syms) in per.iter().enumerate() {
            let mut next = Vec::with_capacity(out.len() * syms.len());
            for l in &out {
                for &s in syms {
                    next.push(l.with(t, s));
                }
            }
            out = next;
        }
        out.retain(|l| !l.is_all_pad(self.tracks));
        out.sort_unstable();
        out
    }
}

/// Materialize an implicit universe as an explicit automaton.
pub(crate) fn materialize<U: Universe>(u: &U, base: Base) -> Result<SyncAutomaton> {
    let mut ids: HashMap<u64, StateId> = HashMap::new();
    let mut states = vec![u.start()];
    ids.insert(u.start(), 0);
    let mut trans = Vec::new();
    let mut accepting = Vec::new();
    let mut i = 0;
    while i < states.len() {
        let s = states[i];
        accepting.push(u.accepting(s));
        let mut row = Vec::new();
        for l in u.letters(s) {
            if let Some(t) = u.step(s, l) {
                let id = *ids.entry(t).or_insert_with(|| {
                    states.push(t);
                    (states.len() - 1) as StateId
                });
                row.push((l, id));
            }
        }
        trans.push(row);
        i += 1;
        if states.len() > crate::automata::state_budget() {
            return Err(Error::StateBudget(crate::automata::state_budget()));
        }
    }
    SyncAutomaton::from_parts(base, u.tracks(), vec![0], accepting, trans).minimize()
}

#[derive(Clone, Copy, PartialEq, Eq, Hash)]
enum Kind {
    Valid,
    Add,
    Equal,
    Negate,
    Positive,
    Less,
}

fn cache() -> &'static Mutex<HashMap<(Kind, u32, usize), SyncAutomaton>> {
    static CACHE: OnceLock<Mutex<HashMap<(Kind, u32, usize), SyncAutomaton>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

fn cached(
    kind: Kind,
    base: Base,
    d: usize,
    build: impl FnOnce() -> Result<SyncAutomaton>,
) -> Result<SyncAutomaton> {
    if let Some(a) = cache().lock().unwrap().get(&(kind, base.get(), d)) {
        return Ok(a.clone());
    }
    let a = build()?;
    cache().lock().unwrap().insert((kind, base.get(), d), a.clone());
    Ok(a)
}

/// Product of `d` copies of a `k`-track relation. Argument `g` of the copy
/// for coordinate `c` lands on track `g * d + c`.
fn coordinatewise(one: &SyncAutomaton, d: usize) -> Result<SyncAutomaton> {
    let k = one.tracks();
    if d == 1 {
        return Ok(one.clone());
    }
    let map = |c: usize| -> Vec<usize> { (0..k).map(|g| g * d + c).collect() };
    let mut acc = one.clone();
    let mut acc_map = map(0);
    for c in 1..d {
        let m = map(c);
        let tracks = acc_map.len() + k;
        // intermediate layout: already-placed tracks compacted in order
        let mut all: Vec<usize> = acc_map.iter().chain(&m).copied().collect();
        all.sort_unstable();
        let pos = |t: usize| all.iter().position(|&x| x == t).unwrap();
        let amap: Vec<usize> = acc_map.iter().map(|&t| pos(t)).collect();
        let bmap: Vec<usize> = m.iter().map(|&t| pos(t)).collect();
        acc = join(&acc, &amap, one, &bmap, tracks)?.minimize()?;
        acc_map = all;
    }
    Ok(acc)
}

/// `L_b^d`: every track a canonical encoding.
pub fn valid_encoding_automaton(base: Base, d: usize) -> Result<SyncAutomaton> {
    cached(Kind::Valid, base, d, || {
        let one = materialize(&ValidityTracker::new(base, 1), base)?;
        coordinatewise(&one, d)
    })
}

/// The graph of addition on `Z[1/b]^d`: tracks `u_1..u_d, v_1..v_d, w_1..w_d`
/// with `u + v = w`.
pub fn addition_automaton(base: Base, d: usize) -> Result<SyncAutomaton> {
    cached(Kind::Add, base, d, || {
        let one = cached(Kind::Add, base, 1, || add_core(base))?;
        coordinatewise(&one, d)
    })
}

// Guessed-carry addition on one coordinate. Each nondeterministic branch
// fixes which magnitude is the sum of the other two and the carry `c0` that
// the fractional part passes to the integer part.
fn add_core(base: Base) -> Result<SyncAutomaton> {
    let b = base.get() as i32;
    // state = (role, carry, debt, zero_flag) packed; 0 is the start
    let pack = |role: usize, c: i32, k: i32, z: bool| -> StateId {
        1 + (role as StateId) * 8 + (c as StateId) * 4 + (k as StateId) * 2 + z as StateId
    };
    let n = 1 + 3 * 8;
    let mut trans: Vec<Vec<(Letter, StateId)>> = vec![Vec::new(); n];
    let mut accepting = vec![false; n];
    for role in 0..3 {
        for z in [false, true] {
            accepting[pack(role, 0, 0, z) as usize] = true;
        }
    }
    let plus = base.plus_sign();
    let minus = base.minus_sign();
    // sign column
    for &sx in &[plus, minus] {
        for &sy in &[plus, minus] {
            for &sz in &[plus, minus] {
                let l = Letter::from_symbols(&[sx, sy, sz]);
                let roles: Vec<(usize, u8)> =
                    if sx == sy { vec![(0, sx)] } else { vec![(1, sx), (2, sy)] };
                for (role, expect) in roles {
                    let zflag = if sz == expect {
                        false
                    } else if sx != sy && sz == plus {
                        true
                    } else {
                        continue;
                    };
                    for c0 in 0..2 {
                        trans[0].push((l, pack(role, c0, c0, zflag)));
                    }
                }
            }
        }
    }
    let split = |s: u8| -> (i32, i32) {
        if s == PAD {
            (0, 0)
        } else {
            let (a, c) = base.split(s);
            (a as i32, c as i32)
        }
    };
    let mut syms: Vec<u8> = (0..base.symbols()).collect();
    syms.push(PAD);
    for &x in &syms {
        for &y in &syms {
            for &w in &syms {
                if x == PAD && y == PAD && w == PAD {
                    continue;
                }
                let l = Letter::from_symbols(&[x, y, w]);
                let (dx, dy, dw) = (split(x), split(y), split(w));
                for role in 0..3 {
                    // a + b = s on magnitudes
                    let (a, bb, s) = match role {
                        0 => (dx, dy, dw),
                        1 => (dw, dy, dx),
                        _ => (dw, dx, dy),
                    };
                    for z in [false, true] {
                        if z && w != PAD {
                            continue;
                        }
                        for c in 0..2 {
                            for k in 0..2 {
                                let sum = a.0 + bb.0 + c;
                                if sum % b != s.0 {
                                    continue;
                                }
                                let c2 = sum / b;
                                let k2 = s.1 + b * k - a.1 - bb.1;
                                if !(0..=1).contains(&k2) {
                                    continue;
                                }
                                trans[pack(role, c, k, z) as usize].push((l, pack(role, c2, k2, z)));
                            }
                        }
                    }
                }
            }
        }
    }
    let core = SyncAutomaton::from_parts(base, 3, vec![0], accepting, trans);
    core.restrict_to(&ValidityTracker::new(base, 3))?.minimize()
}

/// Tracks `x_1..x_d, y_1..y_d` with `x = y`.
pub fn equality_automaton(base: Base, d: usize) -> Result<SyncAutomaton> {
    cached(Kind::Equal, base, d, || {
        let one = cached(Kind::Equal, base, 1, || {
            let v = valid_encoding_automaton(base, 1)?;
            let mut trans = Vec::new();
            for s in 0..v.num_states() {
                trans.push(
                    v.transitions(s as StateId)
                        .iter()
                        .map(|&(l, t)| (Letter::from_symbols(&[l.get(0), l.get(0)]), t))
                        .collect(),
                );
            }
            let accepting = (0..v.num_states()).map(|s| v.is_accepting(s as StateId)).collect();
            SyncAutomaton::from_parts(base, 2, v.initial_states().to_vec(), accepting, trans)
                .minimize()
        })?;
        coordinatewise(&one, d)
    })
}

/// Tracks `x_1..x_d, y_1..y_d` with `y = -x`.
pub fn negation_automaton(base: Base, d: usize) -> Result<SyncAutomaton> {
    cached(Kind::Negate, base, d, || {
        let one = cached(Kind::Negate, base, 1, || {
            let (p, m) = (base.plus_sign(), base.minus_sign());
            let mut trans: Vec<Vec<(Letter, StateId)>> = vec![Vec::new(); 3];
            trans[0].push((Letter::from_symbols(&[p, p]), 1));
            trans[0].push((Letter::from_symbols(&[p, m]), 2));
            trans[0].push((Letter::from_symbols(&[m, p]), 2));
            for s in 0..base.symbols() {
                trans[2].push((Letter::from_symbols(&[s, s]), 2));
            }
            let core = SyncAutomaton::from_parts(base, 2, vec![0], vec![false, true, true], trans);
            core.restrict_to(&ValidityTracker::new(base, 2))?.minimize()
        })?;
        coordinatewise(&one, d)
    })
}

/// Points with every coordinate strictly positive.
pub fn positive_automaton(base: Base, d: usize) -> Result<SyncAutomaton> {
    cached(Kind::Positive, base, d, || {
        let one = cached(Kind::Positive, base, 1, || {
            let mut trans: Vec<Vec<(Letter, StateId)>> = vec![Vec::new(); 2];
            trans[0].push((Letter::from_symbols(&[base.plus_sign()]), 1));
            let mut accepting = vec![false, false];
            trans.push(Vec::new());
            accepting.push(true);
            for s in 0..base.symbols() {
                trans[1].push((Letter::from_symbols(&[s]), 2));
                trans[2].push((Letter::from_symbols(&[s]), 2));
            }
            let core = SyncAutomaton::from_parts(base, 1, vec![0], accepting, trans);
            core.restrict_to(&ValidityTracker::new(base, 1))?.minimize()
        })?;
        coordinatewise(&one, d)
    })
}

/// Tracks `r_1..r_d, s_1..s_d` with `r_i < s_i` for every `i`.
pub fn less_than_automaton(base: Base, d: usize) -> Result<SyncAutomaton> {
    cached(Kind::Less, base, d, || {
        let one = cached(Kind::Less, base, 1, || {
            let add = addition_automaton(base, 1)?;
            let pos = positive_automaton(base, 1)?;
            join(&add, &[0, 1, 2], &pos, &[1], 3)?.project(&[0, 2])?.minimize()
        })?;
        coordinatewise(&one, d)
    })
}

/// The single encoded point `z`.
pub fn singleton_automaton(z: &[Q], base: Base) -> Result<SyncAutomaton> {
    let syms = super::encode_point(z, base)?;
    Ok(SyncAutomaton::from_words(base, z.len(), &[convolve(&syms)]))
}

/// Relational composition of binary relations `r(x, y)` and `s(y, z)`.
pub(crate) fn compose(r: &SyncAutomaton, s: &SyncAutomaton) -> Result<SyncAutomaton> {
    join(r, &[0, 1], s, &[1, 2], 3)?.project(&[0, 2])?.minimize()
}

// (x, n x) for a natural number n, by doubling and adding.
fn integer_multiple(n: &BigInt, base: Base) -> Result<SyncAutomaton> {
    if n.is_zero() {
        let zero = singleton_automaton(&[Q::zero()], base)?;
        let valid = valid_encoding_automaton(base, 1)?;
        return join(&valid, &[0], &zero, &[1], 2)?.minimize();
    }
    let add = addition_automaton(base, 1)?;
    let eq = equality_automaton(base, 1)?;
    // (x, 2x)
    let double = join(&add, &[0, 1, 2], &eq, &[0, 1], 3)?.project(&[0, 2])?.minimize()?;
    let bits = n.to_str_radix(2);
    let mut acc = eq.clone();
    for (i, ch) in bits.chars().enumerate() {
        if i > 0 {
            acc = compose(&acc, &double)?;
        }
        if ch == '1' && i > 0 {
            // (x, y) -> (x, y + x)
            acc = join(&acc, &[0, 1], &add, &[0, 1, 2], 3)?.project(&[0, 2])?.minimize()?;
        }
    }
    Ok(acc)
}

/// The relation `{((λ)_b, (μλ)_b)}` for a constant `μ ∈ Z[1/b]`.
///
/// With `μ = p/q` in lowest terms this composes `(x, x/q)`, the track swap
/// of `(z, qz)`, with `(z, pz)`.
pub fn scalar_multiple_automaton(mu: &Q, base: Base) -> Result<SyncAutomaton> {
    DyadicRational::from_rational(mu, base)?;
    let mut m = integer_multiple(&mu.numer().abs(), base)?;
    if mu.is_negative() {
        m = compose(&m, &negation_automaton(base, 1)?)?;
    }
    if mu.denom().is_one() {
        return Ok(m);
    }
    let divide = integer_multiple(mu.denom(), base)?.reorder(&[1, 0])?;
    compose(&divide, &m)
}

/// Tracks `x_1..x_d, y_1..y_d` with `y = x + c`.
pub fn translation_automaton(c: &[Q], base: Base) -> Result<SyncAutomaton> {
    let d = c.len();
    let add = addition_automaton(base, 1)?;
    let mut coords = Vec::with_capacity(d);
    for ci in c {
        let single = singleton_automaton(std::slice::from_ref(ci), base)?;
        coords.push(join(&add, &[0, 1, 2], &single, &[1], 3)?.project(&[0, 2])?.minimize()?);
    }
    if d == 1 {
        return Ok(coords.pop().unwrap());
    }
    let mut acc = coords[0].clone();
    let mut placed = vec![0, d];
    for (i, ci) in coords.iter().enumerate().skip(1) {
        let mut all = placed.clone();
        all.push(i);
        all.push(d + i);
        all.sort_unstable();
        let pos = |t: usize| all.iter().position(|&x| x == t).unwrap();
        let amap: Vec<usize> = placed.iter().map(|&t| pos(t)).collect();
        acc = join(&acc, &amap, ci, &[pos(i), pos(d + i)], all.len())?.minimize()?;
        placed = all;
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeration::encode_point;

    fn q(n: i64, d: i64) -> Q {
        Q::new(n.into(), d.into())
    }

    fn w(z: &[Q], base: Base) -> crate::automata::TrackWord {
        convolve(&encode_point(z, base).unwrap())
    }

    #[test]
    fn addition_small_cases() {
        let b = Base::new(2).unwrap();
        let add = addition_automaton(b, 1).unwrap();
        assert!(add.is_deterministic());
        let vals: Vec<Q> = (-12..=12).map(|n| q(n, 4)).collect();
        for x in &vals {
            for y in &vals {
                assert!(add.accepts(&w(&[x.clone(), y.clone(), x + y], b)), "{x} + {y}");
                let wrong = x + y + q(1, 4);
                assert!(!add.accepts(&w(&[x.clone(), y.clone(), wrong], b)));
            }
        }
        assert!(add.accepts(&w(&[q(3, 8), q(-27, 8), q(-3, 1)], b)));
        assert!(add.accepts(&w(&[q(1, 2), q(1, 2), q(1, 1)], b)));
    }

    #[test]
    fn addition_base_six() {
        let b = Base::new(6).unwrap();
        let add = addition_automaton(b, 1).unwrap();
        let vals: Vec<Q> = (-20..=20).map(|n| q(n * 7, 36)).collect();
        for x in vals.iter().step_by(3) {
            for y in &vals {
                assert!(add.accepts(&w(&[x.clone(), y.clone(), x + y], b)));
                assert!(!add.accepts(&w(&[x.clone(), y.clone(), x + y + q(1, 6)], b)));
            }
        }
    }

    #[test]
    fn projections_of_addition() {
        let b = Base::new(2).unwrap();
        let add = addition_automaton(b, 1).unwrap();
        let valid2 = valid_encoding_automaton(b, 2).unwrap();
        let uw = add.project(&[0, 2]).unwrap();
        assert!(uw.are_equivalent(&valid2).unwrap());
        let swapped = add.reorder(&[1, 0, 2]).unwrap();
        assert!(swapped.are_equivalent(&add).unwrap());
        // (x, 0, x)
        let zero = singleton_automaton(&[Q::zero()], b).unwrap();
        let x0x = join(&add, &[0, 1, 2], &zero, &[1], 3).unwrap().project(&[0, 2]).unwrap();
        assert!(x0x.are_equivalent(&equality_automaton(b, 1).unwrap()).unwrap());
    }

    #[test]
    fn two_dimensional_addition() {
        let b = Base::new(2).unwrap();
        let add = addition_automaton(b, 2).unwrap();
        assert_eq!(add.tracks(), 6);
        let u = [q(1, 2), q(-3, 4)];
        let v = [q(5, 4), q(1, 1)];
        let s = [q(7, 4), q(1, 4)];
        let all: Vec<Q> = u.iter().chain(&v).chain(&s).cloned().collect();
        assert!(add.accepts(&w(&all, b)));
        let mut bad = all.clone();
        bad[5] = q(1, 2);
        assert!(!add.accepts(&w(&bad, b)));
    }

    #[test]
    fn order_relation() {
        let b = Base::new(2).unwrap();
        let lt = less_than_automaton(b, 2).unwrap();
        assert!(lt.accepts(&w(&[q(0, 1), q(0, 1), q(1, 1), q(1, 1)], b)));
        assert!(!lt.accepts(&w(&[q(0, 1), q(1, 1), q(1, 1), q(1, 1)], b)));
        assert!(lt.accepts(&w(&[q(-27, 8), q(1, 4), q(-3, 1), q(1, 2)], b)));
        let lt1 = less_than_automaton(b, 1).unwrap();
        for x in -10..10 {
            for y in -10..10 {
                let (x, y) = (q(x, 4), q(y, 2));
                assert_eq!(lt1.accepts(&w(&[x.clone(), y.clone()], b)), x < y);
            }
        }
    }

    #[test]
    fn negation_and_positive() {
        let b = Base::new(4).unwrap();
        let neg = negation_automaton(b, 1).unwrap();
        let pos = positive_automaton(b, 1).unwrap();
        for n in -30..30 {
            let x = q(n, 16);
            assert!(neg.accepts(&w(&[x.clone(), -x.clone()], b)));
            if n != -8 {
                assert!(!neg.accepts(&w(&[x.clone(), x.clone() + q(1, 1)], b)));
            }
            assert_eq!(pos.accepts(&w(std::slice::from_ref(&x), b)), n > 0);
        }
    }

    #[test]
    fn scalar_multiples() {
        let b = Base::new(2).unwrap();
        let eq = equality_automaton(b, 1).unwrap();
        let one = scalar_multiple_automaton(&q(1, 1), b).unwrap();
        assert!(one.are_equivalent(&eq).unwrap());
        let zero = scalar_multiple_automaton(&q(0, 1), b).unwrap();
        assert!(zero.accepts(&w(&[q(-7, 4), q(0, 1)], b)));
        assert!(!zero.accepts(&w(&[q(-7, 4), q(1, 1)], b)));
        let m = scalar_multiple_automaton(&q(3, 2), b).unwrap();
        assert!(m.accepts(&w(&[q(5, 4), q(15, 8)], b)));
        for n in -20..20 {
            let x = q(n, 8);
            assert!(m.accepts(&w(&[x.clone(), x.clone() * q(3, 2)], b)));
            assert!(!m.accepts(&w(&[x.clone(), x.clone() * q(3, 2) + q(1, 16)], b)));
        }
        let half = scalar_multiple_automaton(&q(-1, 2), b).unwrap();
        let minus_two = scalar_multiple_automaton(&q(-2, 1), b).unwrap();
        assert!(compose(&half, &minus_two).unwrap().are_equivalent(&eq).unwrap());
    }

    #[test]
    fn translations() {
        let b = Base::new(2).unwrap();
        let t = translation_automaton(&[q(1, 4), q(-1, 2)], b).unwrap();
        assert!(t.accepts(&w(&[q(3, 4), q(0, 1), q(1, 1), q(-1, 2)], b)));
        assert!(!t.accepts(&w(&[q(3, 4), q(0, 1), q(1, 1), q(1, 2)], b)));
    }
}
