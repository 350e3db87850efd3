//! Encoding of the ring Z[1/b] as two-row digit strings.
//!
//! A number `z` is written as a sign column followed by columns
//! `(alpha_i, beta_i)`: `alpha_i` runs over the integer digits from the least
//! significant one upwards, `beta_i` over the fractional digits from the most
//! significant one downwards. The sign column is `(0,0)` for `z >= 0` and
//! `(1,1)` otherwise; zero is the lone column `(0,0)`. The column count is
//! minimal, so the last column of a nonzero number is never `(0,0)`.
//!
//! Each column is one symbol `alpha * b + beta` of the track alphabet used by
//! [`crate::automata`].

mod relations;

pub use relations::{
    addition_automaton, equality_automaton, less_than_automaton, negation_automaton,
    positive_automaton, scalar_multiple_automaton, singleton_automaton, translation_automaton,
    valid_encoding_automaton, ValidityTracker,
};

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::Q;

/// Numeration base. Always even, so every `1/2^k` lies in `Z[1/b]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Base(u32);

impl Base {
    /// Largest supported base; column symbols must fit below the padding byte.
    pub const MAX: u32 = 14;

    pub fn new(b: u32) -> Result<Base> {
        if b < 2 || !b.is_multiple_of(2) || b > Self::MAX {
            return Err(Error::InvalidBase(b));
        }
        Ok(Base(b))
    }

    pub fn get(self) -> u32 {
        self.0
    }

    /// Number of column symbols, `b^2`.
    pub fn symbols(self) -> u8 {
        (self.0 * self.0) as u8
    }

    pub fn column(self, alpha: u8, beta: u8) -> u8 {
        alpha * self.0 as u8 + beta
    }

    pub fn split(self, sym: u8) -> (u8, u8) {
        (sym / self.0 as u8, sym % self.0 as u8)
    }

    pub fn plus_sign(self) -> u8 {
        0
    }

    pub fn minus_sign(self) -> u8 {
        self.0 as u8 + 1
    }

    /// True when every prime factor of `den` divides `b`.
    pub fn divides_power(self, den: &BigInt) -> bool {
        let b = BigInt::from(self.0);
        let mut d = den.abs();
        while !d.is_one() {
            let g = d.gcd(&b);
            if g.is_one() {
                return false;
            }
            d /= g;
        }
        true
    }

    pub fn contains(self, q: &Q) -> bool {
        self.divides_power(q.denom())
    }
}

impl fmt::Display for Base {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// An element of `Z[1/b]` in canonical form `num / b^exp`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct DyadicRational {
    base: Base,
    num: BigInt,
    exp: u32,
}

impl DyadicRational {
    pub fn from_rational(q: &Q, base: Base) -> Result<Self> {
        if !base.contains(q) {
            return Err(Error::NotRepresentable(q.to_string(), base.get()));
        }
        let b = BigInt::from(base.get());
        let mut num = q.numer().clone();
        let mut den = q.denom().clone();
        let mut exp = 0u32;
        while !den.is_one() {
            num *= &b;
            let g = num.gcd(&den);
            num /= &g;
            den /= &g;
            exp += 1;
        }
        let mut out = DyadicRational { base, num, exp };
        out.canonicalize();
        Ok(out)
    }

    fn canonicalize(&mut self) {
        let b = BigInt::from(self.base.get());
        while self.exp > 0 && (&self.num % &b).is_zero() {
            self.num /= &b;
            self.exp -= 1;
        }
    }

    pub fn numerator(&self) -> &BigInt {
        &self.num
    }

    pub fn exponent(&self) -> u32 {
        self.exp
    }

    pub fn base(&self) -> Base {
        self.base
    }

    pub fn to_rational(&self) -> Q {
        let den = num_traits::pow(BigInt::from(self.base.get()), self.exp as usize);
        Q::new(self.num.clone(), den)
    }
}

/// A canonical two-row encoding `(z)_b`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct EncodedNumber {
    pub negative: bool,
    /// Columns after the sign column, as `(alpha, beta)` pairs.
    pub columns: Vec<(u8, u8)>,
}

impl EncodedNumber {
    pub fn zero() -> Self {
        EncodedNumber { negative: false, columns: Vec::new() }
    }

    /// Track symbols, sign column first.
    pub fn symbols(&self, base: Base) -> Vec<u8> {
        let mut out = Vec::with_capacity(self.columns.len() + 1);
        out.push(if self.negative { base.minus_sign() } else { base.plus_sign() });
        out.extend(self.columns.iter().map(|&(a, b)| base.column(a, b)));
        out
    }

    /// Rebuild from raw track symbols, checking well-formedness.
    pub fn from_symbols(syms: &[u8], base: Base) -> Result<Self> {
        let (&sign, rest) = syms
            .split_first()
            .ok_or_else(|| Error::Decode("empty string".into()))?;
        let negative = if sign == base.plus_sign() {
            false
        } else if sign == base.minus_sign() {
            true
        } else {
            return Err(Error::Decode(format!("bad sign symbol {sign}")));
        };
        let mut columns = Vec::with_capacity(rest.len());
        for &s in rest {
            if s >= base.symbols() {
                return Err(Error::Decode(format!("symbol {s} outside base {base}")));
            }
            columns.push(base.split(s));
        }
        let enc = EncodedNumber { negative, columns };
        enc.check()?;
        Ok(enc)
    }

    fn check(&self) -> Result<()> {
        match self.columns.last() {
            None if self.negative => Err(Error::Decode("negative sign without digits".into())),
            Some(&(0, 0)) => Err(Error::Decode("trailing zero column".into())),
            _ => Ok(()),
        }
    }

    /// Number of columns including the sign column.
    pub fn len(&self) -> usize {
        self.columns.len() + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// The two-row display form, e.g. `1110/1011`.
    pub fn rows(&self) -> String {
        let s = if self.negative { '1' } else { '0' };
        let mut top = String::from(s);
        let mut bottom = String::from(s);
        for &(a, b) in &self.columns {
            top.push(digit_char(a));
            bottom.push(digit_char(b));
        }
        format!("{top}/{bottom}")
    }

    /// Parse the two-row display form.
    pub fn parse_rows(text: &str, base: Base) -> Result<Self> {
        let (top, bottom) = text
            .trim()
            .split_once('/')
            .ok_or_else(|| Error::Parse(format!("expected two rows in `{text}`")))?;
        let top: Vec<u8> = top.chars().map(char_digit).collect::<Result<_>>()?;
        let bottom: Vec<u8> = bottom.chars().map(char_digit).collect::<Result<_>>()?;
        if top.len() != bottom.len() || top.is_empty() {
            return Err(Error::Parse(format!("rows of `{text}` differ in length")));
        }
        let negative = match (top[0], bottom[0]) {
            (0, 0) => false,
            (1, 1) => true,
            _ => return Err(Error::Decode("bad sign column".into())),
        };
        let b = base.get() as u8;
        let mut columns = Vec::new();
        for (&a, &c) in top[1..].iter().zip(&bottom[1..]) {
            if a >= b || c >= b {
                return Err(Error::Decode(format!("digit outside base {base}")));
            }
            columns.push((a, c));
        }
        let enc = EncodedNumber { negative, columns };
        enc.check()?;
        Ok(enc)
    }
}

impl fmt::Display for EncodedNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.rows())
    }
}

fn digit_char(d: u8) -> char {
    std::char::from_digit(d as u32, 36).unwrap_or('?')
}

fn char_digit(c: char) -> Result<u8> {
    c.to_digit(36)
        .map(|d| d as u8)
        .ok_or_else(|| Error::Parse(format!("bad digit `{c}`")))
}

/// Encode `z` in base `b`.
pub fn encode(z: &Q, base: Base) -> Result<EncodedNumber> {
    if !base.contains(z) {
        return Err(Error::NotRepresentable(z.to_string(), base.get()));
    }
    if z.is_zero() {
        return Ok(EncodedNumber::zero());
    }
    let negative = z.is_negative();
    let mag = z.abs();
    let b = BigInt::from(base.get());
    let mut int = mag.to_integer();
    let mut frac = mag - Q::from_integer(int.clone());
    let mut alphas = Vec::new();
    while !int.is_zero() {
        let (q, r) = int.div_rem(&b);
        alphas.push(r.to_u8().unwrap());
        int = q;
    }
    let mut betas = Vec::new();
    let bq = Q::from_integer(b);
    while !frac.is_zero() {
        frac *= &bq;
        let d = frac.to_integer();
        betas.push(d.to_u8().unwrap());
        frac -= Q::from_integer(d);
    }
    let k = alphas.len().max(betas.len());
    alphas.resize(k, 0);
    betas.resize(k, 0);
    Ok(EncodedNumber { negative, columns: alphas.into_iter().zip(betas).collect() })
}

/// Decode a canonical encoding.
pub fn decode(w: &EncodedNumber, base: Base) -> Result<Q> {
    w.check()?;
    let b = BigInt::from(base.get());
    let mut int = BigInt::zero();
    let mut weight = BigInt::one();
    let mut frac_num = BigInt::zero();
    let mut frac_den = BigInt::one();
    for &(a, c) in &w.columns {
        if a as u32 >= base.get() || c as u32 >= base.get() {
            return Err(Error::Decode(format!("digit outside base {base}")));
        }
        int += &weight * a;
        weight *= &b;
        frac_num = frac_num * &b + c;
        frac_den *= &b;
    }
    let v = Q::from_integer(int) + Q::new(frac_num, frac_den);
    Ok(if w.negative { -v } else { v })
}

/// Encode a point as one symbol string per coordinate.
pub fn encode_point(z: &[Q], base: Base) -> Result<Vec<Vec<u8>>> {
    z.iter().map(|c| encode(c, base).map(|e| e.symbols(base))).collect()
}

/// Decode a tuple of symbol strings.
pub fn decode_point(tracks: &[Vec<u8>], base: Base) -> Result<Vec<Q>> {
    tracks
        .iter()
        .map(|t| EncodedNumber::from_symbols(t, base).and_then(|e| decode(&e, base)))
        .collect()
}

/// Parse `p/q`, an integer, or a two-row digit string prefixed with `@`
/// (for example `@1110/1011`) into an exact value.
pub fn parse_value(text: &str, base: Base) -> Result<Q> {
    let t = text.trim();
    if let Some(rows) = t.strip_prefix('@') {
        let e = EncodedNumber::parse_rows(rows, base)?;
        return decode(&e, base);
    }
    if let Some((a, b)) = t.split_once('/') {
        let n: BigInt = a.trim().parse().map_err(|_| Error::Parse(format!("bad numerator in `{t}`")))?;
        let d: BigInt = b.trim().parse().map_err(|_| Error::Parse(format!("bad denominator in `{t}`")))?;
        if d.is_zero() {
            return Err(Error::Parse("zero denominator".into()));
        }
        return Ok(Q::new(n, d));
    }
    let n: BigInt = t.parse().map_err(|_| Error::Parse(format!("bad number `{t}`")))?;
    Ok(Q::from_integer(n))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> Q {
        Q::new(n.into(), d.into())
    }

    #[test]
    fn minus_27_eighths_in_base_two() {
        let b = Base::new(2).unwrap();
        let e = encode(&q(-27, 8), b).unwrap();
        assert_eq!(e.rows(), "1110/1011");
        assert_eq!(e.columns, vec![(1, 0), (1, 1), (0, 1)]);
        assert_eq!(decode(&e, b).unwrap(), q(-27, 8));
    }

    #[test]
    fn zero_is_one_column() {
        for b in [2, 4, 6, 10] {
            let b = Base::new(b).unwrap();
            let e = encode(&q(0, 1), b).unwrap();
            assert_eq!(e.symbols(b), vec![0]);
            assert_eq!(e.rows(), "0/0");
        }
    }

    #[test]
    fn five_quarters() {
        let b = Base::new(2).unwrap();
        let e = encode(&q(5, 4), b).unwrap();
        assert!(!e.negative);
        assert_eq!(e.columns, vec![(1, 0), (0, 1)]);
        let back = EncodedNumber::parse_rows("010/001", b).unwrap();
        assert_eq!(decode(&back, b).unwrap(), q(5, 4));
    }

    #[test]
    fn rejects_non_minimal_and_bad_sign() {
        let b = Base::new(2).unwrap();
        assert!(EncodedNumber::parse_rows("0100/0010", b).is_err());
        assert!(EncodedNumber::parse_rows("01/11", b).is_err());
        assert!(EncodedNumber::parse_rows("1/1", b).is_err());
        assert!(EncodedNumber::from_symbols(&[0, 2, 0], b).is_err());
    }

    #[test]
    fn odd_base_rejected() {
        assert!(Base::new(3).is_err());
        assert!(Base::new(16).is_err());
        assert!(Base::new(6).is_ok());
    }

    #[test]
    fn representability() {
        let b6 = Base::new(6).unwrap();
        assert!(encode(&q(1, 8), b6).is_ok());
        assert!(encode(&q(1, 9), b6).is_ok());
        assert!(encode(&q(1, 5), b6).is_err());
        let b2 = Base::new(2).unwrap();
        assert!(encode(&q(1, 3), b2).is_err());
    }

    #[test]
    fn canonical_dyadic_form() {
        let b = Base::new(2).unwrap();
        let d = DyadicRational::from_rational(&q(6, 8), b).unwrap();
        assert_eq!(d.numerator(), &BigInt::from(3));
        assert_eq!(d.exponent(), 2);
        assert_eq!(d.to_rational(), q(3, 4));
        let d = DyadicRational::from_rational(&q(12, 1), b).unwrap();
        assert_eq!(d.exponent(), 0);
    }

    #[test]
    fn parse_value_forms() {
        let b = Base::new(2).unwrap();
        assert_eq!(parse_value("5/4", b).unwrap(), q(5, 4));
        assert_eq!(parse_value("-3", b).unwrap(), q(-3, 1));
        assert_eq!(parse_value("@1110/1011", b).unwrap(), q(-27, 8));
        assert_eq!(parse_value("10/11", b).unwrap(), q(10, 11));
    }
}
