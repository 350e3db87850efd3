use num_bigint::BigInt;
use num_traits::{One, Zero};

use super::basis::cardinal_bspline;
use super::RegularSpline;
use crate::automata::{convolve, join, SyncAutomaton};
use crate::error::{Error, Result};
use crate::logic::Structure;
use crate::mesh::{track_product, Cell};
use crate::numeration::{decode_point, encode_point, less_than_automaton, Base};
use crate::Q;

/// One basis function whose open support contains the point.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Match {
    pub level: usize,
    pub anchor: Cell,
    pub coefficient: Q,
    /// `x - q` with `q` the lower corner of the support.
    pub offset: Vec<Q>,
    /// The basis function at the point.
    pub value: Q,
}

/// A spline value with the contributing terms.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Evaluation {
    pub value: Q,
    pub matches: Vec<Match>,
}

/// Open interval of `x - y` for a point `x` in the support of the function
/// anchored at the barycentre `y`, in units of `1/2^(l+1)`.
fn band_bounds(m: u32) -> (i64, i64) {
    let m = m as i64;
    if m % 2 == 1 {
        (-(m + 2), m)
    } else {
        (-(m + 1), m + 1)
    }
}

/// `y - q` for the anchor barycentre `y` and the support corner `q`.
fn corner_offset(m: u32, level: usize) -> Q {
    let m = m as i64;
    let k = if m % 2 == 1 { m + 2 } else { m + 1 };
    Q::new(k.into(), BigInt::one() << (level + 1))
}

/// Tracks `x, y` with `lo < x - y < hi` for the bounds of [`band_bounds`].
/// At degree 0 the lower bound is inclusive, matching the half-open pieces.
pub(crate) fn band_automaton(base: Base, m: u32, level: usize) -> Result<SyncAutomaton> {
    let (lo, hi) = band_bounds(m);
    let den = BigInt::one() << (level + 1);
    let mut s = Structure::new(base, 1)?;
    s.add_predicate("Lt", less_than_automaton(base, 1)?)?;
    s.add_constant("lo", vec![Q::new(lo.into(), den.clone())])?;
    s.add_constant("hi", vec![Q::new(hi.into(), den)])?;
    let lower = if m == 0 { "(or (= w lo) (in (lo w) Lt))" } else { "(in (lo w) Lt)" };
    let f = s.parse(&format!("(exists w (and (in (y w x) Add) {lower} (in (w hi) Lt)))"))?;
    s.compile_ordered(&f, &["x".into(), "y".into()])?.into_automaton()
}

impl RegularSpline {
    fn band(&self, level: usize) -> Result<&SyncAutomaton> {
        if let Some(b) = self.bands[level].get() {
            return Ok(b);
        }
        let b = band_automaton(self.base(), self.degree(), level)?;
        Ok(self.bands[level].get_or_init(|| b))
    }

    /// The value at `x` with every contributing basis function.
    ///
    /// Per level and coordinate, the band relation with `x_k` fixed leaves
    /// the finitely many anchor coordinates `y_k` whose support interval
    /// contains `x_k`. Their product is joined with `S^l`; what remains is
    /// the finite set of pairs (anchor, coefficient) whose support contains
    /// `x`.
    pub fn evaluate(&self, x: &[Q]) -> Result<Evaluation> {
        let d = self.dim();
        let m = self.degree();
        if x.len() != d {
            return Err(Error::Usage(format!("point has {} coordinates, expected {d}", x.len())));
        }
        let mut coords = Vec::with_capacity(d);
        for xk in x {
            let syms = encode_point(std::slice::from_ref(xk), self.base())
                .map_err(|_| Error::Usage(format!("{xk} is not in Z[1/{}]", self.base())))?;
            coords.push(SyncAutomaton::from_words(self.base(), 1, &[convolve(&syms)]));
        }
        let bound = (m as usize + 1).pow(d as u32);
        let mut value = Q::zero();
        let mut matches = Vec::new();
        let ymap: Vec<usize> = (0..d).collect();
        let all: Vec<usize> = (0..=d).collect();
        for level in 0..self.num_levels() {
            let band = self.band(level)?;
            let ys = coords
                .iter()
                .map(|p| join(p, &[0], band, &[0, 1], 2)?.project(&[1])?.minimize())
                .collect::<Result<Vec<_>>>()?;
            let near = track_product(&ys)?;
            let hits = join(&near, &ymap, &self.relations[level], &all, d + 1)?;
            let words = hits
                .finite_words(4 * bound)?
                .ok_or_else(|| Error::Inconsistent(format!("infinitely many matches at level {level}")))?;
            if words.len() > bound {
                return Err(Error::Inconsistent(format!(
                    "{} matches at level {level}, more than {bound}",
                    words.len()
                )));
            }
            let scale = Q::from_integer(BigInt::one() << level);
            let back = corner_offset(m, level);
            for w in words {
                let z = decode_point(&w.unconvolve(), self.base())?;
                let (y, c) = z.split_at(d);
                let offset: Vec<Q> = x.iter().zip(y).map(|(xi, yi)| xi - (yi - &back)).collect();
                let v: Q = offset.iter().map(|o| cardinal_bspline(m, &(o * &scale))).product();
                value += &c[0] * &v;
                matches.push(Match {
                    level,
                    anchor: Cell::from_barycentre(y)?,
                    coefficient: c[0].clone(),
                    offset,
                    value: v,
                });
            }
        }
        Ok(Evaluation { value, matches })
    }
}
