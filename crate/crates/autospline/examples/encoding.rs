//! Encode dyadic rationals and check sums with the addition automaton.

use autospline::automata::convolve;
use autospline::numeration::{addition_automaton, decode, encode, encode_point, Base};
use autospline::Q;

fn main() -> autospline::Result<()> {
    let base = Base::new(2)?;
    let z = Q::new((-27).into(), 8.into());
    let w = encode(&z, base)?;
    println!("{z} in base 2: {} ({} columns)", w.rows(), w.len());
    println!("decoded: {}", decode(&w, base)?);

    let add = addition_automaton(base, 1)?;
    println!("addition automaton: {} states", add.num_states());
    let x = Q::new(3.into(), 8.into());
    let y = Q::from_integer((-3).into());
    for s in [&x + &y, &x - &y] {
        let word = convolve(&encode_point(&[x.clone(), y.clone(), s.clone()], base)?);
        println!("{x} + {y} = {s}: {}", add.accepts(&word));
    }
    Ok(())
}
