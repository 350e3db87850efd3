//! Compile first-order formulas over (Z[1/2], +, <) to automata.

use autospline::automata::convolve;
use autospline::logic::Structure;
use autospline::numeration::{decode_point, encode_point, less_than_automaton, Base};
use autospline::Q;

fn main() -> autospline::Result<()> {
    let base = Base::new(2)?;
    let mut s = Structure::new(base, 1)?;
    s.add_predicate("Lt", less_than_automaton(base, 1)?)?;
    s.add_constant("one", vec![Q::from_integer(1.into())])?;

    // y is the midpoint of 0 and x
    let half = s.parse("(in (y y x) Add)")?;
    let a = s.compile_ordered(&half, &["x".into(), "y".into()])?.into_automaton()?;
    println!("halving: {} states", a.num_states());
    let x = Q::new(5.into(), 4.into());
    for y in [Q::new(5.into(), 8.into()), Q::new(5.into(), 4.into())] {
        let w = convolve(&encode_point(&[x.clone(), y.clone()], base)?);
        println!("  ({x}, {y}) accepted: {}", a.accepts(&w));
    }

    // the dyadics strictly between 0 and 1 with at most three columns
    let f = s.parse("(and (in ([0] x) Lt) (in (x one) Lt))")?;
    let a = s.compile(&f)?.into_automaton()?;
    let e = a.enumerate(100, 3)?;
    let xs: Vec<String> = e
        .words
        .iter()
        .map(|w| decode_point(&w.unconvolve(), base).map(|p| p[0].to_string()))
        .collect::<autospline::Result<_>>()?;
    println!("0 < x < 1, short encodings: {}", xs.join(" "));

    for text in ["(forall x (exists y (in (x y) Lt)))", "(exists x (forall y (in (x y) Lt)))"] {
        println!("{text}: {}", s.evaluate_sentence(&s.parse(text)?)?);
    }
    Ok(())
}
