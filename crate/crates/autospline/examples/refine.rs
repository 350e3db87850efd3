//! Refine the mesh of a spline and check that the function is unchanged.

use autospline::mesh::Pattern;
use autospline::refine::{refine_mesh, refine_spline, stencil_1d};
use autospline::spline::linear_spline;
use autospline::Q;

fn main() -> autospline::Result<()> {
    let q = |n: i64, d: i64| Q::new(n.into(), d.into());
    let base = autospline::numeration::Base::new(2)?;
    let f = linear_spline(&[q(3, 2)], &q(-1, 4), 2, base)?;
    println!("stencil for m = 2: {:?}", stencil_1d(2).iter().map(|w| w.to_string()).collect::<Vec<_>>());
    let level = Pattern::Box { lo: vec![q(-2, 1)], hi: vec![q(4, 1)] }.automaton(base, 1, 0)?;
    let rm = refine_mesh(f.basis(), &level)?;
    let g = refine_spline(&f, &rm)?;
    for x in [q(-3, 1), q(1, 8), q(5, 2)] {
        let (a, b) = (f.evaluate(std::slice::from_ref(&x))?, g.evaluate(std::slice::from_ref(&x))?);
        println!("x = {x}: {} before, {} after ({} terms)", a.value, b.value, b.matches.len());
    }
    Ok(())
}
