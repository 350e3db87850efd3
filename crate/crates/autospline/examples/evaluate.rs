//! Evaluate splines with infinitely many nonzero coefficients.

use autospline::spline::{builtin_g, builtin_h};
use autospline::Q;

fn main() -> autospline::Result<()> {
    let g = builtin_g()?;
    let h = builtin_h()?;
    for (name, f, xs) in [("g", &g, [(2, 1), (6, 1), (-2, 1)]), ("h", &h, [(1, 2), (5, 2), (-5, 2)])] {
        for (n, d) in xs {
            let x = Q::new(n.into(), d.into());
            let e = f.evaluate(std::slice::from_ref(&x))?;
            println!("{name}({x}) = {}", e.value);
            for m in &e.matches {
                println!("  level {} coefficient {} basis value {}", m.level, m.coefficient, m.value);
            }
        }
    }
    Ok(())
}
