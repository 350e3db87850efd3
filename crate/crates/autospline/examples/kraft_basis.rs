//! Build the hierarchical basis of a two-level mesh and list it.

use autospline::kraft::build_kraft_languages;
use autospline::mesh::{MeshSpec, Window};

fn main() -> autospline::Result<()> {
    let spec = MeshSpec::parse(
        "dimension = 1\ndegree = 1\nbase = 2\nlevels = 2\n[level 1]\npattern = box 0..2\n",
        std::path::Path::new("."),
    )?;
    let basis = build_kraft_languages(&spec.build()?)?;
    let w = Window::new(vec![-2], vec![4])?;
    for l in 0..basis.num_levels() {
        println!("level {l}: {}", basis.formula(l));
        for f in basis.functions_in(l, &w) {
            let (lo, hi) = f.support();
            println!("  support [{}, {}]", lo[0], hi[0]);
        }
    }
    Ok(())
}
