//! Decide nestedness and the connectivity condition for a few meshes.

use autospline::cli::fixtures::{fig1_mesh, fig5_left, fig5_right};
use autospline::mesh::{check_assumption_b, check_nested, MeshSpec};

fn main() -> autospline::Result<()> {
    let gaps = MeshSpec::parse(
        "dimension = 1\ndegree = 2\nbase = 2\nlevels = 2\n[level 1]\npattern = box 0..1\npattern = box 2..3\n",
        std::path::Path::new("."),
    )?;
    for (name, spec) in [("fig1", fig1_mesh()), ("fig5-left", fig5_left()), ("fig5-right", fig5_right()), ("gaps", gaps)] {
        let mesh = spec.build()?;
        let nested = check_nested(&mesh)?;
        let b = check_assumption_b(&mesh)?;
        print!("{name} (m = {}): nested {}, connectivity {}", spec.degree, nested.holds, b.holds);
        if let Some((l, c)) = b.witness {
            print!(" (level {l}, anchor {c})");
        }
        println!();
    }
    Ok(())
}
