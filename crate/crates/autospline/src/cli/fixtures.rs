//! Shipped fixtures: the meshes of the figures and the example splines.

use std::path::Path;

use crate::error::{Error, Result};
use crate::mesh::{LevelSource, MeshSpec, Pattern};
use crate::numeration::Base;
use crate::spline::{builtin_g, builtin_h, linear_spline, RegularSpline};
use crate::Q;

pub const NAMES: [&str; 8] =
    ["fig1-mesh", "fig5-left", "fig5-right", "spline-g", "spline-h", "linear-m1", "linear-m2", "linear-m3"];

fn q(n: i64, d: i64) -> Q {
    Q::new(n.into(), d.into())
}

/// Cells given by barycentre numerators over `2^(level+1)`.
fn cells(level: u32, centres: &[(i64, i64)]) -> Pattern {
    let den = 1i64 << (level + 1);
    Pattern::Cells(centres.iter().map(|&(x, y)| vec![q(x, den), q(y, den)]).collect())
}

/// A bounded window of the two-level refinement drawn in the introduction:
/// four groups of level-0 cells, each carrying a group of level-1 cells.
#[rustfmt::skip]
pub fn fig1_mesh() -> MeshSpec {
    let omega1 = [
        (1, 3), (3, 3), (1, 5), (3, 5), (5, 5), (1, 7), (3, 7),
        (15, 3), (17, 3), (13, 5), (15, 5), (17, 5), (15, 7), (17, 7),
        (7, 1), (9, 1), (11, 1), (7, 9), (9, 9), (11, 9),
    ];
    let omega2 = [
        (33, 15), (33, 13), (31, 13), (31, 11), (29, 11), (29, 9), (31, 9), (31, 7), (33, 7), (33, 5),
        (3, 5), (3, 7), (5, 7), (5, 9), (7, 9), (7, 11), (5, 11), (5, 13), (3, 13), (3, 15),
        (15, 1), (17, 1), (19, 1), (21, 1), (17, 3), (19, 3),
        (15, 19), (17, 19), (19, 19), (21, 19), (17, 17), (19, 17),
    ];
    MeshSpec {
        base: Base::new(2).expect("base 2"),
        dim: 2,
        degree: 2,
        levels: vec![
            LevelSource::Patterns(vec![cells(0, &omega1)]),
            LevelSource::Patterns(vec![cells(1, &omega2)]),
        ],
    }
}

/// Diagonal checkerboard: level-0 cells with `i = j mod 2`, fully refined
/// twice.
pub fn fig5_left() -> MeshSpec {
    let fine = (0..4u64)
        .flat_map(|a| (0..4u64).map(move |b| vec![a, b]))
        .filter(|t| t[0] / 2 == t[1] / 2)
        .collect();
    MeshSpec {
        base: Base::new(2).expect("base 2"),
        dim: 2,
        degree: 1,
        levels: vec![
            LevelSource::Patterns(vec![Pattern::Periodic { period: 2, residues: vec![vec![0, 0], vec![1, 1]] }]),
            LevelSource::Patterns(vec![Pattern::Periodic { period: 4, residues: fine }]),
        ],
    }
}

/// Horizontal strips: level-0 rows `j = 0 mod 2`, and inside them the
/// level-1 rows `j = 1 mod 4`. The strips are one cell high, so only
/// degree 0 meets the connectivity condition.
pub fn fig5_right() -> MeshSpec {
    MeshSpec {
        base: Base::new(2).expect("base 2"),
        dim: 2,
        degree: 0,
        levels: vec![
            LevelSource::Patterns(vec![Pattern::Periodic { period: 2, residues: vec![vec![0, 0], vec![1, 0]] }]),
            LevelSource::Patterns(vec![Pattern::Periodic {
                period: 4,
                residues: (0..4).map(|a| vec![a, 1]).collect(),
            }]),
        ],
    }
}

/// `f(t) = t` as a degree-`m` spline; base 6 for cubics, 2 otherwise.
pub fn linear_identity(m: u32) -> Result<RegularSpline> {
    let base = Base::new(if m == 3 { 6 } else { 2 })?;
    linear_spline(&[q(1, 1)], &q(0, 1), m, base)
}

pub enum Fixture {
    Mesh(MeshSpec),
    Spline(Box<RegularSpline>),
}

pub fn fixture(name: &str) -> Result<Fixture> {
    Ok(match name {
        "fig1-mesh" => Fixture::Mesh(fig1_mesh()),
        "fig5-left" => Fixture::Mesh(fig5_left()),
        "fig5-right" => Fixture::Mesh(fig5_right()),
        "spline-g" => Fixture::Spline(Box::new(builtin_g()?)),
        "spline-h" => Fixture::Spline(Box::new(builtin_h()?)),
        "linear-m1" => Fixture::Spline(Box::new(linear_identity(1)?)),
        "linear-m2" => Fixture::Spline(Box::new(linear_identity(2)?)),
        "linear-m3" => Fixture::Spline(Box::new(linear_identity(3)?)),
        other => return Err(Error::Usage(format!("unknown example `{other}`; one of {}", NAMES.join(", ")))),
    })
}

/// Write `<name>.mesh` or `<name>.spline` (with its parts) into `dir` and
/// return the main file.
pub fn write_fixture(name: &str, dir: &Path) -> Result<std::path::PathBuf> {
    std::fs::create_dir_all(dir)?;
    match fixture(name)? {
        Fixture::Mesh(spec) => {
            let path = dir.join(format!("{name}.mesh"));
            spec.save(&path)?;
            Ok(path)
        }
        Fixture::Spline(f) => {
            let path = dir.join(format!("{name}.spline"));
            f.save(&path)?;
            Ok(path)
        }
    }
}
