//! The `autospline` command line.
//!
//! Exit codes: 0 when a check holds (or a command succeeds), 1 when it
//! fails, 2 on errors. All numbers are read and printed exactly.

pub mod fixtures;

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::automata::{set_state_budget, SyncAutomaton};
use crate::error::{Error, Result};
use crate::kraft::{build_kraft_languages, build_kraft_languages_unverified, BasisFunctionId};
use crate::mesh::{check_assumption_b, check_nested, parse_pattern, LevelSource, MeshSpec, Window};
use crate::numeration::{parse_value, Base};
use crate::oracle::{oracle_eval, oracle_selected};
use crate::refine::{refine_mesh, refine_spline};
use crate::spline::RegularSpline;
use crate::Q;

#[derive(Parser, Debug)]
#[command(name = "autospline", version, about = "Hierarchical splines as synchronous automata")]
pub struct Cli {
    #[command(flatten)]
    pub global: Global,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone, Default)]
pub struct Global {
    /// Numeration base; overrides the base of pattern-only mesh specs.
    #[arg(long, global = true)]
    pub base: Option<u32>,
    /// Spline degree; overrides the degree of a mesh spec.
    #[arg(long, global = true)]
    pub degree: Option<u32>,
    /// Maximum number of states of any intermediate automaton.
    #[arg(long, global = true)]
    pub state_budget: Option<usize>,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Decide whether the domains of a mesh are nested.
    CheckNested { mesh: PathBuf },
    /// Decide the connectivity condition on supports meeting each ring.
    CheckAssumptionB { mesh: PathBuf },
    /// Build the basis languages and write them with a manifest.
    Kraft {
        mesh: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Skip the mesh checks.
        #[arg(long)]
        force: bool,
        /// List the selected functions anchored in a level-0 box, e.g. `-2..4 0..3`.
        #[arg(long)]
        window: Option<String>,
    },
    /// Evaluate a spline at points given as comma separated coordinates.
    Eval {
        spline: PathBuf,
        #[arg(long = "point", allow_hyphen_values = true)]
        points: Vec<String>,
        /// A file with one point per line.
        #[arg(long = "points")]
        points_file: Option<PathBuf>,
        /// Print the contributing basis functions.
        #[arg(long)]
        matches: bool,
        /// Recompute each value by direct enumeration and fail on mismatch.
        #[arg(long)]
        oracle: bool,
    },
    /// Append a level to the mesh of a spline and transfer its coefficients.
    Refine {
        spline: PathBuf,
        /// Automaton file of the new level.
        #[arg(long, conflicts_with = "pattern")]
        level: Option<PathBuf>,
        /// Pattern of the new level, as in a mesh spec.
        #[arg(long)]
        pattern: Option<String>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Write a shipped fixture (or `all`).
    Examples {
        name: String,
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
    /// Print `x f(x)` over an interval of a univariate spline.
    Plotdata {
        spline: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        from: String,
        #[arg(long, allow_hyphen_values = true)]
        to: String,
        #[arg(long)]
        step: String,
        #[arg(long)]
        oracle: bool,
    },
}

/// Parse the arguments and run; returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match execute(&cli, out) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            2
        }
    }
}

fn load_mesh(path: &Path, g: &Global) -> Result<MeshSpec> {
    let mut spec = MeshSpec::load(path)?;
    if let Some(b) = g.base {
        let base = Base::new(b)?;
        if base != spec.base && spec.levels.iter().any(|l| matches!(l, LevelSource::Automaton(..))) {
            return Err(Error::Usage(format!("{} stores automata over base {}", path.display(), spec.base)));
        }
        spec.base = base;
    }
    if let Some(m) = g.degree {
        spec.degree = m;
    }
    Ok(spec)
}

fn parse_point(text: &str, base: Base) -> Result<Vec<Q>> {
    text.split(',').map(|c| parse_value(c, base)).collect()
}

fn show(v: &[Q]) -> String {
    v.iter().map(|c| c.to_string()).collect::<Vec<_>>().join(", ")
}

fn show_box(f: &BasisFunctionId) -> String {
    let (lo, hi) = f.support();
    lo.iter().zip(&hi).map(|(a, b)| format!("[{a}, {b}]")).collect::<Vec<_>>().join(" x ")
}

fn parse_window(text: &str, d: usize) -> Result<Window> {
    let mut lo = Vec::new();
    let mut hi = Vec::new();
    for r in text.split_whitespace() {
        let (a, b) = r.split_once("..").ok_or_else(|| Error::Usage(format!("bad range `{r}`")))?;
        let p = |s: &str| s.trim().parse::<i64>().map_err(|_| Error::Usage(format!("bad bound `{s}`")));
        lo.push(p(a)?);
        hi.push(p(b)?);
    }
    if lo.len() != d {
        return Err(Error::Usage(format!("window needs {d} ranges")));
    }
    Window::new(lo, hi)
}

/// The oracle value at `x`: coefficients read from the relations, basis
/// selection and B-spline values computed directly from the mesh geometry.
pub fn oracle_value(f: &RegularSpline, x: &[Q]) -> Result<Q> {
    let spec = match f.mesh_spec() {
        Some(s) => s.clone(),
        None => f.mesh().to_spec("mesh"),
    };
    let failure = std::cell::RefCell::new(None);
    let v = oracle_eval(f.degree(), f.num_levels(), x, &|id: &BasisFunctionId| {
        if !oracle_selected(&spec, id) {
            return None;
        }
        match f.coefficient(id) {
            Ok(c) => c,
            Err(e) => {
                failure.borrow_mut().get_or_insert(e.to_string());
                None
            }
        }
    });
    match failure.into_inner() {
        Some(e) => Err(Error::Inconsistent(e)),
        None => Ok(v),
    }
}

fn execute(cli: &Cli, out: &mut dyn Write) -> Result<i32> {
    if let Some(n) = cli.global.state_budget {
        set_state_budget(n);
    }
    let g = &cli.global;
    match &cli.command {
        Command::CheckNested { mesh } => {
            let spec = load_mesh(mesh, g)?;
            let r = check_nested(&spec.build()?)?;
            match r.witness {
                None => {
                    writeln!(out, "nested: yes")?;
                    Ok(0)
                }
                Some((l, c)) => {
                    writeln!(out, "nested: no")?;
                    writeln!(out, "witness: {c} lies in Omega^{l} but not in Omega^{}", l - 1)?;
                    Ok(1)
                }
            }
        }
        Command::CheckAssumptionB { mesh } => {
            let spec = load_mesh(mesh, g)?;
            let r = check_assumption_b(&spec.build()?)?;
            match r.witness {
                None => {
                    writeln!(out, "assumption B: holds")?;
                    Ok(0)
                }
                Some((l, c)) => {
                    let f = BasisFunctionId::new(spec.degree, c);
                    writeln!(out, "assumption B: fails")?;
                    writeln!(out, "witness: level-{l} function with support {} (anchor {})", show_box(&f), f.anchor)?;
                    Ok(1)
                }
            }
        }
        Command::Kraft { mesh, out: dir, force, window } => {
            let spec = load_mesh(mesh, g)?;
            let m = spec.build()?;
            let basis = if *force { build_kraft_languages_unverified(&m)? } else { build_kraft_languages(&m)? };
            basis.save(dir)?;
            for l in 0..basis.num_levels() {
                let a = basis.language(l);
                writeln!(out, "level {l}: {} states, {}", a.num_states(), if a.is_finite() { "finite" } else { "infinite" })?;
            }
            if let Some(w) = window {
                let w = parse_window(w, spec.dim)?;
                for l in 0..basis.num_levels() {
                    for f in basis.functions_in(l, &w) {
                        writeln!(out, "  level {l}: support {}", show_box(&f))?;
                    }
                }
            }
            writeln!(out, "wrote {}", dir.join("basis.manifest").display())?;
            Ok(0)
        }
        Command::Eval { spline, points, points_file, matches, oracle } => {
            let f = RegularSpline::load(spline)?;
            let mut texts = points.clone();
            if let Some(p) = points_file {
                let body = std::fs::read_to_string(p)?;
                texts.extend(body.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('#')).map(String::from));
            }
            if texts.is_empty() {
                return Err(Error::Usage("no points given".into()));
            }
            let mut code = 0;
            for t in &texts {
                let x = parse_point(t, f.base())?;
                let e = f.evaluate(&x)?;
                writeln!(out, "f({}) = {}", show(&x), e.value)?;
                if *matches {
                    for m in &e.matches {
                        writeln!(
                            out,
                            "  level {} anchor ({}) coefficient {} offset ({}) value {}",
                            m.level,
                            show(&m.anchor.barycentre()),
                            m.coefficient,
                            show(&m.offset),
                            m.value
                        )?;
                    }
                }
                if *oracle {
                    let want = oracle_value(&f, &x)?;
                    if want != e.value {
                        writeln!(out, "  oracle mismatch: {want}")?;
                        code = 1;
                    }
                }
            }
            Ok(code)
        }
        Command::Refine { spline, level, pattern, out: target } => {
            let f = RegularSpline::load(spline)?;
            let n = f.num_levels();
            let l_new = match (level, pattern) {
                (Some(p), _) => SyncAutomaton::load(p)?,
                (None, Some(text)) => parse_pattern(text, f.base(), f.dim())?.automaton(f.base(), f.dim(), (n - 1) as u32)?,
                (None, None) => return Err(Error::Usage("give --level or --pattern".into())),
            };
            let rm = refine_mesh(f.basis(), &l_new)?;
            let g2 = refine_spline(&f, &rm)?;
            g2.save(target)?;
            writeln!(out, "refined to {} levels; wrote {}", g2.num_levels(), target.display())?;
            Ok(0)
        }
        Command::Examples { name, out: dir } => {
            let names: Vec<&str> = if name == "all" { fixtures::NAMES.to_vec() } else { vec![name.as_str()] };
            for n in names {
                let p = fixtures::write_fixture(n, dir)?;
                writeln!(out, "wrote {}", p.display())?;
            }
            Ok(0)
        }
        Command::Plotdata { spline, from, to, step, oracle } => {
            let f = RegularSpline::load(spline)?;
            if f.dim() != 1 {
                return Err(Error::Usage("plot data needs a univariate spline".into()));
            }
            let b = f.base();
            let (a, z, h) = (parse_value(from, b)?, parse_value(to, b)?, parse_value(step, b)?);
            if h <= Q::from_integer(0.into()) {
                return Err(Error::Usage("step must be positive".into()));
            }
            let mut code = 0;
            let mut x = a;
            while x <= z {
                let v = f.evaluate(std::slice::from_ref(&x))?.value;
                writeln!(out, "{x} {v}")?;
                if *oracle && oracle_value(&f, std::slice::from_ref(&x))? != v {
                    writeln!(out, "# oracle mismatch at {x}")?;
                    code = 1;
                }
                x += &h;
            }
            Ok(code)
        }
    }
}
