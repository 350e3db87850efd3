//! Acceptance suite: one line per criterion, exit status 1 if any fails.

mod common;

use std::collections::BTreeSet;
use std::path::Path;
use std::time::{Duration, Instant};

use autospline::automata::{convolve, SyncAutomaton};
use autospline::cli::fixtures::{fig1_mesh, fig5_left, fig5_right, linear_identity, NAMES};
use autospline::kraft::{build_kraft_languages, build_kraft_languages_unverified, BasisFunctionId};
use autospline::mesh::{
    assumption_b_violations, check_assumption_b, check_nested, connected_subsets, Cell, Connectivity,
    LevelSource, MeshSpec, Pattern, Window,
};
use autospline::numeration::{addition_automaton, decode, encode, encode_point, Base};
use autospline::oracle::{
    oracle_assumption_b, oracle_assumption_b_level, oracle_kraft, oracle_nested, Domains,
};
use autospline::refine::{refine_mesh, refine_spline, stencil_1d, subdivision_stencil};
use autospline::spline::{builtin_g, builtin_h, constant_spline, linear_spline, RegularSpline};
use autospline::Q;
use common::{q, random_in};
use num_bigint::BigInt;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Check = Result<String, String>;

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn e<T>(r: autospline::Result<T>) -> Result<T, String> {
    r.map_err(|e| e.to_string())
}

fn b(n: u32) -> Base {
    Base::new(n).unwrap()
}

fn criterion(n: u32, name: &str, limit: Duration, f: impl FnOnce() -> Check) -> bool {
    let start = Instant::now();
    let r = f();
    let t = start.elapsed();
    let (ok, detail) = match r {
        Ok(d) if t <= limit => (true, d),
        Ok(d) => (false, format!("{d}; over the {:.0} s limit", limit.as_secs_f64())),
        Err(d) => (false, d),
    };
    println!(
        "criterion {n:>2} {:<28} {} ({:.1} s) {detail}",
        name,
        if ok { "PASS" } else { "FAIL" },
        t.as_secs_f64()
    );
    ok
}

fn encoding_fidelity() -> Check {
    let w = e(encode(&q(-27, 8), b(2)))?;
    ensure(w.rows() == "1110/1011", || format!("-27/8 encodes to {}", w.rows()))?;
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let bases: Vec<u32> = (1..=7).map(|k| 2 * k).collect();
    for i in 0..100_000 {
        let base = b(bases[i % bases.len()]);
        let n: i64 = rng.gen_range(-(1i64 << 40)..1i64 << 40);
        let k = rng.gen_range(0..12u32);
        let z = Q::new(n.into(), BigInt::from(base.get()).pow(k));
        let w = e(encode(&z, base))?;
        let back = e(decode(&w, base))?;
        ensure(back == z, || format!("{z} decodes to {back} in base {base}"))?;
        let again = e(encode(&back, base))?;
        ensure(again == w, || format!("{z} has two encodings"))?;
    }
    Ok("-27/8 -> 1110/1011; 100000 round trips".into())
}

fn addition_relation() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let bases = [2u32, 4, 6, 10];
    let adds: Vec<SyncAutomaton> = bases.iter().map(|&k| e(addition_automaton(b(k), 1))).collect::<Result<_, _>>()?;
    for i in 0..10_000 {
        let k = i % bases.len();
        let base = b(bases[k]);
        let den = |rng: &mut ChaCha8Rng| BigInt::from(base.get()).pow(rng.gen_range(0..6u32));
        let x = Q::new(rng.gen_range(-100_000i64..100_000).into(), den(&mut rng));
        let y = Q::new(rng.gen_range(-100_000i64..100_000).into(), den(&mut rng));
        let s = &x + &y;
        let run = |z: &Q| -> Result<bool, String> {
            let syms = e(encode_point(&[x.clone(), y.clone(), z.clone()], base))?;
            Ok(adds[k].accepts(&convolve(&syms)))
        };
        ensure(run(&s)?, || format!("rejects {x} + {y} = {s} in base {base}"))?;
        for _ in 0..3 {
            let mut off = Q::new(rng.gen_range(1i64..1000).into(), den(&mut rng));
            if rng.gen_bool(0.5) {
                off = -off;
            }
            let wrong = &s + off;
            ensure(!run(&wrong)?, || format!("accepts {x} + {y} = {wrong} in base {base}"))?;
        }
    }
    Ok("10000 sums, 30000 perturbations".into())
}

fn closure_laws() -> Check {
    for seed in 0..200u64 {
        common::closure_laws(seed, 6)?;
    }
    Ok("200 automata pairs, all words to length 6".into())
}

fn window(d: usize, lo: i64, hi: i64) -> Window {
    Window::new(vec![lo; d], vec![hi; d]).unwrap()
}

fn with_level2(spec: &MeshSpec, extra: Pattern) -> MeshSpec {
    let mut s = spec.clone();
    if let LevelSource::Patterns(ps) = &mut s.levels[1] {
        ps.push(extra);
    }
    s
}

fn with_level1(spec: &MeshSpec, levels: Vec<Pattern>) -> MeshSpec {
    let mut s = spec.clone();
    s.levels[0] = LevelSource::Patterns(levels);
    s
}

fn cell_at(level: u32, x: i64, y: i64) -> Pattern {
    let den = 1i64 << (level + 1);
    Pattern::Cells(vec![vec![q(2 * x + 1, den), q(2 * y + 1, den)]])
}

/// Mutations that break nestedness: level-1 cells placed outside
/// `Omega^1`, and level-0 cells of `Omega^1` removed under refined cells.
fn mutations() -> Vec<(String, MeshSpec)> {
    let mut out = Vec::new();
    let f1 = fig1_mesh();
    out.push(("fig1 + level-1 cell (12,12)".to_string(), with_level2(&f1, cell_at(1, 12, 12))));
    out.push(("fig1 + level-1 cell (5,3)".to_string(), with_level2(&f1, cell_at(1, 5, 3))));
    out.push(("fig1 + level-1 cell (-1,0)".to_string(), with_level2(&f1, cell_at(1, -1, 0))));
    if let LevelSource::Patterns(ps) = &f1.levels[0] {
        if let Pattern::Cells(cs) = &ps[0] {
            for drop in [1usize, 8, 16] {
                let mut kept = cs.clone();
                let gone = kept.remove(drop);
                out.push((
                    format!("fig1 - level-0 cell ({}, {})", gone[0], gone[1]),
                    with_level1(&f1, vec![Pattern::Cells(kept)]),
                ));
            }
        }
    }
    let l = fig5_left();
    out.push(("fig5-left + level-1 cell (2,0)".to_string(), with_level2(&l, cell_at(1, 2, 0))));
    out.push(("fig5-left + level-1 cell (-3,6)".to_string(), with_level2(&l, cell_at(1, -3, 6))));
    let r = fig5_right();
    out.push(("fig5-right + level-1 cell (0,2)".to_string(), with_level2(&r, cell_at(1, 0, 2))));
    out.push(("fig5-right + level-1 cell (7,-1)".to_string(), with_level2(&r, cell_at(1, 7, -1))));
    out
}

fn nestedness() -> Check {
    let fixtures = [("fig1", fig1_mesh(), window(2, -2, 12)), ("fig5-left", fig5_left(), window(2, -4, 4)), (
        "fig5-right",
        fig5_right(),
        window(2, -4, 4),
    )];
    for (name, spec, w) in &fixtures {
        let r = e(check_nested(&e(spec.build())?))?;
        ensure(r.holds, || format!("{name} reported not nested at {:?}", r.witness))?;
        ensure(oracle_nested(spec, w), || format!("oracle finds {name} not nested"))?;
    }
    let muts = mutations();
    for (name, spec) in &muts {
        let r = e(check_nested(&e(spec.build())?))?;
        let (l, c) = r.witness.clone().ok_or_else(|| format!("{name}: reported nested"))?;
        ensure(!r.holds, || format!("{name}: inconsistent report"))?;
        ensure(spec.contains(l, &c) && !spec.covers(l - 1, &c), || format!("{name}: bad witness {c} at level {l}"))?;
        ensure(!oracle_nested(spec, &window(2, -4, 14)), || format!("{name}: oracle finds it nested"))?;
    }
    Ok(format!("3 fixtures nested; {} mutations rejected with valid witnesses", muts.len()))
}

fn interval_mesh(pieces: &[(i64, i64)]) -> MeshSpec {
    MeshSpec {
        base: b(2),
        dim: 1,
        degree: 2,
        levels: vec![LevelSource::Patterns(
            pieces.iter().map(|&(lo, hi)| Pattern::Box { lo: vec![q(lo, 1)], hi: vec![q(hi, 1)] }).collect(),
        )],
    }
}

fn assumption_b() -> Check {
    let whole = interval_mesh(&[(0, 4)]);
    ensure(e(check_assumption_b(&e(whole.build())?))?.holds, || "Omega^1 = [0,4] fails".into())?;
    let gaps = interval_mesh(&[(0, 1), (2, 3)]);
    let mesh = e(gaps.build())?;
    let r = e(check_assumption_b(&mesh))?;
    let (l, c) = r.witness.clone().ok_or("Omega^1 = [0,1] u [2,3] passes")?;
    let bad = oracle_assumption_b_level(&gaps, 2, 0, &window(1, -4, 8));
    ensure(l == 0 && bad.contains(&c), || format!("witness {c} is not a violation"))?;
    let target = BasisFunctionId::from_knot_index(0, 2, &[0]);
    let viol = e(assumption_b_violations(&mesh, 0, Connectivity::ClosedSupport))?;
    let syms = e(encode_point(&target.anchor.barycentre(), mesh.base()))?;
    ensure(viol.accepts(&convolve(&syms)), || "the function supported on (0,3) is not reported".into())?;
    let (lo, hi) = target.support();
    ensure(lo == vec![q(0, 1)] && hi == vec![q(3, 1)], || "wrong support".into())?;

    let mut compared = 0;
    for (name, spec, w) in [("fig1", fig1_mesh(), window(2, -3, 12)), ("fig5-left", fig5_left(), window(2, -3, 3)), (
        "fig5-right",
        fig5_right(),
        window(2, -3, 3),
    )] {
        for m in 0..=3u32 {
            let mut s = spec.clone();
            s.degree = m;
            let mesh = e(s.build())?;
            let holds = e(check_assumption_b(&mesh))?.holds;
            ensure(holds == oracle_assumption_b(&s, m, &w), || format!("{name}, m={m}: verdict differs"))?;
            for l in 0..s.num_levels() - 1 {
                let viol = e(assumption_b_violations(&mesh, l, Connectivity::ClosedSupport))?;
                let want: BTreeSet<Cell> = oracle_assumption_b_level(&s, m, l, &w).into_iter().collect();
                for c in w.cells(l as u32) {
                    let got = viol.accepts(&convolve(&e(encode_point(&c.barycentre(), s.base))?));
                    ensure(got == want.contains(&c), || format!("{name}, m={m}: level {l} cell {c} differs"))?;
                    compared += 1;
                }
            }
        }
    }
    let fam = e(connected_subsets(2, 4))?;
    let j: Vec<Vec<i64>> =
        [(-2, -1), (-1, -1), (0, -1), (1, -1), (2, -1), (-1, 0), (1, 0), (0, 1)].iter().map(|&(a, c)| vec![a, c]).collect();
    let mut j2 = j.clone();
    j2.extend([vec![0, 0], vec![0, -2], vec![2, 2]]);
    let m1 = fam.mask_of(&j).ok_or("J not in the index set")?;
    let m2 = fam.mask_of(&j2).ok_or("J' not in the index set")?;
    ensure(fam.is_connected(m1) && !fam.is_connected(m2), || "subset classification differs".into())?;
    Ok(format!("interval fixtures; {compared} anchors match the oracle; J connected, J' not"))
}

fn kraft_matches(name: &str, spec: &MeshSpec, w: &Window, verified: bool) -> Result<Vec<usize>, String> {
    let mesh = e(spec.build())?;
    let basis = if verified { e(build_kraft_languages(&mesh))? } else { e(build_kraft_languages_unverified(&mesh))? };
    let want = oracle_kraft(spec, spec.degree, w);
    let mut counts = Vec::new();
    for (l, set) in want.iter().enumerate() {
        let got: BTreeSet<BasisFunctionId> = basis.functions_in(l, w).into_iter().collect();
        ensure(&got == set, || format!("{name}: level {l} selection differs ({} vs {})", got.len(), set.len()))?;
        counts.push(got.len());
    }
    Ok(counts)
}

fn kraft_basis() -> Check {
    let mut hand = interval_mesh(&[(0, 2)]);
    hand.degree = 1;
    let w = window(1, -6, 8);
    let counts = kraft_matches("hand", &hand, &w, true)?;
    let mut one = hand.clone();
    one.levels.clear();
    let full = kraft_matches("hand, one level", &one, &w, true)?;
    ensure(full[0] - counts[0] == 1 && counts[1] == 3, || format!("hand case counts {counts:?} vs {full:?}"))?;
    let h_spec = builtin_h().map_err(|e| e.to_string())?.mesh_spec().cloned().ok_or("h has no spec")?;
    let cases = [
        ("fig1", fig1_mesh(), window(2, -3, 12), false),
        ("fig5-left", fig5_left(), window(2, -3, 3), true),
        ("fig5-right", fig5_right(), window(2, -3, 3), true),
        ("spline-h", h_spec, window(1, -10, 10), false),
    ];
    let mut total = 0;
    for (name, spec, w, verified) in &cases {
        total += kraft_matches(name, spec, w, *verified)?.iter().sum::<usize>();
        if *name == "fig1" {
            let mut s = spec.clone();
            for m in [0, 1] {
                s.degree = m;
                total += kraft_matches(name, &s, w, false)?.iter().sum::<usize>();
            }
        }
    }
    Ok(format!("hand case: 1 removed, 3 added; {total} fixture functions match the oracle"))
}

fn match_bounds(f: &RegularSpline, x: &[Q]) -> Result<Q, String> {
    let ev = e(f.evaluate(x))?;
    let per = (f.degree() as usize + 1).pow(f.dim() as u32);
    for l in 0..f.num_levels() {
        let n = ev.matches.iter().filter(|m| m.level == l).count();
        ensure(n <= per, || format!("{n} matches at level {l}"))?;
    }
    ensure(ev.matches.len() <= f.num_levels() * per, || "too many matches".into())?;
    Ok(ev.value)
}

fn evaluation_exactness() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for m in 1..=3u32 {
        let id = e(linear_identity(m))?;
        for i in -6..6i64 {
            let f = BasisFunctionId::from_knot_index(0, m, &[i]);
            let want = Q::from_integer(i.into()) + q(m as i64 + 1, 2);
            ensure(e(id.coefficient(&f))? == Some(want.clone()), || format!("c_({i},{m}) is not {want}"))?;
        }
        let base = id.base();
        let (a, c) = (q(-5, 4), q(3, 8));
        let f = e(linear_spline(std::slice::from_ref(&a), &c, m, base))?;
        for _ in 0..100 {
            let x = random_in(&mut rng, -40, 40, 6);
            let v = match_bounds(&f, std::slice::from_ref(&x))?;
            ensure(v == &a * &x + &c, || format!("m={m}: f({x}) = {v}"))?;
        }
    }
    for m in 0..=3u32 {
        let base = if m == 3 { b(6) } else { b(2) };
        let k = q(-7, 4);
        let f = e(constant_spline(&k, 1, m, base))?;
        for _ in 0..20 {
            let x = random_in(&mut rng, -30, 30, 5);
            ensure(match_bounds(&f, std::slice::from_ref(&x))? == k, || format!("constant m={m} at {x}"))?;
        }
    }
    let g = e(builtin_g())?;
    let h = e(builtin_h())?;
    for (f, x, want, name) in [(&g, 2, q(2, 3), "g(2)"), (&g, 6, q(-2, 3), "g(6)")] {
        let v = match_bounds(f, &[q(x, 1)])?;
        ensure(v == want, || format!("{name} = {v}"))?;
    }
    let v = match_bounds(&h, &[q(1, 2)])?;
    ensure(v == q(2, 3), || format!("h(1/2) = {v}"))?;
    for _ in 0..20 {
        let x = random_in(&mut rng, -12, 12, 4);
        match_bounds(&h, &[x])?;
    }
    Ok("affine and constant reproduction; g(2)=2/3, g(6)=-2/3, h(1/2)=2/3; match bounds hold".into())
}

fn median(mut v: Vec<Duration>) -> Duration {
    v.sort();
    v[v.len() / 2]
}

/// A point of `g` whose encoding has `cols` digit columns in base 6: a
/// small integer part and `cols` fraction digits, the last one nonzero.
fn long_point(rng: &mut ChaCha8Rng, cols: u32) -> Q {
    let mut n = BigInt::from(0);
    for k in 0..cols {
        let lo = if k + 1 == cols { 1 } else { 0 };
        n = n * 6 + rng.gen_range(lo..6u32);
    }
    Q::from_integer(rng.gen_range(-30i64..30).into()) + Q::new(n, BigInt::from(6).pow(cols))
}

fn evaluation_scaling() -> Check {
    let g = e(builtin_g())?;
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    e(g.evaluate(&[q(1, 1)]))?;
    let mut times = [Vec::new(), Vec::new()];
    let mut lens = [0usize; 2];
    for _ in 0..15 {
        for (k, cols) in [32u32, 64].into_iter().enumerate() {
            let x = long_point(&mut rng, cols);
            lens[k] = e(encode(&x, g.base()))?.len() - 1;
            let t = Instant::now();
            e(g.evaluate(&[x]))?;
            times[k].push(t.elapsed());
        }
    }
    let (t32, t64) = (median(times[0].clone()), median(times[1].clone()));
    let ratio = t64.as_secs_f64() / t32.as_secs_f64();
    let msg = format!(
        "{} vs {} columns: {:.1} ms vs {:.1} ms, ratio {ratio:.2}",
        lens[0],
        lens[1],
        t32.as_secs_f64() * 1e3,
        t64.as_secs_f64() * 1e3
    );
    ensure(ratio <= 2.5, || msg.clone())?;
    Ok(msg)
}

fn box_level(base: Base, lo: i64, hi: i64, level: u32) -> Result<SyncAutomaton, String> {
    e(Pattern::Box { lo: vec![q(lo, 1)], hi: vec![q(hi, 1)] }.automaton(base, 1, level))
}

fn binomial(n: u32, k: u32) -> u64 {
    let mut row = vec![1u64];
    for _ in 0..n {
        let mut next = vec![1u64; row.len() + 1];
        for i in 1..row.len() {
            next[i] = row[i - 1] + row[i];
        }
        row = next;
    }
    row[k as usize]
}

fn refinement_invariance() -> Check {
    for m in 0..=3u32 {
        let want: Vec<Q> = (0..=m + 1).map(|j| Q::new(binomial(m + 1, j).into(), (1u64 << m).into())).collect();
        ensure(stencil_1d(m) == want, || format!("stencil for m={m}"))?;
        let s = subdivision_stencil(m, 2);
        for (j, w) in &s.weights {
            ensure(*w == &want[j[0] as usize] * &want[j[1] as usize], || format!("2-D stencil m={m} at {j:?}"))?;
        }
    }
    let h = e(builtin_h())?;
    let mut cases: Vec<(&str, RegularSpline, SyncAutomaton)> = Vec::new();
    let g = e(builtin_g())?;
    let lg = box_level(g.base(), -4, 12, 0)?;
    cases.push(("g", g, lg));
    let lh = box_level(h.base(), 0, 1, 2)?;
    cases.push(("h", h, lh));
    for m in 1..=3 {
        let f = e(linear_identity(m))?;
        let l = box_level(f.base(), -4, 8, 0)?;
        cases.push(("linear", f, l));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for (name, f, l) in &cases {
        let rm = e(refine_mesh(f.basis(), l))?;
        let r = e(refine_spline(f, &rm))?;
        for _ in 0..200 {
            let x = random_in(&mut rng, -8, 14, 4);
            let (a, c) = (e(f.evaluate(std::slice::from_ref(&x)))?.value, e(r.evaluate(std::slice::from_ref(&x)))?.value);
            ensure(a == c, || format!("{name} (m={}): {a} vs {c} at {x}", f.degree()))?;
        }
    }
    Ok("stencils for m<=3; 5 splines x 200 points agree after refinement".into())
}

fn cli_points(name: &str) -> Vec<&'static str> {
    match name {
        "spline-h" => vec!["1/2", "5/2", "-5/2", "3/4"],
        _ => vec!["2", "1/2", "-5/2", "3/4", "6"],
    }
}

fn end_to_end(dir: &Path) -> Check {
    let d = dir.to_str().unwrap();
    let (code, _) = common::cli(&["examples", "all", "--out", d]);
    ensure(code == 0, || format!("examples exited {code}"))?;
    let mut failures = Vec::new();
    let mut steps = 1;
    let mut step = |what: String, args: Vec<String>| {
        let refs: Vec<&str> = args.iter().map(String::as_str).collect();
        let (code, _) = common::cli(&refs);
        steps += 1;
        if code != 0 {
            failures.push(format!("{what} exited {code}"));
        }
    };
    let s = |x: &str| x.to_string();
    for name in NAMES {
        let mesh = format!("{d}/{name}.mesh");
        step(format!("{name}: check-nested"), vec![s("check-nested"), mesh.clone()]);
        step(format!("{name}: check-assumption-b"), vec![s("check-assumption-b"), mesh.clone()]);
        step(format!("{name}: kraft"), vec![s("kraft"), mesh.clone(), s("--out"), format!("{d}/{name}-basis")]);
        if name.starts_with("fig") {
            continue;
        }
        let spline = format!("{d}/{name}.spline");
        let refined = format!("{d}/{name}-refined.spline");
        let mut eval = |path: &str, tag: &str| {
            let mut args = vec![s("eval"), path.to_string(), s("--oracle")];
            for p in cli_points(name) {
                args.push(format!("--point={p}"));
            }
            step(format!("{name}: {tag}"), args);
        };
        eval(&spline, "eval --oracle");
        let pattern = if name == "spline-h" { "box 0..1" } else { "box -4..8" };
        step(format!("{name}: refine"), vec![s("refine"), spline.clone(), s("--pattern"), s(pattern), s("--out"), refined.clone()]);
        let mut args = vec![s("eval"), refined.clone(), s("--oracle")];
        for p in cli_points(name) {
            args.push(format!("--point={p}"));
        }
        step(format!("{name}: eval --oracle after refine"), args);
    }
    if failures.is_empty() {
        Ok(format!("{steps} steps on {} fixtures exit 0", NAMES.len()))
    } else {
        Err(format!("{} of {steps} steps failed: {}", failures.len(), failures.join("; ")))
    }
}

fn main() {
    let tmp = tempfile::tempdir().expect("temporary directory");
    let results = [
        criterion(1, "encoding fidelity", Duration::from_secs(5), encoding_fidelity),
        criterion(2, "addition relation", Duration::from_secs(30), addition_relation),
        criterion(3, "closure laws", Duration::from_secs(60), closure_laws),
        criterion(4, "nestedness", Duration::from_secs(60), nestedness),
        criterion(5, "assumption B", Duration::from_secs(120), assumption_b),
        criterion(6, "kraft basis", Duration::from_secs(60), kraft_basis),
        criterion(7, "evaluation exactness", Duration::from_secs(60), evaluation_exactness),
        criterion(8, "evaluation scaling", Duration::from_secs(120), evaluation_scaling),
        criterion(9, "refinement invariance", Duration::from_secs(120), refinement_invariance),
        criterion(10, "end-to-end CLI", Duration::from_secs(300), || end_to_end(tmp.path())),
    ];
    let passed = results.iter().filter(|&&r| r).count();
    println!("{passed}/{} criteria passed", results.len());
    if passed != results.len() {
        std::process::exit(1);
    }
}
