//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fail.

use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use num_traits::Zero;
use rand::Rng;

use rising_sun::decompose::{cz_decompose, rising_sun_decompose, LeafReason, Level, Outcome, StoppingPolicy};
use rising_sun::density::{CumulativeTable, GridDensity};
use rising_sun::fixtures::{
    counterexample, counterexample_level, random_density, random_level, riesz_step, seeded, RandomSpec,
};
use rising_sun::io::{write_decomposition, write_density};
use rising_sun::scalar::{int, ratio, Exact};
use rising_sun::verify::{
    check_dyadic_property, check_halving_and_decay, check_means, check_nested_or_disjoint, residual_violation_measure,
    union_measure, verify_decomposition,
};
use rising_sun::{Decomposition, Rect, Scalar};

type Verdict = Result<String, String>;
type Criterion = (&'static str, fn() -> Verdict);

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn rsd(args: &[&str]) -> (i32, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_rsd")).args(args).output().expect("run rsd");
    (out.status.code().unwrap_or(-1), String::from_utf8_lossy(&out.stdout).into_owned())
}

fn criterion_1() -> Verdict {
    let density = counterexample();
    let start = Instant::now();
    let dec = rising_sun_decompose(&density, &Level::new(ratio(7, 8)), &StoppingPolicy::max_depth(40))
        .map_err(|e| e.to_string())?;
    let elapsed = start.elapsed();
    let selected: Vec<(String, String)> = dec.selected.iter().map(|s| (s.rect.to_string(), s.mean.to_string())).collect();
    let want = vec![
        ("[0,2/3)x[0,1)".to_string(), "7/8".to_string()),
        ("[2/3,1)x[0,4/7)".to_string(), "7/8".to_string()),
    ];
    ensure(selected == want, || format!("selected {selected:?}"))?;
    let residual: Vec<String> = dec.residual.iter().map(|r| r.rect.to_string()).collect();
    ensure(residual == ["[2/3,1)x[4/7,1)"], || format!("residual {residual:?}"))?;
    ensure(dec.complete, || "complete = false".into())?;
    ensure(elapsed < Duration::from_millis(100), || format!("took {elapsed:?}"))?;

    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let input = dir.path().join("ce.rsd");
    std::fs::write(&input, write_density(&density)).map_err(|e| e.to_string())?;
    let (code, text) = rsd(&["decompose", "--input", input.to_str().unwrap(), "--level", "7/8"]);
    ensure(code == 0 && text == write_decomposition(&dec, false), || format!("cli exit {code}, output {text:?}"))?;
    Ok(format!("exact selection, residual and flag reproduced in {elapsed:?}"))
}

/// Every conclusion of a complete run, rechecked exactly.
fn conclusions_hold(d: &GridDensity<Exact>, dec: &Decomposition<Exact>, a: &Exact) -> Result<(), String> {
    let table = CumulativeTable::build(d);
    let rects = dec.selected_rects();
    ensure(check_nested_or_disjoint(&rects) && rectangles_disjoint(&rects), || "selected rectangles overlap".into())?;
    let means = check_means(&table, &rects, a, &int(0));
    ensure(means.ok && means.worst_deviation.is_zero(), || format!("mean deviation {}", means.worst_deviation))?;
    let violation = residual_violation_measure(d, &rects, a);
    ensure(violation.is_zero(), || format!("residual violation {violation}"))?;
    ensure(check_dyadic_property(dec) == Some(true), || "division rectangles not nested-or-disjoint".into())?;
    let (halving, decay) = check_halving_and_decay(dec).ok_or("no division tree")?;
    ensure(halving, || "halving bound".into())?;
    ensure(decay, || "diameter decay bound".into())?;
    ensure(verify_decomposition(d, dec, &int(0)).all_ok(), || "verifier report".into())
}

/// Pairwise check without the sweep used by the verifier.
fn rectangles_disjoint(rects: &[Rect<Exact>]) -> bool {
    rects.iter().enumerate().all(|(i, r)| rects[i + 1..].iter().all(|s| r.intersection(s).is_none()))
}

fn criterion_2() -> Verdict {
    let start = Instant::now();
    let (mut complete, mut rejected) = (0, 0);
    for seed in 0..500u64 {
        let mut rng = seeded(seed);
        let d = random_density(&mut rng, &RandomSpec::default());
        let a = random_level(&mut rng, &d);
        let dec = match rising_sun_decompose(&d, &Level::new(a.clone()), &StoppingPolicy::max_depth(10)) {
            Ok(dec) => dec,
            Err(rising_sun::DecomposeError::ZeroTotalMeasure) => {
                rejected += 1;
                continue;
            }
            Err(e) => return Err(format!("seed {seed}: {e}")),
        };
        if dec.complete {
            complete += 1;
            conclusions_hold(&d, &dec, &a).map_err(|e| format!("seed {seed}: {e}"))?;
        }
    }
    let elapsed = start.elapsed();
    ensure(elapsed < Duration::from_secs(60), || format!("took {elapsed:?}"))?;
    ensure(complete >= 250, || format!("only {complete} complete runs"))?;
    Ok(format!("{complete} complete runs of 500 all pass ({rejected} zero-measure inputs), {elapsed:?}"))
}

/// A fine grid that is zero except for a few tall spikes; three levels of
/// division cannot isolate them.
fn spiky_density(rng: &mut impl Rng) -> GridDensity<Exact> {
    let dim = rng.gen_range(1..=2);
    let cells = if dim == 1 { 64 } else { 16 };
    let domain = Rect::from_bounds((0..dim).map(|_| (int(0), int(1)))).unwrap();
    let count = usize::pow(cells, dim as u32);
    let mut f = vec![int(0); count];
    for _ in 0..rng.gen_range(1..=3) {
        f[rng.gen_range(0..count)] = ratio(rng.gen_range(8..=64), rng.gen_range(1..=4));
    }
    let w = (0..count).map(|_| ratio(rng.gen_range(1..=8), 2)).collect();
    GridDensity::uniform(domain, &vec![cells; dim], f, Some(w)).unwrap()
}

fn criterion_3() -> Verdict {
    let (mut incomplete, mut cases) = (0, 0);
    for seed in 0..150u64 {
        let mut rng = seeded(1_000 + seed);
        let d = if seed % 3 == 0 { random_density(&mut rng, &RandomSpec::default()) } else { spiky_density(&mut rng) };
        let a = random_level(&mut rng, &d);
        let Ok(dec) = rising_sun_decompose(&d, &Level::new(a.clone()), &StoppingPolicy::max_depth(3)) else {
            continue;
        };
        cases += 1;
        let table = CumulativeTable::build(&d);
        let mut flagged_mass = int(0);
        let mut flagged = false;
        for r in dec.residual.iter().filter(|r| r.reason == LeafReason::ResolutionLimit) {
            let above = (0..d.cell_count()).any(|c| {
                d.f_values()[c] > a
                    && d.cell_rect(c).intersection(&r.rect).is_some_and(|p| !(d.w_values()[c].clone() * p.volume()).is_zero())
            });
            if above {
                flagged = true;
                flagged_mass += table.measure(&r.rect).unwrap();
            }
        }
        ensure(dec.complete == !flagged, || format!("seed {seed}: complete = {} but flagged leaves = {flagged}", dec.complete))?;
        let violation = residual_violation_measure(&d, &dec.selected_rects(), &a);
        ensure(violation <= flagged_mass, || format!("seed {seed}: violation {violation} > flagged mass {flagged_mass}"))?;
        incomplete += usize::from(!dec.complete);
    }
    ensure(cases >= 100, || format!("only {cases} cases"))?;
    ensure(incomplete > 0, || "no case was truncated".into())?;
    Ok(format!("{cases} truncated runs honest, {incomplete} flagged incomplete"))
}

fn criterion_4() -> Verdict {
    let mut cubes = 0;
    for seed in 0..200u64 {
        let mut rng = seeded(5_000 + seed);
        let d = random_density(&mut rng, &RandomSpec::cube());
        let a = random_level(&mut rng, &d);
        if a.is_zero() {
            continue;
        }
        let depth = 12 / d.dim();
        let cz = cz_decompose(&d, &Level::new(a.clone()), &StoppingPolicy::max_depth(depth)).map_err(|e| e.to_string())?;
        let top = (0..d.dim()).fold(a.clone(), |acc, _| acc * int(2));
        let table = CumulativeTable::build(&d);
        for c in &cz.cubes {
            let mean = table.mean(&c.cube).unwrap().unwrap();
            ensure(mean > a && mean <= top, || format!("seed {seed}: {} mean {mean} outside ({a}, {top}]", c.cube))?;
        }
        cubes += cz.cubes.len();
    }

    let d = counterexample();
    let a = counterexample_level();
    for depth in 1..=8 {
        let cz = cz_decompose(&d, &Level::new(a.clone()), &StoppingPolicy::max_depth(depth)).unwrap();
        ensure(cz.cubes.iter().all(|c| c.mean != a), || format!("depth {depth}: a dyadic mean hit A"))?;
    }
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let input = dir.path().join("ce.rsd");
    std::fs::write(&input, write_density(&d)).map_err(|e| e.to_string())?;
    let (code, text) = rsd(&["cz", "--input", input.to_str().unwrap(), "--level", "7/8"]);
    ensure(code == 0, || format!("cz exit {code}"))?;
    ensure(text.contains("dyadic means equal to A: 0 of 3"), || format!("cz report: {text}"))?;
    ensure(text.contains("rising-sun means equal to A: 2 of 2"), || format!("cz report: {text}"))?;
    Ok(format!("{cubes} dyadic cubes inside (A, 2^n A]; counterexample: dyadic 0 of 3 at A, rising sun 2 of 2"))
}

fn cell_overlap(d: &GridDensity<Exact>, r: &Rect<Exact>) -> (Exact, Exact) {
    let (mut f, mut m) = (int(0), int(0));
    for c in 0..d.cell_count() {
        if let Some(p) = d.cell_rect(c).intersection(r) {
            let mass = d.w_values()[c].clone() * p.volume();
            f += d.f_values()[c].clone() * mass.clone();
            m += mass;
        }
    }
    (f, m)
}

fn random_subrect(rng: &mut impl Rng, d: &GridDensity<Exact>) -> Rect<Exact> {
    Rect::from_bounds(d.domain().sides().iter().map(|s| {
        let q = rng.gen_range(1..=97);
        let (a, b) = (rng.gen_range(0..=q), rng.gen_range(0..=q));
        let at = |k: i64| s.lo().clone() + s.length() * ratio(k, q);
        (at(a.min(b)), at(a.max(b)))
    }))
    .unwrap()
}

/// Union measure by testing a corner of every box of the grid cut at all
/// rectangle sides and cell edges.
fn raster_union(d: &GridDensity<Exact>, rects: &[Rect<Exact>]) -> Exact {
    let n = d.dim();
    let cuts: Vec<Vec<Exact>> = (0..n)
        .map(|axis| {
            let mut c = d.edges(axis).to_vec();
            c.extend(rects.iter().flat_map(|r| [r.side(axis).lo().clone(), r.side(axis).hi().clone()]));
            c.sort();
            c.dedup();
            c
        })
        .collect();
    let boxes: usize = cuts.iter().map(|c| c.len() - 1).product();
    let mut total = int(0);
    for mut k in 0..boxes {
        let mut bounds = Vec::with_capacity(n);
        for c in cuts.iter().rev() {
            let i = k % (c.len() - 1);
            k /= c.len() - 1;
            bounds.push((c[i].clone(), c[i + 1].clone()));
        }
        bounds.reverse();
        let bx = Rect::from_bounds(bounds).unwrap();
        let corner: Vec<Exact> = bx.sides().iter().map(|s| s.lo().clone()).collect();
        if rects.iter().any(|r| r.contains_point(&corner)) {
            total += cell_overlap(d, &bx).1;
        }
    }
    total
}

fn criterion_5() -> Verdict {
    let mut rng = seeded(0xacce);
    for i in 0..1000 {
        let d = random_density(&mut rng, &RandomSpec::default());
        let table = CumulativeTable::build(&d);
        let r = random_subrect(&mut rng, &d);
        let (f, m) = cell_overlap(&d, &r);
        ensure(table.measure(&r).unwrap() == m && table.integral_f(&r).unwrap() == f, || format!("pair {i}: {r}"))?;
    }
    for i in 0..200 {
        let d = random_density(&mut rng, &RandomSpec::default());
        let k = rng.gen_range(0..=8);
        let rects: Vec<_> = (0..k).map(|_| random_subrect(&mut rng, &d)).collect();
        let (fast, slow) = (union_measure(&d, &rects), raster_union(&d, &rects));
        ensure(fast == slow, || format!("family {i}: {fast} vs {slow}"))?;
    }
    Ok("1000 (density, rectangle) pairs and 200 unions agree exactly".into())
}

/// Cut positions of a tree in pre-order.
fn cuts<S: Scalar>(dec: &Decomposition<S>) -> Vec<S> {
    let mut out = Vec::new();
    dec.root.as_ref().unwrap().walk(&mut |n| match &n.outcome {
        Outcome::CutSelected { cut, .. } => out.push(cut.clone()),
        Outcome::SplitBoth { midpoint, .. } => out.push(midpoint.clone()),
        _ => {}
    });
    out
}

fn criterion_6() -> Verdict {
    let mut compared = 0;
    for (density, level) in [(counterexample(), ratio(7, 8)), (riesz_step(), ratio(3, 2))] {
        let policy = StoppingPolicy::max_depth(40);
        let exact = rising_sun_decompose(&density, &Level::new(level.clone()), &policy).map_err(|e| e.to_string())?;
        let float = rising_sun_decompose(&density.convert::<f64>(), &Level::new(level.to_f64()), &policy.convert())
            .map_err(|e| e.to_string())?;
        let (ce, cf) = (cuts(&exact), cuts(&float));
        ensure(ce.len() == cf.len() && !ce.is_empty(), || format!("cut counts {} vs {}", ce.len(), cf.len()))?;
        for (e, f) in ce.iter().zip(&cf) {
            let e = e.to_f64();
            ensure((e - f).abs() <= 1e-9 * e.abs(), || format!("cut {f} vs {e}"))?;
        }
        compared += ce.len();
        let report = verify_decomposition(&density, &float.to_exact(), &1e-9f64.to_exact());
        ensure(report.all_ok(), || format!("float verification:\n{report}"))?;

        let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
        let (input, output) = (dir.path().join("d.rsd"), dir.path().join("d.rsdec"));
        std::fs::write(&input, write_density(&density)).map_err(|e| e.to_string())?;
        let (i, o) = (input.to_str().unwrap(), output.to_str().unwrap());
        let level = level.to_string();
        let (code, _) = rsd(&["decompose", "--input", i, "--level", &level, "--mode", "float", "--dump-tree", "--output", o]);
        ensure(code == 0, || format!("float decompose exit {code}"))?;
        let (code, report) = rsd(&["verify", "--input", o, "--density", i, "--mode", "float"]);
        ensure(code == 0, || format!("float verify exit {code}:\n{report}"))?;
    }
    Ok(format!("{compared} float cuts within 1e-9 of exact; float verification passes"))
}

fn random_grid(seed: u64, cells: usize) -> GridDensity<Exact> {
    let mut rng = seeded(seed);
    let domain = Rect::from_bounds([(int(0), int(1)), (int(0), int(1))]).unwrap();
    let f = (0..cells * cells).map(|_| int(rng.gen_range(0..=16))).collect();
    GridDensity::uniform(domain, &[cells, cells], f, None).unwrap()
}

fn criterion_7() -> Verdict {
    let big = random_grid(256, 256).convert::<f64>();
    let level = CumulativeTable::build(&big).mean(big.domain()).unwrap().unwrap() * 1.25;
    let start = Instant::now();
    let dec = rising_sun_decompose(&big, &Level::new(level), &StoppingPolicy::max_depth(40)).map_err(|e| e.to_string())?;
    let float_time = start.elapsed();
    ensure(float_time < Duration::from_secs(1), || format!("float 256x256 took {float_time:?}"))?;

    let small = random_grid(32, 32);
    let level = CumulativeTable::build(&small).mean(small.domain()).unwrap().unwrap() * ratio(5, 4);
    let start = Instant::now();
    let exact = rising_sun_decompose(&small, &Level::new(level), &StoppingPolicy::max_depth(40)).map_err(|e| e.to_string())?;
    let exact_time = start.elapsed();
    ensure(exact_time < Duration::from_secs(10), || format!("exact 32x32 took {exact_time:?}"))?;
    Ok(format!(
        "float 256x256 in {float_time:?} ({} selected), exact 32x32 in {exact_time:?} ({} selected)",
        dec.selected.len(),
        exact.selected.len()
    ))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 7] = [
        ("counterexample fixture", criterion_1),
        ("division conclusions on random densities", criterion_2),
        ("truncated-run honesty", criterion_3),
        ("dyadic cube baseline", criterion_4),
        ("integral and union oracles", criterion_5),
        ("float-mode consistency", criterion_6),
        ("performance", criterion_7),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        match check() {
            Ok(detail) => println!("criterion {} PASS {name}: {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {} FAIL {name}: {why}", i + 1);
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
